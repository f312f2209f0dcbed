//! Points of `so(4)` in the coordinates `(x1, x2, x3, y1, y2, y3)`.
//!
//! The canonical embedding into 4×4 antisymmetric matrices is
//!
//! ```text
//!       [  0  -x3   x2   y1 ]
//!   M = [  x3   0  -x1   y2 ]
//!       [ -x2   x1   0   y3 ]
//!       [ -y1  -y2  -y3   0 ]
//! ```
//!
//! and the trace pairing `-½ Tr(AB)` becomes the Euclidean dot product of
//! coordinates. Every module goes through [`So4State::to_matrix`] and
//! [`So4State::from_matrix`]; nothing else hard-codes the layout.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Matrix4, Vector6};
use serde::Serialize;

pub const X1: usize = 0;
pub const X2: usize = 1;
pub const X3: usize = 2;
pub const Y1: usize = 3;
pub const Y2: usize = 4;
pub const Y3: usize = 5;

pub const COORDINATE_NAMES: [&str; 6] = ["x1", "x2", "x3", "y1", "y2", "y3"];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct So4State(pub [f64; 6]);

impl So4State {
    pub const ZERO: So4State = So4State([0.0; 6]);

    pub fn new(x1: f64, x2: f64, x3: f64, y1: f64, y2: f64, y3: f64) -> Self {
        So4State([x1, x2, x3, y1, y2, y3])
    }

    pub fn from_xy(x: [f64; 3], y: [f64; 3]) -> Self {
        So4State([x[0], x[1], x[2], y[0], y[1], y[2]])
    }

    /// Unit vector along coordinate `index`.
    pub fn unit(index: usize) -> Self {
        let mut s = Self::ZERO;
        s.0[index] = 1.0;
        s
    }

    pub fn x(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn y(&self) -> [f64; 3] {
        [self.0[3], self.0[4], self.0[5]]
    }

    /// `(y, x)`: the blocks exchanged.
    pub fn swapped(&self) -> Self {
        Self::from_xy(self.y(), self.x())
    }

    pub fn as_array(&self) -> [f64; 6] {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let mut out = *self;
        for (i, v) in out.0.iter_mut().enumerate() {
            *v = f(i, *v);
        }
        out
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::from_row_slice(&self.0)
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        So4State([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let [x1, x2, x3, y1, y2, y3] = self.0;
        Matrix4::new(
            0.0, -x3, x2, y1, //
            x3, 0.0, -x1, y2, //
            -x2, x1, 0.0, y3, //
            -y1, -y2, -y3, 0.0,
        )
    }

    /// Reads coordinates from the lower/right entries; the antisymmetric
    /// part is assumed.
    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        So4State([m[(2, 1)], m[(0, 2)], m[(1, 0)], m[(0, 3)], m[(1, 3)], m[(2, 3)]])
    }
}

impl Index<usize> for So4State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for So4State {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for So4State {
    type Output = So4State;
    fn add(self, rhs: So4State) -> So4State {
        self.map(|i, v| v + rhs.0[i])
    }
}

impl Sub for So4State {
    type Output = So4State;
    fn sub(self, rhs: So4State) -> So4State {
        self.map(|i, v| v - rhs.0[i])
    }
}

impl Mul<f64> for So4State {
    type Output = So4State;
    fn mul(self, k: f64) -> So4State {
        self.map(|_, v| v * k)
    }
}

impl Neg for So4State {
    type Output = So4State;
    fn neg(self) -> So4State {
        self * -1.0
    }
}

/// Coordinates of the matrix commutator `[A, B] = AB - BA`.
pub fn commutator(a: &So4State, b: &So4State) -> So4State {
    let (ma, mb) = (a.to_matrix(), b.to_matrix());
    So4State::from_matrix(&(ma * mb - mb * ma))
}
