//! Damped least-squares root search on the vector field: every root it finds
//! lies on t1 ∪ t2 ∪ t3 ∪ s+ ∪ s-.

use nalgebra::{Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use so4_core::body::vector_field;
use so4_core::equilibria::{distances_to_equilibrium_set, s_family_basis, SFamilySign};
use so4_core::spectral::linearize;
use so4_core::{InertiaSpectrum, So4State};

/// Levenberg–Marquardt on `X(M) = 0`. The Jacobian is singular on the
/// solution set, so plain Newton is not an option.
fn solve(seed: So4State, lam: &InertiaSpectrum) -> Option<So4State> {
    let mut m = seed;
    let mut mu = 1e-3;
    let mut f = vector_field(&m, lam).to_vector();
    for _ in 0..500 {
        if f.norm() <= 1e-14 * m.norm_squared().max(1.0) {
            return Some(m);
        }
        let j = linearize(&m, lam);
        let jt = j.transpose();
        let lhs = jt * j + Matrix6::identity() * mu;
        let step: Vector6<f64> = lhs.lu().solve(&(-(jt * f)))?;
        let trial = So4State::from_vector(&(m.to_vector() + step));
        let ft = vector_field(&trial, lam).to_vector();
        if ft.norm() < f.norm() {
            m = trial;
            f = ft;
            mu = (mu * 0.3).max(1e-15);
        } else {
            mu *= 10.0;
        }
    }
    None
}

#[test]
fn roots_lie_on_the_equilibrium_set() {
    let lam = InertiaSpectrum::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut converged, mut worst) = (0, 0.0f64);
    for _ in 0..1000 {
        let seed = So4State(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
        let Some(root) = solve(seed, &lam) else { continue };
        converged += 1;
        let (family, d) = distances_to_equilibrium_set(&root, &lam)[0];
        worst = worst.max(d);
        assert!(d <= 1e-8, "root {root:?} is {d:e} from the nearest family ({family:?})");
    }
    assert!(converged >= 900, "only {converged} of 1000 seeds converged");
    println!("{converged} roots, worst distance {worst:e}");
}

#[test]
fn s_family_combinations_are_equilibria() {
    let lam = InertiaSpectrum::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for sign in [SFamilySign::Plus, SFamilySign::Minus] {
        let basis = s_family_basis(sign, &lam);
        for _ in 0..100 {
            let m = basis.iter().fold(So4State::ZERO, |acc, v| acc + *v * rng.random_range(-5.0..5.0));
            assert!(vector_field(&m, &lam).max_abs() <= 1e-13 * m.norm_squared().max(1.0));
        }
    }
    let plus = s_family_basis(SFamilySign::Plus, &lam);
    assert_eq!(plus[0], So4State::new(0.2, 0.0, 0.0, 0.2, 0.0, 0.0));
}

#[test]
fn generic_states_are_not_equilibria() {
    let lam = InertiaSpectrum::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let m = So4State(std::array::from_fn(|_| rng.random_range(-2.0..2.0)));
        assert!(!so4_core::equilibria::is_equilibrium_default(&m, &lam));
    }
    assert!(so4_core::equilibria::is_equilibrium_default(&So4State::ZERO, &lam));
}
