use nalgebra::Complex;
use serde::ser::{SerializeSeq, Serializer};

/// Complex numbers as `[re, im]` pairs.
pub fn complex_slice<S: Serializer>(v: &[Complex<f64>], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}
