//! `Complex64` as `{"re": .., "im": ..}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Repr {
    re: f64,
    im: f64,
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Repr { re: z.re, im: z.im }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let r = Repr::deserialize(d)?;
    Ok(Complex64::new(r.re, r.im))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| Repr { re: z.re, im: z.im }).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<Repr>::deserialize(d)?.map(|r| Complex64::new(r.re, r.im)))
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(zs.iter().map(|z| Repr { re: z.re, im: z.im }))
    }
}
