#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_sl::coeffs::FourierPotential;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = b.norm();
    if scale == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / scale
    }
}

pub fn harmonic() -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

pub fn potential(max_len: usize) -> impl Strategy<Value = FourierPotential> {
    (0.5..2.0f64, prop::collection::vec(harmonic(), 1..=max_len))
        .prop_map(|(beta, q)| FourierPotential::new(beta, q).unwrap())
}

/// A point in the open first quadrant at distance ≥ 0.05 from both pole
/// lattices `±n/2` and `±in/(2β)`.
pub fn off_lattice(beta: f64, z: Complex64) -> bool {
    let far = |w: f64, step: f64| (w / step - (w / step).round()).abs() * step > 0.05;
    z.norm() > 0.2
        && (z.im.abs() > 0.05 || far(z.re, 0.5))
        && (z.re.abs() > 0.05 || far(z.im, 0.5 / beta))
}

pub fn lambda() -> impl Strategy<Value = Complex64> {
    (0.1..4.0f64, 0.1..4.0f64, 0u8..4)
        .prop_map(|(a, b, k)| Complex64::new(a, b) * Complex64::i().powu(k as u32))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_small_potential(rng: &mut ChaCha8Rng, max_len: usize) -> FourierPotential {
    let n = rng.gen_range(1..=max_len);
    let q = (0..n)
        .map(|_| {
            Complex64::from_polar(
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    FourierPotential::new(rng.gen_range(0.5..2.0), q).unwrap()
}

/// Complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Rc {
    pub re: BigRational,
    pub im: BigRational,
}

impl Rc {
    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Rc) -> Rc {
        Rc::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn mul(&self, o: &Rc) -> Rc {
        Rc::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn scale(&self, k: &BigRational) -> Rc {
        Rc::new(&self.re * k, &self.im * k)
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact triangular table, `table[n-1][α-1]`, from the two recurrences.
pub fn exact_vtable(q: &[Rc], order: usize) -> Vec<Vec<Rc>> {
    let h = |k: usize| q.get(k.wrapping_sub(1)).cloned().unwrap_or_else(Rc::zero);
    let mut v = vec![vec![Rc::zero(); order]; order];
    for alpha in 1..=order {
        let mut column_sum = Rc::zero();
        for n in 1..alpha {
            let mut acc = Rc::zero();
            for s in n..alpha {
                acc = acc.add(&h(alpha - s).mul(&v[n - 1][s - 1]));
            }
            let value = acc.scale(&ratio(-1, (alpha * (alpha - n)) as i64));
            column_sum = column_sum.add(&value);
            v[n - 1][alpha - 1] = value;
        }
        let diag = h(alpha)
            .scale(&ratio(-1, alpha as i64))
            .add(&column_sum.scale(&ratio(-1, 1)));
        v[alpha - 1][alpha - 1] = diag;
    }
    v
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9))
}
