//! Product-moment correlation computed exactly.
//!
//! Each vector is scaled by a power of two so every element is an integer;
//! the correlation is invariant to that scaling, so all sums are exact
//! integers and only the final square root is rounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Elements as integers sharing one power-of-two scale.
fn integers(v: &[f64]) -> Vec<BigInt> {
    let parts: Vec<(i64, i32)> = v
        .iter()
        .map(|&x| {
            assert!(x.is_finite());
            if x == 0.0 {
                return (0, 0);
            }
            let bits = x.to_bits();
            let exp = ((bits >> 52) & 0x7ff) as i32;
            let frac = (bits & ((1u64 << 52) - 1)) as i64;
            let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
            (if x < 0.0 { -mant } else { mant }, e)
        })
        .collect();
    let min_e = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
    parts
        .into_iter()
        .map(|(m, e)| if m == 0 { BigInt::zero() } else { BigInt::from(m) << ((e - min_e) as usize) })
        .collect()
}

pub fn pearson_exact(x: &[f64], y: &[f64]) -> f64 {
    let n = BigInt::from(x.len());
    let xs = integers(x);
    let ys = integers(y);
    let sum = |v: &[BigInt]| v.iter().fold(BigInt::zero(), |a, b| a + b);
    let dot = |a: &[BigInt], b: &[BigInt]| a.iter().zip(b).fold(BigInt::zero(), |acc, (p, q)| acc + p * q);
    let (sx, sy) = (sum(&xs), sum(&ys));
    let cov = &n * dot(&xs, &ys) - &sx * &sy;
    let vx = &n * dot(&xs, &xs) - &sx * &sx;
    let vy = &n * dot(&ys, &ys) - &sy * &sy;
    let r2 = BigRational::new(&cov * &cov, vx * vy);
    let r = r2.to_f64().unwrap().sqrt();
    if cov.is_negative() {
        -r
    } else {
        r
    }
}
