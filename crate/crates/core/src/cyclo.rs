//! Exact arithmetic in `Z[ζ_k]`.
//!
//! Elements are kept in the full power basis `1, ζ, …, ζ^{k-1}` and are only
//! reduced modulo the cyclotomic polynomial `Φ_k` when testing for zero. This
//! keeps root shifts and conjugation as index permutations, and lets a
//! counting vector of exponent differences be used directly as a ring element.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `Σ coeffs[j] ζ_k^j` of the ring of integers of `Q(ζ_k)`.
#[derive(Clone, Debug)]
pub struct Cyc {
    k: usize,
    coeffs: Vec<BigInt>,
}

impl Cyc {
    pub fn new(k: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("root order k must be positive".into()));
        }
        if coeffs.len() != k {
            return Err(Error::Dimension(format!(
                "expected {k} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Cyc { k, coeffs })
    }

    pub fn from_ints(k: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(k, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Builds `Σ counts[d] ζ^d`, reducing indices modulo `k`.
    pub fn from_counts(k: usize, counts: &[i64]) -> Self {
        assert!(k > 0, "root order k must be positive");
        let mut coeffs = vec![BigInt::zero(); k];
        for (d, &c) in counts.iter().enumerate() {
            coeffs[d % k] += c;
        }
        Cyc { k, coeffs }
    }

    pub fn zero(k: usize) -> Self {
        assert!(k > 0, "root order k must be positive");
        Cyc { k, coeffs: vec![BigInt::zero(); k] }
    }

    pub fn one(k: usize) -> Self {
        Self::root(k, 0)
    }

    /// The root of unity `ζ_k^e`.
    pub fn root(k: usize, e: i64) -> Self {
        let mut z = Self::zero(k);
        z.coeffs[e.rem_euclid(k as i64) as usize] = BigInt::one();
        z
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check_k(&self, other: &Cyc) -> Result<()> {
        if self.k != other.k {
            Err(Error::OrderMismatch(self.k, other.k))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Cyc) -> Result<Cyc> {
        self.check_k(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Cyc { k: self.k, coeffs })
    }

    pub fn checked_sub(&self, other: &Cyc) -> Result<Cyc> {
        self.check_k(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Cyc { k: self.k, coeffs })
    }

    /// Product as a convolution modulo `x^k − 1`.
    pub fn checked_mul(&self, other: &Cyc) -> Result<Cyc> {
        self.check_k(other)?;
        let k = self.k;
        let mut coeffs = vec![BigInt::zero(); k];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[(i + j) % k] += a * b;
                }
            }
        }
        Ok(Cyc { k, coeffs })
    }

    /// Multiplication by `ζ^e`: a cyclic shift of the coefficient vector.
    pub fn mul_root(&self, e: i64) -> Cyc {
        let k = self.k;
        let shift = e.rem_euclid(k as i64) as usize;
        let mut coeffs = vec![BigInt::zero(); k];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(j + shift) % k] = c.clone();
        }
        Cyc { k, coeffs }
    }

    pub fn scale(&self, s: &BigInt) -> Cyc {
        Cyc { k: self.k, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Complex conjugation, `ζ^j ↦ ζ^{k−j}`.
    pub fn conj(&self) -> Cyc {
        let k = self.k;
        let mut coeffs = vec![BigInt::zero(); k];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(k - j) % k] = c.clone();
        }
        Cyc { k, coeffs }
    }

    /// Remainder of the coefficient polynomial modulo `Φ_k`; the canonical
    /// representative of this element (length `φ(k)`).
    pub fn reduced(&self) -> Vec<BigInt> {
        let phi = cyclotomic_poly_cached(self.k);
        let mut rem = self.coeffs.clone();
        let deg = phi.len() - 1;
        for top in (deg..rem.len()).rev() {
            let lead = rem[top].clone();
            if lead.is_zero() {
                continue;
            }
            // Φ_k is monic
            for (i, p) in phi.iter().enumerate() {
                if *p != 0 {
                    rem[top - deg + i] -= &lead * BigInt::from(*p);
                }
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(Zero::is_zero)
    }

    /// Equality in the ring (not coefficient-wise).
    pub fn ring_eq(&self, other: &Cyc) -> Result<bool> {
        Ok(self.checked_sub(other)?.is_zero())
    }

    /// Numerical value at `ζ_k = e^{2πi/k}`.
    pub fn to_complex(&self) -> Complex64 {
        let k = self.k as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                Complex64::from_polar(c, 2.0 * std::f64::consts::PI * j as f64 / k)
            })
            .sum()
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.ring_eq(other).unwrap_or(false)
    }
}

impl Eq for Cyc {}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc { k: self.k, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        -&self
    }
}

// Operator forms panic on mismatched k; use the checked_* methods to get an error.
impl Add for &Cyc {
    type Output = Cyc;
    fn add(self, rhs: &Cyc) -> Cyc {
        self.checked_add(rhs).expect("Cyc addition with mismatched root order")
    }
}

impl Sub for &Cyc {
    type Output = Cyc;
    fn sub(self, rhs: &Cyc) -> Cyc {
        self.checked_sub(rhs).expect("Cyc subtraction with mismatched root order")
    }
}

impl Mul for &Cyc {
    type Output = Cyc;
    fn mul(self, rhs: &Cyc) -> Cyc {
        self.checked_mul(rhs).expect("Cyc product with mismatched root order")
    }
}

impl fmt::Display for Cyc {
    /// Power-basis form, e.g. `2 + z` or `2z + z^2`; `z` stands for `ζ_k`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag_one = mag.is_one();
            match j {
                0 => write!(f, "{mag}")?,
                1 if mag_one => write!(f, "z")?,
                1 => write!(f, "{mag}z")?,
                _ if mag_one => write!(f, "z^{j}")?,
                _ => write!(f, "{mag}z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The cyclotomic polynomial `Φ_k`, ascending coefficients.
///
/// Computed as `(x^k − 1) / Π_{d | k, d < k} Φ_d` by exact division.
pub fn cyclotomic_poly(k: usize) -> Vec<BigInt> {
    cyclotomic_poly_cached(k).iter().map(|&c| BigInt::from(c)).collect()
}

fn cyclotomic_poly_cached(k: usize) -> Arc<Vec<i64>> {
    assert!(k > 0, "cyclotomic polynomial needs k >= 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&k) {
        return p.clone();
    }
    let mut num = vec![0i64; k + 1];
    num[0] = -1;
    num[k] = 1;
    for d in 1..k {
        if k % d == 0 {
            let phi_d = cyclotomic_poly_cached(d);
            num = exact_div(&num, &phi_d);
        }
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(k, p.clone());
    p
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut q = vec![0i64; num.len() - dd];
    for top in (dd..rem.len()).rev() {
        let c = rem[top];
        if c == 0 {
            continue;
        }
        debug_assert_eq!(c % lead, 0);
        let t = c / lead;
        q[top - dd] = t;
        for (i, &p) in den.iter().enumerate() {
            rem[top - dd + i] -= t * p;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "cyclotomic division not exact");
    q
}

/// Zero test for a small-integer counting vector `Σ counts[d] ζ_k^d`.
///
/// Same reduction as [`Cyc::is_zero`] on machine integers; used on the hot
/// path of orthogonality checks where every coefficient is bounded by `n`.
pub fn counts_vanish(k: usize, counts: &[i64]) -> bool {
    debug_assert_eq!(counts.len(), k);
    let phi = cyclotomic_poly_cached(k);
    let deg = phi.len() - 1;
    let mut rem: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
    for top in (deg..rem.len()).rev() {
        let lead = rem[top];
        if lead == 0 {
            continue;
        }
        for (i, &p) in phi.iter().enumerate() {
            if p != 0 {
                rem[top - deg + i] -= lead * p as i128;
            }
        }
    }
    rem[..deg].iter().all(|&r| r == 0)
}
