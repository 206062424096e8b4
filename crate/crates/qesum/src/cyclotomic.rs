//! Exact arithmetic in `Z[omega]` for `omega = e^(2*pi*i/m)`, plus the root
//! parameters `c, q, r, s` and the 2-normalized Chebyshev values `Q_k`.
//!
//! Elements are stored as integer vectors in `Z[x]/(x^m - 1)` with `omega -> x`
//! (index `j` holds the coefficient of `omega^j`). Arithmetic never reduces
//! modulo the cyclotomic polynomial `Phi_m`; reduction happens only when
//! deciding whether a value is zero, so sums of `±omega^k` stay transparently
//! exact.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Checks the modulus precondition shared by everything in this crate.
pub fn check_modulus(m: u32) -> Result<()> {
    if m < 3 || m.is_multiple_of(2) {
        Err(Error::BadModulus(m))
    } else {
        Ok(())
    }
}

/// An exact cyclotomic integer: `sum_j coeffs[j] * omega^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycInt {
    m: u32,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn new(m: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        check_modulus(m)?;
        if coeffs.len() != m as usize {
            return Err(Error::Internal(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                m
            )));
        }
        Ok(CycInt { m, coeffs })
    }

    pub fn zero(m: u32) -> Result<Self> {
        Self::new(m, vec![BigInt::zero(); m as usize])
    }

    /// `omega^j` (j taken mod m, negatives allowed).
    pub fn omega_pow(m: u32, j: i64) -> Result<Self> {
        let mut z = Self::zero(m)?;
        let idx = j.rem_euclid(m as i64) as usize;
        z.coeffs[idx] = BigInt::from(1);
        Ok(z)
    }

    /// Builds from machine-word exponent counts (the evaluator hot path).
    pub fn from_counts(m: u32, counts: &[i64]) -> Result<Self> {
        Self::new(m, counts.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            Err(Error::ModulusMismatch(self.m, other.m))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.m, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.m, coeffs)
    }

    /// Cyclic convolution: multiplication in `Z[x]/(x^m - 1)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let m = self.m as usize;
        let mut out = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[(i + j) % m] += a * b;
            }
        }
        Self::new(self.m, out)
    }

    /// Complex conjugation: `omega^j -> omega^(m-j)`.
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut out = vec![BigInt::zero(); m];
        for (j, a) in self.coeffs.iter().enumerate() {
            out[(m - j) % m] = a.clone();
        }
        CycInt {
            m: self.m,
            coeffs: out,
        }
    }

    /// `self * conj(self)`, i.e. `|self|^2` as an exact cyclotomic integer.
    pub fn norm_sq(&self) -> Self {
        self.mul(&self.conj()).expect("same modulus")
    }

    /// True iff the represented complex number is exactly zero, decided by
    /// reduction modulo `Phi_m`.
    pub fn is_zero(&self) -> bool {
        reduce_mod_phi(&self.coeffs, self.m)
            .iter()
            .all(BigInt::is_zero)
    }

    /// Exact equality as complex numbers (not as raw vectors).
    pub fn eq_exact(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// If the value is a rational integer, returns it; the reduction modulo
    /// `Phi_m` must leave only the constant term.
    pub fn to_integer(&self) -> Option<BigInt> {
        let rem = reduce_mod_phi(&self.coeffs, self.m);
        if rem.iter().skip(1).all(BigInt::is_zero) {
            Some(rem.first().cloned().unwrap_or_else(BigInt::zero))
        } else {
            None
        }
    }

    /// Embeds into `C` via `omega = e^(2*pi*i/m)`; summation order is index
    /// 0 to m-1, so results are bit-for-bit deterministic.
    pub fn to_complex(&self) -> Complex64 {
        let m = self.m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let theta = 2.0 * PI * j as f64 / m;
            let af = a.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::new(theta.cos(), theta.sin()) * af;
        }
        acc
    }

    /// Complex magnitude in double precision.
    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }
}

/// Coefficients of the m-th cyclotomic polynomial, ascending degree.
///
/// Computed by dividing `x^m - 1` by the product of `Phi_d` over proper
/// divisors `d` of `m`. Coefficients stay within i64 for every modulus this
/// crate accepts in practice (the first coefficient outside {-1,0,1} appears
/// at m = 105).
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    fn inner(m: u32, cache: &mut Vec<Option<Vec<i64>>>) -> Vec<i64> {
        if let Some(p) = &cache[m as usize] {
            return p.clone();
        }
        // x^m - 1
        let mut num = vec![0i64; m as usize + 1];
        num[0] = -1;
        num[m as usize] = 1;
        for d in 1..m {
            if m.is_multiple_of(d) {
                let phi_d = inner(d, cache);
                num = poly_div_exact(&num, &phi_d);
            }
        }
        cache[m as usize] = Some(num.clone());
        num
    }
    let mut cache = vec![None; m as usize + 1];
    inner(m, &mut cache)
}

/// Exact division of integer polynomials (monic divisor), ascending coeffs.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1, "divisor must be monic");
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (k, &dc) in den.iter().enumerate() {
            rem[i - dd + k] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division must be exact");
    quot
}

/// Remainder of `coeffs` (as a polynomial in x, deg < m) modulo `Phi_m`.
fn reduce_mod_phi(coeffs: &[BigInt], m: u32) -> Vec<BigInt> {
    let phi = cyclotomic_poly(m);
    let dd = phi.len() - 1;
    let mut rem: Vec<BigInt> = coeffs.to_vec();
    for i in (dd..rem.len()).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut rem[i], BigInt::zero());
        for (k, &dc) in phi.iter().enumerate().take(dd) {
            rem[i - dd + k] -= &c * dc;
        }
    }
    rem.truncate(dd);
    rem
}

/// The structural constants of modulus m: the extremal exponent and the
/// leading root-difference magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RootParams {
    pub m: u32,
    /// `c = floor((m+1)/4)`, the exponent attaining q.
    pub c: u32,
    /// `q = 2 cos(pi/2m) = max_y |omega^y - omega^-y|`, in [sqrt(3), 2).
    pub q: f64,
    /// Second-largest value of `|omega^y - omega^-y|`: `2 cos(3pi/2m)`.
    pub r: f64,
    /// Second-largest value of `|omega^y + omega^-y|`: `2 cos(pi/m)`.
    pub s: f64,
}

/// Computes `c, q, r, s` for an odd modulus.
///
/// `r` and `s` are returned at magnitude scale (twice the plain cosines):
/// they are defined by their role as second-largest magnitudes, and the
/// identity `2 + s = q^2` (i.e. `s = Q_2(q)`) only holds at this scale. Unit
/// tests pin both against brute-force second maxima.
pub fn root_params(m: u32) -> Result<RootParams> {
    check_modulus(m)?;
    let mf = m as f64;
    Ok(RootParams {
        m,
        c: (m + 1) / 4,
        q: 2.0 * (PI / (2.0 * mf)).cos(),
        r: 2.0 * (3.0 * PI / (2.0 * mf)).cos(),
        s: 2.0 * (PI / mf).cos(),
    })
}

/// Integer coefficients of the 2-normalized Chebyshev polynomial `Q_k`
/// (`Q_0 = 2`, `Q_1 = x`, `Q_(k+1) = x*Q_k - Q_(k-1)`), ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebSeq {
    pub k: u32,
    pub coeffs: Vec<i64>,
}

pub fn chebyshev_seq(k: u32) -> ChebSeq {
    let mut prev = vec![2i64]; // Q_0
    if k == 0 {
        return ChebSeq { k, coeffs: prev };
    }
    let mut cur = vec![0i64, 1]; // Q_1 = x
    for _ in 1..k {
        // next = x*cur - prev
        let mut next = vec![0i64; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    ChebSeq { k, coeffs: cur }
}

/// Value of `Q_k(x)` via the recurrence; satisfies `Q_k(2 cos t) = 2 cos(kt)`.
pub fn chebyshev_q(k: u32, x: f64) -> f64 {
    let mut prev = 2.0;
    if k == 0 {
        return prev;
    }
    let mut cur = x;
    for _ in 1..k {
        let next = x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
