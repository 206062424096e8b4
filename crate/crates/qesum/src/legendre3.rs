//! The `m = 3` machinery: the Legendre-symbol character identity, the pairing
//! decomposition of `S` into parity-free complete sums, the mod-3
//! nonsingularity test, and the resulting square-root bound checks.

use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::cyclotomic::CycInt;
use crate::poly::QuadPoly;
use crate::sum::{eval_gray, gray_buckets};
use crate::{Error, Result, TOL};

/// `(y|3)`: 0 for `y = 0`, 1 for squares, -1 for non-squares mod 3.
pub fn legendre_symbol_mod3(y: i64) -> i64 {
    match y.rem_euclid(3) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Checks `(y|3) = (e3(y) - e3(-y)) / (i sqrt 3)` exactly in `Z[omega]`,
/// in the cleared form `e3(y) - e3(-y) = (y|3) (omega - omega^2)`.
pub fn legendre_identity_check() -> Result<bool> {
    let i_sqrt3 = CycInt::omega_pow(3, 1)?.sub(&CycInt::omega_pow(3, 2)?)?;
    for y in 0..3i64 {
        let lhs = CycInt::omega_pow(3, y)?.sub(&CycInt::omega_pow(3, -y)?)?;
        let sym = legendre_symbol_mod3(y);
        let mut counts = vec![0i64; 3];
        counts[0] = sym; // multiply i sqrt 3 by the integer (y|3)
        let rhs = i_sqrt3.mul(&CycInt::from_counts(3, &counts)?)?;
        if !lhs.eq_exact(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(2))?;
    map.serialize_entry("im", &z.im)?;
    map.serialize_entry("re", &z.re)?;
    map.end()
}

/// The pairing decomposition of `S(f)` for `m = 3`:
///
/// `S(f) = scale * sum over terms of sign * S'(g)`
///
/// where `S'(g) = 2^-n sum_x omega^g(x)` is the complete sum without the
/// parity character, and the terms shift `f` by `eps_t x_u x_v` on each
/// pair of `sigma` (plus `eps x_sigma(n-1)` when `n` is odd).
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub sigma: Vec<u32>,
    /// `(sign, g)` per epsilon assignment; the sign is the product of the
    /// epsilons.
    pub terms: Vec<(i8, QuadPoly)>,
    /// `(i sqrt 3)^-(ceil(n/2))`.
    #[serde(serialize_with = "serialize_complex")]
    pub scale: Complex64,
}

impl Decomposition {
    /// `2^(ceil(n/2))`.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Evaluates every complete sum exactly and reassembles `S(f)`.
    pub fn recombined(&self) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (sign, g) in &self.terms {
            let buckets = gray_buckets(g, false)?;
            let complete = CycInt::from_counts(3, &buckets)?.to_complex();
            total += *sign as f64 * complete;
        }
        let n = self.terms[0].1.n();
        Ok(self.scale * total / 2f64.powi(n as i32))
    }
}

fn validate_sigma(n: u32, sigma: &[u32]) -> Result<()> {
    if sigma.len() != n as usize {
        return Err(Error::BadPermutation);
    }
    let mut seen = vec![false; n as usize];
    for &v in sigma {
        if v >= n || seen[v as usize] {
            return Err(Error::BadPermutation);
        }
        seen[v as usize] = true;
    }
    Ok(())
}

/// Splits the parity character along the pairing `sigma` (0-based, pairs
/// `(sigma[0], sigma[1]), (sigma[2], sigma[3]), ...`; odd `n` leaves
/// `sigma[n-1]` as the linear leftover).
pub fn decompose_m3(f: &QuadPoly, sigma: &[u32]) -> Result<Decomposition> {
    if f.m() != 3 {
        return Err(Error::NotMod3(f.m()));
    }
    let n = f.n();
    validate_sigma(n, sigma)?;
    let half = n.div_ceil(2) as usize;
    let npairs = (n / 2) as usize;
    let mut terms = Vec::with_capacity(1 << half);
    for mask in 0u32..(1 << half) {
        let eps = |t: usize| if mask >> t & 1 == 1 { -1i64 } else { 1 };
        let sign: i8 = if mask.count_ones() % 2 == 1 { -1 } else { 1 };
        let mut a: Vec<((u32, u32), i64)> = f.a().iter().map(|(&k, &c)| (k, c as i64)).collect();
        let mut b: Vec<i64> = f.b().iter().map(|&c| c as i64).collect();
        for t in 0..npairs {
            let (u, v) = (sigma[2 * t], sigma[2 * t + 1]);
            let key = (u.min(v), u.max(v));
            match a.iter_mut().find(|(k, _)| *k == key) {
                Some((_, c)) => *c += eps(t),
                None => a.push((key, eps(t))),
            }
        }
        if n % 2 == 1 {
            b[sigma[n as usize - 1] as usize] += eps(half - 1);
        }
        terms.push((sign, QuadPoly::new(n, 3, a, b)?));
    }
    let i_sqrt3 = Complex64::new(0.0, 3f64.sqrt());
    let mut denom = Complex64::new(1.0, 0.0);
    for _ in 0..half {
        denom *= i_sqrt3;
    }
    Ok(Decomposition {
        sigma: sigma.to_vec(),
        terms,
        scale: denom.inv(),
    })
}

/// Whether the symmetric matrix of the homogeneous part of `f`, with entries
/// `M_ij = 2 a_ij mod 3` (2 is the inverse of 2 mod 3) and zero diagonal,
/// is nonsingular over `F_3`. Linear coefficients are ignored.
pub fn is_nonsingular_mod3(f: &QuadPoly) -> Result<bool> {
    if f.m() != 3 {
        return Err(Error::NotMod3(f.m()));
    }
    let n = f.n() as usize;
    let mut mat = vec![vec![0u8; n]; n];
    for (&(i, j), &c) in f.a() {
        let v = (2 * c % 3) as u8;
        mat[i as usize][j as usize] = v;
        mat[j as usize][i as usize] = v;
    }
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| mat[r][col] != 0) else {
            return Ok(false);
        };
        mat.swap(col, piv);
        // the inverse mod 3 of a nonzero entry is itself (1*1 = 2*2 = 1)
        let inv = mat[col][col];
        let (pivot_rows, below) = mat.split_at_mut(col + 1);
        let pivot = &pivot_rows[col];
        for row in below {
            let factor = row[col] * inv % 3;
            if factor == 0 {
                continue;
            }
            for (x, &p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x = (*x + (3 - factor) * p) % 3;
            }
        }
    }
    Ok(true)
}

/// One bound check for a fixed pairing.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremAReport {
    pub sigma: Vec<u32>,
    /// Every term of the decomposition has a nonsingular homogeneous part.
    pub applicable: bool,
    pub norm: f64,
    pub bound: f64,
    /// `|S| <= bound` whenever applicable; vacuously true otherwise.
    pub holds: bool,
}

fn theorem_a_common(f: &QuadPoly, sigma: &[u32]) -> Result<TheoremAReport> {
    let dec = decompose_m3(f, sigma)?;
    let mut applicable = true;
    for (_, g) in &dec.terms {
        if !is_nonsingular_mod3(g)? {
            applicable = false;
            break;
        }
    }
    let norm = eval_gray(f)?.norm;
    let bound = (3f64.sqrt() / 2.0).powi((f.n() / 2) as i32);
    Ok(TheoremAReport {
        sigma: sigma.to_vec(),
        applicable,
        norm,
        bound,
        holds: !applicable || norm <= bound + TOL,
    })
}

/// `|S(f)| <= (sqrt3/2)^(n/2)` for even `n` when every term of the pairing
/// decomposition is nonsingular.
pub fn verify_theorem_a(f: &QuadPoly, sigma: &[u32]) -> Result<TheoremAReport> {
    if !f.n().is_multiple_of(2) {
        return Err(Error::OddN);
    }
    theorem_a_common(f, sigma)
}

/// The odd-`n` variant: same nonsingularity condition on the terms of the
/// near-pairing (one linear leftover), bound `(sqrt3/2)^(floor(n/2))`.
pub fn verify_theorem_a_odd(f: &QuadPoly, sigma: &[u32]) -> Result<TheoremAReport> {
    if f.n() % 2 != 1 {
        return Err(Error::EvenN);
    }
    theorem_a_common(f, sigma)
}

/// Largest `n` for which [`find_good_pairing`] will enumerate pairings.
pub const PAIRING_SEARCH_GUARD: u32 = 8;

/// All pairings of `0..n` as `sigma` vectors: `(n-1)!!` of them for even
/// `n`; for odd `n`, `n * (n-2)!!`, with the leftover vertex last.
pub fn pairings(n: u32) -> Vec<Vec<u32>> {
    fn rec(rem: &[u32], out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
        if rem.is_empty() {
            out.push(prefix.clone());
            return;
        }
        let first = rem[0];
        for k in 1..rem.len() {
            let other = rem[k];
            let rest: Vec<u32> = rem[1..k].iter().chain(&rem[k + 1..]).copied().collect();
            prefix.push(first);
            prefix.push(other);
            rec(&rest, out, prefix);
            prefix.pop();
            prefix.pop();
        }
    }
    let items: Vec<u32> = (0..n).collect();
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&items, &mut out, &mut Vec::new());
    } else {
        for leftover in 0..n {
            let rest: Vec<u32> = items.iter().copied().filter(|&v| v != leftover).collect();
            let mut partial = Vec::new();
            rec(&rest, &mut partial, &mut Vec::new());
            for mut sigma in partial {
                sigma.push(leftover);
                out.push(sigma);
            }
        }
    }
    out
}

/// Searches all pairings for one whose decomposition is entirely
/// nonsingular, making the square-root bound applicable.
pub fn find_good_pairing(f: &QuadPoly) -> Result<Option<Vec<u32>>> {
    if f.m() != 3 {
        return Err(Error::NotMod3(f.m()));
    }
    if f.n() > PAIRING_SEARCH_GUARD {
        return Err(Error::TooManyVariables {
            what: "pairing search",
            guard: PAIRING_SEARCH_GUARD,
            n: f.n(),
            hint: "pass an explicit sigma to verify_theorem_a instead",
        });
    }
    'outer: for sigma in pairings(f.n()) {
        let dec = decompose_m3(f, &sigma)?;
        for (_, g) in &dec.terms {
            if !is_nonsingular_mod3(g)? {
                continue 'outer;
            }
        }
        return Ok(Some(sigma));
    }
    Ok(None)
}
