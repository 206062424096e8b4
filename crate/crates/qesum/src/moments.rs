//! Exact even moments `M_r = <|S|^r>` over families, their theorem-predicted
//! values and bounds, and the tail sandwich for `P(|S| >= gamma^n)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::cyclotomic::{check_modulus, CycInt};
use crate::poly::{FamilySpec, QuadPoly};
use crate::sum::{sweep_family, Collector, SumValue};
use crate::{Error, Result};

/// An exact family moment. `value` is fully reduced; the float and decimal
/// renderings are derived from it.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub family: FamilySpec,
    pub r: u32,
    /// `M_r = (sum_f (S~ conj S~)^(r/2)) / (|F| 2^(rn))`, exact.
    pub value: BigRational,
    /// Theorem-predicted exact value, where one applies to this family kind.
    pub predicted: Option<BigRational>,
    /// Theorem upper bound, where one applies (sixth moment, m > 3).
    pub bound: Option<BigRational>,
}

impl MomentReport {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact equality with the predicted value, if any.
    pub fn matches_prediction(&self) -> Option<bool> {
        self.predicted.as_ref().map(|p| *p == self.value)
    }

    /// Exact comparison against the bound, if any.
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.as_ref().map(|b| self.value <= *b)
    }
}

impl Serialize for MomentReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("family", &self.family)?;
        map.serialize_entry("r", &self.r)?;
        map.serialize_entry("value", &rational_fields(&self.value))?;
        map.serialize_entry("predicted", &self.predicted.as_ref().map(rational_fields))?;
        map.serialize_entry("bound", &self.bound.as_ref().map(rational_fields))?;
        map.serialize_entry("matches_prediction", &self.matches_prediction())?;
        map.serialize_entry("within_bound", &self.within_bound())?;
        map.end()
    }
}

fn rational_fields(q: &BigRational) -> serde_json::Value {
    serde_json::json!({
        "numerator": q.numer().to_string(),
        "denominator": q.denom().to_string(),
        "decimal": decimal_string(q),
        "float": q.to_f64().unwrap_or(f64::NAN),
    })
}

/// Exact decimal expansion when the reduced denominator is of the form
/// `2^a 5^b` (always the case for product-family moments); otherwise a
/// 40-digit rounded rendering.
pub fn decimal_string(q: &BigRational) -> String {
    let mut den = q.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den.abs() == BigInt::one() {
        let k = twos.max(fives);
        let scaled = q.numer() * two.pow(k - twos) * five.pow(k - fives);
        render_scaled(&scaled, k)
    } else {
        // non-terminating: round to 40 fractional digits
        let k = 40u32;
        let scaled = (q.numer() * BigInt::from(10).pow(k)) / q.denom();
        render_scaled(&scaled, k)
    }
}

fn render_scaled(scaled: &BigInt, frac_digits: u32) -> String {
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let k = frac_digits as usize;
    let (int_part, frac_part) = if digits.len() > k {
        let split = digits.len() - k;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>k$}"))
    };
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[derive(Clone)]
struct MomentAcc {
    acc: CycInt,
    half_r: u32,
}

impl Collector for MomentAcc {
    fn visit(&mut self, _index: u64, _f: &QuadPoly, value: &SumValue) {
        let ns = value.unnormalized.norm_sq();
        let mut pow = ns.clone();
        for _ in 1..self.half_r {
            pow = pow.mul(&ns).expect("same modulus");
        }
        self.acc = self.acc.add(&pow).expect("same modulus");
    }

    fn merge(&mut self, other: Self) {
        self.acc = self.acc.add(&other.acc).expect("same modulus");
    }
}

/// Computes `M_r` exactly over an exhaustive family.
///
/// The numerator accumulates as a cyclotomic integer; its reduction must come
/// out a rational integer (the moment sum is Galois-stable), and anything
/// else aborts as an internal arithmetic failure.
pub fn moment_exact(spec: &FamilySpec, r: u32, budget: u64) -> Result<MomentReport> {
    if r == 0 || !r.is_multiple_of(2) || r > 6 {
        return Err(Error::BadMomentOrder(r));
    }
    if !spec.is_exhaustive() {
        return Err(Error::MomentNeedsExhaustive);
    }
    spec.validate()?;
    let (n, m) = (spec.n(), spec.m());
    let template = MomentAcc {
        acc: CycInt::zero(m)?,
        half_r: r / 2,
    };
    let out = sweep_family(spec, budget, template)?;
    let numerator = out.acc.to_integer().ok_or_else(|| {
        Error::Internal("moment numerator did not reduce to a rational integer".into())
    })?;
    let denom = BigInt::from(spec.size()) * BigInt::from(2).pow(r * n);
    let value = BigRational::new(numerator, denom);
    let predicted = match (spec, r) {
        (FamilySpec::AllQuadratic { .. }, 2) => {
            Some(BigRational::new(BigInt::one(), BigInt::from(2).pow(n)))
        }
        (FamilySpec::Homogeneous { .. }, 2) => Some(BigRational::new(
            BigInt::from(1 + if n % 2 == 0 { 1 } else { -1 }),
            BigInt::from(2).pow(n),
        )),
        _ => None,
    };
    let bound = if r == 6 && m > 3 && matches!(spec, FamilySpec::AllQuadratic { .. }) {
        Some(sixth_moment_bound(n))
    } else {
        None
    };
    Ok(MomentReport {
        family: spec.clone(),
        r,
        value,
        predicted,
        bound,
    })
}

/// The sixth-moment bound `(9n(n-1) + (9n+1) 2^(2-2n))/4 * 2^(-3n)` as an
/// exact rational, `(9n(n-1) 2^(2n) + 4(9n+1)) / 2^(5n+2)`.
pub fn sixth_moment_bound(n: u32) -> BigRational {
    let nn = BigInt::from(n);
    let num = BigInt::from(9) * &nn * (&nn - 1) * BigInt::from(2).pow(2 * n)
        + BigInt::from(4) * (BigInt::from(9) * &nn + 1);
    BigRational::new(num, BigInt::from(2).pow(5 * n + 2))
}

/// Tail probability bounds for `P(|S| >= gamma^n)` over the full family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBounds {
    pub gamma: f64,
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Second-moment lower bound and second/sixth-moment upper bounds.
///
/// The sixth-moment term uses the tail coefficient `9n(n+1)/4`, which
/// differs from (and is implied by) the exact-moment coefficient in
/// [`sixth_moment_bound`]; both are valid upper bounds. It only applies
/// for `m > 3`.
pub fn tail_bounds(n: u32, m: u32, gamma: f64) -> Result<TailBounds> {
    check_modulus(m)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::BadGamma(gamma));
    }
    let epsilon = gamma.powi(n as i32);
    let g2n = gamma.powi(2 * n as i32);
    let lower = if g2n >= 1.0 {
        0.0
    } else {
        ((0.5f64.powi(n as i32) - g2n) / (1.0 - g2n)).max(0.0)
    };
    let two_g2 = 2.0 * gamma * gamma;
    let mut upper = two_g2.powi(-(n as i32)).min(1.0);
    if m > 3 {
        let sixth = (9.0 * n as f64 * (n as f64 + 1.0) / 4.0) * two_g2.powi(-3 * n as i32);
        upper = upper.min(sixth);
    }
    Ok(TailBounds {
        gamma,
        epsilon,
        lower,
        upper,
    })
}

/// An empirical tail point together with its sandwich bounds.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub family: FamilySpec,
    pub gamma: f64,
    pub epsilon: f64,
    /// Fraction of the family with `|S| >= epsilon`.
    pub empirical: f64,
    pub lower: f64,
    pub upper: f64,
    /// `lower <= empirical <= upper` (guaranteed for exhaustive full families).
    pub inside: bool,
}

#[derive(Clone, Default)]
struct TailCounter {
    epsilon: f64,
    hits: u64,
    total: u64,
}

impl Collector for TailCounter {
    fn visit(&mut self, _index: u64, _f: &QuadPoly, value: &SumValue) {
        self.total += 1;
        if value.norm >= self.epsilon {
            self.hits += 1;
        }
    }
    fn merge(&mut self, other: Self) {
        self.hits += other.hits;
        self.total += other.total;
    }
}

pub fn empirical_tail(spec: &FamilySpec, gamma: f64, budget: u64) -> Result<TailReport> {
    let bounds = tail_bounds(spec.n(), spec.m(), gamma)?;
    let counter = TailCounter {
        epsilon: bounds.epsilon,
        ..Default::default()
    };
    let out = sweep_family(spec, budget, counter)?;
    let empirical = out.hits as f64 / out.total as f64;
    // tiny float slack so boundary cases are not misreported
    let inside = bounds.lower - 1e-12 <= empirical && empirical <= bounds.upper + 1e-12;
    Ok(TailReport {
        family: spec.clone(),
        gamma,
        epsilon: bounds.epsilon,
        empirical,
        lower: bounds.lower,
        upper: bounds.upper,
        inside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn second_moment_is_exactly_half_for_n1() {
        let rep = moment_exact(&FamilySpec::AllQuadratic { n: 1, m: 3 }, 2, 1 << 20).unwrap();
        assert_eq!(rep.value, rational(1, 2));
        assert_eq!(rep.matches_prediction(), Some(true));
    }

    #[test]
    fn homogeneous_odd_second_moment_is_zero() {
        let rep = moment_exact(&FamilySpec::Homogeneous { n: 3, m: 5 }, 2, 1 << 20).unwrap();
        assert!(rep.value.is_zero());
        assert_eq!(rep.matches_prediction(), Some(true));
    }

    #[test]
    fn sixth_moment_n2_m5() {
        let rep = moment_exact(&FamilySpec::AllQuadratic { n: 2, m: 5 }, 6, 1 << 20).unwrap();
        // oracle: sum over the 125 members of |S~|^6 is exactly 32000
        assert_eq!(rep.value, rational(1, 16));
        let bound = rep.bound.clone().unwrap();
        assert_eq!(bound, rational(91, 1024));
        assert!((bound.to_f64().unwrap() - 0.088_867_2).abs() < 1e-6);
        assert_eq!(rep.within_bound(), Some(true));
    }

    #[test]
    fn moment_order_validation() {
        let fam = FamilySpec::AllQuadratic { n: 1, m: 3 };
        assert!(matches!(
            moment_exact(&fam, 3, 1 << 20),
            Err(Error::BadMomentOrder(3))
        ));
        assert!(matches!(
            moment_exact(&fam, 8, 1 << 20),
            Err(Error::BadMomentOrder(8))
        ));
        let sampled = FamilySpec::RandomSample {
            n: 2,
            m: 3,
            count: 10,
            seed: 0,
        };
        assert!(matches!(
            moment_exact(&sampled, 2, 1 << 20),
            Err(Error::MomentNeedsExhaustive)
        ));
    }

    #[test]
    fn decimal_strings_are_exact() {
        assert_eq!(decimal_string(&rational(1, 2)), "0.5");
        assert_eq!(decimal_string(&rational(1, 16)), "0.0625");
        assert_eq!(decimal_string(&rational(79, 8192)), "0.0096435546875");
        assert_eq!(decimal_string(&rational(-3, 8)), "-0.375");
        assert_eq!(decimal_string(&rational(7, 1)), "7");
        assert_eq!(decimal_string(&rational(0, 5)), "0");
    }

    #[test]
    fn tail_bounds_special_points() {
        // gamma = 1/sqrt(2): both moment bounds collapse to "no information"
        let tb = tail_bounds(4, 5, 1.0 / 2f64.sqrt()).unwrap();
        assert!(tb.lower.abs() < 1e-12);
        assert!((tb.upper - 1.0).abs() < 1e-9);
        // gamma = 1 boundary
        let tb = tail_bounds(3, 5, 1.0).unwrap();
        assert_eq!(tb.lower, 0.0);
        assert!(tb.upper <= 0.125 + 1e-12);
        assert!(tail_bounds(3, 5, 0.0).is_err());
        assert!(tail_bounds(3, 5, 1.5).is_err());
    }

    #[test]
    fn empirical_tail_n1_m3() {
        // |S| over the 3 members is {0, sqrt3/2, sqrt3/2}; eps = 0.8
        let rep = empirical_tail(&FamilySpec::AllQuadratic { n: 1, m: 3 }, 0.8, 1 << 20).unwrap();
        assert!((rep.empirical - 2.0 / 3.0).abs() < 1e-12);
        assert!(rep.inside);
    }

    #[test]
    fn tail_sandwich_n2_m5_sweep() {
        let fam = FamilySpec::AllQuadratic { n: 2, m: 5 };
        for step in 0..6 {
            let gamma = 0.75 + 0.05 * step as f64;
            let rep = empirical_tail(&fam, gamma, 1 << 20).unwrap();
            assert!(rep.inside, "gamma = {gamma}: {rep:?}");
        }
        // frozen spot value at gamma = 0.9: 6 of 125 members at or above 0.81
        let rep = empirical_tail(&fam, 0.9, 1 << 20).unwrap();
        assert!((rep.empirical - 0.048).abs() < 1e-12);
        assert!((rep.upper - 0.381_039_475_689_681_4).abs() < 1e-9);
    }

    #[test]
    fn complete_character_sum_identity() {
        // sum over a mod m of omega^(a r) = m when r = 0 mod m, else 0
        for m in (3u32..=15).step_by(2) {
            for r in 0..m {
                let mut acc = CycInt::zero(m).unwrap();
                for a in 0..m {
                    let term = CycInt::omega_pow(m, (a * r) as i64).unwrap();
                    acc = acc.add(&term).unwrap();
                }
                if r == 0 {
                    let expect = CycInt::from_counts(m, &{
                        let mut v = vec![0i64; m as usize];
                        v[0] = m as i64;
                        v
                    })
                    .unwrap();
                    assert!(acc.eq_exact(&expect).unwrap());
                } else {
                    assert!(acc.is_zero(), "m={m} r={r}");
                }
            }
        }
    }
}
