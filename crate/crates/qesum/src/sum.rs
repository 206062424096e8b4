//! Evaluators for `S~(f)` and parallel family sweeps.
//!
//! Both evaluators accumulate exact per-exponent counts (`i64` buckets, safe
//! for n <= 30) and hand back a [`CycInt`]; `|S|` is the only lossy output.

use rayon::prelude::*;

use crate::cyclotomic::CycInt;
use crate::poly::{FamilySpec, QuadPoly};
use crate::{Error, Result};

/// Hard cap on `n` for full `2^n`-point evaluation.
pub const EVAL_GUARD: u32 = 30;

/// The exact unnormalized sum `S~` plus its normalized magnitude.
#[derive(Debug, Clone)]
pub struct SumValue {
    /// `S~ = sum_x x_1...x_n omega^f(x)`, exact.
    pub unnormalized: CycInt,
    pub n: u32,
    /// `|S| = |S~| / 2^n`, in `[0, 1]`.
    pub norm: f64,
}

impl SumValue {
    fn from_buckets(m: u32, n: u32, buckets: &[i64]) -> Self {
        let unnormalized = CycInt::from_counts(m, buckets).expect("valid modulus");
        let norm = unnormalized.abs() / (1u64 << n) as f64;
        SumValue {
            unnormalized,
            n,
            norm,
        }
    }

    /// True iff `S~` is exactly zero (cyclotomic reduction, no tolerance).
    pub fn is_exactly_zero(&self) -> bool {
        self.unnormalized.is_zero()
    }
}

fn check_guard(f: &QuadPoly, what: &'static str) -> Result<()> {
    if f.n() > EVAL_GUARD {
        return Err(Error::TooManyVariables {
            what,
            guard: EVAL_GUARD,
            n: f.n(),
            hint: "use a random-sample family sweep instead",
        });
    }
    Ok(())
}

/// Direct `2^n`-point evaluation; the reference implementation.
pub fn eval_naive(f: &QuadPoly) -> Result<SumValue> {
    check_guard(f, "eval_naive")?;
    let n = f.n();
    let m = f.m();
    let mut buckets = vec![0i64; m as usize];
    let mut x = vec![1i8; n as usize];
    for y in 0u64..(1u64 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if y >> i & 1 == 0 { 1 } else { -1 };
        }
        let sign = if y.count_ones() % 2 == 0 { 1 } else { -1 };
        buckets[f.eval_at(&x) as usize] += sign;
    }
    Ok(SumValue::from_buckets(m, n, &buckets))
}

/// Gray-code evaluation: one variable flip per step, `O(deg)` bookkeeping.
///
/// Flipping `x_i` changes `f` by `-2 x_i t_i` where
/// `t_i = sum_j a_ij x_j + b_i` is maintained incrementally, and flips the
/// parity sign. Exactly equal to [`eval_naive`] (same integer buckets).
pub fn eval_gray(f: &QuadPoly) -> Result<SumValue> {
    let buckets = gray_buckets(f, true)?;
    Ok(SumValue::from_buckets(f.m(), f.n(), &buckets))
}

/// Gray-code walk accumulating `omega^f(x)` exponent counts, with or without
/// the `x_1...x_n` parity factor (the parity-free variant feeds the m = 3
/// decomposition's complete sums).
pub(crate) fn gray_buckets(f: &QuadPoly, parity: bool) -> Result<Vec<i64>> {
    check_guard(f, "eval_gray")?;
    let n = f.n() as usize;
    let m = f.m() as i64;
    // adjacency with coefficients
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in f.a() {
        adj[i as usize].push((j as usize, c as i64));
        adj[j as usize].push((i as usize, c as i64));
    }
    let mut x = vec![1i8; n];
    // t[i] = sum_j a_ij x_j + b_i, kept as plain integers (small)
    let mut t: Vec<i64> = (0..n)
        .map(|i| adj[i].iter().map(|&(_, c)| c).sum::<i64>() + f.b()[i] as i64)
        .collect();
    let mut cur = {
        let all_ones = vec![1i8; n];
        f.eval_at(&all_ones) as i64
    };
    let mut sign = 1i64;
    let mut buckets = vec![0i64; m as usize];
    buckets[cur as usize] += sign;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let xi = x[i] as i64;
        cur = (cur - 2 * xi * t[i]).rem_euclid(m);
        for &(j, c) in &adj[i] {
            t[j] -= 2 * c * xi;
        }
        x[i] = -x[i];
        if parity {
            sign = -sign;
        }
        buckets[cur as usize] += sign;
    }
    Ok(buckets)
}

/// A fold-and-merge contract for family sweeps. `merge` must be exact and
/// order-independent (associative and commutative): parallel sweeps partition
/// the index range arbitrarily.
pub trait Collector: Send + Sized {
    fn visit(&mut self, index: u64, f: &QuadPoly, value: &SumValue);
    fn merge(&mut self, other: Self);
}

/// Visits every family member exactly once (odometer order per
/// [`FamilySpec::member`]) or each seeded sample, in parallel, and folds the
/// results through `template` clones.
pub fn sweep_family<C: Collector + Clone + Sync>(
    spec: &FamilySpec,
    budget: u64,
    template: C,
) -> Result<C> {
    spec.validate()?;
    if spec.n() > EVAL_GUARD {
        return Err(Error::TooManyVariables {
            what: "sweep_family",
            guard: EVAL_GUARD,
            n: spec.n(),
            hint: "use a random-sample family sweep instead",
        });
    }
    let size = spec.size();
    if spec.is_exhaustive() && size > budget as u128 {
        return Err(Error::BudgetExceeded { size, budget });
    }
    let total = size as u64;
    let result = (0..total)
        .into_par_iter()
        .fold(
            || template.clone(),
            |mut acc, idx| {
                let f = spec.member(idx);
                let value = eval_gray(&f).expect("guard checked above");
                acc.visit(idx, &f, &value);
                acc
            },
        )
        .reduce(
            || template.clone(),
            |mut a, b| {
                a.merge(b);
                a
            },
        );
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::root_params;
    use rand::{Rng, SeedableRng};

    fn poly(n: u32, m: u32, a: &[((u32, u32), i64)], b: &[i64]) -> QuadPoly {
        QuadPoly::new(n, m, a.iter().copied(), b.iter().copied()).unwrap()
    }

    #[test]
    fn zero_poly_single_variable() {
        let s = eval_naive(&poly(1, 3, &[], &[0])).unwrap();
        assert!(s.is_exactly_zero());
        assert_eq!(s.norm, 0.0);
    }

    #[test]
    fn single_edge_m3() {
        // S~ = 2 omega - 2 omega^2, |S| = sqrt(3)/2
        let s = eval_naive(&poly(2, 3, &[((0, 1), 1)], &[0, 0])).unwrap();
        let coeffs = s.unnormalized.coeffs();
        assert_eq!(coeffs[0], 0.into());
        assert_eq!(coeffs[1], 2.into());
        assert_eq!(coeffs[2], (-2).into());
        assert!((s.norm - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_odd_n_is_exactly_zero() {
        let s = eval_naive(&poly(3, 5, &[((0, 1), 1), ((1, 2), 1)], &[0, 0, 0])).unwrap();
        assert!(s.is_exactly_zero());
    }

    #[test]
    fn gray_matches_naive_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..300 {
            let n = rng.gen_range(1..=9u32);
            let m = [3u32, 5, 7, 9, 11, 13, 15][rng.gen_range(0..7)];
            let mut a = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    a.push(((i, j), rng.gen_range(0..m as i64)));
                }
            }
            let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m as i64)).collect();
            let f = QuadPoly::new(n, m, a, b).unwrap();
            let s1 = eval_naive(&f).unwrap();
            let s2 = eval_gray(&f).unwrap();
            assert_eq!(s1.unnormalized, s2.unnormalized, "f = {f}");
        }
    }

    #[test]
    fn conjectured_extremal_values() {
        let q5 = root_params(5).unwrap().q;
        let s = eval_gray(&poly(4, 5, &[((0, 1), 1), ((2, 3), 1)], &[0; 4])).unwrap();
        assert!((s.norm - (q5 / 2.0).powi(2)).abs() < 1e-9);
        let s = eval_gray(&poly(3, 3, &[((0, 1), 1)], &[0, 0, 1])).unwrap();
        assert!((s.norm - 0.75).abs() < 1e-12);
    }

    #[test]
    fn product_rule_on_disconnected_graphs() {
        // f = x1x2 + 2x3x4 over m=7 splits into two components
        let f = poly(4, 7, &[((0, 1), 1), ((2, 3), 2)], &[3, 0, 0, 5]);
        let s = eval_gray(&f).unwrap();
        let s1 = eval_gray(&poly(2, 7, &[((0, 1), 1)], &[3, 0])).unwrap();
        let s2 = eval_gray(&poly(2, 7, &[((0, 1), 2)], &[0, 5])).unwrap();
        assert!((s.norm - s1.norm * s2.norm).abs() < 1e-12);
    }

    #[test]
    fn untouched_variable_forces_zero() {
        // x2 appears in no term: sum over x2 of x2 * omega^0 = 0
        let f = poly(3, 5, &[((0, 2), 3)], &[1, 0, 0]);
        let s = eval_gray(&f).unwrap();
        assert!(s.is_exactly_zero());
    }

    #[derive(Clone, Default)]
    struct CountMax {
        count: u64,
        max: f64,
    }

    impl Collector for CountMax {
        fn visit(&mut self, _index: u64, _f: &QuadPoly, value: &SumValue) {
            self.count += 1;
            if value.norm > self.max {
                self.max = value.norm;
            }
        }
        fn merge(&mut self, other: Self) {
            self.count += other.count;
            if other.max > self.max {
                self.max = other.max;
            }
        }
    }

    #[test]
    fn sweep_visits_every_member() {
        let c = sweep_family(
            &FamilySpec::AllQuadratic { n: 1, m: 3 },
            1 << 20,
            CountMax::default(),
        )
        .unwrap();
        assert_eq!(c.count, 3);
        let c = sweep_family(
            &FamilySpec::Homogeneous { n: 3, m: 3 },
            1 << 20,
            CountMax::default(),
        )
        .unwrap();
        assert_eq!(c.count, 27);
    }

    #[test]
    fn sweep_max_matches_sharp_bound() {
        let c = sweep_family(
            &FamilySpec::AllQuadratic { n: 2, m: 5 },
            1 << 20,
            CountMax::default(),
        )
        .unwrap();
        assert_eq!(c.count, 125);
        let q = root_params(5).unwrap().q;
        assert!((c.max - q / 2.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_budget_is_enforced() {
        let r = sweep_family(
            &FamilySpec::AllQuadratic { n: 4, m: 7 },
            100,
            CountMax::default(),
        );
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
        // samples are exempt from the exhaustive budget
        let r = sweep_family(
            &FamilySpec::RandomSample {
                n: 4,
                m: 7,
                count: 200,
                seed: 1,
            },
            100,
            CountMax::default(),
        );
        assert!(r.is_ok());
    }

    #[test]
    fn eval_guard_advises_alternatives() {
        let f = QuadPoly::zero(31, 3).unwrap();
        assert!(matches!(
            eval_naive(&f),
            Err(Error::TooManyVariables { .. })
        ));
    }
}
