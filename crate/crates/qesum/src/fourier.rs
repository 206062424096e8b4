//! Fourier spectra of `omega^f` on `{-1,1}^n`: naive transform, FWHT, the
//! tree-recursion evaluator for forest graphs, and the forest-plus-k-edges
//! bound certificate.
//!
//! Subsets are bitmasks with variable `i` (1-based) on bit `i-1`; point `y`
//! encodes `x_i = +1` iff bit `i-1` of `y` is zero. Coefficients carry the
//! `2^-n` normalization, so the full-set coefficient equals `S(f)` and
//! Parseval reads `sum_S |c_S|^2 = 1`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::cyclotomic::root_params;
use crate::poly::QuadPoly;
use crate::sum::EVAL_GUARD;
use crate::{Error, Result};

pub const NAIVE_GUARD: u32 = 16;
pub const FWHT_GUARD: u32 = 26;

/// A full table of Fourier coefficients, indexed by subset bitmask.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub n: u32,
    pub m: u32,
    table: Vec<Complex64>,
}

impl Spectrum {
    pub fn get(&self, mask: u32) -> Complex64 {
        self.table[mask as usize]
    }

    pub fn table(&self) -> &[Complex64] {
        &self.table
    }

    /// `sum_S |c_S|^2`; equals 1 for any `f` since `|omega^f| = 1`.
    pub fn parseval_sum(&self) -> f64 {
        self.table.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Sup norm `max_S |c_S|` (the quantity the edge-addition bound controls).
    pub fn max_abs(&self) -> f64 {
        self.table.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// CSV export, one row per subset: `bitmask,re,im,abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitmask,re,im,abs\n");
        for (mask, c) in self.table.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", mask, c.re, c.im, c.norm()));
        }
        out
    }
}

/// `omega^y` for `y` in `0..m`.
fn root_table(m: u32) -> Vec<Complex64> {
    (0..m)
        .map(|y| {
            let theta = 2.0 * PI * y as f64 / m as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// `lambda(y) = (omega^y - omega^-y)/2 = i sin(2 pi y / m)`.
pub fn lambda(y: u32, m: u32) -> Complex64 {
    Complex64::new(0.0, (2.0 * PI * y as f64 / m as f64).sin())
}

/// `mu(y) = (omega^y + omega^-y)/2 = cos(2 pi y / m)`.
pub fn mu(y: u32, m: u32) -> Complex64 {
    Complex64::new((2.0 * PI * y as f64 / m as f64).cos(), 0.0)
}

/// `f(y) mod m` for every point mask `y`, filled by a Gray walk in `O(2^n)`.
fn exponent_table(f: &QuadPoly) -> Vec<u16> {
    let n = f.n() as usize;
    let m = f.m() as i64;
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in f.a() {
        adj[i as usize].push((j as usize, c as i64));
        adj[j as usize].push((i as usize, c as i64));
    }
    let mut x = vec![1i8; n];
    let mut t: Vec<i64> = (0..n)
        .map(|i| adj[i].iter().map(|&(_, c)| c).sum::<i64>() + f.b()[i] as i64)
        .collect();
    let mut cur = f.eval_at(&x) as i64;
    let mut table = vec![0u16; 1 << n];
    table[0] = cur as u16;
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let xi = x[i] as i64;
        cur = (cur - 2 * xi * t[i]).rem_euclid(m);
        for &(j, c) in &adj[i] {
            t[j] -= 2 * c * xi;
        }
        x[i] = -x[i];
        gray ^= 1 << i;
        table[gray as usize] = cur as u16;
    }
    table
}

fn guard(f: &QuadPoly, what: &'static str, cap: u32) -> Result<()> {
    if f.n() > cap.min(EVAL_GUARD) {
        return Err(Error::TooManyVariables {
            what,
            guard: cap,
            n: f.n(),
            hint: "restrict the subset of interest or use coeff_tree on forests",
        });
    }
    Ok(())
}

/// Definition-chasing transform: `c_S = 2^-n sum_y omega^f(y) chi_S(y)`.
pub fn spectrum_naive(f: &QuadPoly) -> Result<Spectrum> {
    guard(f, "spectrum_naive", NAIVE_GUARD)?;
    let n = f.n();
    let roots = root_table(f.m());
    let exps = exponent_table(f);
    let vals: Vec<Complex64> = exps.iter().map(|&e| roots[e as usize]).collect();
    let size = 1usize << n;
    let scale = 1.0 / size as f64;
    let mut table = vec![Complex64::new(0.0, 0.0); size];
    for (mask, slot) in table.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (y, v) in vals.iter().enumerate() {
            if (mask & y).count_ones() % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        *slot = acc * scale;
    }
    Ok(Spectrum { n, m: f.m(), table })
}

/// Fast Walsh-Hadamard transform of the value table, `O(n 2^n)`.
pub fn spectrum_fwht(f: &QuadPoly) -> Result<Spectrum> {
    guard(f, "spectrum_fwht", FWHT_GUARD)?;
    let n = f.n();
    let roots = root_table(f.m());
    let exps = exponent_table(f);
    let mut table: Vec<Complex64> = exps.iter().map(|&e| roots[e as usize]).collect();
    let size = 1usize << n;
    let mut half = 1usize;
    while half < size {
        let mut base = 0usize;
        while base < size {
            for k in base..base + half {
                let (lo, hi) = (table[k], table[k + half]);
                table[k] = lo + hi;
                table[k + half] = lo - hi;
            }
            base += half * 2;
        }
        half *= 2;
    }
    let scale = 1.0 / size as f64;
    for c in &mut table {
        *c *= scale;
    }
    Ok(Spectrum { n, m: f.m(), table })
}

/// Single Fourier coefficient of a forest-graph polynomial in `O(n)` time.
///
/// Implements the leaf-stripping recursion: removing a leaf `j` attached by
/// edge weight `a_e` with linear term `b_j` expresses `c_S(f)` as a two-term
/// lambda/mu combination of coefficients of the stripped polynomial
/// (`j` outside `S`: `mu(a_e)mu(b_j) c_S + lambda(a_e)lambda(b_j) c_(S xor i)`;
/// `j` inside: `mu(a_e)lambda(b_j) c_(S')` + `lambda(a_e)mu(b_j) c_(S' xor i)`
/// with `S = S' + j`), organized as one upward message pass per tree, then
/// the product rule across forest components. The constants carry no factor
/// beyond the halves already inside lambda and mu; the unit tests pin this
/// against [`spectrum_naive`].
pub fn coeff_tree(f: &QuadPoly, subset: u32) -> Result<Complex64> {
    let g = f.graph();
    let k = g.forest_distance();
    if k != 0 {
        return Err(Error::NotForest(k));
    }
    let n = f.n() as usize;
    let m = f.m();
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in f.a() {
        adj[i as usize].push((j as usize, c));
        adj[j as usize].push((i as usize, c));
    }
    let in_s = |v: usize| subset >> v & 1 == 1;
    let mut seen = vec![false; n];
    let mut acc = Complex64::new(1.0, 0.0);
    for root in 0..n {
        if seen[root] {
            continue;
        }
        // BFS order rooted at `root`
        let mut order = vec![root];
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; n];
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(w, c) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, c));
                    order.push(w);
                }
            }
        }
        // upward pass: (even, odd) parts of each vertex's message in x_parent
        let mut even = vec![Complex64::new(0.0, 0.0); n];
        let mut odd = vec![Complex64::new(0.0, 0.0); n];
        for &v in order.iter().rev() {
            let b = f.b()[v];
            let (mut p, mut q) = (mu(b, m), lambda(b, m));
            for &(w, _) in &adj[v] {
                if parent[w].map(|(pv, _)| pv) == Some(v) {
                    let (np, nq) = (p * even[w] + q * odd[w], p * odd[w] + q * even[w]);
                    p = np;
                    q = nq;
                }
            }
            if in_s(v) {
                std::mem::swap(&mut p, &mut q);
            }
            match parent[v] {
                Some((_, w_edge)) => {
                    even[v] = p * mu(w_edge, m);
                    odd[v] = q * lambda(w_edge, m);
                }
                None => {
                    // root: the component's coefficient is the even part
                    acc *= p;
                }
            }
        }
    }
    Ok(acc)
}

/// The forest-plus-k-edges certificate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ForestCertificate {
    /// Circuit rank of `G(f)`.
    pub k: u32,
    /// Whether `k <= (n-2) log2(2/q)` — the regime where the certificate applies.
    pub applicable: bool,
    /// `2^(k/2) (q/2)^(n-1)`; reduces to `(q/2)^(n-1)` on forests.
    pub bound: f64,
    /// What the certificate actually asserts about `|S(f)|` when applicable:
    /// `max(bound, (q/2)^floor((n+1)/2))`.
    pub certified: f64,
}

pub fn forest_bound_certificate(f: &QuadPoly) -> Result<ForestCertificate> {
    let params = root_params(f.m())?;
    let n = f.n();
    let q_half = params.q / 2.0;
    let k = f.graph().forest_distance();
    let threshold = (n as f64 - 2.0) * (2.0 / params.q).log2();
    let applicable = k as f64 <= threshold;
    let bound = 2f64.powf(k as f64 / 2.0) * q_half.powi(n as i32 - 1);
    let sharp = q_half.powi(n.div_ceil(2) as i32);
    Ok(ForestCertificate {
        k,
        applicable,
        bound,
        certified: bound.max(sharp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::eval_naive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(n: u32, m: u32, a: &[((u32, u32), i64)], b: &[i64]) -> QuadPoly {
        QuadPoly::new(n, m, a.iter().copied(), b.iter().copied()).unwrap()
    }

    fn random_poly(rng: &mut ChaCha8Rng, n: u32, m: u32) -> QuadPoly {
        let mut a = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                a.push(((i, j), rng.gen_range(0..m as i64)));
            }
        }
        let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m as i64)).collect();
        QuadPoly::new(n, m, a, b).unwrap()
    }

    #[test]
    fn constant_function_spectrum() {
        let s = spectrum_naive(&QuadPoly::zero(3, 5).unwrap()).unwrap();
        assert!((s.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for mask in 1..8 {
            assert!(s.get(mask).norm() < 1e-15);
        }
    }

    #[test]
    fn single_linear_term_gives_mu_and_lambda() {
        let s = spectrum_naive(&poly(1, 3, &[], &[1])).unwrap();
        assert!((s.get(0) - mu(1, 3)).norm() < 1e-15);
        assert!((s.get(1) - lambda(1, 3)).norm() < 1e-15);
    }

    #[test]
    fn full_set_coefficient_is_the_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8u32);
            let m = [3u32, 5, 7, 9, 15][rng.gen_range(0..5)];
            let f = random_poly(&mut rng, n, m);
            let s = spectrum_fwht(&f).unwrap();
            let direct = eval_naive(&f).unwrap();
            let expect = direct.unnormalized.to_complex() / (1u64 << n) as f64;
            assert!((s.get((1 << n) - 1) - expect).norm() < 1e-9, "f = {f}");
        }
    }

    #[test]
    fn fwht_matches_naive_and_parseval_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let n = rng.gen_range(1..=9u32);
            let m = [3u32, 5, 7, 11][rng.gen_range(0..4)];
            let f = random_poly(&mut rng, n, m);
            let a = spectrum_naive(&f).unwrap();
            let b = spectrum_fwht(&f).unwrap();
            for mask in 0..(1u32 << n) {
                assert!((a.get(mask) - b.get(mask)).norm() <= 1e-9);
            }
            assert!((a.parseval_sum() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn tree_coefficient_single_edge() {
        let f = poly(2, 7, &[((0, 1), 3)], &[0, 0]);
        assert!((coeff_tree(&f, 0b11).unwrap() - lambda(3, 7)).norm() < 1e-15);
        assert!((coeff_tree(&f, 0b00).unwrap() - mu(3, 7)).norm() < 1e-15);
        // mixed subsets vanish: lambda(0) = 0 inside the recursion
        assert!(coeff_tree(&f, 0b01).unwrap().norm() < 1e-15);
    }

    #[test]
    fn tree_matches_naive_on_path() {
        let f = poly(3, 5, &[((0, 1), 1), ((1, 2), 1)], &[0, 0, 0]);
        let s = spectrum_naive(&f).unwrap();
        for mask in 0..8u32 {
            assert!(
                (coeff_tree(&f, mask).unwrap() - s.get(mask)).norm() <= 1e-12,
                "mask = {mask}"
            );
        }
    }

    #[test]
    fn tree_matches_naive_on_random_forests() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let n = rng.gen_range(2..=9u32);
            let m = [3u32, 5, 7, 9][rng.gen_range(0..4)];
            // random forest: attach vertex j to a random earlier vertex, or leave isolated
            let mut a = Vec::new();
            for j in 1..n {
                if rng.gen_bool(0.75) {
                    let i = rng.gen_range(0..j);
                    a.push(((i, j), rng.gen_range(1..m as i64)));
                }
            }
            let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m as i64)).collect();
            let f = QuadPoly::new(n, m, a, b).unwrap();
            let s = spectrum_naive(&f).unwrap();
            for mask in 0..(1u32 << n) {
                assert!(
                    (coeff_tree(&f, mask).unwrap() - s.get(mask)).norm() <= 1e-9,
                    "f = {f}, mask = {mask}"
                );
            }
        }
    }

    #[test]
    fn star_coefficients_respect_tree_bound() {
        let edges: Vec<((u32, u32), i64)> = (1..6).map(|j| ((0u32, j), 1i64)).collect();
        let f = poly(6, 7, &edges, &[0; 6]);
        let q = root_params(7).unwrap().q;
        let cap = (q / 2.0).powi(5);
        for mask in 0..(1u32 << 6) {
            assert!(coeff_tree(&f, mask).unwrap().norm() <= cap + 1e-9);
        }
    }

    #[test]
    fn non_forest_is_rejected() {
        let tri = poly(3, 5, &[((0, 1), 1), ((1, 2), 1), ((0, 2), 1)], &[0; 3]);
        assert!(matches!(coeff_tree(&tri, 0), Err(Error::NotForest(1))));
    }

    #[test]
    fn certificate_examples() {
        let q3 = root_params(3).unwrap().q;
        // tree on 5 vertices, m = 3
        let tree = poly(
            5,
            3,
            &[((0, 1), 1), ((1, 2), 1), ((1, 3), 1), ((3, 4), 1)],
            &[0; 5],
        );
        let cert = forest_bound_certificate(&tree).unwrap();
        assert!(cert.applicable);
        assert_eq!(cert.k, 0);
        assert!((cert.bound - (q3 / 2.0).powi(4)).abs() < 1e-12);
        assert!((cert.bound - 0.5625).abs() < 1e-9);
        // triangle: k = 1 exceeds (n-2) log2(2/q) ~ 0.2075
        let tri = poly(3, 3, &[((0, 1), 1), ((1, 2), 1), ((0, 2), 1)], &[0; 3]);
        let cert = forest_bound_certificate(&tri).unwrap();
        assert_eq!(cert.k, 1);
        assert!(!cert.applicable);
        // two disjoint edges on 4 vertices
        let forest = poly(4, 3, &[((0, 1), 1), ((2, 3), 1)], &[0; 4]);
        let cert = forest_bound_certificate(&forest).unwrap();
        assert_eq!(cert.k, 0);
        assert!(cert.applicable);
        assert!((cert.bound - (q3 / 2.0).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn extremal_pair_attains_bound_in_spectrum() {
        let f = poly(4, 5, &[((0, 1), 1), ((2, 3), 1)], &[0; 4]);
        let s = spectrum_fwht(&f).unwrap();
        let q = root_params(5).unwrap().q;
        assert!((s.get(0b1111).norm() - (q / 2.0).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn edge_addition_grows_sup_norm_by_at_most_sqrt2() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..40 {
            let n = rng.gen_range(3..=8u32);
            let m = [3u32, 5, 7, 9][rng.gen_range(0..4)];
            let mut a = Vec::new();
            for j in 1..n {
                if rng.gen_bool(0.6) {
                    let i = rng.gen_range(0..j);
                    a.push(((i, j), rng.gen_range(1..m as i64)));
                }
            }
            let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m as i64)).collect();
            let f = QuadPoly::new(n, m, a.clone(), b.clone()).unwrap();
            let pairs: Vec<(u32, u32)> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|e| !a.iter().any(|(ae, _)| ae == e))
                .collect();
            if pairs.is_empty() {
                continue;
            }
            let e = pairs[rng.gen_range(0..pairs.len())];
            let mut a2 = a.clone();
            a2.push((e, rng.gen_range(1..m as i64)));
            let f2 = QuadPoly::new(n, m, a2, b).unwrap();
            let base = spectrum_fwht(&f).unwrap().max_abs();
            let grown = spectrum_fwht(&f2).unwrap().max_abs();
            assert!(grown <= 2f64.sqrt() * base + 1e-9, "f = {f}");
        }
    }
}
