//! The quadratic polynomial model: `f(x) = sum a_ij x_i x_j + sum b_k x_k`
//! over `Z_m`, with no diagonal and no constant terms, plus its associated
//! graph, its symmetry group, and family enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::cyclotomic::check_modulus;
use crate::{Error, Result};

/// A quadratic polynomial over `Z_m` in `n` variables.
///
/// Coefficients are stored reduced to `{0, ..., m-1}`; zero quadratic
/// coefficients are absent from the map. Quadratic keys are 0-based pairs
/// `(i, j)` with `i < j` (the JSON boundary is 1-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "RawPoly", try_from = "RawPoly")]
pub struct QuadPoly {
    n: u32,
    m: u32,
    a: BTreeMap<(u32, u32), u32>,
    b: Vec<u32>,
}

impl QuadPoly {
    /// Builds and validates a polynomial. Quadratic indices are 0-based here.
    pub fn new(
        n: u32,
        m: u32,
        a: impl IntoIterator<Item = ((u32, u32), i64)>,
        b: impl IntoIterator<Item = i64>,
    ) -> Result<Self> {
        check_modulus(m)?;
        if n < 1 {
            return Err(Error::Parse("n must be at least 1".into()));
        }
        let mut amap = BTreeMap::new();
        for ((i, j), coef) in a {
            if i == j {
                return Err(Error::Parse(format!(
                    "diagonal term x{0}*x{0} is not allowed",
                    i + 1
                )));
            }
            if i > j {
                return Err(Error::Parse(format!(
                    "quadratic index pair ({}, {}) must have i < j",
                    i + 1,
                    j + 1
                )));
            }
            if j >= n {
                return Err(Error::Parse(format!(
                    "variable index {} out of range for n = {}",
                    j + 1,
                    n
                )));
            }
            let c = coef.rem_euclid(m as i64) as u32;
            if c != 0 {
                amap.insert((i, j), c);
            }
        }
        let b: Vec<u32> = b
            .into_iter()
            .map(|c| c.rem_euclid(m as i64) as u32)
            .collect();
        if b.len() != n as usize {
            return Err(Error::Parse(format!(
                "b has {} entries, expected n = {}",
                b.len(),
                n
            )));
        }
        Ok(QuadPoly { n, m, a: amap, b })
    }

    /// The zero polynomial in `n` variables.
    pub fn zero(n: u32, m: u32) -> Result<Self> {
        Self::new(n, m, [], vec![0i64; n as usize])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Quadratic coefficients, 0-based `(i, j)` with `i < j`, values in `1..m`.
    pub fn a(&self) -> &BTreeMap<(u32, u32), u32> {
        &self.a
    }

    /// Linear coefficients, values in `0..m`.
    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn is_homogeneous(&self) -> bool {
        self.b.iter().all(|&c| c == 0)
    }

    /// `f(x) mod m` for `x` in `{-1, 1}^n`.
    pub fn eval_at(&self, x: &[i8]) -> u32 {
        debug_assert_eq!(x.len(), self.n as usize);
        let m = self.m as i64;
        let mut acc = 0i64;
        for (&(i, j), &c) in &self.a {
            acc += c as i64 * x[i as usize] as i64 * x[j as usize] as i64;
        }
        for (k, &c) in self.b.iter().enumerate() {
            acc += c as i64 * x[k] as i64;
        }
        acc.rem_euclid(m) as u32
    }

    /// Parses the JSON wire format (see module docs of [`crate::report`]).
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawPoly =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
        raw.try_into()
    }

    /// Canonical single-line JSON: object keys sorted, no whitespace,
    /// quadratic indices 1-based.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&serde_json::to_value(self).expect("serializable"))
            .expect("serializable")
    }

    /// The graph on variables with one edge per nonzero quadratic coefficient.
    pub fn graph(&self) -> PolyGraph {
        PolyGraph {
            n: self.n,
            edges: self.a.keys().copied().collect(),
        }
    }

    /// The full coefficient sequence `(a_12, a_13, ..., a_(n-1)n, b_1, ..., b_n)`
    /// used for lexicographic comparisons and family indexing.
    pub fn coeff_tuple(&self) -> Vec<u32> {
        let n = self.n;
        let mut out = Vec::with_capacity(coeff_len(n, false));
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.a.get(&(i, j)).copied().unwrap_or(0));
            }
        }
        out.extend_from_slice(&self.b);
        out
    }

    /// Rebuilds a polynomial from a coefficient sequence (inverse of
    /// [`QuadPoly::coeff_tuple`]).
    pub fn from_coeff_tuple(n: u32, m: u32, tuple: &[u32]) -> Result<Self> {
        if tuple.len() != coeff_len(n, false) {
            return Err(Error::Internal("coefficient tuple length mismatch".into()));
        }
        let mut it = tuple.iter().copied();
        let mut a = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let c = it.next().unwrap();
                if c != 0 {
                    a.push(((i, j), c as i64));
                }
            }
        }
        let b: Vec<i64> = it.map(|c| c as i64).collect();
        Self::new(n, m, a, b)
    }

    /// Lexicographically smallest representative of the orbit of `f` under
    /// variable permutations, sign flips `x_i -> -x_i`, and global negation
    /// `f -> -f`. `|S|` is constant on each orbit.
    pub fn canonical_form(&self) -> QuadPoly {
        let n = self.n as usize;
        let m = self.m;
        let mut best: Option<Vec<u32>> = None;
        let pair_index = |i: u32, j: u32| -> usize {
            // position of (i, j), i < j, in row-major upper-triangular order
            let n = self.n as usize;
            let (i, j) = (i as usize, j as usize);
            i * n - i * (i + 1) / 2 + (j - i - 1)
        };
        let npairs = n * (n - 1) / 2;
        let mut candidate = vec![0u32; npairs + n];
        for_each_permutation(n, |perm| {
            for signs in 0u32..(1 << n) {
                for &neg in &[1i64, -1] {
                    candidate.iter_mut().for_each(|c| *c = 0);
                    for (&(i, j), &c) in &self.a {
                        let (pi, pj) = (perm[i as usize], perm[j as usize]);
                        let (lo, hi) = if pi < pj { (pi, pj) } else { (pj, pi) };
                        let si = if signs >> i & 1 == 1 { -1i64 } else { 1 };
                        let sj = if signs >> j & 1 == 1 { -1i64 } else { 1 };
                        let v = (c as i64 * si * sj * neg).rem_euclid(m as i64) as u32;
                        candidate[pair_index(lo, hi)] = v;
                    }
                    for (k, &c) in self.b.iter().enumerate() {
                        let sk = if signs >> k & 1 == 1 { -1i64 } else { 1 };
                        let v = (c as i64 * sk * neg).rem_euclid(m as i64) as u32;
                        candidate[npairs + perm[k] as usize] = v;
                    }
                    match &best {
                        Some(b) if candidate >= *b => {}
                        _ => best = Some(candidate.clone()),
                    }
                }
            }
        });
        QuadPoly::from_coeff_tuple(self.n, m, &best.expect("nonempty orbit"))
            .expect("orbit members are valid")
    }
}

impl fmt::Display for QuadPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&(i, j), &c) in &self.a {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c == 1 {
                write!(f, "x{}*x{}", i + 1, j + 1)?;
            } else {
                write!(f, "{}*x{}*x{}", c, i + 1, j + 1)?;
            }
        }
        for (k, &c) in self.b.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c == 1 {
                write!(f, "x{}", k + 1)?;
            } else {
                write!(f, "{}*x{}", c, k + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " (mod {})", self.m)
    }
}

/// JSON wire format: `{"n": .., "m": .., "a": {"i,j": coef}, "b": [..]}` with
/// 1-based indices in the `a` keys.
#[derive(Serialize, Deserialize)]
struct RawPoly {
    n: u32,
    m: u32,
    #[serde(default)]
    a: BTreeMap<String, i64>,
    #[serde(default)]
    b: Vec<i64>,
}

impl TryFrom<RawPoly> for QuadPoly {
    type Error = Error;

    fn try_from(raw: RawPoly) -> Result<Self> {
        let mut a = Vec::new();
        for (key, coef) in raw.a {
            let parts: Vec<&str> = key.split(',').collect();
            let bad = || Error::Parse(format!("bad quadratic key {key:?}, expected \"i,j\""));
            if parts.len() != 2 {
                return Err(bad());
            }
            let i: u32 = parts[0].trim().parse().map_err(|_| bad())?;
            let j: u32 = parts[1].trim().parse().map_err(|_| bad())?;
            if i == 0 || j == 0 {
                return Err(Error::Parse(format!(
                    "quadratic key {key:?} is 1-based; index 0 is invalid"
                )));
            }
            a.push(((i - 1, j - 1), coef));
        }
        let b = if raw.b.is_empty() && raw.n > 0 {
            vec![0i64; raw.n as usize]
        } else {
            raw.b
        };
        QuadPoly::new(raw.n, raw.m, a, b)
    }
}

impl From<QuadPoly> for RawPoly {
    fn from(p: QuadPoly) -> RawPoly {
        RawPoly {
            n: p.n,
            m: p.m,
            a: p.a
                .iter()
                .map(|(&(i, j), &c)| (format!("{},{}", i + 1, j + 1), c as i64))
                .collect(),
            b: p.b.iter().map(|&c| c as i64).collect(),
        }
    }
}

/// The graph `G(f)` on variables `1..n` with an edge per nonzero `a_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyGraph {
    pub n: u32,
    /// 0-based `(i, j)` with `i < j`, sorted, no duplicates.
    pub edges: Vec<(u32, u32)>,
}

impl PolyGraph {
    /// Number of connected components (isolated vertices count).
    pub fn components(&self) -> u32 {
        let mut dsu = Dsu::new(self.n as usize);
        for &(i, j) in &self.edges {
            dsu.union(i as usize, j as usize);
        }
        dsu.components() as u32
    }

    /// Circuit rank `|E| - n + components`: the minimum number of edge
    /// deletions leaving a forest. Zero iff the graph is a forest.
    pub fn forest_distance(&self) -> u32 {
        // components >= n - |E|, so summing before subtracting cannot wrap
        self.edges.len() as u32 + self.components() - self.n
    }

    pub fn is_forest(&self) -> bool {
        self.forest_distance() == 0
    }

    /// Vertex sets of the connected components, each sorted.
    pub fn component_sets(&self) -> Vec<Vec<u32>> {
        let mut dsu = Dsu::new(self.n as usize);
        for &(i, j) in &self.edges {
            dsu.union(i as usize, j as usize);
        }
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for v in 0..self.n as usize {
            groups.entry(dsu.find(v)).or_default().push(v as u32);
        }
        groups.into_values().collect()
    }
}

struct Dsu {
    parent: Vec<usize>,
    count: usize,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            count: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.count -= 1;
        }
    }

    fn components(&self) -> usize {
        self.count
    }
}

/// Number of free coefficients of a family member.
pub fn coeff_len(n: u32, homogeneous: bool) -> usize {
    let pairs = (n as usize) * (n as usize - 1) / 2;
    if homogeneous {
        pairs
    } else {
        pairs + n as usize
    }
}

/// A family of polynomials to sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// All of `Z_m^2[n]`: every `(a, b)` pair, size `m^(n(n+1)/2)`.
    AllQuadratic { n: u32, m: u32 },
    /// Homogeneous members (`b = 0`), size `m^(n(n-1)/2)`.
    Homogeneous { n: u32, m: u32 },
    /// Linear members (`a = 0`), size `m^n`.
    LinearOnly { n: u32, m: u32 },
    /// An explicit list.
    ExplicitList { polys: Vec<QuadPoly> },
    /// `count` uniform samples, reproducible from `seed`.
    RandomSample {
        n: u32,
        m: u32,
        count: u64,
        seed: u64,
    },
}

impl FamilySpec {
    pub fn n(&self) -> u32 {
        match self {
            FamilySpec::AllQuadratic { n, .. }
            | FamilySpec::Homogeneous { n, .. }
            | FamilySpec::LinearOnly { n, .. }
            | FamilySpec::RandomSample { n, .. } => *n,
            FamilySpec::ExplicitList { polys } => polys.first().map_or(0, |p| p.n()),
        }
    }

    pub fn m(&self) -> u32 {
        match self {
            FamilySpec::AllQuadratic { m, .. }
            | FamilySpec::Homogeneous { m, .. }
            | FamilySpec::LinearOnly { m, .. }
            | FamilySpec::RandomSample { m, .. } => *m,
            FamilySpec::ExplicitList { polys } => polys.first().map_or(0, |p| p.m()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::ExplicitList { polys } => {
                if polys.is_empty() {
                    return Err(Error::Parse("explicit family is empty".into()));
                }
                let (n, m) = (polys[0].n(), polys[0].m());
                for p in polys {
                    if p.n() != n || p.m() != m {
                        return Err(Error::Parse(
                            "explicit family members must share n and m".into(),
                        ));
                    }
                }
                Ok(())
            }
            _ => {
                check_modulus(self.m())?;
                if self.n() < 1 {
                    return Err(Error::Parse("n must be at least 1".into()));
                }
                Ok(())
            }
        }
    }

    /// Family size; saturates at `u128::MAX` for astronomically large grids.
    pub fn size(&self) -> u128 {
        let pow = |m: u32, k: usize| -> u128 {
            let mut acc: u128 = 1;
            for _ in 0..k {
                acc = acc.saturating_mul(m as u128);
            }
            acc
        };
        match self {
            FamilySpec::AllQuadratic { n, m } => pow(*m, coeff_len(*n, false)),
            FamilySpec::Homogeneous { n, m } => pow(*m, coeff_len(*n, true)),
            FamilySpec::LinearOnly { n, m } => pow(*m, *n as usize),
            FamilySpec::ExplicitList { polys } => polys.len() as u128,
            FamilySpec::RandomSample { count, .. } => *count as u128,
        }
    }

    /// True when iteration covers the entire family (not a sample).
    pub fn is_exhaustive(&self) -> bool {
        !matches!(self, FamilySpec::RandomSample { .. })
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            FamilySpec::RandomSample { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// The `idx`-th member. Exhaustive kinds enumerate the coefficient vector
    /// in odometer order, little-endian: the first coefficient (`a_12`, or
    /// `b_1` if there are no quadratic slots) varies fastest.
    pub fn member(&self, idx: u64) -> QuadPoly {
        match self {
            FamilySpec::AllQuadratic { n, m } => {
                let tuple = odometer(*m, coeff_len(*n, false), idx);
                QuadPoly::from_coeff_tuple(*n, *m, &tuple).expect("valid member")
            }
            FamilySpec::Homogeneous { n, m } => {
                let mut tuple = odometer(*m, coeff_len(*n, true), idx);
                tuple.extend(std::iter::repeat_n(0, *n as usize));
                QuadPoly::from_coeff_tuple(*n, *m, &tuple).expect("valid member")
            }
            FamilySpec::LinearOnly { n, m } => {
                let b = odometer(*m, *n as usize, idx);
                let mut tuple = vec![0u32; coeff_len(*n, true)];
                tuple.extend(b);
                QuadPoly::from_coeff_tuple(*n, *m, &tuple).expect("valid member")
            }
            FamilySpec::ExplicitList { polys } => polys[idx as usize].clone(),
            FamilySpec::RandomSample { n, m, seed, .. } => {
                // a fresh stream per index keeps results independent of how
                // a parallel sweep partitions the index range
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(idx);
                let tuple: Vec<u32> = (0..coeff_len(*n, false))
                    .map(|_| rng.gen_range(0..*m))
                    .collect();
                QuadPoly::from_coeff_tuple(*n, *m, &tuple).expect("valid member")
            }
        }
    }
}

fn odometer(m: u32, len: usize, idx: u64) -> Vec<u32> {
    let mut digits = Vec::with_capacity(len);
    let mut rest = idx;
    for _ in 0..len {
        digits.push((rest % m as u64) as u32);
        rest /= m as u64;
    }
    digits
}

/// Heap's algorithm; calls `f` once per permutation of `0..n`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[u32])) {
    let mut perm: Vec<u32> = (0..n as u32).collect();
    let mut stack = vec![0usize; n];
    f(&perm);
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            f(&perm);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
}
