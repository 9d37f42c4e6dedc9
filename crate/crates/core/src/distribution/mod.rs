//! Target distributions and their dyadic mass trees.
//!
//! A distribution on `2^n` outcomes is either a discrete pmf or a density on
//! `[0, 1]`. [`build_mass_tree`] turns it into the mass `p_w` of every dyadic
//! interval `I_w`, for every word `w` of length `0..=n`.

mod quadrature;
mod word;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quadrature::adaptive_simpson;
pub use word::{index_of_word, interval_of_word, suffix_of_index, word_of_index, Word, MAX_WORD_LEN};

pub const DEFAULT_MAX_QUBITS: u32 = 24;
pub const DEFAULT_NORMALIZATION_TOL: f64 = 1e-6;
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;
pub const DEFAULT_QUAD_MAX_DEPTH: u32 = 40;

/// Negative quadrature noise below this magnitude is flushed to zero.
const NEGATIVE_NOISE: f64 = 1e-14;

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous piecewise-linear density given by its values at breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Validation("piecewise-linear density needs at least two breakpoints".into()));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(Error::Validation("breakpoints must start at 0 and end at 1".into()));
        }
        if xs.windows(2).any(|p| p[0].partial_cmp(&p[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::Validation("breakpoints must be strictly increasing".into()));
        }
        if ys.iter().any(|y| !y.is_finite() || *y < 0.0) {
            return Err(Error::Validation("densities at breakpoints must be finite and nonnegative".into()));
        }
        Ok(Self { xs, ys })
    }

    /// Parses `x:y,x:y,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let points = s
            .split(',')
            .map(|pair| {
                let (x, y) = pair
                    .split_once(':')
                    .ok_or_else(|| Error::Validation(format!("breakpoint '{pair}' is not of the form x:y")))?;
                let x: f64 = x.trim().parse().map_err(|_| Error::Validation(format!("bad x in '{pair}'")))?;
                let y: f64 = y.trim().parse().map_err(|_| Error::Validation(format!("bad y in '{pair}'")))?;
                Ok((x, y))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn triangular() -> Self {
        Self { xs: vec![0.0, 0.5, 1.0], ys: vec![0.0, 2.0, 0.0] }
    }

    pub fn uniform() -> Self {
        Self { xs: vec![0.0, 1.0], ys: vec![1.0, 1.0] }
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let seg = self.segment_of(x);
        self.interpolate(seg, x)
    }

    fn segment_of(&self, x: f64) -> usize {
        // index i with xs[i] <= x < xs[i+1], last segment for x = 1
        let i = self.xs.partition_point(|&b| b <= x);
        i.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn interpolate(&self, seg: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        if x == x0 {
            return y0;
        }
        if x == x1 {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Exact integral over `[a, b]` by summing trapezoids between breakpoints.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(0.0), b.min(1.0));
        if a >= b {
            return 0.0;
        }
        let mut seg = self.segment_of(a);
        let mut lo = a;
        let mut total = 0.0;
        loop {
            let hi = b.min(self.xs[seg + 1]);
            if hi > lo {
                total += 0.5 * (hi - lo) * (self.interpolate(seg, lo) + self.interpolate(seg, hi));
            }
            if hi >= b || seg + 2 >= self.xs.len() {
                break;
            }
            lo = hi;
            seg += 1;
        }
        total
    }
}

#[derive(Clone)]
pub enum DistributionKind {
    DiscretePmf(Vec<f64>),
    Uniform,
    Triangular,
    PiecewiseLinear(PiecewiseLinear),
    Density(DensityFn),
}

impl fmt::Debug for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DiscretePmf(p) => f.debug_tuple("DiscretePmf").field(p).finish(),
            Self::Uniform => f.write_str("Uniform"),
            Self::Triangular => f.write_str("Triangular"),
            Self::PiecewiseLinear(pl) => f.debug_tuple("PiecewiseLinear").field(pl).finish(),
            Self::Density(_) => f.write_str("Density(<fn>)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub n: u32,
}

impl DistributionSpec {
    pub fn pmf(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Validation(format!("pmf length {len} is not 2^n with n >= 1")));
        }
        Ok(Self { n: len.trailing_zeros(), kind: DistributionKind::DiscretePmf(values) })
    }

    pub fn uniform(n: u32) -> Self {
        Self { kind: DistributionKind::Uniform, n }
    }

    pub fn triangular(n: u32) -> Self {
        Self { kind: DistributionKind::Triangular, n }
    }

    pub fn piecewise_linear(pl: PiecewiseLinear, n: u32) -> Self {
        Self { kind: DistributionKind::PiecewiseLinear(pl), n }
    }

    pub fn density<F>(f: F, n: u32) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { kind: DistributionKind::Density(Arc::new(f)), n }
    }

    /// Reads the pmf document `{"n": <int>, "p": [<2^n numbers>]}`.
    pub fn from_pmf_json(text: &str) -> Result<Self> {
        let file: PmfFile = serde_json::from_str(text)?;
        if file.n == 0 || file.n > MAX_WORD_LEN {
            return Err(Error::Validation(format!("n = {} is out of range", file.n)));
        }
        let expected = 1usize << file.n;
        if file.p.len() != expected {
            return Err(Error::Validation(format!(
                "n = {} requires {expected} probabilities, found {}",
                file.n,
                file.p.len()
            )));
        }
        Self::pmf(file.p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmfFile {
    pub n: u32,
    pub p: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_qubits: u32,
    pub normalization_tol: f64,
    pub quad_tol: f64,
    pub quad_max_depth: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
            normalization_tol: DEFAULT_NORMALIZATION_TOL,
            quad_tol: DEFAULT_QUAD_TOL,
            quad_max_depth: DEFAULT_QUAD_MAX_DEPTH,
        }
    }
}

/// Recorded when the input total was within tolerance of 1 but not exactly 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationNotice {
    pub original_total: f64,
}

impl fmt::Display for NormalizationNotice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "input total mass {:.17e} rescaled to 1 (deviation {:.3e})",
            self.original_total,
            self.original_total - 1.0
        )
    }
}

/// Masses `p_w` for every word of length `0..=n`.
///
/// Level `m` is stored contiguously at offset `2^m - 1`, in increasing
/// `k(w)`. The children `0w` and `1w` of a word with index `k` have indices
/// `2k` and `2k + 1` one level down.
#[derive(Clone, Debug, PartialEq)]
pub struct MassTree {
    n: u32,
    masses: Vec<f64>,
    notice: Option<NormalizationNotice>,
}

impl MassTree {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mass(&self, w: &Word) -> f64 {
        assert!(w.len() <= self.n, "word {w} deeper than tree depth {}", self.n);
        self.masses[level_offset(w.len()) + w.index() as usize]
    }

    pub fn level(&self, m: u32) -> &[f64] {
        assert!(m <= self.n);
        let start = level_offset(m);
        &self.masses[start..start + (1usize << m)]
    }

    pub fn leaves(&self) -> &[f64] {
        self.level(self.n)
    }

    pub fn notice(&self) -> Option<&NormalizationNotice> {
        self.notice.as_ref()
    }

    /// Every `(word, p_w)` pair, shallow levels first.
    pub fn iter(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        (0..=self.n).flat_map(move |m| {
            self.level(m).iter().enumerate().map(move |(k, &p)| (Word::new(k as u64, m).unwrap(), p))
        })
    }

    /// Builds the full tree from leaf masses that already sum to 1.
    fn from_leaves(leaves: Vec<f64>, notice: Option<NormalizationNotice>) -> Self {
        let n = leaves.len().trailing_zeros();
        let mut masses = vec![0.0; (1usize << (n + 1)) - 1];
        let leaf_start = level_offset(n);
        masses[leaf_start..].copy_from_slice(&leaves);
        for m in (0..n).rev() {
            let (upper, lower) = masses.split_at_mut(level_offset(m + 1));
            let parents = &mut upper[level_offset(m)..];
            let children = &lower[..1usize << (m + 1)];
            for (k, parent) in parents.iter_mut().enumerate() {
                *parent = children[2 * k] + children[2 * k + 1];
            }
        }
        masses[0] = 1.0;
        Self { n, masses, notice }
    }
}

fn level_offset(m: u32) -> usize {
    (1usize << m) - 1
}

/// Neumaier-compensated sum.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn build_mass_tree(spec: &DistributionSpec) -> Result<MassTree> {
    build_mass_tree_with(spec, &BuildOptions::default())
}

pub fn build_mass_tree_with(spec: &DistributionSpec, opts: &BuildOptions) -> Result<MassTree> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::Validation("qubit count must be at least 1".into()));
    }
    if n > opts.max_qubits {
        return Err(Error::Resource { what: "mass tree", size: n as usize, cap: opts.max_qubits as usize });
    }
    let cells = 1usize << n;
    let width = 1.0 / cells as f64;
    let cell = |k: usize| (k as f64 * width, (k + 1) as f64 * width);

    let raw: Vec<f64> = match &spec.kind {
        DistributionKind::DiscretePmf(p) => {
            if p.len() != cells {
                return Err(Error::Validation(format!("n = {n} requires {cells} probabilities, found {}", p.len())));
            }
            if let Some((k, v)) = p.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
                return Err(Error::Validation(format!("pmf entry {k} is {v}; entries must be finite and nonnegative")));
            }
            p.clone()
        }
        DistributionKind::Uniform => vec![width; cells],
        DistributionKind::Triangular => {
            let tri = PiecewiseLinear::triangular();
            (0..cells)
                .map(|k| {
                    let (a, b) = cell(k);
                    tri.integral(a, b)
                })
                .collect()
        }
        DistributionKind::PiecewiseLinear(pl) => (0..cells)
            .map(|k| {
                let (a, b) = cell(k);
                pl.integral(a, b)
            })
            .collect(),
        DistributionKind::Density(f) => {
            (0..cells)
                .map(|k| {
                    let (a, b) = cell(k);
                    // cell endpoints are sampled from the inside so a jump on the dyadic grid is harmless
                    let (lo, hi) = (a.next_up(), b.next_down());
                    let checked = |x: f64| {
                        let y = f(x.clamp(lo, hi));
                        if y.is_finite() && y >= 0.0 {
                            y
                        } else {
                            f64::NAN
                        }
                    };
                    let v = adaptive_simpson(&checked, a, b, opts.quad_tol, opts.quad_max_depth)?;
                    if v < 0.0 && v > -NEGATIVE_NOISE {
                        Ok(0.0)
                    } else if v < 0.0 {
                        Err(Error::Validation(format!("negative mass {v} on cell {k}")))
                    } else {
                        Ok(v)
                    }
                })
                .collect::<Result<_>>()?
        }
    };

    let total = compensated_sum(&raw);
    let (mut leaves, notice) = if total == 1.0 {
        (raw, None)
    } else if (total - 1.0).abs() <= opts.normalization_tol {
        (raw.iter().map(|p| p / total).collect(), Some(NormalizationNotice { original_total: total }))
    } else {
        return Err(Error::Normalization { total, tol: opts.normalization_tol });
    };
    for p in &mut leaves {
        if *p < f64::MIN_POSITIVE {
            *p = 0.0;
        }
    }
    Ok(MassTree::from_leaves(leaves, notice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn triangular_leaves_closed_form() {
        let tree = build_mass_tree(&DistributionSpec::triangular(3)).unwrap();
        let expected = [1.0, 3.0, 5.0, 7.0, 7.0, 5.0, 3.0, 1.0].map(|v| v / 32.0);
        assert_eq!(tree.leaves(), &expected);
        assert_eq!(tree.mass(&"110".parse().unwrap()), 0.21875);
        assert!(tree.notice().is_none());
    }

    #[test]
    fn uniform_leaves() {
        let tree = build_mass_tree(&DistributionSpec::uniform(4)).unwrap();
        assert!(tree.leaves().iter().all(|&p| p == 1.0 / 16.0));
    }

    #[test]
    fn refinement_and_root() {
        let spec = DistributionSpec::pmf(vec![0.1, 0.0, 0.3, 0.05, 0.05, 0.2, 0.0, 0.3]).unwrap();
        let tree = build_mass_tree(&spec).unwrap();
        assert_eq!(tree.mass(&Word::EMPTY), 1.0);
        for m in 0..tree.n() {
            for k in 0..(1u64 << m) {
                let w = Word::new(k, m).unwrap();
                let sum = tree.mass(&w.prepend(0)) + tree.mass(&w.prepend(1));
                assert!(close(tree.mass(&w), sum, 1e-12));
            }
        }
        // the zero leaves stay exactly zero
        assert_eq!(tree.leaves()[1], 0.0);
        assert_eq!(tree.leaves()[6], 0.0);
    }

    #[test]
    fn pmf_validation() {
        let neg = DistributionSpec::pmf(vec![0.5, 0.6, -0.1, 0.0]).unwrap();
        assert!(matches!(build_mass_tree(&neg), Err(Error::Validation(_))));
        let far = DistributionSpec::pmf(vec![0.5, 0.5, 0.5, 0.0]).unwrap();
        assert!(matches!(build_mass_tree(&far), Err(Error::Normalization { .. })));
        assert!(DistributionSpec::pmf(vec![0.5, 0.25, 0.25]).is_err());
        let nan = DistributionSpec::pmf(vec![f64::NAN, 1.0]).unwrap();
        assert!(build_mass_tree(&nan).is_err());
    }

    #[test]
    fn near_unit_total_is_rescaled_with_notice() {
        let spec = DistributionSpec::pmf(vec![0.25 + 2e-7, 0.25, 0.25, 0.25]).unwrap();
        let tree = build_mass_tree(&spec).unwrap();
        let notice = tree.notice().expect("notice recorded");
        assert!(close(notice.original_total, 1.0 + 2e-7, 1e-15));
        let sum: f64 = tree.leaves().iter().sum();
        assert!(close(sum, 1.0, 1e-15));
    }

    #[test]
    fn qubit_cap() {
        let opts = BuildOptions { max_qubits: 4, ..Default::default() };
        assert!(matches!(build_mass_tree_with(&DistributionSpec::uniform(5), &opts), Err(Error::Resource { .. })));
        assert!(build_mass_tree(&DistributionSpec::uniform(0)).is_err());
    }

    #[test]
    fn piecewise_validation_and_parse() {
        assert!(PiecewiseLinear::parse("0:1,1:1").is_ok());
        assert!(PiecewiseLinear::parse("0.1:1,1:1").is_err());
        assert!(PiecewiseLinear::parse("0:1,0.5:1,0.5:1,1:1").is_err());
        assert!(PiecewiseLinear::parse("0:1,1:-1").is_err());
        assert!(PiecewiseLinear::parse("0:1;1:1").is_err());
        let pl = PiecewiseLinear::parse("0:0,0.5:2,1:0").unwrap();
        assert_eq!(pl, PiecewiseLinear::triangular());
        assert_eq!(pl.eval(0.25), 1.0);
        assert_eq!(pl.eval(0.75), 1.0);
    }

    #[test]
    fn piecewise_closed_form_matches_quadrature() {
        let pl = PiecewiseLinear::parse("0:0.2,0.3:1.9,0.37:0.4,0.8:1.3,1:0.7").unwrap();
        let total = pl.integral(0.0, 1.0);
        let scaled: Vec<(f64, f64)> = pl.breakpoints().map(|(x, y)| (x, y / total)).collect();
        let pl = PiecewiseLinear::new(scaled).unwrap();
        for n in 1..=6 {
            let closed = build_mass_tree(&DistributionSpec::piecewise_linear(pl.clone(), n)).unwrap();
            let eval = pl.clone();
            let quad = build_mass_tree(&DistributionSpec::density(move |x| eval.eval(x), n)).unwrap();
            for ((w, a), (_, b)) in closed.iter().zip(quad.iter()) {
                assert!(close(a, b, 1e-10), "n={n} w={w}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn generic_density() {
        let tree = build_mass_tree(&DistributionSpec::density(|x| 3.0 * x * x, 3)).unwrap();
        for (k, &p) in tree.leaves().iter().enumerate() {
            let (a, b) = (k as f64 / 8.0, (k + 1) as f64 / 8.0);
            assert!(close(p, b * b * b - a * a * a, 1e-13));
        }
        let bad = DistributionSpec::density(|x| x - 0.5, 2);
        assert!(build_mass_tree(&bad).is_err());
    }

    #[test]
    fn zero_density_region_is_exact_zero() {
        let spec = DistributionSpec::density(|x| if x < 0.5 { 0.0 } else { 2.0 }, 3);
        let tree = build_mass_tree(&spec).unwrap();
        assert!(tree.leaves()[..4].iter().all(|&p| p == 0.0));
        assert_eq!(tree.mass(&"0".parse().unwrap()), 0.0);
    }

    #[test]
    fn pmf_json() {
        let spec = DistributionSpec::from_pmf_json(r#"{"n": 2, "p": [0.1, 0.2, 0.3, 0.4]}"#).unwrap();
        assert_eq!(spec.n, 2);
        assert!(DistributionSpec::from_pmf_json(r#"{"n": 2, "p": [0.5, 0.5]}"#).is_err());
        assert!(DistributionSpec::from_pmf_json(r#"{"p": [0.5, 0.5]}"#).is_err());
    }

    proptest::proptest! {
        #[test]
        fn random_pmf_trees_refine(raw in (1u32..=6).prop_flat_map(|n| proptest::collection::vec(0.0f64..1.0, 1usize << n))) {
            let total: f64 = raw.iter().sum();
            proptest::prop_assume!(total > 0.0);
            let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let tree = build_mass_tree(&DistributionSpec::pmf(p.clone()).unwrap()).unwrap();
            let leaf_sum: f64 = tree.leaves().iter().sum();
            proptest::prop_assert!((leaf_sum - 1.0).abs() <= 1e-12);
            for (w, pw) in tree.iter().filter(|(w, _)| w.len() < tree.n()) {
                let sum = tree.mass(&w.prepend(0)) + tree.mass(&w.prepend(1));
                proptest::prop_assert!((pw - sum).abs() <= 1e-12);
                proptest::prop_assert!(pw >= 0.0);
            }
        }
    }
}
