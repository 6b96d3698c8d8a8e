//! Vietoris–Rips complexes, their `Z/2` action, barycentric subdivision,
//! mod-2 simplicial homology and partition-of-unity points.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::covering::SymmetricNet;
use crate::error::{Error, Result};
use crate::finite_metric::{function_distortion, FiniteMetricSpace};
use crate::sphere_geom::{geodesic, SpherePoint};

/// Absolute slack on the `diam <= r` test. Regular polygons put many
/// distances exactly on the scale, and rounding must not drop those edges.
pub const SCALE_TOL: f64 = 1e-9;

pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

/// A finite abstract simplicial complex. Simplices of each dimension are
/// sorted vertex lists, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    /// Set when simplices above `simplices.len() - 1` may exist but were
    /// not generated.
    truncated: bool,
}

impl SimplicialComplex {
    /// Builds a complex from a list of maximal (or any) simplices, closing
    /// under faces.
    pub fn from_simplices(n_vertices: usize, generators: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<std::collections::BTreeSet<Vec<usize>>> = Vec::new();
        for g in generators {
            let mut s = g.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::invalid("empty simplex"));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= n_vertices) {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    size: n_vertices,
                });
            }
            let k = s.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| s[b]).collect();
                let d = face.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, Default::default);
                }
                by_dim[d].insert(face);
            }
        }
        if by_dim.is_empty() {
            by_dim.push(Default::default());
        }
        Ok(SimplicialComplex {
            n_vertices,
            simplices: by_dim.into_iter().map(|s| s.into_iter().collect()).collect(),
            truncated: false,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Highest dimension with stored simplices (or that was generated).
    pub fn top_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let d = simplex.len().checked_sub(1)?;
        self.simplices.get(d)?.binary_search_by(|s| s.as_slice().cmp(simplex)).ok()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index_of(simplex).is_some()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Betti numbers `b_0..=b_up_to` over the two-element field.
    pub fn f2_homology(&self, up_to: usize) -> Result<BettiVector> {
        if self.truncated && up_to + 1 > self.top_dim() {
            return Err(Error::invalid(format!(
                "homology through dimension {up_to} needs simplices through dimension {}, built only through {}",
                up_to + 1,
                self.top_dim()
            )));
        }
        let ranks: Vec<usize> = (0..=up_to + 1).map(|k| self.boundary_rank(k)).collect();
        let values = (0..=up_to)
            .map(|k| self.simplices(k).len() - ranks[k] - ranks[k + 1])
            .collect();
        Ok(BettiVector { values })
    }

    /// Rank over F2 of the boundary map from `k`-simplices to
    /// `(k-1)`-simplices, by column reduction with sparse columns.
    fn boundary_rank(&self, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        let cols = self.simplices(k);
        let mut pivot_col: Vec<Option<usize>> = vec![None; self.simplices(k - 1).len()];
        let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(cols.len());
        let mut rank = 0;
        for s in cols {
            let mut col: Vec<usize> = (0..s.len())
                .map(|skip| {
                    let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    self.index_of(&face).expect("complex is closed under faces")
                })
                .collect();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match pivot_col[low] {
                    Some(j) => col = symmetric_difference(&col, &reduced[j]),
                    None => break,
                }
            }
            if let Some(&low) = col.last() {
                pivot_col[low] = Some(reduced.len());
                rank += 1;
            }
            reduced.push(col);
        }
        rank
    }

    /// Writes one simplex per line, vertices ascending, by dimension.
    pub fn export<W: Write>(&self, mut out: W) -> io::Result<()> {
        for dim in &self.simplices {
            for s in dim {
                let line: Vec<String> = s.iter().map(usize::to_string).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }

    /// Global index of every simplex: dimension offsets plus position.
    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.simplices.len());
        let mut acc = 0;
        for d in &self.simplices {
            off.push(acc);
            acc += d.len();
        }
        off
    }

    /// Barycentric subdivision: one vertex per simplex (numbered by
    /// dimension, then position), one simplex per chain of proper
    /// inclusions.
    pub fn barycentric_subdivision(&self, budget: usize) -> Result<SimplicialComplex> {
        let off = self.offsets();
        let total = self.len();
        let mut chains: Vec<Vec<usize>> = Vec::new();
        for top in self.simplices.iter().flatten() {
            let mut chain = Vec::new();
            self.chains_below(top, &off, &mut chain, &mut chains, budget)?;
        }
        let max_len = chains.iter().map(Vec::len).max().unwrap_or(1);
        let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_len];
        for mut c in chains {
            c.sort_unstable();
            by_dim[c.len() - 1].push(c);
        }
        for d in &mut by_dim {
            d.sort_unstable();
        }
        Ok(SimplicialComplex {
            n_vertices: total,
            simplices: by_dim,
            truncated: self.truncated,
        })
    }

    /// Records every chain whose largest element is `top`.
    fn chains_below(
        &self,
        top: &[usize],
        off: &[usize],
        chain: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: usize,
    ) -> Result<()> {
        let id = off[top.len() - 1] + self.index_of(top).expect("simplex of this complex");
        chain.push(id);
        if out.len() >= budget {
            return Err(Error::BudgetExceeded {
                what: "subdivision simplices",
                needed: out.len() + 1,
                limit: budget,
            });
        }
        out.push(chain.clone());
        let k = top.len();
        for mask in 1u64..(1u64 << k) - 1 {
            let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| top[b]).collect();
            self.chains_below(&face, off, chain, out, budget)?;
        }
        chain.pop();
        Ok(())
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub values: Vec<usize>,
}

impl BettiVector {
    pub fn max_dim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.values
            .iter()
            .enumerate()
            .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

/// `VR(X; r)` with the `diam <= r` convention, built through `max_dim`.
#[derive(Debug, Clone)]
pub struct VRComplex {
    base: FiniteMetricSpace,
    r: f64,
    max_dim: usize,
    complex: SimplicialComplex,
}

impl VRComplex {
    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.r
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.complex.simplices(dim)
    }

    pub fn f2_homology(&self, up_to: usize) -> Result<BettiVector> {
        if up_to + 1 > self.max_dim && self.complex.truncated {
            return Err(Error::invalid(format!(
                "homology through dimension {up_to} needs max_dim >= {}, complex built through {}",
                up_to + 1,
                self.max_dim
            )));
        }
        self.complex.f2_homology(up_to)
    }

    pub fn barycentric_subdivision(&self, budget: usize) -> Result<SimplicialComplex> {
        self.complex.barycentric_subdivision(budget)
    }

    /// True when `support` spans a simplex of this complex.
    pub fn spans_simplex(&self, support: &[usize]) -> bool {
        support.iter().all(|&i| i < self.base.len())
            && support
                .iter()
                .enumerate()
                .all(|(a, &i)| support[a + 1..].iter().all(|&j| self.base.d(i, j) <= self.r + SCALE_TOL))
    }
}

/// All cliques of the `r`-neighborhood graph with at most `max_dim + 1`
/// vertices.
pub fn build_vr(base: &FiniteMetricSpace, r: f64, max_dim: usize) -> Result<VRComplex> {
    build_vr_with_budget(base, r, max_dim, DEFAULT_SIMPLEX_BUDGET)
}

pub fn build_vr_with_budget(base: &FiniteMetricSpace, r: f64, max_dim: usize, budget: usize) -> Result<VRComplex> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::invalid("scale must be a finite nonnegative number"));
    }
    let n = base.len();
    let words = n.div_ceil(64).max(1);
    // upper[i]: neighbors j > i
    let upper: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in i + 1..n {
                if base.d(i, j) <= r + SCALE_TOL {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();

    let count = AtomicUsize::new(0);
    let per_vertex: Vec<Result<Vec<Vec<usize>>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut found = Vec::new();
            let mut clique = vec![v];
            extend_cliques(&upper, &upper[v], &mut clique, max_dim + 1, &mut found, &count, budget)?;
            Ok(found)
        })
        .collect();

    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_dim + 1];
    for cliques in per_vertex {
        for c in cliques? {
            by_dim[c.len() - 1].push(c);
        }
    }
    by_dim.par_iter_mut().for_each(|d| d.sort_unstable());
    let truncated = !by_dim[max_dim].is_empty();
    Ok(VRComplex {
        base: base.clone(),
        r,
        max_dim,
        complex: SimplicialComplex {
            n_vertices: n,
            simplices: by_dim,
            truncated,
        },
    })
}

fn extend_cliques(
    upper: &[Vec<u64>],
    candidates: &[u64],
    clique: &mut Vec<usize>,
    max_size: usize,
    out: &mut Vec<Vec<usize>>,
    count: &AtomicUsize,
    budget: usize,
) -> Result<()> {
    let total = count.fetch_add(1, Ordering::Relaxed) + 1;
    if total > budget {
        return Err(Error::BudgetExceeded {
            what: "simplices",
            needed: total,
            limit: budget,
        });
    }
    out.push(clique.clone());
    if clique.len() == max_size {
        return Ok(());
    }
    for (w, &word) in candidates.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let j = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let next: Vec<u64> = candidates.iter().zip(&upper[j]).map(|(a, b)| a & b).collect();
            clique.push(j);
            extend_cliques(upper, &next, clique, max_size, out, count, budget)?;
            clique.pop();
        }
    }
    Ok(())
}

/// For every simplex, the index (within its dimension) of its image under
/// the base involution. Errors if the base has no involution or some
/// simplex is fixed.
pub fn z2_action(c: &VRComplex) -> Result<Vec<Vec<usize>>> {
    let inv = c
        .base
        .involution()
        .ok_or_else(|| Error::invalid("base space carries no involution"))?;
    c.complex
        .simplices
        .iter()
        .map(|dim| {
            dim.iter()
                .map(|s| {
                    let mut img: Vec<usize> = s.iter().map(|&v| inv[v]).collect();
                    img.sort_unstable();
                    if &img == s {
                        return Err(Error::FixedSimplex(s.clone()));
                    }
                    c.complex
                        .index_of(&img)
                        .ok_or_else(|| Error::invalid("involution image is not a simplex; base involution is not isometric"))
                })
                .collect()
        })
        .collect()
}

/// Image of `VR(X; r)` under a vertex map `f: X -> Y`.
#[derive(Debug, Clone)]
pub struct InducedMap {
    /// Image vertex sets (sorted, deduplicated), indexed like the domain
    /// complex.
    pub images: Vec<Vec<Vec<usize>>>,
    pub distortion: f64,
    pub bound: f64,
    pub max_image_diameter: f64,
    /// Whether `f` commutes with the involutions on every simplex; `None`
    /// when either side lacks an involution.
    pub odd: Option<bool>,
}

impl InducedMap {
    pub fn respects_bound(&self) -> bool {
        self.max_image_diameter <= self.bound + SCALE_TOL
    }
}

/// The simplicial map `VR(X; r) -> VR(Y; r + dis f)` induced by `f`.
pub fn induced_map(
    f: &[usize],
    r: f64,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    max_dim: usize,
) -> Result<InducedMap> {
    if f.len() != x.len() {
        return Err(Error::DimensionMismatch(x.len(), f.len()));
    }
    if let Some(&bad) = f.iter().find(|&&v| v >= y.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: y.len(),
        });
    }
    let dis = function_distortion(f, x, y)?;
    let vr = build_vr(x, r, max_dim)?;
    let mut max_diam: f64 = 0.0;
    let images: Vec<Vec<Vec<usize>>> = vr
        .complex
        .simplices
        .iter()
        .map(|dim| {
            dim.iter()
                .map(|s| {
                    let mut img: Vec<usize> = s.iter().map(|&v| f[v]).collect();
                    img.sort_unstable();
                    img.dedup();
                    for (a, &i) in img.iter().enumerate() {
                        for &j in &img[a + 1..] {
                            max_diam = max_diam.max(y.d(i, j));
                        }
                    }
                    img
                })
                .collect()
        })
        .collect();

    let odd = match (x.involution(), y.involution()) {
        (Some(ix), Some(iy)) => {
            let action = z2_action(&vr)?;
            Some(images.iter().enumerate().all(|(d, dim)| {
                dim.iter().enumerate().all(|(k, img)| {
                    let mut neg: Vec<usize> = img.iter().map(|&v| iy[v]).collect();
                    neg.sort_unstable();
                    neg == images[d][action[d][k]]
                })
            }) && (0..x.len()).all(|v| f[ix[v]] == iy[f[v]]))
        }
        _ => None,
    };
    Ok(InducedMap {
        images,
        distortion: dis,
        bound: r + dis,
        max_image_diameter: max_diam,
        odd,
    })
}

/// A point `sum lambda_i x_i` of a geometric realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarycentricPoint {
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl BarycentricPoint {
    /// Support must be strictly increasing, weights positive with sum 1
    /// within `1e-12`.
    pub fn new(support: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::invalid("support and weights must be nonempty and of equal length"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("support must be strictly increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(BarycentricPoint { support, weights })
    }

    pub fn vertex(v: usize) -> Self {
        BarycentricPoint {
            support: vec![v],
            weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_of(&self, v: usize) -> f64 {
        self.support.binary_search(&v).map_or(0.0, |i| self.weights[i])
    }

    /// Vertices carrying the largest weight.
    pub fn argmax_set(&self) -> Vec<usize> {
        let top = self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|&(_, &w)| w == top)
            .map(|(&v, _)| v)
            .collect()
    }
}

/// Odd map `S^k -> |VR(X; epsilon)|` from tent bumps of radius
/// `epsilon / 2` around the points of a symmetric net.
pub fn partition_of_unity_map(net: &SymmetricNet, epsilon: f64, y: &SpherePoint) -> Result<BarycentricPoint> {
    if !(epsilon > 0.0 && epsilon < std::f64::consts::PI) {
        return Err(Error::invalid("epsilon must lie in (0, pi)"));
    }
    if y.dim() != net.dim() {
        return Err(Error::DimensionMismatch(net.dim(), y.dim()));
    }
    let half = 0.5 * epsilon;
    let mut support = Vec::new();
    let mut raw = Vec::new();
    for (i, x) in net.points().iter().enumerate() {
        let w = half - geodesic(x.coords(), y.coords());
        if w > 0.0 {
            support.push(i);
            raw.push(w);
        }
    }
    if support.is_empty() {
        return Err(Error::OutOfDomain(format!(
            "point is not within {half} of the net"
        )));
    }
    // summing in value order makes the total independent of index order,
    // so y and -y get bit-identical weights
    let mut sorted = raw.clone();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    Ok(BarycentricPoint { support, weights })
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::finite_metric::Metric;
    use crate::sampling::sphere_samples;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn euler_characteristic_agrees_with_betti(m in 3usize..12, r in 0.1f64..3.2, seed in any::<u64>()) {
            let space = FiniteMetricSpace::from_points(&sphere_samples(seed, 2, m), Metric::Geodesic).unwrap();
            let vr = build_vr(&space, r, m).unwrap();
            let top = vr.complex().top_dim();
            let betti = vr.f2_homology(top).unwrap();
            prop_assert_eq!(betti.euler_characteristic(), vr.complex().euler_characteristic());
            prop_assert_eq!(betti.values[0] >= 1, true);
        }

        #[test]
        fn vr_grows_with_scale(m in 3usize..12, r in 0.1f64..3.0, dr in 0.0f64..1.0, seed in any::<u64>()) {
            let space = FiniteMetricSpace::from_points(&sphere_samples(seed, 2, m), Metric::Geodesic).unwrap();
            let small = build_vr(&space, r, 3).unwrap();
            let big = build_vr(&space, r + dr, 3).unwrap();
            for d in 0..=3 {
                for s in small.simplices(d) {
                    prop_assert!(big.complex().contains(s));
                }
            }
        }

        #[test]
        fn subdivision_keeps_homology(m in 3usize..7, r in 0.5f64..2.5, seed in any::<u64>()) {
            let space = FiniteMetricSpace::from_points(&sphere_samples(seed, 1, m), Metric::Geodesic).unwrap();
            let vr = build_vr(&space, r, m).unwrap();
            let top = vr.complex().top_dim();
            let sd = vr.barycentric_subdivision(DEFAULT_SIMPLEX_BUDGET).unwrap();
            prop_assert_eq!(sd.f2_homology(top).unwrap(), vr.f2_homology(top).unwrap());
        }
    }
}
