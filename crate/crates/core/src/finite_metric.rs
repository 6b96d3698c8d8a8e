//! Finite metric spaces, relations, distortion and codistortion, Hausdorff
//! distance, an exact Gromov-Hausdorff oracle for tiny spaces, and the
//! Euclidean helmet extension.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere_geom::{chord, geodesic, SpherePoint};

/// Tolerance for the triangle inequality when validating a distance matrix.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// Default cell budget `|X| * |Y|` for [`gh_bruteforce`].
pub const DEFAULT_GH_CELLS: usize = 25;

/// Metric carried by a sample of a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Geodesic,
    Euclidean,
}

impl Metric {
    #[inline]
    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Geodesic => geodesic(a, b),
            Metric::Euclidean => chord(a, b),
        }
    }
}

/// Labelled points with a symmetric distance matrix and an optional
/// isometric involution `i -> iota(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    involution: Option<Vec<usize>>,
}

impl FiniteMetricSpace {
    /// Validates a full distance matrix: square, finite, nonnegative,
    /// symmetric, zero diagonal and the triangle inequality up to
    /// [`TRIANGLE_TOL`].
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::NotAMetric(format!(
                "{} labels for {} rows",
                labels.len(),
                n
            )));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            dist.extend_from_slice(row);
        }
        let space = FiniteMetricSpace {
            labels,
            dist,
            involution: None,
        };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return Err(Error::NotAMetric(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = self.d(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NotAMetric(format!("bad entry d({i},{j}) = {v}")));
                }
                if v != self.d(j, i) {
                    return Err(Error::NotAMetric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) + TRIANGLE_TOL {
                        return Err(Error::NotAMetric(format!(
                            "triangle inequality fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Distance matrix of a point sample of a sphere. The metric axioms hold
    /// by construction, so the cubic triangle check is skipped.
    pub fn from_points(points: &[SpherePoint], metric: Metric) -> Result<Self> {
        if let Some(first) = points.first() {
            if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
                return Err(Error::DimensionMismatch(first.dim(), bad.dim()));
            }
        }
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = metric.between(points[i].coords(), points[j].coords());
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(FiniteMetricSpace {
            labels: (0..n).map(|i| i.to_string()).collect(),
            dist,
            involution: None,
        })
    }

    /// Like [`from_points`](Self::from_points) for a centrally symmetric
    /// sample; the involution pairs each point with its antipode.
    pub fn from_symmetric_points(points: &[SpherePoint], metric: Metric) -> Result<Self> {
        let inv = antipodal_pairing(points)?;
        Self::from_points(points, metric)?.with_involution(inv)
    }

    /// Attaches an involution, which must be a permutation squaring to the
    /// identity and preserve distances exactly.
    pub fn with_involution(mut self, inv: Vec<usize>) -> Result<Self> {
        let n = self.len();
        if inv.len() != n {
            return Err(Error::invalid(format!("involution has {} entries for {n} points", inv.len())));
        }
        for (i, &j) in inv.iter().enumerate() {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, size: n });
            }
            if inv[j] != i {
                return Err(Error::invalid(format!("involution does not square to identity at {i}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.d(inv[i], inv[j]) != self.d(i, j) {
                    return Err(Error::invalid(format!("involution is not an isometry at ({i},{j})")));
                }
            }
        }
        self.involution = Some(inv);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::invalid("label count does not match space size"));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn involution(&self) -> Option<&[usize]> {
        self.involution.as_deref()
    }

    /// Smallest distance `d(i, iota(i))`; `None` without an involution.
    pub fn min_antipodal_distance(&self) -> Option<f64> {
        let inv = self.involution.as_ref()?;
        inv.iter()
            .enumerate()
            .map(|(i, &j)| self.d(i, j))
            .min_by(f64::total_cmp)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(Error::IndexOutOfRange {
                index: i,
                size: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Same space with points reordered: point `i` of the result is point
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        for &p in perm {
            self.check_index(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        if perm.len() != n {
            return Err(Error::invalid("not a permutation"));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = self.d(perm[i], perm[j]);
            }
        }
        let involution = self.involution.as_ref().map(|inv| {
            let mut pos = vec![0; n];
            for (i, &p) in perm.iter().enumerate() {
                pos[p] = i;
            }
            (0..n).map(|i| pos[inv[perm[i]]]).collect()
        });
        Ok(FiniteMetricSpace {
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
            dist,
            involution,
        })
    }
}

/// Matches every point with its exact coordinate negation.
pub fn antipodal_pairing(points: &[SpherePoint]) -> Result<Vec<usize>> {
    let mut keyed: Vec<(Vec<u64>, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.coords().iter().map(|c| canonical_bits(*c)).collect(), i))
        .collect();
    keyed.sort();
    let mut inv = vec![usize::MAX; points.len()];
    for (i, p) in points.iter().enumerate() {
        let key: Vec<u64> = p.antipode().coords().iter().map(|c| canonical_bits(*c)).collect();
        match keyed.binary_search_by(|(k, _)| k.cmp(&key)) {
            Ok(pos) => inv[i] = keyed[pos].1,
            Err(_) => {
                return Err(Error::invalid(format!(
                    "point {i} has no antipode in the set"
                )))
            }
        }
    }
    Ok(inv)
}

fn canonical_bits(c: f64) -> u64 {
    if c == 0.0 {
        0
    } else {
        c.to_bits()
    }
}

pub fn diameter(space: &FiniteMetricSpace, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::invalid("diameter of an empty set"));
    }
    for &i in subset {
        space.check_index(i)?;
    }
    let mut best: f64 = 0.0;
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            best = best.max(space.d(i, j));
        }
    }
    Ok(best)
}

/// A nonempty relation between spaces of sizes `x_len` and `y_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pairs: Vec<(usize, usize)>,
    x_len: usize,
    y_len: usize,
}

impl Relation {
    pub fn new(pairs: Vec<(usize, usize)>, x_len: usize, y_len: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("relation must be nonempty"));
        }
        for &(x, y) in &pairs {
            if x >= x_len {
                return Err(Error::IndexOutOfRange { index: x, size: x_len });
            }
            if y >= y_len {
                return Err(Error::IndexOutOfRange { index: y, size: y_len });
            }
        }
        Ok(Relation { pairs, x_len, y_len })
    }

    /// Graph `{(x, g(x))}` of a function.
    pub fn graph(g: &[usize], y_len: usize) -> Result<Self> {
        Self::new(g.iter().copied().enumerate().collect(), g.len(), y_len)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// True iff both projections are surjective.
    pub fn is_correspondence(&self) -> bool {
        let mut xs = vec![false; self.x_len];
        let mut ys = vec![false; self.y_len];
        for &(x, y) in &self.pairs {
            xs[x] = true;
            ys[y] = true;
        }
        xs.into_iter().all(|b| b) && ys.into_iter().all(|b| b)
    }
}

fn check_relation_fits(r: &Relation, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<()> {
    if r.x_len != x.len() {
        return Err(Error::DimensionMismatch(r.x_len, x.len()));
    }
    if r.y_len != y.len() {
        return Err(Error::DimensionMismatch(r.y_len, y.len()));
    }
    Ok(())
}

/// `sup |d_X(x,x') - d_Y(y,y')|` over pairs of related pairs.
pub fn distortion(r: &Relation, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    check_relation_fits(r, x, y)?;
    let mut best: f64 = 0.0;
    for (a, &(x1, y1)) in r.pairs.iter().enumerate() {
        for &(x2, y2) in &r.pairs[a + 1..] {
            best = best.max((x.d(x1, x2) - y.d(y1, y2)).abs());
        }
    }
    Ok(best)
}

/// `sup_{x,x'} |d_X(x,x') - d_Y(g(x),g(x'))|`, computed directly on the
/// function rather than through its graph.
pub fn function_distortion(g: &[usize], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    if g.len() != x.len() {
        return Err(Error::DimensionMismatch(g.len(), x.len()));
    }
    for &gi in g {
        y.check_index(gi)?;
    }
    let mut best: f64 = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            best = best.max((x.d(i, j) - y.d(g[i], g[j])).abs());
        }
    }
    Ok(best)
}

/// `sup_{x,y} |d_X(x, h(y)) - d_Y(g(x), y)|`.
pub fn codistortion(
    g: &[usize],
    h: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<f64> {
    if g.len() != x.len() {
        return Err(Error::DimensionMismatch(g.len(), x.len()));
    }
    if h.len() != y.len() {
        return Err(Error::DimensionMismatch(h.len(), y.len()));
    }
    for &gi in g {
        y.check_index(gi)?;
    }
    for &hi in h {
        x.check_index(hi)?;
    }
    let mut best: f64 = 0.0;
    for (xi, &gx) in g.iter().enumerate() {
        for (yi, &hy) in h.iter().enumerate() {
            best = best.max((x.d(xi, hy) - y.d(gx, yi)).abs());
        }
    }
    Ok(best)
}

/// Hausdorff distance between two index subsets of one space.
pub fn hausdorff_distance(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("Hausdorff distance needs nonempty sets"));
    }
    for &i in a.iter().chain(b) {
        space.check_index(i)?;
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&i| to.iter().map(|&j| space.d(i, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Exact `d_GH(X, Y)`, i.e. half the minimum distortion over all
/// correspondences.
///
/// Every correspondence contains a minimal one, and distortion only grows
/// with the relation, so the search runs over minimal correspondences:
/// repeatedly pick the first uncovered point and branch on the cells that
/// cover it, pruning once the partial distortion reaches the incumbent.
pub fn gh_bruteforce(x: &FiniteMetricSpace, y: &FiniteMetricSpace, max_cells: usize) -> Result<f64> {
    let (nx, ny) = (x.len(), y.len());
    if nx == 0 || ny == 0 {
        return Err(Error::invalid("Gromov-Hausdorff oracle needs nonempty spaces"));
    }
    let cells = nx * ny;
    if cells > max_cells {
        return Err(Error::BudgetExceeded {
            what: "correspondence cells",
            needed: cells,
            limit: max_cells,
        });
    }
    if nx > 64 || ny > 64 {
        return Err(Error::invalid("spaces larger than 64 points are not supported"));
    }

    let mut search = CoverSearch {
        x,
        y,
        chosen: Vec::with_capacity(nx + ny),
        best: f64::INFINITY,
    };
    search.run(0, 0, 0.0);
    Ok(search.best / 2.0)
}

struct CoverSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    chosen: Vec<(usize, usize)>,
    best: f64,
}

impl CoverSearch<'_> {
    fn run(&mut self, covered_x: u64, covered_y: u64, current: f64) {
        let (nx, ny) = (self.x.len(), self.y.len());
        let free_x = (0..nx).find(|&i| covered_x >> i & 1 == 0);
        let free_y = (0..ny).find(|&j| covered_y >> j & 1 == 0);
        let candidates: Vec<(usize, usize)> = match (free_x, free_y) {
            (None, None) => {
                self.best = self.best.min(current);
                return;
            }
            (Some(i), _) => (0..ny).map(|j| (i, j)).collect(),
            (None, Some(j)) => (0..nx).map(|i| (i, j)).collect(),
        };
        for (i, j) in candidates {
            let cost = self
                .chosen
                .iter()
                .map(|&(a, b)| (self.x.d(i, a) - self.y.d(j, b)).abs())
                .fold(current, f64::max);
            if cost >= self.best {
                continue;
            }
            self.chosen.push((i, j));
            self.run(covered_x | 1 << i, covered_y | 1 << j, cost);
            self.chosen.pop();
        }
    }
}

/// Upper bound `sqrt(d (4 - d))` on the distortion of a Euclidean helmet
/// extension of a map with distortion `d`.
pub fn helmet_bound(dis: f64) -> f64 {
    (dis * (4.0 - dis)).max(0.0).sqrt()
}

/// An odd map defined on `C ∪ iota(C)`, stored as parallel index/image lists.
#[derive(Debug, Clone, PartialEq)]
pub struct OddExtension {
    pub domain: Vec<usize>,
    pub images: Vec<SpherePoint>,
}

/// Extends `phi: C -> S^n` oddly: `phi*(iota(x)) = -phi(x)`.
pub fn helmet_extend_euclidean(
    space: &FiniteMetricSpace,
    c: &[usize],
    phi: &[SpherePoint],
) -> Result<OddExtension> {
    let inv = space
        .involution()
        .ok_or_else(|| Error::invalid("helmet extension needs a space with an involution"))?;
    if c.len() != phi.len() {
        return Err(Error::DimensionMismatch(c.len(), phi.len()));
    }
    if c.is_empty() {
        return Err(Error::invalid("helmet extension needs a nonempty C"));
    }
    if let Some(p) = phi.iter().find(|p| p.dim() != phi[0].dim()) {
        return Err(Error::DimensionMismatch(phi[0].dim(), p.dim()));
    }
    let mut in_c = vec![false; space.len()];
    for &i in c {
        space.check_index(i)?;
        in_c[i] = true;
    }
    if let Some(&i) = c.iter().find(|&&i| in_c[inv[i]]) {
        return Err(Error::invalid(format!("C meets its image under the involution at {i}")));
    }
    let mut domain = c.to_vec();
    let mut images = phi.to_vec();
    for (&i, p) in c.iter().zip(phi) {
        domain.push(inv[i]);
        images.push(p.antipode());
    }
    Ok(OddExtension { domain, images })
}

/// Distortion of a map `domain[i] -> images[i]` from a finite space into a
/// sphere carrying `metric`.
pub fn map_distortion(
    space: &FiniteMetricSpace,
    domain: &[usize],
    images: &[SpherePoint],
    metric: Metric,
) -> Result<f64> {
    if domain.len() != images.len() {
        return Err(Error::DimensionMismatch(domain.len(), images.len()));
    }
    for &i in domain {
        space.check_index(i)?;
    }
    let mut best: f64 = 0.0;
    for a in 0..domain.len() {
        for b in a + 1..domain.len() {
            let target = metric.between(images[a].coords(), images[b].coords());
            best = best.max((space.d(domain[a], domain[b]) - target).abs());
        }
    }
    Ok(best)
}
