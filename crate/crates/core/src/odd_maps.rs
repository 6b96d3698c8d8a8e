//! Odd functions between spheres and sampled estimators of their
//! distortion and modulus of discontinuity.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{symmetric_net, SymmetricNet};
use crate::error::{Error, Result};
use crate::gh_bounds::HemisphereCorrespondence;
use crate::sampling::{hemisphere_sample, sphere_sample};
use crate::sphere_geom::{geodesic, tau_unchecked, SpherePoint};
use crate::vr_complex::{partition_of_unity_map, z2_action, BarycentricPoint, VRComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    EquatorialHelmet,
    ConeVertex,
    VrPipeline,
    LinearProjectNearest,
    Composition,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::EquatorialHelmet => "equatorial_helmet",
            Construction::ConeVertex => "cone_vertex",
            Construction::VrPipeline => "vr_pipeline",
            Construction::LinearProjectNearest => "linear_project_nearest",
            Construction::Composition => "composition",
        })
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// An odd function `S^k -> S^n`.
#[derive(Clone)]
pub struct OddFunction {
    domain_dim: usize,
    target_dim: usize,
    construction: Construction,
    eval: Evaluator,
}

impl fmt::Debug for OddFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OddFunction")
            .field("domain_dim", &self.domain_dim)
            .field("target_dim", &self.target_dim)
            .field("construction", &self.construction)
            .finish()
    }
}

/// Points whose last nonzero coordinate is positive. Exactly one of `x`,
/// `-x` lies in this half.
fn in_canonical_half(x: &[f64]) -> bool {
    x.iter().rev().find(|&&c| c != 0.0).is_some_and(|&c| c > 0.0)
}

fn negate(x: &[f64]) -> Vec<f64> {
    x.iter().map(|c| -c).collect()
}

/// Extends `g`, given on the canonical half, to the odd function
/// `x -> -g(-x)` on the other half.
fn odd_extension<G>(g: G) -> Evaluator
where
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
{
    Arc::new(move |x: &[f64]| {
        if in_canonical_half(x) {
            g(x)
        } else {
            negate(&g(&negate(x)))
        }
    })
}

fn basis(dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim + 1];
    v[0] = 1.0;
    v
}

impl OddFunction {
    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn eval(&self, x: &SpherePoint) -> Result<SpherePoint> {
        if x.dim() != self.domain_dim {
            return Err(Error::DimensionMismatch(self.domain_dim, x.dim()));
        }
        Ok(SpherePoint::from_unit(self.eval_raw(x.coords())))
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// `x -> tau(x)` on the upper hemisphere of `S^{n+1}`, extended oddly.
    /// The north pole goes to `e_1`.
    pub fn equatorial_helmet(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("equatorial helmet needs n >= 1"));
        }
        let e1 = basis(n);
        Ok(OddFunction {
            domain_dim: n + 1,
            target_dim: n,
            construction: Construction::EquatorialHelmet,
            eval: odd_extension(move |x| tau_unchecked(x).map_or_else(|| e1.clone(), SpherePoint::into_coords)),
        })
    }

    /// Thickened equator to `tau`, cone `C_i` to `-p_i`, extended oddly.
    pub fn cone_vertex(n: usize) -> Result<Self> {
        let corr = HemisphereCorrespondence::new(n)?;
        Ok(OddFunction {
            domain_dim: n + 1,
            target_dim: n,
            construction: Construction::ConeVertex,
            eval: odd_extension(move |x| corr.correspond_raw(x)),
        })
    }

    /// Projection to the first `min(k, n) + 1` coordinates, normalized, as
    /// a map `S^k -> S^n`. Isometric for `k <= n`.
    pub fn linear_project(k: usize, n: usize) -> Self {
        let m = k.min(n) + 1;
        let e1 = basis(n);
        OddFunction {
            domain_dim: k,
            target_dim: n,
            construction: Construction::LinearProjectNearest,
            eval: odd_extension(move |x| {
                let mut y = vec![0.0; n + 1];
                y[..m].copy_from_slice(&x[..m]);
                let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return e1.clone();
                }
                if norm != 1.0 {
                    y.iter_mut().for_each(|c| *c /= norm);
                }
                y
            }),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::linear_project(n, n)
    }

    /// `S^n -> S^n`: partition of unity into `VR(X; epsilon)` for a
    /// symmetric `epsilon / 2`-net `X`, then the odd vertex selector
    /// applied to the vertices of largest weight.
    pub fn vr_pipeline(n: usize, epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < PI) {
            return Err(Error::invalid("epsilon must lie in (0, pi)"));
        }
        let net = symmetric_net(n, epsilon / 2.0, seed)?;
        Self::vr_pipeline_on(net, epsilon)
    }

    pub fn vr_pipeline_on(net: SymmetricNet, epsilon: f64) -> Result<Self> {
        let selector = OddSelector::new(net.points(), &net.involution())?;
        let net = Arc::new(net);
        let n = net.dim();
        let native = {
            let net = Arc::clone(&net);
            move |y: &[f64]| -> Option<Vec<f64>> {
                let b = partition_of_unity_map(&net, epsilon, &SpherePoint::from_unit(y.to_vec())).ok()?;
                let v = select_from_barycentric(&b, &selector).ok()?;
                Some(net.points()[v].coords().to_vec())
            }
        };
        // uncovered points fall back to the nearest net point
        let fallback = odd_extension(move |y: &[f64]| {
            let (best, _) = net
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| (i, geodesic(p.coords(), y)))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            net.points()[best].coords().to_vec()
        });
        Ok(OddFunction {
            domain_dim: n,
            target_dim: n,
            construction: Construction::VrPipeline,
            eval: Arc::new(move |y| native(y).unwrap_or_else(|| fallback(y))),
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &OddFunction) -> Result<Self> {
        if inner.target_dim != self.domain_dim {
            return Err(Error::DimensionMismatch(self.domain_dim, inner.target_dim));
        }
        let (f, g) = (Arc::clone(&self.eval), Arc::clone(&inner.eval));
        Ok(OddFunction {
            domain_dim: inner.domain_dim,
            target_dim: self.target_dim,
            construction: Construction::Composition,
            eval: Arc::new(move |x| f(&g(x))),
        })
    }
}

/// Odd choice of a vertex in every simplex free of antipodal pairs.
///
/// Vertices are ranked by lexicographic order of their coordinates; for a
/// simplex `s`, let `m` be the top-ranked vertex of `s ∪ -s`. The choice is
/// `m` if `m` lies in `s` and `-m` otherwise.
#[derive(Debug, Clone)]
pub struct OddSelector {
    rank: Vec<usize>,
    antipode: Vec<usize>,
}

impl OddSelector {
    pub fn new(points: &[SpherePoint], antipode: &[usize]) -> Result<Self> {
        if points.len() != antipode.len() {
            return Err(Error::DimensionMismatch(points.len(), antipode.len()));
        }
        for (i, &j) in antipode.iter().enumerate() {
            if j >= points.len() {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    size: points.len(),
                });
            }
            if antipode[j] != i || i == j {
                return Err(Error::invalid("antipode map must be a fixed-point-free involution"));
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (points[a].coords(), points[b].coords());
            pa.iter()
                .zip(pb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut rank = vec![0; points.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        Ok(OddSelector {
            rank,
            antipode: antipode.to_vec(),
        })
    }

    pub fn select(&self, simplex: &[usize]) -> Result<usize> {
        let mut best: Option<usize> = None;
        for &v in simplex {
            if v >= self.rank.len() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    size: self.rank.len(),
                });
            }
            if simplex.contains(&self.antipode[v]) {
                return Err(Error::invalid(format!(
                    "simplex {simplex:?} contains the antipodal pair {v}, {}",
                    self.antipode[v]
                )));
            }
            for u in [v, self.antipode[v]] {
                if best.is_none_or(|b| self.rank[u] > self.rank[b]) {
                    best = Some(u);
                }
            }
        }
        let m = best.ok_or_else(|| Error::invalid("empty simplex"))?;
        Ok(if simplex.contains(&m) { m } else { self.antipode[m] })
    }
}

/// Selector for the vertices of a symmetric VR complex; errors if the
/// `Z/2` action on the complex is not free.
pub fn vr_vertex_select(c: &VRComplex, points: &[SpherePoint]) -> Result<OddSelector> {
    if points.len() != c.base().len() {
        return Err(Error::DimensionMismatch(c.base().len(), points.len()));
    }
    z2_action(c)?;
    let inv = c
        .base()
        .involution()
        .ok_or_else(|| Error::invalid("base space carries no involution"))?;
    OddSelector::new(points, inv)
}

/// `v` applied to the set of vertices carrying the largest weight.
pub fn select_from_barycentric(b: &BarycentricPoint, v: &OddSelector) -> Result<usize> {
    v.select(&b.argmax_set())
}

/// `x -> v(sigma_0(h(x)))`, rejecting points whose support is not a
/// simplex of `c`.
pub fn realization_to_function<'a, H>(
    h: H,
    c: &'a VRComplex,
    v: &'a OddSelector,
) -> impl Fn(&SpherePoint) -> Result<usize> + 'a
where
    H: Fn(&SpherePoint) -> Result<BarycentricPoint> + 'a,
{
    move |x| {
        let b = h(x)?;
        if !c.spans_simplex(b.support()) {
            return Err(Error::invalid("barycentric support is not a simplex of the complex"));
        }
        select_from_barycentric(&b, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleDomain {
    Sphere,
    UpperHemisphere,
}

fn sample(domain: SampleDomain, seed: u64, dim: usize, i: u64) -> SpherePoint {
    match domain {
        SampleDomain::Sphere => sphere_sample(seed, dim, i),
        SampleDomain::UpperHemisphere => hemisphere_sample(seed, dim, i),
    }
}

/// Sampled modulus of discontinuity.
///
/// `delta_hat` is the largest `d(f x', f x'') - d(x', x'')` over sample
/// pairs lying in a common ball `B(x, eta)` around a sample `x`; it tends to
/// `sup_x delta(f, x)` as `eta -> 0` and never exceeds the sampled
/// distortion of the same pairs. `diameter_hat` is the plain largest
/// diameter of `f(B(x, eta))`, which overshoots by up to `2 eta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscontinuityEstimate {
    pub eta: f64,
    pub samples: usize,
    pub delta_hat: f64,
    pub diameter_hat: f64,
    pub worst_point: Option<Vec<f64>>,
}

/// Joint estimates on one shared sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddMapReport {
    pub construction: Construction,
    pub k: usize,
    pub n: usize,
    pub modulus: DiscontinuityEstimate,
    /// Largest `|d(x, x') - d(f x, f x')|` over consecutive sample pairs and
    /// all pairs examined by the modulus estimate.
    pub dis_hat: f64,
    pub oddness_violations: usize,
}

struct Grid {
    side: f64,
    cells: HashMap<Vec<i64>, Vec<u32>>,
    offsets: Vec<Vec<i64>>,
}

impl Grid {
    fn new(points: &[SpherePoint], side: f64) -> Self {
        let dim = points.first().map_or(1, |p| p.coords().len());
        let mut cells: HashMap<Vec<i64>, Vec<u32>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p.coords(), side)).or_default().push(i as u32);
        }
        let mut offsets = vec![Vec::new()];
        for _ in 0..dim {
            offsets = offsets
                .into_iter()
                .flat_map(|o: Vec<i64>| {
                    (-1..=1).map(move |d| {
                        let mut o = o.clone();
                        o.push(d);
                        o
                    })
                })
                .collect();
        }
        Grid { side, cells, offsets }
    }

    fn key(x: &[f64], side: f64) -> Vec<i64> {
        x.iter().map(|c| (c / side).floor() as i64).collect()
    }

    /// Indices within geodesic distance `< eta` of `x` (chord is never
    /// longer than geodesic, so the adjacent cells suffice).
    fn neighbors(&self, points: &[SpherePoint], x: &[f64], eta: f64) -> Vec<usize> {
        let base = Self::key(x, self.side);
        let mut out = Vec::new();
        for o in &self.offsets {
            let k: Vec<i64> = base.iter().zip(o).map(|(a, b)| a + b).collect();
            if let Some(ids) = self.cells.get(&k) {
                out.extend(
                    ids.iter()
                        .map(|&i| i as usize)
                        .filter(|&i| geodesic(points[i].coords(), x) < eta),
                );
            }
        }
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Copy)]
struct BallStats {
    excess: f64,
    diameter: f64,
    dis: f64,
    at: usize,
}

/// Balls holding more than this many samples are thinned by stride.
const MAX_BALL: usize = 64;

fn thin(nb: Vec<usize>, center: usize) -> Vec<usize> {
    if nb.len() <= MAX_BALL {
        return nb;
    }
    let step = nb.len().div_ceil(MAX_BALL - 1);
    let mut out: Vec<usize> = nb.iter().copied().step_by(step).collect();
    if !out.contains(&center) {
        out.push(center);
        out.sort_unstable();
    }
    out
}

fn ball_stats(points: &[SpherePoint], images: &[Vec<f64>], grid: &Grid, eta: f64) -> BallStats {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let nb = thin(grid.neighbors(points, points[i].coords(), eta), i);
            let mut s = BallStats {
                excess: 0.0,
                diameter: 0.0,
                dis: 0.0,
                at: i,
            };
            for (a, &u) in nb.iter().enumerate() {
                for &w in &nb[a + 1..] {
                    let dd = geodesic(points[u].coords(), points[w].coords());
                    let di = geodesic(&images[u], &images[w]);
                    s.excess = s.excess.max(di - dd);
                    s.diameter = s.diameter.max(di);
                    s.dis = s.dis.max((di - dd).abs());
                }
            }
            s
        })
        .reduce(
            || BallStats {
                excess: 0.0,
                diameter: 0.0,
                dis: 0.0,
                at: usize::MAX,
            },
            |a, b| {
                let (win, lose) = if b.excess > a.excess || (b.excess == a.excess && b.at < a.at) {
                    (b, a)
                } else {
                    (a, b)
                };
                BallStats {
                    excess: win.excess,
                    at: win.at,
                    diameter: win.diameter.max(lose.diameter),
                    dis: win.dis.max(lose.dis),
                }
            },
        )
}

fn sample_set(f: &OddFunction, domain: SampleDomain, samples: usize, seed: u64) -> (Vec<SpherePoint>, Vec<Vec<f64>>) {
    let points: Vec<SpherePoint> = (0..samples as u64)
        .into_par_iter()
        .map(|i| sample(domain, seed, f.domain_dim, i))
        .collect();
    let images = points.par_iter().map(|p| f.eval_raw(p.coords())).collect();
    (points, images)
}

fn estimate_from(points: &[SpherePoint], images: &[Vec<f64>], eta: f64) -> (DiscontinuityEstimate, f64) {
    let grid = Grid::new(points, eta);
    let s = ball_stats(points, images, &grid, eta);
    let est = DiscontinuityEstimate {
        eta,
        samples: points.len(),
        delta_hat: s.excess,
        diameter_hat: s.diameter,
        worst_point: (s.excess > 0.0).then(|| points[s.at].coords().to_vec()),
    };
    (est, s.dis)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::invalid("eta must be positive"));
    }
    Ok(())
}

pub fn estimate_modulus(f: &OddFunction, eta: f64, samples: usize, seed: u64) -> Result<DiscontinuityEstimate> {
    check_eta(eta)?;
    let (points, images) = sample_set(f, SampleDomain::Sphere, samples, seed);
    Ok(estimate_from(&points, &images, eta).0)
}

fn pair_distortion(points: &[SpherePoint], images: &[Vec<f64>]) -> f64 {
    (0..points.len() / 2)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (2 * i, 2 * i + 1);
            let dd = geodesic(points[a].coords(), points[b].coords());
            let di = geodesic(&images[a], &images[b]);
            (dd - di).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest `|d(x, x') - d(f x, f x')|` over `pairs` independent pairs.
pub fn estimate_distortion(f: &OddFunction, pairs: usize, seed: u64, domain: SampleDomain) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::invalid("need at least one pair"));
    }
    let (points, images) = sample_set(f, domain, 2 * pairs, seed);
    Ok(pair_distortion(&points, &images))
}

/// Number of samples where `f(-x) != -f(x)` bit for bit.
pub fn oddness_violations(f: &OddFunction, samples: usize, seed: u64) -> usize {
    (0..samples as u64)
        .into_par_iter()
        .filter(|&i| {
            let x = sphere_sample(seed, f.domain_dim, i);
            let fx = f.eval_raw(x.coords());
            let fm = f.eval_raw(&negate(x.coords()));
            fx.iter().zip(&fm).any(|(a, b)| *a != -*b)
        })
        .count()
}

/// Modulus, distortion and oddness of `f` on one shared sample set.
pub fn analyze(f: &OddFunction, eta: f64, samples: usize, seed: u64) -> Result<OddMapReport> {
    check_eta(eta)?;
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let (points, images) = sample_set(f, SampleDomain::Sphere, samples, seed);
    let (modulus, ball_dis) = estimate_from(&points, &images, eta);
    Ok(OddMapReport {
        construction: f.construction,
        k: f.domain_dim,
        n: f.target_dim,
        modulus,
        dis_hat: ball_dis.max(pair_distortion(&points, &images)),
        oddness_violations: oddness_violations(f, samples, seed),
    })
}

/// `(2 sin(c/2), 2 - 2 cos(c/2))`: the chord-metric forms of a geodesic
/// bound `c`.
pub fn euclidean_bounds(c: f64) -> Result<(f64, f64)> {
    if !(0.0..=PI).contains(&c) {
        return Err(Error::invalid(format!("c = {c} is outside [0, pi]")));
    }
    let h = 0.5 * c;
    Ok((2.0 * h.sin(), 2.0 - 2.0 * h.cos()))
}
