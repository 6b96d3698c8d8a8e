//! Coverings of `S^n` and `RP^n`: greedy symmetric nets, sampled covering
//! radii, and covering certificates built from explicit polytopes.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::{self, sphere_sample, subseed};
use crate::sphere_geom::{
    cell600_covering_radius, cell600_vertices, dot, icosahedron_covering_radius,
    icosahedron_vertices, inscribed_simplex, r_n, SpherePoint,
};

/// Slack allowed when re-validating a certificate on fresh samples.
pub const VALIDATION_SLACK: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverSpace {
    Sphere,
    Projective,
}

impl fmt::Display for CoverSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverSpace::Sphere => "S",
            CoverSpace::Projective => "RP",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverMethod {
    Icosahedron,
    #[serde(rename = "600cell")]
    Cell600,
    Simplex,
    Greedy,
    Grid,
}

impl fmt::Display for CoverMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverMethod::Icosahedron => "icosahedron",
            CoverMethod::Cell600 => "600cell",
            CoverMethod::Simplex => "simplex",
            CoverMethod::Greedy => "greedy",
            CoverMethod::Grid => "grid",
        })
    }
}

/// A centrally symmetric finite subset of `S^n`, stored in antipodal pairs:
/// points `2i` and `2i + 1` are negatives of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricNet {
    dim: usize,
    points: Vec<SpherePoint>,
}

impl SymmetricNet {
    fn new(dim: usize) -> Self {
        SymmetricNet {
            dim,
            points: Vec::new(),
        }
    }

    fn push_pair(&mut self, p: SpherePoint) {
        let q = p.antipode();
        self.points.push(p);
        self.points.push(q);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<SpherePoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the antipode of point `i`.
    #[inline]
    pub fn antipode_index(i: usize) -> usize {
        i ^ 1
    }

    pub fn involution(&self) -> Vec<usize> {
        (0..self.len()).map(Self::antipode_index).collect()
    }

    /// One representative per antipodal pair.
    pub fn representatives(&self) -> Vec<SpherePoint> {
        self.points.iter().step_by(2).cloned().collect()
    }
}

/// Running greedy state: for every pool point, the largest `|<p, c>|` over
/// the pair centers chosen so far.
struct Greedy<'a> {
    pool: &'a [SpherePoint],
    best_ip: Vec<f64>,
}

impl<'a> Greedy<'a> {
    fn new(pool: &'a [SpherePoint]) -> Self {
        Greedy {
            pool,
            best_ip: vec![-1.0; pool.len()],
        }
    }

    fn absorb(&mut self, center: &SpherePoint) {
        let c = center.coords();
        self.best_ip
            .par_iter_mut()
            .zip(self.pool.par_iter())
            .for_each(|(b, p)| {
                let ip = dot(p.coords(), c).abs();
                if ip > *b {
                    *b = ip;
                }
            });
    }

    /// Farthest pool point and its distance to the current set.
    fn farthest(&self) -> (usize, f64) {
        let (i, ip) = self
            .best_ip
            .par_iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(i, b)| (i, *b))
            .expect("nonempty pool");
        (i, ip.clamp(-1.0, 1.0).acos())
    }
}

fn pool_size(n: usize, radius: f64) -> usize {
    let est = (PI / radius).powi(n as i32) * 40.0;
    est.clamp(4096.0, 2_000_000.0) as usize
}

/// Greedy farthest-point symmetric `epsilon`-covering of `S^n`.
///
/// Starts from `±e_1` and inserts the antipodal pair of the farthest pool
/// point until the pool is covered at `0.8 * epsilon`; then fresh validation
/// samples are drawn and any point not within `epsilon` is added as a pair,
/// until a validation round passes.
pub fn symmetric_net(n: usize, epsilon: f64, seed: u64) -> Result<SymmetricNet> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let mut net = SymmetricNet::new(n);
    net.push_pair(SpherePoint::basis(n, 0));
    if n == 0 {
        return Ok(net);
    }

    let inner = 0.8 * epsilon;
    let pool = sampling::sphere_samples(subseed(seed, 1), n, pool_size(n, inner));
    let mut greedy = Greedy::new(&pool);
    greedy.absorb(&net.points[0]);
    loop {
        let (i, d) = greedy.farthest();
        if d < inner {
            break;
        }
        net.push_pair(pool[i].clone());
        greedy.absorb(&pool[i]);
    }

    for round in 0..64u64 {
        let check = sampling::sphere_samples(subseed(seed, 100 + round), n, 10_000);
        let mut greedy = Greedy::new(&check);
        for c in net.points.iter().step_by(2) {
            greedy.absorb(c);
        }
        let mut violated = false;
        loop {
            let (i, d) = greedy.farthest();
            if d < epsilon && !(violated && d >= inner) {
                break;
            }
            violated = true;
            net.push_pair(check[i].clone());
            greedy.absorb(&check[i]);
        }
        if !violated {
            return Ok(net);
        }
    }
    Err(Error::invalid("greedy net did not stabilize"))
}

/// Greedy farthest-point set of exactly `pairs` antipodal pairs in `S^n`,
/// i.e. `pairs` points of `RP^n`.
pub fn greedy_symmetric_pairs(n: usize, pairs: usize, pool: usize, seed: u64) -> Result<SymmetricNet> {
    if pairs == 0 {
        return Err(Error::invalid("need at least one pair"));
    }
    let mut net = SymmetricNet::new(n);
    net.push_pair(SpherePoint::basis(n, 0));
    if n == 0 {
        return Ok(net);
    }
    let pool = sampling::sphere_samples(subseed(seed, 2), n, pool.max(1));
    let mut greedy = Greedy::new(&pool);
    greedy.absorb(&net.points[0]);
    while net.len() < 2 * pairs {
        let (i, _) = greedy.farthest();
        net.push_pair(pool[i].clone());
        greedy.absorb(&pool[i]);
    }
    Ok(net)
}

/// Sampled covering radius: the largest distance from `samples` uniform
/// points to their nearest center. Underestimates the true radius and
/// converges to it as `samples` grows.
pub fn covering_radius(centers: &[SpherePoint], space: CoverSpace, samples: usize, seed: u64) -> Result<f64> {
    let n = check_centers(centers)?;
    if samples == 0 {
        return Err(Error::invalid("need at least one validation sample"));
    }
    let best_ip = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = sphere_sample(seed, n, i);
            nearest_ip(p.coords(), centers, space)
        })
        .reduce(|| 1.0, f64::min);
    Ok(best_ip.clamp(-1.0, 1.0).acos())
}

fn check_centers(centers: &[SpherePoint]) -> Result<usize> {
    let first = centers
        .first()
        .ok_or_else(|| Error::invalid("covering needs at least one center"))?;
    let n = first.dim();
    if let Some(bad) = centers.iter().find(|c| c.dim() != n) {
        return Err(Error::DimensionMismatch(n, bad.dim()));
    }
    Ok(n)
}

#[inline]
fn nearest_ip(p: &[f64], centers: &[SpherePoint], space: CoverSpace) -> f64 {
    centers
        .iter()
        .map(|c| {
            let ip = dot(p, c.coords());
            match space {
                CoverSpace::Sphere => ip,
                CoverSpace::Projective => ip.abs(),
            }
        })
        .fold(-1.0, f64::max)
}

/// An upper bound on the covering radius of `centers` in `S^n` or `RP^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringCertificate {
    pub space: CoverSpace,
    pub n: usize,
    pub method: CoverMethod,
    pub count: usize,
    /// Certified radius: the closed form for the explicit polytopes, the
    /// sampled estimate for greedy sets.
    pub radius_bound: f64,
    pub centers: Vec<SpherePoint>,
}

/// Outcome of re-checking a certificate on fresh samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validation {
    pub samples: usize,
    pub measured_radius: f64,
    pub pass_rate: f64,
}

impl CoveringCertificate {
    fn build(space: CoverSpace, method: CoverMethod, radius_bound: f64, centers: Vec<SpherePoint>) -> Self {
        CoveringCertificate {
            space,
            n: centers[0].dim(),
            method,
            count: centers.len(),
            radius_bound,
            centers,
        }
    }

    /// 12 icosahedron vertices covering `S^2`.
    pub fn icosahedron() -> Self {
        Self::build(
            CoverSpace::Sphere,
            CoverMethod::Icosahedron,
            icosahedron_covering_radius(),
            icosahedron_vertices(),
        )
    }

    /// 120 vertices of the 600-cell covering `S^3`.
    pub fn cell600() -> Self {
        Self::build(
            CoverSpace::Sphere,
            CoverMethod::Cell600,
            cell600_covering_radius(),
            cell600_vertices(),
        )
    }

    /// The `n + 2` inscribed simplex vertices; the farthest points are the
    /// antipodes `-p_i`, at distance `pi - r_n`.
    pub fn simplex(n: usize) -> Result<Self> {
        let frame = inscribed_simplex(n)?;
        Ok(Self::build(
            CoverSpace::Sphere,
            CoverMethod::Simplex,
            PI - r_n(n)?,
            frame.vertices().to_vec(),
        ))
    }

    /// Greedy cover of `RP^n` by `k` points, radius measured on `samples`
    /// uniform points.
    pub fn greedy_projective(n: usize, k: usize, samples: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("greedy projective cover needs n >= 1"));
        }
        let net = greedy_symmetric_pairs(n, k, pool_size(n, 0.1).min(200_000), seed)?;
        let centers = net.representatives();
        let radius = covering_radius(&centers, CoverSpace::Projective, samples, subseed(seed, 3))?;
        Ok(Self::build(CoverSpace::Projective, CoverMethod::Greedy, radius, centers))
    }

    /// Any center set, radius measured by sampling.
    pub fn measured(
        centers: Vec<SpherePoint>,
        space: CoverSpace,
        method: CoverMethod,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let radius = covering_radius(&centers, space, samples, seed)?;
        Ok(Self::build(space, method, radius, centers))
    }

    /// Fraction of fresh samples within `radius_bound + slack` of a center.
    pub fn validate(&self, samples: usize, seed: u64, slack: f64) -> Result<Validation> {
        check_centers(&self.centers)?;
        let limit_ip = (self.radius_bound + slack).min(PI).cos();
        let (worst, ok) = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let p = sphere_sample(seed, self.n, i);
                let ip = nearest_ip(p.coords(), &self.centers, self.space);
                (ip, usize::from(ip >= limit_ip))
            })
            .reduce(|| (1.0, 0), |a, b| (a.0.min(b.0), a.1 + b.1));
        Ok(Validation {
            samples,
            measured_radius: worst.clamp(-1.0, 1.0).acos(),
            pass_rate: ok as f64 / samples.max(1) as f64,
        })
    }
}

/// Quotient of a centrally symmetric sphere certificate: one center per
/// antipodal class, same radius, since the nearest class representative
/// of a point realizes its projective distance.
pub fn projective_cover_bound(cert: &CoveringCertificate) -> Result<CoveringCertificate> {
    if cert.space != CoverSpace::Sphere {
        return Err(Error::invalid("expected a certificate on a sphere"));
    }
    let inv = crate::finite_metric::antipodal_pairing(&cert.centers)?;
    let centers: Vec<SpherePoint> = cert
        .centers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i < inv[i])
        .map(|(_, p)| p.clone())
        .collect();
    Ok(CoveringCertificate::build(
        CoverSpace::Projective,
        cert.method,
        cert.radius_bound,
        centers,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_metric::antipodal_pairing;
    use crate::sphere_geom::projective;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_sphere_net() {
        let net = symmetric_net(0, 0.01, 1).unwrap();
        assert_eq!(net.points(), &[SpherePoint::basis(0, 0), SpherePoint::basis(0, 0).antipode()]);
        assert!(symmetric_net(2, 0.0, 1).is_err());
        assert!(symmetric_net(2, -1.0, 1).is_err());
    }

    #[test]
    fn circle_net_covers_at_pi_over_three() {
        let net = symmetric_net(1, PI / 3.0, 5).unwrap();
        assert!(net.len() >= 4);
        let r = covering_radius(net.points(), CoverSpace::Sphere, 10_000, 77).unwrap();
        assert!(r < PI / 3.0);
        assert_eq!(antipodal_pairing(net.points()).unwrap(), net.involution());
    }

    #[test]
    fn nets_are_symmetric_and_cover() {
        for (n, eps) in [(2, 0.5), (2, 0.2), (3, 0.6)] {
            let net = symmetric_net(n, eps, 3).unwrap();
            for (i, p) in net.points().iter().enumerate() {
                assert_eq!(&net.points()[SymmetricNet::antipode_index(i)], &p.antipode());
            }
            let r = covering_radius(net.points(), CoverSpace::Sphere, 100_000, 1234).unwrap();
            assert!(r < eps, "n={n} eps={eps} measured {r}");
        }
    }

    #[test]
    fn covering_radius_is_monotone_in_centers() {
        let net = greedy_symmetric_pairs(2, 12, 20_000, 9).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..=12 {
            let r = covering_radius(&net.points()[..2 * k], CoverSpace::Sphere, 20_000, 4).unwrap();
            assert!(r <= last);
            last = r;
        }
    }

    #[test]
    fn simplex_radius_is_pi_minus_r_n() {
        for n in 1..=2 {
            let cert = CoveringCertificate::simplex(n).unwrap();
            let r = covering_radius(&cert.centers, CoverSpace::Sphere, 200_000, 8).unwrap();
            assert!(r <= cert.radius_bound + 1e-12);
            assert!(r >= cert.radius_bound - 0.03, "n={n}: {r} vs {}", cert.radius_bound);
        }
    }

    #[test]
    fn projective_quotients() {
        let ico = projective_cover_bound(&CoveringCertificate::icosahedron()).unwrap();
        assert_eq!(ico.count, 6);
        assert_eq!(ico.space, CoverSpace::Projective);
        assert!((ico.radius_bound - 0.652_358).abs() < 1e-5);
        let cell = projective_cover_bound(&CoveringCertificate::cell600()).unwrap();
        assert_eq!(cell.count, 60);
        assert!((cell.radius_bound - 0.388_140).abs() < 1e-5);
        assert!(projective_cover_bound(&CoveringCertificate::simplex(2).unwrap()).is_err());
    }

    #[test]
    fn one_point_cover_of_projective_line() {
        let e = SpherePoint::basis(1, 0);
        let sphere = CoveringCertificate::measured(
            vec![e.clone(), e.antipode()],
            CoverSpace::Sphere,
            CoverMethod::Grid,
            50_000,
            3,
        )
        .unwrap();
        let proj = projective_cover_bound(&sphere).unwrap();
        assert_eq!(proj.count, 1);
        // dense oracle straight from the quotient metric
        let oracle = (0..=20_000)
            .map(|k| {
                let t = PI * k as f64 / 20_000.0;
                projective(&[t.cos(), t.sin()], e.coords())
            })
            .fold(0.0, f64::max);
        assert!((oracle - FRAC_PI_2).abs() < 1e-12);
        assert!((proj.radius_bound - oracle).abs() < 1e-3);
        let direct = covering_radius(&proj.centers, CoverSpace::Projective, 50_000, 3).unwrap();
        assert!((direct - oracle).abs() < 1e-3);
    }

    #[test]
    fn projective_radius_never_exceeds_spherical() {
        for seed in 0..5 {
            let net = greedy_symmetric_pairs(2, 5 + seed as usize, 5000, seed).unwrap();
            let s = covering_radius(net.points(), CoverSpace::Sphere, 20_000, seed).unwrap();
            let p = covering_radius(&net.representatives(), CoverSpace::Projective, 20_000, seed).unwrap();
            assert!(p <= s + 1e-15);
        }
    }

    #[test]
    fn certificates_validate() {
        for cert in [
            CoveringCertificate::icosahedron(),
            CoveringCertificate::simplex(3).unwrap(),
            projective_cover_bound(&CoveringCertificate::cell600()).unwrap(),
            CoveringCertificate::greedy_projective(2, 7, 100_000, 11).unwrap(),
        ] {
            let v = cert.validate(100_000, 999, VALIDATION_SLACK).unwrap();
            assert_eq!(v.pass_rate, 1.0, "{:?} {:?}", cert.method, v);
        }
    }
}
