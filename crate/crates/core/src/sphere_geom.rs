//! Points on `S^n` and `RP^n`, their metrics, closed-form constants and the
//! explicit point configurations (inscribed simplex, icosahedron, 600-cell).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// A unit vector in `R^{n+1}`, i.e. a point of `S^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Normalizes `coords` onto the unit sphere.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a sphere point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(SpherePoint {
            coords: coords.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// Wraps coordinates that are already unit length.
    pub fn from_unit(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        SpherePoint { coords }
    }

    /// The standard basis vector `e_axis` of `S^dim`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        assert!(axis <= dim, "axis {axis} outside R^{}", dim + 1);
        let mut c = vec![0.0; dim + 1];
        c[axis] = 1.0;
        SpherePoint { coords: c }
    }

    /// Sphere dimension `n` (the ambient space is `R^{n+1}`).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn antipode(&self) -> Self {
        SpherePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn inner(&self, other: &SpherePoint) -> Result<f64> {
        check_dims(self, other)?;
        Ok(dot(&self.coords, &other.coords))
    }

    /// Geodesic distance on `S^n`.
    pub fn distance(&self, other: &SpherePoint) -> Result<f64> {
        geodesic_distance(self, other)
    }
}

fn check_dims(x: &SpherePoint, y: &SpherePoint) -> Result<()> {
    if x.dim() != y.dim() {
        Err(Error::DimensionMismatch(x.dim(), y.dim()))
    } else {
        Ok(())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unchecked geodesic distance between unit vectors given as slices.
///
/// `acos` loses about half the digits near `±1`, so nearly equal and nearly
/// antipodal pairs go through the half-chord instead.
#[inline]
pub fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    let ip = dot(a, b);
    if ip.abs() <= 0.5 {
        ip.acos()
    } else if ip > 0.0 {
        2.0 * (0.5 * chord(a, b)).min(1.0).asin()
    } else {
        let sum = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>().sqrt();
        PI - 2.0 * (0.5 * sum).min(1.0).asin()
    }
}

/// Unchecked Euclidean (chord) distance between slices.
#[inline]
pub fn chord(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Unchecked projective distance between representatives.
#[inline]
pub fn projective(a: &[f64], b: &[f64]) -> f64 {
    let d = geodesic(a, b);
    d.min(PI - d)
}

/// Chord length subtending a geodesic arc of length `d`.
pub fn chord_from_geodesic(d: f64) -> f64 {
    2.0 * (d / 2.0).sin()
}

pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_dims(x, y)?;
    Ok(geodesic(&x.coords, &y.coords))
}

pub fn euclidean_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_dims(x, y)?;
    Ok(chord(&x.coords, &y.coords))
}

/// Point of `RP^n`, stored by the representative whose first nonzero
/// coordinate is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    representative: SpherePoint,
}

impl ProjectivePoint {
    pub fn new(x: SpherePoint) -> Self {
        let flip = x
            .coords
            .iter()
            .find(|c| **c != 0.0)
            .is_some_and(|c| *c < 0.0);
        let representative = if flip { x.antipode() } else { x };
        ProjectivePoint { representative }
    }

    pub fn representative(&self) -> &SpherePoint {
        &self.representative
    }

    pub fn dim(&self) -> usize {
        self.representative.dim()
    }
}

/// Quotient metric `min(d(x, x'), d(x, -x'))`, always in `[0, pi/2]`.
pub fn projective_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<f64> {
    check_dims(&p.representative, &q.representative)?;
    Ok(projective(
        &p.representative.coords,
        &q.representative.coords,
    ))
}

/// Edge length `arccos(-1/(n+1))` of the regular `(n+1)`-simplex inscribed
/// in `S^n`.
pub fn r_n(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("r_n needs n >= 1"));
    }
    if n == 1 {
        // same double as the other 2π/3 entries
        return Ok(2.0 * PI / 3.0);
    }
    Ok((-1.0 / (n as f64 + 1.0)).acos())
}

/// Diameter of a radially projected facet of the inscribed simplex
/// (Santalo's formula).
pub fn t_n(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("t_n needs n >= 1"));
    }
    if n == 1 {
        return r_n(1);
    }
    let nf = n as f64;
    Ok(if n % 2 == 1 {
        (-(nf + 1.0) / (nf + 3.0)).acos()
    } else {
        (-(nf / (nf + 4.0)).sqrt()).acos()
    })
}

/// Covering radius of the icosahedron's vertex set on `S^2` (vertex to face
/// center).
pub fn icosahedron_covering_radius() -> f64 {
    ((5.0 + 2.0 * 5f64.sqrt()) / 15.0).sqrt().acos()
}

/// Covering radius of the 600-cell's vertex set on `S^3` (vertex to cell
/// center).
pub fn cell600_covering_radius() -> f64 {
    (PHI * PHI / (2.0 * 2f64.sqrt())).acos()
}

/// Vertices `p_1, ..., p_{n+2}` of a regular simplex inscribed in `S^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexFrame {
    n: usize,
    vertices: Vec<SpherePoint>,
}

impl SimplexFrame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[SpherePoint] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &SpherePoint {
        &self.vertices[i]
    }

    /// Index `i` (0-based) of the facet `F_i` opposite `p_i` whose cone
    /// contains `u`: the vertex with the smallest inner product, smallest
    /// index on ties.
    pub fn facet_membership(&self, u: &SpherePoint) -> Result<usize> {
        if u.dim() != self.n {
            return Err(Error::DimensionMismatch(u.dim(), self.n));
        }
        Ok(self.facet_of(u.coords()))
    }

    pub(crate) fn facet_of(&self, u: &[f64]) -> usize {
        let mut best = 0;
        let mut best_ip = f64::INFINITY;
        for (i, p) in self.vertices.iter().enumerate() {
            let ip = dot(u, &p.coords);
            if ip < best_ip {
                best_ip = ip;
                best = i;
            }
        }
        best
    }
}

/// Builds the inscribed regular simplex recursively: `p_1` is the last basis
/// vector and the other `n+1` vertices sit at height `-1/(n+1)` over a
/// scaled copy of the simplex in `S^{n-1}`.
pub fn inscribed_simplex(n: usize) -> Result<SimplexFrame> {
    if n < 1 {
        return Err(Error::invalid("inscribed simplex needs n >= 1"));
    }
    let vertices: Vec<SpherePoint> = simplex_coords(n)
        .into_iter()
        .map(SpherePoint::from_unit)
        .collect();

    let target = -1.0 / (n as f64 + 1.0);
    for (i, a) in vertices.iter().enumerate() {
        for (j, b) in vertices.iter().enumerate() {
            let want = if i == j { 1.0 } else { target };
            let got = dot(&a.coords, &b.coords);
            if (got - want).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "simplex Gram check failed at ({i},{j}): {got} != {want}"
                )));
            }
        }
    }
    Ok(SimplexFrame { n, vertices })
}

fn simplex_coords(n: usize) -> Vec<Vec<f64>> {
    if n == 0 {
        return vec![vec![-1.0], vec![1.0]];
    }
    let h = -1.0 / (n as f64 + 1.0);
    let s = (1.0 - h * h).sqrt();
    let mut apex = vec![0.0; n + 1];
    apex[n] = 1.0;
    let mut out = vec![apex];
    for mut v in simplex_coords(n - 1) {
        for c in v.iter_mut() {
            *c *= s;
        }
        v.push(h);
        out.push(v);
    }
    out
}

/// The 12 vertices `(0, ±1, ±phi)`, `(±1, ±phi, 0)`, `(±phi, 0, ±1)`,
/// normalized.
pub fn icosahedron_vertices() -> Vec<SpherePoint> {
    let scale = 1.0 / (1.0 + PHI * PHI).sqrt();
    let mut out = Vec::with_capacity(12);
    for &a in &[1.0, -1.0] {
        for &b in &[PHI, -PHI] {
            out.push(vec![0.0, a, b]);
            out.push(vec![a, b, 0.0]);
            out.push(vec![b, 0.0, a]);
        }
    }
    out.into_iter()
        .map(|v| SpherePoint::from_unit(v.into_iter().map(|c| c * scale).collect()))
        .collect()
}

/// The 120 vertices of the 600-cell: the 8 permutations of `(0,0,0,±1)`, the
/// 16 points `(±1/2, ±1/2, ±1/2, ±1/2)`, and the 96 even permutations of
/// `(±phi/2, ±1/2, ±phi^{-1}/2, 0)`.
pub fn cell600_vertices() -> Vec<SpherePoint> {
    let mut out = Vec::with_capacity(120);
    for axis in 0..4 {
        for &s in &[1.0, -1.0] {
            let mut v = vec![0.0; 4];
            v[axis] = s;
            out.push(v);
        }
    }
    for mask in 0..16u32 {
        out.push(
            (0..4)
                .map(|b| if mask >> b & 1 == 1 { -0.5 } else { 0.5 })
                .collect(),
        );
    }
    let base = [PHI / 2.0, 0.5, 1.0 / (2.0 * PHI), 0.0];
    for perm in even_permutations4() {
        for mask in 0..8u32 {
            let signed = [
                if mask & 1 == 1 { -base[0] } else { base[0] },
                if mask & 2 == 2 { -base[1] } else { base[1] },
                if mask & 4 == 4 { -base[2] } else { base[2] },
                0.0,
            ];
            let mut v = vec![0.0; 4];
            for (src, &dst) in perm.iter().enumerate() {
                v[dst] = signed[src];
            }
            out.push(v);
        }
    }
    out.into_iter().map(SpherePoint::from_unit).collect()
}

fn even_permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if !distinct {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .filter(|&(i, j)| p[i] > p[j])
                        .count();
                    if inversions % 2 == 0 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Nearest point of the equator `S^n` to `x` in the closed upper hemisphere
/// of `S^{n+1}`: drop the last coordinate and renormalize.
pub fn tau(x: &SpherePoint) -> Result<SpherePoint> {
    let n1 = x.dim();
    if n1 == 0 {
        return Err(Error::invalid("tau needs a point of S^{n+1} with n >= 0"));
    }
    let last = x.coords[n1];
    if last < 0.0 {
        return Err(Error::OutOfDomain("point lies in the open lower hemisphere".into()));
    }
    tau_unchecked(&x.coords).ok_or_else(|| Error::OutOfDomain("tau is undefined at the north pole".into()))
}

/// `tau` on raw coordinates, ignoring the hemisphere condition. Returns
/// `None` at the poles.
pub(crate) fn tau_unchecked(x: &[f64]) -> Option<SpherePoint> {
    let head = &x[..x.len() - 1];
    let norm = head.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    Some(SpherePoint::from_unit(head.iter().map(|c| c / norm).collect()))
}

/// Embeds a point of `S^n` as a point of the equator of `S^{n+1}`.
pub fn equatorial_inclusion(x: &SpherePoint) -> SpherePoint {
    let mut c = x.coords.clone();
    c.push(0.0);
    SpherePoint::from_unit(c)
}

/// North pole of `S^dim`.
pub fn north_pole(dim: usize) -> SpherePoint {
    SpherePoint::basis(dim, dim)
}
