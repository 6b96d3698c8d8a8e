//! The hemisphere correspondence with distortion at most `2π/3`, lower
//! bounds on `c_{n,k}`, and the table of bounds on `2·d_GH(S^n, S^k)`.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{CoverSpace, CoveringCertificate};
use crate::error::{Error, Result};
use crate::odd_maps::euclidean_bounds;
use crate::sampling::hemisphere_sample;
use crate::sphere_geom::{geodesic, inscribed_simplex, r_n, t_n, tau_unchecked, SimplexFrame, SpherePoint};

/// Region of the closed upper hemisphere of `S^{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// Thickened equator, `d(p, N) > π/3`.
    E,
    /// Cone over facet cell `i` (0-based), `d(p, N) <= π/3`.
    Cone(usize),
}

/// `{(p, τ(p)) : p ∈ E} ∪ {(p, -p_i) : p ∈ C_i}` between the upper
/// hemisphere of `S^{n+1}` and `S^n`.
#[derive(Debug, Clone)]
pub struct HemisphereCorrespondence {
    n: usize,
    frame: SimplexFrame,
}

impl HemisphereCorrespondence {
    pub fn new(n: usize) -> Result<Self> {
        Ok(HemisphereCorrespondence {
            n,
            frame: inscribed_simplex(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frame(&self) -> &SimplexFrame {
        &self.frame
    }

    fn check(&self, p: &SpherePoint) -> Result<()> {
        if p.dim() != self.n + 1 {
            return Err(Error::DimensionMismatch(self.n + 1, p.dim()));
        }
        if p.coords()[self.n + 1] < 0.0 {
            return Err(Error::OutOfDomain("point lies in the open lower hemisphere".into()));
        }
        Ok(())
    }

    pub fn classify(&self, p: &SpherePoint) -> Result<Region> {
        self.check(p)?;
        Ok(self.classify_raw(p.coords()))
    }

    pub fn correspond(&self, p: &SpherePoint) -> Result<SpherePoint> {
        self.check(p)?;
        Ok(SpherePoint::from_unit(self.correspond_raw(p.coords())))
    }

    /// `d(p, N) > π/3` exactly when the last coordinate is below `1/2`.
    pub(crate) fn classify_raw(&self, p: &[f64]) -> Region {
        if p[self.n + 1] < 0.5 {
            return Region::E;
        }
        match tau_unchecked(p) {
            Some(t) => Region::Cone(self.frame.facet_of(t.coords())),
            None => Region::Cone(0),
        }
    }

    pub(crate) fn correspond_raw(&self, p: &[f64]) -> Vec<f64> {
        match self.classify_raw(p) {
            Region::E => tau_unchecked(p).expect("thickened equator avoids the pole").into_coords(),
            Region::Cone(i) => self.frame.vertex(i).antipode().into_coords(),
        }
    }
}

/// Sampled distortion of the hemisphere correspondence, split by the
/// regions of the two points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub n: usize,
    pub pairs: usize,
    pub seed: u64,
    pub max_distortion: f64,
    /// Both points in `E`.
    pub equator_equator: f64,
    /// Neither point in `E`.
    pub cone_cone: f64,
    /// One point in `E`, pair distance at most `π/2`.
    pub mixed_near: f64,
    /// One point in `E`, pair distance above `π/2`.
    pub mixed_far: f64,
    pub bound: f64,
}

impl DistortionReport {
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.max_distortion <= 2.0 * PI / 3.0 + tol
            && self.equator_equator <= PI / 3.0 + tol
            && self.cone_cone <= 2.0 * PI / 3.0 + tol
            && self.mixed_near <= 2.0 * PI / 3.0 + tol
            && self.mixed_far <= 2.0 * PI / 3.0 + tol
    }
}

/// Largest `|d(x, x') - d(y, y')|` over `pairs` uniform pairs from the upper
/// hemisphere of `S^{n+1}`.
pub fn verify_distortion(n: usize, pairs: usize, seed: u64) -> Result<DistortionReport> {
    if n < 1 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let corr = HemisphereCorrespondence::new(n)?;
    let cases = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let x = hemisphere_sample(seed, n + 1, 2 * i);
            let y = hemisphere_sample(seed, n + 1, 2 * i + 1);
            let (rx, ry) = (corr.classify_raw(x.coords()), corr.classify_raw(y.coords()));
            let d = geodesic(x.coords(), y.coords());
            let dis = (d - geodesic(&corr.correspond_raw(x.coords()), &corr.correspond_raw(y.coords()))).abs();
            let mut m = [0.0; 4];
            let case = match (rx, ry) {
                (Region::E, Region::E) => 0,
                (Region::Cone(_), Region::Cone(_)) => 1,
                _ if d <= PI / 2.0 => 2,
                _ => 3,
            };
            m[case] = dis;
            m
        })
        .reduce(|| [0.0; 4], |a, b| std::array::from_fn(|i| a[i].max(b[i])));
    Ok(DistortionReport {
        n,
        pairs,
        seed,
        max_distortion: cases.iter().copied().fold(0.0, f64::max),
        equator_equator: cases[0],
        cone_cone: cases[1],
        mixed_near: cases[2],
        mixed_far: cases[3],
        bound: 2.0 * PI / 3.0,
    })
}

/// Where a lower bound on `c_{n,k}` comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerFact {
    /// `c_{n,n} = 0`.
    Diagonal,
    /// `c_{0,k} = π`.
    ZeroSphere,
    /// `c_{1,2l} = c_{1,2l+1} = 2πl/(2l+1)`.
    Circle { l: usize },
    /// `c_{n,n+1} = c_{n,n+2} = r_n`.
    Adjacent,
    /// `c_{2,7} >= arccos(-1/√5)`.
    JoinObstruction,
    /// `c_{n,k} >= π - 2 cov_{RP^n}(m)` for a cover by `m <= k` points.
    Covering { method: String, points: usize, radius: f64 },
}

impl LowerFact {
    fn exact(&self) -> bool {
        !matches!(self, LowerFact::JoinObstruction | LowerFact::Covering { .. })
    }

    /// Short plain-text name.
    pub fn name(&self) -> String {
        match self {
            LowerFact::Diagonal => "diagonal".into(),
            LowerFact::ZeroSphere => "zero sphere".into(),
            LowerFact::Circle { .. } => "c_{1,2l} = c_{1,2l+1} theorem".into(),
            LowerFact::Adjacent => "c_{n,n+1} = c_{n,n+2} theorem".into(),
            LowerFact::JoinObstruction => "c_{2,7} join obstruction".into(),
            LowerFact::Covering { method, points, .. } => format!("projective covering ({method}, {points} points)"),
        }
    }
}

/// A lower bound on `c_{n,k}`, attained at cell `(from_n, from_k)` and
/// carried over by monotonicity when that cell differs from `(n, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub fact: LowerFact,
    pub from_n: usize,
    pub from_k: usize,
    /// `c_{n,k}` equals `value`.
    pub exact: bool,
}

impl LowerBound {
    pub fn provenance(&self, n: usize, k: usize) -> String {
        if (self.from_n, self.from_k) == (n, k) {
            self.fact.name()
        } else {
            format!("monotonicity from ({},{}): {}", self.from_n, self.from_k, self.fact.name())
        }
    }

    /// Symbolic form of the value, e.g. `4π/5` or `r_2`.
    pub fn symbol(&self) -> String {
        match &self.fact {
            LowerFact::Diagonal => "0".into(),
            LowerFact::ZeroSphere => "π".into(),
            LowerFact::Circle { l } => pi_fraction(2 * l, 2 * l + 1),
            LowerFact::Adjacent => format!("r_{}", self.from_n),
            LowerFact::JoinObstruction => "arccos(−1/√5)".into(),
            LowerFact::Covering { .. } => format!("{:.6}", self.value),
        }
    }
}

fn pi_fraction(num: usize, den: usize) -> String {
    match (num, den) {
        (0, _) => "0".into(),
        (1, 1) => "π".into(),
        (1, d) => format!("π/{d}"),
        (n, 1) => format!("{n}π"),
        (n, d) => format!("{n}π/{d}"),
    }
}

/// Facts stated directly for the cell `(n, k)`.
fn direct_facts(n: usize, k: usize, certs: &[CoveringCertificate]) -> Vec<(f64, LowerFact)> {
    let mut out = Vec::new();
    if n == k {
        out.push((0.0, LowerFact::Diagonal));
        return out;
    }
    if n == 0 {
        out.push((PI, LowerFact::ZeroSphere));
        return out;
    }
    if n == 1 {
        let l = k / 2;
        out.push((2.0 * PI * l as f64 / (2 * l + 1) as f64, LowerFact::Circle { l }));
    }
    if k == n + 1 || k == n + 2 {
        out.push((r_n(n).expect("n >= 1"), LowerFact::Adjacent));
    }
    if (n, k) == (2, 7) {
        out.push(((-1.0 / 5f64.sqrt()).acos(), LowerFact::JoinObstruction));
    }
    for c in certs {
        if c.space == CoverSpace::Projective && c.n == n && c.count == k {
            out.push((
                PI - 2.0 * c.radius_bound,
                LowerFact::Covering {
                    method: c.method.to_string(),
                    points: c.count,
                    radius: c.radius_bound,
                },
            ));
        }
    }
    out
}

/// Best lower bound on `c_{n,k}` from the known facts at every cell
/// `(n', k')` with `n' >= n`, `k' <= k`, using `c_{n,k} >= c_{n',k'}`.
pub fn c_lower(n: usize, k: usize, certs: &[CoveringCertificate]) -> Result<LowerBound> {
    if k < n {
        return Err(Error::invalid(format!("need k >= n, got n={n}, k={k}")));
    }
    // covers with m points also bound every k >= m
    let mut certs_at: Vec<CoveringCertificate> = Vec::new();
    for c in certs {
        if c.space == CoverSpace::Projective && c.n >= n && c.count <= k && c.count >= c.n {
            certs_at.push(c.clone());
        }
    }
    let mut best: Option<LowerBound> = None;
    let mut consider = |value: f64, fact: LowerFact, nn: usize, kk: usize| {
        let exact = (nn, kk) == (n, k) && fact.exact();
        let better = match &best {
            None => true,
            Some(b) => value > b.value || (value == b.value && exact && !b.exact),
        };
        if better {
            best = Some(LowerBound {
                value,
                fact,
                from_n: nn,
                from_k: kk,
                exact,
            });
        }
    };
    for (value, fact) in direct_facts(n, k, &certs_at) {
        consider(value, fact, n, k);
    }
    for nn in n..=k {
        for kk in nn..=k {
            if (nn, kk) == (n, k) {
                continue;
            }
            for (value, fact) in direct_facts(nn, kk, &certs_at) {
                consider(value, fact, nn, kk);
            }
        }
    }
    Ok(best.expect("the diagonal always contributes"))
}

/// Where an upper bound on `2·d_GH(S^n, S^k)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperFact {
    Diagonal,
    /// `2·d_GH <= π`, never attained.
    Trivial,
    /// Hemisphere correspondence, `k = n + 1`.
    SuperDiagonal,
    /// Earlier bound `t_n`, `k = n + 1`.
    SimplexCell,
    /// Known exact values for `n < k <= 3`.
    KnownExact,
}

impl UpperFact {
    pub fn name(&self) -> &'static str {
        match self {
            UpperFact::Diagonal => "diagonal",
            UpperFact::Trivial => "trivial bound π",
            UpperFact::SuperDiagonal => "hemisphere correspondence 2π/3",
            UpperFact::SimplexCell => "t_n bound",
            UpperFact::KnownExact => "known exact value",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMetric {
    Geodesic,
    Euclidean,
}

/// Bounds `[lower, upper]` on `2·d_GH(S^n, S^k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsCell {
    pub n: usize,
    pub k: usize,
    pub metric: TableMetric,
    pub lower: f64,
    pub upper: f64,
    /// The upper bound is strict (`2·d_GH < π` off the diagonal).
    pub upper_open: bool,
    pub lower_provenance: String,
    pub upper_provenance: String,
    pub lower_label: String,
    pub upper_label: String,
}

impl BoundsCell {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper && !self.upper_open
    }

    /// Table entry: a single value for exact cells, else an interval.
    pub fn label(&self) -> String {
        if self.is_exact() {
            self.lower_label.clone()
        } else {
            format!(
                "[{}, {}{}",
                self.lower_label,
                self.upper_label,
                if self.upper_open { ")" } else { "]" }
            )
        }
    }
}

fn upper_candidates(n: usize, k: usize) -> Vec<(f64, UpperFact, String)> {
    let mut out = vec![(PI, UpperFact::Trivial, "π".to_string())];
    if k == n + 1 && n >= 1 {
        out.push((2.0 * PI / 3.0, UpperFact::SuperDiagonal, "2π/3".into()));
        out.push((t_n(n).expect("n >= 1"), UpperFact::SimplexCell, format!("t_{n}")));
    }
    match (n, k) {
        (1, 2) | (1, 3) => out.push((2.0 * PI / 3.0, UpperFact::KnownExact, "2π/3".into())),
        (2, 3) => out.push((r_n(2).expect("n >= 1"), UpperFact::KnownExact, "r_2".into())),
        _ => {}
    }
    out
}

/// Geodesic bounds for the cell `(n, k)`.
pub fn gh_cell(n: usize, k: usize, certs: &[CoveringCertificate]) -> Result<BoundsCell> {
    if k < n {
        return Err(Error::invalid(format!("need k >= n, got n={n}, k={k}")));
    }
    if n == k {
        return Ok(BoundsCell {
            n,
            k,
            metric: TableMetric::Geodesic,
            lower: 0.0,
            upper: 0.0,
            upper_open: false,
            lower_provenance: UpperFact::Diagonal.name().into(),
            upper_provenance: UpperFact::Diagonal.name().into(),
            lower_label: "0".into(),
            upper_label: "0".into(),
        });
    }
    let lb = c_lower(n, k, certs)?;
    let (mut upper, mut ufact, mut ulabel) = (PI, UpperFact::Trivial, "π".to_string());
    for (v, f, l) in upper_candidates(n, k) {
        // earlier entries win ties, so the strict π stays only if nothing
        // matches it
        if v < upper || (v == upper && ufact == UpperFact::Trivial && f != UpperFact::Trivial) {
            upper = v;
            ufact = f;
            ulabel = l;
        }
    }
    let lower_label = if c_is_known(n, k) {
        lb.symbol()
    } else {
        format!("c_{{{n},{k}}}")
    };
    Ok(BoundsCell {
        n,
        k,
        metric: TableMetric::Geodesic,
        lower: lb.value,
        upper,
        upper_open: ufact == UpperFact::Trivial,
        lower_provenance: lb.provenance(n, k),
        upper_provenance: ufact.name().into(),
        lower_label,
        upper_label: ulabel,
    })
}

/// Cells where `c_{n,k}` has a closed form.
fn c_is_known(n: usize, k: usize) -> bool {
    n == k || n <= 1 || k <= n + 2
}

/// Chordal-metric bounds: `2 - 2cos(c/2) <= 2·d_GH <= 2`.
pub fn euclidean_cell(n: usize, k: usize, certs: &[CoveringCertificate]) -> Result<BoundsCell> {
    let g = gh_cell(n, k, certs)?;
    let lower = if n == k { 0.0 } else { euclidean_bounds(g.lower)?.1 };
    let upper = if n == k { 0.0 } else { 2.0 };
    Ok(BoundsCell {
        n,
        k,
        metric: TableMetric::Euclidean,
        lower,
        upper,
        upper_open: false,
        lower_provenance: format!("2 - 2cos(c/2), c from {}", g.lower_provenance),
        upper_provenance: if n == k { "diagonal" } else { "chordal diameter" }.into(),
        lower_label: format!("{lower:.6}"),
        upper_label: format!("{upper}"),
    })
}

/// The analytic projective covers: icosahedron for `RP^2`, 600-cell for
/// `RP^3`.
pub fn default_certificates() -> Vec<CoveringCertificate> {
    [CoveringCertificate::icosahedron(), CoveringCertificate::cell600()]
        .iter()
        .map(|c| crate::covering::projective_cover_bound(c).expect("polytope vertex sets are symmetric"))
        .collect()
}

/// Upper-triangular table for `1 <= n <= max_n`, `n <= k <= max_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsTable {
    pub max_n: usize,
    pub max_k: usize,
    pub metric: TableMetric,
    pub cells: Vec<BoundsCell>,
}

pub fn bounds_table(max_n: usize, max_k: usize, metric: TableMetric, certs: &[CoveringCertificate]) -> Result<BoundsTable> {
    let pairs: Vec<(usize, usize)> = (1..=max_n).flat_map(|n| (n..=max_k).map(move |k| (n, k))).collect();
    let cells = pairs
        .par_iter()
        .map(|&(n, k)| match metric {
            TableMetric::Geodesic => gh_cell(n, k, certs),
            TableMetric::Euclidean => euclidean_cell(n, k, certs),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundsTable {
        max_n,
        max_k,
        metric,
        cells,
    })
}

impl BoundsTable {
    pub fn cell(&self, n: usize, k: usize) -> Option<&BoundsCell> {
        self.cells.iter().find(|c| c.n == n && c.k == k)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| n \\ k |");
        for k in 1..=self.max_k {
            s += &format!(" {k} |");
        }
        s += "\n|---|";
        s += &"---|".repeat(self.max_k);
        s += "\n";
        for n in 1..=self.max_n {
            s += &format!("| {n} |");
            for k in 1..=self.max_k {
                match self.cell(n, k) {
                    Some(c) => s += &format!(" {} |", c.label()),
                    None => s += "  |",
                }
            }
            s += "\n";
        }
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::invalid(e.to_string());
        w.write_record([
            "n",
            "k",
            "metric",
            "lower",
            "upper",
            "upper_open",
            "label",
            "lower_provenance",
            "upper_provenance",
        ])
        .map_err(io)?;
        for c in &self.cells {
            w.write_record([
                c.n.to_string(),
                c.k.to_string(),
                format!("{:?}", c.metric).to_lowercase(),
                fmt_sig(c.lower),
                fmt_sig(c.upper),
                c.upper_open.to_string(),
                c.label(),
                c.lower_provenance.clone(),
                c.upper_provenance.clone(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt_sig(x: f64) -> String {
    round_sig(x).to_string()
}

impl fmt::Display for BoundsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_markdown())
    }
}
