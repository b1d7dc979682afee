//! Self-covering certification.
//!
//! Given a concrete entire function `f` and a multiplicity target `N`, this
//! module walks an increasing radius schedule and tries to certify a bounded
//! open set `V` with `V ⊂ f(V)` such that every point of `V` has at least
//! `N` preimages in `V`. A successful search returns a
//! [`CoveringCertificate`] whose evidence is a verified grid of preimage
//! counts plus the measured boundary data that selected the branch.
//!
//! The search at one radius `R` proceeds through:
//!
//! 1. a direct gap probe (families whose modulus can dominate every
//!    sub-level set): if `|f| ≥ 3R` on the whole circle `|z| = R`, a disk
//!    certificate is attempted immediately via [`case2a_certificate`];
//! 2. growth-exponent selection: the smallest `j` with
//!    `R^{j/2} > k(d)^N` and `max |f| > R^j` on `|z| = R`;
//! 3. witness search ([`find_witnesses`]) and the growth hypothesis check
//!    ([`check_dichotomy_hypotheses`]);
//! 4. the covering dichotomy ([`run_dichotomy`]): either every annulus
//!    point is hit from the working sector, or a candidate omitted point
//!    `α` is isolated and verified;
//! 5. the matching branch: [`case1_search`] around the omitted point, or
//!    the sub-level analysis ([`sublevel_components`]) followed by
//!    [`case2a_certificate`] (a circle clear of the sub-level set) or
//!    [`case2b_certificate`] (annulus self-covering, with a slit-domain
//!    fallback for deficient targets).
//!
//! All grid verification is honest sampled evidence: counts come from
//! certified winding numbers, not from heuristics, but the grids are finite
//! and the certificate records its resolution.

use crate::cjson;
use crate::function_model::{self, FunctionError, FunctionSpec};
use crate::hyperbolic::{self, HyperbolicError};
use crate::plane_domains::builders::{
    build_annular_sector_with_hole, build_annulus_with_hole, build_ar, build_case1_domain,
    build_case2_domain, build_disk, build_dr, dr_geometry,
};
use crate::plane_domains::{wrap_angle, DomainError, PlanarDomain};
use crate::solver::{self, Rect, SolveParams, SolverError};
use crate::winding::{
    count_preimages, covering_report, rouche_transfer, CoveringGridReport, PreparedBoundary,
    RoucheCertificate, WindingError,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Angular margin (radians) kept between a selected circle witness and the
/// sides of the core sector; `sin(0.11) > 1/10`, so the witness stays at
/// least `R/10` from the sector boundary.
const CORE_ANGULAR_MARGIN: f64 = 0.11;
/// Half-opening of the core witness sector.
const CORE_HALF_ANGLE: f64 = 2.0 * PI / 3.0;
/// Relative factor by which a gap circle's modulus floor must clear the
/// sub-level threshold `2R`.
const GAP_CLEARANCE_FACTOR: f64 = 1.25;
/// Ratio defining a "near maximal" modulus sample (`|f| ≥ 0.9 · max`).
const NEAR_MAX_FACTOR: f64 = 0.9;
/// Largest number of under-covered grid points kept in diagnostics.
const FAILING_KEPT: usize = 32;
/// One-sided cells of the non-recurrence raster (grid is `(2c+1)²`).
const RECURRENCE_CELLS: i32 = 6;

/// Tunable knobs of the certification search. Every resolution is
/// expressed relative to the current radius so the search is
/// scale-covariant except for the fixed sector insets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineParams {
    /// Working hyperbolic-diameter parameter `d` fed into the growth
    /// constant `k(d) = e^{5 e^d}`.
    pub working_d: f64,
    /// First radius of the geometric schedule.
    pub r_start: f64,
    /// Ratio between consecutive schedule radii.
    pub r_factor: f64,
    /// Number of schedule steps before reporting exhaustion.
    pub r_steps: usize,
    /// The omission scan over the reference annulus uses grid step
    /// `R / dichotomy_grid_div`.
    pub dichotomy_grid_div: f64,
    /// Covering reports use grid step `R / report_grid_div`.
    pub report_grid_div: f64,
    /// Sub-level rasters use grid step `R / sublevel_grid_div`
    /// (`sublevel_grid_div ≥ 200`).
    pub sublevel_grid_div: f64,
    /// Number of radii scanned for circles clear of the sub-level set and
    /// for relocated maximum-modulus witnesses.
    pub radius_scan: usize,
    /// Angular samples used by circle scans.
    pub n_angular: usize,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            working_d: 0.1,
            r_start: 64.0,
            r_factor: 2.0,
            r_steps: 20,
            dichotomy_grid_div: 8.0,
            report_grid_div: 16.0,
            sublevel_grid_div: 200.0,
            radius_scan: 64,
            n_angular: 4096,
        }
    }
}

/// Which branch of the certification produced the set `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// Omitted-point branch: `V` avoids a verified omitted value.
    I,
    /// Gap-circle branch: `V` is a disk whose boundary modulus clears the
    /// sub-level threshold.
    IIa,
    /// Annulus branch: `V` is the reference annulus or a slit connector
    /// domain inside it.
    IIb,
}

/// Measured extreme-modulus boundary data backing a branch decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    /// Sample with small image modulus (`m`).
    #[serde(with = "cjson::c")]
    pub w_small: Complex64,
    /// Sample with large image modulus (`M`).
    #[serde(with = "cjson::c")]
    pub w_large: Complex64,
    /// `|f(w_small)|`.
    pub small_modulus: f64,
    /// `|f(w_large)|`, saturated at `e^690` to stay representable.
    pub large_modulus: f64,
    /// `ln |f(w_large)|`, exact even when the plain value saturates.
    pub ln_large_modulus: f64,
    /// Whether a second near-maximal sample at distance ≥ `R/10` from the
    /// first (and from the core-sector boundary) was found. `false` also
    /// when the goal was not evaluated on this branch.
    pub separation_goal_met: bool,
}

/// Result of the circle witness search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WitnessSearch {
    /// Both witnesses found and a sector direction `theta` placing them in
    /// the core sector with margin.
    Found { witnesses: Witnesses, theta: f64 },
    /// No admissible pair exists at this radius; the caller advances the
    /// schedule.
    NotFound { reason: String },
}

/// Log-space slack of the three growth inequalities gating the dichotomy
/// scan. Each gap must be strictly positive for the scan to be meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    /// All three gaps are positive.
    pub holds: bool,
    /// `ln|M − 2R| − N·ln k(d) − ln(4R)`.
    pub peak_gap: f64,
    /// `−(j/2)·ln R − (e^d·ln(m + 2R) − ln|M − 2R|)/(e^d − 1)`.
    pub contraction_gap: f64,
    /// `(j/2)·ln R − N·ln k(d)`.
    pub exponent_gap: f64,
}

/// Check the growth inequalities that make the covering dichotomy
/// applicable at radius `R` with exponent `j`, multiplicity `n` and
/// diameter parameter `d`, given the measured small and large boundary
/// moduli `m < M`. Comparisons run in log space, so saturated `M` values
/// are handled correctly.
pub fn check_dichotomy_hypotheses(
    m_small: f64,
    m_large: f64,
    r: f64,
    j: u32,
    n: u32,
    d: f64,
) -> HypothesisCheck {
    assert!(
        m_small >= 0.0 && m_large > m_small,
        "moduli must satisfy 0 ≤ m < M"
    );
    assert!(
        r > 1.0 && j >= 1 && n >= 1 && d > 0.0,
        "need r > 1, j ≥ 1, n ≥ 1 and d > 0"
    );
    let ln_k = hyperbolic::ln_k_constant(d);
    let ln_mm = (m_large - 2.0 * r).abs().ln();
    let peak_gap = ln_mm - n as f64 * ln_k - (4.0 * r).ln();
    let ed = d.exp();
    let ln_lower = (ed * (m_small + 2.0 * r).ln() - ln_mm) / (ed - 1.0);
    let contraction_gap = -(j as f64 / 2.0) * r.ln() - ln_lower;
    let exponent_gap = (j as f64 / 2.0) * r.ln() - n as f64 * ln_k;
    HypothesisCheck {
        holds: peak_gap > 0.0 && contraction_gap > 0.0 && exponent_gap > 0.0,
        peak_gap,
        contraction_gap,
        exponent_gap,
    }
}

/// Outcome of the omission scan at one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyOutcome {
    pub r: f64,
    pub theta: f64,
    pub j: u32,
    pub variant: DichotomyVariant,
}

/// The two possible verdicts of the omission scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum DichotomyVariant {
    /// Every scanned annulus target has at least one preimage in the
    /// working sector.
    CoversFully,
    /// A target with zero preimages in the sector was found and verified
    /// at two boundary resolutions, and the annulus minus a small disk
    /// around it is covered at least `verified_n` times.
    OmitsAlpha {
        #[serde(with = "cjson::c")]
        alpha: Complex64,
        verified_n: u32,
        /// Radius `R^{−j/2}` of the excluded disk around `alpha`.
        excluded_radius: f64,
    },
}

/// One connected raster component of the sub-level set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelComponent {
    /// Grid cells of the component, in deterministic scan order.
    #[serde(with = "cjson::vec_c")]
    pub members: Vec<Complex64>,
    /// Euclidean diameter of the member set.
    pub diameter: f64,
    /// Smallest member modulus.
    pub min_modulus: f64,
    /// Largest member modulus.
    pub max_modulus: f64,
}

/// Whether a scanned circle radius meets the rasterized sub-level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusFlag {
    pub radius: f64,
    pub meets_sublevel: bool,
}

/// Rasterization of `W = A_R ∩ {|f| < 2R}` with its connected components
/// and a radius scan saying which circles `|z| = r` meet `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelSet {
    pub r: f64,
    /// Modulus threshold, always `2R`.
    pub threshold: f64,
    pub grid_step: f64,
    /// Components in deterministic scan order (4-neighbor adjacency).
    pub components: Vec<SublevelComponent>,
    /// Scan of circles between `R/2` and `2R`.
    pub radius_scan: Vec<RadiusFlag>,
}

impl SublevelSet {
    /// Scanned radii whose circle stays clear of every component (with the
    /// raster's half-cell padding).
    pub fn gap_radii(&self) -> Vec<f64> {
        self.radius_scan
            .iter()
            .filter(|f| !f.meets_sublevel)
            .map(|f| f.radius)
            .collect()
    }
}

/// A certified self-covering set with its grid evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    /// The certified set `V`.
    pub v: PlanarDomain,
    /// Verified covering multiplicity.
    pub n: u32,
    pub case_tag: CaseTag,
    /// Measured boundary moduli backing the branch decision.
    pub witnesses: Witnesses,
    /// The verified grid of preimage counts over `V` (or over a superset
    /// of `V` on the slit-domain branch).
    pub grid_report: CoveringGridReport,
    /// Grid points of `V` whose membership in `f(V)` (with multiplicity
    /// `≥ n`) was verified.
    #[serde(with = "cjson::vec_c")]
    pub self_inclusion_evidence: Vec<Complex64>,
    /// Schedule radius at which the certificate was produced.
    pub radius_r: f64,
    /// Sector direction used by the search; `0` on branches that involve
    /// no sector.
    pub theta: f64,
    /// Growth exponent used by the search; `0` on the direct gap-probe
    /// branch, which selects none.
    pub j: u32,
    /// Radius of a disk about the origin containing `V` (boundedness).
    pub enclosing_radius: f64,
    /// Boundary-modulus transfer certificate, present on the gap-circle
    /// branch.
    pub transfer: Option<RoucheCertificate>,
}

/// One schedule step of the search trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    pub r: f64,
    /// Why this radius did not produce a certificate.
    pub decision: String,
}

/// Result of the omitted-point branch.
#[derive(Debug)]
pub enum Case1Outcome {
    Certificate(Box<CoveringCertificate>),
    /// The excluded disk of the witness-relocation argument does not fit
    /// inside the working sector; the caller may retry once with a widened
    /// sector via [`case1_search_widened`].
    Escalate,
}

#[derive(Debug, Error)]
pub enum EngineError {
    /// A zero-count candidate exists but the required covering could not
    /// be verified at the budgeted resolution. `failing` keeps at most
    /// [`FAILING_KEPT`] under-covered grid targets.
    #[error(
        "inconclusive: candidate omitted point ({}, {}) found but {needed}-fold verification left {} grid target(s) under-covered",
        alpha.re, alpha.im, failing.len()
    )]
    Inconclusive {
        alpha: Complex64,
        needed: u32,
        failing: Vec<Complex64>,
    },
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("not enough preimages: {0}")]
    NotEnoughPreimages(String),
    /// The whole schedule was walked without producing a certificate; the
    /// trace records one decision per step.
    #[error("radius schedule exhausted after {} step(s) without a certificate", trace.len())]
    BudgetExhausted { trace: Vec<StepTrace> },
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Winding(#[from] WindingError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `exp(x)` saturated at `e^690` so results stay JSON-representable.
fn saturated_exp(x: f64) -> f64 {
    x.min(690.0).exp()
}

/// Radius of the smallest origin-centered disk containing every outline
/// vertex of `v`.
fn enclosing_radius(v: &PlanarDomain) -> f64 {
    v.outline()
        .iter()
        .flat_map(|c| c.points.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Grid targets verified to have at least `n` preimages.
fn evidence_of(report: &CoveringGridReport, n: u32) -> Vec<Complex64> {
    report
        .points
        .iter()
        .filter(|p| p.count >= n)
        .map(|p| p.w)
        .collect()
}

/// Uniform circle samples of `ln |f|` on `|z| = r`.
struct CircleSamples {
    phis: Vec<f64>,
    zs: Vec<Complex64>,
    lns: Vec<f64>,
}

fn sample_circle(
    spec: &FunctionSpec,
    r: f64,
    n_angular: usize,
) -> Result<CircleSamples, FunctionError> {
    let n = n_angular.max(64);
    let mut phis = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    let mut lns = Vec::with_capacity(n);
    for i in 0..n {
        let phi = 2.0 * PI * i as f64 / n as f64;
        let z = Complex64::from_polar(r, phi);
        let s = spec.eval_log(z)?;
        phis.push(phi);
        zs.push(z);
        lns.push(s.ln_mod);
    }
    Ok(CircleSamples { phis, zs, lns })
}

/// Search the circle `|z| = R` for a large-modulus witness (`|f| > R^j`)
/// and a small-modulus witness (`|f| < 3R`), and a sector direction
/// `theta` placing both inside the core sector with at least `R/10`
/// clearance from its boundary. Among admissible small candidates the one
/// of smallest modulus is chosen; `theta` is the angular midpoint of the
/// short arc between the two witnesses. Also records whether a second
/// near-maximal sample at distance ≥ `R/10` exists inside the core sector
/// (found experimentally rather than assumed).
pub fn find_witnesses(
    spec: &FunctionSpec,
    r: f64,
    j: u32,
    params: &EngineParams,
) -> Result<WitnessSearch, FunctionError> {
    assert!(r > 1.0, "witness search needs r > 1");
    let samples = sample_circle(spec, r, params.n_angular)?;
    let n = samples.phis.len();
    let mut i_max = 0usize;
    for i in 1..n {
        if samples.lns[i] > samples.lns[i_max] {
            i_max = i;
        }
    }
    let ln_max = samples.lns[i_max];
    if !(ln_max > j as f64 * r.ln()) {
        return Ok(WitnessSearch::NotFound {
            reason: format!(
                "no circle sample reaches the required power: max ln|f| = {ln_max:.3} \
                 on |z| = {r} is below {j}·ln R = {:.3}",
                j as f64 * r.ln()
            ),
        });
    }
    let phi_max = samples.phis[i_max];
    let ln_small_cap = (3.0 * r).ln();
    let max_gap = 2.0 * (CORE_HALF_ANGLE - CORE_ANGULAR_MARGIN);
    let mut small: Option<usize> = None;
    for i in 0..n {
        if samples.lns[i] < ln_small_cap && wrap_angle(samples.phis[i] - phi_max).abs() <= max_gap {
            let better = match small {
                None => true,
                Some(s) => samples.lns[i] < samples.lns[s],
            };
            if better {
                small = Some(i);
            }
        }
    }
    let Some(i_min) = small else {
        let any_small = samples.lns.iter().any(|&l| l < ln_small_cap);
        return Ok(WitnessSearch::NotFound {
            reason: if any_small {
                "small- and large-modulus samples sit too far apart for one core sector".into()
            } else {
                format!("|f| never falls below 3R on |z| = {r}")
            },
        });
    };
    let phi_min = samples.phis[i_min];
    let gap = wrap_angle(phi_min - phi_max);
    let theta = if (gap.abs() - PI).abs() < 1e-9 {
        wrap_angle(phi_max + 0.5 * PI)
    } else {
        wrap_angle(phi_max + 0.5 * gap)
    };
    let sep_needed = r / 10.0;
    let ln_near = ln_max + NEAR_MAX_FACTOR.ln();
    let z_max = samples.zs[i_max];
    let separation_goal_met = (0..n).any(|i| {
        samples.lns[i] >= ln_near
            && (samples.zs[i] - z_max).norm() >= sep_needed
            && wrap_angle(samples.phis[i] - theta).abs() <= CORE_HALF_ANGLE - CORE_ANGULAR_MARGIN
    });
    let witnesses = Witnesses {
        w_small: samples.zs[i_min],
        w_large: z_max,
        small_modulus: saturated_exp(samples.lns[i_min]),
        large_modulus: saturated_exp(ln_max),
        ln_large_modulus: ln_max,
        separation_goal_met,
    };
    Ok(WitnessSearch::Found { witnesses, theta })
}

/// Scan the reference annulus `A_R` for targets with zero preimages in the
/// working sector `D_R`. With none, the sector covers the annulus fully.
/// Otherwise the zero-count grid point with smallest modulus (ties broken
/// by smallest angle) becomes the omitted-point candidate: its count is
/// re-verified with a twice-refined boundary, and the annulus minus the
/// excluded disk `Δ(α, R^{−j/2})` must be covered at least `n` times from
/// the sector, or the scan reports [`EngineError::Inconclusive`].
///
/// Panics when called with a failed [`HypothesisCheck`]; the growth
/// hypotheses must be verified first.
pub fn run_dichotomy(
    spec: &FunctionSpec,
    r: f64,
    theta: f64,
    j: u32,
    n: u32,
    hypotheses: &HypothesisCheck,
    params: &EngineParams,
) -> Result<DichotomyOutcome, EngineError> {
    assert!(
        hypotheses.holds,
        "growth hypotheses must hold before the dichotomy scan"
    );
    let d_r = build_dr(r, theta);
    let a_r = build_ar(r);
    let scan = covering_report(spec, &d_r, &a_r, r / params.dichotomy_grid_div, 1)?;
    let outcome = |variant| DichotomyOutcome {
        r,
        theta,
        j,
        variant,
    };
    if scan.failing.is_empty() {
        return Ok(outcome(DichotomyVariant::CoversFully));
    }
    let mut cands: Vec<Complex64> = scan
        .points
        .iter()
        .filter(|p| p.count == 0)
        .map(|p| p.w)
        .collect();
    cands.sort_by(|a, b| {
        (a.norm(), a.arg())
            .partial_cmp(&(b.norm(), b.arg()))
            .expect("finite grid coordinates")
    });
    let fine = PreparedBoundary::with_max_edge(spec, &d_r, d_r.scale() / 128.0)?;
    let mut alpha = None;
    for &c in &cands {
        if fine.count(c).map(|pc| pc.count == 0).unwrap_or(false) {
            alpha = Some(c);
            break;
        }
    }
    let Some(alpha) = alpha else {
        // Every coarse candidate was withdrawn by the refined boundary
        // (grazing artifacts); treat the sector as covering.
        return Ok(outcome(DichotomyVariant::CoversFully));
    };
    let rex = r.powf(-(j as f64) / 2.0);
    let target = build_annulus_with_hole(r / 2.0, 2.0 * r, alpha, rex, "A_R-minus-alpha")?;
    let report = covering_report(spec, &d_r, &target, r / params.report_grid_div, n)?;
    match report.min_count {
        Some(mc) if mc >= n && report.failing.is_empty() => {
            Ok(outcome(DichotomyVariant::OmitsAlpha {
                alpha,
                verified_n: n,
                excluded_radius: rex,
            }))
        }
        _ => Err(EngineError::Inconclusive {
            alpha,
            needed: n,
            failing: report.failing.iter().take(FAILING_KEPT).copied().collect(),
        }),
    }
}

/// Euclidean diameter of a point set via its convex hull.
fn point_set_diameter(points: &[Complex64]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite raster coordinates")
    });
    pts.dedup_by(|a, b| a.re == b.re && a.im == b.im);
    if pts.len() < 2 {
        return 0.0;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter().chain(pts.iter().rev()) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for k in (i + 1)..hull.len() {
            best = best.max((hull[i] - hull[k]).norm());
        }
    }
    best
}

/// Rasterize the sub-level set `W = A_R ∩ {|f| < 2R}` on a half-step-offset
/// grid, group cells into 4-neighbor connected components, and scan which
/// circles between `R/2` and `2R` meet the raster (padded by 3/4 of a
/// cell). Panics when `grid_step` exceeds `R/200`.
pub fn sublevel_components(
    spec: &FunctionSpec,
    r: f64,
    grid_step: f64,
    params: &EngineParams,
) -> Result<SublevelSet, FunctionError> {
    assert!(
        grid_step > 0.0 && grid_step <= r / 200.0,
        "raster step must be positive and at most r/200"
    );
    let threshold = 2.0 * r;
    let ln_t = threshold.ln();
    let (r_in, r_out) = (r / 2.0, threshold);
    let mut xs = Vec::new();
    let mut x = -r_out + 0.5 * grid_step;
    while x < r_out {
        xs.push(x);
        x += grid_step;
    }
    let ys = xs.clone();
    let cols = xs.len();
    let rows = ys.len();
    let cells: Vec<Complex64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
        .collect();
    let in_w: Vec<bool> = cells
        .par_iter()
        .map(|&z| {
            let m = z.norm();
            if m <= r_in || m >= r_out {
                return Ok(false);
            }
            spec.eval_log(z).map(|s| s.ln_mod < ln_t)
        })
        .collect::<Result<Vec<bool>, FunctionError>>()?;
    let mut seen = vec![false; cells.len()];
    let mut components = Vec::new();
    for start in 0..cells.len() {
        if !in_w[start] || seen[start] {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            members.push(cells[idx]);
            let (row, col) = (idx / cols, idx % cols);
            let mut push = |rr: usize, cc: usize| {
                let nidx = rr * cols + cc;
                if in_w[nidx] && !seen[nidx] {
                    seen[nidx] = true;
                    queue.push_back(nidx);
                }
            };
            if row > 0 {
                push(row - 1, col);
            }
            if row + 1 < rows {
                push(row + 1, col);
            }
            if col > 0 {
                push(row, col - 1);
            }
            if col + 1 < cols {
                push(row, col + 1);
            }
        }
        let min_modulus = members.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let max_modulus = members.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diameter = point_set_diameter(&members);
        components.push(SublevelComponent {
            members,
            diameter,
            min_modulus,
            max_modulus,
        });
    }
    let pad = 0.75 * grid_step;
    let scan = params.radius_scan.max(4);
    let radius_scan = (0..scan)
        .map(|i| {
            let radius = r_in + (i as f64 + 0.5) * (r_out - r_in) / scan as f64;
            let meets_sublevel = components
                .iter()
                .any(|c| c.min_modulus - pad <= radius && radius <= c.max_modulus + pad);
            RadiusFlag {
                radius,
                meets_sublevel,
            }
        })
        .collect();
    Ok(SublevelSet {
        r,
        threshold,
        grid_step,
        components,
        radius_scan,
    })
}

fn certificate(
    v: PlanarDomain,
    n: u32,
    case_tag: CaseTag,
    witnesses: Witnesses,
    grid_report: CoveringGridReport,
    radius_r: f64,
    theta: f64,
    j: u32,
    transfer: Option<RoucheCertificate>,
) -> CoveringCertificate {
    let self_inclusion_evidence = evidence_of(&grid_report, n);
    let enclosing_radius = enclosing_radius(&v);
    CoveringCertificate {
        v,
        n,
        case_tag,
        witnesses,
        grid_report,
        self_inclusion_evidence,
        radius_r,
        theta,
        j,
        enclosing_radius,
        transfer,
    }
}

/// Certify a disk `V = Δ(0, r_gap)` on the gap-circle branch: the circle
/// `|z| = r_gap` must clear the sub-level threshold `2R` by the factor
/// [`GAP_CLEARANCE_FACTOR`] (otherwise `MarginTooSmall`); a scanned
/// representative value `v ∈ {0.5, 0.5i, −0.5, −0.5i}` must have at least
/// `n` preimages in `Δ(0, R/2)` (otherwise `NotEnoughPreimages`, and the
/// caller grows `R`); then a boundary-modulus transfer extends the count
/// of `v` to every target in `Δ(0, 2R) ⊃ V`, and a covering grid over `V`
/// records the evidence.
pub fn case2a_certificate(
    spec: &FunctionSpec,
    r: f64,
    r_gap: f64,
    n: u32,
    j: u32,
    params: &EngineParams,
) -> Result<CoveringCertificate, EngineError> {
    assert!(r_gap > 0.0 && r_gap >= r / 2.0 && r_gap <= 2.0 * r, "gap radius must lie in [R/2, 2R]");
    let min_w = function_model::small_modulus_witness(spec, r_gap, f64::INFINITY)?
        .expect("an unbounded cap always admits the circle minimum");
    let clearance = GAP_CLEARANCE_FACTOR * 2.0 * r;
    if !(min_w.log_modulus_of_image >= clearance.ln()) {
        return Err(WindingError::MarginTooSmall(format!(
            "gap circle |z| = {r_gap} does not clear the sub-level threshold: \
             min ln|f| = {:.3} < ln({clearance:.1}) = {:.3}",
            min_w.log_modulus_of_image,
            clearance.ln()
        ))
        .into());
    }
    let probe_disk = build_disk(Complex64::new(0.0, 0.0), r / 2.0, "half-radius-disk");
    let scan_values = [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(-0.5, 0.0),
        Complex64::new(0.0, -0.5),
    ];
    let mut chosen = None;
    for v in scan_values {
        if let Ok(pc) = count_preimages(spec, &probe_disk, v) {
            if pc.count >= n {
                chosen = Some(v);
                break;
            }
        }
    }
    let Some(v) = chosen else {
        return Err(EngineError::NotEnoughPreimages(format!(
            "no scanned representative value has {n} preimages in the half-radius disk at R = {r}"
        )));
    };
    let v_domain = build_disk(Complex64::new(0.0, 0.0), r_gap, "gap-disk");
    let transfer = rouche_transfer(spec, &v_domain, 2.0 * r, v)?;
    if transfer.count < n {
        return Err(EngineError::NotEnoughPreimages(format!(
            "transferred count {} in the gap disk is below {n}",
            transfer.count
        )));
    }
    let report = covering_report(spec, &v_domain, &v_domain, r_gap / params.report_grid_div, n)?;
    if !(report.min_count.map_or(false, |m| m >= n) && report.failing.is_empty()) {
        return Err(EngineError::CertificationFailed(format!(
            "gap-disk self-covering grid left {} target(s) under-covered",
            report.failing.len()
        )));
    }
    let max_w = function_model::max_modulus_on_circle(spec, r_gap)?;
    let witnesses = Witnesses {
        w_small: min_w.point,
        w_large: max_w.point,
        small_modulus: min_w.modulus_of_image,
        large_modulus: max_w.modulus_of_image,
        ln_large_modulus: max_w.log_modulus_of_image,
        separation_goal_met: false,
    };
    Ok(certificate(
        v_domain,
        n,
        CaseTag::IIa,
        witnesses,
        report,
        r,
        0.0,
        j,
        Some(transfer),
    ))
}

/// Annulus-branch certification. First the annulus is tested for direct
/// self-covering: a covering grid of `A_R` over itself with multiplicity
/// `n`; if it passes, `V = A_R` (deficit `ℓ = 0`). Otherwise the grid
/// target with the fewest preimages becomes the deficient point `α` with
/// deficit `ℓ = clamp(count(α), 1, n−1)`; its preimages in the annulus are
/// isolated, a sub-level component of diameter at least `3R/(2ℓ)` supplies
/// a small-modulus witness separated by `R/(2ℓ(ℓ+2))` from `α`, its
/// preimages and the annulus boundary, a large-modulus witness is found on
/// a circle clear of the same excluded disks, and a slit connector domain
/// through both witnesses is built and certified (hyperbolic diameter at
/// most `d/2`, then the covering grid).
pub fn case2b_certificate(
    spec: &FunctionSpec,
    r: f64,
    n: u32,
    j: u32,
    d: f64,
    sublevel: &SublevelSet,
    witnesses: &Witnesses,
    params: &EngineParams,
) -> Result<CoveringCertificate, EngineError> {
    let a_r = build_ar(r);
    let step = r / params.report_grid_div;
    let self_report = covering_report(spec, &a_r, &a_r, step, n)?;
    if self_report.min_count.map_or(false, |m| m >= n) && self_report.failing.is_empty() {
        return Ok(certificate(
            a_r,
            n,
            CaseTag::IIb,
            witnesses.clone(),
            self_report,
            r,
            0.0,
            j,
            None,
        ));
    }
    if n == 1 {
        return Err(EngineError::CertificationFailed(
            "a target with zero preimages in the annulus leaves no admissible deficit".into(),
        ));
    }
    let deficient = self_report
        .points
        .iter()
        .min_by(|a, b| {
            a.count
                .cmp(&b.count)
                .then_with(|| {
                    a.w.norm()
                        .partial_cmp(&b.w.norm())
                        .expect("finite grid coordinates")
                })
                .then_with(|| {
                    a.w.arg()
                        .partial_cmp(&b.w.arg())
                        .expect("finite grid coordinates")
                })
        })
        .ok_or_else(|| {
            EngineError::CertificationFailed("no countable grid target in the annulus".into())
        })?;
    let alpha = deficient.w;
    let l = deficient.count.clamp(1, n - 1);
    let rect = Rect::new(-2.0 * r, 2.0 * r, -2.0 * r, 2.0 * r);
    let zetas: Vec<Complex64> = solver::isolate_preimages(spec, alpha, rect, SolveParams::default())?
        .into_iter()
        .filter(|p| a_r.contains(p.location))
        .map(|p| p.location)
        .collect();
    let need_diam = 3.0 * r / (2.0 * l as f64);
    let w0 = sublevel
        .components
        .iter()
        .filter(|c| c.diameter >= need_diam)
        .max_by(|a, b| {
            a.diameter
                .partial_cmp(&b.diameter)
                .expect("finite diameters")
        })
        .ok_or_else(|| {
            EngineError::CertificationFailed(format!(
                "no sub-level component reaches diameter 3R/(2ℓ) = {need_diam:.3} for deficit ℓ = {l}"
            ))
        })?;
    let lf = l as f64;
    let sep = r / (2.0 * lf * (lf + 2.0));
    let mut best: Option<(f64, Complex64)> = None;
    for &p in &w0.members {
        let m = p.norm();
        let mut score = (m - r / 2.0).min(2.0 * r - m);
        score = score.min((p - alpha).norm());
        for &z in &zetas {
            score = score.min((p - z).norm());
        }
        if best.map_or(true, |(s, _)| score > s) {
            best = Some((score, p));
        }
    }
    let (w_small_score, w_small) = best.expect("a long component has members");
    if w_small_score < sep {
        return Err(EngineError::CertificationFailed(format!(
            "separation unachievable at the raster resolution: best clearance {w_small_score:.4} \
             is below R/(2ℓ(ℓ+2)) = {sep:.4}"
        )));
    }
    let ang = params.n_angular.max(256) / 4;
    let mut best_large: Option<(f64, Complex64)> = None;
    for i in 0..params.radius_scan.max(4) {
        let lo = r / 2.0 + sep;
        let hi = 2.0 * r - sep;
        let rad = lo + (i as f64 + 0.5) * (hi - lo) / params.radius_scan.max(4) as f64;
        for k in 0..ang {
            let z = Complex64::from_polar(rad, 2.0 * PI * k as f64 / ang as f64);
            if (z - alpha).norm() <= sep || zetas.iter().any(|&zz| (z - zz).norm() <= sep) {
                continue;
            }
            let ln = spec.eval_log(z)?.ln_mod;
            if best_large.map_or(true, |(b, _)| ln > b) {
                best_large = Some((ln, z));
            }
        }
    }
    let Some((ln_large, w_large)) = best_large else {
        return Err(EngineError::CertificationFailed(
            "every scanned circle point sits inside an excluded disk".into(),
        ));
    };
    if !(ln_large > j as f64 * r.ln()) {
        return Err(EngineError::CertificationFailed(format!(
            "no admissible large-modulus witness clear of the excluded disks: \
             best ln|f| = {ln_large:.3} is below {j}·ln R"
        )));
    }
    let eps = 1.0 / (2.0 * n as f64 * (n as f64 + 2.0));
    let domain = build_case2_domain(alpha, &zetas, eps, r, j, w_small, w_large)
        .map_err(|e| EngineError::CertificationFailed(format!("connector construction rejected: {e}")))?;
    let diam = hyperbolic::quasihyperbolic_upper(&domain, w_small, w_large)?.upper_bound;
    if !(diam <= d / 2.0) {
        return Err(EngineError::CertificationFailed(format!(
            "hyperbolic diameter bound exceeded: certified upper bound {diam:.3} is above d/2 = {:.3}",
            d / 2.0
        )));
    }
    let rex = r.powf(-(j as f64) / 2.0);
    let target = build_annulus_with_hole(r / 2.0, 2.0 * r, alpha, rex, "A_R-minus-alpha")?;
    let report = covering_report(spec, &domain, &target, step, n)?;
    if !(report.min_count.map_or(false, |m| m >= n) && report.failing.is_empty()) {
        return Err(EngineError::CertificationFailed(format!(
            "connector covering grid left {} target(s) under-covered",
            report.failing.len()
        )));
    }
    let new_witnesses = Witnesses {
        w_small,
        w_large,
        small_modulus: saturated_exp(spec.eval_log(w_small)?.ln_mod),
        large_modulus: saturated_exp(ln_large),
        ln_large_modulus: ln_large,
        separation_goal_met: witnesses.separation_goal_met,
    };
    Ok(certificate(
        domain,
        n,
        CaseTag::IIb,
        new_witnesses,
        report,
        r,
        0.0,
        j,
        None,
    ))
}

/// Omitted-point branch with the standard sector aperture.
pub fn case1_search(
    spec: &FunctionSpec,
    r: f64,
    theta: f64,
    j: u32,
    n: u32,
    alpha: Complex64,
    witnesses: &Witnesses,
    d: f64,
    params: &EngineParams,
) -> Result<Case1Outcome, EngineError> {
    case1_with_aperture(spec, r, theta, j, n, alpha, witnesses, d, params, false)
}

/// One-time escalation of [`case1_search`]: the sector half-aperture is
/// widened by `π/8` and the omission of `alpha` is re-verified before the
/// branch is retried. A second escalation is never attempted.
pub fn case1_search_widened(
    spec: &FunctionSpec,
    r: f64,
    theta: f64,
    j: u32,
    n: u32,
    alpha: Complex64,
    witnesses: &Witnesses,
    d: f64,
    params: &EngineParams,
) -> Result<Case1Outcome, EngineError> {
    case1_with_aperture(spec, r, theta, j, n, alpha, witnesses, d, params, true)
}

#[allow(clippy::too_many_arguments)]
fn case1_with_aperture(
    spec: &FunctionSpec,
    r: f64,
    theta: f64,
    j: u32,
    n: u32,
    alpha: Complex64,
    witnesses: &Witnesses,
    d: f64,
    params: &EngineParams,
    widened: bool,
) -> Result<Case1Outcome, EngineError> {
    let (d_in, d_out, base_half) = dr_geometry(r);
    let half = if widened { base_half + PI / 8.0 } else { base_half };
    let sector = if widened {
        crate::plane_domains::builders::build_annular_sector(d_in, d_out, theta, half, "D_R-widened")
    } else {
        build_dr(r, theta)
    };
    if widened {
        // The wider sector sweeps more image values; the omission of the
        // candidate must be re-established at two boundary resolutions.
        for max_edge in [sector.scale() / 64.0, sector.scale() / 128.0] {
            let pb = PreparedBoundary::with_max_edge(spec, &sector, max_edge)?;
            let count = pb.count(alpha)?.count;
            if count != 0 {
                return Err(EngineError::CertificationFailed(format!(
                    "the widened sector no longer omits the candidate point (count {count})"
                )));
            }
        }
    }
    let rex = r.powf(-(j as f64) / 2.0);
    // Non-recurrence raster over Δ(alpha, rex) ∩ sector: does any sampled
    // point map back into the sector?
    let ln_in = d_in.ln();
    let ln_out = d_out.ln();
    let in_sector_log = |s: crate::function_model::LogSample| {
        s.ln_mod > ln_in && s.ln_mod < ln_out && wrap_angle(s.arg - theta).abs() < half
    };
    let mut recurrent = false;
    let cells = RECURRENCE_CELLS;
    'raster: for iy in -cells..=cells {
        for ix in -cells..=cells {
            let p = alpha
                + Complex64::new(ix as f64, iy as f64) * (rex / cells as f64);
            if (p - alpha).norm() > rex || !sector.contains(p) {
                continue;
            }
            if in_sector_log(spec.eval_log(p)?) {
                recurrent = true;
                break 'raster;
            }
        }
    }
    let step = r / params.report_grid_div;
    if !recurrent {
        let disjoint = !sector.contains(alpha) && sector.boundary_distance(alpha) > rex;
        let hole_ok = sector.contains(alpha) && sector.boundary_distance(alpha) > 2.5 * rex;
        if disjoint || hole_ok {
            let v = if disjoint {
                sector
            } else {
                build_annular_sector_with_hole(
                    d_in,
                    d_out,
                    theta,
                    half,
                    alpha,
                    rex,
                    if widened {
                        "D_R-widened-minus-disk"
                    } else {
                        "D_R-minus-disk"
                    },
                )?
            };
            let report = covering_report(spec, &v, &v, step, n)?;
            if !(report.min_count.map_or(false, |m| m >= n) && report.failing.is_empty()) {
                return Err(EngineError::CertificationFailed(format!(
                    "sector self-covering grid left {} target(s) under-covered",
                    report.failing.len()
                )));
            }
            return Ok(Case1Outcome::Certificate(Box::new(certificate(
                v,
                n,
                CaseTag::I,
                witnesses.clone(),
                report,
                r,
                theta,
                j,
                None,
            ))));
        }
        // The candidate grazes the sector boundary so the excluded disk
        // cannot be carved out; fall through to witness relocation.
    }
    // Witness relocation: the excluded disk Δ(alpha, R/20) must sit inside
    // the working sector for the argument to go through.
    let rho = r / 20.0;
    let disk_inside = sector.contains(alpha) && sector.boundary_distance(alpha) > rho;
    if !disk_inside {
        return if widened {
            Err(EngineError::CertificationFailed(
                "the excluded relocation disk still leaves the working sector after one widening"
                    .into(),
            ))
        } else {
            Ok(Case1Outcome::Escalate)
        };
    }
    let samples = sample_circle(spec, r, params.n_angular)?;
    let nsamp = samples.phis.len();
    let admissible = |i: usize| {
        wrap_angle(samples.phis[i] - theta).abs() <= CORE_HALF_ANGLE - CORE_ANGULAR_MARGIN
            && (samples.zs[i] - alpha).norm() > rho
    };
    let mut i_max = None;
    let mut i_min = None;
    for i in 0..nsamp {
        if !admissible(i) {
            continue;
        }
        if i_max.map_or(true, |m: usize| samples.lns[i] > samples.lns[m]) {
            i_max = Some(i);
        }
        if i_min.map_or(true, |m: usize| samples.lns[i] < samples.lns[m]) {
            i_min = Some(i);
        }
    }
    let (Some(i_max), Some(i_min)) = (i_max, i_min) else {
        return Err(EngineError::CertificationFailed(
            "no admissible circle sample outside the excluded relocation disk".into(),
        ));
    };
    if !(samples.lns[i_max] > j as f64 * r.ln() && samples.lns[i_min] < (3.0 * r).ln()) {
        return Err(EngineError::CertificationFailed(format!(
            "relocated witnesses lost the required moduli: ln|f| range [{:.3}, {:.3}]",
            samples.lns[i_min], samples.lns[i_max]
        )));
    }
    let (w_small, w_large) = (samples.zs[i_min], samples.zs[i_max]);
    let domain = build_case1_domain(alpha, r, theta, w_small, w_large)
        .map_err(|e| EngineError::CertificationFailed(format!("keyhole construction rejected: {e}")))?;
    let diam = hyperbolic::quasihyperbolic_upper(&domain, w_small, w_large)?.upper_bound;
    if !(diam <= d / 2.0) {
        return Err(EngineError::CertificationFailed(format!(
            "hyperbolic diameter bound exceeded: certified upper bound {diam:.3} is above d/2 = {:.3}",
            d / 2.0
        )));
    }
    let report = covering_report(spec, &domain, &domain, step, n)?;
    if !(report.min_count.map_or(false, |m| m >= n) && report.failing.is_empty()) {
        return Err(EngineError::CertificationFailed(format!(
            "relocated-domain covering grid left {} target(s) under-covered",
            report.failing.len()
        )));
    }
    let relocated = Witnesses {
        w_small,
        w_large,
        small_modulus: saturated_exp(samples.lns[i_min]),
        large_modulus: saturated_exp(samples.lns[i_max]),
        ln_large_modulus: samples.lns[i_max],
        separation_goal_met: witnesses.separation_goal_met,
    };
    Ok(Case1Outcome::Certificate(Box::new(certificate(
        domain,
        n,
        CaseTag::I,
        relocated,
        report,
        r,
        theta,
        j,
        None,
    ))))
}

/// Walk the radius schedule of `params` and return the first certified
/// self-covering set with multiplicity `n`. Every unproductive radius
/// contributes one [`StepTrace`] entry; exhausting the schedule returns
/// [`EngineError::BudgetExhausted`] carrying the whole trace.
pub fn find_self_covering_v(
    spec: &FunctionSpec,
    n: u32,
    params: &EngineParams,
) -> Result<CoveringCertificate, EngineError> {
    assert!(n >= 1, "covering multiplicity must be at least 1");
    spec.validate()?;
    let mut trace = Vec::new();
    let mut r = params.r_start;
    for step in 0..params.r_steps {
        match certify_at_radius(spec, n, r, params) {
            Ok(cert) => return Ok(cert),
            Err(decision) => trace.push(StepTrace { step, r, decision }),
        }
        r *= params.r_factor;
    }
    Err(EngineError::BudgetExhausted { trace })
}

/// One schedule step: returns a certificate or the decision string
/// recorded in the trace. All failures at one radius are soft — the
/// schedule simply advances.
fn certify_at_radius(
    spec: &FunctionSpec,
    n: u32,
    r: f64,
    params: &EngineParams,
) -> Result<CoveringCertificate, String> {
    let d = params.working_d;
    // Families whose modulus can dominate the whole sub-level threshold on
    // a circle get a direct disk attempt; closed-under-growth families
    // (polynomials, truncated series) cannot certify this way and would
    // pass the modulus gate spuriously at large radii, so they are routed
    // through the growth path only.
    if matches!(
        spec,
        FunctionSpec::ExpAffine { .. } | FunctionSpec::LacunaryProduct { .. }
    ) {
        match function_model::small_modulus_witness(spec, r, 3.0 * r) {
            Ok(None) => {
                return case2a_certificate(spec, r, r, n, 0, params)
                    .map_err(|e| format!("gap probe on |z| = {r}: {e}"));
            }
            Ok(Some(_)) => {}
            Err(e) => return Err(format!("circle scan failed: {e}")),
        }
    }
    let ln_k = hyperbolic::ln_k_constant(d);
    let j = (2.0 * n as f64 * ln_k / r.ln()).floor() as u32 + 1;
    let mm = function_model::max_modulus_on_circle(spec, r)
        .map_err(|e| format!("max-modulus scan failed: {e}"))?;
    if !(mm.log_modulus_of_image > j as f64 * r.ln()) {
        return Err(format!(
            "no admissible growth exponent: max ln|f| = {:.3} on |z| = {r} is below {j}·ln R = {:.3}",
            mm.log_modulus_of_image,
            j as f64 * r.ln()
        ));
    }
    let ws = find_witnesses(spec, r, j, params).map_err(|e| format!("witness scan failed: {e}"))?;
    let (witnesses, theta) = match ws {
        WitnessSearch::Found { witnesses, theta } => (witnesses, theta),
        WitnessSearch::NotFound { reason } => return Err(format!("witness search: {reason}")),
    };
    let hyp = check_dichotomy_hypotheses(
        witnesses.small_modulus,
        witnesses.large_modulus,
        r,
        j,
        n,
        d,
    );
    if !hyp.holds {
        return Err(format!(
            "growth hypotheses fail (gaps {:.3}, {:.3}, {:.3})",
            hyp.peak_gap, hyp.contraction_gap, hyp.exponent_gap
        ));
    }
    let outcome = match run_dichotomy(spec, r, theta, j, n, &hyp, params) {
        Ok(o) => o,
        Err(e) => return Err(format!("dichotomy scan: {e}")),
    };
    match outcome.variant {
        DichotomyVariant::OmitsAlpha { alpha, .. } => {
            match case1_search(spec, r, theta, j, n, alpha, &witnesses, d, params) {
                Ok(Case1Outcome::Certificate(c)) => Ok(*c),
                Ok(Case1Outcome::Escalate) => {
                    match case1_search_widened(spec, r, theta, j, n, alpha, &witnesses, d, params) {
                        Ok(Case1Outcome::Certificate(c)) => Ok(*c),
                        Ok(Case1Outcome::Escalate) => {
                            Err("omitted-point branch escalated twice".into())
                        }
                        Err(e) => Err(format!("omitted-point branch (widened): {e}")),
                    }
                }
                Err(e) => Err(format!("omitted-point branch: {e}")),
            }
        }
        DichotomyVariant::CoversFully => {
            let sub = sublevel_components(spec, r, r / params.sublevel_grid_div, params)
                .map_err(|e| format!("sub-level raster failed: {e}"))?;
            let mut gap_note = String::new();
            let gaps = sub.gap_radii();
            if !gaps.is_empty() {
                // Prefer the scanned gap radius whose circle clears the
                // threshold by the largest factor.
                let mut best: Option<(f64, f64)> = None;
                for &rad in &gaps {
                    if let Ok(Some(w)) =
                        function_model::small_modulus_witness(spec, rad, f64::INFINITY)
                    {
                        if best.map_or(true, |(b, _)| w.log_modulus_of_image > b) {
                            best = Some((w.log_modulus_of_image, rad));
                        }
                    }
                }
                if let Some((_, rad)) = best {
                    match case2a_certificate(spec, r, rad, n, j, params) {
                        Ok(c) => return Ok(c),
                        Err(e) => gap_note = format!("gap circle at {rad:.3}: {e}; "),
                    }
                }
            }
            match case2b_certificate(spec, r, n, j, d, &sub, &witnesses, params) {
                Ok(c) => Ok(c),
                Err(e) => Err(format!("full-cover branch: {gap_note}{e}")),
            }
        }
    }
}
