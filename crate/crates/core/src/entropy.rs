//! Entropy lower bounds from separated orbit sets and from covering
//! certificates.
//!
//! Two independent estimators live here:
//!
//! * **Separated-set packing** ([`separated_set_lower`],
//!   [`entropy_lower_curve`]): on a compact set `X` (a planar domain or an
//!   explicit point cloud), a greedy maximal packing of points whose
//!   forward orbits stay in `X` and are pairwise far in the orbit metric
//!   `d_n(x, y) = max_{0 ≤ i < n} |f^i(x) − f^i(y)|`. The packing
//!   cardinality `K(n, δ)` is a certified lower bound for the maximal
//!   `(n, δ)`-separated cardinality, and its exponential growth rate in
//!   `n` is a lower bound for topological entropy on `X`.
//!
//! * **Backward-orbit counting** ([`backward_orbit_separated_count`],
//!   [`certificate_entropy_bound`]): given a [`CoveringCertificate`]
//!   asserting that `V` is covered `N` times by `f(V)`, the backward tree
//!   of a base point is enumerated inside `V` (minus exclusion disks
//!   around super-attracting periodic points) to depth `k·m`, keeping only
//!   `ε`-separated siblings. The leaf count `C` gives the measured bound
//!   `log(C)/(k·m)` and is compared against the theoretical floor
//!   `log N − log(degree_product)/m`, where `degree_product` multiplies
//!   the local degrees of the non-periodic critical points in `V`.

use crate::cjson;
use crate::engine::CoveringCertificate;
use crate::function_model::{FunctionError, FunctionSpec};
use crate::plane_domains::{DomainError, PlanarDomain};
use crate::solver::{self, Rect, SolveParams, SolveStop, SolverError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Cap on seed points drawn from a compact set.
const SEED_CAP: usize = 1 << 14;
/// Relative tolerance for point-cloud membership of drifted orbit points.
const CLOUD_MEMBERSHIP_REL_TOL: f64 = 1e-7;
/// Modulus beyond which a forward orbit is declared escaped.
const ESCAPE_MODULUS: f64 = 1e12;
/// Golden angle (radians) driving the low-discrepancy base-point spiral.
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

#[derive(Debug, Error)]
pub enum EntropyError {
    /// The backward-tree enumeration ran out of refinement budget.
    #[error("enumeration budget exceeded: {0}")]
    EnumerationBudgetExceeded(String),
    #[error("invalid entropy request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// A compact subset of the plane on which orbit separation is measured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CompactSet {
    /// A planar domain; seeds are a uniform grid over its bounding box and
    /// membership is the (open) domain predicate.
    Domain(PlanarDomain),
    /// An explicit finite point cloud; the cloud itself seeds the packing
    /// and membership means being within a small relative tolerance of a
    /// cloud point.
    Cloud {
        id: String,
        #[serde(with = "cjson::vec_c")]
        points: Vec<Complex64>,
    },
}

impl CompactSet {
    /// The `2^log2_points` roots of unity. This cloud is forward-invariant
    /// under every monomial `z^d`, making orbit confinement automatic.
    pub fn unit_circle_cloud(log2_points: u32) -> CompactSet {
        let n = 1usize << log2_points;
        let points = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        CompactSet::Cloud {
            id: format!("unit-circle-2pow{log2_points}"),
            points,
        }
    }

    pub fn id(&self) -> String {
        match self {
            CompactSet::Domain(d) => d.label.clone(),
            CompactSet::Cloud { id, .. } => id.clone(),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            CompactSet::Domain(d) => d.scale(),
            CompactSet::Cloud { points, .. } => points
                .iter()
                .map(|p| p.norm())
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE),
        }
    }

    fn seed_points(&self) -> Vec<Complex64> {
        match self {
            CompactSet::Domain(d) => {
                let (x0, x1, y0, y1) = d.bounding_box();
                let area = ((x1 - x0) * (y1 - y0)).max(f64::MIN_POSITIVE);
                let step = (area / SEED_CAP as f64).sqrt();
                let mut seeds = Vec::new();
                let mut y = y0 + 0.5 * step;
                while y < y1 {
                    let mut x = x0 + 0.5 * step;
                    while x < x1 {
                        let p = Complex64::new(x, y);
                        if d.contains(p) {
                            seeds.push(p);
                        }
                        x += step;
                    }
                    y += step;
                }
                seeds
            }
            CompactSet::Cloud { points, .. } => {
                if points.len() <= SEED_CAP {
                    points.clone()
                } else {
                    let stride = points.len().div_ceil(SEED_CAP);
                    points.iter().step_by(stride).copied().collect()
                }
            }
        }
    }

    fn membership(&self) -> Membership<'_> {
        match self {
            CompactSet::Domain(d) => Membership::Domain(d),
            CompactSet::Cloud { points, .. } => {
                let scale = self.scale();
                let tol = CLOUD_MEMBERSHIP_REL_TOL * scale;
                let cell = 100.0 * tol;
                let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
                for (i, p) in points.iter().enumerate() {
                    grid.entry(cell_key(*p, cell)).or_default().push(i);
                }
                Membership::Cloud {
                    grid,
                    points,
                    cell,
                    tol,
                }
            }
        }
    }
}

fn cell_key(p: Complex64, cell: f64) -> (i64, i64) {
    ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64)
}

enum Membership<'a> {
    Domain(&'a PlanarDomain),
    Cloud {
        grid: HashMap<(i64, i64), Vec<usize>>,
        points: &'a [Complex64],
        cell: f64,
        tol: f64,
    },
}

impl Membership<'_> {
    fn contains(&self, p: Complex64) -> bool {
        match self {
            Membership::Domain(d) => d.contains(p),
            Membership::Cloud {
                grid,
                points,
                cell,
                tol,
            } => {
                let (cx, cy) = cell_key(p, *cell);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                            if bucket.iter().any(|&i| (points[i] - p).norm() <= *tol) {
                                return true;
                            }
                        }
                    }
                }
                false
            }
        }
    }
}

/// One cell of the separated-set table: a certified lower bound `k_lower`
/// for the maximal `(n, δ)`-separated cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyTableEntry {
    pub n: u32,
    pub delta: f64,
    pub k_lower: u64,
}

/// One point of the normalized curve `n ↦ log(K(n, δ_min))/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: u32,
    pub value: f64,
}

/// Separated-set table with its growth-rate entropy estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub compact_set_id: String,
    /// Entries for every `(n, δ)` pair, `n` ascending, `δ` descending.
    pub table: Vec<EntropyTableEntry>,
    /// Normalized logarithms at the smallest `δ` of the table.
    pub curve: Vec<CurvePoint>,
    /// Estimated exponential growth rate of `K(n, δ)` in `n`: the
    /// least-squares slope of `log K` over the growing part of each
    /// `δ`-column, maximized over columns and floored at zero. Constant
    /// cardinalities (the identity map) score exactly zero, while a map
    /// whose separated counts multiply by `d` each step scores close to
    /// `log d`.
    pub h_lower: f64,
}

/// Exponential growth rate of one cardinality column `K(1), K(2), …`:
/// the least-squares slope of `log K(n)` against `n` over the growing
/// part of the column (up to the last strict increase, which trims the
/// saturated tail once the packing has captured every candidate).
/// Fitting a line through the whole growing segment averages out the
/// stall-and-catch-up jitter of incremental greedy packings, which makes
/// single-step ratios swing far above and below the true branching.
/// A column that never grows rates exactly zero.
fn column_growth_rate(col: &[u64]) -> f64 {
    let mut last_rise = 0usize;
    for i in 1..col.len() {
        if col[i] > col[i - 1] {
            last_rise = i;
        }
    }
    if last_rise == 0 {
        return 0.0;
    }
    let seg: Vec<f64> = col[..=last_rise]
        .iter()
        .map(|&k| (k.max(1) as f64).ln())
        .collect();
    let len = seg.len() as f64;
    let mean_x = (len - 1.0) / 2.0;
    let mean_y = seg.iter().sum::<f64>() / len;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &y) in seg.iter().enumerate() {
        let dx = i as f64 - mean_x;
        num += dx * (y - mean_y);
        den += dx * dx;
    }
    if den > 0.0 {
        (num / den).max(0.0)
    } else {
        0.0
    }
}

/// A precomputed candidate orbit: forward images of one seed, plus how
/// long a prefix stays inside the compact set.
struct OrbitCandidate {
    orbit: Vec<Complex64>,
    confined_upto: usize,
}

fn build_candidates(
    spec: &FunctionSpec,
    x: &CompactSet,
    n_max: usize,
) -> Vec<OrbitCandidate> {
    let membership = x.membership();
    let seeds = x.seed_points();
    seeds
        .into_iter()
        .map(|seed| {
            let mut orbit = Vec::with_capacity(n_max);
            orbit.push(seed);
            while orbit.len() < n_max {
                let prev = *orbit.last().expect("orbit starts with the seed");
                match spec.evaluate(prev) {
                    Ok(z) if z.re.is_finite() && z.im.is_finite() => orbit.push(z),
                    _ => break,
                }
            }
            let mut confined_upto = 0;
            for &z in &orbit {
                if membership.contains(z) {
                    confined_upto += 1;
                } else {
                    break;
                }
            }
            OrbitCandidate {
                orbit,
                confined_upto,
            }
        })
        .collect()
}

/// Orbit distance `d_n` between two candidates.
fn orbit_distance(a: &OrbitCandidate, b: &OrbitCandidate, n: usize) -> f64 {
    (0..n)
        .map(|i| (a.orbit[i] - b.orbit[i]).norm())
        .fold(0.0, f64::max)
}

/// Greedy `(n, δ)`-packing over `candidates`, optionally seeded with an
/// already-separated kept set (indices into `candidates`). Candidates are
/// visited in emission order; a spatial hash on the step-0 position prunes
/// pairs that are already separated there (`d_n` dominates the step-0
/// distance, so only step-0-close pairs can conflict).
fn greedy_pack(candidates: &[OrbitCandidate], n: usize, delta: f64, seed: &[usize]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let admit = |idx: usize, kept: &mut Vec<usize>, grid: &mut HashMap<(i64, i64), Vec<usize>>| {
        let c = &candidates[idx];
        if c.confined_upto < n {
            return;
        }
        let key = cell_key(c.orbit[0], delta);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(key.0 + dx, key.1 + dy)) {
                    for &k in bucket {
                        if orbit_distance(c, &candidates[k], n) < delta {
                            return;
                        }
                    }
                }
            }
        }
        grid.entry(key).or_default().push(idx);
        kept.push(idx);
    };
    for &s in seed {
        admit(s, &mut kept, &mut grid);
    }
    for idx in 0..candidates.len() {
        admit(idx, &mut kept, &mut grid);
    }
    kept
}

/// Lower-bound the maximal `(n, δ)`-separated cardinality on `X` by one
/// greedy packing. Points whose forward orbit leaves `X` before step `n`
/// (or fails to evaluate) are discarded; every kept pair is verified
/// `d_n`-separated by at least `δ`.
pub fn separated_set_lower(
    spec: &FunctionSpec,
    x: &CompactSet,
    n: u32,
    delta: f64,
) -> EntropyTableEntry {
    assert!(n >= 1 && delta > 0.0, "need n ≥ 1 and δ > 0");
    let candidates = build_candidates(spec, x, n as usize);
    let kept = greedy_pack(&candidates, n as usize, delta, &[]);
    EntropyTableEntry {
        n,
        delta,
        k_lower: kept.len() as u64,
    }
}

/// Fill the whole `(n, δ)` table and report the growth-rate entropy
/// estimate. Within each `δ`-column the packing at `n+1` is seeded with
/// the kept set at `n` (valid because the orbit metric only grows with
/// `n`), so on forward-invariant sets every column is nondecreasing in
/// `n` and consecutive cells refine the same packing — the one-step
/// ratios then track the map's branching instead of greedy jitter.
/// Columns are independent; the table is still nonincreasing in `δ`
/// whenever listed values differ by a factor of two or more, because a
/// maximal `δ`-packing is a `δ`-net and any `δ'`-separated set with
/// `δ' ≥ 2δ` injects into it.
pub fn entropy_lower_curve(
    spec: &FunctionSpec,
    x: &CompactSet,
    n_max: u32,
    delta_list: &[f64],
) -> EntropyEstimate {
    assert!(n_max >= 2, "curve needs n_max ≥ 2");
    assert!(
        !delta_list.is_empty() && delta_list.iter().all(|&d| d > 0.0),
        "need at least one positive δ"
    );
    let mut deltas: Vec<f64> = delta_list.to_vec();
    deltas.sort_by(|a, b| b.partial_cmp(a).expect("finite δ"));
    deltas.dedup();
    let candidates = build_candidates(spec, x, n_max as usize);
    let nd = deltas.len();
    // kept[(n-1) * nd + di] = kept indices for that cell.
    let mut kept: Vec<Vec<usize>> = Vec::with_capacity(n_max as usize * nd);
    let mut table = Vec::with_capacity(n_max as usize * nd);
    for n in 1..=n_max as usize {
        for di in 0..nd {
            let seed: &[usize] = if n > 1 { &kept[(n - 2) * nd + di] } else { &[] };
            let cell_kept = greedy_pack(&candidates, n, deltas[di], seed);
            table.push(EntropyTableEntry {
                n: n as u32,
                delta: deltas[di],
                k_lower: cell_kept.len() as u64,
            });
            kept.push(cell_kept);
        }
    }
    let smallest = deltas[nd - 1];
    let curve = table
        .iter()
        .filter(|e| e.delta == smallest)
        .map(|e| CurvePoint {
            n: e.n,
            value: if e.k_lower > 0 {
                (e.k_lower as f64).ln() / e.n as f64
            } else {
                0.0
            },
        })
        .collect();
    let mut h_lower = 0.0f64;
    for di in 0..nd {
        let col: Vec<u64> = (1..=n_max as usize)
            .map(|n| table[(n - 1) * nd + di].k_lower)
            .collect();
        h_lower = h_lower.max(column_growth_rate(&col));
    }
    EntropyEstimate {
        compact_set_id: x.id(),
        table,
        curve,
        h_lower,
    }
}

/// A located zero of `f′` with its covering behavior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    #[serde(with = "cjson::c")]
    pub location: Complex64,
    /// Local covering degree of `f` at the point: `1 +` the multiplicity
    /// of the zero of `f′`.
    pub local_degree: u32,
    /// Whether the forward orbit returned to the point within the period
    /// budget and tolerance.
    pub is_periodic_within_budget: bool,
}

/// Critical points of `f` in a region and the degree product entering the
/// entropy floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalData {
    /// Sorted by position (real part, then imaginary part).
    pub critical_points: Vec<CriticalPoint>,
    /// Product of `local_degree` over the critical points *not* classified
    /// periodic; `1` when that set is empty.
    pub degree_product: u64,
}

/// Locate the critical points of `f` in the closure of `v` and classify
/// their periodicity by forward iteration up to `period_budget` steps.
///
/// Classification is resolved toward "not periodic" whenever the orbit
/// fails to return within the tight tolerance: that direction enlarges
/// `degree_product` and therefore only weakens (never inflates) the
/// entropy floor derived from it.
pub fn critical_data(
    spec: &FunctionSpec,
    v: &PlanarDomain,
    period_budget: u32,
) -> Result<CriticalData, EntropyError> {
    let deriv = match spec {
        // The listed factors of a product form an ordinary polynomial, so
        // its critical points are the zeros of the expanded derivative.
        // The certified tail perturbs the logarithmic derivative by at
        // most the reciprocal of the tail modulus on any bounded region,
        // which shifts each such zero by a comparably tiny amount and
        // cannot change counts or multiplicities at this scale.
        FunctionSpec::LacunaryProduct { zeros, .. } if !zeros.is_empty() => {
            product_derivative_polynomial(zeros)
        }
        FunctionSpec::LacunaryProduct { .. } => {
            return Ok(CriticalData {
                critical_points: vec![],
                degree_product: 1,
            });
        }
        _ => spec.derivative_spec()?,
    };
    // |e^{az+b}| = e^{Re(az+b)} is positive everywhere, so an exponential
    // derivative has no zeros; running the box search would chase its
    // decay tail toward underflow instead.
    if matches!(deriv, FunctionSpec::ExpAffine { .. }) {
        return Ok(CriticalData {
            critical_points: vec![],
            degree_product: 1,
        });
    }
    let (x0, x1, y0, y1) = v.bounding_box();
    let pad = 1e-9 * v.scale();
    let rect = Rect::new(x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    // As in the backward enumeration, the isolation tolerance scales with
    // the search box: near a simple zero the grazing guard blanks out a
    // neighborhood proportional to the local derivative scale, which on
    // large domains dwarfs any fixed tolerance.
    let span = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    let solve_params = SolveParams {
        cluster_tol: 1e-6_f64.max(1e-9 * span),
        ..SolveParams::default()
    };
    let zeros = solver::isolate_preimages(&deriv, Complex64::new(0.0, 0.0), rect, solve_params)?;
    let tol = 1e-9 * v.scale().max(1.0);
    let mut critical_points: Vec<CriticalPoint> = zeros
        .into_iter()
        .filter(|z| v.contains(z.location) || v.boundary_distance(z.location) <= pad)
        .map(|z| {
            let periodic = forward_period(spec, z.location, period_budget, tol).is_some();
            CriticalPoint {
                location: z.location,
                local_degree: 1 + z.multiplicity,
                is_periodic_within_budget: periodic,
            }
        })
        .collect();
    critical_points.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .expect("finite critical points")
    });
    let degree_product = critical_points
        .iter()
        .filter(|c| !c.is_periodic_within_budget)
        .map(|c| c.local_degree as u64)
        .product();
    Ok(CriticalData {
        critical_points,
        degree_product,
    })
}

/// Expanded derivative of the listed product factors `∏ (z_i − z)/z_i`,
/// as an ascending-coefficient polynomial. Dividing by the fixed
/// normalization `∏ z_i` keeps coefficients near unit scale without
/// moving any zero.
fn product_derivative_polynomial(zeros: &[Complex64]) -> FunctionSpec {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &zi in zeros {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += zi * c;
            next[k + 1] -= c;
        }
        coeffs = next;
    }
    let norm: Complex64 = zeros.iter().product();
    let diff: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * (k as f64) / norm)
        .collect();
    FunctionSpec::Polynomial { coeffs: diff }
}

/// Smallest period `p ≤ budget` with `|f^p(c) − c| ≤ tol`, if any.
fn forward_period(spec: &FunctionSpec, c: Complex64, budget: u32, tol: f64) -> Option<u32> {
    let mut z = c;
    for p in 1..=budget {
        z = match spec.evaluate(z) {
            Ok(w) if w.re.is_finite() && w.im.is_finite() => w,
            _ => return None,
        };
        if (z - c).norm() <= tol {
            return Some(p);
        }
        if z.norm() > ESCAPE_MODULUS {
            return None;
        }
    }
    None
}

/// A disk removed from `V` around a super-attracting periodic point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionDisk {
    #[serde(with = "cjson::c")]
    pub center: Complex64,
    pub radius: f64,
}

/// Parameters of one backward-orbit enumeration, all derived and verified
/// numerically rather than assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardOrbitParams {
    /// Base point whose backward tree is enumerated; chosen off every
    /// critical orbit.
    #[serde(with = "cjson::c")]
    pub base_point: Complex64,
    /// Depth per block.
    pub m: u32,
    /// Number of blocks; total tree depth is `k·m`.
    pub k: u32,
    /// Separation required among sibling branches.
    pub epsilon: f64,
    /// Shield radius: sampled forward images of `Δ(x, ρ)` stay disjoint
    /// from the disk for every non-periodic critical `x` and every
    /// iterate up to `m`.
    pub critical_shield_rho: f64,
    /// Disks removed from `V` around super-attracting periodic points;
    /// the base point and every enumerated orbit avoid them.
    pub superattracting_exclusion: Vec<ExclusionDisk>,
}

/// Derive verified backward-orbit parameters for a certificate: exclusion
/// disks by halving until the sampled period-image stays inside itself,
/// the shield radius by halving until the sampled disk images separate
/// from the disk, the base point from a golden-angle spiral over `V`
/// avoiding critical orbits, and `ε` as half the minimum pairwise distance
/// among the depth-1 preimages of the base point.
pub fn derive_backward_params(
    spec: &FunctionSpec,
    cert: &CoveringCertificate,
    m: u32,
    k: u32,
    period_budget: u32,
) -> Result<BackwardOrbitParams, EntropyError> {
    assert!(m >= 1, "block depth must be at least 1");
    let v = &cert.v;
    let scale = v.scale().max(f64::MIN_POSITIVE);
    let crit = critical_data(spec, v, period_budget)?;
    let mut superattracting_exclusion = Vec::new();
    for c in crit
        .critical_points
        .iter()
        .filter(|c| c.is_periodic_within_budget)
    {
        let tol = 1e-9 * v.scale().max(1.0);
        let period = forward_period(spec, c.location, period_budget, tol)
            .expect("periodicity was just established");
        if let Some(radius) = shrink_to_self_map(spec, c.location, period, scale / 10.0) {
            superattracting_exclusion.push(ExclusionDisk {
                center: c.location,
                radius,
            });
        }
    }
    let nonperiodic: Vec<Complex64> = crit
        .critical_points
        .iter()
        .filter(|c| !c.is_periodic_within_budget)
        .map(|c| c.location)
        .collect();
    let critical_shield_rho = shield_radius(spec, &nonperiodic, m, scale / 10.0)?;
    let orbit_points = critical_orbit_points(spec, &crit, period_budget);
    let base_point = pick_base_point(
        v,
        &superattracting_exclusion,
        &orbit_points,
        critical_shield_rho,
    )
    .ok_or_else(|| {
        EntropyError::Invalid("no admissible base point clear of critical orbits found".into())
    })?;
    let (bx0, bx1, by0, by1) = v.bounding_box();
    let rect = Rect::new(bx0, bx1, by0, by1);
    // Box-scaled isolation tolerance, for the same reason as in the
    // backward enumeration below.
    let solve_params = SolveParams {
        cluster_tol: 1e-6_f64.max(1e-9 * (bx1 - bx0).max(by1 - by0)),
        ..SolveParams::default()
    };
    let depth1: Vec<Complex64> = solver::isolate_preimages(spec, base_point, rect, solve_params)?
            .into_iter()
            .filter(|p| {
                v.contains(p.location) && outside_exclusions(p.location, &superattracting_exclusion)
            })
            .map(|p| p.location)
            .collect();
    if depth1.is_empty() {
        return Err(EntropyError::Invalid(
            "the base point has no preimage inside V".into(),
        ));
    }
    let mut min_pair = f64::INFINITY;
    for i in 0..depth1.len() {
        for j in (i + 1)..depth1.len() {
            min_pair = min_pair.min((depth1[i] - depth1[j]).norm());
        }
    }
    let epsilon = if min_pair.is_finite() {
        0.5 * min_pair
    } else {
        1e-3 * scale
    };
    Ok(BackwardOrbitParams {
        base_point,
        m,
        k,
        epsilon,
        critical_shield_rho,
        superattracting_exclusion,
    })
}

/// Largest halved radius (from `start`) whose sampled period-`p` image
/// stays strictly inside the disk around `c`; `None` when 48 halvings
/// never succeed.
fn shrink_to_self_map(
    spec: &FunctionSpec,
    c: Complex64,
    period: u32,
    start: f64,
) -> Option<f64> {
    let mut rho = start;
    for _ in 0..48 {
        let mut ok = true;
        'samples: for s in disk_samples(c, rho) {
            let mut z = s;
            for _ in 0..period {
                z = match spec.evaluate(z) {
                    Ok(w) if w.re.is_finite() && w.im.is_finite() => w,
                    _ => {
                        ok = false;
                        break 'samples;
                    }
                };
            }
            if (z - c).norm() >= 0.9 * rho {
                ok = false;
                break;
            }
        }
        if ok {
            return Some(rho);
        }
        rho *= 0.5;
    }
    None
}

/// Halve from `start` until, for every listed critical point `x` and every
/// iterate up to `m`, the sampled forward images of `Δ(x, ρ)` keep
/// distance greater than `ρ` from `x`.
fn shield_radius(
    spec: &FunctionSpec,
    nonperiodic: &[Complex64],
    m: u32,
    start: f64,
) -> Result<f64, EntropyError> {
    if nonperiodic.is_empty() {
        return Ok(start);
    }
    let mut rho = start;
    for _ in 0..60 {
        let mut ok = true;
        'outer: for &x in nonperiodic {
            for s in disk_samples(x, rho) {
                let mut z = s;
                for _ in 1..=m {
                    z = match spec.evaluate(z) {
                        Ok(w) if w.re.is_finite() && w.im.is_finite() => w,
                        // An escaping image is disjoint from the disk.
                        _ => break,
                    };
                    if (z - x).norm() <= rho {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            return Ok(rho);
        }
        rho *= 0.5;
    }
    Err(EntropyError::Invalid(
        "no shield radius found: a critical disk keeps re-entering itself".into(),
    ))
}

fn disk_samples(c: Complex64, rho: f64) -> Vec<Complex64> {
    let mut samples = vec![c];
    for i in 0..16 {
        samples.push(c + Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * i as f64 / 16.0));
    }
    samples
}

fn outside_exclusions(p: Complex64, exclusions: &[ExclusionDisk]) -> bool {
    exclusions.iter().all(|e| (p - e.center).norm() > e.radius)
}

fn critical_orbit_points(
    spec: &FunctionSpec,
    crit: &CriticalData,
    budget: u32,
) -> Vec<Complex64> {
    let mut points = Vec::new();
    for c in &crit.critical_points {
        let mut z = c.location;
        points.push(z);
        for _ in 0..budget.min(64) {
            z = match spec.evaluate(z) {
                Ok(w) if w.re.is_finite() && w.im.is_finite() && w.norm() <= ESCAPE_MODULUS => w,
                _ => break,
            };
            points.push(z);
        }
    }
    points
}

/// First golden-angle spiral point inside `v`, outside the exclusion
/// disks, and at distance ≥ `2ρ` from every critical orbit point.
fn pick_base_point(
    v: &PlanarDomain,
    exclusions: &[ExclusionDisk],
    orbit_points: &[Complex64],
    rho: f64,
) -> Option<Complex64> {
    let (x0, x1, y0, y1) = v.bounding_box();
    let center = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let r_max = 0.5 * ((x1 - x0).hypot(y1 - y0));
    for i in 0..8192 {
        let r = r_max * (((i as f64) + 0.5) / 8192.0).sqrt();
        let p = center + Complex64::from_polar(r, GOLDEN_ANGLE * i as f64);
        if v.contains(p)
            && outside_exclusions(p, exclusions)
            && orbit_points.iter().all(|&q| (p - q).norm() >= 2.0 * rho)
        {
            return Some(p);
        }
    }
    None
}

/// Count `ε`-separated backward orbits of the base point to depth `k·m`
/// inside `V` minus the exclusion disks. At every node the preimages are
/// isolated inside `V`, thinned greedily to pairwise separation `ε` (in
/// deterministic position order), and capped at the certificate
/// multiplicity `N`, so the returned count is a lower bound for the
/// maximal `(km, ε)`-separated set of backward orbits.
pub fn backward_orbit_separated_count(
    spec: &FunctionSpec,
    cert: &CoveringCertificate,
    params: &BackwardOrbitParams,
) -> Result<u64, EntropyError> {
    let depth = (params.k as usize) * (params.m as usize);
    let (x0, x1, y0, y1) = cert.v.bounding_box();
    let rect = Rect::new(x0, x1, y0, y1);
    count_backward(
        spec,
        &cert.v,
        &params.superattracting_exclusion,
        rect,
        params.base_point,
        depth,
        params.epsilon,
        cert.n as usize,
        depth,
    )
}

#[allow(clippy::too_many_arguments)]
fn count_backward(
    spec: &FunctionSpec,
    v: &PlanarDomain,
    exclusions: &[ExclusionDisk],
    rect: Rect,
    y: Complex64,
    depth: usize,
    epsilon: f64,
    branch_cap: usize,
    total_depth: usize,
) -> Result<u64, EntropyError> {
    if depth == 0 {
        return Ok(1);
    }
    let admit = |p: Complex64| v.contains(p) && outside_exclusions(p, exclusions);
    let stop = SolveStop {
        needed: 2 * branch_cap,
        admit: &admit,
    };
    // The solver's grazing guard is relative to the target modulus, which
    // grows with the domain scale; a fixed spatial tolerance would force
    // deep boxes entirely inside the graze zone of their own solution, so
    // the isolation tolerance must scale with the search box as well.
    let span = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    let solve_params = SolveParams {
        cluster_tol: 1e-6_f64.max(1e-9 * span),
        ..SolveParams::default()
    };
    let found = solver::isolate_preimages_capped(spec, y, rect, solve_params, Some(stop))
        .map_err(|e| match e {
            SolverError::SubdivisionBudgetExceeded => EntropyError::EnumerationBudgetExceeded(
                format!("inverting a node at remaining depth {depth} exhausted the box budget"),
            ),
            other => EntropyError::from(other),
        })?;
    let mut children: Vec<Complex64> = found
        .into_iter()
        .map(|p| p.location)
        .filter(|&p| admit(p))
        .collect();
    children.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite preimages")
    });
    let mut kept: Vec<Complex64> = Vec::new();
    for p in children {
        if kept.iter().all(|&q| (p - q).norm() >= epsilon) {
            kept.push(p);
        }
        if kept.len() == branch_cap {
            break;
        }
    }
    // Parallelize across siblings on the top two generations only; the
    // per-branch counts are exact, so the associative sum is
    // order-independent.
    if total_depth - depth < 2 && kept.len() > 1 {
        let counts: Result<Vec<u64>, EntropyError> = kept
            .par_iter()
            .map(|&p| {
                count_backward(
                    spec,
                    v,
                    exclusions,
                    rect,
                    p,
                    depth - 1,
                    epsilon,
                    branch_cap,
                    total_depth,
                )
            })
            .collect();
        Ok(counts?.into_iter().sum())
    } else {
        let mut total = 0u64;
        for p in kept {
            total += count_backward(
                spec,
                v,
                exclusions,
                rect,
                p,
                depth - 1,
                epsilon,
                branch_cap,
                total_depth,
            )?;
        }
        Ok(total)
    }
}

/// Theoretical entropy floor `log n − log(degree_product)/m`.
pub fn entropy_floor(n: u32, degree_product: u64, m: u32) -> f64 {
    assert!(n >= 1 && degree_product >= 1 && m >= 1);
    (n as f64).ln() - (degree_product as f64).ln() / m as f64
}

/// Measured entropy bound from one backward-orbit enumeration, with the
/// theoretical floor it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateBound {
    /// `log(separated_count) / (k·m)`.
    pub entropy_lower: f64,
    /// `log N − log(degree_product)/m`.
    pub floor: f64,
    pub separated_count: u64,
    pub k: u32,
    pub m: u32,
    pub degree_product: u64,
    /// Whether the measured count reaches `(N^m / degree_product)^k`.
    pub meets_floor: bool,
}

/// Run the backward enumeration for `cert` and report the measured
/// entropy bound next to the theoretical floor. The enumeration is itself
/// a lower bound, so falling short of the floor is reported as a margin,
/// not an error.
pub fn certificate_entropy_bound(
    spec: &FunctionSpec,
    cert: &CoveringCertificate,
    params: &BackwardOrbitParams,
) -> Result<CertificateBound, EntropyError> {
    assert!(params.m >= 1 && params.k >= 1, "need m ≥ 1 and k ≥ 1");
    let crit = critical_data(spec, &cert.v, 64)?;
    let count = backward_orbit_separated_count(spec, cert, params)?;
    let km = (params.k * params.m) as f64;
    let entropy_lower = if count > 0 { (count as f64).ln() / km } else { 0.0 };
    let floor = entropy_floor(cert.n, crit.degree_product, params.m);
    let ln_required = params.k as f64
        * (params.m as f64 * (cert.n as f64).ln() - (crit.degree_product as f64).ln());
    let meets_floor = count > 0 && (count as f64).ln() >= ln_required - 1e-9;
    Ok(CertificateBound {
        entropy_lower,
        floor,
        separated_count: count,
        k: params.k,
        m: params.m,
        degree_product: crit.degree_product,
        meets_floor,
    })
}
