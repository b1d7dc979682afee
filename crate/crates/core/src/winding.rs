//! Argument-principle preimage counting on domain boundaries.
//!
//! The number of solutions of `f(z) = w` inside a bounded domain, counted
//! with multiplicity, equals the winding number of the boundary image
//! `f(∂D)` about `w`. This module walks domain boundaries in log form
//! ([`LogSample`]), refines every step until the image turns slowly enough
//! for the winding sum to be unambiguous, and rejects targets that come
//! numerically too close to the boundary image. A sampled Rouché margin
//! transfers a single verified count to every target in a disk.
//!
//! Counting is multiplicity-inherent: a double root contributes 2. No root
//! locations are produced here.

use crate::cjson;
use crate::function_model::{FunctionError, FunctionSpec, LogSample};
use crate::plane_domains::{wrap_angle, DomainError, PlanarDomain};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use thiserror::Error;

/// Image-argument step allowed after the target-independent preparation.
const BASE_MAX_ARG_STEP: f64 = FRAC_PI_4;
/// Image log-modulus step allowed after the target-independent preparation.
const BASE_MAX_LN_STEP: f64 = 0.7;
/// Hard ceiling for a single argument step of `f − w` when counting; a
/// quarter turn keeps the rounded total robust (correctness only needs a
/// half turn).
const COUNT_MAX_ARG_STEP: f64 = FRAC_PI_2;
/// Depth cap for per-target bisection of a single prepared edge.
const TRANSIENT_DEPTH_CAP: u32 = 24;
/// Total refined-edge budget, per contour during preparation and per
/// counting call.
const EDGE_BUDGET: usize = 1 << 20;
/// Largest accepted distance between the winding sum and an integer.
const RESIDUAL_TOL: f64 = 0.25;
/// Targets closer than `1e-9·(1+|w|)` to the boundary image are rejected.
const BOUNDARY_HIT_REL: f64 = 1e-9;
/// Depth cap for the target-independent preparation (the point budget
/// normally triggers first; this only guards against runaway recursion on
/// boundary zeros).
const PREPARE_DEPTH_CAP: u32 = 48;
/// Hard cap on the derivative-driven initial subdivision of one chord.
const MAX_CHORD_PIECES: usize = 4096;

#[derive(Debug, Error)]
pub enum WindingError {
    #[error("a boundary sample lies exactly on the target value")]
    OnTarget,
    #[error("argument steps along the image contour are too coarse to count reliably")]
    NeedsRefinement,
    #[error("target too close to the boundary image (gap {gap:.3e})")]
    BoundaryHit { gap: f64 },
    #[error("refinement budget exhausted before the image contour became tame")]
    RefinementBudgetExceeded,
    #[error("transfer margin cannot be certified: {0}")]
    MarginTooSmall(String),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// A verified preimage count for one target value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageCount {
    #[serde(with = "cjson::c")]
    pub target: Complex64,
    pub domain_id: String,
    /// Number of solutions of `f(z) = target` in the domain, counted with
    /// multiplicity.
    pub count: u32,
    /// Minimum over boundary samples of `|f(z) − target|`, saturated at
    /// `f64::MAX` to stay JSON-representable.
    pub min_boundary_gap: f64,
    /// `ln` of the same minimum; exact even when the plain value saturates.
    pub ln_min_boundary_gap: f64,
    /// Deepest per-target bisection that was needed.
    pub refinement_depth: u32,
}

/// Winding number of a closed polyline about `w`, from summed argument
/// increments. Rejects the input rather than guess: any single step turning
/// by more than a quarter turn, or a total further than [`RESIDUAL_TOL`]
/// from an integer multiple of 2π, yields [`WindingError::NeedsRefinement`].
pub fn winding_number(image_points: &[Complex64], w: Complex64) -> Result<i64, WindingError> {
    if image_points.len() < 3 {
        return Err(WindingError::NeedsRefinement);
    }
    let mut args = Vec::with_capacity(image_points.len());
    for p in image_points {
        let d = p - w;
        if d.norm() == 0.0 {
            return Err(WindingError::OnTarget);
        }
        args.push(d.arg());
    }
    let mut total = 0.0;
    for i in 0..args.len() {
        let step = wrap_angle(args[(i + 1) % args.len()] - args[i]);
        if step.abs() > COUNT_MAX_ARG_STEP {
            return Err(WindingError::NeedsRefinement);
        }
        total += step;
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > RESIDUAL_TOL {
        return Err(WindingError::NeedsRefinement);
    }
    Ok(rounded as i64)
}

/// A domain boundary with cached image samples, refined (independently of
/// any target) until consecutive image samples differ by at most
/// [`BASE_MAX_ARG_STEP`] in argument and [`BASE_MAX_LN_STEP`] in
/// log-modulus. Preparing once and counting many targets amortizes the
/// function evaluations; per-target refinement is transient and bounded.
pub struct PreparedBoundary<'a> {
    spec: &'a FunctionSpec,
    domain_id: String,
    contours: Vec<PreparedContour>,
}

struct PreparedContour {
    z: Vec<Complex64>,
    f: Vec<LogSample>,
}

impl<'a> PreparedBoundary<'a> {
    pub fn new(spec: &'a FunctionSpec, domain: &PlanarDomain) -> Result<Self, WindingError> {
        Self::with_max_edge(spec, domain, domain.scale() / 64.0)
    }

    /// As [`PreparedBoundary::new`] with an explicit cap on the initial
    /// boundary chord length (in domain units).
    pub fn with_max_edge(
        spec: &'a FunctionSpec,
        domain: &PlanarDomain,
        max_edge: f64,
    ) -> Result<Self, WindingError> {
        let mut contours = Vec::new();
        for c in domain.boundary_contour(max_edge)? {
            let pts = &c.points;
            let n = pts.len();
            let samples = pts
                .iter()
                .map(|&p| spec.eval_log(p))
                .collect::<Result<Vec<_>, _>>()?;
            let mut z = Vec::with_capacity(2 * n);
            let mut f = Vec::with_capacity(2 * n);
            for i in 0..n {
                z.push(pts[i]);
                f.push(samples[i]);
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                let fb = samples[(i + 1) % n];
                // Cut the chord so the image argument cannot wrap a full
                // turn between samples before the tameness checks run.
                let pieces = crate::function_model::arg_safe_pieces(
                    spec,
                    a,
                    b,
                    BASE_MAX_ARG_STEP,
                    MAX_CHORD_PIECES,
                );
                let mut prev = (a, samples[i]);
                for k in 1..=pieces {
                    let (p, fp) = if k == pieces {
                        (b, fb)
                    } else {
                        let p = a + (b - a) * (k as f64 / pieces as f64);
                        (p, spec.eval_log(p)?)
                    };
                    push_refined(spec, prev.0, prev.1, p, fp, &mut z, &mut f, 0)?;
                    if k != pieces {
                        z.push(p);
                        f.push(fp);
                    }
                    prev = (p, fp);
                }
                if z.len() > EDGE_BUDGET {
                    return Err(WindingError::RefinementBudgetExceeded);
                }
            }
            contours.push(PreparedContour { z, f });
        }
        Ok(Self {
            spec,
            domain_id: domain.label.clone(),
            contours,
        })
    }

    /// Count the preimages of `w` by walking every prepared contour. Hole
    /// contours are stored in clockwise order, so their winding enters the
    /// sum with a negative sign and the total is the count inside the
    /// domain itself.
    pub fn count(&self, w: Complex64) -> Result<PreimageCount, WindingError> {
        let hit_ln = (BOUNDARY_HIT_REL * (1.0 + w.norm())).ln();
        let mut min_ln_gap = f64::INFINITY;
        let mut max_depth = 0u32;
        let mut edges_used = 0usize;
        let mut total = 0i64;
        for contour in &self.contours {
            let n = contour.z.len();
            let mut diffs = Vec::with_capacity(n);
            for s in &contour.f {
                let d = s
                    .diff_from(w)
                    .ok_or(WindingError::BoundaryHit { gap: 0.0 })?;
                min_ln_gap = min_ln_gap.min(d.ln_mod);
                diffs.push(d);
            }
            if min_ln_gap < hit_ln {
                return Err(WindingError::BoundaryHit {
                    gap: min_ln_gap.exp(),
                });
            }
            let mut turn = 0.0;
            for i in 0..n {
                let j = (i + 1) % n;
                let step = wrap_angle(diffs[j].arg - diffs[i].arg);
                if step.abs() > COUNT_MAX_ARG_STEP {
                    turn += self.bisected_turn(
                        contour.z[i],
                        contour.f[i],
                        contour.z[j],
                        contour.f[j],
                        w,
                        hit_ln,
                        0,
                        &mut min_ln_gap,
                        &mut max_depth,
                        &mut edges_used,
                    )?;
                } else {
                    turn += step;
                }
            }
            let turns = turn / TAU;
            let rounded = turns.round();
            if (turns - rounded).abs() > RESIDUAL_TOL {
                return Err(WindingError::NeedsRefinement);
            }
            total += rounded as i64;
        }
        if total < 0 {
            return Err(WindingError::NeedsRefinement);
        }
        Ok(PreimageCount {
            target: w,
            domain_id: self.domain_id.clone(),
            count: total as u32,
            min_boundary_gap: min_ln_gap.exp().min(f64::MAX),
            ln_min_boundary_gap: min_ln_gap,
            refinement_depth: max_depth,
        })
    }

    /// Argument increment of `f − w` along one prepared edge, bisecting
    /// until every substep turns by at most a quarter turn.
    #[allow(clippy::too_many_arguments)]
    fn bisected_turn(
        &self,
        za: Complex64,
        fa: LogSample,
        zb: Complex64,
        fb: LogSample,
        w: Complex64,
        hit_ln: f64,
        depth: u32,
        min_ln_gap: &mut f64,
        max_depth: &mut u32,
        edges_used: &mut usize,
    ) -> Result<f64, WindingError> {
        let da = fa
            .diff_from(w)
            .ok_or(WindingError::BoundaryHit { gap: 0.0 })?;
        let db = fb
            .diff_from(w)
            .ok_or(WindingError::BoundaryHit { gap: 0.0 })?;
        let step = wrap_angle(db.arg - da.arg);
        if step.abs() <= COUNT_MAX_ARG_STEP {
            return Ok(step);
        }
        if depth >= TRANSIENT_DEPTH_CAP {
            return Err(WindingError::RefinementBudgetExceeded);
        }
        *edges_used += 1;
        if *edges_used > EDGE_BUDGET {
            return Err(WindingError::RefinementBudgetExceeded);
        }
        *max_depth = (*max_depth).max(depth + 1);
        let zm = 0.5 * (za + zb);
        let fm = self.spec.eval_log(zm)?;
        if let Some(dm) = fm.diff_from(w) {
            *min_ln_gap = min_ln_gap.min(dm.ln_mod);
            if dm.ln_mod < hit_ln {
                return Err(WindingError::BoundaryHit {
                    gap: dm.ln_mod.exp(),
                });
            }
        } else {
            return Err(WindingError::BoundaryHit { gap: 0.0 });
        }
        let left = self.bisected_turn(
            za, fa, zm, fm, w, hit_ln, depth + 1, min_ln_gap, max_depth, edges_used,
        )?;
        let right = self.bisected_turn(
            zm, fm, zb, fb, w, hit_ln, depth + 1, min_ln_gap, max_depth, edges_used,
        )?;
        Ok(left + right)
    }
}

/// Refine the open edge `(a, b)` during preparation, appending interior
/// points (endpoints excluded) so that consecutive image samples are tame.
#[allow(clippy::too_many_arguments)]
fn push_refined(
    spec: &FunctionSpec,
    a: Complex64,
    fa: LogSample,
    b: Complex64,
    fb: LogSample,
    z: &mut Vec<Complex64>,
    f: &mut Vec<LogSample>,
    depth: u32,
) -> Result<(), WindingError> {
    let tame = wrap_angle(fb.arg - fa.arg).abs() <= BASE_MAX_ARG_STEP
        && (fb.ln_mod - fa.ln_mod).abs() <= BASE_MAX_LN_STEP;
    if tame {
        return Ok(());
    }
    if depth >= PREPARE_DEPTH_CAP || z.len() >= EDGE_BUDGET {
        return Err(WindingError::RefinementBudgetExceeded);
    }
    let m = 0.5 * (a + b);
    let fm = spec.eval_log(m)?;
    push_refined(spec, a, fa, m, fm, z, f, depth + 1)?;
    z.push(m);
    f.push(fm);
    push_refined(spec, m, fm, b, fb, z, f, depth + 1)
}

/// Convenience wrapper: prepare the boundary of `domain` for `spec` and
/// count the preimages of a single target.
pub fn count_preimages(
    spec: &FunctionSpec,
    domain: &PlanarDomain,
    w: Complex64,
) -> Result<PreimageCount, WindingError> {
    PreparedBoundary::new(spec, domain)?.count(w)
}

/// A certificate that one verified count applies to a whole disk of
/// targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoucheCertificate {
    pub domain_id: String,
    /// Preimage count shared by every target in `|w| < radius`.
    pub count: u32,
    pub radius: f64,
    /// Certified lower bound for `ln|f|` on the whole boundary.
    pub certified_ln_min: f64,
    /// `certified_ln_min − ln(radius)`; positive spare factor in log units.
    pub ln_margin: f64,
    /// How the boundary bound was obtained.
    pub method: String,
}

/// Certify `|f| ≥ r` on the domain boundary and transfer the preimage
/// count of `xi` to every target in `Δ(0, r)`.
///
/// The boundary bound interpolates sampled values: on each prepared edge,
/// `ln|f|` is bounded below by the smaller endpoint sample minus the edge
/// half-length times the log-derivative modulus sampled at the edge
/// midpoint. This is honest numerics (sampled, not formally verified) and
/// the certificate's `method` field says so.
pub fn rouche_transfer(
    spec: &FunctionSpec,
    domain: &PlanarDomain,
    r: f64,
    xi: Complex64,
) -> Result<RoucheCertificate, WindingError> {
    if !(r > 0.0) {
        return Err(WindingError::MarginTooSmall(
            "certified radius must be positive".into(),
        ));
    }
    if !(xi.norm() < r) {
        return Err(WindingError::MarginTooSmall(format!(
            "representative target |xi| = {} must lie inside the certified disk of radius {r}",
            xi.norm()
        )));
    }
    let pb = PreparedBoundary::new(spec, domain)?;
    let mut certified = f64::INFINITY;
    for contour in &pb.contours {
        let n = contour.z.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (contour.z[i], contour.z[j]);
            let slope = spec.log_derivative(0.5 * (a + b))?.norm();
            let bound =
                contour.f[i].ln_mod.min(contour.f[j].ln_mod) - 0.5 * (b - a).norm() * slope;
            certified = certified.min(bound);
        }
    }
    if !(certified > r.ln()) {
        return Err(WindingError::MarginTooSmall(format!(
            "certified boundary log-modulus {certified} does not exceed ln r = {}",
            r.ln()
        )));
    }
    let count = pb.count(xi)?;
    Ok(RoucheCertificate {
        domain_id: domain.label.clone(),
        count: count.count,
        radius: r,
        certified_ln_min: certified,
        ln_margin: certified - r.ln(),
        method: "sampled boundary minima minus edge half-length times midpoint log-derivative; \
                 sampled estimate, not a formal proof"
            .into(),
    })
}

/// One grid target inside the covering report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCount {
    #[serde(with = "cjson::c")]
    pub w: Complex64,
    pub count: u32,
    pub min_boundary_gap: f64,
}

/// Preimage counts over a grid of targets: the evidence that `f` covers
/// `target` at least `n_required` times from within `source`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringGridReport {
    pub source_id: String,
    pub target_id: String,
    pub n_required: u32,
    pub grid_step: f64,
    /// Countable grid targets in row-major order.
    pub points: Vec<GridCount>,
    /// Minimum count over `points`; absent when no target was countable.
    pub min_count: Option<u32>,
    /// Targets with `count < n_required`, in grid order.
    #[serde(with = "cjson::vec_c")]
    pub failing: Vec<Complex64>,
    /// Targets skipped because they graze the boundary image.
    #[serde(with = "cjson::vec_c")]
    pub skipped: Vec<Complex64>,
    /// Fraction of countable targets with `count ≥ n_required` (0 when none
    /// are countable).
    pub fraction_meeting: f64,
}

/// Count preimages (inside `source`) of every interior grid point of
/// `target`. Targets that graze the boundary image are reported as skipped
/// rather than failing the whole report. Counts run in parallel; the output
/// order is the deterministic row-major grid order.
pub fn covering_report(
    spec: &FunctionSpec,
    source: &PlanarDomain,
    target: &PlanarDomain,
    grid_step: f64,
    n_required: u32,
) -> Result<CoveringGridReport, WindingError> {
    if !(grid_step > 0.0) {
        return Err(WindingError::Domain(DomainError::DegenerateDomain(
            "grid step must be positive".into(),
        )));
    }
    let pb = PreparedBoundary::new(spec, source)?;
    let (x0, x1, y0, y1) = target.bounding_box();
    let mut ws = Vec::new();
    let mut y = y0 + 0.5 * grid_step;
    while y < y1 {
        let mut x = x0 + 0.5 * grid_step;
        while x < x1 {
            let w = Complex64::new(x, y);
            if target.contains(w) {
                ws.push(w);
            }
            x += grid_step;
        }
        y += grid_step;
    }
    let results: Vec<Result<PreimageCount, WindingError>> =
        ws.par_iter().map(|&w| pb.count(w)).collect();
    let mut points = Vec::new();
    let mut failing = Vec::new();
    let mut skipped = Vec::new();
    let mut min_count: Option<u32> = None;
    let mut meeting = 0usize;
    for (w, res) in ws.iter().zip(results) {
        match res {
            Ok(pc) => {
                min_count = Some(min_count.map_or(pc.count, |m| m.min(pc.count)));
                if pc.count >= n_required {
                    meeting += 1;
                } else {
                    failing.push(*w);
                }
                points.push(GridCount {
                    w: *w,
                    count: pc.count,
                    min_boundary_gap: pc.min_boundary_gap,
                });
            }
            Err(WindingError::BoundaryHit { .. }) => skipped.push(*w),
            Err(e) => return Err(e),
        }
    }
    let fraction_meeting = if points.is_empty() {
        0.0
    } else {
        meeting as f64 / points.len() as f64
    };
    Ok(CoveringGridReport {
        source_id: source.label.clone(),
        target_id: target.label.clone(),
        n_required,
        grid_step,
        points,
        min_count,
        failing,
        skipped,
        fraction_meeting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_domains::builders::{build_annulus, build_disk};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn circle_points(n: usize, turns: usize) -> Vec<Complex64> {
        (0..n * turns)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect()
    }

    fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * rng.gen::<f64>()
    }

    #[test]
    fn raw_winding_circle_examples() {
        let circle = circle_points(256, 1);
        assert_eq!(winding_number(&circle, Complex64::new(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&circle, Complex64::new(2.0, 0.0)).unwrap(), 0);
        let doubled = circle_points(256, 2);
        assert_eq!(
            winding_number(&doubled, Complex64::new(0.0, 0.0)).unwrap(),
            2
        );
        // A triangle turns by 2π/3 per step about its center: too coarse.
        let triangle = circle_points(3, 1);
        assert!(matches!(
            winding_number(&triangle, Complex64::new(0.0, 0.0)),
            Err(WindingError::NeedsRefinement)
        ));
        assert!(matches!(
            winding_number(&circle, circle[17]),
            Err(WindingError::OnTarget)
        ));
    }

    #[test]
    fn raw_winding_stable_under_doubling() {
        let coarse = circle_points(256, 1);
        let fine = circle_points(512, 1);
        for w in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.4, 0.3),
            Complex64::new(-0.9, 0.0),
            Complex64::new(1.4, -1.2),
        ] {
            assert_eq!(
                winding_number(&coarse, w).unwrap(),
                winding_number(&fine, w).unwrap()
            );
        }
    }

    #[test]
    fn exp_counts_match_logarithm_branch_enumeration() {
        let spec = FunctionSpec::ExpAffine {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let disk = build_disk(Complex64::new(0.0, 0.0), 10.0, "disk10");
        let pb = PreparedBoundary::new(&spec, &disk).unwrap();

        // Reference value: e^z = 1 has solutions 0, ±2πi inside |z| < 10.
        assert_eq!(pb.count(Complex64::new(1.0, 0.0)).unwrap().count, 3);

        let mut rng = ChaCha8Rng::seed_from_u64(405);
        let mut tested = 0;
        while tested < 50 {
            let w = Complex64::from_polar(
                uniform(&mut rng, -3.0, 3.0).exp(),
                uniform(&mut rng, -PI, PI),
            );
            let ln_w = Complex64::new(w.norm().ln(), w.arg());
            let branches: Vec<f64> = (-5..=5)
                .map(|k| (ln_w + Complex64::new(0.0, TAU * k as f64)).norm())
                .collect();
            if branches.iter().any(|&m| (m - 10.0).abs() < 0.05) {
                continue; // too close to the boundary circle for a crisp oracle
            }
            let expected = branches.iter().filter(|&&m| m < 10.0).count() as u32;
            assert_eq!(pb.count(w).unwrap().count, expected, "w = {w}");
            tested += 1;
        }
    }

    #[test]
    fn polynomial_counts_equal_degree_inside_root_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for _ in 0..200 {
            let deg = 1 + (uniform(&mut rng, 0.0, 6.0) as usize).min(5);
            let mut coeffs: Vec<Complex64> = (0..deg)
                .map(|_| Complex64::new(uniform(&mut rng, -1.0, 1.0), uniform(&mut rng, -1.0, 1.0)))
                .collect();
            coeffs.push(Complex64::from_polar(
                uniform(&mut rng, 0.5, 1.5),
                uniform(&mut rng, -PI, PI),
            ));
            let w = Complex64::new(uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0));
            // Cauchy root bound for p(z) − w, with headroom.
            let lead = coeffs[deg].norm();
            let mut biggest = (coeffs[0] - w).norm();
            for c in &coeffs[1..deg] {
                biggest = biggest.max(c.norm());
            }
            let radius = 1.2 * (1.0 + biggest / lead);
            let spec = FunctionSpec::Polynomial {
                coeffs: coeffs.clone(),
            };
            let disk = build_disk(Complex64::new(0.0, 0.0), radius, "root-bound-disk");
            let got = count_preimages(&spec, &disk, w).unwrap();
            assert_eq!(got.count as usize, deg, "coeffs {coeffs:?}, w {w}");
        }
    }

    #[test]
    fn multiplicity_is_counted() {
        let square = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let disk = build_disk(Complex64::new(0.0, 0.0), 3.0, "disk3");
        assert_eq!(
            count_preimages(&square, &disk, Complex64::new(4.0, 0.0))
                .unwrap()
                .count,
            2
        );
        let double_root = count_preimages(&square, &disk, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(double_root.count, 2);
        assert!(double_root.min_boundary_gap > 0.0);

        let json = serde_json::to_string(&double_root).unwrap();
        let back: PreimageCount = serde_json::from_str(&json).unwrap();
        assert_eq!(double_root, back);
    }

    #[test]
    fn hole_contours_subtract_interior_roots() {
        let cube = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let ring = build_annulus(1.0, 2.0, "ring");
        // Roots of z³ = w all share the modulus |w|^(1/3).
        let inside = Complex64::new(-3.375, 0.0); // modulus 1.5 each
        assert_eq!(count_preimages(&cube, &ring, inside).unwrap().count, 3);
        let in_hole = Complex64::new(1e-6, 0.0); // modulus 0.01 each
        assert_eq!(count_preimages(&cube, &ring, in_hole).unwrap().count, 0);
    }

    #[test]
    fn prepared_resolution_does_not_change_counts() {
        let cube = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.5, 0.2),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let disk = build_disk(Complex64::new(0.0, 0.0), 2.0, "disk2");
        let coarse = PreparedBoundary::with_max_edge(&cube, &disk, disk.scale() / 32.0).unwrap();
        let fine = PreparedBoundary::with_max_edge(&cube, &disk, disk.scale() / 64.0).unwrap();
        for w in [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(-2.0, 0.5),
            Complex64::new(3.0, -3.0),
        ] {
            assert_eq!(coarse.count(w).unwrap().count, fine.count(w).unwrap().count);
        }
    }

    #[test]
    fn grazing_targets_are_rejected() {
        let square = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let disk = build_disk(Complex64::new(0.0, 0.0), 1.0, "unit-disk");
        // z = 1 is a boundary sample and maps to exactly 1.
        assert!(matches!(
            count_preimages(&square, &disk, Complex64::new(1.0, 0.0)),
            Err(WindingError::BoundaryHit { .. })
        ));
        // A target within the relative threshold of the boundary image.
        assert!(matches!(
            count_preimages(&square, &disk, Complex64::new(1.0 + 5e-10, 0.0)),
            Err(WindingError::BoundaryHit { .. })
        ));
    }

    #[test]
    fn transfer_certificate_cube() {
        let cube = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let disk = build_disk(Complex64::new(0.0, 0.0), 2.0, "disk2");
        let cert = rouche_transfer(&cube, &disk, 7.0, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(cert.count, 3);
        assert!(cert.ln_margin > 0.0);
        // The certified count must hold for every target in the disk.
        let pb = PreparedBoundary::new(&cube, &disk).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        for _ in 0..50 {
            let w = Complex64::from_polar(
                6.9 * uniform(&mut rng, 0.0, 1.0).sqrt(),
                uniform(&mut rng, -PI, PI),
            );
            assert_eq!(pb.count(w).unwrap().count, 3, "w = {w}");
        }
        // Raising r above the boundary minimum 8 must fail.
        assert!(matches!(
            rouche_transfer(&cube, &disk, 8.5, Complex64::new(0.0, 0.0)),
            Err(WindingError::MarginTooSmall(_))
        ));
    }

    #[test]
    fn transfer_certificate_exponential() {
        let spec = FunctionSpec::ExpAffine {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let disk = build_disk(Complex64::new(0.0, 0.0), 1.0, "unit-disk");
        // |e^z| ≥ e^{−1} on the boundary; certify a slightly smaller disk.
        let cert = rouche_transfer(&spec, &disk, 0.3, Complex64::new(0.1, 0.0)).unwrap();
        // e^z = w with |w| < e^{−1} needs |Re z| > 1: no solutions here.
        assert_eq!(cert.count, 0);
        let pb = PreparedBoundary::new(&spec, &disk).unwrap();
        for w in [Complex64::new(0.25, 0.1), Complex64::new(-0.2, -0.15)] {
            assert_eq!(pb.count(w).unwrap().count, 0);
        }
        // The margin cannot stretch past the boundary minimum.
        assert!(matches!(
            rouche_transfer(&spec, &disk, 0.37, Complex64::new(0.1, 0.0)),
            Err(WindingError::MarginTooSmall(_))
        ));
        // The representative target must lie inside the certified disk.
        assert!(matches!(
            rouche_transfer(&spec, &disk, 0.3, Complex64::new(1.0, 0.0)),
            Err(WindingError::MarginTooSmall(_))
        ));
    }

    #[test]
    fn covering_report_exponential_annulus() {
        let spec = FunctionSpec::ExpAffine {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let source = build_disk(Complex64::new(0.0, 0.0), 10.0, "disk10");
        let target = build_annulus(1.0, 2.0, "target-ring");
        let report = covering_report(&spec, &source, &target, 0.25, 3).unwrap();
        assert!(!report.points.is_empty());
        assert!(report.min_count.unwrap() >= 3);
        assert!(report.failing.is_empty());
        assert_eq!(report.fraction_meeting, 1.0);

        let json = serde_json::to_string(&report).unwrap();
        let back: CoveringGridReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn covering_report_square_unit_disk() {
        let square = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let source = build_disk(Complex64::new(0.0, 0.0), 1.0, "unit-disk");
        let target = build_disk(Complex64::new(0.0, 0.0), 2.0, "disk2");
        let report = covering_report(&square, &source, &target, 0.25, 1).unwrap();
        assert_eq!(report.min_count, Some(0));
        assert!(report.fraction_meeting > 0.0 && report.fraction_meeting < 1.0);
        // The image of the unit disk under z² is the unit disk: failures
        // are exactly the grid targets outside it.
        for w in &report.failing {
            assert!(w.norm() >= 1.0, "unexpected failing target {w}");
        }
        for p in &report.points {
            if p.count >= 1 {
                assert!(p.w.norm() < 1.0, "unexpected meeting target {}", p.w);
            }
        }
    }

    #[test]
    fn covering_report_empty_target_grid() {
        let square = FunctionSpec::Polynomial {
            coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let source = build_disk(Complex64::new(0.0, 0.0), 1.0, "unit-disk");
        let target = build_disk(Complex64::new(0.0, 0.0), 0.05, "dot");
        let report = covering_report(&square, &source, &target, 0.5, 1).unwrap();
        assert!(report.points.is_empty());
        assert_eq!(report.min_count, None);
        assert_eq!(report.fraction_meeting, 0.0);
    }

    #[test]
    fn lacunary_window_consistency() {
        let spec = FunctionSpec::LacunaryProduct {
            zeros: vec![
                Complex64::new(1e2, 0.0),
                Complex64::new(1e4, 0.0),
                Complex64::new(1e8, 0.0),
                Complex64::new(1e16, 0.0),
            ],
            tail_zeros_lower_modulus: 1e32,
        };
        let r = 1e12; // geometric mean of the 3rd and 4th zero moduli
        let outer = build_disk(Complex64::new(0.0, 0.0), 2.0 * r, "outer");
        let inner = build_disk(Complex64::new(0.0, 0.0), r / 2.0, "inner");
        let pb_outer = PreparedBoundary::new(&spec, &outer).unwrap();
        let pb_inner = PreparedBoundary::new(&spec, &inner).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        for _ in 0..8 {
            let w = Complex64::from_polar(
                uniform(&mut rng, 0.55 * r, 1.9 * r),
                uniform(&mut rng, -PI, PI),
            );
            let big = pb_outer.count(w).unwrap().count;
            let small = pb_inner.count(w).unwrap().count;
            assert!(big >= small, "monotone domains: {big} vs {small}");
            assert!(
                big - small <= 1,
                "annulus between the circles is covered at most once: {big} vs {small}"
            );
        }
    }
}
