//! Isolation of the solutions of `f(z) = w` inside an axis-aligned
//! rectangle by recursive boundary-winding subdivision.
//!
//! A rectangle whose boundary winding of `f − w` is positive encloses that
//! many solutions (with multiplicity). Such boxes are split into four
//! children, visited in Morton order (SW, SE, NW, NE), until each surviving
//! box is smaller than the cluster tolerance; every emitted cluster carries
//! the multiplicity-counted number of solutions it encloses. Children
//! always tile their parent exactly — when a solution grazes a split line
//! the split is retried at a jittered position instead of nudging boxes,
//! so counts are conserved level by level. Simple clusters are polished by
//! Newton steps with a numeric derivative.

use crate::cjson;
use crate::function_model::{FunctionError, FunctionSpec, LogSample};
use crate::plane_domains::{wrap_angle, PlanarDomain};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};
use thiserror::Error;

/// Split-position candidates (fractions of the box side). The first that
/// yields clean winding counts on all four children is used.
const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.46, 0.54, 0.42, 0.58, 0.35, 0.65];
/// Expansion factors tried when a solution grazes the outer rectangle.
const TOP_EXPANSIONS: [f64; 6] = [1.0, 1.000_37, 1.000_91, 1.001_73, 1.002_9, 1.004_3];
/// Per-edge bisection depth before a box is declared grazed.
const EDGE_DEPTH_CAP: u32 = 32;
/// Image-argument step under which an edge piece counts as tame.
const TAME_ARG_STEP: f64 = std::f64::consts::FRAC_PI_4;
/// Image log-modulus step under which an edge piece counts as tame.
const TAME_LN_STEP: f64 = 0.7;
/// Hard cap on the derivative-driven initial subdivision of one box edge.
const MAX_EDGE_PIECES: usize = 1024;
/// Relative distance below which a target counts as grazing a box edge.
const GRAZE_REL: f64 = 1e-11;
/// Largest accepted distance between a winding sum and an integer.
const RESIDUAL_TOL: f64 = 0.25;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("subdivision budget exhausted before clusters reached the requested size")]
    SubdivisionBudgetExceeded,
    #[error("no split position produced clean counts (solution pinned to every tried line)")]
    SplitExhausted,
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// Axis-aligned solve window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// Bounding box of a domain, inflated by a relative margin so that
    /// solutions sitting exactly on the domain boundary stay interior to
    /// the solve window.
    pub fn around_domain(domain: &PlanarDomain, inflate_rel: f64) -> Self {
        let (x0, x1, y0, y1) = domain.bounding_box();
        let pad = inflate_rel * (x1 - x0).max(y1 - y0).max(1.0);
        Self::new(x0 - pad, x1 + pad, y0 - pad, y1 + pad)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn diagonal(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    fn expanded(&self, factor: f64) -> Self {
        let c = self.center();
        let hw = 0.5 * (self.x1 - self.x0) * factor;
        let hh = 0.5 * (self.y1 - self.y0) * factor;
        Self::new(c.re - hw, c.re + hw, c.im - hh, c.im + hh)
    }
}

/// One isolated solution cluster of `f(z) = w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preimage {
    #[serde(with = "cjson::c")]
    pub location: Complex64,
    /// Multiplicity-counted number of solutions in the emitting box.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveParams {
    /// Boxes at most this large (diagonal) are emitted as clusters.
    pub cluster_tol: f64,
    /// Total boxes the subdivision may open.
    pub max_boxes: usize,
    /// Newton-polish simple clusters to near machine accuracy.
    pub polish: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-6,
            max_boxes: 200_000,
            polish: true,
        }
    }
}

/// Early-stop rule: stop once `needed` emitted clusters satisfy `admit`.
/// Emission order is deterministic Morton depth-first order, so capped and
/// uncapped runs agree on the clusters they share.
pub struct SolveStop<'a> {
    pub needed: usize,
    pub admit: &'a dyn Fn(Complex64) -> bool,
}

enum BoxCount {
    Count(u32),
    Grazing,
}

struct Search<'a> {
    spec: &'a FunctionSpec,
    w: Complex64,
    params: SolveParams,
    boxes_used: usize,
    found: Vec<Preimage>,
    admitted: usize,
    stop: Option<SolveStop<'a>>,
}

/// Isolate every solution of `f(z) = w` in `rect`.
pub fn isolate_preimages(
    spec: &FunctionSpec,
    w: Complex64,
    rect: Rect,
    params: SolveParams,
) -> Result<Vec<Preimage>, SolverError> {
    isolate_preimages_capped(spec, w, rect, params, None)
}

/// As [`isolate_preimages`], optionally stopping early once enough
/// admissible clusters have been emitted.
pub fn isolate_preimages_capped(
    spec: &FunctionSpec,
    w: Complex64,
    rect: Rect,
    params: SolveParams,
    stop: Option<SolveStop<'_>>,
) -> Result<Vec<Preimage>, SolverError> {
    let mut search = Search {
        spec,
        w,
        params,
        boxes_used: 0,
        found: Vec::new(),
        admitted: 0,
        stop,
    };
    for factor in TOP_EXPANSIONS {
        let top = rect.expanded(factor);
        match search.box_count(&top)? {
            BoxCount::Grazing => continue,
            BoxCount::Count(0) => return Ok(Vec::new()),
            BoxCount::Count(n) => {
                search.descend(&top, n)?;
                return Ok(search.found);
            }
        }
    }
    Err(SolverError::SplitExhausted)
}

impl Search<'_> {
    /// Returns true when the early-stop quota has been met.
    fn emit(&mut self, rect: &Rect, count: u32) -> Result<bool, SolverError> {
        let mut location = rect.center();
        if count == 1 && self.params.polish {
            if let Some(z) = self.newton_polish(location)? {
                // A polished point may drift a hair outside its box; any
                // drift beyond one box size means the polish went astray.
                if (z - location).norm() <= 2.0 * rect.diagonal() {
                    location = z;
                }
            }
        }
        self.found.push(Preimage {
            location,
            multiplicity: count,
        });
        if let Some(stop) = &self.stop {
            if (stop.admit)(location) {
                self.admitted += 1;
            }
            return Ok(self.admitted >= stop.needed);
        }
        Ok(false)
    }

    fn newton_polish(&self, start: Complex64) -> Result<Option<Complex64>, SolverError> {
        let tol = 1e-12 * (1.0 + self.w.norm());
        let mut z = start;
        for _ in 0..24 {
            let fz = self.spec.evaluate(z)? - self.w;
            if fz.norm() <= tol {
                return Ok(Some(z));
            }
            let h = 1e-7 * (1.0 + z.norm());
            let d = (self.spec.evaluate(z + Complex64::new(h, 0.0))?
                - self.spec.evaluate(z - Complex64::new(h, 0.0))?)
                / Complex64::new(2.0 * h, 0.0);
            if d.norm() == 0.0 || !d.is_finite() {
                return Ok(None);
            }
            let next = z - fz / d;
            if !next.is_finite() {
                return Ok(None);
            }
            z = next;
        }
        let fz = self.spec.evaluate(z)? - self.w;
        Ok((fz.norm() <= 1e-8 * (1.0 + self.w.norm())).then_some(z))
    }

    /// Depth-first Morton subdivision. Returns true when early-stopped.
    fn descend(&mut self, rect: &Rect, count: u32) -> Result<bool, SolverError> {
        if rect.diagonal() <= self.params.cluster_tol {
            return self.emit(rect, count);
        }
        'split: for t in SPLIT_FRACTIONS {
            let mx = rect.x0 + t * (rect.x1 - rect.x0);
            let my = rect.y0 + t * (rect.y1 - rect.y0);
            let children = [
                Rect::new(rect.x0, mx, rect.y0, my),
                Rect::new(mx, rect.x1, rect.y0, my),
                Rect::new(rect.x0, mx, my, rect.y1),
                Rect::new(mx, rect.x1, my, rect.y1),
            ];
            self.boxes_used += children.len();
            if self.boxes_used > self.params.max_boxes {
                return Err(SolverError::SubdivisionBudgetExceeded);
            }
            let mut counts = [0u32; 4];
            for (child, slot) in children.iter().zip(counts.iter_mut()) {
                match self.box_count(child)? {
                    BoxCount::Grazing => continue 'split,
                    BoxCount::Count(n) => *slot = n,
                }
            }
            if counts.iter().sum::<u32>() != count {
                continue 'split;
            }
            for (child, n) in children.iter().zip(counts) {
                if n > 0 && self.descend(child, n)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        Err(SolverError::SplitExhausted)
    }

    /// Derivative-aware pitch for one box edge: pieces short enough that
    /// `len · |f′/f| ≤ π/4`, so the image argument cannot silently wrap a
    /// full turn between consecutive samples.
    fn edge_pieces(&self, a: Complex64, b: Complex64) -> usize {
        crate::function_model::arg_safe_pieces(self.spec, a, b, TAME_ARG_STEP, MAX_EDGE_PIECES)
    }

    fn box_count(&self, rect: &Rect) -> Result<BoxCount, SolverError> {
        let corners = [
            Complex64::new(rect.x0, rect.y0),
            Complex64::new(rect.x1, rect.y0),
            Complex64::new(rect.x1, rect.y1),
            Complex64::new(rect.x0, rect.y1),
        ];
        let mut samples = [LogSample {
            ln_mod: 0.0,
            arg: 0.0,
        }; 4];
        for (c, s) in corners.iter().zip(samples.iter_mut()) {
            *s = self.spec.eval_log(*c)?;
        }
        let graze_ln = (GRAZE_REL * (1.0 + self.w.norm())).ln();
        let mut total = 0.0;
        for i in 0..4 {
            let j = (i + 1) % 4;
            let (a, b) = (corners[i], corners[j]);
            let pieces = self.edge_pieces(a, b);
            let mut prev = (a, samples[i]);
            for k in 1..=pieces {
                let (p, fp) = if k == pieces {
                    (b, samples[j])
                } else {
                    let p = a + (b - a) * (k as f64 / pieces as f64);
                    (p, self.spec.eval_log(p)?)
                };
                match self.edge_turn(prev.0, prev.1, p, fp, graze_ln, 0)? {
                    Some(step) => total += step,
                    None => return Ok(BoxCount::Grazing),
                }
                prev = (p, fp);
            }
        }
        let turns = total / TAU;
        let rounded = turns.round();
        if (turns - rounded).abs() > RESIDUAL_TOL || rounded < -0.5 {
            return Ok(BoxCount::Grazing);
        }
        Ok(BoxCount::Count(rounded as u32))
    }

    /// Argument increment of `f − w` along one box edge; `None` marks a
    /// grazing target (exact hit, tiny gap, or bisection that will not
    /// settle — the caller re-splits elsewhere in every such case).
    fn edge_turn(
        &self,
        a: Complex64,
        fa: LogSample,
        b: Complex64,
        fb: LogSample,
        graze_ln: f64,
        depth: u32,
    ) -> Result<Option<f64>, SolverError> {
        let (da, db) = match (fa.diff_from(self.w), fb.diff_from(self.w)) {
            (Some(da), Some(db)) => (da, db),
            _ => return Ok(None),
        };
        if da.ln_mod < graze_ln || db.ln_mod < graze_ln {
            return Ok(None);
        }
        // The image of the raw edge must itself move slowly before the
        // argument step of f − w can be trusted: a long edge can wind the
        // image a full extra turn while the endpoint arguments wrap back
        // within the step limit.
        let image_tame = wrap_angle(fb.arg - fa.arg).abs() <= TAME_ARG_STEP
            && (fb.ln_mod - fa.ln_mod).abs() <= TAME_LN_STEP;
        let step = wrap_angle(db.arg - da.arg);
        if image_tame && step.abs() <= FRAC_PI_2 {
            return Ok(Some(step));
        }
        if depth >= EDGE_DEPTH_CAP {
            return Ok(None);
        }
        let m = 0.5 * (a + b);
        let fm = self.spec.eval_log(m)?;
        let left = self.edge_turn(a, fa, m, fm, graze_ln, depth + 1)?;
        let right = self.edge_turn(m, fm, b, fb, graze_ln, depth + 1)?;
        Ok(match (left, right) {
            (Some(l), Some(r)) => Some(l + r),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_by_position(mut v: Vec<Preimage>) -> Vec<Preimage> {
        v.sort_by(|a, b| {
            (a.location.re, a.location.im)
                .partial_cmp(&(b.location.re, b.location.im))
                .unwrap()
        });
        v
    }

    #[test]
    fn exponential_branches_in_rectangle() {
        let spec = FunctionSpec::ExpAffine {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let rect = Rect::new(-9.0, 9.0, -9.0, 9.0);
        let mut got =
            isolate_preimages(&spec, Complex64::new(2.0, 0.0), rect, SolveParams::default())
                .unwrap();
        // The branches share their real part, so order by height.
        got.sort_by(|a, b| a.location.im.partial_cmp(&b.location.im).unwrap());
        assert_eq!(got.len(), 3);
        let ln2 = 2.0_f64.ln();
        for (p, expected_im) in got.iter().zip([-TAU, 0.0, TAU]) {
            assert_eq!(p.multiplicity, 1);
            assert!(
                (p.location - Complex64::new(ln2, expected_im)).norm() < 1e-7,
                "got {}",
                p.location
            );
        }
    }

    #[test]
    fn double_root_on_split_line_is_one_cluster() {
        let square = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        // The double root at 0 sits exactly on the first split line of the
        // symmetric box, forcing the jittered-split path.
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let params = SolveParams {
            cluster_tol: 1e-4,
            ..SolveParams::default()
        };
        let got = isolate_preimages(&square, Complex64::new(0.0, 0.0), rect, params).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].multiplicity, 2);
        assert!(got[0].location.norm() < 1e-3);
    }

    #[test]
    fn cubic_roots_are_isolated_and_polished() {
        let cubic = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(-3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let rect = Rect::new(-3.0, 3.0, -3.0, 3.0);
        let got = sort_by_position(
            isolate_preimages(&cubic, Complex64::new(0.0, 0.0), rect, SolveParams::default())
                .unwrap(),
        );
        assert_eq!(got.len(), 3);
        let expected = [-(3.0_f64.sqrt()), 0.0, 3.0_f64.sqrt()];
        for (p, x) in got.iter().zip(expected) {
            assert_eq!(p.multiplicity, 1);
            assert!((p.location - Complex64::new(x, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn no_solutions_yields_empty_list() {
        let square = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let got = isolate_preimages(
            &square,
            Complex64::new(100.0, 0.0),
            rect,
            SolveParams::default(),
        )
        .unwrap();
        assert!(got.is_empty());
    }

    #[test]
    fn tiny_budget_is_reported() {
        let cubic = FunctionSpec::Polynomial {
            coeffs: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(-3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
        let rect = Rect::new(-3.0, 3.0, -3.0, 3.0);
        let params = SolveParams {
            cluster_tol: 1e-12,
            max_boxes: 8,
            polish: false,
        };
        assert!(matches!(
            isolate_preimages(&cubic, Complex64::new(0.0, 0.0), rect, params),
            Err(SolverError::SubdivisionBudgetExceeded)
        ));
    }

    #[test]
    fn early_stop_is_deterministic() {
        let spec = FunctionSpec::ExpAffine {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        let rect = Rect::new(-9.0, 9.0, -50.0, 50.0);
        let admit = |z: Complex64| z.im.abs() > 1.0;
        let run = || {
            isolate_preimages_capped(
                &spec,
                Complex64::new(2.0, 0.0),
                rect,
                SolveParams::default(),
                Some(SolveStop {
                    needed: 4,
                    admit: &admit,
                }),
            )
            .unwrap()
        };
        let first = run();
        let second = run();
        assert_eq!(first, second);
        let admitted = first.iter().filter(|p| admit(p.location)).count();
        assert!(admitted >= 4, "admitted {admitted}");
        // The full rectangle holds 15 branches; the cap must save work.
        assert!(first.len() < 15, "found {}", first.len());
    }
}
