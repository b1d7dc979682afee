//! Symbolic models of entire functions with exact derivatives, log-space
//! evaluation, and circle scans for extremal moduli.
//!
//! Moduli in this toolkit routinely exceed the `f64` range (`exp(z)` on a
//! circle of radius 400, lacunary products at radius 1e24), so every hot
//! path works with [`LogSample`] values — `(ln |f(z)|, arg f(z))` — and only
//! materializes a complex number when the magnitude is known to fit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cjson;

/// Number of initial angular samples used by circle scans.
pub const CIRCLE_SCAN_SAMPLES: usize = 4096;

/// Magnitudes above `exp(MATERIALIZE_LN_CAP)` are never materialized; linear
/// fields saturate at `exp(MATERIALIZE_LN_CAP)` and log fields stay exact.
pub const MATERIALIZE_LN_CAP: f64 = 690.0;

/// A function value in logarithmic form: `ln_mod = ln |f(z)|` and a
/// representative of `arg f(z)` modulo 2π. The argument carries no branch
/// information; consumers only ever use it modulo 2π or through differences
/// of nearby samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSample {
    pub ln_mod: f64,
    pub arg: f64,
}

impl LogSample {
    pub fn from_complex(v: Complex64) -> Self {
        LogSample {
            ln_mod: v.norm().ln(),
            arg: v.arg(),
        }
    }

    /// Multiply two values given in log form (logs add; arguments add).
    pub fn mul(self, other: LogSample) -> LogSample {
        LogSample {
            ln_mod: self.ln_mod + other.ln_mod,
            arg: self.arg + other.arg,
        }
    }

    /// Materialize the complex value, saturating the modulus at
    /// `exp(MATERIALIZE_LN_CAP)` to avoid infinities.
    pub fn to_complex(self) -> Complex64 {
        let m = self.ln_mod.min(MATERIALIZE_LN_CAP).exp();
        Complex64::from_polar(m, self.arg)
    }

    /// The modulus as a plain `f64`, saturated at `exp(MATERIALIZE_LN_CAP)`.
    pub fn modulus_saturated(self) -> f64 {
        self.ln_mod.min(MATERIALIZE_LN_CAP).exp()
    }

    /// Argument and log-modulus of `f(z) - w`, computed without materializing
    /// `f(z)` when the ratio `f/w` is extreme. Returns `None` when the
    /// difference is numerically zero (the sample hits `w`).
    ///
    /// The three regimes: `|f| >> |w|` (difference is `f` to double
    /// precision), `|f| << |w|` (difference is `-w`), and a comparable-ratio
    /// band where the ratio `f/w` is materialized (its log-magnitude is at
    /// most 45, far inside `f64` range).
    pub fn diff_from(self, w: Complex64) -> Option<LogSample> {
        if w == Complex64::new(0.0, 0.0) {
            if self.ln_mod == f64::NEG_INFINITY {
                return None;
            }
            return Some(self);
        }
        let lw = w.norm().ln();
        let aw = w.arg();
        let d = self.ln_mod - lw;
        if d > 45.0 {
            // |w/f| < e^-45: invisible at double precision.
            Some(self)
        } else if d < -45.0 {
            Some(LogSample {
                ln_mod: lw,
                arg: aw + std::f64::consts::PI,
            })
        } else {
            let u = Complex64::from_polar(d.exp(), self.arg - aw) - Complex64::new(1.0, 0.0);
            if u.norm() == 0.0 {
                return None;
            }
            Some(LogSample {
                ln_mod: lw + u.norm().ln(),
                arg: aw + u.arg(),
            })
        }
    }
}

/// Symbolic description of an entire function.
///
/// For `TaylorTruncated`, the modelled ideal function is assumed to have
/// Taylor coefficients `a_k` with `|a_k| <= tail_bound_coeff /
/// validity_radius^k` for every `k >= coeffs.len()`; this yields the
/// geometric tail error bound reported by [`evaluate_with_error`].
///
/// For `LacunaryProduct`, the model is the finite product over `zeros`;
/// `tail_zeros_lower_modulus` is a lower bound on the moduli of all omitted
/// zeros, which are additionally assumed to grow at least geometrically with
/// ratio 2 (see [`product_tail_bound`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FunctionSpec {
    /// `z -> exp(a z + b)`.
    #[serde(rename = "exp")]
    ExpAffine {
        #[serde(with = "cjson::c")]
        a: Complex64,
        #[serde(with = "cjson::c")]
        b: Complex64,
    },
    /// Coefficients in ascending degree: `coeffs[k]` multiplies `z^k`.
    #[serde(rename = "poly")]
    Polynomial {
        #[serde(with = "cjson::vec_c")]
        coeffs: Vec<Complex64>,
    },
    /// Truncated power series, valid for `|z| <= validity_radius`.
    #[serde(rename = "taylor")]
    TaylorTruncated {
        #[serde(with = "cjson::vec_c")]
        coeffs: Vec<Complex64>,
        validity_radius: f64,
        tail_bound_coeff: f64,
    },
    /// `z -> prod_i (z_i - z)/z_i` over the listed zeros.
    #[serde(rename = "product")]
    LacunaryProduct {
        #[serde(with = "cjson::vec_c")]
        zeros: Vec<Complex64>,
        tail_zeros_lower_modulus: f64,
    },
}

/// A point on a circle `|z| = circle_radius` together with the modulus of
/// its image. `modulus_of_image` saturates at `exp(690)`;
/// `log_modulus_of_image` is always exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleWitness {
    #[serde(with = "cjson::c")]
    pub point: Complex64,
    pub modulus_of_image: f64,
    pub log_modulus_of_image: f64,
    pub circle_radius: f64,
}

#[derive(Debug, Error)]
pub enum FunctionError {
    #[error("point ({0}, {1}) lies outside the validity disk of radius {radius}", .z.re, .z.im)]
    OutOfValidity { z: Complex64, radius: f64 },
    #[error("tail zeros of modulus >= {tail} are too close to working radius {r}; need tail > 2r")]
    TailTooClose { tail: f64, r: f64 },
    #[error("invalid function description: {0}")]
    Invalid(String),
}

impl FunctionSpec {
    /// Structural sanity checks on the description itself.
    pub fn validate(&self) -> Result<(), FunctionError> {
        match self {
            FunctionSpec::ExpAffine { .. } => Ok(()),
            FunctionSpec::Polynomial { coeffs } => {
                if let Some(last) = coeffs.last() {
                    if coeffs.len() > 1 && last.norm() == 0.0 {
                        return Err(FunctionError::Invalid(
                            "leading polynomial coefficient is zero".into(),
                        ));
                    }
                }
                Ok(())
            }
            FunctionSpec::TaylorTruncated {
                validity_radius,
                tail_bound_coeff,
                ..
            } => {
                if !(*validity_radius > 0.0) {
                    return Err(FunctionError::Invalid("validity_radius must be > 0".into()));
                }
                if !(*tail_bound_coeff >= 0.0) {
                    return Err(FunctionError::Invalid("tail_bound_coeff must be >= 0".into()));
                }
                Ok(())
            }
            FunctionSpec::LacunaryProduct { zeros, .. } => {
                let mut prev = 0.0f64;
                for z in zeros {
                    let m = z.norm();
                    if m == 0.0 {
                        return Err(FunctionError::Invalid("product zero at origin".into()));
                    }
                    if m <= prev {
                        return Err(FunctionError::Invalid(
                            "product zeros must be strictly increasing in modulus".into(),
                        ));
                    }
                    prev = m;
                }
                Ok(())
            }
        }
    }

    fn check_validity(&self, z: Complex64) -> Result<(), FunctionError> {
        match self {
            FunctionSpec::TaylorTruncated {
                validity_radius, ..
            } => {
                if z.norm() > *validity_radius {
                    return Err(FunctionError::OutOfValidity {
                        z,
                        radius: *validity_radius,
                    });
                }
            }
            // Values of the finite product stand in for the full function
            // only while the omitted-tail perturbation stays bounded (see
            // [`product_tail_bound`]); past half the tail modulus nothing
            // the finite factors say is certified, so refuse to evaluate.
            FunctionSpec::LacunaryProduct {
                tail_zeros_lower_modulus,
                ..
            } => {
                let r = z.norm();
                if *tail_zeros_lower_modulus <= 2.0 * r {
                    return Err(FunctionError::TailTooClose {
                        tail: *tail_zeros_lower_modulus,
                        r,
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Evaluate `f(z)` as a plain complex number. Overflows to infinity for
    /// magnitudes beyond `f64`; use [`FunctionSpec::eval_log`] on hot paths.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, FunctionError> {
        self.check_validity(z)?;
        Ok(match self {
            FunctionSpec::ExpAffine { a, b } => (a * z + b).exp(),
            FunctionSpec::Polynomial { coeffs } => horner(coeffs, z),
            FunctionSpec::TaylorTruncated { coeffs, .. } => horner(coeffs, z),
            FunctionSpec::LacunaryProduct { zeros, .. } => {
                let mut p = Complex64::new(1.0, 0.0);
                for zi in zeros {
                    p *= (zi - z) / zi;
                }
                p
            }
        })
    }

    /// Evaluate `f(z)` together with an absolute error bound accounting for
    /// the truncated tail (zero for the exact families).
    pub fn evaluate_with_error(&self, z: Complex64) -> Result<(Complex64, f64), FunctionError> {
        let v = self.evaluate(z)?;
        let err = match self {
            FunctionSpec::ExpAffine { .. } | FunctionSpec::Polynomial { .. } => 0.0,
            FunctionSpec::TaylorTruncated {
                coeffs,
                validity_radius,
                tail_bound_coeff,
            } => {
                let t = z.norm() / validity_radius;
                if t >= 1.0 {
                    return Err(FunctionError::OutOfValidity {
                        z,
                        radius: *validity_radius,
                    });
                }
                tail_bound_coeff * t.powi(coeffs.len() as i32) / (1.0 - t)
            }
            FunctionSpec::LacunaryProduct { .. } => {
                let eps = product_tail_bound(self, z.norm())?;
                v.norm() * (eps.exp() - 1.0)
            }
        };
        Ok((v, err))
    }

    /// Evaluate in log form. Exact for `ExpAffine` at any magnitude; for
    /// products the per-factor logs are summed, so the modulus stays exact
    /// even when the materialized product would overflow.
    pub fn eval_log(&self, z: Complex64) -> Result<LogSample, FunctionError> {
        self.check_validity(z)?;
        Ok(match self {
            FunctionSpec::ExpAffine { a, b } => {
                let w = a * z + b;
                LogSample {
                    ln_mod: w.re,
                    arg: w.im,
                }
            }
            FunctionSpec::Polynomial { coeffs } => LogSample::from_complex(horner(coeffs, z)),
            FunctionSpec::TaylorTruncated { coeffs, .. } => {
                LogSample::from_complex(horner(coeffs, z))
            }
            FunctionSpec::LacunaryProduct { zeros, .. } => {
                let mut acc = LogSample {
                    ln_mod: 0.0,
                    arg: 0.0,
                };
                for zi in zeros {
                    acc = acc.mul(LogSample::from_complex((zi - z) / zi));
                }
                acc
            }
        })
    }

    /// Exact symbolic derivative evaluated at `z`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, FunctionError> {
        self.check_validity(z)?;
        Ok(match self {
            FunctionSpec::ExpAffine { a, b } => a * (a * z + b).exp(),
            FunctionSpec::Polynomial { coeffs } => horner_derivative(coeffs, z),
            FunctionSpec::TaylorTruncated { coeffs, .. } => horner_derivative(coeffs, z),
            FunctionSpec::LacunaryProduct { zeros, .. } => {
                // Product rule: sum over j of (-1/z_j) * prod_{i != j} (z_i - z)/z_i.
                let n = zeros.len();
                let mut total = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let mut term = -Complex64::new(1.0, 0.0) / zeros[j];
                    for (i, zi) in zeros.iter().enumerate() {
                        if i != j {
                            term *= (zi - z) / zi;
                        }
                    }
                    total += term;
                }
                total
            }
        })
    }

    /// The derivative as a function description of its own, for the
    /// families closed under differentiation. The truncated-series case
    /// returns the exact derivative of the truncation (the certified tail
    /// is not differentiated); the product family is not closed and
    /// reports an error.
    pub fn derivative_spec(&self) -> Result<FunctionSpec, FunctionError> {
        match self {
            FunctionSpec::ExpAffine { a, b } => {
                if a.norm() == 0.0 {
                    return Err(FunctionError::Invalid(
                        "derivative of a constant exponential is identically zero".into(),
                    ));
                }
                Ok(FunctionSpec::ExpAffine {
                    a: *a,
                    b: b + a.ln(),
                })
            }
            FunctionSpec::Polynomial { coeffs } | FunctionSpec::TaylorTruncated { coeffs, .. } => {
                if coeffs.len() < 2 {
                    return Err(FunctionError::Invalid(
                        "derivative of a constant is identically zero".into(),
                    ));
                }
                let diff: Vec<Complex64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * (k as f64))
                    .collect();
                Ok(FunctionSpec::Polynomial { coeffs: diff })
            }
            FunctionSpec::LacunaryProduct { .. } => Err(FunctionError::Invalid(
                "the finite-product family is not closed under differentiation".into(),
            )),
        }
    }

    /// The logarithmic derivative `f'(z)/f(z)`, available in closed form for
    /// every family and finite even where `f` itself overflows `f64`.
    pub fn log_derivative(&self, z: Complex64) -> Result<Complex64, FunctionError> {
        self.check_validity(z)?;
        Ok(match self {
            FunctionSpec::ExpAffine { a, .. } => *a,
            FunctionSpec::Polynomial { coeffs } => {
                horner_derivative(coeffs, z) / horner(coeffs, z)
            }
            FunctionSpec::TaylorTruncated { coeffs, .. } => {
                horner_derivative(coeffs, z) / horner(coeffs, z)
            }
            FunctionSpec::LacunaryProduct { zeros, .. } => {
                let mut s = Complex64::new(0.0, 0.0);
                for zi in zeros {
                    s += Complex64::new(1.0, 0.0) / (z - zi);
                }
                s
            }
        })
    }

}

/// Number of pieces a straight segment must be cut into so that the image
/// argument of `f` cannot wrap a full turn between consecutive samples:
/// pieces are sized so `len · |f'/f| ≤ cap_step` with the log-derivative
/// sampled at the endpoints and midpoint. Where the log-derivative is
/// unavailable or infinite the densest pitch is returned and the caller's
/// adaptive refinement takes over.
pub(crate) fn arg_safe_pieces(
    spec: &FunctionSpec,
    a: Complex64,
    b: Complex64,
    cap_step: f64,
    max_pieces: usize,
) -> usize {
    let mut slope: f64 = 0.0;
    for p in [a, 0.5 * (a + b), b] {
        match spec.log_derivative(p) {
            Ok(d) if d.norm().is_finite() => slope = slope.max(d.norm()),
            _ => return max_pieces,
        }
    }
    let raw = ((b - a).norm() * slope / cap_step).ceil();
    if raw.is_finite() {
        (raw as usize).clamp(1, max_pieces)
    } else {
        max_pieces
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn horner_derivative(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * (k as f64);
    }
    acc
}

fn witness_at(spec: &FunctionSpec, r: f64, theta: f64) -> Result<CircleWitness, FunctionError> {
    let point = Complex64::from_polar(r, theta);
    let s = spec.eval_log(point)?;
    Ok(CircleWitness {
        point,
        modulus_of_image: s.modulus_saturated(),
        log_modulus_of_image: s.ln_mod,
        circle_radius: r,
    })
}

/// Golden-section search for an extremum of `g` on `[lo, hi]`.
/// `maximize` selects which extremum; returns the final abscissa.
fn golden_refine<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, maximize: bool) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..80 {
        let keep_left = if maximize { g1 > g2 } else { g1 < g2 };
        if keep_left {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Locate a point of (approximately) maximal `|f|` on the circle `|z| = r`
/// by a uniform scan of [`CIRCLE_SCAN_SAMPLES`] angles followed by
/// golden-section refinement. Ties in the scan break toward the lowest angle.
pub fn max_modulus_on_circle(spec: &FunctionSpec, r: f64) -> Result<CircleWitness, FunctionError> {
    circle_extremum(spec, r, true)
}

/// Scan the circle `|z| = r` for a point with `|f| < bound`; `None` when the
/// scan plus refinement finds no such point.
pub fn small_modulus_witness(
    spec: &FunctionSpec,
    r: f64,
    bound: f64,
) -> Result<Option<CircleWitness>, FunctionError> {
    let w = circle_extremum(spec, r, false)?;
    if w.log_modulus_of_image < bound.ln() {
        Ok(Some(w))
    } else {
        Ok(None)
    }
}

fn circle_extremum(
    spec: &FunctionSpec,
    r: f64,
    maximize: bool,
) -> Result<CircleWitness, FunctionError> {
    let n = CIRCLE_SCAN_SAMPLES;
    // Validity is checked once; per-sample failures cannot occur afterwards
    // for any of the families.
    spec.check_validity(Complex64::new(r, 0.0))?;
    let mut best_i = 0usize;
    let mut best = f64::NAN;
    for i in 0..n {
        let theta = 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
        let v = spec
            .eval_log(Complex64::from_polar(r, theta))
            .map(|s| s.ln_mod)
            .unwrap_or(f64::NAN);
        let better = if best.is_nan() {
            true
        } else if maximize {
            v > best
        } else {
            v < best
        };
        if better && !v.is_nan() {
            best = v;
            best_i = i;
        }
    }
    let step = 2.0 * std::f64::consts::PI / (n as f64);
    let center = step * best_i as f64;
    let g = |theta: f64| -> f64 {
        spec.eval_log(Complex64::from_polar(r, theta))
            .map(|s| s.ln_mod)
            .unwrap_or(if maximize {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            })
    };
    let theta_hat = golden_refine(g, center - step, center + step, maximize);
    // Keep whichever of scan-best / refined is better (refinement can only
    // help inside its bracket; the scan best might sit outside it).
    let cand = witness_at(spec, r, theta_hat)?;
    let scan = witness_at(spec, r, center)?;
    let refined_better = if maximize {
        cand.log_modulus_of_image >= scan.log_modulus_of_image
    } else {
        cand.log_modulus_of_image <= scan.log_modulus_of_image
    };
    Ok(if refined_better { cand } else { scan })
}

/// Relative log-error `eps` such that the true infinite product differs from
/// the finite model by a factor within `[exp(-eps), exp(eps)]` on `|z| <= r`.
///
/// Derivation: for an omitted zero of modulus `t >= T` the factor satisfies
/// `|log((t - z)/t)| <= (r/t)/(1 - r/t)`. Under the documented assumption
/// that omitted-zero moduli grow at least geometrically with ratio 2 above
/// `T = tail_zeros_lower_modulus`, summing the geometric series gives
/// `eps <= 2 (r/T) / (1 - r/T)`.
pub fn product_tail_bound(spec: &FunctionSpec, r: f64) -> Result<f64, FunctionError> {
    let tail = match spec {
        FunctionSpec::LacunaryProduct {
            tail_zeros_lower_modulus,
            ..
        } => *tail_zeros_lower_modulus,
        _ => {
            return Err(FunctionError::Invalid(
                "tail bound is only defined for lacunary products".into(),
            ))
        }
    };
    if tail <= 2.0 * r {
        return Err(FunctionError::TailTooClose { tail, r });
    }
    let x = r / tail;
    Ok(2.0 * x / (1.0 - x))
}
