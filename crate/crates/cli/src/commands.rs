//! Implementations of the four `covent` subcommands.
//!
//! Every subcommand resolves its inputs into one canonical JSON
//! configuration value (sorted keys, seed included, output directory and
//! thread count excluded), hashes it, and stamps each artifact with that
//! hash so reruns with identical inputs yield byte-identical files.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use covent_core::entropy::{self, CertificateBound, EntropyError, EntropyEstimate};
use covent_core::function_model::{FunctionError, FunctionSpec};
use covent_core::hyperbolic::{
    measure_d_constant, HyperbolicError, MeasureParams, MeasureScenario,
};
use covent_core::plane_domains::builders::{build_annulus, build_disk};
use covent_core::plane_domains::PlanarDomain;
use covent_core::report::{entropy_table_csv, Stamped};
use covent_core::winding::{count_preimages, WindingError};
use covent_core::{
    find_self_covering_v, CompactSet, CoveringCertificate, EngineError, EngineParams, StepTrace,
};

use crate::{
    CliError, CliResult, CoveringSearchArgs, EntropyArgs, ExampleProductArgs, MeasureDArgs,
    Scenario,
};

// ---------------------------------------------------------------------------
// covering-search
// ---------------------------------------------------------------------------

pub fn covering_search(args: &CoveringSearchArgs) -> CliResult<String> {
    init_threads(args.common.threads)?;
    let spec = parse_function(&args.function)?;
    ensure(args.n_cover >= 1, "--n-cover must be at least 1")?;
    ensure(
        args.r_start.is_finite() && args.r_start > 0.0,
        "--r-start must be positive",
    )?;
    ensure(
        args.r_factor.is_finite() && args.r_factor > 1.0,
        "--r-factor must exceed 1",
    )?;
    ensure(args.r_steps >= 1, "--r-steps must be at least 1")?;
    ensure(
        args.working_diameter.is_finite() && args.working_diameter > 0.0,
        "--working-diameter must be positive",
    )?;

    let config_text = json!({
        "command": "covering-search",
        "function": &spec,
        "n_cover": args.n_cover,
        "r_start": args.r_start,
        "r_factor": args.r_factor,
        "r_steps": args.r_steps,
        "working_diameter": args.working_diameter,
        "seed": args.common.seed,
    })
    .to_string();

    // Walk the schedule one radius at a time so the step-by-step trace
    // survives even when a later radius succeeds.
    let base = EngineParams {
        working_d: args.working_diameter,
        r_factor: args.r_factor,
        r_steps: 1,
        ..EngineParams::default()
    };
    let mut trace: Vec<StepTrace> = Vec::new();
    let mut certificate: Option<CoveringCertificate> = None;
    let mut radius = args.r_start;
    for step in 0..args.r_steps {
        let params = EngineParams {
            r_start: radius,
            ..base.clone()
        };
        match find_self_covering_v(&spec, args.n_cover, &params) {
            Ok(cert) => {
                certificate = Some(cert);
                break;
            }
            Err(EngineError::BudgetExhausted { trace: step_trace }) => {
                trace.extend(step_trace.into_iter().map(|mut entry| {
                    entry.step = step;
                    entry
                }));
            }
            Err(other) => return Err(classify_engine(other)),
        }
        radius *= args.r_factor;
    }

    let dir = &args.common.out_dir;
    write_artifact(dir, "trace.json", &stamped_json(&config_text, &trace)?)?;
    match certificate {
        Some(cert) => {
            write_artifact(
                dir,
                "certificate.json",
                &stamped_json(&config_text, &cert)?,
            )?;
            write_artifact(dir, "domain.svg", &covent_core::svg::domain_svg(&cert.v))?;
            write_artifact(
                dir,
                "heatmap.svg",
                &covent_core::svg::heatmap_svg(&cert.grid_report),
            )?;
            Ok(format!(
                "certificate: case {:?}, {}-fold over {} at R={:.6e}; wrote {}",
                cert.case_tag,
                cert.n,
                cert.v.label,
                cert.radius_r,
                dir.display()
            ))
        }
        None => Err(CliError::Negative(format!(
            "no certificate within the radius schedule ({} step(s) from {:.6e}, factor {}); \
             step decisions are in {}",
            args.r_steps,
            args.r_start,
            args.r_factor,
            dir.join("trace.json").display()
        ))),
    }
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EntropyReport<'a> {
    /// Separated-orbit growth table, present when a compact set was given.
    estimate: Option<&'a EntropyEstimate>,
    /// Backward-orbit bound, present when a certificate was given.
    certificate_bound: Option<&'a CertificateBound>,
}

pub fn entropy_report(args: &EntropyArgs) -> CliResult<String> {
    init_threads(args.common.threads)?;
    let spec = parse_function(&args.function)?;
    let deltas = if args.deltas.is_empty() {
        vec![0.05]
    } else {
        args.deltas.clone()
    };
    ensure(
        deltas.iter().all(|&d| d.is_finite() && d > 0.0),
        "every --delta must be positive",
    )?;
    ensure(args.n_max >= 2, "--n-max must be at least 2")?;
    ensure(args.block_depth >= 1, "--block-depth must be at least 1")?;
    ensure(args.blocks >= 1, "--blocks must be at least 1")?;

    let set = match (&args.circle_points, &args.compact_set) {
        (Some(log2), None) => {
            ensure(
                *log2 <= 20,
                "--circle-points is limited to 20 (over a million points)",
            )?;
            Some(CompactSet::unit_circle_cloud(*log2))
        }
        (None, Some(text)) => Some(parse_compact_set(text)?),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        (None, None) => None,
    };
    let certificate = match &args.certificate {
        Some(path) => Some(load_certificate(path)?),
        None => None,
    };
    if set.is_none() && certificate.is_none() {
        return Err(CliError::Config(
            "nothing to do: give --circle-points or --compact-set for the \
             separated-orbit curve, and/or --certificate for a backward-orbit bound"
                .into(),
        ));
    }

    let config_text = json!({
        "command": "entropy",
        "function": &spec,
        "compact_set": match (&args.circle_points, &set) {
            (Some(log2), _) => json!({ "circle_points": log2 }),
            (None, Some(s)) => serde_json::to_value(s)
                .map_err(|e| CliError::Config(format!("cannot canonicalize compact set: {e}")))?,
            (None, None) => serde_json::Value::Null,
        },
        "n_max": args.n_max,
        "deltas": &deltas,
        "certificate": &certificate,
        "block_depth": args.block_depth,
        "blocks": args.blocks,
        "period_budget": args.period_budget,
        "seed": args.common.seed,
    })
    .to_string();

    let estimate = set
        .as_ref()
        .map(|x| entropy::entropy_lower_curve(&spec, x, args.n_max, &deltas));
    let bound = match &certificate {
        Some(cert) => {
            let params = entropy::derive_backward_params(
                &spec,
                cert,
                args.block_depth,
                args.blocks,
                args.period_budget,
            )
            .map_err(classify_entropy)?;
            Some(
                entropy::certificate_entropy_bound(&spec, cert, &params)
                    .map_err(classify_entropy)?,
            )
        }
        None => None,
    };

    let dir = &args.common.out_dir;
    let report = EntropyReport {
        estimate: estimate.as_ref(),
        certificate_bound: bound.as_ref(),
    };
    write_artifact(dir, "entropy.json", &stamped_json(&config_text, &report)?)?;
    if let Some(est) = &estimate {
        write_artifact(dir, "entropy.csv", &entropy_table_csv(est, &config_text))?;
        write_artifact(dir, "curve.svg", &covent_core::svg::curve_svg(est))?;
    }

    Ok(match (&estimate, &bound) {
        (Some(est), Some(b)) => format!(
            "entropy: curve h_lower={:.6} on {}; certificate bound {:.6} \
             ({} separated orbits); wrote {}",
            est.h_lower,
            est.compact_set_id,
            b.entropy_lower,
            b.separated_count,
            dir.display()
        ),
        (Some(est), None) => format!(
            "entropy: curve h_lower={:.6} on {}; wrote {}",
            est.h_lower,
            est.compact_set_id,
            dir.display()
        ),
        (None, Some(b)) => format!(
            "entropy: certificate bound {:.6} ({} separated orbits, floor {:.6}); wrote {}",
            b.entropy_lower,
            b.separated_count,
            b.floor,
            dir.display()
        ),
        (None, None) => unreachable!("at least one input was required above"),
    })
}

// ---------------------------------------------------------------------------
// example-product
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct WindowReport {
    index: usize,
    radius: f64,
    disk_counts: Vec<u32>,
    /// Every sampled target was hit exactly `index` times in the disk.
    disk_pass: bool,
    annulus_counts: Vec<u32>,
    /// Every sampled target was hit at most once in the doubled annulus.
    annulus_pass: bool,
}

#[derive(Serialize)]
struct EntropyStage {
    /// The certificate-derived bound reached `ln` of the certified
    /// multiplicity (up to rounding).
    pass: bool,
    /// `ln` of the certified multiplicity, or of the requested one when no
    /// certificate was found.
    reference: f64,
    certificate_radius: Option<f64>,
    certificate_case: Option<String>,
    bound: Option<CertificateBound>,
    note: Option<String>,
}

#[derive(Serialize)]
struct ExampleReport {
    zeros: Vec<f64>,
    tail_modulus: f64,
    samples_per_window: usize,
    windows: Vec<WindowReport>,
    disk_verdict: bool,
    annulus_verdict: bool,
    entropy: EntropyStage,
}

enum TargetDraw {
    /// Area-uniform over the disk of the window radius.
    Disk,
    /// Polar over moduli 0.55–1.9 times the window radius.
    Annulus,
}

pub fn example_product(args: &ExampleProductArgs) -> CliResult<String> {
    init_threads(args.common.threads)?;
    ensure(!args.zeros.is_empty(), "--zeros needs at least one modulus")?;
    ensure(
        args.zeros.iter().all(|&m| m.is_finite() && m > 0.0),
        "every zero modulus must be positive",
    )?;
    ensure(
        args.zeros.windows(2).all(|p| p[0] < p[1]),
        "--zeros must be strictly increasing",
    )?;
    let last = *args.zeros.last().expect("nonempty");
    let tail = args
        .tail_modulus
        .unwrap_or_else(|| (last * last).max(2.0 * last));
    ensure(
        tail.is_finite() && tail > last,
        "--tail-modulus must exceed the last listed zero",
    )?;
    ensure(args.samples >= 1, "--samples must be at least 1")?;
    ensure(args.n_cover >= 1, "--n-cover must be at least 1")?;
    ensure(
        args.r_start.is_finite() && args.r_start > 0.0,
        "--r-start must be positive",
    )?;
    ensure(args.r_steps >= 1, "--r-steps must be at least 1")?;

    let spec = FunctionSpec::LacunaryProduct {
        zeros: args
            .zeros
            .iter()
            .map(|&m| Complex64::new(m, 0.0))
            .collect(),
        tail_zeros_lower_modulus: tail,
    };
    spec.validate().map_err(|e| classify_function(&e))?;

    let config_text = json!({
        "command": "example-product",
        "zeros": &args.zeros,
        "tail_modulus": tail,
        "samples": args.samples,
        "n_cover": args.n_cover,
        "r_start": args.r_start,
        "r_steps": args.r_steps,
        "seed": args.common.seed,
    })
    .to_string();

    // Window checks: between consecutive zero moduli (and before the tail),
    // count how often sampled targets are attained on the disk and on the
    // doubled annulus at the geometric-mean radius.
    let mut fence = args.zeros.clone();
    fence.push(tail);
    let mut windows = Vec::new();
    for index in 1..args.zeros.len() + 1 {
        let radius = (fence[index - 1] * fence[index]).sqrt();
        let disk = build_disk(
            Complex64::new(0.0, 0.0),
            radius,
            &format!("window-{index}-disk"),
        );
        let annulus = build_annulus(radius / 2.0, 2.0 * radius, &format!("window-{index}-annulus"));
        let mut rng = ChaCha8Rng::seed_from_u64(
            args.common
                .seed
                .wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let disk_counts =
            sample_counts(&spec, &disk, radius, TargetDraw::Disk, args.samples, &mut rng)?;
        let annulus_counts = sample_counts(
            &spec,
            &annulus,
            radius,
            TargetDraw::Annulus,
            args.samples,
            &mut rng,
        )?;
        let disk_pass = disk_counts.iter().all(|&c| c as usize == index);
        let annulus_pass = annulus_counts.iter().all(|&c| c <= 1);
        windows.push(WindowReport {
            index,
            radius,
            disk_counts,
            disk_pass,
            annulus_counts,
            annulus_pass,
        });
    }
    let disk_verdict = windows.iter().all(|w| w.disk_pass);
    let annulus_verdict = windows.iter().all(|w| w.annulus_pass);

    let entropy_stage = run_entropy_stage(&spec, args)?;

    let dir = &args.common.out_dir;
    let report = ExampleReport {
        zeros: args.zeros.clone(),
        tail_modulus: tail,
        samples_per_window: args.samples,
        windows,
        disk_verdict,
        annulus_verdict,
        entropy: entropy_stage,
    };
    let summary = format!(
        "example: disk={} annulus={} entropy={}; wrote {}",
        pass_word(report.disk_verdict),
        pass_word(report.annulus_verdict),
        pass_word(report.entropy.pass),
        dir.display()
    );
    write_artifact(dir, "example.json", &stamped_json(&config_text, &report)?)?;
    Ok(summary)
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Certified preimage counts for randomly drawn targets; draws that graze
/// the boundary image are redrawn.
fn sample_counts(
    spec: &FunctionSpec,
    domain: &PlanarDomain,
    radius: f64,
    mode: TargetDraw,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<Vec<u32>> {
    let mut counts = Vec::with_capacity(samples);
    let mut draws = 0usize;
    while counts.len() < samples {
        draws += 1;
        if draws > 100 * samples {
            return Err(CliError::Negative(format!(
                "target sampling starved: {} of {} draws grazed the boundary image of {}",
                draws - counts.len(),
                draws,
                domain.label
            )));
        }
        let angle = rng.gen_range(-PI..PI);
        let modulus = match mode {
            TargetDraw::Disk => radius * rng.gen::<f64>().sqrt(),
            TargetDraw::Annulus => radius * rng.gen_range(0.55..1.9),
        };
        let target = Complex64::from_polar(modulus, angle);
        match count_preimages(spec, domain, target) {
            Ok(count) => counts.push(count.count),
            Err(WindingError::OnTarget | WindingError::BoundaryHit { .. }) => continue,
            Err(other) => return Err(classify_winding(other)),
        }
    }
    Ok(counts)
}

/// Search the doubling schedule for a covering certificate and convert it
/// into a single-block backward-orbit bound. Failing to find a certificate
/// or a bound is reported inside the stage, not as a process failure.
fn run_entropy_stage(spec: &FunctionSpec, args: &ExampleProductArgs) -> CliResult<EntropyStage> {
    let base = EngineParams {
        r_steps: 1,
        ..EngineParams::default()
    };
    let mut certificate: Option<CoveringCertificate> = None;
    let mut radius = args.r_start;
    for _ in 0..args.r_steps {
        let params = EngineParams {
            r_start: radius,
            ..base.clone()
        };
        match find_self_covering_v(spec, args.n_cover, &params) {
            Ok(cert) => {
                certificate = Some(cert);
                break;
            }
            Err(EngineError::BudgetExhausted { .. }) => {}
            Err(other) => return Err(classify_engine(other)),
        }
        radius *= 2.0;
    }
    let Some(cert) = certificate else {
        return Ok(EntropyStage {
            pass: false,
            reference: (args.n_cover.max(1) as f64).ln(),
            certificate_radius: None,
            certificate_case: None,
            bound: None,
            note: Some(format!(
                "no covering certificate within the radius schedule \
                 ({} step(s) from {:.6e}, doubling)",
                args.r_steps, args.r_start
            )),
        });
    };
    let reference = (cert.n as f64).ln();
    let outcome = entropy::derive_backward_params(spec, &cert, 1, 1, 64)
        .and_then(|params| entropy::certificate_entropy_bound(spec, &cert, &params));
    Ok(match outcome {
        Ok(bound) => EntropyStage {
            pass: bound.entropy_lower >= reference - 1e-9,
            reference,
            certificate_radius: Some(cert.radius_r),
            certificate_case: Some(format!("{:?}", cert.case_tag)),
            bound: Some(bound),
            note: None,
        },
        Err(e) => EntropyStage {
            pass: false,
            reference,
            certificate_radius: Some(cert.radius_r),
            certificate_case: Some(format!("{:?}", cert.case_tag)),
            bound: None,
            note: Some(e.to_string()),
        },
    })
}

// ---------------------------------------------------------------------------
// measure-d
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MeasureReport {
    scenario: MeasureScenario,
    radius: f64,
    trials: u32,
    measured_d: f64,
}

pub fn measure_d(args: &MeasureDArgs) -> CliResult<String> {
    init_threads(args.common.threads)?;
    let scenario = match args.scenario {
        Scenario::Case1 => MeasureScenario::Case1,
        Scenario::Case2 => MeasureScenario::Case2,
    };
    ensure(args.trials >= 1, "--trials must be at least 1")?;
    match scenario {
        MeasureScenario::Case1 => ensure(
            args.radius.is_finite() && args.radius >= 4.0,
            "--radius must be at least 4 for the keyhole scenario",
        )?,
        MeasureScenario::Case2 => {
            ensure(
                args.radius.is_finite() && args.radius > 1.0,
                "--radius must exceed 1 for the cut-annulus scenario",
            )?;
            ensure(
                args.eps > 0.0 && args.eps < 0.2,
                "--eps must lie strictly between 0 and 0.2",
            )?;
            ensure(args.jexp >= 1, "--jexp must be at least 1")?;
            ensure(args.avoided >= 1, "--avoided must be at least 1")?;
        }
    }
    let params = MeasureParams {
        seed: args.common.seed,
        theta: args.theta,
        eps: args.eps,
        jexp: args.jexp,
        avoided_count: args.avoided,
    };

    let config_text = json!({
        "command": "measure-d",
        "scenario": scenario,
        "radius": args.radius,
        "trials": args.trials,
        "theta": args.theta,
        "eps": args.eps,
        "jexp": args.jexp,
        "avoided": args.avoided,
        "seed": args.common.seed,
    })
    .to_string();

    let measured_d = measure_d_constant(args.radius, args.trials, scenario, &params)
        .map_err(classify_hyperbolic)?;

    let dir = &args.common.out_dir;
    let report = MeasureReport {
        scenario,
        radius: args.radius,
        trials: args.trials,
        measured_d,
    };
    write_artifact(dir, "measure.json", &stamped_json(&config_text, &report)?)?;
    Ok(format!(
        "measured d: {measured_d:.6} over {} trial(s) at R={}; wrote {}",
        args.trials,
        args.radius,
        dir.display()
    ))
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn init_threads(threads: Option<usize>) -> CliResult<()> {
    let workers = match threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    };
    // A second initialization in the same process keeps the first pool;
    // the results do not depend on the worker count either way.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    Ok(())
}

fn ensure(condition: bool, message: &str) -> CliResult<()> {
    if condition {
        Ok(())
    } else {
        Err(CliError::Config(message.into()))
    }
}

/// Accept either inline JSON (first non-space character `{` or `[`) or a
/// path to a JSON file.
fn read_inline_or_path(text: &str, flag: &str) -> CliResult<String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(text.to_string())
    } else {
        fs::read_to_string(text)
            .map_err(|e| CliError::Config(format!("{flag}: cannot read {text}: {e}")))
    }
}

fn parse_function(text: &str) -> CliResult<FunctionSpec> {
    let raw = read_inline_or_path(text, "--function")?;
    let spec: FunctionSpec = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("--function: invalid description: {e}")))?;
    spec.validate().map_err(|e| classify_function(&e))?;
    Ok(spec)
}

fn parse_compact_set(text: &str) -> CliResult<CompactSet> {
    let raw = read_inline_or_path(text, "--compact-set")?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("--compact-set: invalid description: {e}")))
}

/// Load a covering certificate from either a stamped artifact (the
/// `certificate.json` written by `covering-search`) or a bare certificate.
fn load_certificate(path: &Path) -> CliResult<CoveringCertificate> {
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("--certificate: cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("--certificate: invalid JSON: {e}")))?;
    let payload = match value.get("data") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(payload).map_err(|e| {
        CliError::Config(format!(
            "--certificate: {} does not hold a covering certificate: {e}",
            path.display()
        ))
    })
}

fn stamped_json<T: Serialize>(config_text: &str, data: T) -> CliResult<String> {
    Stamped::new(config_text, data)
        .to_json_pretty()
        .map_err(|e| CliError::Config(format!("cannot serialize artifact: {e}")))
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Error classification: configuration mistakes exit 2, honest mathematical
// negatives exit 3.
// ---------------------------------------------------------------------------

fn classify_function(e: &FunctionError) -> CliError {
    match e {
        // The certified tail bound refuses to evaluate this far out; the
        // request was well-formed but the goal is out of reach.
        FunctionError::TailTooClose { .. } => CliError::Negative(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

fn classify_winding(e: WindingError) -> CliError {
    match &e {
        WindingError::Function(inner) => classify_function(inner),
        WindingError::Domain(_) => CliError::Config(e.to_string()),
        // Counting machinery ran out of budget or margin: the answer is an
        // honest "could not certify", not a usage mistake.
        _ => CliError::Negative(e.to_string()),
    }
}

fn classify_engine(e: EngineError) -> CliError {
    match &e {
        EngineError::Function(inner) => classify_function(inner),
        EngineError::Winding(inner) => match inner {
            WindingError::Function(f) => classify_function(f),
            WindingError::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Negative(e.to_string()),
        },
        EngineError::Hyperbolic(HyperbolicError::Domain(_))
        | EngineError::Hyperbolic(HyperbolicError::NotSimplyConnected)
        | EngineError::Domain(_) => CliError::Config(e.to_string()),
        _ => CliError::Negative(e.to_string()),
    }
}

fn classify_entropy(e: EntropyError) -> CliError {
    match &e {
        EntropyError::Function(inner) => classify_function(inner),
        EntropyError::Invalid(_) | EntropyError::Domain(_) => CliError::Config(e.to_string()),
        EntropyError::EnumerationBudgetExceeded(_) | EntropyError::Solver(_) => {
            CliError::Negative(e.to_string())
        }
    }
}

fn classify_hyperbolic(e: HyperbolicError) -> CliError {
    match &e {
        HyperbolicError::HypothesisFailed(_) | HyperbolicError::Disconnected => {
            CliError::Negative(e.to_string())
        }
        _ => CliError::Config(e.to_string()),
    }
}
