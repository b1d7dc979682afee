//! Constructors for the concrete regions used by the covering search.
//!
//! Every constructor builds both the constructive description (base region,
//! removed disks, slits) and the matching polygonal outline. Junction points
//! where slit walls meet circles or segments are computed once, in closed
//! form, and shared bit-for-bit between the incident boundary pieces, so the
//! stitcher can match them exactly.
//!
//! All lengths derived here are proportional to the scale radius `r`, and
//! all angles are absolute, so constructions commute with rescaling.

use num_complex::Complex64;

use super::stitch::{orient_loops, stitch_pieces, Piece};
use super::{
    dist_to_polyline, wrap_angle, BaseRegion, DomainError, PlanarDomain, RemovedDisk,
    Slit, ARC_POINTS_PER_TURN, DEFAULT_SLIT_HALFWIDTH_REL,
};

/// Sampling density for slit walls that follow circular arcs (denser than
/// plain region boundaries so the wall polygon tracks the ideal offset arc
/// to well under one half-width).
pub const SLIT_WALL_POINTS_PER_TURN: usize = 4096;
/// Sampling density for curved slit spines stored in the constructive
/// description.
pub const SLIT_SPINE_POINTS_PER_TURN: usize = 2048;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn polar(r: f64, a: f64) -> Complex64 {
    Complex64::from_polar(r, a)
}

fn rot90(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

// ---------------------------------------------------------------------------
// Plain loops
// ---------------------------------------------------------------------------

fn circle_loop(center: Complex64, r: f64) -> Vec<Complex64> {
    (0..ARC_POINTS_PER_TURN)
        .map(|k| center + polar(r, TAU * k as f64 / ARC_POINTS_PER_TURN as f64))
        .collect()
}

/// Closed counterclockwise outline of an annular sector.
fn sector_loop(r_in: f64, r_out: f64, theta: f64, half: f64) -> Vec<Complex64> {
    let lo = theta - half;
    let hi = theta + half;
    let n_out = arc_point_count(r_out, 2.0 * half, ARC_POINTS_PER_TURN);
    let n_in = arc_point_count(r_in, 2.0 * half, ARC_POINTS_PER_TURN);
    let mut pts = Vec::with_capacity(n_out + n_in + 2);
    for k in 0..=n_out {
        pts.push(polar(r_out, lo + 2.0 * half * k as f64 / n_out as f64));
    }
    for k in 0..=n_in {
        pts.push(polar(r_in, hi - 2.0 * half * k as f64 / n_in as f64));
    }
    pts
}

fn arc_point_count(_r: f64, span: f64, per_turn: usize) -> usize {
    (((span.abs() / TAU) * per_turn as f64).ceil() as usize).max(2)
}

/// Open arc piece on the circle `|z - center| = r` from angle `a1` to `a2`
/// (monotone in the parameter; either direction), with exact endpoint values
/// supplied by the caller.
fn arc_piece_exact(
    center: Complex64,
    r: f64,
    a1: f64,
    a2: f64,
    p1: Complex64,
    p2: Complex64,
    per_turn: usize,
) -> Piece {
    let n = arc_point_count(r, a2 - a1, per_turn);
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(p1);
    for k in 1..n {
        pts.push(center + polar(r, a1 + (a2 - a1) * k as f64 / n as f64));
    }
    pts.push(p2);
    Piece::new(pts)
}

// ---------------------------------------------------------------------------
// Exact crossings
// ---------------------------------------------------------------------------

/// First crossing (smallest `t > 0`) of the ray `w0 + t*u` with the circle
/// `|z| = r`, where `u` is a unit vector.
fn line_circle_forward(w0: Complex64, u: Complex64, r: f64) -> Option<Complex64> {
    let b = u.re * w0.re + u.im * w0.im;
    let c0 = w0.norm_sqr() - r * r;
    let disc = b * b - c0;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let eps = 1e-12 * r;
    let t = if -b - s > eps {
        -b - s
    } else if -b + s > eps {
        -b + s
    } else {
        return None;
    };
    Some(w0 + u * t)
}

/// Both intersection points of `|z| = r1` with `|z - c| = r2`.
fn circle_circle(r1: f64, c: Complex64, r2: f64) -> Option<(Complex64, Complex64)> {
    let d = c.norm();
    if d == 0.0 {
        return None;
    }
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    if h2 < 0.0 {
        return None;
    }
    let h = h2.sqrt();
    let ud = c / d;
    let base = ud * a;
    let perp = rot90(ud) * h;
    Some((base + perp, base - perp))
}

fn line_line_intersection(
    p: Complex64,
    d: Complex64,
    q: Complex64,
    e: Complex64,
) -> Option<Complex64> {
    let cross = d.re * e.im - d.im * e.re;
    if cross.abs() < 1e-12 {
        return None;
    }
    let w = q - p;
    let t = (w.re * e.im - w.im * e.re) / cross;
    Some(p + d * t)
}

/// Offset an open polyline of straight legs by `hw` to one side
/// (`side = +1` left of travel, `-1` right), with mitered corners.
fn offset_chain(spine: &[Complex64], hw: f64, side: f64) -> Vec<Complex64> {
    let n = spine.len();
    debug_assert!(n >= 2);
    let dirs: Vec<Complex64> = spine
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            d / d.norm()
        })
        .collect();
    let off = |d: Complex64| rot90(d) * (hw * side);
    let mut out = Vec::with_capacity(n);
    out.push(spine[0] + off(dirs[0]));
    for k in 1..n - 1 {
        let o1 = off(dirs[k - 1]);
        let o2 = off(dirs[k]);
        let p = line_line_intersection(spine[k - 1] + o1, dirs[k - 1], spine[k] + o2, dirs[k]);
        out.push(p.unwrap_or(spine[k] + o1));
    }
    out.push(spine[n - 1] + off(dirs[n - 2]));
    out
}

/// The long (kept) arc of the circle `|z - center| = rho` complementary to
/// the short span between `qa` and `qb` (both on the circle).
fn disk_kept_arc(center: Complex64, rho: f64, qa: Complex64, qb: Complex64) -> Piece {
    let psa = (qa - center).arg();
    let psb = (qb - center).arg();
    let d = wrap_angle(psb - psa);
    debug_assert!(d.abs() < 0.5, "removed span on a disk must be short");
    if d >= 0.0 {
        arc_piece_exact(center, rho, psb, psa + TAU, qb, qa, SLIT_WALL_POINTS_PER_TURN)
    } else {
        arc_piece_exact(center, rho, psa, psb + TAU, qa, qb, SLIT_WALL_POINTS_PER_TURN)
    }
}

/// Where a radial slit leg at angle `phi` with half-width `hw` crosses the
/// circle `|z| = r`: returns the wall junctions at angles `phi - delta` and
/// `phi + delta`, plus the exact junction values for the left and right
/// offset walls given the leg's travel direction (`sigma = sign(dir . u)`).
struct ExitData {
    phi_norm: f64,
    delta: f64,
    minus: Complex64,
    plus: Complex64,
    left: Complex64,
    right: Complex64,
}

fn make_exit(circle_r: f64, phi: f64, hw: f64, sigma: f64) -> ExitData {
    let u = polar(1.0, phi);
    let nv = rot90(u);
    let s = (circle_r * circle_r - hw * hw).sqrt();
    let delta = hw.atan2(s);
    let minus = u * s - nv * hw;
    let plus = u * s + nv * hw;
    let (left, right) = if sigma > 0.0 { (plus, minus) } else { (minus, plus) };
    ExitData {
        phi_norm: phi.rem_euclid(TAU),
        delta,
        minus,
        plus,
        left,
        right,
    }
}

/// Kept arcs of the circle `|z| = r` between consecutive slit exits.
fn circle_arc_pieces(circle_r: f64, exits: &[&ExitData]) -> Result<Vec<Piece>, DomainError> {
    debug_assert!(!exits.is_empty());
    let mut order: Vec<usize> = (0..exits.len()).collect();
    order.sort_by(|&a, &b| exits[a].phi_norm.total_cmp(&exits[b].phi_norm));
    let m = order.len();
    let mut pieces = Vec::with_capacity(m);
    for k in 0..m {
        let e1 = exits[order[k]];
        let e2 = exits[order[(k + 1) % m]];
        let a1 = e1.phi_norm + e1.delta;
        let mut a2 = e2.phi_norm - e2.delta;
        if k + 1 == m {
            a2 += TAU;
        }
        if a2 <= a1 {
            return Err(DomainError::StitchFailure(
                "slit exits overlap on a circle".into(),
            ));
        }
        pieces.push(arc_piece_exact(
            Complex64::new(0.0, 0.0),
            circle_r,
            a1,
            a2,
            e1.plus,
            e2.minus,
            ARC_POINTS_PER_TURN,
        ));
    }
    Ok(pieces)
}

// ---------------------------------------------------------------------------
// Simple builders
// ---------------------------------------------------------------------------

pub fn build_disk(center: Complex64, radius: f64, label: &str) -> PlanarDomain {
    let outline = orient_loops(vec![circle_loop(center, radius)]);
    PlanarDomain::from_parts(
        label,
        BaseRegion::Disk { center, radius },
        vec![],
        vec![],
        true,
        outline,
    )
}

pub fn build_annulus(r_in: f64, r_out: f64, label: &str) -> PlanarDomain {
    let outline = orient_loops(vec![
        circle_loop(Complex64::new(0.0, 0.0), r_out),
        circle_loop(Complex64::new(0.0, 0.0), r_in),
    ]);
    PlanarDomain::from_parts(
        label,
        BaseRegion::Annulus { r_in, r_out },
        vec![],
        vec![],
        false,
        outline,
    )
}

pub fn build_annular_sector(
    r_in: f64,
    r_out: f64,
    theta: f64,
    half_angle: f64,
    label: &str,
) -> PlanarDomain {
    let outline = orient_loops(vec![sector_loop(r_in, r_out, theta, half_angle)]);
    PlanarDomain::from_parts(
        label,
        BaseRegion::AnnularSector {
            r_in,
            r_out,
            theta_center: theta,
            half_angle,
        },
        vec![],
        vec![],
        true,
        outline,
    )
}

/// The reference annulus `r/2 < |z| < 2r`.
pub fn build_ar(r: f64) -> PlanarDomain {
    build_annulus(r / 2.0, 2.0 * r, "A_R")
}

pub(crate) fn dr_geometry(r: f64) -> (f64, f64, f64) {
    (r / 2.0 + 1.0 / 9.0, 2.0 * r - 1.0 / 9.0, 0.75 * std::f64::consts::PI)
}

fn cr_geometry(r: f64) -> (f64, f64, f64) {
    (2.0 * r / 3.0, 1.5 * r, std::f64::consts::PI / 1.5)
}

/// The outer working sector: radii `(r/2 + 1/9, 2r - 1/9)`, half-opening
/// `3*pi/4` about direction `theta`.
pub fn build_dr(r: f64, theta: f64) -> PlanarDomain {
    let (r_in, r_out, half) = dr_geometry(r);
    build_annular_sector(r_in, r_out, theta, half, "D_R")
}

/// The core sector: radii `(2r/3, 3r/2)`, half-opening `2*pi/3` about
/// direction `theta`.
pub fn build_cr(r: f64, theta: f64) -> PlanarDomain {
    let (r_in, r_out, half) = cr_geometry(r);
    build_annular_sector(r_in, r_out, theta, half, "C_R")
}

pub fn build_disk_with_hole(
    center: Complex64,
    radius: f64,
    hole_center: Complex64,
    hole_radius: f64,
    label: &str,
) -> Result<PlanarDomain, DomainError> {
    let base = BaseRegion::Disk { center, radius };
    check_hole(&base, hole_center, hole_radius)?;
    let outline = orient_loops(vec![
        circle_loop(center, radius),
        circle_loop(hole_center, hole_radius),
    ]);
    Ok(PlanarDomain::from_parts(
        label,
        base,
        vec![RemovedDisk {
            center: hole_center,
            radius: hole_radius,
        }],
        vec![],
        false,
        outline,
    ))
}

/// The outer working sector with a small closed disk removed strictly
/// inside it.
pub fn build_dr_with_hole(
    r: f64,
    theta: f64,
    hole_center: Complex64,
    hole_radius: f64,
) -> Result<PlanarDomain, DomainError> {
    let (r_in, r_out, half) = dr_geometry(r);
    let base = BaseRegion::AnnularSector {
        r_in,
        r_out,
        theta_center: theta,
        half_angle: half,
    };
    check_hole(&base, hole_center, hole_radius)?;
    let outline = orient_loops(vec![
        sector_loop(r_in, r_out, theta, half),
        circle_loop(hole_center, hole_radius),
    ]);
    Ok(PlanarDomain::from_parts(
        "D_R-minus-disk",
        base,
        vec![RemovedDisk {
            center: hole_center,
            radius: hole_radius,
        }],
        vec![],
        false,
        outline,
    ))
}

/// An annular sector with a small closed disk removed strictly inside it.
pub fn build_annular_sector_with_hole(
    r_in: f64,
    r_out: f64,
    theta: f64,
    half_angle: f64,
    hole_center: Complex64,
    hole_radius: f64,
    label: &str,
) -> Result<PlanarDomain, DomainError> {
    let base = BaseRegion::AnnularSector {
        r_in,
        r_out,
        theta_center: theta,
        half_angle,
    };
    check_hole(&base, hole_center, hole_radius)?;
    let outline = orient_loops(vec![
        sector_loop(r_in, r_out, theta, half_angle),
        circle_loop(hole_center, hole_radius),
    ]);
    Ok(PlanarDomain::from_parts(
        label,
        base,
        vec![RemovedDisk {
            center: hole_center,
            radius: hole_radius,
        }],
        vec![],
        false,
        outline,
    ))
}

/// The reference annulus with a small closed disk removed strictly inside
/// it.
pub fn build_annulus_with_hole(
    r_in: f64,
    r_out: f64,
    hole_center: Complex64,
    hole_radius: f64,
    label: &str,
) -> Result<PlanarDomain, DomainError> {
    let base = BaseRegion::Annulus { r_in, r_out };
    check_hole(&base, hole_center, hole_radius)?;
    let outline = orient_loops(vec![
        circle_loop(Complex64::new(0.0, 0.0), r_out),
        circle_loop(Complex64::new(0.0, 0.0), r_in),
        circle_loop(hole_center, hole_radius),
    ]);
    Ok(PlanarDomain::from_parts(
        label,
        base,
        vec![RemovedDisk {
            center: hole_center,
            radius: hole_radius,
        }],
        vec![],
        false,
        outline,
    ))
}

fn check_hole(base: &BaseRegion, hc: Complex64, hr: f64) -> Result<(), DomainError> {
    if !(hr > 0.0) {
        return Err(DomainError::DegenerateDomain(
            "hole radius must be positive".into(),
        ));
    }
    if !base.contains(hc) || base.boundary_distance(hc) <= 2.0 * hr {
        return Err(DomainError::DegenerateDomain(
            "removed disk must sit strictly inside the base region".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// First-case cut domain
// ---------------------------------------------------------------------------

/// Radial padding of the core-sector tube, as a fraction of `r`.
const TUBE_RADIAL_PAD_DIV: f64 = 25.0;
/// Angular padding of the core-sector tube (radians). Kept small enough
/// that the padded tube stays within distance `r/20 - margin` of the core
/// sector, so it cannot reach a point whose `r/20`-disk misses the core.
const TUBE_ANGULAR_PAD: f64 = 1.0 / 150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arm {
    RadialOut,
    RadialIn,
    CircCcw,
    CircCw,
}

const ARMS: [Arm; 4] = [Arm::RadialOut, Arm::RadialIn, Arm::CircCcw, Arm::CircCw];

/// Domain for the first dichotomy case: the outer sector, possibly with the
/// disk of radius `r/20` around the small-image point `alpha` removed
/// together with a connecting hairline cut.
///
/// Dispatch:
///  (i)  the disk misses the whole sector: the sector itself is returned;
///  (ii) the disk misses the core sector: a padded tube around the core,
///       which stays clear of the disk, is returned;
///  (iii) otherwise a keyhole cut joins the disk to the sector boundary via
///        the first of four arm directions (radially out, radially in,
///        circularly counterclockwise, clockwise) that keeps the two
///        boundary-image witnesses `z1, z2` in one component.
pub fn build_case1_domain(
    alpha: Complex64,
    r: f64,
    theta: f64,
    z1: Complex64,
    z2: Complex64,
) -> Result<PlanarDomain, DomainError> {
    if !(r >= 4.0) {
        return Err(DomainError::DegenerateDomain(
            "scale radius must be at least 4".into(),
        ));
    }
    let rho = r / 20.0;
    let hw = r * DEFAULT_SLIT_HALFWIDTH_REL;
    let (d_in, d_out, d_half) = dr_geometry(r);
    let dsec = BaseRegion::AnnularSector {
        r_in: d_in,
        r_out: d_out,
        theta_center: theta,
        half_angle: d_half,
    };
    let (c_in, c_out, c_half) = cr_geometry(r);
    let csec = BaseRegion::AnnularSector {
        r_in: c_in,
        r_out: c_out,
        theta_center: theta,
        half_angle: c_half,
    };
    for (name, z) in [("z1", z1), ("z2", z2)] {
        if !csec.contains(z) {
            return Err(DomainError::WitnessTooClose(format!(
                "{name} must lie in the core sector"
            )));
        }
    }

    // (i) disk disjoint from the whole sector
    if !dsec.contains(alpha) && dsec.boundary_distance(alpha) >= rho {
        let mut d = build_dr(r, theta);
        d.label = "case1-omitted-outside".into();
        return Ok(d);
    }

    // (ii) disk disjoint from the core sector: padded tube around the core
    if !csec.contains(alpha) && csec.boundary_distance(alpha) >= rho {
        let tube = build_annular_sector(
            c_in - r / TUBE_RADIAL_PAD_DIV,
            c_out + r / TUBE_RADIAL_PAD_DIV,
            theta,
            c_half + TUBE_ANGULAR_PAD,
            "case1-tube",
        );
        if !tube.contains(alpha)
            && tube.base.boundary_distance(alpha) > 4.0 * hw
            && tube.contains(z1)
            && tube.contains(z2)
        {
            return Ok(tube);
        }
        // Fall through to the keyhole construction (defensive; the padding
        // constants make this unreachable for admissible inputs).
    }

    // (iii) keyhole
    for (name, z) in [("z1", z1), ("z2", z2)] {
        if (z - alpha).norm() < rho + 20.0 * hw {
            return Err(DomainError::WitnessTooClose(format!(
                "{name} lies inside the removed disk's safety margin"
            )));
        }
    }
    let mut last_err = None;
    for arm in ARMS {
        match keyhole_domain(alpha, r, theta, arm) {
            Ok(d) => {
                if d.contains(z1) && d.contains(z2) && connectivity_probe(&d, z1, z2) {
                    return Ok(d);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        DomainError::WitnessTooClose(
            "no cut direction keeps both witnesses in one component".into(),
        )
    }))
}

fn keyhole_domain(
    alpha: Complex64,
    r: f64,
    theta: f64,
    arm: Arm,
) -> Result<PlanarDomain, DomainError> {
    let (r_in, r_out, half) = dr_geometry(r);
    let lo = theta - half;
    let hi = theta + half;
    let rho = r / 20.0;
    let hw = r * DEFAULT_SLIT_HALFWIDTH_REL;
    let sector = BaseRegion::AnnularSector {
        r_in,
        r_out,
        theta_center: theta,
        half_angle: half,
    };
    if !sector.contains(alpha) || sector.boundary_distance(alpha) <= rho + 20.0 * hw {
        return Err(DomainError::WitnessTooClose(
            "removed disk must sit strictly inside the sector".into(),
        ));
    }
    let c_out_lo = polar(r_out, lo);
    let c_out_hi = polar(r_out, hi);
    let c_in_hi = polar(r_in, hi);
    let c_in_lo = polar(r_in, lo);
    let phi_a = alpha.arg();
    let ra = alpha.norm();
    let s_rho = (rho * rho - hw * hw).sqrt();

    let mut pieces: Vec<Piece> = Vec::new();
    let spine: Vec<Complex64>;
    // Which of the four sector sides the arm pierces, with the two exact
    // junction points.
    enum Pierced {
        Outer(Complex64, Complex64),
        Inner(Complex64, Complex64),
        // (junction at larger radius, junction at smaller radius)
        SideHi(Complex64, Complex64),
        SideLo(Complex64, Complex64),
    }
    let pierced: Pierced;

    match arm {
        Arm::RadialOut | Arm::RadialIn => {
            let outward = arm == Arm::RadialOut;
            let v = if outward { polar(1.0, phi_a) } else { -polar(1.0, phi_a) };
            let ivn = rot90(v);
            let target_r = if outward { r_out } else { r_in };
            let qa = alpha + v * s_rho + ivn * hw;
            let qb = alpha + v * s_rho - ivn * hw;
            let pa = line_circle_forward(alpha + ivn * hw, v, target_r)
                .ok_or_else(|| DomainError::StitchFailure("radial arm misses its circle".into()))?;
            let pb = line_circle_forward(alpha - ivn * hw, v, target_r)
                .ok_or_else(|| DomainError::StitchFailure("radial arm misses its circle".into()))?;
            let pc = line_circle_forward(alpha, v, target_r)
                .ok_or_else(|| DomainError::StitchFailure("radial arm misses its circle".into()))?;
            let t_exit = (pc - alpha).norm();
            spine = vec![alpha, alpha + v * (t_exit + 10.0 * hw)];
            pieces.push(Piece::new(vec![pa, qa]));
            pieces.push(Piece::new(vec![pb, qb]));
            pieces.push(disk_kept_arc(alpha, rho, qa, qb));
            pierced = if outward {
                Pierced::Outer(pa, pb)
            } else {
                Pierced::Inner(pa, pb)
            };
        }
        Arm::CircCcw | Arm::CircCw => {
            let dir: f64 = if arm == Arm::CircCcw { 1.0 } else { -1.0 };
            let side_angle = if arm == Arm::CircCcw { hi } else { lo };
            let rp = ra + hw;
            let rm = ra - hw;
            let margin = 0.02 * r;
            if rm <= r_in + margin || rp >= r_out - margin {
                return Err(DomainError::WitnessTooClose(
                    "circular arm too close to the sector arcs".into(),
                ));
            }
            let pick = |pts: (Complex64, Complex64)| -> Result<Complex64, DomainError> {
                let (p1, p2) = pts;
                let good1 = dir * wrap_angle(p1.arg() - phi_a) > 0.0;
                let good2 = dir * wrap_angle(p2.arg() - phi_a) > 0.0;
                match (good1, good2) {
                    (true, false) => Ok(p1),
                    (false, true) => Ok(p2),
                    _ => Err(DomainError::StitchFailure(
                        "ambiguous disk crossing for circular arm".into(),
                    )),
                }
            };
            let q_p = pick(circle_circle(rp, alpha, rho).ok_or_else(|| {
                DomainError::StitchFailure("circular arm wall misses the disk".into())
            })?)?;
            let q_m = pick(circle_circle(rm, alpha, rho).ok_or_else(|| {
                DomainError::StitchFailure("circular arm wall misses the disk".into())
            })?)?;
            let x_p = polar(rp, side_angle);
            let x_m = polar(rm, side_angle);
            let sweep = |from: f64| -> f64 {
                if dir > 0.0 {
                    (side_angle - from).rem_euclid(TAU)
                } else {
                    -((from - side_angle).rem_euclid(TAU))
                }
            };
            let a_qp = q_p.arg();
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                rp,
                a_qp,
                a_qp + sweep(a_qp),
                q_p,
                x_p,
                SLIT_WALL_POINTS_PER_TURN,
            ));
            let a_qm = q_m.arg();
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                rm,
                a_qm,
                a_qm + sweep(a_qm),
                q_m,
                x_m,
                SLIT_WALL_POINTS_PER_TURN,
            ));
            pieces.push(disk_kept_arc(alpha, rho, q_p, q_m));
            // Spine for the constructive description: the center-line arc,
            // extended slightly past the sector side.
            let total = sweep(phi_a) + dir * 10.0 * hw / ra;
            let n = arc_point_count(ra, total, SLIT_SPINE_POINTS_PER_TURN);
            let mut sp = Vec::with_capacity(n + 1);
            sp.push(alpha);
            for k in 1..=n {
                sp.push(polar(ra, phi_a + total * k as f64 / n as f64));
            }
            spine = sp;
            pierced = if arm == Arm::CircCcw {
                Pierced::SideHi(x_p, x_m)
            } else {
                Pierced::SideLo(x_p, x_m)
            };
        }
    }

    // Sector boundary pieces, splitting the pierced side.
    let ang_margin = 40.0 * hw / r;
    let split_arc = |radius: f64,
                         corner_start: Complex64,
                         corner_end: Complex64,
                         pa: Complex64,
                         pb: Complex64|
     -> Result<Vec<Piece>, DomainError> {
        let ang = |p: Complex64| lo + (p.arg() - lo).rem_euclid(TAU);
        let (mut a1, mut p1, mut a2, mut p2) = (ang(pa), pa, ang(pb), pb);
        if a1 > a2 {
            std::mem::swap(&mut a1, &mut a2);
            std::mem::swap(&mut p1, &mut p2);
        }
        if a1 <= lo + ang_margin || a2 >= hi - ang_margin || a2 - a1 > 0.2 {
            return Err(DomainError::WitnessTooClose(
                "arm exit leaves the sector side".into(),
            ));
        }
        Ok(vec![
            arc_piece_exact(
                Complex64::new(0.0, 0.0),
                radius,
                lo,
                a1,
                corner_start,
                p1,
                ARC_POINTS_PER_TURN,
            ),
            arc_piece_exact(
                Complex64::new(0.0, 0.0),
                radius,
                a2,
                hi,
                p2,
                corner_end,
                ARC_POINTS_PER_TURN,
            ),
        ])
    };

    match &pierced {
        Pierced::Outer(pa, pb) => {
            pieces.extend(split_arc(r_out, c_out_lo, c_out_hi, *pa, *pb)?);
            pieces.push(Piece::new(vec![c_out_hi, c_in_hi]));
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                r_in,
                lo,
                hi,
                c_in_lo,
                c_in_hi,
                ARC_POINTS_PER_TURN,
            ));
            pieces.push(Piece::new(vec![c_in_lo, c_out_lo]));
        }
        Pierced::Inner(pa, pb) => {
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                r_out,
                lo,
                hi,
                c_out_lo,
                c_out_hi,
                ARC_POINTS_PER_TURN,
            ));
            pieces.push(Piece::new(vec![c_out_hi, c_in_hi]));
            pieces.extend(split_arc(r_in, c_in_lo, c_in_hi, *pa, *pb)?);
            pieces.push(Piece::new(vec![c_in_lo, c_out_lo]));
        }
        Pierced::SideHi(x_hi_r, x_lo_r) => {
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                r_out,
                lo,
                hi,
                c_out_lo,
                c_out_hi,
                ARC_POINTS_PER_TURN,
            ));
            pieces.push(Piece::new(vec![c_out_hi, *x_hi_r]));
            pieces.push(Piece::new(vec![*x_lo_r, c_in_hi]));
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                r_in,
                lo,
                hi,
                c_in_lo,
                c_in_hi,
                ARC_POINTS_PER_TURN,
            ));
            pieces.push(Piece::new(vec![c_in_lo, c_out_lo]));
        }
        Pierced::SideLo(x_hi_r, x_lo_r) => {
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                r_out,
                lo,
                hi,
                c_out_lo,
                c_out_hi,
                ARC_POINTS_PER_TURN,
            ));
            pieces.push(Piece::new(vec![c_out_hi, c_in_hi]));
            pieces.push(arc_piece_exact(
                Complex64::new(0.0, 0.0),
                r_in,
                lo,
                hi,
                c_in_lo,
                c_in_hi,
                ARC_POINTS_PER_TURN,
            ));
            pieces.push(Piece::new(vec![c_in_lo, *x_lo_r]));
            pieces.push(Piece::new(vec![*x_hi_r, c_out_lo]));
        }
    }

    let contours = stitch_pieces(pieces)?;
    if contours.len() != 1 {
        return Err(DomainError::StitchFailure(format!(
            "keyhole boundary stitched into {} loops (expected 1)",
            contours.len()
        )));
    }
    let arm_name = match arm {
        Arm::RadialOut => "radial-out",
        Arm::RadialIn => "radial-in",
        Arm::CircCcw => "circ-ccw",
        Arm::CircCw => "circ-cw",
    };
    Ok(PlanarDomain::from_parts(
        format!("case1-keyhole-{arm_name}"),
        sector,
        vec![RemovedDisk {
            center: alpha,
            radius: rho,
        }],
        vec![Slit {
            points: spine,
            halfwidth: hw,
        }],
        true,
        contours,
    ))
}

/// Raster flood-fill check that `z1` and `z2` lie in a common component.
/// Slits are inflated by two grid steps and a one-step margin is kept from
/// circular boundaries, so a positive answer is conservative: a path of
/// marked cells is a genuine path in the true domain.
fn connectivity_probe(domain: &PlanarDomain, z1: Complex64, z2: Complex64) -> bool {
    let n: usize = 512;
    let (x0, x1, y0, y1) = domain.bounding_box();
    let dx = (x1 - x0) / n as f64;
    let dy = (y1 - y0) / n as f64;
    let step = dx.max(dy);
    let inflate = 2.0 * step;

    let probe_contains = |z: Complex64| -> bool {
        if !domain.base.contains(z) || domain.base.boundary_distance(z) <= step {
            return false;
        }
        for d in &domain.removed_disks {
            if (z - d.center).norm() <= d.radius + step {
                return false;
            }
        }
        for s in &domain.slits {
            if dist_to_polyline(z, &s.points) <= s.halfwidth + inflate {
                return false;
            }
        }
        true
    };
    let center_of = |ix: usize, iy: usize| {
        Complex64::new(x0 + (ix as f64 + 0.5) * dx, y0 + (iy as f64 + 0.5) * dy)
    };
    let mut marked = vec![false; n * n];
    for iy in 0..n {
        for ix in 0..n {
            marked[iy * n + ix] = probe_contains(center_of(ix, iy));
        }
    }

    // Anchor each endpoint to a marked cell reachable from it by a straight
    // segment inside the true domain.
    let anchor = |z: Complex64| -> Option<(usize, usize)> {
        let ix0 = (((z.re - x0) / dx) as isize).clamp(0, n as isize - 1);
        let iy0 = (((z.im - y0) / dy) as isize).clamp(0, n as isize - 1);
        for radius in 0..=5isize {
            for diy in -radius..=radius {
                for dix in -radius..=radius {
                    if dix.abs().max(diy.abs()) != radius {
                        continue;
                    }
                    let ix = ix0 + dix;
                    let iy = iy0 + diy;
                    if ix < 0 || iy < 0 || ix >= n as isize || iy >= n as isize {
                        continue;
                    }
                    let (ix, iy) = (ix as usize, iy as usize);
                    if !marked[iy * n + ix] {
                        continue;
                    }
                    let c = center_of(ix, iy);
                    let seg_ok = (0..=16).all(|k| {
                        let t = k as f64 / 16.0;
                        domain.contains(z + (c - z) * t)
                    });
                    if seg_ok {
                        return Some((ix, iy));
                    }
                }
            }
        }
        None
    };
    let (sx, sy) = match anchor(z1) {
        Some(c) => c,
        None => return false,
    };
    let (tx, ty) = match anchor(z2) {
        Some(c) => c,
        None => return false,
    };

    let mut seen = vec![false; n * n];
    let mut queue = std::collections::VecDeque::new();
    seen[sy * n + sx] = true;
    queue.push_back((sx, sy));
    while let Some((ix, iy)) = queue.pop_front() {
        if (ix, iy) == (tx, ty) {
            return true;
        }
        let neighbors = [
            (ix.wrapping_sub(1), iy),
            (ix + 1, iy),
            (ix, iy.wrapping_sub(1)),
            (ix, iy + 1),
        ];
        for (jx, jy) in neighbors {
            if jx < n && jy < n && marked[jy * n + jx] && !seen[jy * n + jx] {
                seen[jy * n + jx] = true;
                queue.push_back((jx, jy));
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Second-case cut domain
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum CutKind {
    Through { phi_out: f64, phi_in: f64 },
    DeadEnd { to_outer: bool, phi_exit: f64 },
}

#[derive(Debug, Clone)]
struct CutPlan {
    spine: Vec<Complex64>,
    hw: f64,
    kind: CutKind,
}

/// Domain for the second dichotomy case: the annulus `r/2 < |z| < 2r` with
/// a radial through-cut swallowing the excluded disk around `alpha` (making
/// the region simply connected) and a hairline dead-end cut from the nearer
/// circle to each point of `avoided`. Cuts keep Euclidean distance at least
/// `eps*r/4` from the witnesses `z1, z2`, detouring around them with mitered
/// elbows where necessary.
pub fn build_case2_domain(
    alpha: Complex64,
    avoided: &[Complex64],
    eps: f64,
    r: f64,
    jexp: u32,
    z1: Complex64,
    z2: Complex64,
) -> Result<PlanarDomain, DomainError> {
    if !(r > 1.0) {
        return Err(DomainError::DegenerateDomain("radius must exceed 1".into()));
    }
    if !(eps > 0.0 && eps < 0.2) {
        return Err(DomainError::DegenerateDomain(
            "eps must lie in (0, 0.2)".into(),
        ));
    }
    if jexp == 0 {
        return Err(DomainError::DegenerateDomain(
            "excluded-disk exponent must be positive".into(),
        ));
    }
    let r_in = r / 2.0;
    let r_out = 2.0 * r;
    let hw = r * DEFAULT_SLIT_HALFWIDTH_REL;
    let r_ex = r.powf(-(jexp as f64) / 2.0).max(r * 1e-12);
    let hw_alpha = hw.max(1.5 * r_ex);
    let clearance = eps * r / 4.0;
    if clearance <= 3.0 * hw_alpha {
        return Err(DomainError::SeparationViolated(
            "slit width exceeds the available witness clearance".into(),
        ));
    }
    let band_lo = r_in + eps * r;
    let band_hi = r_out - eps * r;
    for (name, p) in std::iter::once(("alpha", alpha))
        .chain(avoided.iter().map(|&x| ("avoided", x)))
    {
        let m = p.norm();
        if !(band_lo <= m && m <= band_hi) {
            return Err(DomainError::WitnessTooClose(format!(
                "{name} point must keep radial margin eps*r from both circles"
            )));
        }
    }
    for (name, z) in [("z1", z1), ("z2", z2)] {
        let m = z.norm();
        if !(r_in + 0.5 * eps * r < m && m < r_out - 0.5 * eps * r) {
            return Err(DomainError::WitnessTooClose(format!(
                "{name} sits too close to the annulus boundary"
            )));
        }
        if (z - alpha).norm() < eps * r {
            return Err(DomainError::WitnessTooClose(format!(
                "{name} sits within eps*r of the excluded point"
            )));
        }
        for x in avoided {
            if (z - x).norm() < eps * r {
                return Err(DomainError::WitnessTooClose(format!(
                    "{name} sits within eps*r of an avoided point"
                )));
            }
        }
    }

    let shifts = [0.0, eps / 2.0, -eps / 2.0, eps, -eps];
    let witnesses = [z1, z2];
    let spine_clear = |spine: &[Complex64], hw_c: f64, cuts: &[CutPlan]| -> bool {
        for z in witnesses {
            if dist_to_polyline(z, spine) <= clearance {
                return false;
            }
        }
        for c in cuts {
            if polyline_polyline_dist(spine, &c.spine) <= hw_c + c.hw + 40.0 * hw {
                return false;
            }
        }
        true
    };

    let mut cuts: Vec<CutPlan> = Vec::new();

    // Through-cut at alpha (possibly Z-shaped to clear the witnesses).
    let phi_a = alpha.arg();
    let ra = alpha.norm();
    let mut through = None;
    'through: for so in shifts {
        for si in shifts {
            let mut sp = Vec::with_capacity(6);
            sp.push(polar(r_out + 20.0 * hw_alpha, phi_a + so));
            if so != 0.0 {
                let r1 = ra + eps * r / 2.0;
                sp.push(polar(r1, phi_a + so));
                sp.push(polar(r1, phi_a));
            }
            if si != 0.0 {
                let r2 = ra - eps * r / 2.0;
                sp.push(polar(r2, phi_a));
                sp.push(polar(r2, phi_a + si));
            }
            sp.push(polar(r_in - 20.0 * hw_alpha, phi_a + si));
            if spine_clear(&sp, hw_alpha, &cuts) {
                through = Some(CutPlan {
                    spine: sp,
                    hw: hw_alpha,
                    kind: CutKind::Through {
                        phi_out: phi_a + so,
                        phi_in: phi_a + si,
                    },
                });
                break 'through;
            }
        }
    }
    match through {
        Some(c) => cuts.push(c),
        None => {
            return Err(DomainError::SeparationViolated(
                "no through-cut shift clears the witnesses".into(),
            ))
        }
    }

    // Dead-end cuts, deterministically ordered.
    let mut sorted_avoided: Vec<Complex64> = avoided.to_vec();
    sorted_avoided.sort_by(|a, b| {
        a.arg()
            .rem_euclid(TAU)
            .total_cmp(&b.arg().rem_euclid(TAU))
            .then(a.norm().total_cmp(&b.norm()))
    });
    for x in sorted_avoided {
        if dist_to_polyline(x, &cuts[0].spine) <= 0.99 * cuts[0].hw {
            continue; // already swallowed by the through-cut
        }
        let to_outer = (r_out - x.norm()) <= (x.norm() - r_in);
        let phi_x = x.arg();
        let mut placed = false;
        for s in shifts {
            let phi_e = phi_x + s;
            let q = if to_outer {
                polar(r_out + 20.0 * hw, phi_e)
            } else {
                polar(r_in - 20.0 * hw, phi_e)
            };
            let sp = if s == 0.0 {
                vec![q, x]
            } else {
                vec![q, polar(x.norm(), phi_e), x]
            };
            if spine_clear(&sp, hw, &cuts) {
                cuts.push(CutPlan {
                    spine: sp,
                    hw,
                    kind: CutKind::DeadEnd {
                        to_outer,
                        phi_exit: phi_e,
                    },
                });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(DomainError::SeparationViolated(
                "no dead-end cut shift clears the witnesses and other cuts".into(),
            ));
        }
    }

    // Exits and wall chains.
    let mut outer_exits: Vec<ExitData> = Vec::new();
    let mut inner_exits: Vec<ExitData> = Vec::new();
    let mut pieces: Vec<Piece> = Vec::new();
    for cut in &cuts {
        match cut.kind {
            CutKind::Through { phi_out, phi_in } => {
                // Travel runs outer -> inner, so both exit legs point inward.
                let e_out = make_exit(r_out, phi_out, cut.hw, -1.0);
                let e_in = make_exit(r_in, phi_in, cut.hw, -1.0);
                let mut left = offset_chain(&cut.spine, cut.hw, 1.0);
                let mut right = offset_chain(&cut.spine, cut.hw, -1.0);
                left[0] = e_out.left;
                right[0] = e_out.right;
                *left.last_mut().unwrap() = e_in.left;
                *right.last_mut().unwrap() = e_in.right;
                pieces.push(Piece::new(left));
                pieces.push(Piece::new(right));
                outer_exits.push(e_out);
                inner_exits.push(e_in);
            }
            CutKind::DeadEnd { to_outer, phi_exit } => {
                let circle_r = if to_outer { r_out } else { r_in };
                let sigma = if to_outer { -1.0 } else { 1.0 };
                let e = make_exit(circle_r, phi_exit, cut.hw, sigma);
                let mut left = offset_chain(&cut.spine, cut.hw, 1.0);
                let mut right = offset_chain(&cut.spine, cut.hw, -1.0);
                left[0] = e.left;
                right[0] = e.right;
                let n = cut.spine.len();
                let t_last = {
                    let d = cut.spine[n - 1] - cut.spine[n - 2];
                    d / d.norm()
                };
                let cap = cut.spine[n - 1] + t_last * cut.hw;
                let mut piece = right;
                piece.push(cap);
                left.reverse();
                piece.extend(left);
                pieces.push(Piece::new(piece));
                if to_outer {
                    outer_exits.push(e);
                } else {
                    inner_exits.push(e);
                }
            }
        }
    }
    let outer_refs: Vec<&ExitData> = outer_exits.iter().collect();
    let inner_refs: Vec<&ExitData> = inner_exits.iter().collect();
    pieces.extend(circle_arc_pieces(r_out, &outer_refs)?);
    pieces.extend(circle_arc_pieces(r_in, &inner_refs)?);

    let contours = stitch_pieces(pieces)?;
    if contours.len() != 1 {
        return Err(DomainError::StitchFailure(format!(
            "cut annulus stitched into {} loops (expected 1)",
            contours.len()
        )));
    }

    let slits = cuts
        .iter()
        .map(|c| Slit {
            points: c.spine.clone(),
            halfwidth: c.hw,
        })
        .collect();
    let domain = PlanarDomain::from_parts(
        "case2-cut-annulus",
        BaseRegion::Annulus { r_in, r_out },
        vec![RemovedDisk {
            center: alpha,
            radius: r_ex,
        }],
        slits,
        true,
        contours,
    );
    for (name, z) in [("z1", z1), ("z2", z2)] {
        if !domain.contains(z) {
            return Err(DomainError::SeparationViolated(format!(
                "{name} ended up outside the cut domain"
            )));
        }
    }
    debug_assert!(!domain.contains(alpha));
    for x in avoided {
        debug_assert!(!domain.contains(*x));
    }
    Ok(domain)
}

pub(crate) fn seg_seg_dist(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    let orient = |p: Complex64, q: Complex64, r: Complex64| -> f64 {
        (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
    };
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    super::dist_to_segment(c, a, b)
        .min(super::dist_to_segment(d, a, b))
        .min(super::dist_to_segment(a, c, d))
        .min(super::dist_to_segment(b, c, d))
}

fn polyline_polyline_dist(p: &[Complex64], q: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for w1 in p.windows(2) {
        for w2 in q.windows(2) {
            best = best.min(seg_seg_dist(w1[0], w1[1], w2[0], w2[1]));
        }
    }
    best
}
