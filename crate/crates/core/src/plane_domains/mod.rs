//! Constructive plane regions: a disk/annulus/annular-sector base, minus
//! closed disks, minus thickened slit polylines.
//!
//! Membership and boundary distance are evaluated exactly from the
//! constructive description (circles are circles). The oriented boundary,
//! used for winding integration, is a polygonal outline built analytically
//! by the constructors in [`builders`]; arcs are sampled at a fixed relative
//! resolution, so every derived quantity is invariant under rescaling all
//! lengths. Within a slit half-width of caps and mitered corners the polygon
//! and the constructive region may disagree; all consumers treat boundary
//! data as accurate to that tolerance.

mod stitch;
pub mod builders;

pub use stitch::{stitch_pieces, Piece};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cjson;

/// Points per full turn when sampling circular arcs into the outline.
pub const ARC_POINTS_PER_TURN: usize = 1024;

/// Default slit half-width relative to the characteristic radius.
pub const DEFAULT_SLIT_HALFWIDTH_REL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaseRegion {
    Disk {
        #[serde(with = "cjson::c")]
        center: Complex64,
        radius: f64,
    },
    Annulus {
        r_in: f64,
        r_out: f64,
    },
    AnnularSector {
        r_in: f64,
        r_out: f64,
        theta_center: f64,
        half_angle: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovedDisk {
    #[serde(with = "cjson::c")]
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    #[serde(with = "cjson::vec_c")]
    pub points: Vec<Complex64>,
    pub halfwidth: f64,
}

/// A closed oriented polyline; the segment from the last point back to the
/// first is implied. Points are stored in traversal order: counterclockwise
/// for the outer boundary (`orientation = +1`), clockwise for holes (`-1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    #[serde(with = "cjson::vec_c")]
    pub points: Vec<Complex64>,
    pub orientation: i8,
}

impl Contour {
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| (self.points[(i + 1) % n] - self.points[i]).norm())
            .sum()
    }
}

pub fn signed_area(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        twice += a.re * b.im - b.re * a.im;
    }
    0.5 * twice
}

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),
    #[error("witness placement violates construction preconditions: {0}")]
    WitnessTooClose(String),
    #[error("required separations cannot be achieved: {0}")]
    SeparationViolated(String),
    #[error("boundary assembly failed: {0}")]
    StitchFailure(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarDomain {
    pub label: String,
    pub base: BaseRegion,
    pub removed_disks: Vec<RemovedDisk>,
    pub slits: Vec<Slit>,
    pub simply_connected: bool,
    /// Oriented boundary loops, built by the constructors. Serialized so
    /// that round-tripped domains keep a usable boundary.
    outline: Vec<Contour>,
}

impl BaseRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            BaseRegion::Disk { center, radius } => (z - center).norm() < radius,
            BaseRegion::Annulus { r_in, r_out } => {
                let m = z.norm();
                r_in < m && m < r_out
            }
            BaseRegion::AnnularSector {
                r_in,
                r_out,
                theta_center,
                half_angle,
            } => {
                let m = z.norm();
                r_in < m
                    && m < r_out
                    && wrap_angle(z.arg() - theta_center).abs() < half_angle
            }
        }
    }

    /// Exact Euclidean distance from `z` to the boundary of the base region
    /// (defined for every `z`, inside or out).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match *self {
            BaseRegion::Disk { center, radius } => (radius - (z - center).norm()).abs(),
            BaseRegion::Annulus { r_in, r_out } => {
                let m = z.norm();
                (m - r_in).abs().min((m - r_out).abs())
            }
            BaseRegion::AnnularSector {
                r_in,
                r_out,
                theta_center,
                half_angle,
            } => {
                let lo = theta_center - half_angle;
                let hi = theta_center + half_angle;
                let d_outer = dist_to_arc(z, r_out, lo, hi);
                let d_inner = dist_to_arc(z, r_in, lo, hi);
                let d_s1 = dist_to_segment(
                    z,
                    Complex64::from_polar(r_in, lo),
                    Complex64::from_polar(r_out, lo),
                );
                let d_s2 = dist_to_segment(
                    z,
                    Complex64::from_polar(r_in, hi),
                    Complex64::from_polar(r_out, hi),
                );
                d_outer.min(d_inner).min(d_s1).min(d_s2)
            }
        }
    }

    /// Axis-aligned bounding box `(re_min, re_max, im_min, im_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            BaseRegion::Disk { center, radius } => (
                center.re - radius,
                center.re + radius,
                center.im - radius,
                center.im + radius,
            ),
            BaseRegion::Annulus { r_out, .. } => (-r_out, r_out, -r_out, r_out),
            BaseRegion::AnnularSector {
                r_in,
                r_out,
                theta_center,
                half_angle,
            } => {
                let lo = theta_center - half_angle;
                let hi = theta_center + half_angle;
                let mut pts = vec![
                    Complex64::from_polar(r_in, lo),
                    Complex64::from_polar(r_in, hi),
                    Complex64::from_polar(r_out, lo),
                    Complex64::from_polar(r_out, hi),
                ];
                // Axis extremes of the outer arc that fall inside the span.
                for k in -2..=2 {
                    let a = 0.5 * std::f64::consts::PI * k as f64;
                    if wrap_angle(a - theta_center).abs() < half_angle {
                        pts.push(Complex64::from_polar(r_out, a));
                    }
                }
                let re_min = pts.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
                let re_max = pts.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
                let im_min = pts.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
                let im_max = pts.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max);
                (re_min, re_max, im_min, im_max)
            }
        }
    }

    /// A characteristic length of the region.
    pub fn scale(&self) -> f64 {
        match *self {
            BaseRegion::Disk { radius, .. } => radius,
            BaseRegion::Annulus { r_out, .. } => r_out,
            BaseRegion::AnnularSector { r_out, .. } => r_out,
        }
    }
}

impl PlanarDomain {
    /// Assemble a domain from parts; used only by the constructors in
    /// [`builders`], which guarantee that `outline` matches the constructive
    /// description.
    pub(crate) fn from_parts(
        label: impl Into<String>,
        base: BaseRegion,
        removed_disks: Vec<RemovedDisk>,
        slits: Vec<Slit>,
        simply_connected: bool,
        outline: Vec<Contour>,
    ) -> Self {
        PlanarDomain {
            label: label.into(),
            base,
            removed_disks,
            slits,
            simply_connected,
            outline,
        }
    }

    pub fn outline(&self) -> &[Contour] {
        &self.outline
    }

    pub fn scale(&self) -> f64 {
        self.base.scale()
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.base.bounding_box()
    }

    /// Exact membership per the constructive description: strictly inside
    /// the base, strictly outside every closed removed disk, and strictly
    /// farther than the half-width from every slit polyline.
    pub fn contains(&self, z: Complex64) -> bool {
        if !self.base.contains(z) {
            return false;
        }
        for d in &self.removed_disks {
            if (z - d.center).norm() <= d.radius {
                return false;
            }
        }
        for s in &self.slits {
            if dist_to_polyline(z, &s.points) <= s.halfwidth {
                return false;
            }
        }
        true
    }

    /// Distance from `z` to the nearest boundary element (base boundary,
    /// removed-disk circle, or slit wall). Exact for circular and straight
    /// pieces; within one half-width near slit caps and corners.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let mut d = self.base.boundary_distance(z);
        for rd in &self.removed_disks {
            d = d.min(((z - rd.center).norm() - rd.radius).abs());
        }
        for s in &self.slits {
            d = d.min((dist_to_polyline(z, &s.points) - s.halfwidth).abs());
        }
        d
    }

    pub fn contains_with_margin(&self, z: Complex64, margin: f64) -> bool {
        self.contains(z) && self.boundary_distance(z) > margin
    }

    /// The oriented boundary with every edge no longer than `max_edge`
    /// (longer edges are subdivided along their chords; the polygon itself
    /// is the boundary being described, so subdivision adds no new shape).
    pub fn boundary_contour(&self, max_edge: f64) -> Result<Vec<Contour>, DomainError> {
        if self.outline.is_empty() {
            return Err(DomainError::DegenerateDomain(format!(
                "domain '{}' carries no boundary outline",
                self.label
            )));
        }
        if !(max_edge > 0.0) {
            return Err(DomainError::DegenerateDomain(
                "max_edge must be positive".into(),
            ));
        }
        Ok(self
            .outline
            .iter()
            .map(|c| Contour {
                points: subdivide_closed(&c.points, max_edge),
                orientation: c.orientation,
            })
            .collect())
    }
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

pub fn dist_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

pub fn dist_to_polyline(z: Complex64, pts: &[Complex64]) -> f64 {
    if pts.len() == 1 {
        return (z - pts[0]).norm();
    }
    let mut best = f64::INFINITY;
    for w in pts.windows(2) {
        best = best.min(dist_to_segment(z, w[0], w[1]));
    }
    best
}

/// Distance from `z` to the arc of the origin-centered circle of radius `r`
/// spanning angles `[lo, hi]` (with `hi - lo <= 2*pi`).
pub fn dist_to_arc(z: Complex64, r: f64, lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    if wrap_angle(z.arg() - mid).abs() <= half {
        (z.norm() - r).abs()
    } else {
        let p1 = Complex64::from_polar(r, lo);
        let p2 = Complex64::from_polar(r, hi);
        (z - p1).norm().min((z - p2).norm())
    }
}

fn subdivide_closed(pts: &[Complex64], max_edge: f64) -> Vec<Complex64> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        out.push(a);
        let len = (b - a).norm();
        if len > max_edge {
            let pieces = (len / max_edge).ceil() as usize;
            for k in 1..pieces {
                out.push(a + (b - a) * (k as f64 / pieces as f64));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::builders;
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn region_definitions_match_displayed_constants() {
        let d = builders::build_dr(9.0, 0.0);
        match d.base {
            BaseRegion::AnnularSector {
                r_in,
                r_out,
                theta_center,
                half_angle,
            } => {
                assert_relative_eq!(r_in, 4.0 + 0.5 + 1.0 / 9.0, max_relative = 1e-15);
                assert_relative_eq!(r_out, 18.0 - 1.0 / 9.0, max_relative = 1e-15);
                assert_relative_eq!(theta_center, 0.0);
                assert_relative_eq!(half_angle, 3.0 * std::f64::consts::PI / 4.0);
            }
            _ => panic!("annular sector expected"),
        }
    }

    #[test]
    fn annulus_membership_is_open() {
        let a = builders::build_ar(2.0);
        assert!(a.contains(c(1.5, 0.0)));
        assert!(!a.contains(c(1.0, 0.0)));
        assert!(!a.contains(c(4.0, 0.0)));
    }

    #[test]
    fn nested_regions() {
        let r = 9.0;
        let d = builders::build_dr(r, 0.0);
        let cc = builders::build_cr(r, 0.0);
        // An inner-boundary point of the larger sector is outside the smaller.
        let p = c(r / 2.0 + 1.0 / 9.0, 0.0);
        assert!(!cc.contains(p));
        // Boundary samples of the smaller sector lie in the larger, and
        // boundary samples of the larger lie in the full annulus.
        let a = builders::build_ar(r);
        for contour in cc.outline() {
            for &q in &contour.points {
                assert!(d.contains(q), "C-sector boundary must sit inside D-sector");
            }
        }
        for contour in d.outline() {
            for &q in &contour.points {
                assert!(a.contains(q), "D-sector boundary must sit inside the annulus");
            }
        }
    }

    #[test]
    fn boundary_distances_are_exact_for_circular_bases() {
        let disk = builders::build_disk(c(0.0, 0.0), 1.0, "disk");
        assert_relative_eq!(disk.boundary_distance(c(0.0, 0.0)), 1.0);
        let ann = builders::build_annulus(1.0, 4.0, "ann");
        assert_relative_eq!(ann.boundary_distance(c(2.0, 0.0)), 1.0);
        assert_relative_eq!(ann.boundary_distance(c(0.0, 3.5)), 0.5);
    }

    #[test]
    fn removed_disk_excludes_its_closure() {
        let d = builders::build_disk_with_hole(c(0.0, 0.0), 1.0, c(0.5, 0.0), 0.1, "holed")
            .unwrap();
        assert!(!d.contains(c(0.5, 0.0)));
        assert!(!d.contains(c(0.6, 0.0)));
        assert!(d.contains(c(0.61, 0.0)));
        assert!(d.contains(c(-0.5, 0.0)));
        assert_eq!(d.outline().len(), 2);
        assert!(!d.simply_connected);
    }

    #[test]
    fn disk_contour_has_unit_perimeter_scale() {
        let disk = builders::build_disk(c(0.0, 0.0), 1.0, "disk");
        let cs = disk.boundary_contour(0.01).unwrap();
        assert_eq!(cs.len(), 1);
        let len = cs[0].perimeter();
        assert_relative_eq!(len, 2.0 * std::f64::consts::PI, max_relative = 0.01);
        assert_eq!(cs[0].orientation, 1);
        assert!(cs[0].signed_area() > 0.0);
    }

    #[test]
    fn annulus_contours_have_opposite_orientations() {
        let ann = builders::build_annulus(1.0, 2.0, "ann");
        let cs = ann.boundary_contour(0.05).unwrap();
        assert_eq!(cs.len(), 2);
        let mut orientations: Vec<i8> = cs.iter().map(|c| c.orientation).collect();
        orientations.sort_unstable();
        assert_eq!(orientations, vec![-1, 1]);
        for k in &cs {
            if k.orientation == 1 {
                assert!(k.signed_area() > 0.0);
            } else {
                assert!(k.signed_area() < 0.0);
            }
        }
    }

    #[test]
    fn angle_wrapping() {
        assert_relative_eq!(wrap_angle(3.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(wrap_angle(-3.0 * std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn segment_and_arc_distances() {
        assert_relative_eq!(
            dist_to_segment(c(0.0, 1.0), c(-1.0, 0.0), c(1.0, 0.0)),
            1.0
        );
        assert_relative_eq!(
            dist_to_segment(c(3.0, 4.0), c(0.0, 0.0), c(1.0, 0.0)),
            (c(3.0, 4.0) - c(1.0, 0.0)).norm()
        );
        // Point radially aligned with the arc.
        assert_relative_eq!(dist_to_arc(c(2.0, 0.0), 1.0, -0.5, 0.5), 1.0);
        // Point outside the angular span: nearest endpoint wins.
        let p = c(0.0, 2.0);
        let end = Complex64::from_polar(1.0, 0.5);
        assert_relative_eq!(dist_to_arc(p, 1.0, -0.5, 0.5), (p - end).norm());
    }

    #[test]
    fn domain_serialization_round_trips_with_outline() {
        let d = builders::build_dr(16.0, 0.3);
        let text = serde_json::to_string(&d).unwrap();
        let back: PlanarDomain = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        assert!(!back.outline().is_empty());
        assert!(back.boundary_contour(1.0).is_ok());
    }
}
