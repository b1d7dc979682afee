//! Assembly of boundary loops from open polyline pieces.
//!
//! A constructor that cuts slits into a region produces the boundary as a
//! collection of open pieces (circle arcs, slit walls, boundary segments)
//! whose endpoints meet at shared junction points. Each junction value is
//! computed once and handed verbatim to both incident pieces, so endpoints
//! can be matched by exact bit pattern; no tolerance is involved.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{signed_area, Contour, DomainError};

/// An open polyline whose first and last points are junctions shared with
/// exactly one other piece each.
#[derive(Debug, Clone)]
pub struct Piece {
    pub points: Vec<Complex64>,
}

impl Piece {
    pub fn new(points: Vec<Complex64>) -> Self {
        Piece { points }
    }
}

fn key(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Join pieces end-to-end into closed loops and orient them: the loop of
/// largest absolute area runs counterclockwise (`orientation = +1`), all
/// others clockwise (`-1`). Every junction must be shared by exactly two
/// piece endpoints.
pub fn stitch_pieces(pieces: Vec<Piece>) -> Result<Vec<Contour>, DomainError> {
    for (i, p) in pieces.iter().enumerate() {
        if p.points.len() < 2 {
            return Err(DomainError::StitchFailure(format!(
                "piece {i} has fewer than 2 points"
            )));
        }
    }
    // endpoint key -> list of (piece index, end: 0 = first point, 1 = last)
    let mut incidence: HashMap<(u64, u64), Vec<(usize, u8)>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        incidence
            .entry(key(*p.points.first().unwrap()))
            .or_default()
            .push((i, 0));
        incidence
            .entry(key(*p.points.last().unwrap()))
            .or_default()
            .push((i, 1));
    }
    for (k, inc) in &incidence {
        if inc.len() != 2 {
            return Err(DomainError::StitchFailure(format!(
                "junction ({}, {}) has {} incident piece ends (expected 2)",
                f64::from_bits(k.0),
                f64::from_bits(k.1),
                inc.len()
            )));
        }
    }

    let mut used = vec![false; pieces.len()];
    let mut loops: Vec<Vec<Complex64>> = Vec::new();
    for start in 0..pieces.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut loop_pts: Vec<Complex64> = pieces[start].points.clone();
        let start_key = key(loop_pts[0]);
        loop {
            let tail = *loop_pts.last().unwrap();
            let tail_key = key(tail);
            if tail_key == start_key {
                loop_pts.pop(); // closure point duplicates the start
                break;
            }
            let inc = &incidence[&tail_key];
            let (next_idx, next_end) = match inc.iter().find(|(i, _)| !used[*i]) {
                Some(&(i, e)) => (i, e),
                None => {
                    return Err(DomainError::StitchFailure(
                        "open chain: ran out of unused pieces before closing a loop".into(),
                    ))
                }
            };
            used[next_idx] = true;
            let mut pts = pieces[next_idx].points.clone();
            if next_end == 1 {
                pts.reverse();
            }
            // pts[0] duplicates the current tail junction.
            loop_pts.extend_from_slice(&pts[1..]);
        }
        if loop_pts.len() < 3 {
            return Err(DomainError::StitchFailure(
                "stitched loop has fewer than 3 points".into(),
            ));
        }
        loops.push(loop_pts);
    }

    Ok(orient_loops(loops))
}

/// Orient raw closed loops: largest |area| becomes the counterclockwise
/// outer boundary, the rest become clockwise holes.
pub fn orient_loops(loops: Vec<Vec<Complex64>>) -> Vec<Contour> {
    let mut outer = 0usize;
    let mut best = -1.0;
    for (i, l) in loops.iter().enumerate() {
        let a = signed_area(l).abs();
        if a > best {
            best = a;
            outer = i;
        }
    }
    loops
        .into_iter()
        .enumerate()
        .map(|(i, mut pts)| {
            let want_ccw = i == outer;
            let area = signed_area(&pts);
            if (area > 0.0) != want_ccw {
                pts.reverse();
            }
            Contour {
                points: pts,
                orientation: if want_ccw { 1 } else { -1 },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_pieces_close_into_one_loop() {
        let a = c(1.0, 0.0);
        let b = c(-1.0, 0.0);
        let top = Piece::new(vec![a, c(0.0, 1.0), b]);
        let bottom = Piece::new(vec![b, c(0.0, -1.0), a]);
        let loops = stitch_pieces(vec![top, bottom]).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].points.len(), 4);
        assert_eq!(loops[0].orientation, 1);
        assert!(loops[0].signed_area() > 0.0, "outer loop must be ccw");
    }

    #[test]
    fn reversed_piece_is_reoriented_during_walk() {
        let a = c(1.0, 0.0);
        let b = c(-1.0, 0.0);
        let top = Piece::new(vec![a, c(0.0, 1.0), b]);
        // Given with the same start junction as `top` instead of continuing.
        let bottom = Piece::new(vec![a, c(0.0, -1.0), b]);
        let loops = stitch_pieces(vec![top, bottom]).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].points.len(), 4);
    }

    #[test]
    fn separate_loops_get_hole_orientation() {
        let square = |center: Complex64, r: f64| {
            vec![
                center + c(-r, -r),
                center + c(r, -r),
                center + c(r, r),
                center + c(-r, r),
            ]
        };
        let contours = orient_loops(vec![square(c(0.0, 0.0), 2.0), square(c(0.0, 0.0), 1.0)]);
        assert_eq!(contours[0].orientation, 1);
        assert_eq!(contours[1].orientation, -1);
        assert!(contours[0].signed_area() > 0.0);
        assert!(contours[1].signed_area() < 0.0);
    }

    #[test]
    fn dangling_junction_is_rejected() {
        let a = c(0.0, 0.0);
        let p = Piece::new(vec![a, c(1.0, 0.0)]);
        let err = stitch_pieces(vec![p]).unwrap_err();
        assert!(matches!(err, DomainError::StitchFailure(_)));
    }

    #[test]
    fn triple_junction_is_rejected() {
        let a = c(0.0, 0.0);
        let b = c(1.0, 0.0);
        let d = c(0.0, 1.0);
        let p1 = Piece::new(vec![a, b]);
        let p2 = Piece::new(vec![b, d]);
        let p3 = Piece::new(vec![d, a]);
        let p4 = Piece::new(vec![a, c(5.0, 5.0)]);
        let err = stitch_pieces(vec![p1, p2, p3, p4]).unwrap_err();
        assert!(matches!(err, DomainError::StitchFailure(_)));
    }
}
