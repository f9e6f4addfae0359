//! Marching squares on a scalar grid with masked (NaN) nodes.
//!
//! Output polylines are in fractional grid coordinates `(i, j)`; callers map
//! them into the plane.

use std::collections::HashMap;

/// Edge of the grid: horizontal edges join `(i, j)`-`(i + 1, j)`, vertical
/// ones `(i, j)`-`(i, j + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Zero contours of `values` (row-major, `values[j * nx + i]`).
///
/// Cells touching a NaN node are skipped. Saddle cells are resolved with
/// `center(i, j)`, the field value at the centre of cell `(i, j)`.
pub fn zero_contours(
    values: &[f64],
    nx: usize,
    ny: usize,
    center: impl Fn(usize, usize) -> f64,
) -> Vec<Vec<(f64, f64)>> {
    assert_eq!(values.len(), nx * ny);
    let at = |i: usize, j: usize| values[j * nx + i];

    let mut points: HashMap<Edge, (f64, f64)> = HashMap::new();
    let mut crossing = |e: Edge| -> Edge {
        points.entry(e).or_insert_with(|| {
            let ((ia, ja), (ib, jb)) = match e {
                Edge::H(i, j) => ((i, j), (i + 1, j)),
                Edge::V(i, j) => ((i, j), (i, j + 1)),
            };
            let (va, vb) = (at(ia, ja), at(ib, jb));
            let t = va / (va - vb);
            (
                ia as f64 + t * (ib as f64 - ia as f64),
                ja as f64 + t * (jb as f64 - ja as f64),
            )
        });
        e
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let v00 = at(i, j);
            let v10 = at(i + 1, j);
            let v11 = at(i + 1, j + 1);
            let v01 = at(i, j + 1);
            if [v00, v10, v11, v01].iter().any(|v| v.is_nan()) {
                continue;
            }
            let (p00, p10, p11, p01) = (v00 > 0.0, v10 > 0.0, v11 > 0.0, v01 > 0.0);
            let bottom = Edge::H(i, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            let right = Edge::V(i + 1, j);
            let mut cut = Vec::with_capacity(4);
            if p00 != p10 {
                cut.push(bottom);
            }
            if p10 != p11 {
                cut.push(right);
            }
            if p01 != p11 {
                cut.push(top);
            }
            if p00 != p01 {
                cut.push(left);
            }
            match cut.len() {
                2 => segments.push((crossing(cut[0]), crossing(cut[1]))),
                4 => {
                    let c = center(i, j);
                    let c = if c.is_nan() {
                        (v00 + v10 + v11 + v01) / 4.0
                    } else {
                        c
                    };
                    if (c > 0.0) == p00 {
                        // The 00-11 diagonal is connected: cut off 10 and 01.
                        segments.push((crossing(bottom), crossing(right)));
                        segments.push((crossing(top), crossing(left)));
                    } else {
                        segments.push((crossing(bottom), crossing(left)));
                        segments.push((crossing(top), crossing(right)));
                    }
                }
                _ => {}
            }
        }
    }

    let mut incident: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(k);
        incident.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start: usize, from: Edge, used: &mut Vec<bool>| -> Vec<(f64, f64)> {
        let mut chain = vec![points[&from]];
        let mut seg = start;
        let mut at_edge = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at_edge { b } else { a };
            chain.push(points[&next]);
            at_edge = next;
            match incident[&next].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chain
    };

    // Open chains first (start at an edge with a single incident segment),
    // then the remaining closed loops.
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (a, b) = segments[k];
        let start = if incident[&a].len() == 1 {
            Some(a)
        } else if incident[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(e) = start {
            out.push(walk(k, e, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let from = segments[k].0;
            out.push(walk(k, from, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                v.push(f(i as f64, j as f64));
            }
        }
        v
    }

    #[test]
    fn circle_is_one_closed_loop() {
        let f = |x: f64, y: f64| (x - 10.0).powi(2) + (y - 10.0).powi(2) - 36.0;
        let v = grid(21, 21, f);
        let lines = zero_contours(&v, 21, 21, |i, j| f(i as f64 + 0.5, j as f64 + 0.5));
        assert_eq!(lines.len(), 1);
        let l = &lines[0];
        assert_eq!(l.first(), l.last());
        for (x, y) in l {
            let r = ((x - 10.0).powi(2) + (y - 10.0).powi(2)).sqrt();
            assert!((r - 6.0).abs() < 0.1, "{r}");
        }
    }

    #[test]
    fn vertical_line_is_open() {
        let v = grid(10, 6, |x, _| x - 4.3);
        let lines = zero_contours(&v, 10, 6, |i, _| i as f64 + 0.5 - 4.3);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 6);
        for (x, _) in &lines[0] {
            assert!((x - 4.3).abs() < 1e-12);
        }
    }

    #[test]
    fn masked_and_constant_fields() {
        assert!(zero_contours(&grid(5, 5, |_, _| 1.0), 5, 5, |_, _| 1.0).is_empty());
        let v = vec![f64::NAN; 25];
        assert!(zero_contours(&v, 5, 5, |_, _| f64::NAN).is_empty());
    }

    #[test]
    fn saddle_uses_center_value() {
        // + - / - + corners
        let v = vec![1.0, -1.0, -1.0, 1.0];
        let joined = zero_contours(&v, 2, 2, |_, _| 1.0);
        let split = zero_contours(&v, 2, 2, |_, _| -1.0);
        assert_eq!(joined.len(), 2);
        assert_eq!(split.len(), 2);
        // Centre positive: segments cut off the negative corners (1,0), (0,1).
        let near_10 = joined
            .iter()
            .any(|l| l.contains(&(0.5, 0.0)) && l.contains(&(1.0, 0.5)));
        assert!(near_10);
        let near_00 = split
            .iter()
            .any(|l| l.contains(&(0.5, 0.0)) && l.contains(&(0.0, 0.5)));
        assert!(near_00);
    }
}
