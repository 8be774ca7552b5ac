//! Marching squares on a structured 2-D grid, with optional periodic axes.
//!
//! Output vertices are edge crossings `(a, b, t)`: the contour passes through
//! `node_a + t (node_b − node_a)`, so callers can interpolate any per-node
//! quantity (3-D positions for sliced wavefronts, plane coordinates for scalar
//! fields).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// A contour vertex on the grid edge from node `a` to node `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub a: usize,
    pub b: usize,
    pub t: f64,
}

/// A connected contour; closed contours do not repeat their first vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub vertices: Vec<Crossing>,
    pub closed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Grid2 {
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Grid2 {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (i % self.nu) + self.nu * (j % self.nv)
    }
}

/// Contours of `values` (node `i + nu·j`) at `level`. A node is inside when
/// its value exceeds `level`; NaN counts as outside.
pub fn marching_squares(grid: Grid2, values: &[f64], level: f64) -> Vec<Contour> {
    let Grid2 { nu, nv, periodic_u, periodic_v } = grid;
    if nu < 2 || nv < 2 || values.len() != nu * nv {
        return Vec::new();
    }
    let cu = if periodic_u { nu } else { nu - 1 };
    let cv = if periodic_v { nv } else { nv - 1 };
    let inside = |k: usize| values[k] > level;
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };

    let mut segments: Vec<[(usize, usize); 2]> = Vec::new();
    for j in 0..cv {
        for i in 0..cu {
            let c = [grid.idx(i, j), grid.idx(i + 1, j), grid.idx(i + 1, j + 1), grid.idx(i, j + 1)];
            let case = (0..4).fold(0u8, |acc, n| acc | ((inside(c[n]) as u8) << n));
            let e = [key(c[0], c[1]), key(c[1], c[2]), key(c[2], c[3]), key(c[3], c[0])];
            let center_inside = || {
                let m = c.iter().map(|&k| values[k]).sum::<f64>() / 4.0;
                m > level
            };
            let mut push = |a: usize, b: usize| segments.push([e[a], e[b]]);
            match case {
                0 | 15 => {}
                1 | 14 => push(3, 0),
                2 | 13 => push(0, 1),
                3 | 12 => push(3, 1),
                4 | 11 => push(1, 2),
                6 | 9 => push(0, 2),
                7 | 8 => push(3, 2),
                5 => {
                    if center_inside() {
                        push(0, 1);
                        push(2, 3);
                    } else {
                        push(3, 0);
                        push(1, 2);
                    }
                }
                10 => {
                    if center_inside() {
                        push(3, 0);
                        push(1, 2);
                    } else {
                        push(0, 1);
                        push(2, 3);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for e in seg {
            by_edge.entry(*e).or_default().push(s);
        }
    }
    let crossing = |(a, b): (usize, usize)| {
        let (fa, fb) = (values[a], values[b]);
        let t = (level - fa) / (fb - fa);
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
        Crossing { a, b, t }
    };
    let other_segment = |edge: (usize, usize), from: usize| by_edge[&edge].iter().copied().find(|&s| s != from);

    let mut used = alloc::vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        // Walk forward from the second edge, then backward from the first.
        let mut forward = alloc::vec![segments[start][0], segments[start][1]];
        let mut closed = false;
        let mut cur = start;
        loop {
            let edge = *forward.last().unwrap();
            match other_segment(edge, cur) {
                Some(n) if n == start => {
                    closed = true;
                    break;
                }
                Some(n) if !used[n] => {
                    used[n] = true;
                    let next = if segments[n][0] == edge { segments[n][1] } else { segments[n][0] };
                    forward.push(next);
                    cur = n;
                }
                _ => break,
            }
        }
        if closed {
            forward.pop();
        } else {
            let mut backward = Vec::new();
            let mut cur = start;
            let mut edge = segments[start][0];
            while let Some(n) = other_segment(edge, cur).filter(|&n| !used[n]) {
                used[n] = true;
                edge = if segments[n][0] == edge { segments[n][1] } else { segments[n][0] };
                backward.push(edge);
                cur = n;
            }
            backward.reverse();
            backward.extend(forward);
            forward = backward;
        }
        out.push(Contour { vertices: forward.into_iter().map(crossing).collect(), closed });
    }
    out
}
