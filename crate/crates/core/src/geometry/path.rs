use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{invalid, Result};

pub type Point = (i64, i64);
pub type Q = Ratio<i64>;

/// A simple nearest-neighbour path in Z^2 with a direction `t(i) = i` along
/// the stored order (or `-i` when reversed).
#[derive(Clone, Debug)]
pub struct LatticePath {
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    reversed: bool,
    bounds: Option<[i64; 4]>,
}

impl LatticePath {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("empty path"));
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, &p) in points.iter().enumerate() {
            if index.insert(p, i).is_some() {
                return Err(invalid(format!("path revisits {p:?}")));
            }
            if i > 0 {
                let q = points[i - 1];
                if (p.0 - q.0).abs() + (p.1 - q.1).abs() != 1 {
                    return Err(invalid(format!("{q:?} and {p:?} are not lattice neighbours")));
                }
            }
        }
        Ok(LatticePath { points, index, reversed: false, bounds: None })
    }

    /// Declare the window `[x0, x1] × [y0, y1]` the path was cut from; paths
    /// with an end on its border may continue outside.
    pub fn within(mut self, x0: i64, x1: i64, y0: i64, y1: i64) -> Result<Self> {
        if self.points.iter().any(|&(x, y)| x < x0 || x > x1 || y < y0 || y > y1) {
            return Err(invalid("path leaves the declared window"));
        }
        self.bounds = Some([x0, x1, y0, y1]);
        Ok(self)
    }

    pub fn reversed(mut self) -> Self {
        self.reversed = !self.reversed;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn bounds(&self) -> Option<[i64; 4]> {
        self.bounds
    }

    /// Direction map value of the `i`-th stored point.
    pub fn time(&self, i: usize) -> i64 {
        if self.reversed {
            -(i as i64)
        } else {
            i as i64
        }
    }

    /// Is `u` in the past of `v`?
    pub fn is_past(&self, u: usize, v: usize) -> bool {
        self.time(u) < self.time(v)
    }

    /// One end lies on the border of the declared window.
    pub fn may_continue(&self) -> bool {
        let Some([x0, x1, y0, y1]) = self.bounds else {
            return false;
        };
        let on = |(x, y): Point| x == x0 || x == x1 || y == y0 || y == y1;
        on(self.points[0]) || on(*self.points.last().unwrap())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    Base,
    Past,
    Future,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayCrossing {
    pub x: Q,
    pub y: Q,
    /// Ray parameter: the crossing is `p + s·(a, b)`.
    pub s: Q,
    /// Position along the path, `i + u` on the segment from point `i` to `i + 1`.
    pub position: Q,
    pub tag: Tag,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// Crossings of the ray `{p + s·(a, b) : s ≥ 0}` with the path's polygonal
/// curve, in exact arithmetic, ordered by `s` then by path position.
/// Segments lying along the ray contribute their endpoints.
pub fn ray_intersections(path: &LatticePath, p: usize, (a, b): (i64, i64)) -> Result<Vec<RayCrossing>> {
    if (a, b) == (0, 0) || gcd(a, b) != 1 {
        return Err(invalid("ray direction must be a primitive nonzero vector"));
    }
    let base = path.point(p);
    let d = (a, b);
    let mut out: Vec<RayCrossing> = Vec::new();
    let tag_of = |pos: Q| {
        let here = Q::from_integer(p as i64);
        if pos == here {
            Tag::Base
        } else if (pos < here) != path.reversed {
            Tag::Past
        } else {
            Tag::Future
        }
    };
    let mut push = |pos: Q, x: Q, y: Q, s: Q| {
        out.push(RayCrossing { x, y, s, position: pos, tag: tag_of(pos) });
    };
    let on_ray = |q: Point| -> Option<Q> {
        let w = (q.0 - base.0, q.1 - base.1);
        if cross(w, d) != 0 {
            return None;
        }
        let s = if a != 0 { Q::new(w.0, a) } else { Q::new(w.1, b) };
        (s >= Q::from_integer(0)).then_some(s)
    };
    for (i, &q) in path.points().iter().enumerate() {
        if let Some(s) = on_ray(q) {
            push(Q::from_integer(i as i64), Q::from_integer(q.0), Q::from_integer(q.1), s);
        }
    }
    for i in 0..path.len().saturating_sub(1) {
        let (pa, pb) = (path.point(i), path.point(i + 1));
        let seg = (pb.0 - pa.0, pb.1 - pa.1);
        let denom = cross(seg, d);
        if denom == 0 {
            continue;
        }
        let w = (base.0 - pa.0, base.1 - pa.1);
        let u = Q::new(cross(w, d), denom);
        let s = Q::new(cross(w, seg), denom);
        if u > Q::from_integer(0) && u < Q::from_integer(1) && s >= Q::from_integer(0) {
            let x = Q::from_integer(pa.0) + u * seg.0;
            let y = Q::from_integer(pa.1) + u * seg.1;
            push(Q::from_integer(i as i64) + u, x, y, s);
        }
    }
    out.sort_by(|l, r| l.s.cmp(&r.s).then(l.position.cmp(&r.position)));
    Ok(out)
}

/// Two interleaved square spirals around the origin joined there: the future
/// arm turns right, up, left, down with arm lengths 1, 1, 3, 3, 5, 5, ...
/// and the past arm is its point reflection. Returns the path and the index
/// of the origin.
pub fn double_spiral(windings: usize) -> (LatticePath, usize) {
    let steps = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut arm = vec![(0i64, 0i64)];
    for j in 1..=4 * windings {
        let len = 2 * j.div_ceil(2) - 1;
        let (dx, dy) = steps[(j - 1) % 4];
        for _ in 0..len {
            let &(x, y) = arm.last().unwrap();
            arm.push((x + dx, y + dy));
        }
    }
    let mut points: Vec<Point> = arm.iter().skip(1).rev().map(|&(x, y)| (-x, -y)).collect();
    let origin = points.len();
    points.extend(arm);
    (LatticePath::new(points).expect("spiral arms interleave"), origin)
}

/// Upward staircase from `start`: right, up, right, up, ...
pub fn staircase(start: Point, steps: usize) -> LatticePath {
    let mut pts = vec![start];
    for k in 0..steps {
        let &(x, y) = pts.last().unwrap();
        pts.push(if k % 2 == 0 { (x + 1, y) } else { (x, y + 1) });
    }
    LatticePath::new(pts).expect("staircase is simple")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(LatticePath::new(vec![(0, 0), (1, 1)]).is_err());
        assert!(LatticePath::new(vec![(0, 0), (1, 0), (0, 0)]).is_err());
        assert!(LatticePath::new(vec![(0, 0), (1, 0)]).unwrap().within(0, 0, 0, 0).is_err());
        let p = LatticePath::new(vec![(0, 0), (1, 0), (2, 0)]).unwrap().within(0, 5, -2, 2).unwrap();
        assert!(p.may_continue());
        let q = LatticePath::new(vec![(1, 0), (2, 0)]).unwrap().within(0, 5, -2, 2).unwrap();
        assert!(!q.may_continue());
    }

    #[test]
    fn spiral_start() {
        let (s, o) = double_spiral(1);
        assert_eq!(s.point(o), (0, 0));
        let fut: Vec<Point> = s.points()[o..o + 9].to_vec();
        assert_eq!(fut, vec![(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1), (-2, 1), (-2, 0), (-2, -1), (-2, -2)]);
        assert_eq!(s.point(o - 1), (-1, 0));
        assert_eq!(s.len(), 2 * (1 + 1 + 3 + 3) + 1);
    }

    #[test]
    fn horizontal_path_vertical_ray() {
        let p = LatticePath::new((0..7).map(|x| (x, 0)).collect()).unwrap();
        let up = ray_intersections(&p, 3, (0, 1)).unwrap();
        assert_eq!(up.len(), 1);
        assert_eq!(up[0].tag, Tag::Base);
        let right = ray_intersections(&p, 3, (1, 0)).unwrap();
        assert_eq!(right.len(), 4);
        assert!(right[1..].iter().all(|c| c.tag == Tag::Future));
        let left = ray_intersections(&p.clone().reversed(), 3, (-1, 0)).unwrap();
        assert!(left[1..].iter().all(|c| c.tag == Tag::Future));
        assert!(ray_intersections(&p, 3, (2, 2)).is_err());
    }

    #[test]
    fn upward_ray_alternates_on_spiral() {
        for w in 1..6 {
            let (s, o) = double_spiral(w);
            let hits = ray_intersections(&s, o, (0, 1)).unwrap();
            // the future arm reaches y = 1, 3, ..., 2w-1 and the past arm y = 2, 4, ..., 2w-2
            assert_eq!(hits.len(), 2 * w);
            for (k, h) in hits.iter().enumerate().skip(1) {
                assert_eq!((h.x, h.y), (Q::from_integer(0), Q::from_integer(k as i64)));
                assert_eq!(h.tag, if k % 2 == 1 { Tag::Future } else { Tag::Past });
            }
        }
    }

    /// Brute-force float oracle: walk each unit segment in steps of 1/60
    /// (a multiple of every denominator used below) and keep points on the ray.
    fn float_oracle(path: &LatticePath, p: usize, d: (f64, f64)) -> Vec<(f64, f64)> {
        let base = path.point(p);
        let mut hits: Vec<(f64, f64)> = Vec::new();
        for w in path.points().windows(2) {
            for k in 0..=60 {
                let u = k as f64 / 60.0;
                let x = w[0].0 as f64 + u * (w[1].0 - w[0].0) as f64;
                let y = w[0].1 as f64 + u * (w[1].1 - w[0].1) as f64;
                let (rx, ry) = (x - base.0 as f64, y - base.1 as f64);
                if (rx * d.1 - ry * d.0).abs() < 1e-9 && rx * d.0 + ry * d.1 >= -1e-9 {
                    let key = ((x * 60.0).round() / 60.0, (y * 60.0).round() / 60.0);
                    if !hits.contains(&key) {
                        hits.push(key);
                    }
                }
            }
        }
        hits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        hits
    }

    #[test]
    fn slope_rays_on_staircases() {
        // a staircase from (3, 0) towards the upper right and the path back
        // along the bottom so the ray from the origin crosses the stairs
        let mut pts: Vec<Point> = (0..=3).map(|x| (x, 0)).collect();
        let stairs = staircase((3, 0), 12);
        pts.extend_from_slice(&stairs.points()[1..]);
        let path = LatticePath::new(pts).unwrap();
        for d in [(1i64, 1i64), (1, 2), (2, 1), (3, 1)] {
            let hits = ray_intersections(&path, 0, d).unwrap();
            let f = |q: Q| ((*q.numer() as f64 / *q.denom() as f64) * 60.0).round() / 60.0;
            let mut got: Vec<(f64, f64)> = hits.iter().map(|h| (f(h.x), f(h.y))).collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(got, float_oracle(&path, 0, (d.0 as f64, d.1 as f64)), "{d:?}");
        }
        // a diagonal ray from a lattice point only meets unit edges at lattice
        // points; direction (2, 1) meets vertical edges at half-integers
        let diag = ray_intersections(&path, 0, (1, 1)).unwrap();
        assert!(diag.iter().all(|h| h.x.is_integer() && h.y.is_integer()));
        let steep: Vec<RayCrossing> = ray_intersections(&path, 0, (2, 1)).unwrap();
        assert!(steep.iter().any(|h| *h.x.denom() == 2 || *h.y.denom() == 2));
    }
}
