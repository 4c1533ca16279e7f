use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::path::{ray_intersections, LatticePath, Point, Q};
use crate::rng::{keyed_rng, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::XPlus, Axis::XMinus, Axis::YPlus, Axis::YMinus];

    pub fn direction(self) -> (i64, i64) {
        match self {
            Axis::XPlus => (1, 0),
            Axis::XMinus => (-1, 0),
            Axis::YPlus => (0, 1),
            Axis::YMinus => (0, -1),
        }
    }
}

/// The path meets an axis ray from the base point fewer than `needed` times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unavailable {
    pub axis: Axis,
    pub found: usize,
    pub needed: usize,
    /// The path may continue beyond its window, so more meetings could exist.
    pub truncated: bool,
}

/// Path indices of the `n`-th closest meetings of the four open axis rays
/// from `path[p]`, in the order x+, x-, y+, y-.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cross {
    pub base: usize,
    pub n: usize,
    pub arms: [usize; 4],
    /// All meetings up to the `n`-th on every ray.
    pub required: Vec<usize>,
}

impl Cross {
    pub fn points(&self, path: &LatticePath) -> [Point; 4] {
        self.arms.map(|i| path.point(i))
    }

    /// Horizontal segment `(y, x_lo, x_hi)` and vertical segment `(x, y_lo, y_hi)`.
    pub fn segments(&self, path: &LatticePath) -> ((i64, i64, i64), (i64, i64, i64)) {
        let [xp, xm, yp, ym] = self.points(path);
        ((xp.1, xm.0, xp.0), (yp.0, ym.1, yp.1))
    }
}

fn axis_meetings(path: &LatticePath, p: usize, axis: Axis) -> Vec<usize> {
    ray_intersections(path, p, axis.direction())
        .expect("axis directions are primitive")
        .into_iter()
        .filter(|c| c.s > Q::from_integer(0))
        .map(|c| {
            debug_assert!(c.position.is_integer());
            c.position.to_integer() as usize
        })
        .collect()
}

pub fn nth_cross(path: &LatticePath, p: usize, n: usize) -> Result<Cross, Unavailable> {
    assert!(n >= 1, "crosses are indexed from 1");
    let mut arms = [0; 4];
    let mut required = Vec::with_capacity(4 * n);
    for (k, axis) in Axis::ALL.into_iter().enumerate() {
        let hits = axis_meetings(path, p, axis);
        if hits.len() < n {
            return Err(Unavailable { axis, found: hits.len(), needed: n, truncated: path.may_continue() });
        }
        arms[k] = hits[n - 1];
        required.extend_from_slice(&hits[..n]);
    }
    Ok(Cross { base: p, n, arms, required })
}

/// Smallest index interval of the path holding the base point and every
/// required cross point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Snail {
    pub base: usize,
    pub n: usize,
    pub lo: usize,
    pub hi: usize,
}

impl Snail {
    pub fn length(&self) -> usize {
        self.hi - self.lo
    }

    pub fn contains(&self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }
}

pub fn snail_of(cross: &Cross) -> Snail {
    let lo = cross.required.iter().copied().chain([cross.base]).min().unwrap();
    let hi = cross.required.iter().copied().chain([cross.base]).max().unwrap();
    Snail { base: cross.base, n: cross.n, lo, hi }
}

pub fn nth_snail(path: &LatticePath, p: usize, n: usize) -> Result<Snail, Unavailable> {
    nth_cross(path, p, n).map(|c| snail_of(&c))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LemmaPrecondition {
    Unavailable(Unavailable),
    /// Neither pair of perpendicular segments meets.
    CrossesDisjoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCertificate {
    /// Where the two crosses meet.
    pub meeting: Point,
    /// A path point on both snails, if any.
    pub shared: Option<Point>,
    pub distance: usize,
    pub bound: usize,
    pub holds: bool,
}

fn perpendicular_meeting(h: (i64, i64, i64), v: (i64, i64, i64)) -> Option<Point> {
    let (y, x0, x1) = h;
    let (x, y0, y1) = v;
    (x0 <= x && x <= x1 && y0 <= y && y <= y1).then_some((x, y))
}

/// If the `n`-th cross of `path[p]` and the `m`-th cross of `path[q]` meet
/// perpendicularly, check that the snails share a path point and that the
/// path distance between `p` and `q` is at most the sum of the snail lengths.
pub fn check_cross_lemma(path: &LatticePath, p: usize, q: usize, n: usize, m: usize) -> Result<LemmaCertificate, LemmaPrecondition> {
    let cp = nth_cross(path, p, n).map_err(LemmaPrecondition::Unavailable)?;
    let cq = nth_cross(path, q, m).map_err(LemmaPrecondition::Unavailable)?;
    let (hp, vp) = cp.segments(path);
    let (hq, vq) = cq.segments(path);
    let meeting = perpendicular_meeting(hp, vq).or_else(|| perpendicular_meeting(hq, vp)).ok_or(LemmaPrecondition::CrossesDisjoint)?;
    let (sp, sq) = (snail_of(&cp), snail_of(&cq));
    let lo = sp.lo.max(sq.lo);
    let shared = (lo <= sp.hi.min(sq.hi)).then(|| path.point(lo));
    let distance = p.abs_diff(q);
    let bound = sp.length() + sq.length();
    Ok(LemmaCertificate { meeting, shared, distance, bound, holds: shared.is_some() && distance <= bound })
}

/// Random Hamiltonian path of the `k × k` grid by backbite moves started
/// from the boustrophedon path.
pub fn backbite_path(k: usize, moves: usize, rng: &mut impl Rng) -> Vec<Point> {
    let k = k as i64;
    let mut path: Vec<Point> = Vec::with_capacity((k * k) as usize);
    for y in 0..k {
        for i in 0..k {
            path.push((if y % 2 == 0 { i } else { k - 1 - i }, y));
        }
    }
    let idx = |p: Point| (p.1 * k + p.0) as usize;
    let mut pos = vec![0usize; (k * k) as usize];
    for (i, &p) in path.iter().enumerate() {
        pos[idx(p)] = i;
    }
    let last = path.len() - 1;
    for _ in 0..moves {
        let at_end = rng.gen::<bool>();
        let e = if at_end { path[last] } else { path[0] };
        let (dx, dy) = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.gen_range(0..4)];
        let u = (e.0 + dx, e.1 + dy);
        if u.0 < 0 || u.1 < 0 || u.0 >= k || u.1 >= k {
            continue;
        }
        let i = pos[idx(u)];
        if at_end {
            if i + 1 == last {
                continue;
            }
            path[i + 1..].reverse();
            for (j, &p) in path.iter().enumerate().skip(i + 1) {
                pos[idx(p)] = j;
            }
        } else {
            if i == 1 {
                continue;
            }
            path[..i].reverse();
            for (j, &p) in path.iter().enumerate().take(i) {
                pos[idx(p)] = j;
            }
        }
    }
    path
}

/// A self-avoiding walk inside `[0, size)^2`: a random Hamiltonian path of
/// a coarse grid, dilated by `scale` and offset.
pub fn random_winding_path(size: i64, seed: u64) -> LatticePath {
    let mut rng = keyed_rng(seed, Stream::Sampler, 0);
    let scale = rng.gen_range(1..=3i64);
    let max_k = ((size - 1) / scale + 1).min(24);
    let k = rng.gen_range(4..=max_k);
    let coarse = backbite_path(k as usize, 10 * (k * k) as usize, &mut rng);
    let span = (k - 1) * scale;
    let (ox, oy) = (rng.gen_range(0..=size - 1 - span), rng.gen_range(0..=size - 1 - span));
    let mut pts: Vec<Point> = Vec::with_capacity(coarse.len() * scale as usize);
    for (i, &(x, y)) in coarse.iter().enumerate() {
        let here = (ox + x * scale, oy + y * scale);
        if i > 0 {
            let prev = pts[pts.len() - 1];
            let step: Point = ((here.0 - prev.0).signum(), (here.1 - prev.1).signum());
            for t in 1..scale {
                pts.push((prev.0 + t * step.0, prev.1 + t * step.1));
            }
        }
        pts.push(here);
    }
    LatticePath::new(pts).expect("dilated Hamiltonian path is simple").within(0, size - 1, 0, size - 1).expect("fits")
}

/// A random path together with `(p, q, n, m)` whose crosses meet
/// perpendicularly; `None` when no such tuple turned up in `attempts` draws.
#[derive(Clone, Debug)]
pub struct LemmaInstance {
    pub path: LatticePath,
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub m: usize,
}

pub fn sample_lemma_instance(size: i64, seed: u64, attempts: usize) -> Option<LemmaInstance> {
    let path = random_winding_path(size, seed);
    let mut rng = keyed_rng(seed, Stream::Sampler, 1);
    let ids: Vec<usize> = (0..path.len()).collect();
    for _ in 0..attempts {
        let (&p, &q) = (ids.choose(&mut rng)?, ids.choose(&mut rng)?);
        let (n, m) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        if check_cross_lemma(&path, p, q, n, m).is_ok() {
            return Some(LemmaInstance { path, p, q, n, m });
        }
    }
    None
}
