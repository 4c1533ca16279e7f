use std::collections::VecDeque;

use serde::Serialize;

use super::forest::ForestView;
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComponentClass {
    Finite,
    Single,
    Bi,
    Multi,
    /// The count changes when the window loses its outer layer, or the
    /// component touches the border without reaching the core.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: ComponentClass,
    /// Vertex-disjoint paths from the core to the border within the component.
    pub disjoint_paths: usize,
    /// The same count on the window minus its outer layer.
    pub shrunk_paths: usize,
    pub boundary_contacts: usize,
    /// Core vertices whose removal leaves at least three parts reaching the border.
    pub encounter_points: Vec<usize>,
}

fn class_of(k: usize) -> ComponentClass {
    match k {
        0 => ComponentClass::Undetermined,
        1 => ComponentClass::Single,
        2 => ComponentClass::Bi,
        _ => ComponentClass::Multi,
    }
}

/// Unit vertex-capacity max flow from `source` vertices to `sink` vertices
/// through `allowed` ones, by shortest augmenting paths on the split graph.
pub(crate) fn disjoint_paths(
    forest: &ForestView,
    allowed: &dyn Fn(usize) -> bool,
    source: &dyn Fn(usize) -> bool,
    sink: &dyn Fn(usize) -> bool,
) -> usize {
    let n = forest.n();
    // node 2v is v_in, 2v+1 is v_out; S = 2n, T = 2n+1
    let (s, t) = (2 * n, 2 * n + 1);
    let mut head: Vec<usize> = vec![usize::MAX; 2 * n + 2];
    let mut to = Vec::new();
    let mut cap: Vec<i32> = Vec::new();
    let mut next = Vec::new();
    let mut add = |a: usize, b: usize, c: i32, head: &mut Vec<usize>| {
        for (x, y, z) in [(a, b, c), (b, a, 0)] {
            to.push(y);
            cap.push(z);
            next.push(head[x]);
            head[x] = to.len() - 1;
        }
    };
    for v in (0..n).filter(|&v| allowed(v)) {
        add(2 * v, 2 * v + 1, 1, &mut head);
        if source(v) {
            add(s, 2 * v, 1, &mut head);
        }
        if sink(v) {
            add(2 * v + 1, t, 1, &mut head);
        }
        for u in forest.neighbors(v).filter(|&u| allowed(u)) {
            add(2 * v + 1, 2 * u, 1, &mut head);
        }
    }
    let mut flow = 0;
    loop {
        let mut via = vec![usize::MAX; 2 * n + 2];
        let mut q = VecDeque::from([s]);
        let mut reached = false;
        while let Some(x) = q.pop_front() {
            let mut e = head[x];
            while e != usize::MAX {
                let y = to[e];
                if cap[e] > 0 && y != s && via[y] == usize::MAX {
                    via[y] = e;
                    if y == t {
                        reached = true;
                        break;
                    }
                    q.push_back(y);
                }
                e = next[e];
            }
            if reached {
                break;
            }
        }
        if !reached {
            return flow;
        }
        let mut y = t;
        while y != s {
            let e = via[y];
            cap[e] -= 1;
            cap[e ^ 1] += 1;
            y = to[e ^ 1];
        }
        flow += 1;
    }
}

/// Count disjoint core-to-border paths of a forest component and compare
/// with the window shrunk by one layer. Needs `margin >= 2` so the core
/// survives the shrink.
pub fn classify_component(forest: &ForestView, component: usize, margin: usize) -> Result<Classification> {
    if margin < 2 {
        return Err(invalid("margin must be at least 2"));
    }
    let (label, count) = forest.components();
    if component >= count {
        return Err(invalid(format!("component {component} does not exist")));
    }
    let members: Vec<usize> = (0..forest.n()).filter(|&v| label[v] == component).collect();
    let contacts = members.iter().filter(|&&v| forest.is_border(v)).count();
    let encounter_points = encounter_points(forest, &members, margin);
    if contacts == 0 {
        return Ok(Classification {
            class: ComponentClass::Finite,
            disjoint_paths: 0,
            shrunk_paths: 0,
            boundary_contacts: 0,
            encounter_points,
        });
    }
    let within = |layer: usize| {
        disjoint_paths(
            forest,
            &|v| label[v] == component && forest.depth_in(v) >= layer,
            &|v| forest.depth_in(v) >= margin,
            &|v| forest.depth_in(v) == layer,
        )
    };
    let (k, k1) = (within(0), within(1));
    let class = if class_of(k) == class_of(k1) { class_of(k) } else { ComponentClass::Undetermined };
    Ok(Classification { class, disjoint_paths: k, shrunk_paths: k1, boundary_contacts: contacts, encounter_points })
}

fn encounter_points(forest: &ForestView, members: &[usize], margin: usize) -> Vec<usize> {
    let Some(&start) = members.first() else {
        return Vec::new();
    };
    // root the component at `start`, count border vertices per subtree
    let mut order = vec![start];
    let mut up = vec![usize::MAX; forest.n()];
    up[start] = start;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for u in forest.neighbors(v) {
            if up[u] == usize::MAX {
                up[u] = v;
                order.push(u);
            }
        }
        i += 1;
    }
    let mut sub = vec![0usize; forest.n()];
    for &v in order.iter().rev() {
        sub[v] += forest.is_border(v) as usize;
        if v != start {
            sub[up[v]] += sub[v];
        }
    }
    let total = sub[start];
    let mut out: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&v| forest.depth_in(v) >= margin)
        .filter(|&v| {
            let below = forest.neighbors(v).filter(|&u| u != up[v] || v == start).filter(|&u| up[u] == v && sub[u] > 0).count();
            let above = (v != start && total > sub[v]) as usize;
            below + above >= 3
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(w: usize, pts: &[(usize, usize)]) -> Vec<(usize, usize)> {
        pts.windows(2).map(|p| (p[0].0 + p[0].1 * w, p[1].0 + p[1].1 * w)).collect()
    }

    fn segment(w: usize, from: (usize, usize), to: (usize, usize)) -> Vec<(usize, usize)> {
        let mut pts = vec![from];
        let mut cur = from;
        while cur != to {
            cur = (
                if cur.0 < to.0 { cur.0 + 1 } else if cur.0 > to.0 { cur.0 - 1 } else { cur.0 },
                if cur.1 < to.1 { cur.1 + 1 } else if cur.1 > to.1 { cur.1 - 1 } else { cur.1 },
            );
            pts.push(cur);
        }
        line(w, &pts)
    }

    fn class_of_vertex(f: &ForestView, v: usize, margin: usize) -> Classification {
        let (label, _) = f.components();
        classify_component(f, label[v], margin).unwrap()
    }

    #[test]
    fn column_is_bi() {
        let f = ForestView::column(9, 9);
        let c = class_of_vertex(&f, f.vertex(4, 4), 3);
        assert_eq!((c.class, c.disjoint_paths, c.boundary_contacts), (ComponentClass::Bi, 2, 2));
        assert!(c.encounter_points.is_empty());
    }

    #[test]
    fn comb_is_bi() {
        let w = 15;
        let mut e = segment(w, (0, 9), (14, 9));
        for x in (2..13).step_by(2) {
            e.extend(segment(w, (x, 9), (x, 5)));
        }
        let f = ForestView::from_tree_edges(w, w, &e).unwrap();
        let c = class_of_vertex(&f, f.vertex(7, 9), 3);
        assert_eq!(c.class, ComponentClass::Bi);
        assert!(c.encounter_points.is_empty());
        // a tooth hangs off the spine: the spine's stem contains the tooth's root
        let v = f.vertex(4, 6);
        assert!(f.stem(v).contains(&f.vertex(4, 9)));
    }

    #[test]
    fn branching_tree_is_multi() {
        let w = 17;
        let mut e = segment(w, (8, 0), (8, 8));
        e.extend(segment(w, (4, 8), (12, 8)));
        e.extend(segment(w, (4, 8), (4, 16)));
        e.extend(segment(w, (12, 8), (12, 12)));
        e.extend(segment(w, (12, 12), (16, 12)));
        e.extend(segment(w, (12, 12), (12, 16)));
        let f = ForestView::from_tree_edges(w, w, &e).unwrap();
        let c = class_of_vertex(&f, f.vertex(8, 8), 3);
        assert_eq!(c.class, ComponentClass::Multi);
        assert_eq!(c.disjoint_paths, 4);
        assert_eq!(c.encounter_points, vec![f.vertex(8, 8), f.vertex(12, 12)]);
        assert!(c.encounter_points.len() <= c.boundary_contacts);
        assert_eq!(class_of_vertex(&f, f.vertex(1, 1), 3).class, ComponentClass::Finite);
    }

    #[test]
    fn pendant_path_is_single_and_edge_stub_undetermined() {
        let w = 11;
        let mut e = segment(w, (5, 0), (5, 5));
        e.extend(segment(w, (0, 9), (1, 9)));
        let f = ForestView::from_tree_edges(w, w, &e).unwrap();
        assert_eq!(class_of_vertex(&f, f.vertex(5, 5), 3).class, ComponentClass::Single);
        assert_eq!(class_of_vertex(&f, f.vertex(0, 9), 3).class, ComponentClass::Undetermined);
        assert!(classify_component(&f, 0, 1).is_err());
    }

    /// Menger oracle: smallest vertex set meeting every core-to-border path.
    fn min_cut(f: &ForestView, members: &[usize], margin: usize) -> usize {
        let m = members.len();
        let mut best = usize::MAX;
        for mask in 0u32..1 << m {
            let removed = |v: usize| members.iter().position(|&u| u == v).is_some_and(|i| mask >> i & 1 == 1);
            let mut seen = vec![false; f.n()];
            let mut q: VecDeque<usize> =
                members.iter().copied().filter(|&v| f.depth_in(v) >= margin && !removed(v)).collect();
            for &v in &q {
                seen[v] = true;
            }
            let mut hit = false;
            while let Some(v) = q.pop_front() {
                if f.is_border(v) {
                    hit = true;
                    break;
                }
                for u in f.neighbors(v) {
                    if !seen[u] && !removed(u) {
                        seen[u] = true;
                        q.push_back(u);
                    }
                }
            }
            if !hit {
                best = best.min(mask.count_ones() as usize);
            }
        }
        best
    }

    fn random_forest(seed: u64) -> ForestView {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let w = 6;
        let mut uf = petgraph::unionfind::UnionFind::new(w * w);
        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(5..40) {
            let v = rng.gen_range(0..w * w);
            let u = if rng.gen::<bool>() { v + 1 } else { v + w };
            if (u == v + 1 && v % w == w - 1) || u >= w * w {
                continue;
            }
            if uf.union(u, v) {
                edges.push((v, u));
            }
        }
        ForestView::from_tree_edges(w, w, &edges).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn flow_matches_cut_and_bounds_encounters(seed in any::<u64>()) {
            let f = random_forest(seed);
            let (label, count) = f.components();
            for c in 0..count {
                let members: Vec<usize> = (0..f.n()).filter(|&v| label[v] == c).collect();
                if members.len() > 16 {
                    continue;
                }
                let r = classify_component(&f, c, 2).unwrap();
                if r.boundary_contacts > 0 {
                    prop_assert_eq!(r.disjoint_paths, min_cut(&f, &members, 2));
                }
                prop_assert!(r.encounter_points.len() <= r.disjoint_paths.max(r.boundary_contacts));
                prop_assert!(r.encounter_points.len() <= r.disjoint_paths || r.encounter_points.is_empty());
            }
        }
    }
}
