use proptest::prelude::*;
use zerotemp::geometry::{
    nth_snail, random_winding_path, ray_intersections, staircase, ForestView, Parent, Q,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn snails_grow_with_n(seed in 0u64..5000, pick in 0usize..10_000) {
        let path = random_winding_path(40, seed);
        let p = pick % path.len();
        for n in 1..6 {
            let (Ok(a), Ok(b)) = (nth_snail(&path, p, n), nth_snail(&path, p, n + 1)) else { break };
            prop_assert!(b.lo <= a.lo && a.hi <= b.hi);
            prop_assert!(a.contains(p));
        }
    }

    #[test]
    fn past_is_transitive_and_flips_with_direction(seed in 0u64..5000, i in 0usize..400, j in 0usize..400, k in 0usize..400) {
        let path = random_winding_path(24, seed);
        let n = path.len();
        let (i, j, k) = (i % n, j % n, k % n);
        if path.is_past(i, j) && path.is_past(j, k) {
            prop_assert!(path.is_past(i, k));
        }
        let rev = path.clone().reversed();
        prop_assert_eq!(path.is_past(i, j), rev.is_past(j, i));
    }

    #[test]
    fn ray_meetings_lie_on_the_ray_in_order(seed in 0u64..5000, pick in 0usize..10_000, a in -3i64..4, b in -3i64..4) {
        prop_assume!((a, b) != (0, 0) && num_gcd(a, b) == 1);
        let path = random_winding_path(24, seed);
        let p = pick % path.len();
        let (px, py) = path.point(p);
        let hits = ray_intersections(&path, p, (a, b)).unwrap();
        for w in hits.windows(2) {
            prop_assert!((w[0].s, w[0].position) <= (w[1].s, w[1].position));
        }
        for h in &hits {
            prop_assert!(h.s >= Q::from_integer(0));
            prop_assert_eq!(h.x, Q::from_integer(px) + h.s * Q::from_integer(a));
            prop_assert_eq!(h.y, Q::from_integer(py) + h.s * Q::from_integer(b));
        }
    }

    #[test]
    fn sampled_forests_reach_the_border(w in 3usize..20, h in 3usize..20, p in 0.0f64..=1.0, seed: u64) {
        let f = ForestView::sample_directed(w, h, p, seed).unwrap();
        for v in 0..f.n() {
            prop_assert!(f.stem_exits(v));
            let stem = f.stem(v);
            prop_assert_eq!(stem[0], v);
            prop_assert!(matches!(f.parent(*stem.last().unwrap()), Parent::Outside));
        }
        prop_assert_eq!(ForestView::from_text(&f.to_text()).unwrap().to_text(), f.to_text());
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { num_gcd(b, a % b) }
}

#[test]
fn staircase_meets_diagonal_rays_at_lattice_points_only() {
    let s = staircase((0, 0), 20);
    for h in ray_intersections(&s, 0, (1, 1)).unwrap() {
        assert!(h.x.is_integer() && h.y.is_integer());
    }
}
