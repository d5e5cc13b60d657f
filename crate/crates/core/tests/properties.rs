use proptest::prelude::*;

use uframe::extremal::{canonical_min_frame, necessary_condition, Partition};
use uframe::frames::{
    complete_to_orthogonal, lift, project_frame, random_uframe, verify_uframe, whiten, Frame, Projection,
};
use uframe::geometry::{self, gauge_l1, lambda_profile, star_belt_rest};
use uframe::linalg::{dot, norm, norm_sq, Mat};
use uframe::optimize::{local_search, Direction, Objective, ObjectiveKind, SearchParams};
use uframe::sections::{bounds_report, cube_section, polar_check};
use uframe::{rng, UFrame64};

fn planar() -> impl Strategy<Value = UFrame64> {
    (2usize..=8, any::<u64>()).prop_map(|(n, seed)| random_uframe(n, 2, seed).unwrap())
}

fn spatial() -> impl Strategy<Value = UFrame64> {
    (3usize..=7, any::<u64>()).prop_map(|(n, seed)| random_uframe(n, 3, seed).unwrap())
}

fn either() -> impl Strategy<Value = UFrame64> {
    prop_oneof![planar(), spatial()]
}

/// A generic spanning frame: Gaussian vectors.
fn raw_frame() -> impl Strategy<Value = Frame<f64>> {
    (2usize..=4, 0usize..4, any::<u64>()).prop_map(|(k, extra, seed)| {
        let mut r = rng::seeded(seed);
        let vs = (0..k + extra).map(|_| rng::gaussian_vec(&mut r, k)).collect();
        Frame::new(k, vs).unwrap()
    })
}

fn matrix(k: usize, seed: u64) -> Mat<f64> {
    let mut r = rng::seeded(seed);
    let rows: Vec<Vec<f64>> = (0..k).map(|_| rng::gaussian_vec(&mut r, k)).collect();
    Mat::from_rows(&rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uframe_trace_and_norms(s in either()) {
        let total: f64 = s.vectors().iter().map(|v| norm_sq(v)).sum();
        prop_assert!((total - s.k() as f64).abs() <= s.k() as f64 * 1e-9);
        prop_assert!(s.vectors().iter().all(|v| norm(v) <= 1.0 + 1e-9));
    }

    #[test]
    fn whitening_is_idempotent(f in raw_frame()) {
        let u = whiten(&f).unwrap();
        prop_assert!(verify_uframe(&u, 1e-9).pass);
        let again = whiten(&u).unwrap();
        for (a, b) in u.vectors().iter().zip(again.vectors()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn certificate_conditions_agree(f in raw_frame()) {
        prop_assert!(verify_uframe(&f, 1e-9).consistent());
        prop_assert!(verify_uframe(&whiten(&f).unwrap(), 1e-9).consistent());
    }

    #[test]
    fn orthogonal_completion(s in either()) {
        let q = complete_to_orthogonal(&s).unwrap();
        let n = s.n();
        prop_assert!(q.matmul(&q.transpose()).sub(&Mat::identity(n)).max_abs() < 1e-10);
        for i in 0..n {
            for a in 0..s.k() {
                prop_assert!((q.row(a)[i] - s.vector(i)[a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_and_lift_close(s in either(), seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let d: Vec<f64> = rng::gaussian_vec(&mut r, s.k());
        let len = norm(&d);
        let d: Vec<f64> = d.iter().map(|x| x / len).collect();
        match project_frame(&s, &d).unwrap() {
            Projection::Frame(p) => prop_assert!(verify_uframe(&p, 1e-9).pass),
            Projection::Line(c) => prop_assert!((c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10),
        }
        let l = lift(&s);
        prop_assert!(verify_uframe(&l, 1e-9).pass);
        prop_assert_eq!(l.n(), s.n() + 1);
    }

    #[test]
    fn lift_is_a_bipyramid(s in planar()) {
        let base = geometry::volume(&s).unwrap();
        let up = geometry::volume(&lift(&s)).unwrap();
        prop_assert!((up - 2.0 / 3.0 * base).abs() < 1e-10);
    }

    #[test]
    fn hull_is_centrally_symmetric(s in either()) {
        let p = geometry::hull(&s).unwrap();
        prop_assert!(p.volume > 0.0);
        for v in &p.vertices {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            prop_assert!(p.vertex_index(&neg).is_some());
        }
        for f in &p.facets {
            prop_assert!(f.offset > 0.0);
            let neg: Vec<f64> = f.normal.iter().map(|x| -x).collect();
            let mirrored = p.facets.iter().any(|g| {
                g.normal.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-9) && (g.offset - f.offset).abs() < 1e-9
            });
            prop_assert!(mirrored);
        }
    }

    #[test]
    fn euler_relation(s in spatial()) {
        let p = geometry::hull(&s).unwrap();
        let (v, e, f) = (p.vertices.len() as i64, p.edge_count() as i64, p.facets.len() as i64);
        prop_assert_eq!(v - e + f, 2);
    }

    #[test]
    fn hull_is_rotation_invariant(s in either(), seed in any::<u64>()) {
        let m = matrix(s.k(), seed);
        let q = uframe::linalg::orthonormalize_rows(&m).unwrap();
        let r = s.transform(&q).unwrap();
        let a = geometry::volume(&s).unwrap();
        let b = geometry::volume(&r).unwrap();
        prop_assert!((a - b).abs() < 1e-10 * a.max(1.0));
    }

    #[test]
    fn star_and_belt_partition_the_volume(s in either()) {
        let p = geometry::hull(&s).unwrap();
        for (i, v) in s.vectors().iter().enumerate() {
            if p.vertex_of(i).is_none() {
                continue;
            }
            let d = star_belt_rest(&p, v, &s).unwrap();
            prop_assert!((d.vol_star + d.vol_belt - p.volume).abs() < 1e-10);
            prop_assert!(d.vol_star > 0.0);
            prop_assert!(d.vol_rest <= p.volume + 1e-12);
            prop_assert!((0.0..=1.0).contains(&d.t_boundary));
        }
    }

    #[test]
    fn lambda_profile_is_convex(s in either()) {
        let p = geometry::hull(&s).unwrap();
        let i = (0..s.n()).find(|&i| p.vertex_of(i).is_some()).unwrap();
        let prof = lambda_profile(&p, s.vector(i), &s, 3.0).unwrap();
        prop_assert!(prof.is_convex(1e-10));
        prop_assert!((prof.value(1.0) - p.volume).abs() < 1e-10);
    }

    #[test]
    fn generators_have_gauge_at_most_one(s in either()) {
        for v in s.vectors() {
            prop_assert!(gauge_l1(&s, v).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn belt_sum_reaches_k(s in either()) {
        let r = necessary_condition(&s).unwrap();
        prop_assert!(r.belt_sum >= s.k() as f64 - 1e-9);
        prop_assert!(r.max_residual.is_finite());
    }

    #[test]
    fn section_facets_lie_on_constraints(s in either()) {
        let q = cube_section(&s).unwrap();
        prop_assert!(!q.active.is_empty());
        for f in &q.facets {
            prop_assert!(f.offset > 0.0);
            prop_assert!(!f.constraints.is_empty());
            for g in &f.constraints {
                let v = s.vector(g.index);
                for &iv in &f.vertices {
                    let h = g.sign as f64 * dot(&q.vertices[iv], v);
                    prop_assert!((h - 1.0).abs() < 1e-9);
                }
            }
        }
        for w in &q.vertices {
            let neg: Vec<f64> = w.iter().map(|x| -x).collect();
            let mirrored = q.vertices.iter().any(|u| u.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-9));
            prop_assert!(mirrored);
        }
        prop_assert!(polar_check(&s).unwrap().pass);
    }

    #[test]
    fn section_bounds_hold(s in either()) {
        let b = bounds_report(&s).unwrap();
        prop_assert!(b.pass, "{b:?}");
        if s.k() == 2 {
            prop_assert!(b.mahler_product >= 8.0 - 1e-9);
        }
    }

    #[test]
    fn objectives_are_homogeneous(s in either(), seed in any::<u64>()) {
        let m = matrix(s.k(), seed);
        let det = m.det().abs();
        prop_assume!(det > 1e-3);
        let t = s.transform(&m).unwrap();
        for kind in [ObjectiveKind::ProjectionVolume, ObjectiveKind::SectionVolume] {
            let obj = Objective::new(kind, Direction::Max);
            let a = obj.value(&s).unwrap();
            let b = obj.value(&t).unwrap();
            let expected = a * det.powi(obj.homogeneity());
            prop_assert!((b - expected).abs() < 1e-8 * expected.max(1.0), "{kind:?}: {b} vs {expected}");
        }
    }

    #[test]
    fn search_trajectory_is_monotone(n in 3usize..=5, seed in any::<u64>(), max in any::<bool>()) {
        let s = random_uframe::<f64>(n, 2, seed).unwrap();
        let dir = if max { Direction::Max } else { Direction::Min };
        let obj = Objective::new(ObjectiveKind::ProjectionVolume, dir);
        let params = SearchParams { max_iters: 400, seed, ..SearchParams::default() };
        let r = local_search(&s, &obj, &params).unwrap();
        for w in r.trajectory.windows(2) {
            prop_assert!(w[0].value == w[1].value || obj.improves(w[1].value, w[0].value));
        }
        prop_assert!(verify_uframe(&r.final_frame, 1e-9).pass);
    }

    #[test]
    fn near_equal_partitions(n in 2usize..=60, k in 2usize..=8) {
        prop_assume!(k <= n);
        let p = Partition::near_equal(n, k).unwrap();
        prop_assert_eq!(p.n(), n);
        prop_assert_eq!(p.k(), k);
        prop_assert!(p.spread() <= 1);
    }

    #[test]
    fn canonical_frames_reach_mahler_equality(n in 2usize..=8, signs in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 8)) {
        let s = canonical_min_frame::<f64>(n, 2, &signs[..n]).unwrap();
        let b = bounds_report(&s).unwrap();
        prop_assert!((b.mahler_product - 8.0).abs() < 1e-9);
    }
}

#[test]
fn single_precision_smoke() {
    let s = random_uframe::<f32>(5, 2, 3).unwrap();
    let d = random_uframe::<f64>(5, 2, 3).unwrap();
    let a = geometry::volume(&s).unwrap() as f64;
    let b = geometry::volume(&d).unwrap();
    assert!((a - b).abs() < 1e-4);
    let q = cube_section(&s).unwrap().volume as f64;
    assert!((q - cube_section(&d).unwrap().volume).abs() < 1e-3);
}
