//! Independent recomputations of geometric quantities: angular sorting for
//! polygons, vertex enumeration for sections, sampling for volumes.

use uframe::extremal::{canonical_min_frame, constants, for_each_partition, hexagon_frame};
use uframe::frames::{random_uframe, Frame};
use uframe::geometry::{self, gauge_l1, mc_volume, star_belt_rest};
use uframe::linalg::Mat;
use uframe::sections::{cube_section, frame_section, polar_check};
use uframe::UFrame64;

/// Polygon `co{±v_i}` by sorting the points by angle and discarding
/// reflex turns repeatedly.
fn polygon_by_angle(vs: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = vs
        .iter()
        .flat_map(|v| [[v[0], v[1]], [-v[0], -v[1]]])
        .filter(|p| p[0] != 0.0 || p[1] != 0.0)
        .collect();
    pts.sort_by(|a, b| a[1].atan2(a[0]).partial_cmp(&b[1].atan2(b[0])).unwrap());
    // keep only the farthest point per direction
    pts.dedup_by(|a, b| (a[1].atan2(a[0]) - b[1].atan2(b[0])).abs() < 1e-12 && {
        if a[0].hypot(a[1]) > b[0].hypot(b[1]) {
            *b = *a;
        }
        true
    });
    loop {
        let m = pts.len();
        let bad = (0..m).find(|&i| {
            let a = pts[(i + m - 1) % m];
            let b = pts[i];
            let c = pts[(i + 1) % m];
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) <= 1e-13
        });
        match bad {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

fn shoelace(p: &[[f64; 2]]) -> f64 {
    let m = p.len();
    (0..m)
        .map(|i| p[i][0] * p[(i + 1) % m][1] - p[(i + 1) % m][0] * p[i][1])
        .sum::<f64>()
        / 2.0
}

/// Section vertices as intersections of constraint line pairs.
fn section_by_enumeration(vs: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let mut lines = Vec::new();
    for v in vs {
        if v[0] != 0.0 || v[1] != 0.0 {
            lines.push((v[0], v[1], 1.0));
            lines.push((-v[0], -v[1], 1.0));
        }
    }
    let mut pts = Vec::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let det = a.0 * b.1 - a.1 * b.0;
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (a.2 * b.1 - a.1 * b.2) / det;
            let y = (a.0 * b.2 - a.2 * b.0) / det;
            if vs.iter().all(|v| (v[0] * x + v[1] * y).abs() <= 1.0 + 1e-9) {
                pts.push([x, y]);
            }
        }
    }
    let as_vecs: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0], p[1]]).collect();
    // the enumerated set is centrally symmetric, so the same hull routine applies
    polygon_by_angle(&as_vecs)
}

fn point_in_polygon(p: &[[f64; 2]], x: [f64; 2]) -> bool {
    let m = p.len();
    (0..m).all(|i| {
        let a = p[i];
        let b = p[(i + 1) % m];
        (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
    })
}

#[test]
fn planar_hull_matches_angular_sort() {
    for seed in 0..200 {
        let n = 3 + (seed as usize % 6);
        let s = random_uframe::<f64>(n, 2, seed).unwrap();
        let p = geometry::hull(&s).unwrap();
        let oracle = polygon_by_angle(s.vectors());
        assert!((p.volume - shoelace(&oracle)).abs() < 1e-12, "seed {seed}");
        assert_eq!(p.vertices.len(), oracle.len(), "seed {seed}");
    }
}

#[test]
fn planar_star_matches_triangle_sum() {
    for seed in 0..100 {
        let s = random_uframe::<f64>(5, 2, 1000 + seed).unwrap();
        let p = geometry::hull(&s).unwrap();
        let poly = polygon_by_angle(s.vectors());
        let m = poly.len();
        for v in s.vectors() {
            let Some(_) = p.vertex_index(v) else { continue };
            let touches = |q: [f64; 2]| (q[0] - v[0]).hypot(q[1] - v[1]) < 1e-12 || (q[0] + v[0]).hypot(q[1] + v[1]) < 1e-12;
            let star: f64 = (0..m)
                .filter(|&i| touches(poly[i]) || touches(poly[(i + 1) % m]))
                .map(|i| {
                    let (a, b) = (poly[i], poly[(i + 1) % m]);
                    (a[0] * b[1] - a[1] * b[0]) / 2.0
                })
                .sum();
            let d = star_belt_rest(&p, v, &s).unwrap();
            assert!((d.vol_star - star).abs() < 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn planar_section_matches_vertex_enumeration() {
    for seed in 0..200 {
        let n = 2 + (seed as usize % 7);
        let s = random_uframe::<f64>(n, 2, 5000 + seed).unwrap();
        let q = cube_section(&s).unwrap();
        let oracle = section_by_enumeration(s.vectors());
        assert!((q.volume - shoelace(&oracle)).abs() < 1e-11, "seed {seed}");
    }
}

#[test]
fn gauge_agrees_with_polygon_membership() {
    let s = random_uframe::<f64>(6, 2, 77).unwrap();
    let poly = polygon_by_angle(s.vectors());
    let mut rng = uframe::rng::seeded(78);
    let mut agree = 0;
    for _ in 0..1000 {
        let x: Vec<f64> = uframe::rng::gaussian_vec(&mut rng, 2).into_iter().map(|c: f64| 0.5 * c).collect();
        let g = gauge_l1(&s, &x).unwrap();
        let inside = point_in_polygon(&poly, [x[0], x[1]]);
        // skip points within rounding distance of the boundary
        if (g - 1.0).abs() < 1e-9 {
            continue;
        }
        assert_eq!(g <= 1.0, inside, "x = {x:?}, gauge {g}");
        agree += 1;
    }
    assert!(agree > 990);
}

#[test]
fn spatial_hull_matches_monte_carlo() {
    for seed in 0..5 {
        let s = random_uframe::<f64>(5, 3, 300 + seed).unwrap();
        let exact = geometry::volume(&s).unwrap();
        let mc = mc_volume(&s, 20_000, seed).unwrap();
        assert!((mc.estimate - exact).abs() < 3.5 * mc.stderr, "seed {seed}: {exact} vs {mc:?}");
    }
}

#[test]
fn spatial_section_polarity() {
    for seed in 0..30 {
        let s = random_uframe::<f64>(4 + seed as usize % 5, 3, 700 + seed).unwrap();
        assert!(polar_check(&s).unwrap().deviation < 1e-9, "seed {seed}");
    }
}

#[test]
fn hexagon_explicit_coordinates() {
    let s = hexagon_frame::<f64>();
    let p = geometry::hull(&s).unwrap();
    let r3 = 3f64.sqrt();
    // six triangles from the centre with side √(2/3)
    let side2: f64 = 2.0 / 3.0;
    assert!((p.volume - 6.0 * r3 / 4.0 * side2).abs() < 1e-14);
    assert!((p.volume - r3).abs() < 1e-14);
    let d = star_belt_rest(&p, s.vector(0), &s).unwrap();
    assert!((d.vol_star - 2.0 / 3.0 * r3).abs() < 1e-14);
    assert!((d.t_boundary - 0.5).abs() < 1e-14);
    // section: regular hexagon with apothem √(3/2), area 2√3 · 3/2
    let q = cube_section(&s).unwrap();
    assert!((q.volume - 3.0 * r3).abs() < 1e-12);
}

#[test]
fn canonical_rhombus_and_square() {
    let s = canonical_min_frame::<f64>(4, 2, &[1, 1, 1, 1]).unwrap();
    // rhombus with semi-diagonals 1/√2: area 2 · (1/√2)²
    assert!((geometry::volume(&s).unwrap() - 1.0).abs() < 1e-15);
    // |x_1|/√2 ≤ 1, |x_2|/√2 ≤ 1: square of side 2√2
    assert!((cube_section(&s).unwrap().volume - 8.0).abs() < 1e-12);
}

#[test]
fn cube_vertex_frame_is_not_simplicial() {
    let c = 0.5;
    let s = Frame::new(3, vec![vec![c, c, c], vec![c, c, -c], vec![c, -c, c], vec![-c, c, c]]).unwrap();
    let u = UFrame64::certify_default(s).unwrap();
    let p = geometry::hull(&u).unwrap();
    assert!(!p.is_simplicial());
    assert!(p.facets.iter().all(|f| f.vertices.len() == 4));
}

#[test]
fn partition_oracle_near_equal() {
    for n in 2..=40 {
        for k in 2..=n.min(8) {
            let c = constants(n, k).unwrap();
            assert!(c.best_partition.spread() <= 1, "n {n} k {k}");
            let mut best = 0u64;
            for_each_partition(n, k, |p| best = best.max(p.iter().map(|&d| d as u64).product()));
            assert_eq!(c.product, best);
            assert_eq!(c.closed_form_product, c.product);
        }
    }
}

#[test]
fn square_frames_give_parallelepipeds_and_octahedra() {
    // n = k = 3: Q = M^{-T}[-1, 1]^3 and P = M♢^3
    let mut rng = uframe::rng::seeded(31);
    for case in 0..500 {
        let rows: Vec<Vec<f64>> = (0..3).map(|_| uframe::rng::gaussian_vec(&mut rng, 3)).collect();
        let det = Mat::from_rows(&rows).det().abs();
        if det < 1e-3 {
            continue;
        }
        let cols: Vec<Vec<f64>> = (0..3).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let s = Frame::new(3, cols).unwrap();
        let q = frame_section(&s).unwrap().volume;
        assert!((q - 8.0 / det).abs() < 1e-9 * q, "case {case}: {q} vs {}", 8.0 / det);
        let p = geometry::volume(&s).unwrap();
        assert!((p - 4.0 / 3.0 * det).abs() < 1e-9 * p.max(1.0), "case {case}");
    }
}
