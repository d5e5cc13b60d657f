//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use uframe::extremal::{canonical_min_frame, constants, hexagon_frame, necessary_condition};
use uframe::frames::{
    complete_to_orthogonal, det_after_substitution, first_order_det, frame_operator, lift, perturbed, project_frame,
    random_uframe, rank_one_det, verify_uframe, whiten, Frame, Perturbation, Projection,
};
use uframe::geometry::{self, mc_volume, star_belt_rest};
use uframe::linalg::{norm, Mat};
use uframe::optimize::{multi_start, Classification, Direction, Objective, ObjectiveKind, SearchParams};
use uframe::sections::bounds_report;
use uframe::{rng, UFrame64};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let l = norm(&v);
    v.into_iter().map(|x| x / l).collect()
}

fn proj(direction: Direction) -> Objective {
    Objective::new(ObjectiveKind::ProjectionVolume, direction)
}

/// Largest whitened volume over `trials` perturbations of total size `magnitude`.
fn worst_perturbation(s: &UFrame64, trials: usize, magnitude: f64, seed: u64) -> f64 {
    let mut r = rng::seeded(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let raw: Vec<Vec<f64>> = (0..s.n()).map(|_| rng::gaussian_vec(&mut r, s.k())).collect();
        let total = raw.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let vs = s
            .vectors()
            .iter()
            .zip(&raw)
            .map(|(v, d)| v.iter().zip(d).map(|(a, b)| a + magnitude * b / total).collect())
            .collect();
        let w = whiten(&Frame::new(s.k(), vs).unwrap()).unwrap();
        worst = worst.max(geometry::volume(&w).unwrap());
    }
    worst
}

fn global_max(k: usize, ns: &[usize], target: f64, budget: Duration) -> Verdict {
    let t0 = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for &n in ns {
        let r = multi_start::<f64>(n, k, &proj(Direction::Max), 20, 0, &SearchParams::default()).unwrap();
        let best = r.best_report();
        let overshoot = r
            .reports
            .iter()
            .flat_map(|x| x.trajectory.iter().map(|p| p.value))
            .fold(f64::NEG_INFINITY, f64::max);
        let class_ok = k != 2 || best.classification == Classification::Coordinate;
        ok &= (best.final_value - target).abs() < 1e-6 && overshoot <= target + 1e-9 && class_ok;
        notes.push(format!("n={n}: {:.9}", best.final_value));
    }
    let elapsed = t0.elapsed();
    ok &= elapsed < budget;
    verdict(ok, format!("{} in {:.1?}", notes.join(", "), elapsed))
}

fn criterion_1() -> Verdict {
    global_max(2, &[3, 4, 5, 6], 2.0, Duration::from_secs(60))
}

fn criterion_2() -> Verdict {
    global_max(3, &[4, 5, 6], 4.0 / 3.0, Duration::from_secs(300))
}

fn criterion_3() -> Verdict {
    let expected = [(3, 2f64.sqrt()), (4, 1.0), (5, 2.0 / 6f64.sqrt()), (6, 2.0 / 3.0)];
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, value) in expected {
        let oracle = constants(n, 2).unwrap();
        ok &= (oracle.min_projection_volume - value).abs() < 1e-12;
        let r = multi_start::<f64>(n, 2, &proj(Direction::Min), 20, 0, &SearchParams::default()).unwrap();
        let best = r.best_report();
        let class_ok = match &best.classification {
            Classification::CanonicalMin { partition } => partition.spread() <= 1,
            _ => false,
        };
        ok &= (best.final_value - value).abs() < 1e-6 && class_ok;
        notes.push(format!("n={n}: {:.9}", best.final_value));
    }
    verdict(ok, notes.join(", "))
}

fn criterion_4() -> Verdict {
    let s = hexagon_frame::<f64>();
    let nc = necessary_condition(&s).unwrap();
    let r3 = 3f64.sqrt();
    let worst = worst_perturbation(&s, 1000, 1e-3, 4);
    let t = star_belt_rest(&geometry::hull(&s).unwrap(), s.vector(0), &s).unwrap().t_boundary;
    let t_fails = !nc.t_pass && (t - 0.5).abs() < 1e-12 && t > 1.0 / (1.0 + r3);
    let ok = nc.max_residual < 1e-9 && nc.local_pass && worst <= r3 + 1e-9 && t_fails;
    verdict(
        ok,
        format!("residual {:.1e}, worst {worst:.12}, t = {t}, t-test fails: {t_fails}", nc.max_residual),
    )
}

fn criterion_5() -> Verdict {
    let s = lift(&hexagon_frame::<f64>());
    let target = 2.0 / 3.0 * 3f64.sqrt();
    let vol = geometry::volume(&s).unwrap();
    let worst = worst_perturbation(&s, 1000, 1e-3, 5);
    let ok = (vol - target).abs() < 1e-12 && worst <= target + 1e-9;
    verdict(ok, format!("volume {vol:.12}, worst {worst:.12}"))
}

fn criterion_6() -> Verdict {
    let mut r = rng::seeded(6);
    let mut rank_one = 0f64;
    for case in 0..1000 {
        let k = 2 + case % 3;
        let v: Vec<f64> = rng::gaussian_vec(&mut r, k).into_iter().map(|x: f64| 0.4 * x).collect();
        let vv = Mat::outer(&v, &v);
        for sign in [1.0, -1.0] {
            let direct = Mat::identity(k).add(&vv.scaled(sign)).det();
            rank_one = rank_one.max((direct - rank_one_det(&v, sign)).abs());
        }
    }

    let mut substitution = 0f64;
    for case in 0..1000u64 {
        let n = 3 + (case % 4) as usize;
        let s = random_uframe::<f64>(n, 2 + (case % 2) as usize, 600 + case).unwrap();
        let i = (0..n).find(|&i| norm(s.vector(i)) < 0.95).unwrap();
        let v: Vec<f64> = rng::gaussian_vec(&mut r, s.k());
        let closed = det_after_substitution(&s, i, &v).unwrap();
        let direct = 1.0 / frame_operator(&s.with_vector(i, v).unwrap()).det().sqrt();
        substitution = substitution.max((closed - direct).abs());
    }

    let mut ratios = (f64::INFINITY, f64::NEG_INFINITY);
    for case in 0..100u64 {
        let s = random_uframe::<f64>(5, 3, 700 + case).unwrap();
        let directions: Vec<Vec<f64>> = (0..s.n()).map(|_| unit(rng::gaussian_vec(&mut r, 3))).collect();
        let err = |t: f64| {
            let ps: Vec<Perturbation<f64>> = directions
                .iter()
                .enumerate()
                .map(|(index, d)| Perturbation { index, direction: d.clone(), scale: t })
                .collect();
            let exact = frame_operator(&perturbed(&s, &ps).unwrap()).det().sqrt();
            (exact - first_order_det(&s, &ps)).abs()
        };
        // small enough that the cubic term is negligible, large enough to stay above rounding
        let q = err(1e-4) / err(5e-5);
        ratios = (ratios.0.min(q), ratios.1.max(q));
    }
    let ok = rank_one < 1e-12 && substitution < 1e-12 && ratios.0 >= 3.5 && ratios.1 <= 4.5;
    verdict(
        ok,
        format!(
            "rank-one {rank_one:.1e}, substitution {substitution:.1e}, ratio in [{:.3}, {:.3}]",
            ratios.0, ratios.1
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut split = 0f64;
    let mut planar_sum = 0f64;
    for case in 0..500u64 {
        let s = random_uframe::<f64>(3 + (case % 8) as usize, 2, 7000 + case).unwrap();
        let p = geometry::hull(&s).unwrap();
        for (i, v) in s.vectors().iter().enumerate() {
            if p.vertex_of(i).is_some() {
                let d = star_belt_rest(&p, v, &s).unwrap();
                split = split.max((d.vol_star + d.vol_belt - p.volume).abs());
            }
        }
        let nc = necessary_condition(&s).unwrap();
        planar_sum = planar_sum.max((nc.belt_sum - 2.0).abs());
    }
    let mut spatial_min = f64::INFINITY;
    for case in 0..100u64 {
        let s = random_uframe::<f64>(4 + (case % 5) as usize, 3, 8000 + case).unwrap();
        spatial_min = spatial_min.min(necessary_condition(&s).unwrap().belt_sum);
    }
    let ok = split < 1e-10 && planar_sum < 1e-9 && spatial_min >= 3.0 - 1e-9;
    verdict(
        ok,
        format!("split {split:.1e}, |sum − 2| {planar_sum:.1e}, min spatial sum {spatial_min:.6}"),
    )
}

fn criterion_8() -> Verdict {
    let mut ok = true;
    let mut mahler_min = f64::INFINITY;
    for case in 0..500u64 {
        let s = random_uframe::<f64>(2 + (case % 7) as usize, 2, 9000 + case).unwrap();
        let b = bounds_report(&s).unwrap();
        ok &= b.vol_section >= 4.0 - 1e-9 && b.vol_section <= b.ball + 1e-9;
        mahler_min = mahler_min.min(b.mahler_product);
    }
    ok &= mahler_min >= 8.0 - 1e-9;
    let mut equality = 0f64;
    for n in 2..=8 {
        let signs: Vec<i8> = (0..n).map(|i| if i % 3 == 1 { -1 } else { 1 }).collect();
        let b = bounds_report(&canonical_min_frame::<f64>(n, 2, &signs).unwrap()).unwrap();
        equality = equality.max((b.mahler_product - 8.0).abs());
    }
    ok &= equality < 1e-6;
    verdict(ok, format!("min Mahler {mahler_min:.9}, canonical deviation {equality:.1e}"))
}

fn criterion_9() -> Verdict {
    let mut idempotence = 0f64;
    let mut completion = 0f64;
    let mut agree = true;
    let mut closure = true;
    for case in 0..1000u64 {
        let mut r = rng::seeded(90_000 + case);
        let k = 2 + (case % 3) as usize;
        let n = k + (case % 4) as usize;
        let raw: Frame<f64> = Frame::new(k, (0..n).map(|_| rng::gaussian_vec(&mut r, k)).collect()).unwrap();
        agree &= verify_uframe(&raw, 1e-9).consistent();
        let u = whiten(&raw).unwrap();
        agree &= verify_uframe(&u, 1e-9).consistent() && verify_uframe(&u, 1e-9).pass;
        let again = whiten(&u).unwrap();
        for (a, b) in u.vectors().iter().zip(again.vectors()) {
            for (x, y) in a.iter().zip(b) {
                idempotence = idempotence.max((x - y).abs());
            }
        }
        let q = complete_to_orthogonal(&u).unwrap();
        completion = completion.max(q.matmul(&q.transpose()).sub(&Mat::identity(n)).max_abs());
        let d = unit(rng::gaussian_vec(&mut r, k));
        closure &= match project_frame(&u, &d).unwrap() {
            Projection::Frame(p) => verify_uframe(&p, 1e-9).pass,
            Projection::Line(c) => (c.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-10,
        };
        closure &= verify_uframe(&lift(&u), 1e-9).pass;
    }
    let ok = idempotence < 1e-10 && completion < 1e-10 && agree && closure;
    verdict(
        ok,
        format!("idempotence {idempotence:.1e}, completion {completion:.1e}, agreement {agree}, closure {closure}"),
    )
}

fn criterion_10() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, exact) in [(2, 2.0), (3, 4.0 / 3.0), (4, 2.0 / 3.0)] {
        let id: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let s = Frame::new(k, id).unwrap();
        let t0 = Instant::now();
        let e = mc_volume(&s, 100_000, 10 + k as u64).unwrap();
        let elapsed = t0.elapsed();
        let z = (e.estimate - exact) / e.stderr;
        ok &= z.abs() <= 3.0 && elapsed < Duration::from_secs(10);
        notes.push(format!("k={k}: z = {z:+.2} ({elapsed:.1?})"));
    }
    verdict(ok, notes.join(", "))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("global max, k = 2", criterion_1),
        ("global max, k = 3", criterion_2),
        ("global min, k = 2", criterion_3),
        ("hexagon local max", criterion_4),
        ("lifted hexagon local max", criterion_5),
        ("determinant identities", criterion_6),
        ("geometry identities", criterion_7),
        ("dual bounds", criterion_8),
        ("frame algebra", criterion_9),
        ("Monte Carlo consistency", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name}: {}", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
