//! Cube sections `Q = ∩ {|⟨x, v_i⟩| ≤ 1}` in uframe coordinates, the polar
//! body of `co{±v_i}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{frame_operator, Frame, UFrame};
use crate::geometry::{self, convex_hull, hull::dedup_points, hull::planar_cycle, Generator, MERGE_TOL};
use crate::linalg::{dot, norm, sub};
use crate::scalar::Real;

/// Margin on the starting box `[−cρ, cρ]^k`, `ρ = √(n / λ_min(A_S))`; on `Q`
/// one has `λ_min |x|² ≤ Σ ⟨x, v_i⟩² ≤ n`, so `ρ = √n` for unit
/// decompositions.
pub const BOX_MARGIN: f64 = 1.01;

#[derive(Clone, Debug, Serialize)]
pub struct SectionFacet<T> {
    pub vertices: Vec<usize>,
    pub normal: Vec<T>,
    pub offset: T,
    /// Constraints `sign · ⟨x, v_index⟩ = 1` carried by this facet.
    pub constraints: Vec<Generator>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionPolytope<T> {
    pub k: usize,
    pub vertices: Vec<Vec<T>>,
    pub facets: Vec<SectionFacet<T>>,
    pub cycle: Option<Vec<usize>>,
    pub volume: T,
    /// Indices whose constraints are tight on some facet, ascending.
    pub active: Vec<usize>,
}

/// Keeps the part of a convex polygon (given as a cycle in any dimension)
/// with `⟨a, x⟩ ≤ b`; returns the clipped cycle and the new boundary points.
fn clip_polygon<T: Real>(poly: &[Vec<T>], a: &[T], b: T) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 1);
    let mut cut = Vec::new();
    for i in 0..m {
        let p = &poly[i];
        let q = &poly[(i + 1) % m];
        let hp = dot(a, p) - b;
        let hq = dot(a, q) - b;
        if hp <= T::zero() {
            out.push(p.clone());
            if hp == T::zero() {
                cut.push(p.clone());
            }
        }
        if (hp < T::zero() && hq > T::zero()) || (hp > T::zero() && hq < T::zero()) {
            let t = hp / (hp - hq);
            let x: Vec<T> = p.iter().zip(q).map(|(&u, &w)| u + t * (w - u)).collect();
            cut.push(x.clone());
            out.push(x);
        }
    }
    (out, cut)
}

fn start_box<T: Real>(k: usize, radius: T) -> Vec<Vec<Vec<T>>> {
    let c = T::lit(BOX_MARGIN) * radius;
    if k == 2 {
        return vec![vec![vec![-c, -c], vec![c, -c], vec![c, c], vec![-c, c]]];
    }
    let mut faces = Vec::new();
    for axis in 0..3 {
        let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
        for s in [-c, c] {
            let corner = |x: T, y: T| {
                let mut p = vec![T::zero(); 3];
                p[axis] = s;
                p[u] = x;
                p[w] = y;
                p
            };
            faces.push(vec![corner(-c, -c), corner(c, -c), corner(c, c), corner(-c, c)]);
        }
    }
    faces
}

/// Orders coplanar points in the plane with unit normal `a`.
fn cap_cycle<T: Real>(points: Vec<Vec<T>>, a: &[T], tol: T) -> Option<Vec<Vec<T>>> {
    let (points, _) = dedup_points(&points, tol);
    if points.len() < 3 {
        return None;
    }
    let axis = (0..3)
        .min_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let mut e = [T::zero(); 3];
    e[axis] = T::one();
    let u = geometry::predicates::cross3(a, &e);
    let w = geometry::predicates::cross3(a, &u);
    let local: Vec<[T; 2]> = points.iter().map(|p| [dot(p, &u), dot(p, &w)]).collect();
    let cycle = planar_cycle(&local);
    (cycle.len() >= 3).then(|| cycle.into_iter().map(|i| points[i].clone()).collect())
}

/// Halfspaces `sign · ⟨x, v_i⟩ ≤ 1` in the given index order, zero vectors
/// skipped.
fn halfspaces<T: Real>(s: &Frame<T>, order: &[usize]) -> Vec<(Vec<T>, T)> {
    let mut hs = Vec::new();
    for &i in order {
        let v = s.vector(i);
        let len = norm(v);
        if len == T::zero() {
            continue;
        }
        let a: Vec<T> = v.iter().map(|&x| x / len).collect();
        let b = T::one() / len;
        hs.push((a.iter().map(|&x| -x).collect(), b));
        hs.push((a, b));
    }
    hs
}

fn clip_all<T: Real>(s: &Frame<T>, order: &[usize], radius: T, tol: T) -> Vec<Vec<T>> {
    let k = s.k();
    let mut faces = start_box::<T>(k, radius);
    for (a, b) in halfspaces(s, order) {
        if k == 2 {
            let (poly, _) = clip_polygon(&faces[0], &a, b);
            faces[0] = poly;
            continue;
        }
        let mut cut = Vec::new();
        let mut next = Vec::with_capacity(faces.len() + 1);
        for f in &faces {
            let (poly, c) = clip_polygon(f, &a, b);
            cut.extend(c);
            let (poly, _) = dedup_points(&poly, tol);
            if poly.len() >= 3 {
                next.push(poly);
            }
        }
        if let Some(cap) = cap_cycle(cut, &a, tol) {
            next.push(cap);
        }
        faces = next;
    }
    faces.into_iter().flatten().collect()
}

fn section_in_order<T: Real>(s: &Frame<T>, order: &[usize]) -> Result<SectionPolytope<T>> {
    let k = s.k();
    if k != 2 && k != 3 {
        return Err(Error::Dimension {
            k,
            operation: "cube section",
        });
    }
    let lambda_min = frame_operator(s).eigen().min_value();
    if !(lambda_min > T::zero()) {
        return Err(Error::Conditioning("section of a degenerate frame is unbounded".into()));
    }
    let radius = (T::count(s.n()) / lambda_min).sqrt();
    let tol = T::tol(MERGE_TOL) * radius;
    let raw = clip_all(s, order, radius, tol);
    let (points, _) = dedup_points(&raw, tol);
    let h = convex_hull(&points, tol)?;

    let mut slot = vec![None; points.len()];
    for (new, &old) in h.vertices.iter().enumerate() {
        slot[old] = Some(new);
    }
    let remap = |idx: &[usize]| -> Vec<usize> { idx.iter().map(|&i| slot[i].expect("hull vertex")).collect() };

    let match_tol = T::tol(1e-8);
    let mut active = Vec::new();
    let facets = h
        .facets
        .iter()
        .map(|f| {
            let mut constraints = Vec::new();
            for (i, v) in s.vectors().iter().enumerate() {
                let len = norm(v);
                if len == T::zero() {
                    continue;
                }
                for sign in [1i8, -1] {
                    let sg = T::lit(f64::from(sign));
                    let a: Vec<T> = v.iter().map(|&x| sg * x / len).collect();
                    if norm(&sub(&a, &f.normal)) <= match_tol && (f.offset * len - T::one()).abs() <= match_tol {
                        constraints.push(Generator { index: i, sign });
                        active.push(i);
                    }
                }
            }
            SectionFacet {
                vertices: remap(&f.vertices),
                normal: f.normal.clone(),
                offset: f.offset,
                constraints,
            }
        })
        .collect();
    active.sort_unstable();
    active.dedup();
    Ok(SectionPolytope {
        k,
        vertices: h.vertices.iter().map(|&i| points[i].clone()).collect(),
        facets,
        cycle: h.cycle.as_deref().map(remap),
        volume: h.volume,
        active,
    })
}

/// `Q = ∩ {|⟨x, v_i⟩| ≤ 1}` by clipping the box `[−1.01√n, 1.01√n]^k`.
pub fn cube_section<T: Real>(s: &UFrame<T>) -> Result<SectionPolytope<T>> {
    frame_section(s)
}

/// `∩ {|⟨x, v_i⟩| ≤ 1}` for any spanning frame.
pub fn frame_section<T: Real>(s: &Frame<T>) -> Result<SectionPolytope<T>> {
    let order: Vec<usize> = (0..s.n()).collect();
    section_in_order(s, &order)
}

/// As [`cube_section`] with the constraints clipped in the given order.
pub fn cube_section_ordered<T: Real>(s: &UFrame<T>, order: &[usize]) -> Result<SectionPolytope<T>> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..s.n()).collect::<Vec<_>>() {
        return Err(Error::Precondition("order must be a permutation of the indices".into()));
    }
    section_in_order(s, order)
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarReport<T> {
    /// Largest `|h − 1|` over support values of either body at the other's
    /// vertices.
    pub deviation: T,
    pub pass: bool,
}

/// Checks that the section is the polar of `co{±v_i}`.
pub fn polar_check<T: Real>(s: &UFrame<T>) -> Result<PolarReport<T>> {
    let p = geometry::hull(s)?;
    let q = cube_section(s)?;
    let support = |pts: &[Vec<T>], x: &[T]| pts.iter().map(|w| dot(w, x)).fold(T::neg_infinity(), T::max);
    let mut deviation = T::zero();
    for u in &p.vertices {
        deviation = deviation.max((support(&q.vertices, u) - T::one()).abs());
    }
    for w in &q.vertices {
        deviation = deviation.max((support(&p.vertices, w) - T::one()).abs());
    }
    Ok(PolarReport {
        deviation,
        pass: deviation < T::tol(1e-9),
    })
}

/// Lower and upper bounds on central cube sections of dimension `k` in `R^n`.
pub fn vaaler_bound(k: usize) -> f64 {
    2f64.powi(k as i32)
}

pub fn ball_bound(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    (nf / kf).powf(kf / 2.0).min(2f64.powf((nf - kf) / 2.0)) * vaaler_bound(k)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub vol_section: f64,
    pub vaaler: f64,
    pub ball: f64,
    pub pass: bool,
    pub mahler_product: f64,
}

pub fn bounds_report<T: Real>(s: &UFrame<T>) -> Result<BoundsReport> {
    let q = cube_section(s)?.volume.as_f64();
    let p = geometry::hull(s)?.volume.as_f64();
    let vaaler = vaaler_bound(s.k());
    let ball = ball_bound(s.n(), s.k());
    let slack = T::tol(1e-9).as_f64() * ball;
    Ok(BoundsReport {
        vol_section: q,
        vaaler,
        ball,
        pass: q >= vaaler - slack && q <= ball + slack,
        mahler_product: p * q,
    })
}
