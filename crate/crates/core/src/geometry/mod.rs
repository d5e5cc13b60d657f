//! The polytope `P = co{±v_1, …, ±v_n}` for `k = 2, 3`, its star, belt and
//! rest around a vertex, and the `P_λ` profile. Higher dimensions are served
//! by the ℓ1 gauge and a Monte Carlo estimate.

mod gauge;
pub mod hull;
mod mc;
pub mod predicates;
mod svg;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::linalg::{dot, norm, norm_sq, scale, sub};
use crate::scalar::Real;

pub use gauge::{gauge_l1, gauge_l1_solution, GaugeSolution};
pub use hull::{convex_hull, Hull, HullFacet};
pub use mc::{mc_volume, McEstimate};
pub use svg::{svg, SvgOptions};

use predicates::cross3;

/// Relative tolerance for merging coincident points and coplanar faces.
pub const MERGE_TOL: f64 = 1e-10;

/// Generator `sign · v_index` of the polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub index: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct Facet<T> {
    /// Indices into [`SymPolytope::vertices`], in cyclic order.
    pub vertices: Vec<usize>,
    pub normal: Vec<T>,
    pub offset: T,
}

/// `co{±v_1, …, ±v_n}` for `k ∈ {2, 3}`.
#[derive(Clone, Debug, Serialize)]
pub struct SymPolytope<T> {
    pub k: usize,
    pub vertices: Vec<Vec<T>>,
    /// Generators coinciding with each vertex.
    pub provenance: Vec<Vec<Generator>>,
    /// Generators that are not vertices (interior or on a face).
    pub non_vertex_generators: Vec<Generator>,
    /// Edges for `k = 2`, polygonal faces for `k = 3`.
    pub facets: Vec<Facet<T>>,
    /// Counterclockwise vertex order for `k = 2`.
    pub cycle: Option<Vec<usize>>,
    pub volume: T,
}

fn check_dim(k: usize, operation: &'static str) -> Result<()> {
    if k == 2 || k == 3 {
        Ok(())
    } else {
        Err(Error::Dimension { k, operation })
    }
}

fn generator_points<T: Real>(s: &Frame<T>) -> (Vec<Vec<T>>, Vec<Generator>) {
    let mut points = Vec::with_capacity(2 * s.n());
    let mut gens = Vec::with_capacity(2 * s.n());
    for (i, v) in s.vectors().iter().enumerate() {
        points.push(v.clone());
        gens.push(Generator { index: i, sign: 1 });
        points.push(v.iter().map(|&x| -x).collect());
        gens.push(Generator { index: i, sign: -1 });
    }
    (points, gens)
}

/// Convex hull of `±v_i`.
pub fn hull<T: Real>(s: &Frame<T>) -> Result<SymPolytope<T>> {
    check_dim(s.k(), "hull")?;
    let scale_ref = s.max_norm();
    let tol = T::tol(MERGE_TOL) * scale_ref;
    let (points, gens) = generator_points(s);
    let (reps, rep_of) = hull::dedup_points(&points, tol);
    let h = convex_hull(&reps, tol)?;

    let mut slot = vec![None; reps.len()];
    for (new, &old) in h.vertices.iter().enumerate() {
        slot[old] = Some(new);
    }
    let mut provenance = vec![Vec::new(); h.vertices.len()];
    let mut non_vertex_generators = Vec::new();
    for (g, &r) in gens.iter().zip(&rep_of) {
        match slot[r] {
            Some(v) => provenance[v].push(*g),
            None => non_vertex_generators.push(*g),
        }
    }
    let remap = |idx: &[usize]| idx.iter().map(|&i| slot[i].expect("hull vertex")).collect();
    let facets = h
        .facets
        .iter()
        .map(|f| Facet {
            vertices: remap(&f.vertices),
            normal: f.normal.clone(),
            offset: f.offset,
        })
        .collect();
    Ok(SymPolytope {
        k: s.k(),
        vertices: h.vertices.iter().map(|&i| reps[i].clone()).collect(),
        provenance,
        non_vertex_generators,
        facets,
        cycle: h.cycle.as_deref().map(remap),
        volume: h.volume,
    })
}

/// Volume of `co{±v_i}` for `k ∈ {2, 3}`.
pub fn volume<T: Real>(s: &Frame<T>) -> Result<T> {
    Ok(hull(s)?.volume)
}

/// `(k−1)`-volume of a planar facet given by its vertex cycle.
fn facet_measure<T: Real>(points: &[Vec<T>], cycle: &[usize]) -> T {
    match points[cycle[0]].len() {
        2 => norm(&sub(&points[cycle[1]], &points[cycle[0]])),
        _ => {
            let p0 = &points[cycle[0]];
            let mut acc = [T::zero(); 3];
            for w in cycle[1..].windows(2) {
                let c = cross3(&sub(&points[w[0]], p0), &sub(&points[w[1]], p0));
                for (a, x) in acc.iter_mut().zip(c) {
                    *a = *a + x;
                }
            }
            norm(&acc) * T::lit(0.5)
        }
    }
}

impl<T: Real> SymPolytope<T> {
    /// Index of the vertex within the merge tolerance of `v`.
    pub fn vertex_index(&self, v: &[T]) -> Option<usize> {
        let scale_ref = self
            .vertices
            .iter()
            .map(|w| norm(w))
            .fold(T::zero(), T::max);
        let tol = T::tol(MERGE_TOL) * scale_ref;
        self.vertices.iter().position(|w| norm(&sub(w, v)) <= tol)
    }

    /// Vertex carrying generator `(i, +)`, if `v_i` is a vertex.
    pub fn vertex_of(&self, i: usize) -> Option<usize> {
        self.provenance
            .iter()
            .position(|p| p.contains(&Generator { index: i, sign: 1 }))
    }

    pub fn is_simplicial(&self) -> bool {
        self.facets.iter().all(|f| f.vertices.len() == self.k)
    }

    /// Volume of the cone from the origin over a facet.
    pub fn cone_volume(&self, facet: &Facet<T>) -> T {
        facet_measure(&self.vertices, &facet.vertices) * facet.offset / T::count(self.k)
    }

    /// Number of edges, counting each facet boundary edge once.
    pub fn edge_count(&self) -> usize {
        if self.k == 2 {
            return self.facets.len();
        }
        let mut edges: Vec<(usize, usize)> = self
            .facets
            .iter()
            .flat_map(|f| {
                let m = f.vertices.len();
                (0..m).map(move |i| {
                    let (a, b) = (f.vertices[i], f.vertices[(i + 1) % m]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// Index of the antipodal vertex.
    pub fn antipode(&self, v: usize) -> Option<usize> {
        let neg: Vec<T> = self.vertices[v].iter().map(|&x| -x).collect();
        self.vertex_index(&neg)
    }
}

pub fn is_simplicial<T: Real>(p: &SymPolytope<T>) -> bool {
    p.is_simplicial()
}

/// Star, belt and rest of `P` around a vertex.
#[derive(Clone, Debug, Serialize)]
pub struct StarDecomposition<T> {
    pub vertex: Vec<T>,
    pub vol_star: T,
    pub vol_belt: T,
    pub vol_rest: T,
    /// Largest `t` with `t·v` in the rest.
    pub t_boundary: T,
}

/// The rest `R_P(v)` as its hull, or its degenerate description.
enum Rest<T> {
    Full(Vec<Vec<T>>, Hull<T>),
    /// Spans a hyperplane: its `(k−1)`-volume and the unit normal.
    Flat { measure: T, normal: Vec<T> },
    /// Spans less than a hyperplane.
    Thin,
}

/// Orthonormal basis of the span of `points` (modified Gram-Schmidt).
fn span_basis<T: Real>(points: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut order: Vec<&Vec<T>> = points.iter().collect();
    order.sort_by(|a, b| norm_sq(b).partial_cmp(&norm_sq(a)).unwrap_or(std::cmp::Ordering::Equal));
    for p in order {
        let mut w = p.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w = w.iter().zip(b).map(|(&x, &y)| x - c * y).collect();
            }
        }
        let len = norm(&w);
        if len > tol {
            basis.push(scale(&w, T::one() / len));
        }
    }
    basis
}

fn rest_generators<T: Real>(p: &SymPolytope<T>, v: usize, s: &Frame<T>) -> Vec<Vec<T>> {
    let mut excluded: Vec<usize> = p.provenance[v].iter().map(|g| g.index).collect();
    if let Some(a) = p.antipode(v) {
        excluded.extend(p.provenance[a].iter().map(|g| g.index));
    }
    let (points, gens) = generator_points(s);
    points
        .into_iter()
        .zip(gens)
        .filter(|(_, g)| !excluded.contains(&g.index))
        .map(|(x, _)| x)
        .collect()
}

fn build_rest<T: Real>(points: Vec<Vec<T>>, k: usize, tol: T) -> Result<Rest<T>> {
    let basis = span_basis(&points, tol);
    if basis.len() == k {
        let (reps, _) = hull::dedup_points(&points, tol);
        let h = convex_hull(&reps, tol)?;
        return Ok(Rest::Full(reps, h));
    }
    if basis.len() + 1 < k {
        return Ok(Rest::Thin);
    }
    let normal = crate::linalg::extend_orthonormal(&basis, k, T::tol(1e-6))?
        .pop()
        .ok_or_else(|| Error::Numerical("no complement for the flat rest".into()))?;
    let local: Vec<Vec<T>> = points
        .iter()
        .map(|x| basis.iter().map(|b| dot(x, b)).collect())
        .collect();
    let measure = if k == 2 {
        let ext = local.iter().map(|x| x[0].abs()).fold(T::zero(), T::max);
        ext + ext
    } else {
        hull::hull_volume(&local, tol)?
    };
    Ok(Rest::Flat { measure, normal })
}

fn locate<T: Real>(p: &SymPolytope<T>, v: &[T]) -> Result<usize> {
    p.vertex_index(v).ok_or(Error::NotAVertex)
}

pub fn star_belt_rest<T: Real>(p: &SymPolytope<T>, v: &[T], s: &Frame<T>) -> Result<StarDecomposition<T>> {
    check_dim(p.k, "star decomposition")?;
    let iv = locate(p, v)?;
    let ineg = p.antipode(iv);
    let vol_star = p
        .facets
        .iter()
        .filter(|f| f.vertices.contains(&iv) || ineg.is_some_and(|a| f.vertices.contains(&a)))
        .map(|f| p.cone_volume(f))
        .sum::<T>();
    let vertex = p.vertices[iv].clone();
    let tol = T::tol(MERGE_TOL) * s.max_norm();
    let (vol_rest, t_boundary) = match build_rest(rest_generators(p, iv, s), p.k, tol)? {
        Rest::Full(_, h) => {
            let t = h
                .facets
                .iter()
                .filter_map(|f| {
                    let a = dot(&f.normal, &vertex);
                    (a > T::zero()).then(|| f.offset / a)
                })
                .fold(T::infinity(), T::min);
            (h.volume, t.min(T::one()))
        }
        _ => (T::zero(), T::zero()),
    };
    Ok(StarDecomposition {
        vertex,
        vol_star,
        vol_belt: p.volume - vol_star,
        vol_rest,
        t_boundary,
    })
}

/// `λ ↦ vol co{R_P(v), ±λv}` on `[0, λ_max]`.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaProfile<T> {
    pub breakpoints: Vec<T>,
    /// `slopes[j]` holds on `[breakpoints[j], breakpoints[j+1]]`.
    pub slopes: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> LambdaProfile<T> {
    pub fn value(&self, lambda: T) -> T {
        let j = self
            .breakpoints
            .windows(2)
            .position(|w| lambda <= w[1])
            .unwrap_or(self.slopes.len() - 1);
        self.values[j] + self.slopes[j] * (lambda - self.breakpoints[j])
    }

    /// Slope just to the right of `lambda`.
    pub fn right_slope(&self, lambda: T) -> T {
        let j = self
            .breakpoints
            .windows(2)
            .position(|w| lambda < w[1])
            .unwrap_or(self.slopes.len() - 1);
        self.slopes[j]
    }

    pub fn is_convex(&self, tol: T) -> bool {
        self.slopes.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

pub fn lambda_profile<T: Real>(
    p: &SymPolytope<T>,
    v: &[T],
    s: &Frame<T>,
    lambda_max: T,
) -> Result<LambdaProfile<T>> {
    check_dim(p.k, "lambda profile")?;
    if !(lambda_max > T::one()) {
        return Err(Error::Precondition("lambda_max must exceed 1".into()));
    }
    let iv = locate(p, v)?;
    let vertex = p.vertices[iv].clone();
    let k = T::count(p.k);
    let two = T::lit(2.0);
    let tol = T::tol(MERGE_TOL) * s.max_norm();

    // value = base + Σ_j c_j · max(0, λ a_j − b_j)
    let (base, terms): (T, Vec<(T, T, T)>) = match build_rest(rest_generators(p, iv, s), p.k, tol)? {
        Rest::Full(reps, h) => {
            let terms = h
                .facets
                .iter()
                .filter_map(|f| {
                    let a = dot(&f.normal, &vertex);
                    (a > T::zero()).then(|| (two * facet_measure(&reps, &f.vertices) / k, a, f.offset))
                })
                .collect();
            (h.volume, terms)
        }
        Rest::Flat { measure, normal } => {
            let a = dot(&normal, &vertex).abs();
            (T::zero(), vec![(two * measure / k, a, T::zero())])
        }
        Rest::Thin => (T::zero(), Vec::new()),
    };

    let mut breakpoints = vec![T::zero()];
    let mut kinks: Vec<T> = terms
        .iter()
        .map(|&(_, a, b)| b / a)
        .filter(|&x| x > T::zero() && x < lambda_max)
        .collect();
    kinks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    kinks.dedup_by(|a, b| (*a - *b).abs() <= tol);
    breakpoints.extend(kinks);
    breakpoints.push(lambda_max);

    let eval = |lambda: T| {
        base + terms
            .iter()
            .map(|&(c, a, b)| c * (lambda * a - b).max(T::zero()))
            .sum::<T>()
    };
    let values: Vec<T> = breakpoints.iter().map(|&l| eval(l)).collect();
    let slopes = breakpoints
        .windows(2)
        .map(|w| {
            let mid = (w[0] + w[1]) * T::lit(0.5);
            terms
                .iter()
                .filter(|&&(_, a, b)| mid * a > b)
                .map(|&(c, a, _)| c * a)
                .sum::<T>()
        })
        .collect();
    Ok(LambdaProfile {
        breakpoints,
        slopes,
        values,
    })
}
