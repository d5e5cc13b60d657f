//! Local search over unit decompositions: perturb a frame by a linear or
//! structural move, whiten, and keep the result if the objective improves.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{necessary_condition, search_cap, NecessaryConditionReport, Partition};
use crate::frames::{self, deleted_whitener_apply, frame_operator, random_uframe, whiten, Frame, UFrame};
use crate::geometry::{self, gauge_l1};
use crate::linalg::{axpy, dot, norm, norm_sq, scale};
use crate::rng;
use crate::scalar::Real;
use crate::sections::frame_section;

/// Tolerance for matching a frame against the extremizer templates.
pub const CLASSIFY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move<T> {
    /// `v_i → factor · v_i`.
    ScaleVertex { index: usize, factor: T },
    /// `v_i → 0`.
    ZeroVector { index: usize },
    /// `v_i → v_with`.
    ReplaceVector { index: usize, with: usize },
    /// `v_i → v_i + magnitude · direction` with a unit `direction`.
    Gaussian { index: usize, direction: Vec<T>, magnitude: T },
}

impl<T: Real> Move<T> {
    pub fn index(&self) -> usize {
        match self {
            Move::ScaleVertex { index, .. }
            | Move::ZeroVector { index }
            | Move::ReplaceVector { index, .. }
            | Move::Gaussian { index, .. } => *index,
        }
    }

    /// The frame `S̃` before whitening.
    pub fn perturb(&self, s: &UFrame<T>) -> Result<Frame<T>> {
        let n = s.n();
        let i = self.index();
        if i >= n {
            return Err(Error::Range(format!("move index {i} out of {n}")));
        }
        let v = s.vector(i);
        let new = match self {
            Move::ScaleVertex { factor, .. } => {
                if !(*factor > T::zero()) {
                    return Err(Error::Precondition("scale factor must be positive".into()));
                }
                scale(v, *factor)
            }
            Move::ZeroVector { .. } => vec![T::zero(); s.k()],
            Move::ReplaceVector { with, .. } => {
                if *with >= n {
                    return Err(Error::Range(format!("move index {with} out of {n}")));
                }
                if !(norm(v) < T::one() - T::tol(frames::SUBSTITUTION_MARGIN)) {
                    return Err(Error::Precondition(format!("|v_{i}| must be below 1 to replace it")));
                }
                s.vector(*with).to_vec()
            }
            Move::Gaussian {
                direction, magnitude, ..
            } => {
                if !(*magnitude > T::zero()) || direction.len() != s.k() {
                    return Err(Error::Precondition("gaussian move needs a positive magnitude".into()));
                }
                axpy(v, *magnitude, direction)
            }
        };
        let mut vectors = s.vectors().to_vec();
        vectors[i] = new;
        Frame::new(s.k(), vectors).map_err(|e| match e {
            Error::InvalidFrame(msg) => Error::Conditioning(msg),
            other => other,
        })
    }
}

/// `S → S̃ → B_{S̃} S̃`.
pub fn apply_move<T: Real>(s: &UFrame<T>, m: &Move<T>) -> Result<UFrame<T>> {
    whiten(&m.perturb(s)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    ProjectionVolume,
    SectionVolume,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub direction: Direction,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, direction: Direction) -> Self {
        Self { kind, direction }
    }

    pub fn value<T: Real>(&self, s: &Frame<T>) -> Result<T> {
        match self.kind {
            ObjectiveKind::ProjectionVolume => geometry::volume(s),
            ObjectiveKind::SectionVolume => Ok(frame_section(s)?.volume),
        }
    }

    /// `true` iff `candidate` is strictly better than `current`.
    pub fn improves<T: Real>(&self, candidate: T, current: T) -> bool {
        match self.direction {
            Direction::Max => candidate > current,
            Direction::Min => candidate < current,
        }
    }

    /// Degree of homogeneity under linear maps: the value of `T(S)` is
    /// `|det T|^degree` times the value of `S`.
    pub fn homogeneity(&self) -> i32 {
        match self.kind {
            ObjectiveKind::ProjectionVolume => 1,
            ObjectiveKind::SectionVolume => -1,
        }
    }

    /// Value of `B_{S̃} S̃` computed from `S̃` alone, using
    /// `det B_{S̃} = (det A_{S̃})^{-1/2}`.
    pub fn whitened_value<T: Real>(&self, tilde: &Frame<T>) -> Result<T> {
        let det_b = T::one() / frame_operator(tilde).det().sqrt();
        Ok(self.value(tilde)? * det_b.powi(self.homogeneity()))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchParams {
    pub step0: f64,
    pub shrink: f64,
    pub tol_step: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            step0: 0.1,
            shrink: 0.5,
            tol_step: 1e-8,
            max_iters: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Coordinate,
    CanonicalMin { partition: Partition },
    HexagonLift { lifts: usize },
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryPoint<T> {
    /// Objective evaluations spent so far.
    pub step: usize,
    pub value: T,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct OptimizationReport<T> {
    pub objective: Objective,
    pub start: UFrame<T>,
    pub trajectory: Vec<TrajectoryPoint<T>>,
    pub accepted_moves: Vec<Move<T>>,
    #[serde(rename = "final")]
    pub final_frame: UFrame<T>,
    pub final_value: T,
    pub converged: bool,
    pub evaluations: usize,
    pub nc_report: Option<NecessaryConditionReport>,
    pub classification: Classification,
}

/// Whether `v_i` lies in `co{±v_j : j ≠ i}`.
fn inside_others<T: Real>(s: &UFrame<T>, i: usize) -> bool {
    let others: Vec<Vec<T>> = s
        .vectors()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| v.clone())
        .collect();
    match Frame::new(s.k(), others) {
        Ok(rest) => gauge_l1(&rest, s.vector(i)).is_ok_and(|g| g <= T::one() + T::tol(1e-12)),
        Err(_) => false,
    }
}

/// Hypotheses under which replacing `v_i` by `v_j` cannot increase the
/// volume: `|v_i| < 1` and `|B_{S∖i} v_i| ≤ |B_{S∖i} v_j|`.
fn replace_admissible<T: Real>(s: &UFrame<T>, i: usize, j: usize) -> bool {
    if i == j || !(norm(s.vector(i)) < T::one() - T::tol(frames::SUBSTITUTION_MARGIN)) {
        return false;
    }
    let (Ok(a), Ok(b)) = (
        deleted_whitener_apply(s, i, s.vector(i)),
        deleted_whitener_apply(s, i, s.vector(j)),
    ) else {
        return false;
    };
    norm_sq(&a) <= norm_sq(&b)
}

/// Structural moves tried every round.
fn discrete_moves<T: Real>(s: &UFrame<T>, direction: Direction) -> Vec<Move<T>> {
    let n = s.n();
    let mut moves = Vec::new();
    match direction {
        Direction::Max => {
            for i in 0..n {
                if norm_sq(s.vector(i)) > T::zero() && inside_others(s, i) {
                    moves.push(Move::ZeroVector { index: i });
                }
            }
        }
        Direction::Min => {
            for i in 0..n {
                for j in 0..n {
                    if replace_admissible(s, i, j) && !collinear(s.vector(i), s.vector(j)) {
                        moves.push(Move::ReplaceVector { index: i, with: j });
                    }
                }
            }
        }
    }
    moves
}

fn collinear<T: Real>(a: &[T], b: &[T]) -> bool {
    let (na, nb) = (norm(a), norm(b));
    na > T::zero() && nb > T::zero() && (dot(a, b).abs() / (na * nb) - T::one()).abs() <= T::tol(1e-14)
}

struct Search<'a, T> {
    obj: &'a Objective,
    current: UFrame<T>,
    value: T,
    evaluations: usize,
    max_iters: usize,
    trajectory: Vec<TrajectoryPoint<T>>,
    accepted: Vec<Move<T>>,
}

impl<T: Real> Search<'_, T> {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.max_iters
    }

    /// Evaluates `m`; on strict improvement moves there and returns `true`.
    fn try_move(&mut self, m: Move<T>) -> bool {
        if self.exhausted() {
            return false;
        }
        self.evaluations += 1;
        let Ok(next) = apply_move(&self.current, &m) else {
            return false;
        };
        let Ok(v) = self.obj.value(&next) else {
            return false;
        };
        if v.is_finite() && self.obj.improves(v, self.value) {
            self.current = next;
            self.value = v;
            self.trajectory.push(TrajectoryPoint {
                step: self.evaluations,
                value: v,
            });
            self.accepted.push(m);
            true
        } else {
            false
        }
    }
}

/// Pattern search from `s0`: each round tries `±step` along a fresh Gaussian
/// direction for every vector, scaling every vector by `1 + step` and
/// `1/(1 + step)`, and the structural moves; a round without improvement
/// shrinks the step.
pub fn local_search<T: Real>(s0: &UFrame<T>, obj: &Objective, params: &SearchParams) -> Result<OptimizationReport<T>> {
    let k = s0.k();
    if k != 2 && k != 3 {
        return Err(Error::Dimension {
            k,
            operation: "local search",
        });
    }
    let value = obj.value(s0)?;
    let mut search = Search {
        obj,
        current: s0.clone(),
        value,
        evaluations: 1,
        max_iters: params.max_iters,
        trajectory: vec![TrajectoryPoint { step: 1, value }],
        accepted: Vec::new(),
    };
    let mut g = rng::seeded(params.seed);
    let mut step = params.step0;
    let n = s0.n();
    let mut converged = false;

    while !search.exhausted() {
        if step < params.tol_step {
            converged = true;
            break;
        }
        let mut improved = false;
        for m in discrete_moves(&search.current, obj.direction) {
            improved |= search.try_move(m);
        }
        let h = T::lit(step);
        for i in 0..n {
            let d: Vec<T> = rng::gaussian_vec(&mut g, k);
            let len = norm(&d);
            if len == T::zero() {
                continue;
            }
            let d = scale(&d, T::one() / len);
            if !search.try_move(Move::Gaussian {
                index: i,
                direction: d.clone(),
                magnitude: h,
            }) {
                improved |= search.try_move(Move::Gaussian {
                    index: i,
                    direction: d.iter().map(|&x| -x).collect(),
                    magnitude: h,
                });
            } else {
                improved = true;
            }
            if norm_sq(search.current.vector(i)) > T::zero() {
                let up = T::one() + h;
                if !search.try_move(Move::ScaleVertex { index: i, factor: up }) {
                    improved |= search.try_move(Move::ScaleVertex {
                        index: i,
                        factor: T::one() / up,
                    });
                } else {
                    improved = true;
                }
            }
        }
        if !improved {
            step *= params.shrink;
        }
    }

    let final_frame = search.current;
    Ok(OptimizationReport {
        objective: *obj,
        start: s0.clone(),
        trajectory: search.trajectory,
        accepted_moves: search.accepted,
        nc_report: necessary_condition(&final_frame).ok(),
        classification: classify(&final_frame),
        final_value: search.value,
        final_frame,
        converged,
        evaluations: search.evaluations,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct MultiStartReport<T> {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub best: usize,
    pub warning: Option<String>,
    pub reports: Vec<OptimizationReport<T>>,
}

impl<T: Real> MultiStartReport<T> {
    pub fn best_report(&self) -> &OptimizationReport<T> {
        &self.reports[self.best]
    }
}

/// Runs [`local_search`] from `starts` random unit decompositions in
/// parallel. Run `r` uses start seed `derive_seed(seed, 2r)` and search seed
/// `derive_seed(seed, 2r + 1)`, so results do not depend on scheduling.
pub fn multi_start<T: Real>(
    n: usize,
    k: usize,
    obj: &Objective,
    starts: usize,
    seed: u64,
    params: &SearchParams,
) -> Result<MultiStartReport<T>> {
    if starts == 0 {
        return Err(Error::Precondition("need at least one start".into()));
    }
    if k != 2 && k != 3 {
        return Err(Error::Dimension {
            k,
            operation: "multi start",
        });
    }
    let warning = (n > search_cap(k)).then(|| {
        format!("n = {n} exceeds {}; maximizers need no more than k^3 vectors", search_cap(k))
    });
    let reports = (0..starts)
        .into_par_iter()
        .map(|r| {
            let r = r as u64;
            let s0 = random_uframe::<T>(n, k, rng::derive_seed(seed, 2 * r))?;
            let p = SearchParams {
                seed: rng::derive_seed(seed, 2 * r + 1),
                ..*params
            };
            local_search(&s0, obj, &p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in reports.iter().enumerate() {
        if obj.improves(r.final_value, reports[best].final_value) {
            best = i;
        }
    }
    Ok(MultiStartReport {
        n,
        k,
        seed,
        best,
        warning,
        reports,
    })
}

/// Matches `s` against the extremizer templates up to rotations, signs and
/// order of the vectors.
pub fn classify<T: Real>(s: &UFrame<T>) -> Classification {
    let tol = CLASSIFY_TOL;
    let k = s.k();
    let norms: Vec<f64> = s.vectors().iter().map(|v| norm(v).as_f64()).collect();
    let nonzero: Vec<usize> = (0..s.n()).filter(|&i| norms[i] > tol).collect();
    let unit: Vec<usize> = nonzero.iter().copied().filter(|&i| (norms[i] - 1.0).abs() <= tol).collect();

    if nonzero.len() == k && unit.len() == k {
        return Classification::Coordinate;
    }

    // collinear groups of nonzero vectors
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &nonzero {
        let vi = s.vector(i);
        match groups.iter_mut().find(|g| {
            let vj = s.vector(g[0]);
            (dot(vi, vj).as_f64().abs() / (norms[i] * norms[g[0]]) - 1.0).abs() <= tol
        }) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    if nonzero.len() == s.n() && groups.len() == k {
        let fits = groups.iter().all(|g| {
            let expected = 1.0 / (g.len() as f64).sqrt();
            g.iter().all(|&i| (norms[i] - expected).abs() <= tol)
        });
        if fits {
            if let Ok(partition) = Partition::new(groups.iter().map(Vec::len).collect()) {
                return Classification::CanonicalMin { partition };
            }
        }
    }

    // three vectors of length √(2/3) at 60° plus unit vectors and zeros
    let short: Vec<usize> = nonzero.iter().copied().filter(|&i| !unit.contains(&i)).collect();
    let hex_len = (2.0f64 / 3.0).sqrt();
    if k >= 2 && unit.len() == k - 2 && short.len() == 3 && short.iter().all(|&i| (norms[i] - hex_len).abs() <= tol) {
        let pairs_ok = [(0, 1), (0, 2), (1, 2)].iter().all(|&(a, b)| {
            let c = dot(s.vector(short[a]), s.vector(short[b])).as_f64().abs();
            (c - 1.0 / 3.0).abs() <= tol
        });
        if pairs_ok {
            return Classification::HexagonLift { lifts: k - 2 };
        }
    }
    Classification::Other
}

/// `vol(S̃) / vol(S)` and `√det A_{S̃}`: for projection volume a move improves
/// the whitened frame iff the first exceeds the second.
pub fn acceptance_ratio<T: Real>(s: &UFrame<T>, m: &Move<T>) -> Result<(T, T)> {
    let tilde = m.perturb(s)?;
    let ratio = geometry::volume(&tilde)? / geometry::volume(s)?;
    Ok((ratio, frame_operator(&tilde).det().sqrt()))
}
