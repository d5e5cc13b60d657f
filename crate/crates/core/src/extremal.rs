//! Extremal constants, extremizer frames and the local optimality
//! diagnostics for candidate maximizers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{Frame, UFrame};
use crate::geometry::{self, star_belt_rest};
use crate::linalg::{dot, norm, norm_sq, unit_vector};
use crate::scalar::Real;

/// Largest `n` accepted by [`constants`].
pub const MAX_ORACLE_N: usize = 60;
/// Absolute tolerance on necessary-condition residuals.
pub const NC_TOL: f64 = 1e-9;

/// Parts `d_1 ≥ … ≥ d_k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    pub parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Range("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// The partition of `n` into `k` parts differing by at most one.
    pub fn near_equal(n: usize, k: usize) -> Result<Self> {
        check_range(n, k)?;
        let (q, r) = (n / k, n % k);
        Ok(Self {
            parts: (0..k).map(|i| if i < r { q + 1 } else { q }).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn product(&self) -> u64 {
        self.parts.iter().map(|&d| d as u64).product()
    }

    pub fn spread(&self) -> usize {
        self.parts[0] - self.parts[self.parts.len() - 1]
    }
}

fn check_range(n: usize, k: usize) -> Result<()> {
    if k < 2 || n < k || n > MAX_ORACLE_N {
        return Err(Error::Range(format!(
            "need {MAX_ORACLE_N} ≥ n ≥ k ≥ 2, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Calls `f` on every partition of `n` into `k` nonincreasing positive parts.
pub fn for_each_partition(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(left: usize, slots: usize, cap: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slots == 0 {
            if left == 0 {
                f(buf);
            }
            return;
        }
        // the remaining slots each need at least one
        let hi = cap.min(left + 1 - slots);
        let lo = left.div_ceil(slots);
        for d in (lo..=hi).rev() {
            buf.push(d);
            rec(left - d, slots - 1, d, buf, f);
            buf.pop();
        }
    }
    if k == 0 || n < k {
        return;
    }
    let mut buf = Vec::with_capacity(k);
    rec(n, k, n, &mut buf, &mut f);
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalConstants {
    pub n: usize,
    pub k: usize,
    pub best_partition: Partition,
    /// `Π d_i` for the best partition.
    pub product: u64,
    /// `(2^k / k!) / √Π d_i`.
    pub min_projection_volume: f64,
    /// `2^k √Π d_i`.
    pub max_section_volume: f64,
    /// `⌈n/k⌉^r ⌊n/k⌋^(k−r)` with `r = n − k⌊n/k⌋`.
    pub closed_form_product: u64,
    pub partitions_checked: usize,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Volume of the cross-polytope `♢^k`.
pub fn cross_polytope_volume(k: usize) -> f64 {
    2f64.powi(k as i32) / factorial(k)
}

/// Extremal constants from a brute-force maximisation of `Π d_i` over all
/// partitions of `n` into `k` parts.
pub fn constants(n: usize, k: usize) -> Result<ExtremalConstants> {
    check_range(n, k)?;
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut checked = 0;
    for_each_partition(n, k, |parts| {
        checked += 1;
        let p: u64 = parts.iter().map(|&d| d as u64).product();
        if best.as_ref().is_none_or(|(b, _)| p > *b) {
            best = Some((p, parts.to_vec()));
        }
    });
    let (product, parts) = best.expect("n ≥ k admits a partition");
    let q = (n / k) as u64;
    let r = (n % k) as u32;
    let ceil = if r > 0 { q + 1 } else { q };
    Ok(ExtremalConstants {
        n,
        k,
        best_partition: Partition { parts },
        product,
        min_projection_volume: cross_polytope_volume(k) / (product as f64).sqrt(),
        max_section_volume: 2f64.powi(k as i32) * (product as f64).sqrt(),
        closed_form_product: ceil.pow(r) * q.pow(k as u32 - r),
        partitions_checked: checked,
    })
}

/// Group `j` of size `d_j` consists of the vectors `±e_j / √d_j`, with groups
/// taken from the near-equal partition in index order.
pub fn canonical_min_frame<T: Real>(n: usize, k: usize, signs: &[i8]) -> Result<UFrame<T>> {
    if signs.len() != n {
        return Err(Error::Precondition(format!("need {n} signs, got {}", signs.len())));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::Precondition("signs must be ±1".into()));
    }
    let partition = Partition::near_equal(n, k)?;
    let mut vectors = Vec::with_capacity(n);
    for (j, &d) in partition.parts.iter().enumerate() {
        let len = T::one() / T::count(d).sqrt();
        for _ in 0..d {
            let sign = T::lit(f64::from(signs[vectors.len()]));
            let mut v = vec![T::zero(); k];
            v[j] = sign * len;
            vectors.push(v);
        }
    }
    UFrame::certify(Frame::new(k, vectors)?, T::tol(1e-12))
}

/// `{e_1, …, e_k, 0, …, 0}`.
pub fn coordinate_max_frame<T: Real>(n: usize, k: usize) -> Result<UFrame<T>> {
    if k < 2 || n < k {
        return Err(Error::Range(format!("need n ≥ k ≥ 2, got n = {n}, k = {k}")));
    }
    let vectors = (0..n)
        .map(|i| if i < k { unit_vector(k, i) } else { vec![T::zero(); k] })
        .collect();
    UFrame::certify(Frame::new(k, vectors)?, T::tol(1e-12))
}

/// Three vectors of length `√(2/3)` at angles 0°, 60° and 120°.
pub fn hexagon_frame<T: Real>() -> UFrame<T> {
    let r = (T::lit(2.0) / T::lit(3.0)).sqrt();
    let half = T::lit(0.5);
    let h = T::lit(3.0).sqrt() * half;
    let vectors = vec![vec![r, T::zero()], vec![r * half, r * h], vec![-r * half, r * h]];
    UFrame::certify(Frame::new(2, vectors).expect("hexagon spans"), T::tol(1e-12)).expect("hexagon is a uframe")
}

/// Largest `n` a maximizer search needs in dimension `k`.
pub fn search_cap(k: usize) -> usize {
    k * k * k
}

#[derive(Clone, Debug, Serialize)]
pub struct TCheck {
    pub t_boundary: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexCondition {
    pub index: usize,
    pub norm_sq: f64,
    pub star_ratio: f64,
    pub residual: f64,
    /// Absent for unit vectors, where the bound is vacuous.
    pub t_check: Option<TCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessaryConditionReport {
    pub vertices: Vec<VertexCondition>,
    /// Nonzero vectors that are not vertices of the hull.
    pub non_vertices: Vec<usize>,
    pub simplicial: bool,
    pub belt_sum: f64,
    pub max_residual: f64,
    pub local_pass: bool,
    pub t_pass: bool,
}

/// Checks `|v|² = vol N_P(v) / vol P` at every vertex together with
/// simpliciality, and the bounds `x/(√(n−1)·√(1−x²)) ≤ t ≤ x/(1+x)`,
/// `x = √(1−|v|²)`, on the rest boundary parameter.
pub fn necessary_condition<T: Real>(s: &UFrame<T>) -> Result<NecessaryConditionReport> {
    let p = geometry::hull(s)?;
    let vol = p.volume.as_f64();
    let n = s.n() as f64;
    let tol = NC_TOL;
    let mut vertices = Vec::new();
    let mut non_vertices = Vec::new();
    for (i, v) in s.vectors().iter().enumerate() {
        let nsq = norm_sq(v).as_f64();
        if nsq == 0.0 {
            continue;
        }
        if p.vertex_of(i).is_none() {
            non_vertices.push(i);
            continue;
        }
        let d = star_belt_rest(&p, v, s)?;
        let ratio = d.vol_star.as_f64() / vol;
        let t = d.t_boundary.as_f64();
        let t_check = (nsq < 1.0 - tol).then(|| {
            let x = (1.0 - nsq).sqrt();
            let lower = x / ((n - 1.0).sqrt() * nsq.sqrt());
            let upper = x / (1.0 + x);
            TCheck {
                t_boundary: t,
                lower,
                upper,
                pass: t >= lower - tol && t <= upper + tol,
            }
        });
        vertices.push(VertexCondition {
            index: i,
            norm_sq: nsq,
            star_ratio: ratio,
            residual: (nsq - ratio).abs(),
            t_check,
        });
    }

    // one term per antipodal vertex pair
    let mut seen = vec![false; p.vertices.len()];
    let mut belt_sum = 0.0;
    for iv in 0..p.vertices.len() {
        if seen[iv] {
            continue;
        }
        seen[iv] = true;
        if let Some(a) = p.antipode(iv) {
            seen[a] = true;
        }
        let d = star_belt_rest(&p, &p.vertices[iv], s)?;
        belt_sum += d.vol_star.as_f64() / vol;
    }

    let simplicial = p.is_simplicial();
    let max_residual = vertices.iter().map(|v| v.residual).fold(0.0, f64::max);
    Ok(NecessaryConditionReport {
        local_pass: simplicial && max_residual < tol && non_vertices.is_empty(),
        t_pass: vertices.iter().all(|v| v.t_check.as_ref().is_none_or(|c| c.pass)),
        vertices,
        non_vertices,
        simplicial,
        belt_sum,
        max_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizerSanity {
    /// `max |v_j| / min |v_i|`.
    pub norm_ratio: f64,
    /// Size of the largest family of mutually collinear vectors.
    pub max_collinear: usize,
    /// `⌊n/k⌋ + 1`.
    pub collinear_cap: usize,
    pub pass: bool,
}

/// Structural checks satisfied by minimizers: norms within a factor `√2` of
/// each other and at most `⌊n/k⌋ + 1` collinear vectors.
pub fn minimizer_sanity<T: Real>(s: &Frame<T>, tol: f64) -> MinimizerSanity {
    let norms: Vec<f64> = s.vectors().iter().map(|v| norm(v).as_f64()).collect();
    let max = norms.iter().copied().fold(0.0, f64::max);
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let mut max_collinear = 0;
    for (i, a) in s.vectors().iter().enumerate() {
        if norms[i] == 0.0 {
            continue;
        }
        let count = s
            .vectors()
            .iter()
            .zip(&norms)
            .filter(|(b, &nb)| nb > 0.0 && (dot(a, b).as_f64().abs() / (norms[i] * nb) - 1.0).abs() <= tol)
            .count();
        max_collinear = max_collinear.max(count);
    }
    let cap = s.n() / s.k() + 1;
    MinimizerSanity {
        norm_ratio: max / min,
        max_collinear,
        collinear_cap: cap,
        pass: max <= 2f64.sqrt() * min + tol && max_collinear <= cap,
    }
}
