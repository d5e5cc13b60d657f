//! Frames, unit decompositions of the identity, and their linear algebra.
//!
//! A [`Frame`] is an ordered list of `n` vectors spanning `R^k`. A [`UFrame`]
//! is a frame whose frame operator `Σ v_i ⊗ v_i` is the identity, i.e. the
//! orthogonal projection of an orthonormal basis of `R^n` onto `R^k`.

pub mod format;

use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, norm_sq, Mat, SymEigen};
use crate::rng;
use crate::scalar::Real;

/// Default certification tolerance for unit decompositions.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default eigenvalue floor below which whitening refuses a frame.
pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-12;
/// Relative singular value threshold for the spanning check.
pub const RANK_TOL: f64 = 1e-12;
/// Substitution formulas need `|v_i| < 1 - SUBSTITUTION_MARGIN`.
pub const SUBSTITUTION_MARGIN: f64 = 1e-9;

/// `n` vectors spanning `R^k`, with `n ≥ k ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T> {
    k: usize,
    vectors: Vec<Vec<T>>,
}

impl<T: Real> Frame<T> {
    /// Validates shape and spanning. Zero vectors are allowed as long as the
    /// remaining vectors span.
    pub fn new(k: usize, vectors: Vec<Vec<T>>) -> Result<Self> {
        let n = vectors.len();
        if k < 2 {
            return Err(Error::InvalidFrame(format!("dimension k = {k} must be at least 2")));
        }
        if n < k {
            return Err(Error::InvalidFrame(format!("n = {n} vectors cannot span R^{k}")));
        }
        if let Some(i) = vectors.iter().position(|v| v.len() != k) {
            return Err(Error::InvalidFrame(format!(
                "vector {i} has {} coordinates, expected {k}",
                vectors[i].len()
            )));
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidFrame("non-finite coordinate".into()));
        }
        let frame = Self { k, vectors };
        let eig = frame_operator(&frame).eigen();
        let largest = eig.max_value();
        let smallest = eig.min_value();
        // singular values of M are square roots of the eigenvalues of A_S
        let rel = T::tol(RANK_TOL);
        if !(largest > T::zero()) || !(smallest.max(T::zero()).sqrt() > rel * largest.sqrt()) {
            return Err(Error::InvalidFrame(format!(
                "vectors do not span R^{k} (singular value ratio {:e})",
                (smallest.max(T::zero()) / largest).sqrt().as_f64()
            )));
        }
        Ok(frame)
    }

    /// Infers `k` from the first vector.
    pub fn from_vectors(vectors: Vec<Vec<T>>) -> Result<Self> {
        let k = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidFrame("empty vector list".into()))?;
        Self::new(k, vectors)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    #[inline]
    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }

    #[inline]
    pub fn vector(&self, i: usize) -> &[T] {
        &self.vectors[i]
    }

    pub fn into_vectors(self) -> Vec<Vec<T>> {
        self.vectors
    }

    /// The `k × n` matrix with the frame vectors as columns.
    pub fn matrix(&self) -> Mat<T> {
        Mat::from_columns(&self.vectors)
    }

    /// Gram matrix `Γ = MᵀM`.
    pub fn gram(&self) -> Mat<T> {
        let n = self.n();
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let d = dot(&self.vectors[i], &self.vectors[j]);
                g[(i, j)] = d;
                g[(j, i)] = d;
            }
        }
        g
    }

    /// Applies a linear map to every vector.
    pub fn transform(&self, map: &Mat<T>) -> Result<Self> {
        if map.rows() != map.cols() || map.cols() != self.k {
            return Err(Error::InvalidFrame("transform has wrong shape".into()));
        }
        Self::new(self.k, self.vectors.iter().map(|v| map.mul_vec(v)).collect())
    }

    /// Frame with `v_i` replaced by `v`.
    pub fn with_vector(&self, i: usize, v: Vec<T>) -> Result<Self> {
        if i >= self.n() {
            return Err(Error::Range(format!("index {i} out of {}", self.n())));
        }
        let mut vectors = self.vectors.clone();
        vectors[i] = v;
        Self::new(self.k, vectors)
    }

    pub fn negated(&self) -> Self {
        Self {
            k: self.k,
            vectors: self.vectors.iter().map(|v| linalg::neg(v)).collect(),
        }
    }

    pub fn max_norm(&self) -> T {
        self.vectors.iter().map(|v| norm(v)).fold(T::zero(), T::max)
    }

    pub fn cast<U: Real>(&self) -> Frame<U> {
        Frame {
            k: self.k,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|x| U::lit(x.as_f64())).collect())
                .collect(),
        }
    }
}

/// A frame certified to satisfy `‖Σ v_i ⊗ v_i − I_k‖_max ≤ tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct UFrame<T> {
    frame: Frame<T>,
    tolerance: T,
}

impl<T: Real> UFrame<T> {
    /// Certifies `frame` at `tol`: identity residual, trace identity and the
    /// norm bound `|v_i| ≤ 1 + tol`.
    pub fn certify(frame: Frame<T>, tol: T) -> Result<Self> {
        let a = frame_operator(&frame);
        let k = frame.k();
        let residual = a.as_mat().sub(&Mat::identity(k)).max_abs();
        if !(residual <= tol) {
            return Err(Error::NotIsotropic {
                residual: residual.as_f64(),
                tol: tol.as_f64(),
            });
        }
        let trace: T = frame.vectors().iter().map(|v| norm_sq(v)).sum();
        let trace_residual = (trace - T::count(k)).abs();
        if !(trace_residual <= T::count(k) * tol) {
            return Err(Error::NotIsotropic {
                residual: trace_residual.as_f64(),
                tol: (T::count(k) * tol).as_f64(),
            });
        }
        let longest = frame.max_norm();
        if !(longest <= T::one() + tol) {
            return Err(Error::NotIsotropic {
                residual: (longest - T::one()).as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(Self {
            frame,
            tolerance: tol,
        })
    }

    /// Certifies at the default tolerance.
    pub fn certify_default(frame: Frame<T>) -> Result<Self> {
        Self::certify(frame, T::tol(DEFAULT_TOL))
    }

    pub fn from_vectors(vectors: Vec<Vec<T>>, tol: T) -> Result<Self> {
        Self::certify(Frame::from_vectors(vectors)?, tol)
    }

    #[inline]
    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    #[inline]
    pub fn as_frame(&self) -> &Frame<T> {
        &self.frame
    }

    pub fn into_frame(self) -> Frame<T> {
        self.frame
    }
}

impl<T> Deref for UFrame<T> {
    type Target = Frame<T>;

    fn deref(&self) -> &Frame<T> {
        &self.frame
    }
}

/// Symmetric `k × k` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T>(Mat<T>);

impl<T: Real> SymMatrix<T> {
    /// Symmetrises its input.
    pub fn new(m: Mat<T>) -> Self {
        let t = m.transpose();
        Self(m.add(&t).scaled(T::lit(0.5)))
    }

    #[inline]
    pub fn as_mat(&self) -> &Mat<T> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<T> {
        self.0
    }

    pub fn eigen(&self) -> SymEigen<T> {
        linalg::jacobi_eigen(&self.0)
    }

    pub fn det(&self) -> T {
        self.0.det()
    }

    pub fn trace(&self) -> T {
        self.0.trace()
    }
}

/// Frame operator `A_S = Σ v_i ⊗ v_i`.
pub fn frame_operator<T: Real>(s: &Frame<T>) -> SymMatrix<T> {
    let k = s.k();
    let mut a = Mat::zeros(k, k);
    for v in s.vectors() {
        for i in 0..k {
            for j in i..k {
                a[(i, j)] = a[(i, j)] + v[i] * v[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
        }
    }
    SymMatrix(a)
}

/// Whitener `B_S = A_S^{-1/2}`.
pub fn whitener<T: Real>(s: &Frame<T>, eigen_floor: T) -> Result<SymMatrix<T>> {
    linalg::inverse_sqrt(frame_operator(s).as_mat(), eigen_floor).map(SymMatrix)
}

/// Knobs for [`whiten_with`].
#[derive(Clone, Copy, Debug)]
pub struct WhitenOptions<T> {
    pub eigen_floor: T,
    pub tolerance: T,
}

impl<T: Real> Default for WhitenOptions<T> {
    fn default() -> Self {
        Self {
            eigen_floor: T::tol(DEFAULT_EIGEN_FLOOR),
            tolerance: T::tol(DEFAULT_TOL),
        }
    }
}

/// Maps a frame to the unit decomposition `{B_S v_i}`.
pub fn whiten<T: Real>(s: &Frame<T>) -> Result<UFrame<T>> {
    whiten_with(s, &WhitenOptions::default())
}

/// Ill-conditioned inputs leave an error of order `cond(A_S) · ε`; the result
/// is then whitened again, which is well conditioned, at most
/// [`REFINE_PASSES`] times.
pub fn whiten_with<T: Real>(s: &Frame<T>, opts: &WhitenOptions<T>) -> Result<UFrame<T>> {
    let mut frame = apply_whitener(s, opts.eigen_floor)?;
    for _ in 0..REFINE_PASSES {
        if verify_uframe(&frame, opts.tolerance).pass {
            break;
        }
        frame = apply_whitener(&frame, opts.eigen_floor)?;
    }
    UFrame::certify(frame, opts.tolerance)
}

/// Extra whitening passes allowed in [`whiten_with`].
pub const REFINE_PASSES: usize = 2;

fn apply_whitener<T: Real>(s: &Frame<T>, eigen_floor: T) -> Result<Frame<T>> {
    let b = whitener(s, eigen_floor)?;
    let vectors = s.vectors().iter().map(|v| b.as_mat().mul_vec(v)).collect();
    Frame::new(s.k(), vectors)
}

/// Residuals of the equivalent characterisations of a unit decomposition.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct GramCertificate<T> {
    pub n: usize,
    pub k: usize,
    pub tolerance: T,
    /// `Γ = MᵀM`, row by row.
    pub gram: Vec<Vec<T>>,
    /// `‖Σ v_i ⊗ v_i − I_k‖_max`
    pub frame_operator_residual: T,
    /// `‖Γ² − Γ‖_max`
    pub idempotency_residual: T,
    /// `‖Γᵀ − Γ‖_max`
    pub symmetry_residual: T,
    /// `|tr Γ − k|`
    pub trace_residual: T,
    /// `‖M Mᵀ − I_k‖_max`, rows of `M` taken as vectors of `R^n`.
    pub row_orthonormality_residual: T,
    pub pass: bool,
}

impl<T: Real> GramCertificate<T> {
    /// Pass flags for the frame-operator, Gram-projection and
    /// orthonormal-rows conditions.
    pub fn conditions(&self) -> [bool; 3] {
        let tol = self.tolerance;
        let k = T::count(self.k);
        [
            self.frame_operator_residual <= tol,
            self.idempotency_residual <= tol
                && self.symmetry_residual <= tol
                && self.trace_residual <= k * tol,
            self.row_orthonormality_residual <= tol,
        ]
    }

    /// Whether all characterisations reach the same verdict.
    pub fn consistent(&self) -> bool {
        let c = self.conditions();
        c.iter().all(|&x| x == c[0])
    }
}

pub fn verify_uframe<T: Real>(s: &Frame<T>, tol: T) -> GramCertificate<T> {
    let k = s.k();
    let gram = s.gram();
    let frame_operator_residual = frame_operator(s).as_mat().sub(&Mat::identity(k)).max_abs();
    let idempotency_residual = gram.matmul(&gram).sub(&gram).max_abs();
    let symmetry_residual = gram.asymmetry();
    let trace_residual = (gram.trace() - T::count(k)).abs();

    let m = s.matrix();
    let mut rows_residual = T::zero();
    for a in 0..k {
        for b in 0..k {
            let d = dot(m.row(a), m.row(b));
            let target = if a == b { T::one() } else { T::zero() };
            rows_residual = rows_residual.max((d - target).abs());
        }
    }

    let mut cert = GramCertificate {
        n: s.n(),
        k,
        tolerance: tol,
        gram: gram.to_rows(),
        frame_operator_residual,
        idempotency_residual,
        symmetry_residual,
        trace_residual,
        row_orthonormality_residual: rows_residual,
        pass: false,
    };
    cert.pass = cert.conditions().iter().all(|&c| c);
    cert
}

/// Orthogonal `n × n` matrix whose first `k` rows are the rows of `M`.
///
/// Column `i` truncated to its first `k` entries is `v_i`, so `v_i` is the
/// projection of the `i`-th vector of an orthonormal basis of `R^n`.
pub fn complete_to_orthogonal<T: Real>(s: &UFrame<T>) -> Result<Mat<T>> {
    let n = s.n();
    let m = s.matrix();
    let rows = m.to_rows();
    let added = linalg::extend_orthonormal(&rows, n, T::tol(1e-8))?;
    let mut all = rows;
    all.extend(added);
    Ok(Mat::from_rows(&all))
}

/// Result of projecting a unit decomposition onto a hyperplane.
#[derive(Clone, Debug)]
pub enum Projection<T> {
    /// `k ≥ 3`: an `(n, k−1)` unit decomposition in hyperplane coordinates.
    Frame(UFrame<T>),
    /// `k = 2`: the hyperplane is a line; one coordinate per vector.
    Line(Vec<T>),
}

/// Orthonormal basis of the hyperplane orthogonal to a unit `direction`.
pub fn hyperplane_basis<T: Real>(direction: &[T]) -> Result<Vec<Vec<T>>> {
    linalg::extend_orthonormal(&[direction.to_vec()], direction.len(), T::tol(1e-8))
}

/// Projects every vector onto `direction^⊥` and expresses the result in an
/// orthonormal basis of that hyperplane.
pub fn project_frame<T: Real>(s: &UFrame<T>, direction: &[T]) -> Result<Projection<T>> {
    if direction.len() != s.k() {
        return Err(Error::InvalidFrame("direction has wrong dimension".into()));
    }
    if !((norm(direction) - T::one()).abs() <= T::tol(DEFAULT_TOL)) {
        return Err(Error::Precondition("projection direction must be a unit vector".into()));
    }
    let basis = hyperplane_basis(direction)?;
    let coords: Vec<Vec<T>> = s
        .vectors()
        .iter()
        .map(|v| basis.iter().map(|b| dot(b, v)).collect())
        .collect();
    if s.k() == 2 {
        return Ok(Projection::Line(coords.into_iter().map(|c| c[0]).collect()));
    }
    let frame = Frame::new(s.k() - 1, coords)?;
    let tol = s.tolerance() * T::lit(10.0);
    Ok(Projection::Frame(UFrame::certify(frame, tol)?))
}

/// Embeds in `R^{k+1}` and appends `e_{k+1}`.
pub fn lift<T: Real>(s: &UFrame<T>) -> UFrame<T> {
    let k = s.k();
    let mut vectors: Vec<Vec<T>> = s
        .vectors()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.push(T::zero());
            w
        })
        .collect();
    vectors.push(linalg::unit_vector(k + 1, k));
    let frame = Frame::new(k + 1, vectors).expect("lift of a frame spans");
    UFrame::certify(frame, s.tolerance()).expect("lift of a unit decomposition is one")
}

/// Random unit decomposition: the first `k` rows of an orthogonalised
/// `n × n` Gaussian matrix drawn from `seed`.
pub fn random_uframe<T: Real>(n: usize, k: usize, seed: u64) -> Result<UFrame<T>> {
    if k < 2 || n < k {
        return Err(Error::Range(format!("need n ≥ k ≥ 2, got n = {n}, k = {k}")));
    }
    let mut r = rng::seeded(seed);
    loop {
        let rows: Vec<Vec<f64>> = (0..n).map(|_| rng::gaussian_vec(&mut r, n)).collect();
        // a singular Gaussian draw has probability zero; redraw just in case
        let Ok(q) = linalg::orthonormalize_rows(&Mat::from_rows(&rows)) else {
            continue;
        };
        let vectors: Vec<Vec<T>> = (0..n)
            .map(|i| (0..k).map(|a| T::lit(q[(a, i)])).collect())
            .collect();
        let frame = Frame::new(k, vectors)?;
        return UFrame::certify(frame, T::tol(DEFAULT_TOL));
    }
}

/// `det(I_k + sign · v ⊗ v) = 1 + sign · |v|²`.
pub fn rank_one_det<T: Real>(v: &[T], sign: T) -> T {
    T::one() + sign * norm_sq(v)
}

/// `B_{S∖i} x` for a unit decomposition, where `B_{S∖i} = (I − v_i ⊗ v_i)^{-1/2}`
/// stretches the `v_i` direction by `1/√(1 − |v_i|²)`.
pub fn deleted_whitener_apply<T: Real>(s: &UFrame<T>, i: usize, x: &[T]) -> Result<Vec<T>> {
    let vi = s.vector(i);
    let len_sq = norm_sq(vi);
    let limit = T::one() - T::tol(SUBSTITUTION_MARGIN);
    if !(len_sq.sqrt() < limit) {
        return Err(Error::Precondition(format!(
            "|v_{i}| = {} must be below 1 for the deleted whitener",
            len_sq.sqrt()
        )));
    }
    if len_sq == T::zero() {
        return Ok(x.to_vec());
    }
    let stretch = T::one() / (T::one() - len_sq).sqrt() - T::one();
    let c = dot(x, vi) / len_sq;
    Ok(linalg::axpy(x, stretch * c, vi))
}

/// Determinant of the whitener of the frame obtained by substituting
/// `v_i → v`, via `√((1 + |B_{S∖i} v_i|²) / (1 + |B_{S∖i} v|²))`.
pub fn det_after_substitution<T: Real>(s: &UFrame<T>, i: usize, v: &[T]) -> Result<T> {
    if i >= s.n() {
        return Err(Error::Range(format!("index {i} out of {}", s.n())));
    }
    if v.len() != s.k() {
        return Err(Error::InvalidFrame("substituted vector has wrong dimension".into()));
    }
    let old = deleted_whitener_apply(s, i, s.vector(i))?;
    let new = deleted_whitener_apply(s, i, v)?;
    Ok(((T::one() + norm_sq(&old)) / (T::one() + norm_sq(&new))).sqrt())
}

/// One term `v_i → v_i + scale · direction` of a perturbation.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation<T> {
    pub index: usize,
    pub direction: Vec<T>,
    pub scale: T,
}

/// First-order predictor `1 + Σ t_i ⟨x_i, v_i⟩` of `√det A` after the
/// perturbation.
pub fn first_order_det<T: Real>(s: &UFrame<T>, perturbations: &[Perturbation<T>]) -> T {
    perturbations.iter().fold(T::one(), |acc, p| {
        acc + p.scale * dot(&p.direction, s.vector(p.index))
    })
}

/// Applies perturbations without whitening.
pub fn perturbed<T: Real>(s: &Frame<T>, perturbations: &[Perturbation<T>]) -> Result<Frame<T>> {
    let mut vectors = s.vectors().to_vec();
    for p in perturbations {
        if p.index >= vectors.len() {
            return Err(Error::Range(format!("index {} out of {}", p.index, vectors.len())));
        }
        vectors[p.index] = linalg::axpy(&vectors[p.index], p.scale, &p.direction);
    }
    Frame::new(s.k(), vectors)
}
