//! ℓ1 gauge of the projected cross-polytope:
//! `min Σ|λ_i|` subject to `Σ λ_i v_i = x`, solved by a two-phase dense
//! simplex method with Bland's rule on the split `λ = λ⁺ − λ⁻`.
//!
//! The dual program is `max ⟨y, x⟩` subject to `|⟨y, v_i⟩| ≤ 1`, so the
//! optimal `y` is an outer normal of a face of `co{±v_i}` through `x / gauge`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::linalg::dot;
use crate::scalar::Real;

#[derive(Clone, Debug, Serialize)]
pub struct GaugeSolution<T> {
    pub value: T,
    /// Primal coefficients `λ_i`.
    pub coefficients: Vec<T>,
    /// Dual certificate `y`.
    pub dual: Vec<T>,
    /// Largest of the primal residual, dual infeasibility and duality gap.
    pub residual: T,
}

struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// `rows` constraint rows then the objective row; last column is the rhs.
    a: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Real> Tableau<T> {
    fn at(&self, r: usize, c: usize) -> T {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> T {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.a[pr * w + c] = self.a[pr * w + c] / p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == T::zero() {
                continue;
            }
            for c in 0..w {
                let v = self.a[pr * w + c];
                self.a[r * w + c] = self.a[r * w + c] - f * v;
            }
        }
        self.basis[pr] = pc;
    }

    /// Sets the objective row to reduced costs for `cost`.
    fn price(&mut self, cost: &[T]) {
        let w = self.cols + 1;
        let obj = self.rows * w;
        self.a[obj..obj + self.cols].copy_from_slice(&cost[..self.cols]);
        self.a[obj + self.cols] = T::zero();
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb == T::zero() {
                continue;
            }
            for c in 0..w {
                let v = self.a[r * w + c];
                self.a[obj + c] = self.a[obj + c] - cb * v;
            }
        }
    }

    /// Minimises over columns `< allowed` with Bland's rule on entering and
    /// leaving variables, stopping early once the objective is at most
    /// `floor`. Both programs here are bounded below by zero, so an entering
    /// column without a positive entry only arises from rounding and is
    /// skipped.
    fn optimise(&mut self, allowed: usize, eps: T, floor: T, cap: usize) -> Result<()> {
        for _ in 0..cap {
            if -self.rhs(self.rows) <= floor {
                return Ok(());
            }
            let mut step = None;
            for pc in (0..allowed).filter(|&c| self.at(self.rows, c) < -eps) {
                let mut best: Option<(T, usize)> = None;
                for r in 0..self.rows {
                    let a = self.at(r, pc);
                    if a > eps {
                        let ratio = self.rhs(r) / a;
                        let better = match best {
                            None => true,
                            Some((q, br)) => {
                                ratio < q - eps || (ratio <= q + eps && self.basis[r] < self.basis[br])
                            }
                        };
                        if better {
                            best = Some((ratio, r));
                        }
                    }
                }
                if let Some((_, pr)) = best {
                    step = Some((pr, pc));
                    break;
                }
            }
            match step {
                Some((pr, pc)) => self.pivot(pr, pc),
                None => return Ok(()),
            }
        }
        Err(Error::Numerical(format!("simplex exceeded {cap} pivots")))
    }
}

/// Full solution of the gauge program with its dual certificate.
pub fn gauge_l1_solution<T: Real>(s: &Frame<T>, x: &[T]) -> Result<GaugeSolution<T>> {
    let (n, k) = (s.n(), s.k());
    if x.len() != k {
        return Err(Error::InvalidFrame(format!("point has {} coordinates, expected {k}", x.len())));
    }
    let scale_ref = s.max_norm().max(x.iter().fold(T::zero(), |m, v| m.max(v.abs())));
    let eps = T::tol(1e-12) * scale_ref.max(T::one());

    // columns: λ⁺ (n), λ⁻ (n), artificials (k)
    let cols = 2 * n + k;
    let w = cols + 1;
    let flip: Vec<T> = x.iter().map(|&xi| if xi < T::zero() { -T::one() } else { T::one() }).collect();
    let mut a = vec![T::zero(); (k + 1) * w];
    for r in 0..k {
        for (i, v) in s.vectors().iter().enumerate() {
            a[r * w + i] = flip[r] * v[r];
            a[r * w + n + i] = -flip[r] * v[r];
        }
        a[r * w + 2 * n + r] = T::one();
        a[r * w + cols] = flip[r] * x[r];
    }
    let mut t = Tableau {
        rows: k,
        cols,
        a,
        basis: (2 * n..cols).collect(),
    };
    let cap = 50 * cols;

    let phase1: Vec<T> = (0..cols).map(|c| if c >= 2 * n { T::one() } else { T::zero() }).collect();
    t.price(&phase1);
    t.optimise(cols, eps, eps * T::count(k), cap)?;
    if -t.rhs(k) > eps * T::count(k) {
        return Err(Error::Numerical("ℓ1 program infeasible: frame does not span".into()));
    }
    // drive remaining artificials out of the basis
    for r in 0..k {
        if t.basis[r] >= 2 * n {
            let pc = (0..2 * n)
                .filter(|&c| t.at(r, c).abs() > eps)
                .max_by(|&p, &q| t.at(r, p).abs().partial_cmp(&t.at(r, q).abs()).unwrap_or(std::cmp::Ordering::Equal));
            match pc {
                Some(pc) => t.pivot(r, pc),
                None => return Err(Error::Numerical("redundant constraint in ℓ1 program".into())),
            }
        }
    }

    let phase2: Vec<T> = (0..cols).map(|c| if c < 2 * n { T::one() } else { T::zero() }).collect();
    t.price(&phase2);
    t.optimise(2 * n, eps, T::neg_infinity(), cap)?;

    let mut coefficients = vec![T::zero(); n];
    for r in 0..k {
        let b = t.basis[r];
        let val = t.rhs(r);
        if b < n {
            coefficients[b] = coefficients[b] + val;
        } else if b < 2 * n {
            coefficients[b - n] = coefficients[b - n] - val;
        }
    }
    // reduced cost of artificial r is -y_r (in flipped rows)
    let dual: Vec<T> = (0..k).map(|r| -t.at(k, 2 * n + r) * flip[r]).collect();
    let value = coefficients.iter().map(|c| c.abs()).sum::<T>();

    let mut residual = T::zero();
    for r in 0..k {
        let lhs = s.vectors().iter().zip(&coefficients).map(|(v, &c)| c * v[r]).sum::<T>();
        residual = residual.max((lhs - x[r]).abs());
    }
    for v in s.vectors() {
        residual = residual.max(dot(&dual, v).abs() - T::one());
    }
    residual = residual.max((dot(&dual, x) - value).abs());
    if !(residual <= T::tol(1e-8) * scale_ref.max(T::one()).max(value)) {
        return Err(Error::Numerical(format!("ℓ1 program residual {residual:?} too large")));
    }
    Ok(GaugeSolution {
        value,
        coefficients,
        dual,
        residual,
    })
}

/// `‖x‖_P`, the least `Σ|λ_i|` with `Σ λ_i v_i = x`; `x ∈ co{±v_i}` iff the
/// value is at most 1.
pub fn gauge_l1<T: Real>(s: &Frame<T>, x: &[T]) -> Result<T> {
    Ok(gauge_l1_solution(s, x)?.value)
}
