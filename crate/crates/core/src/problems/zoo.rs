//! Concrete stochastic functions of the instance zoo.

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::oracles::{InnerProblem, InnerSet};
use crate::problem::{Scenario, StochasticFunction};
use crate::Scalar;

use super::affine::AffineMatrix;

/// `F(x, ξ) = ‖x‖`.
#[derive(Clone, Debug)]
pub struct NormSharp {
    pub n: usize,
}

impl<T: Scalar> StochasticFunction<T> for NormSharp {
    fn name(&self) -> &str {
        "norm_sharp"
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn lipschitz_bound(&self) -> T {
        T::one()
    }
    fn eval(&self, x: &[T], _xi: &Scenario<T>) -> Result<T> {
        check_dim(self.n, x.len())?;
        Ok(linalg::norm(x))
    }
}

/// `F(x, ξ) = ‖x‖₁ - ‖x‖`, nonconvex with minimum 0 on the coordinate axes.
#[derive(Clone, Debug)]
pub struct L1MinusL2 {
    pub n: usize,
}

impl<T: Scalar> StochasticFunction<T> for L1MinusL2 {
    fn name(&self) -> &str {
        "l1_minus_l2"
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn lipschitz_bound(&self) -> T {
        T::of_usize(self.n).sqrt() + T::one()
    }
    fn eval(&self, x: &[T], _xi: &Scenario<T>) -> Result<T> {
        check_dim(self.n, x.len())?;
        Ok(linalg::norm_l1(x) - linalg::norm(x))
    }
}

/// `F(x, ξ) = (1 - max{x₁, 0})²` on a box whose first upper bound is `hi1`.
#[derive(Clone, Debug)]
pub struct CuspBox {
    pub n: usize,
    pub hi1: f64,
}

impl<T: Scalar> StochasticFunction<T> for CuspBox {
    fn name(&self) -> &str {
        "cusp_box"
    }
    fn dim(&self) -> usize {
        self.n
    }
    /// `sup |d/dx₁| = 2 max(1, hi₁ - 1)` over `x₁ <= hi₁`.
    fn lipschitz_bound(&self) -> T {
        T::of(2.0 * (self.hi1 - 1.0).max(1.0))
    }
    fn eval(&self, x: &[T], _xi: &Scenario<T>) -> Result<T> {
        check_dim(self.n, x.len())?;
        let s = T::one() - x[0].max(T::zero());
        Ok(s * s)
    }
}

/// `F(x, ξ) = maxᵢ aᵢ(ξ)ᵀx + bᵢ(ξ)`.
#[derive(Clone, Debug)]
pub struct MaxAffine<T> {
    pub a: AffineMatrix<T>,
    pub b: AffineMatrix<T>,
    pub lipschitz: T,
}

impl<T: Scalar> StochasticFunction<T> for MaxAffine<T> {
    fn name(&self) -> &str {
        "max_affine"
    }
    fn dim(&self) -> usize {
        self.a.cols
    }
    fn lipschitz_bound(&self) -> T {
        self.lipschitz
    }
    fn eval(&self, x: &[T], xi: &Scenario<T>) -> Result<T> {
        check_dim(self.a.cols, x.len())?;
        let ax = linalg::mat_vec(&self.a.at(xi), self.a.rows, x);
        let b = self.b.at(xi);
        Ok(ax.iter().zip(&b).map(|(&u, &v)| u + v).fold(T::neg_infinity(), T::max))
    }
}

/// `F(x, ξ) = min_{y ∈ [-1, 1]^m} ½yᵀQ(ξ)y + (A(ξ)x + b(ξ))ᵀy + c(ξ)ᵀx + w(‖x‖₁ - ‖x‖)`
/// with `Q(ξ) = M(ξ)ᵀM(ξ) + shift·I`.
#[derive(Clone, Debug)]
pub struct TwoStageQp<T> {
    pub a: AffineMatrix<T>,
    pub b: AffineMatrix<T>,
    pub c: AffineMatrix<T>,
    pub mfac: AffineMatrix<T>,
    pub shift: T,
    pub outer_weight: T,
    pub lipschitz: T,
}

impl<T: Scalar> TwoStageQp<T> {
    pub fn n(&self) -> usize {
        self.a.cols
    }

    pub fn m(&self) -> usize {
        self.a.rows
    }

    /// Dense row-major `Q(ξ)`.
    pub fn q_matrix(&self, xi: &Scenario<T>) -> Vec<T> {
        let m = self.m();
        let mm = self.mfac.at(xi);
        let mut q = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..m {
                let mut s = if i == j { self.shift } else { T::zero() };
                for k in 0..self.mfac.rows {
                    s = s + mm[k * m + i] * mm[k * m + j];
                }
                q[i * m + j] = s;
            }
        }
        q
    }

    /// Linear coefficient `A(ξ)x + b(ξ)` of the inner objective.
    pub fn linear_term(&self, x: &[T], xi: &Scenario<T>) -> Vec<T> {
        linalg::add(&linalg::mat_vec(&self.a.at(xi), self.m(), x), &self.b.at(xi))
    }

    /// `y`-independent part `c(ξ)ᵀx + w(‖x‖₁ - ‖x‖)`.
    pub fn outer_term(&self, x: &[T], xi: &Scenario<T>) -> T {
        let mut v = linalg::dot(&self.c.at(xi), x);
        if self.outer_weight != T::zero() {
            v = v + self.outer_weight * (linalg::norm_l1(x) - linalg::norm(x));
        }
        v
    }
}

impl<T: Scalar> StochasticFunction<T> for TwoStageQp<T> {
    fn name(&self) -> &str {
        "two_stage_qp"
    }
    fn dim(&self) -> usize {
        self.n()
    }
    fn lipschitz_bound(&self) -> T {
        self.lipschitz
    }
    fn has_closed_form(&self) -> bool {
        false
    }
    fn eval(&self, _x: &[T], _xi: &Scenario<T>) -> Result<T> {
        Err(Error::Unsupported(
            "two_stage_qp is defined through an inner minimization".into(),
        ))
    }
}

impl<T: Scalar> InnerProblem<T> for TwoStageQp<T> {
    fn outer_dim(&self) -> usize {
        self.n()
    }
    fn inner_dim(&self) -> usize {
        self.m()
    }
    fn feasible_set(&self, _xi: &Scenario<T>) -> InnerSet<T> {
        InnerSet::Box {
            lo: vec![-T::one(); self.m()],
            hi: vec![T::one(); self.m()],
        }
    }
    fn objective(&self, x: &[T], y: &[T], xi: &Scenario<T>) -> T {
        let q = self.q_matrix(xi);
        let qy = linalg::mat_vec(&q, self.m(), y);
        T::of(0.5) * linalg::dot(y, &qy) + linalg::dot(&self.linear_term(x, xi), y) + self.outer_term(x, xi)
    }
    fn grad_y(&self, x: &[T], y: &[T], xi: &Scenario<T>) -> Vec<T> {
        let q = self.q_matrix(xi);
        linalg::add(&linalg::mat_vec(&q, self.m(), y), &self.linear_term(x, xi))
    }
    /// Gershgorin bound on `λ_max(Q(ξ))`.
    fn smoothness(&self, xi: &Scenario<T>) -> T {
        let m = self.m();
        let q = self.q_matrix(xi);
        (0..m)
            .map(|i| q[i * m..(i + 1) * m].iter().map(|v| v.abs()).sum::<T>())
            .fold(self.shift, T::max)
    }
    fn curvature(&self, _xi: &Scenario<T>) -> T {
        self.shift
    }
}

/// `F̂(x, y, ξ) = (A(ξ)x)ᵀy - ½‖y‖²` over the ball of radius `R`.
///
/// Instantaneous: `F(x, ξ) = max_y F̂`, a Huber function of `‖A(ξ)x‖`.
/// Ergodic: `F(x, ξ) = F̂(x, y*(x), ξ)` with `y*(x) = P_R(Ā x)`, `Ā = E{A(ξ)}`.
#[derive(Clone, Debug)]
pub struct Minimax<T> {
    pub a: AffineMatrix<T>,
    pub a_mean: Vec<T>,
    pub radius: T,
    pub ergodic: bool,
    pub lipschitz: T,
}

impl<T: Scalar> Minimax<T> {
    pub fn n(&self) -> usize {
        self.a.cols
    }

    pub fn m(&self) -> usize {
        self.a.rows
    }

    /// `max_{‖y‖ <= R} vᵀy - ½‖y‖²`.
    pub fn huber(&self, v: &[T]) -> T {
        let nv = linalg::norm(v);
        if nv <= self.radius {
            T::of(0.5) * nv * nv
        } else {
            self.radius * nv - T::of(0.5) * self.radius * self.radius
        }
    }

    fn project(&self, v: &[T]) -> Vec<T> {
        let nv = linalg::norm(v);
        if nv <= self.radius {
            v.to_vec()
        } else {
            linalg::scale(self.radius / nv, v)
        }
    }

    /// The selection `y*(x) = P_R(Ā x)` of the ergodic variant.
    pub fn ergodic_selection(&self, x: &[T]) -> Vec<T> {
        self.project(&linalg::mat_vec(&self.a_mean, self.m(), x))
    }
}

impl<T: Scalar> StochasticFunction<T> for Minimax<T> {
    fn name(&self) -> &str {
        if self.ergodic {
            "mm_ergodic"
        } else {
            "mm_instant"
        }
    }
    fn dim(&self) -> usize {
        self.n()
    }
    fn lipschitz_bound(&self) -> T {
        self.lipschitz
    }
    fn eval(&self, x: &[T], xi: &Scenario<T>) -> Result<T> {
        check_dim(self.n(), x.len())?;
        let v = linalg::mat_vec(&self.a.at(xi), self.m(), x);
        if self.ergodic {
            let y = self.ergodic_selection(x);
            Ok(linalg::dot(&v, &y) - T::of(0.5) * linalg::norm_sq(&y))
        } else {
            Ok(self.huber(&v))
        }
    }
}

impl<T: Scalar> InnerProblem<T> for Minimax<T> {
    fn outer_dim(&self) -> usize {
        self.n()
    }
    fn inner_dim(&self) -> usize {
        self.m()
    }
    fn feasible_set(&self, _xi: &Scenario<T>) -> InnerSet<T> {
        InnerSet::Ball { radius: self.radius }
    }
    fn objective(&self, x: &[T], y: &[T], xi: &Scenario<T>) -> T {
        let v = linalg::mat_vec(&self.a.at(xi), self.m(), x);
        linalg::dot(&v, y) - T::of(0.5) * linalg::norm_sq(y)
    }
    fn grad_y(&self, x: &[T], y: &[T], xi: &Scenario<T>) -> Vec<T> {
        let v = linalg::mat_vec(&self.a.at(xi), self.m(), x);
        linalg::sub(&v, y)
    }
    fn smoothness(&self, _xi: &Scenario<T>) -> T {
        T::one()
    }
    fn curvature(&self, _xi: &Scenario<T>) -> T {
        T::one()
    }
}
