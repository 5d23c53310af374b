//! Closed-form proximity operators for the regularizer catalogue, and the
//! Huber envelope of `|·|` used as an analytic reference.

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::problem::Regularizer;
use crate::Scalar;

#[inline]
fn soft_threshold<T: Scalar>(v: T, threshold: T) -> T {
    let m = v.abs() - threshold;
    if m > T::zero() {
        v.signum() * m
    } else {
        T::zero()
    }
}

/// Componentwise soft-threshold, the prox of `threshold * ‖·‖₁`.
pub fn prox_l1<T: Scalar>(x: &[T], threshold: T) -> Result<Vec<T>> {
    if !(threshold >= T::zero()) {
        return Err(Error::Input(format!("threshold must be >= 0, got {threshold}")));
    }
    Ok(x.iter().map(|&v| soft_threshold(v, threshold)).collect())
}

/// Projection onto `[lo, hi]`.
pub fn prox_box<T: Scalar>(x: &[T], lo: &[T], hi: &[T]) -> Result<Vec<T>> {
    check_dim(x.len(), lo.len())?;
    check_dim(x.len(), hi.len())?;
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| {
            if l > h {
                Err(Error::Input(format!("box lower bound {l} exceeds upper bound {h}")))
            } else {
                Ok(v.max(l).min(h))
            }
        })
        .collect()
}

/// Projection onto the closed Euclidean ball of the given radius.
pub fn prox_l2ball<T: Scalar>(x: &[T], radius: T) -> Result<Vec<T>> {
    if !(radius > T::zero()) {
        return Err(Error::Input(format!("radius must be > 0, got {radius}")));
    }
    let nrm = linalg::norm(x);
    if nrm <= radius {
        return Ok(x.to_vec());
    }
    let mut y = linalg::scale(radius / nrm, x);
    // Rounding can leave the scaled point a few ulps outside the ball.
    while linalg::norm(&y) > radius {
        y = linalg::scale(T::one() - T::epsilon(), &y);
    }
    Ok(y)
}

/// Prox of `alpha * (weight * ‖·‖₁ + ι_[lo, hi])`: separable, so the scalar
/// soft-threshold followed by a clamp is exact in every coordinate.
pub fn prox_l1_plus_box<T: Scalar>(x: &[T], weight: T, lo: &[T], hi: &[T], alpha: T) -> Result<Vec<T>> {
    if !(weight >= T::zero()) {
        return Err(Error::Input(format!("weight must be >= 0, got {weight}")));
    }
    let shrunk = prox_l1(x, alpha * weight)?;
    prox_box(&shrunk, lo, hi)
}

/// `prox_{alpha r}(x)`.
pub fn apply_prox<T: Scalar>(reg: &Regularizer<T>, x: &[T], alpha: T) -> Result<Vec<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::Input(format!("prox scale must be > 0, got {alpha}")));
    }
    match reg {
        Regularizer::Zero => Ok(x.to_vec()),
        Regularizer::L1 { weight } => prox_l1(x, alpha * *weight),
        Regularizer::BoxIndicator { lo, hi } => prox_box(x, lo, hi),
        Regularizer::L2BallIndicator { radius } => prox_l2ball(x, *radius),
        Regularizer::L1PlusBox { weight, lo, hi } => prox_l1_plus_box(x, *weight, lo, hi, alpha),
    }
}

/// Moreau envelope of `|·|` with parameter `lambda` and its derivative.
pub fn huber_envelope_abs<T: Scalar>(x: T, lambda: T) -> Result<(T, T)> {
    if !(lambda > T::zero()) {
        return Err(Error::Input(format!("lambda must be > 0, got {lambda}")));
    }
    let value = if x.abs() <= lambda {
        x * x / (T::of(2.0) * lambda)
    } else {
        x.abs() - lambda / T::of(2.0)
    };
    let grad = (x / lambda).max(-T::one()).min(T::one());
    Ok((value, grad))
}
