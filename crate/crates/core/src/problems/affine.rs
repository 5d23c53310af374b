//! Matrices affine in the scenario, `M(ξ) = M₀ + Σ_k ξ_k M_k`.

use rand::Rng;

use crate::linalg;
use crate::problem::{Scenario, ScenarioLaw};
use crate::rng::StreamKey;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct AffineMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub base: Vec<T>,
    pub terms: Vec<Vec<T>>,
}

impl<T: Scalar> AffineMatrix<T> {
    /// Base entries uniform on `[-base_scale, base_scale]`, one perturbation
    /// term per scenario coordinate with entries uniform on `[-term_scale, term_scale]`.
    pub fn random(key: StreamKey, rows: usize, cols: usize, d: usize, base_scale: f64, term_scale: f64) -> Self {
        let draw = |k: StreamKey, scale: f64| -> Vec<T> {
            let mut rng = k.rng(0);
            (0..rows * cols)
                .map(|_| T::of(scale * rng.random_range(-1.0..=1.0)))
                .collect()
        };
        AffineMatrix {
            rows,
            cols,
            base: draw(key.child("base"), base_scale),
            terms: (0..d).map(|k| draw(key.child_index(k as u64), term_scale)).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize, d: usize) -> Self {
        AffineMatrix {
            rows,
            cols,
            base: vec![T::zero(); rows * cols],
            terms: vec![vec![T::zero(); rows * cols]; d],
        }
    }

    /// Row-major entries of `M(ξ)`.
    pub fn at(&self, xi: &Scenario<T>) -> Vec<T> {
        let mut out = self.base.clone();
        for (term, &w) in self.terms.iter().zip(&xi.payload) {
            if w != T::zero() {
                for (o, &t) in out.iter_mut().zip(term) {
                    *o = *o + w * t;
                }
            }
        }
        out
    }

    /// `E{M(ξ)}`.
    pub fn mean(&self, law: &ScenarioLaw) -> Vec<T> {
        let mut out = self.base.clone();
        for (k, term) in self.terms.iter().enumerate() {
            let w = T::of(law.mean(k));
            for (o, &t) in out.iter_mut().zip(term) {
                *o = *o + w * t;
            }
        }
        out
    }

    /// `E{‖M(ξ)‖_F²}`, exact for independent scenario coordinates.
    pub fn frobenius_second_moment(&self, law: &ScenarioLaw) -> T {
        let d = self.terms.len();
        let mut total = linalg::norm_sq(&self.base);
        for k in 0..d {
            total = total + T::of(2.0 * law.mean(k)) * linalg::dot(&self.base, &self.terms[k]);
            for l in 0..d {
                let m = law.cross_moment(k, l);
                if m != 0.0 {
                    total = total + T::of(m) * linalg::dot(&self.terms[k], &self.terms[l]);
                }
            }
        }
        total.max(T::zero())
    }

    /// `sup_ξ ‖row_i(M(ξ))‖` over the support of the law.
    pub fn row_norm_sup(&self, law: &ScenarioLaw, i: usize) -> T {
        let row = |m: &[T]| linalg::norm(&m[i * self.cols..(i + 1) * self.cols]);
        self.terms
            .iter()
            .enumerate()
            .fold(row(&self.base), |acc, (k, t)| acc + T::of(law.sup_abs(k)) * row(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_moment_matches_monte_carlo() {
        let m = AffineMatrix::<f64>::random(StreamKey::root(4), 2, 3, 3, 1.0, 0.5);
        let law = ScenarioLaw::UniformCube;
        let exact = m.frobenius_second_moment(&law);
        let key = StreamKey::root(77);
        let draws = 200_000;
        let mut acc = 0.0;
        for i in 0..draws {
            let xi = Scenario::new(law.sample(3, &mut key.rng(i)));
            acc += linalg::norm_sq(&m.at(&xi));
        }
        let mc = acc / draws as f64;
        assert!((mc - exact).abs() / exact < 0.01, "{mc} vs {exact}");
    }

    #[test]
    fn point_mass_moment_is_deterministic_norm() {
        let m = AffineMatrix::<f64>::random(StreamKey::root(5), 2, 2, 2, 1.0, 0.5);
        let atom = vec![0.3, -0.7];
        let law = ScenarioLaw::PointMass(atom.clone());
        let direct = linalg::norm_sq(&m.at(&Scenario::new(atom)));
        assert!((m.frobenius_second_moment(&law) - direct).abs() < 1e-12);
        assert_eq!(m.mean(&law), m.at(&Scenario::new(vec![0.3, -0.7])));
    }
}
