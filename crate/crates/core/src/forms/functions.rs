//! Concrete integrands for [`FormIntegralSpec`](super::FormIntegralSpec).

use std::sync::Arc;

use crate::embeddings::{lambda_jacobian_in_sector, lambda_unchecked, sector};
use crate::error::{invalid, Result};
use crate::taylor::{jet_eval, SmoothExpr};

use super::integrate::CubeFunction;

/// Tolerance for deciding that a point lies on the face `t = ±1`.
const FACE_TOL: f64 = 1e-14;

/// The coordinate function `p ↦ p_i`.
#[derive(Debug, Clone, Copy)]
pub struct Coordinate(pub usize);

impl CubeFunction for Coordinate {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        if self.0 >= p.len() {
            return Err(invalid(format!("coordinate {} out of range", self.0)));
        }
        let mut g = vec![0.0; p.len()];
        g[self.0] = 1.0;
        Ok((p[self.0], g))
    }
}

/// A polynomial `Σ c·p^E` in `dim` variables.
#[derive(Debug, Clone)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> Self {
        assert!(
            terms.iter().all(|(_, e)| e.len() == dim),
            "exponent length mismatch"
        );
        Self { dim, terms }
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

impl CubeFunction for Polynomial {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        if p.len() != self.dim {
            return Err(invalid(format!(
                "polynomial in {} variables, point has {}",
                self.dim,
                p.len()
            )));
        }
        let mut value = 0.0;
        let mut grad = vec![0.0; self.dim];
        for (c, e) in &self.terms {
            value += c * p
                .iter()
                .zip(e)
                .map(|(x, &a)| x.powi(a as i32))
                .product::<f64>();
            for (j, g) in grad.iter_mut().enumerate() {
                if e[j] == 0 {
                    continue;
                }
                let mut t = c * e[j] as f64;
                for (l, (&x, &a)) in p.iter().zip(e).enumerate() {
                    t *= x.powi(if l == j { a as i32 - 1 } else { a as i32 });
                }
                *g += t;
            }
        }
        Ok((value, grad))
    }
}

/// `c · g`.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub factor: f64,
    pub inner: Arc<dyn CubeFunction>,
}

impl CubeFunction for Scaled {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (v, g) = self.inner.eval(p)?;
        Ok((
            self.factor * v,
            g.into_iter().map(|d| self.factor * d).collect(),
        ))
    }
}

/// `λ_i` applied to the first `n` coordinates of the cube point.
#[derive(Debug, Clone, Copy)]
pub struct LambdaComponent {
    pub i: usize,
    pub n: usize,
}

impl CubeFunction for LambdaComponent {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        let x = base_part(p, self.n)?;
        let u = lambda_unchecked(x);
        let mut grad = vec![0.0; p.len()];
        if u.iter().any(|&v| v != 0.0) {
            let jac = lambda_jacobian_in_sector(x, sector(x));
            grad[..self.n].copy_from_slice(&jac[self.i]);
        }
        Ok((u[self.i], grad))
    }
}

fn base_part(p: &[f64], n: usize) -> Result<&[f64]> {
    if n == 0 || p.len() < n {
        return Err(invalid(format!(
            "cube point of dimension {} has no {n}-dimensional base",
            p.len()
        )));
    }
    Ok(&p[..n])
}

/// `f∘λ` on the first `n` coordinates: value and `x`-gradient.
fn body_after_lambda(f: &SmoothExpr, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let u = lambda_unchecked(x);
    let jet = jet_eval(f, &u, 1)?;
    let value = jet.derivatives()[0];
    if u.iter().all(|&v| v == 0.0) {
        return Ok((value, vec![0.0; x.len()]));
    }
    let df = jet.gradient();
    let jac = lambda_jacobian_in_sector(x, sector(x));
    let grad = (0..x.len())
        .map(|j| (0..x.len()).map(|m| df[m] * jac[m][j]).sum())
        .collect();
    Ok((value, grad))
}

/// Sign convention for the boundary function on the bottom face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarVariant {
    /// `+f∘λ` on top, `−f∘λ` on bottom, `f∘λ` on the sides.
    Odd,
    /// `+f∘λ` on every face.
    Even,
}

/// The boundary function `f̄` on `∂[−1,1]^{n+1}`; the last coordinate is `t`.
#[derive(Debug, Clone)]
pub struct BarFunction {
    pub f: SmoothExpr,
    pub n: usize,
    pub variant: BarVariant,
}

impl CubeFunction for BarFunction {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        let x = base_part(p, self.n)?;
        let (v, gx) = body_after_lambda(&self.f, x)?;
        let t = p.get(self.n).copied().unwrap_or(0.0);
        let sign = if self.variant == BarVariant::Odd && t <= -1.0 + FACE_TOL {
            -1.0
        } else {
            1.0
        };
        let mut grad = vec![0.0; p.len()];
        for (g, d) in grad.iter_mut().zip(gx) {
            *g = sign * d;
        }
        Ok((sign * v, grad))
    }
}

/// The Lipschitz extension `(x, t) ↦ t·f(λ(x))` of the odd `f̄` to the cube.
#[derive(Debug, Clone)]
pub struct BarExtension {
    pub f: SmoothExpr,
    pub n: usize,
}

impl CubeFunction for BarExtension {
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
        let x = base_part(p, self.n)?;
        if p.len() != self.n + 1 {
            return Err(invalid("extension lives on [-1,1]^{n+1}"));
        }
        let t = p[self.n];
        let (v, gx) = body_after_lambda(&self.f, x)?;
        let mut grad: Vec<f64> = gx.into_iter().map(|d| t * d).collect();
        grad.push(v);
        Ok((t * v, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(g: &dyn CubeFunction, p: &[f64], h: f64) -> Vec<f64> {
        let mut q = p.to_vec();
        (0..p.len())
            .map(|j| {
                q[j] = p[j] + h;
                let a = g.value(&q).unwrap();
                q[j] = p[j] - h;
                let b = g.value(&q).unwrap();
                q[j] = p[j];
                (a - b) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn polynomial_gradient() {
        let p = Polynomial::new(
            3,
            vec![
                (2.0, vec![1, 2, 0]),
                (-1.0, vec![0, 0, 3]),
                (0.5, vec![0, 0, 0]),
            ],
        );
        let (v, g) = p.eval(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(v, 8.0 - 27.0 + 0.5);
        assert_eq!(g, vec![8.0, 8.0, -27.0]);
        assert_eq!(p.degree(), 3);
        assert!(p.eval(&[1.0]).is_err());
    }

    #[test]
    fn lambda_component_gradient_matches_fd() {
        let p = [0.3, -0.7, 0.2];
        for i in 0..2 {
            let g = LambdaComponent { i, n: 2 };
            let (_, grad) = g.eval(&p).unwrap();
            let approx = fd(&g, &p, 1e-6);
            for (a, b) in grad.iter().zip(&approx) {
                assert!((a - b).abs() < 1e-8, "{grad:?} vs {approx:?}");
            }
        }
    }

    #[test]
    fn extension_gradient_matches_fd() {
        let body = crate::embeddings::BodyFunction::assemble(2, 1, false).unwrap();
        let g = BarExtension {
            f: body.expr().clone(),
            n: 2,
        };
        for p in [[0.3, -0.45, 0.6], [0.1, 0.05, -0.2], [-0.8, 0.5, 0.9]] {
            let (_, grad) = g.eval(&p).unwrap();
            let approx = fd(&g, &p, 1e-6);
            for (a, b) in grad.iter().zip(&approx) {
                assert!(
                    (a - b).abs() < 1e-6 * (1.0 + a.abs()),
                    "{grad:?} vs {approx:?}"
                );
            }
        }
    }

    #[test]
    fn bar_signs() {
        let body = crate::embeddings::BodyFunction::assemble(2, 1, false).unwrap();
        let odd = BarFunction {
            f: body.expr().clone(),
            n: 2,
            variant: BarVariant::Odd,
        };
        let even = BarFunction {
            variant: BarVariant::Even,
            ..odd.clone()
        };
        let top = odd.value(&[0.0, 0.0, 1.0]).unwrap();
        assert!((top - 1.0).abs() < 1e-15);
        assert_eq!(odd.value(&[0.0, 0.0, -1.0]).unwrap(), -top);
        assert_eq!(even.value(&[0.0, 0.0, -1.0]).unwrap(), top);
        let (v, g) = odd.eval(&[1.0, 0.3, 0.2]).unwrap();
        assert!(v.abs() < 1e-15 && g.iter().all(|d| d.abs() < 1e-12));
    }
}
