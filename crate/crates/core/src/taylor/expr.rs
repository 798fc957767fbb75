use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::jetgroup::{GroupParams, JetPoint};
use crate::multiindex::{IndexLayout, MultiIndex, MAX_SERIES_ORDER};

use super::series::{uni, Series};

/// Expression tree for the smooth functions the embeddings are built from.
///
/// `Sqrt` and `Recip` carry a declared domain `arg > min`; evaluating them
/// outside it is an [`Error::Domain`]. `Blend` evaluates
/// `w·inner + (1−w)·outer` and skips `inner` wherever the weight jet is
/// identically zero (and `outer` wherever it is identically one), which is
/// how `|x|` stays away from its singularity at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothExpr {
    Const(f64),
    /// Coordinate projection `x_j` (zero-based).
    Coord(usize),
    Add(Box<SmoothExpr>, Box<SmoothExpr>),
    Sub(Box<SmoothExpr>, Box<SmoothExpr>),
    Mul(Box<SmoothExpr>, Box<SmoothExpr>),
    Neg(Box<SmoothExpr>),
    Pow(Box<SmoothExpr>, u32),
    Sin(Box<SmoothExpr>),
    Cos(Box<SmoothExpr>),
    Exp(Box<SmoothExpr>),
    Sqrt {
        arg: Box<SmoothExpr>,
        min: f64,
    },
    Recip {
        arg: Box<SmoothExpr>,
        min: f64,
    },
    /// `σ(t) = e^{−1/t}` for `t > 0`, `0` otherwise.
    Sigma(Box<SmoothExpr>),
    /// `σ(t−lo) / (σ(t−lo) + σ(hi−t))`.
    Step {
        arg: Box<SmoothExpr>,
        lo: f64,
        hi: f64,
    },
    Blend {
        weight: Box<SmoothExpr>,
        inner: Box<SmoothExpr>,
        outer: Box<SmoothExpr>,
    },
}

use SmoothExpr::*;

impl SmoothExpr {
    pub fn constant(c: f64) -> Self {
        Const(c)
    }

    pub fn coord(j: usize) -> Self {
        Coord(j)
    }

    pub fn pow(self, e: u32) -> Self {
        Pow(Box::new(self), e)
    }

    pub fn sin(self) -> Self {
        Sin(Box::new(self))
    }

    pub fn cos(self) -> Self {
        Cos(Box::new(self))
    }

    pub fn exp(self) -> Self {
        Exp(Box::new(self))
    }

    pub fn sqrt(self, min: f64) -> Self {
        Sqrt {
            arg: Box::new(self),
            min,
        }
    }

    pub fn recip(self, min: f64) -> Self {
        Recip {
            arg: Box::new(self),
            min,
        }
    }

    pub fn sigma(self) -> Self {
        Sigma(Box::new(self))
    }

    pub fn step(self, lo: f64, hi: f64) -> Self {
        Step {
            arg: Box::new(self),
            lo,
            hi,
        }
    }

    pub fn blend(weight: Self, inner: Self, outer: Self) -> Self {
        Blend {
            weight: Box::new(weight),
            inner: Box::new(inner),
            outer: Box::new(outer),
        }
    }

    /// `Σ_{j<n} x_j²`.
    pub fn norm_squared(n: usize) -> Self {
        (1..n).fold(Coord(0).pow(2), |acc, j| acc + Coord(j).pow(2))
    }

    /// `|x| = sqrt(Σ x_j²)` declared only for `|x| > min_radius`.
    pub fn norm(n: usize, min_radius: f64) -> Self {
        Self::norm_squared(n).sqrt(min_radius * min_radius)
    }

    /// Largest coordinate index referenced, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Const(_) => 0,
            Coord(j) => j + 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) => a.arity().max(b.arity()),
            Neg(a) | Pow(a, _) | Sin(a) | Cos(a) | Exp(a) | Sigma(a) => a.arity(),
            Sqrt { arg, .. } | Recip { arg, .. } | Step { arg, .. } => arg.arity(),
            Blend {
                weight,
                inner,
                outer,
            } => weight.arity().max(inner.arity()).max(outer.arity()),
        }
    }

    /// Plain function value `g(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let layout = IndexLayout::get(x.len().max(1), 0)?;
        Ok(self.series(x, &layout)?.value())
    }

    /// Truncated Taylor series of the expression at `x0`.
    pub fn series(&self, x0: &[f64], layout: &Arc<IndexLayout>) -> Result<Series> {
        let m = layout.order();
        Ok(match self {
            Const(c) => Series::constant(layout.clone(), *c),
            Coord(j) => {
                if *j >= x0.len() {
                    return Err(invalid(format!(
                        "coordinate x{j} used on a point of dimension {}",
                        x0.len()
                    )));
                }
                Series::variable(layout.clone(), *j, x0[*j])
            }
            Add(a, b) => a.series(x0, layout)?.add(&b.series(x0, layout)?),
            Sub(a, b) => a.series(x0, layout)?.sub(&b.series(x0, layout)?),
            Mul(a, b) => a.series(x0, layout)?.mul(&b.series(x0, layout)?),
            Neg(a) => a.series(x0, layout)?.neg(),
            Pow(a, e) => a.series(x0, layout)?.powi(*e),
            Sin(a) => {
                let s = a.series(x0, layout)?;
                s.compose(&uni::trig_at(s.value(), m, 0))
            }
            Cos(a) => {
                let s = a.series(x0, layout)?;
                s.compose(&uni::trig_at(s.value(), m, 1))
            }
            Exp(a) => {
                let s = a.series(x0, layout)?;
                s.compose(&uni::exp_at(s.value(), m))
            }
            Sqrt { arg, min } => {
                let s = arg.series(x0, layout)?;
                self.check_domain(s.value(), *min)?;
                s.compose(&uni::sqrt_at(s.value(), m))
            }
            Recip { arg, min } => {
                let s = arg.series(x0, layout)?;
                self.check_domain(s.value(), *min)?;
                s.compose(&uni::recip_at(s.value(), m))
            }
            Sigma(a) => {
                let s = a.series(x0, layout)?;
                if s.value() <= 0.0 {
                    Series::zero(layout.clone())
                } else {
                    s.compose(&uni::sigma_at(s.value(), m))
                }
            }
            Step { arg, lo, hi } => {
                let s = arg.series(x0, layout)?;
                let t = s.value();
                if t <= *lo {
                    Series::zero(layout.clone())
                } else if t >= *hi {
                    Series::constant(layout.clone(), 1.0)
                } else {
                    s.compose(&uni::step_at(t, *lo, *hi, m))
                }
            }
            Blend {
                weight,
                inner,
                outer,
            } => {
                let w = weight.series(x0, layout)?;
                if w.is_zero() {
                    outer.series(x0, layout)?
                } else if w.is_one() {
                    inner.series(x0, layout)?
                } else {
                    let a = inner.series(x0, layout)?;
                    let b = outer.series(x0, layout)?;
                    // b + w·(a − b)
                    b.add(&w.mul(&a.sub(&b)))
                }
            }
        })
    }

    fn check_domain(&self, value: f64, min: f64) -> Result<()> {
        if value > min {
            Ok(())
        } else {
            let mut node = self.to_string();
            if node.len() > 120 {
                node.truncate(117);
                node.push_str("...");
            }
            Err(Error::Domain { node, value, min })
        }
    }
}

impl std::ops::Add for SmoothExpr {
    type Output = SmoothExpr;
    fn add(self, rhs: Self) -> Self {
        Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for SmoothExpr {
    type Output = SmoothExpr;
    fn sub(self, rhs: Self) -> Self {
        Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, rhs: Self) -> Self {
        Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> Self {
        Neg(Box::new(self))
    }
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => write!(f, "{c:?}"),
            Coord(j) => write!(f, "(x {j})"),
            Add(a, b) => write!(f, "(add {a} {b})"),
            Sub(a, b) => write!(f, "(sub {a} {b})"),
            Mul(a, b) => write!(f, "(mul {a} {b})"),
            Neg(a) => write!(f, "(neg {a})"),
            Pow(a, e) => write!(f, "(pow {a} {e})"),
            Sin(a) => write!(f, "(sin {a})"),
            Cos(a) => write!(f, "(cos {a})"),
            Exp(a) => write!(f, "(exp {a})"),
            Sqrt { arg, min } => write!(f, "(sqrt {arg} {min:?})"),
            Recip { arg, min } => write!(f, "(recip {arg} {min:?})"),
            Sigma(a) => write!(f, "(sigma {a})"),
            Step { arg, lo, hi } => write!(f, "(step {arg} {lo:?} {hi:?})"),
            Blend {
                weight,
                inner,
                outer,
            } => write!(f, "(blend {weight} {inner} {outer})"),
        }
    }
}

/// All partial derivatives `∂_I g(x₀)`, `|I| ≤ order`.
#[derive(Debug, Clone)]
pub struct TruncatedJet {
    base: Vec<f64>,
    layout: Arc<IndexLayout>,
    derivatives: Vec<f64>,
}

impl TruncatedJet {
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    /// Derivatives in canonical index order.
    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    pub fn get(&self, index: &MultiIndex) -> Option<f64> {
        self.layout.position(index).map(|p| self.derivatives[p])
    }

    /// `∂_I g(x₀) / I!`, the monomial coefficients of the Taylor polynomial.
    pub fn taylor_coefficients(&self) -> Vec<f64> {
        self.derivatives
            .iter()
            .enumerate()
            .map(|(p, d)| d / self.layout.factorial(p))
            .collect()
    }

    /// Gradient `(∂_{e_1} g, …, ∂_{e_n} g)`; requires order ≥ 1.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.layout.n())
            .map(|j| {
                self.layout
                    .plus_unit(0, j)
                    .map_or(0.0, |p| self.derivatives[p])
            })
            .collect()
    }

    /// Evaluate the Taylor polynomial at `x`.
    pub fn taylor_polynomial(&self, x: &[f64]) -> f64 {
        let h: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        self.layout
            .indices()
            .iter()
            .zip(self.taylor_coefficients())
            .map(|(i, c)| c * crate::multiindex::monomial(&h, i).expect("same dimension"))
            .sum()
    }
}

/// Propagate truncated series through `g` to obtain every `∂_I g(x₀)` with
/// `|I| ≤ order`.
pub fn jet_eval(g: &SmoothExpr, x0: &[f64], order: usize) -> Result<TruncatedJet> {
    if x0.is_empty() {
        return Err(invalid("evaluation point must have dimension ≥ 1"));
    }
    if order > MAX_SERIES_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            max: MAX_SERIES_ORDER,
        });
    }
    if g.arity() > x0.len() {
        return Err(invalid(format!(
            "expression uses {} coordinates, point has {}",
            g.arity(),
            x0.len()
        )));
    }
    let layout = IndexLayout::get(x0.len(), order)?;
    let series = g.series(x0, &layout)?;
    Ok(TruncatedJet {
        base: x0.to_vec(),
        derivatives: series.derivatives(),
        layout,
    })
}

/// `j^k_{x₀}(g)` as a point of `J^k(ℝⁿ)`.
pub fn jet_to_point(g: &SmoothExpr, x0: &[f64], k: usize) -> Result<JetPoint> {
    let params = GroupParams::new(x0.len(), k)?;
    let jet = jet_eval(g, x0, k)?;
    JetPoint::new(params, x0.to_vec(), jet.derivatives)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn f1() -> SmoothExpr {
        let t = SmoothExpr::coord(0);
        (t.clone().pow(2)) * (SmoothExpr::constant(PI) - t).pow(2)
    }

    #[test]
    fn constant_jet() {
        let jet = jet_eval(&SmoothExpr::constant(2.5), &[0.3, -1.0], 3).unwrap();
        assert_eq!(jet.derivatives()[0], 2.5);
        assert!(jet.derivatives()[1..].iter().all(|&d| d == 0.0));
    }

    #[test]
    fn f1_at_zero() {
        let jet = jet_eval(&f1(), &[0.0], 2).unwrap();
        let d = jet.derivatives();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], 0.0);
        assert!((d[2] - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn f1_jet_points() {
        let p = jet_to_point(&f1(), &[0.0], 1).unwrap();
        assert_eq!(p.to_filiform(), vec![0.0, 0.0, 0.0]);
        let p = jet_to_point(&f1(), &[PI / 2.0], 1).unwrap();
        let v = p.to_filiform();
        assert!((v[0] - PI / 2.0).abs() < 1e-15);
        assert!(v[1].abs() < 1e-12);
        assert!((v[2] - PI.powi(4) / 16.0).abs() < 1e-12);
        let zero = jet_to_point(&SmoothExpr::constant(0.0), &[0.4, 0.1], 2).unwrap();
        assert!(zero.u().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sqrt_domain_is_enforced() {
        let g = SmoothExpr::norm(2, 0.125);
        let err = jet_eval(&g, &[0.0, 0.0], 1).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        assert!(err.to_string().contains("sqrt"));
        assert!(jet_eval(&g, &[0.6, 0.8], 1).is_ok());
        let r = SmoothExpr::coord(0).recip(0.0);
        assert!(jet_eval(&r, &[-1.0], 1).is_err());
    }

    #[test]
    fn sigma_zero_jet_left_of_origin() {
        let s = SmoothExpr::coord(0).sigma();
        let jet = jet_eval(&s, &[-0.3], 6).unwrap();
        assert!(jet.derivatives().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn blend_skips_inner_where_weight_vanishes() {
        // weight is zero near the origin, so the norm is never touched there
        let w = SmoothExpr::norm_squared(2).step(1.0 / 16.0, 0.25);
        let g = SmoothExpr::blend(w, SmoothExpr::norm(2, 0.125), SmoothExpr::constant(7.0));
        assert_eq!(g.value(&[0.0, 0.0]).unwrap(), 7.0);
        assert!((g.value(&[0.6, 0.0]).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        assert!(jet_eval(&SmoothExpr::coord(2), &[0.0, 1.0], 1).is_err());
        assert!(jet_eval(&SmoothExpr::coord(0), &[0.0], MAX_SERIES_ORDER + 1).is_err());
    }

    #[test]
    fn trig_exp_derivatives() {
        let g = SmoothExpr::coord(0).sin() * SmoothExpr::coord(1).exp();
        let jet = jet_eval(&g, &[0.4, 0.2], 2).unwrap();
        let e = 0.2f64.exp();
        let (s, c) = 0.4f64.sin_cos();
        let d = |i: &[u32]| jet.get(&MultiIndex::new(i.to_vec())).unwrap();
        assert!((d(&[1, 0]) - c * e).abs() < 1e-14);
        assert!((d(&[1, 1]) - c * e).abs() < 1e-14);
        assert!((d(&[2, 0]) + s * e).abs() < 1e-14);
        assert!((d(&[0, 2]) - s * e).abs() < 1e-14);
    }

    #[test]
    fn taylor_polynomial_reproduces_polynomials() {
        let g = SmoothExpr::coord(0).pow(3) + SmoothExpr::coord(0) * SmoothExpr::coord(1);
        let jet = jet_eval(&g, &[0.5, -0.25], 3).unwrap();
        let x = [1.3, 0.7];
        let exact = g.value(&x).unwrap();
        assert!((jet.taylor_polynomial(&x) - exact).abs() < 1e-12);
    }
}
