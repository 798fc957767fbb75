//! Truncated multivariate Taylor series in the monomial-coefficient
//! convention: slot `I` holds `∂_I g(x₀) / I!`.

use std::sync::Arc;

use crate::multiindex::IndexLayout;

#[derive(Debug, Clone)]
pub struct Series {
    layout: Arc<IndexLayout>,
    coeffs: Vec<f64>,
}

impl Series {
    pub fn zero(layout: Arc<IndexLayout>) -> Self {
        let len = layout.len();
        Self {
            layout,
            coeffs: vec![0.0; len],
        }
    }

    pub fn constant(layout: Arc<IndexLayout>, c: f64) -> Self {
        let mut s = Self::zero(layout);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function `x_j` expanded at `x0_j`.
    pub fn variable(layout: Arc<IndexLayout>, j: usize, x0_j: f64) -> Self {
        let mut s = Self::constant(layout, x0_j);
        if let Some(pos) = s.layout.plus_unit(0, j) {
            s.coeffs[pos] = 1.0;
        }
        s
    }

    pub fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Exactly the constant 1 with every higher coefficient zero.
    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1.0 && self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|a| a * c)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|&a| f(a)).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len()];
        for &(a, b, c) in self.layout.products() {
            out[c] += self.coeffs[a] * other.coeffs[b];
        }
        Self {
            layout: self.layout.clone(),
            coeffs: out,
        }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut result = Series::constant(self.layout.clone(), 1.0);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `h(self)` where `outer[r] = h^{(r)}(g₀)/r!` are the univariate Taylor
    /// coefficients of `h` at the constant term `g₀`; Horner in `self − g₀`.
    pub fn compose(&self, outer: &[f64]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let m = self.layout.order().min(outer.len().saturating_sub(1));
        let mut acc = Series::constant(self.layout.clone(), outer[m]);
        for r in (0..m).rev() {
            acc = acc.mul(&delta);
            acc.coeffs[0] += outer[r];
        }
        acc
    }

    /// Coefficients converted to partial derivatives `∂_I g(x₀)`.
    pub fn derivatives(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(p, &c)| c * self.layout.factorial(p))
            .collect()
    }
}

/// Univariate truncated series helpers (coefficient convention).
pub(crate) mod uni {
    /// `1 / (a + ε)`.
    pub fn recip_at(a: f64, m: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(m + 1);
        let mut c = 1.0 / a;
        for _ in 0..=m {
            out.push(c);
            c *= -1.0 / a;
        }
        out
    }

    /// `exp(s(ε))` via `E' = E s'`.
    pub fn exp_of(s: &[f64]) -> Vec<f64> {
        let m = s.len() - 1;
        let mut e = vec![0.0; m + 1];
        e[0] = s[0].exp();
        for r in 1..=m {
            let acc: f64 = (1..=r).map(|j| j as f64 * s[j] * e[r - j]).sum();
            e[r] = acc / r as f64;
        }
        e
    }

    /// `a(ε) / b(ε)`, requires `b[0] ≠ 0`.
    pub fn div(a: &[f64], b: &[f64]) -> Vec<f64> {
        let m = a.len() - 1;
        let mut q = vec![0.0; m + 1];
        for r in 0..=m {
            let acc: f64 = (1..=r).map(|j| b[j] * q[r - j]).sum();
            q[r] = (a[r] - acc) / b[0];
        }
        q
    }

    /// `σ(t₀ + ε)` with `σ(t) = e^{−1/t}` for `t > 0`, else `0`.
    pub fn sigma_at(t0: f64, m: usize) -> Vec<f64> {
        if t0 <= 0.0 {
            return vec![0.0; m + 1];
        }
        let inner: Vec<f64> = recip_at(t0, m).into_iter().map(|c| -c).collect();
        exp_of(&inner)
    }

    /// Coefficients of `ε ↦ c(−ε)`.
    pub fn reflect(c: &[f64]) -> Vec<f64> {
        c.iter()
            .enumerate()
            .map(|(r, &v)| if r % 2 == 1 { -v } else { v })
            .collect()
    }

    /// Smooth step `σ(t−lo) / (σ(t−lo) + σ(hi−t))`: exactly 0 for `t ≤ lo`,
    /// exactly 1 for `t ≥ hi`.
    pub fn step_at(t0: f64, lo: f64, hi: f64, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m + 1];
        if t0 <= lo {
            return out;
        }
        if t0 >= hi {
            out[0] = 1.0;
            return out;
        }
        let a = sigma_at(t0 - lo, m);
        let b = reflect(&sigma_at(hi - t0, m));
        let den: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        div(&a, &den)
    }

    pub fn sqrt_at(a: f64, m: usize) -> Vec<f64> {
        // binom(1/2, r) · a^{1/2 − r}
        let mut out = Vec::with_capacity(m + 1);
        let mut c = a.sqrt();
        for r in 0..=m {
            out.push(c);
            c *= (0.5 - r as f64) / ((r + 1) as f64 * a);
        }
        out
    }

    pub fn exp_at(a: f64, m: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(m + 1);
        let mut c = a.exp();
        for r in 0..=m {
            out.push(c);
            c /= (r + 1) as f64;
        }
        out
    }

    /// `sin` (`phase = 0`) or `cos` (`phase = 1`) at `a`.
    pub fn trig_at(a: f64, m: usize, phase: usize) -> Vec<f64> {
        let (s, c) = a.sin_cos();
        let cycle = [s, c, -s, -c];
        let mut fact = 1.0;
        (0..=m)
            .map(|r| {
                if r > 0 {
                    fact *= r as f64;
                }
                cycle[(r + phase) % 4] / fact
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_exp_recurrence_matches_closed_form() {
        let e = uni::exp_of(&[0.3, 1.0, 0.0, 0.0, 0.0]);
        let closed = uni::exp_at(0.3, 4);
        for (a, b) in e.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = [1.0, 2.0, -1.0, 0.5];
        let b = [2.0, 0.3, 0.1, -0.2];
        let q = uni::div(&a, &b);
        // q·b == a
        for r in 0..4 {
            let prod: f64 = (0..=r).map(|j| q[j] * b[r - j]).sum();
            assert!((prod - a[r]).abs() < 1e-14);
        }
    }

    #[test]
    fn sigma_is_flat_on_the_left() {
        assert!(uni::sigma_at(-0.5, 6).iter().all(|&c| c == 0.0));
        assert!(uni::sigma_at(0.0, 6).iter().all(|&c| c == 0.0));
        let s = uni::sigma_at(0.5, 2);
        // σ = e^{-2}, σ' = σ/t², σ''/2 = (σ/t⁴ − 2σ/t³)/2
        let v = (-2.0f64).exp();
        assert!((s[0] - v).abs() < 1e-15);
        assert!((s[1] - v * 4.0).abs() < 1e-14);
        assert!((s[2] - (v * 16.0 - 2.0 * v * 8.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn step_limits_are_exact() {
        assert_eq!(uni::step_at(0.0, 0.1, 0.2, 3), vec![0.0; 4]);
        assert_eq!(uni::step_at(0.3, 0.1, 0.2, 3), vec![1.0, 0.0, 0.0, 0.0]);
        let mid = uni::step_at(0.15, 0.1, 0.2, 0);
        assert!((mid[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn power_of_variable() {
        let layout = IndexLayout::get(1, 4).unwrap();
        let x = Series::variable(layout, 0, 2.0);
        // x^3 at 2: 8, 12, 6, 1, 0
        let c = x.powi(3);
        assert_eq!(c.coeffs(), &[8.0, 12.0, 6.0, 1.0, 0.0]);
    }
}
