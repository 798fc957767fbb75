//! The concrete maps: the body functions `f_k` and `f`, the circle and
//! sphere embeddings into jet space, the polar lift `L`, the cube-to-ball
//! map `λ` with its inverse, `Λ = λ × id`, and the cylinder map `P`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forms::{self, IntegralValue};
use crate::jetgroup::{GroupParams, JetPoint};
use crate::multiindex::MAX_JET_ORDER;
use crate::taylor::{jet_to_point, SmoothExpr};

/// Slack allowed on the closed-domain checks `|v| ≤ 1`, `|x_i| ≤ 1`.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// `|x|` is only ever evaluated beyond this radius.
pub const NORM_MIN_RADIUS: f64 = 0.125;

/// `α` switches on between these two radii.
pub const ALPHA_INNER_RADIUS: f64 = 0.25;
pub const ALPHA_OUTER_RADIUS: f64 = 0.5;

/// Center (first coordinate) and half-width of the correction bump cube.
pub const BETA_CENTER: f64 = 0.25;
pub const BETA_HALF_WIDTH: f64 = 1.0 / 16.0;

fn check_order(k: usize) -> Result<()> {
    if k == 0 || k > MAX_JET_ORDER {
        return Err(Error::OrderTooLarge {
            order: k,
            max: MAX_JET_ORDER,
        });
    }
    Ok(())
}

/// `f_k(θ) = θ^{k+1} (π − θ)^{k+1}`.
pub fn make_fk(k: usize) -> Result<SmoothExpr> {
    check_order(k)?;
    let e = (k + 1) as u32;
    let t = SmoothExpr::coord(0);
    Ok(t.clone().pow(e) * (SmoothExpr::constant(PI) - t).pow(e))
}

/// `α(x) = s(|x|²)`: zero for `|x| ≤ 1/4`, one for `|x| ≥ 1/2`.
pub fn alpha_expr(n: usize) -> SmoothExpr {
    SmoothExpr::norm_squared(n).step(
        ALPHA_INNER_RADIUS * ALPHA_INNER_RADIUS,
        ALPHA_OUTER_RADIUS * ALPHA_OUTER_RADIUS,
    )
}

/// `(1 − |x|)^{k+1}`.
pub fn falloff_expr(n: usize, k: usize) -> SmoothExpr {
    (SmoothExpr::constant(1.0) - SmoothExpr::norm(n, NORM_MIN_RADIUS)).pow((k + 1) as u32)
}

/// Product bump with peak 1 at `(1/4, 0, …, 0)`, supported in the open cube
/// of half-width `1/16` around it.
pub fn beta_expr(n: usize) -> SmoothExpr {
    let r = BETA_HALF_WIDTH;
    let factor = |l: usize| {
        let c = if l == 0 { BETA_CENTER } else { 0.0 };
        let x = SmoothExpr::coord(l);
        let rising = (x.clone() * SmoothExpr::constant(1.0 / r)
            + SmoothExpr::constant((r - c) / r))
        .step(0.0, 1.0);
        let falling =
            (SmoothExpr::constant((c + r) / r) - x * SmoothExpr::constant(1.0 / r)).step(0.0, 1.0);
        rising * falling
    };
    (1..n).fold(factor(0), |acc, l| acc * factor(l))
}

/// The smooth body of the sphere embedding:
/// `f = α·(1−|x|)^{k+1} + (1−α)`, plus the bump `β` when the obstruction
/// integral needed it.
#[derive(Debug, Clone)]
pub struct BodyFunction {
    n: usize,
    k: usize,
    alpha: SmoothExpr,
    beta: Option<SmoothExpr>,
    expr: SmoothExpr,
    obstruction: Option<IntegralValue>,
}

/// Knobs for [`make_body_with`].
#[derive(Debug, Clone, Copy)]
pub struct BodyOptions {
    /// Gauss points per axis per cell for the obstruction check.
    pub resolution: usize,
    /// Add `β` regardless of the obstruction value.
    pub force_beta: bool,
    /// Skip the obstruction check entirely.
    pub skip_obstruction: bool,
}

impl Default for BodyOptions {
    fn default() -> Self {
        Self {
            resolution: 32,
            force_beta: false,
            skip_obstruction: false,
        }
    }
}

impl BodyFunction {
    /// Assemble `f` without running the obstruction check.
    pub fn assemble(n: usize, k: usize, with_beta: bool) -> Result<Self> {
        if n < 2 {
            return Err(invalid("the sphere body needs n ≥ 2"));
        }
        check_order(k)?;
        let alpha = alpha_expr(n);
        let base = SmoothExpr::blend(alpha.clone(), falloff_expr(n, k), SmoothExpr::constant(1.0));
        let beta = with_beta.then(|| beta_expr(n));
        let expr = match &beta {
            Some(b) => base + b.clone(),
            None => base,
        };
        Ok(Self {
            n,
            k,
            alpha,
            beta,
            expr,
            obstruction: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn expr(&self) -> &SmoothExpr {
        &self.expr
    }

    pub fn alpha(&self) -> &SmoothExpr {
        &self.alpha
    }

    pub fn beta(&self) -> Option<&SmoothExpr> {
        self.beta.as_ref()
    }

    pub fn obstruction(&self) -> Option<IntegralValue> {
        self.obstruction
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.expr.value(x)
    }

    /// `j^k_x(f)`.
    pub fn jet(&self, x: &[f64]) -> Result<JetPoint> {
        jet_to_point(&self.expr, x, self.k)
    }
}

/// Build the body and certify a nonzero obstruction integral, adding the
/// correction bump if the plain blend falls below ten error bars.
pub fn make_body(n: usize, k: usize) -> Result<BodyFunction> {
    make_body_with(n, k, BodyOptions::default())
}

pub fn make_body_with(n: usize, k: usize, options: BodyOptions) -> Result<BodyFunction> {
    let mut body = BodyFunction::assemble(n, k, options.force_beta)?;
    if options.skip_obstruction {
        return Ok(body);
    }
    let mut value = forms::obstruction_integral(&body, options.resolution)?;
    if !value.is_certified_nonzero() && body.beta.is_none() {
        body = BodyFunction::assemble(n, k, true)?;
        value = forms::obstruction_integral(&body, options.resolution)?;
    }
    if !value.is_certified_nonzero() {
        return Err(Error::Construction(format!(
            "obstruction integral {} is within ten error bars ({}) even with the correction bump",
            value.value, value.error
        )));
    }
    body.obstruction = Some(value);
    Ok(body)
}

/// Which closed hemisphere a sphere point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hemisphere {
    Upper,
    Lower,
    Equator,
}

/// A point of `Sⁿ ⊂ ℝ^{n+1}` with its polar parameters: the ambient point is
/// `(x·sin(πθ/2), ±cos(πθ/2))` with `x ∈ S^{n−1}`, `θ ∈ [0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub ambient: Vec<f64>,
    pub hemisphere: Hemisphere,
    pub direction: Vec<f64>,
    pub radius: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn unit_or_e1(v: &[f64]) -> Vec<f64> {
    let r = norm(v);
    if r > 0.0 {
        v.iter().map(|a| a / r).collect()
    } else {
        let mut e = vec![0.0; v.len()];
        e[0] = 1.0;
        e
    }
}

impl SpherePoint {
    /// Sphere dimension `n` (ambient dimension minus one).
    pub fn n(&self) -> usize {
        self.ambient.len() - 1
    }

    pub fn from_ambient(p: &[f64]) -> Result<Self> {
        if p.len() < 2 {
            return Err(invalid("sphere points need ambient dimension ≥ 2"));
        }
        let r = norm(p);
        if (r - 1.0).abs() > DOMAIN_SLACK {
            return Err(invalid(format!("point has norm {r}, not 1")));
        }
        let n = p.len() - 1;
        let (w, t) = (&p[..n], p[n]);
        let direction = unit_or_e1(w);
        let (hemisphere, radius) = if t == 0.0 {
            (Hemisphere::Equator, 1.0)
        } else {
            let h = if t > 0.0 {
                Hemisphere::Upper
            } else {
                Hemisphere::Lower
            };
            (h, norm(w).atan2(t.abs()) / FRAC_PI_2)
        };
        Ok(Self {
            ambient: p.to_vec(),
            hemisphere,
            direction,
            radius,
        })
    }

    /// Point with polar parameters `(x, θ)` on the requested side; `θ = 1`
    /// lands exactly on the equator.
    pub fn from_polar(direction: &[f64], radius: f64, upper: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&radius) {
            return Err(invalid(format!("polar radius {radius} outside [0,1]")));
        }
        let direction = unit_or_e1(direction);
        let (s, c) = (FRAC_PI_2 * radius).sin_cos();
        let mut ambient: Vec<f64> = direction.iter().map(|x| x * s).collect();
        let (hemisphere, t) = if radius == 1.0 {
            (Hemisphere::Equator, 0.0)
        } else if upper {
            (Hemisphere::Upper, c)
        } else {
            (Hemisphere::Lower, -c)
        };
        ambient.push(t);
        Ok(Self {
            ambient,
            hemisphere,
            direction,
            radius,
        })
    }

    /// `θ·x`, the preimage in the closed unit ball.
    pub fn ball_point(&self) -> Vec<f64> {
        self.direction.iter().map(|x| x * self.radius).collect()
    }
}

/// `L(θ·x) = (x·sin(πθ/2), cos(πθ/2))`.
pub fn polar_lift(v: &[f64]) -> Result<SpherePoint> {
    if v.is_empty() {
        return Err(invalid("empty ball point"));
    }
    let r = norm(v);
    if r > 1.0 + DOMAIN_SLACK {
        return Err(invalid(format!("|v| = {r} exceeds 1")));
    }
    SpherePoint::from_polar(v, r.min(1.0), true)
}

/// `φ(e^{iθ})`: jet of `f_k` at `θ` on `[0,π]`, jet of `−f_k` at `2π − θ` on
/// `[π, 2π]`.
pub fn embed_circle(k: usize, angle: f64) -> Result<JetPoint> {
    embed_circle_with(&make_fk(k)?, k, angle)
}

/// [`embed_circle`] with a prebuilt `f_k`.
pub fn embed_circle_with(fk: &SmoothExpr, k: usize, angle: f64) -> Result<JetPoint> {
    if !angle.is_finite() {
        return Err(invalid("angle must be finite"));
    }
    let theta = angle.rem_euclid(2.0 * PI);
    if theta <= PI {
        jet_to_point(fk, &[theta], k)
    } else {
        Ok(jet_to_point(fk, &[2.0 * PI - theta], k)?.negate_jet())
    }
}

/// `φ(p)`: jet of `f` at `θ·x` on the upper hemisphere, of `−f` on the lower.
pub fn embed_sphere(body: &BodyFunction, p: &SpherePoint) -> Result<JetPoint> {
    if p.n() != body.n() {
        return Err(invalid(format!(
            "sphere point lives in S^{}, body in dimension {}",
            p.n(),
            body.n()
        )));
    }
    let jet = body.jet(&p.ball_point())?;
    Ok(match p.hemisphere {
        Hemisphere::Upper | Hemisphere::Equator => jet,
        Hemisphere::Lower => jet.negate_jet(),
    })
}

/// Parameters of the jet space the sphere body maps into.
pub fn sphere_params(body: &BodyFunction) -> GroupParams {
    GroupParams::new(body.n(), body.k()).expect("validated body")
}

/// Sector of `x`: the smallest `i` with `|x_i|` maximal.
pub fn sector(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    best
}

/// `λ(x) = (|x_i| / |x|)·x` on sector `S_i`; `λ(0) = 0`.
pub fn lambda_map(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(invalid("empty cube point"));
    }
    if let Some(v) = x.iter().find(|v| !(v.abs() <= 1.0 + DOMAIN_SLACK)) {
        return Err(invalid(format!("coordinate {v} outside [-1,1]")));
    }
    Ok(lambda_unchecked(x))
}

pub(crate) fn lambda_unchecked(x: &[f64]) -> Vec<f64> {
    let r = norm(x);
    if r == 0.0 {
        return vec![0.0; x.len()];
    }
    let scale = x[sector(x)].abs() / r;
    x.iter().map(|v| v * scale).collect()
}

/// `λ⁻¹(u) = (|u| / |u_i|)·u` on sector `S_i`; `λ⁻¹(0) = 0`.
pub fn lambda_inv(u: &[f64]) -> Result<Vec<f64>> {
    if u.is_empty() {
        return Err(invalid("empty ball point"));
    }
    let r = norm(u);
    if !(r <= 1.0 + DOMAIN_SLACK) {
        return Err(invalid(format!("|u| = {r} exceeds 1")));
    }
    if r == 0.0 {
        return Ok(vec![0.0; u.len()]);
    }
    let scale = r / u[sector(u)].abs();
    Ok(u.iter().map(|v| v * scale).collect())
}

/// Jacobian `∂λ_m/∂x_j` (row `m`, column `j`) on the interior of the sector
/// containing `x ≠ 0`.
pub fn lambda_jacobian(x: &[f64]) -> Vec<Vec<f64>> {
    let i = sector(x);
    lambda_jacobian_in_sector(x, i)
}

pub(crate) fn lambda_jacobian_in_sector(x: &[f64], i: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let r = norm(x);
    let xi = x[i];
    let scale = xi.abs() / r;
    // ∂(|x_i|/|x|)/∂x_j = sign(x_i) δ_ij / |x| − |x_i| x_j / |x|³
    let dscale: Vec<f64> = (0..n)
        .map(|j| {
            let own = if j == i { xi.signum() / r } else { 0.0 };
            own - xi.abs() * x[j] / (r * r * r)
        })
        .collect();
    (0..n)
        .map(|m| {
            (0..n)
                .map(|j| if m == j { scale } else { 0.0 } + x[m] * dscale[j])
                .collect()
        })
        .collect()
}

/// `Λ(x, t) = (λ(x), t)`.
pub fn big_lambda(x: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(invalid(format!("height {t} outside [-1,1]")));
    }
    let mut out = lambda_map(x)?;
    out.push(t);
    Ok(out)
}

/// `P(θ·x, t) = (x·sin(πθ/2), t·cos(πθ/2))`.
pub fn cylinder_proj(v: &[f64], t: f64) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(invalid("empty ball point"));
    }
    let r = norm(v);
    if r > 1.0 + DOMAIN_SLACK {
        return Err(invalid(format!("|v| = {r} exceeds 1")));
    }
    if !(t.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(invalid(format!("height {t} outside [-1,1]")));
    }
    let theta = r.min(1.0);
    let (s, c) = (FRAC_PI_2 * theta).sin_cos();
    let c = if theta == 1.0 { 0.0 } else { c };
    let dir = unit_or_e1(v);
    let mut out: Vec<f64> = if r == 0.0 {
        vec![0.0; v.len()]
    } else {
        dir.iter().map(|x| x * s).collect()
    };
    out.push(t * c);
    Ok(out)
}

/// `ρ(a, b) = Σ |a_i − b_i|`.
pub fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Geodesic distance between `e^{iα}` and `e^{iβ}`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enumerate_up_to;
    use std::f64::consts::SQRT_2;

    #[test]
    fn fk_values() {
        let f1 = make_fk(1).unwrap();
        assert_eq!(f1.value(&[0.0]).unwrap(), 0.0);
        assert!((f1.value(&[PI / 2.0]).unwrap() - PI.powi(4) / 16.0).abs() < 1e-12);
        assert!((PI.powi(4) / 16.0 - 6.0881).abs() < 1e-4);
        assert!(make_fk(9).is_err());
        assert!(make_fk(0).is_err());
    }

    #[test]
    fn fk_kth_derivative_is_linear_near_zero() {
        for k in 1..=3 {
            let fk = make_fk(k).unwrap();
            let theta = 1e-4;
            let d = crate::taylor::jet_eval(&fk, &[theta], k)
                .unwrap()
                .derivatives()[k];
            let target = (1..=k + 1).product::<usize>() as f64 * PI.powi(k as i32 + 1);
            assert!(((d / theta) - target).abs() / target < 1e-3, "k={k}");
        }
    }

    #[test]
    fn body_values() {
        let body = BodyFunction::assemble(2, 1, false).unwrap();
        assert_eq!(body.value(&[0.0, 0.0]).unwrap(), 1.0);
        assert!((body.value(&[0.75, 0.0]).unwrap() - 0.0625).abs() < 1e-15);
        let body3 = BodyFunction::assemble(3, 2, false).unwrap();
        assert!((body3.value(&[0.0, 0.6, 0.0]).unwrap() - 0.4f64.powi(3)).abs() < 1e-15);
        assert!(BodyFunction::assemble(1, 1, false).is_err());
    }

    #[test]
    fn body_is_flat_on_the_unit_sphere() {
        for (n, k) in [(2, 1), (2, 2), (3, 1)] {
            let body = BodyFunction::assemble(n, k, false).unwrap();
            let mut x = vec![0.0; n];
            x[0] = 0.6;
            x[1] = -0.8;
            let jet = crate::taylor::jet_eval(body.expr(), &x, k).unwrap();
            assert!(
                jet.derivatives().iter().all(|d| d.abs() <= 1e-12),
                "n={n} k={k}"
            );
        }
    }

    #[test]
    fn beta_support_and_peak() {
        let b = beta_expr(2);
        assert!((b.value(&[0.25, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(b.value(&[0.25 + 1.0 / 16.0, 0.0]).unwrap(), 0.0);
        assert_eq!(b.value(&[0.25, -1.0 / 16.0]).unwrap(), 0.0);
        assert_eq!(b.value(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(b.value(&[0.26, 0.01]).unwrap() > 0.0);
    }

    #[test]
    fn polar_lift_examples() {
        let north = polar_lift(&[0.0, 0.0]).unwrap();
        assert_eq!(north.ambient, vec![0.0, 0.0, 1.0]);
        assert_eq!(north.hemisphere, Hemisphere::Upper);
        let eq = polar_lift(&[0.6, 0.8]).unwrap();
        assert_eq!(eq.hemisphere, Hemisphere::Equator);
        assert!((eq.ambient[0] - 0.6).abs() < 1e-15 && eq.ambient[2] == 0.0);
        let half = polar_lift(&[0.5, 0.0, 0.0]).unwrap();
        assert!((half.ambient[0] - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((half.ambient[3] - SQRT_2 / 2.0).abs() < 1e-15);
        assert!(polar_lift(&[1.0, 0.1]).is_err());
    }

    #[test]
    fn ambient_round_trip() {
        let p = SpherePoint::from_polar(&[0.3, -0.4], 0.7, false).unwrap();
        let q = SpherePoint::from_ambient(&p.ambient).unwrap();
        assert_eq!(q.hemisphere, Hemisphere::Lower);
        assert!((q.radius - 0.7).abs() < 1e-14);
        assert!((q.direction[0] - 0.6).abs() < 1e-14);
        assert!(SpherePoint::from_ambient(&[1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn circle_embedding_examples() {
        let zero = embed_circle(3, 0.0).unwrap();
        assert!(zero.coords().all(|c| c == 0.0));
        let top = embed_circle(1, PI / 2.0).unwrap().to_filiform();
        assert!((top[0] - PI / 2.0).abs() < 1e-15);
        assert!(top[1].abs() < 1e-12);
        assert!((top[2] - PI.powi(4) / 16.0).abs() < 1e-12);
        let bottom = embed_circle(1, 1.5 * PI).unwrap().to_filiform();
        assert!((bottom[0] - PI / 2.0).abs() < 1e-12);
        assert!(bottom[1].abs() < 1e-11);
        assert!((bottom[2] + PI.powi(4) / 16.0).abs() < 1e-11);
    }

    #[test]
    fn circle_seams_agree() {
        for k in 1..=4 {
            let fk = make_fk(k).unwrap();
            let a = embed_circle_with(&fk, k, PI).unwrap();
            let b = jet_to_point(&fk, &[PI], k).unwrap().negate_jet();
            assert!(a.max_abs_diff(&b) <= 1e-12);
            let c = embed_circle_with(&fk, k, 2.0 * PI).unwrap();
            assert!(c.max_abs_diff(&embed_circle_with(&fk, k, 0.0).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn sphere_embedding_poles_and_equator() {
        let body = BodyFunction::assemble(2, 2, false).unwrap();
        let zero = crate::multiindex::MultiIndex::zero(2);
        let north = embed_sphere(&body, &polar_lift(&[0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(north.u_at(&zero).unwrap(), 1.0);
        let south = SpherePoint::from_ambient(&[0.0, 0.0, -1.0]).unwrap();
        assert_eq!(
            embed_sphere(&body, &south).unwrap().u_at(&zero).unwrap(),
            -1.0
        );
        let eq = SpherePoint::from_ambient(&[0.6, -0.8, 0.0]).unwrap();
        let p = embed_sphere(&body, &eq).unwrap();
        assert_eq!(p.u().len(), enumerate_up_to(2, 2).len());
        assert!(p.u().iter().all(|v| v.abs() <= 1e-12));
        assert!((p.x()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_map(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(lambda_map(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        let d = lambda_map(&[1.0, 1.0]).unwrap();
        assert!((d[0] - SQRT_2 / 2.0).abs() < 1e-15 && (d[1] - SQRT_2 / 2.0).abs() < 1e-15);
        assert!(lambda_map(&[1.5, 0.0]).is_err());
        assert!(lambda_inv(&[0.9, 0.9]).is_err());
        let x = [0.3, -0.7, 0.2];
        let back = lambda_inv(&lambda_map(&x).unwrap()).unwrap();
        assert!(manhattan(&back, &x) < 1e-15);
    }

    #[test]
    fn lambda_jacobian_matches_finite_differences() {
        let x = [0.35, -0.6, 0.1];
        let jac = lambda_jacobian(&x);
        let h = 1e-6;
        for j in 0..3 {
            let mut a = x;
            let mut b = x;
            a[j] += h;
            b[j] -= h;
            let (la, lb) = (lambda_map(&a).unwrap(), lambda_map(&b).unwrap());
            for m in 0..3 {
                let fd = (la[m] - lb[m]) / (2.0 * h);
                assert!((fd - jac[m][j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(
            cylinder_proj(&[0.0, 0.0], 0.3).unwrap(),
            vec![0.0, 0.0, 0.3]
        );
        for s in [-1.0, 0.0, 0.7] {
            let p = cylinder_proj(&[0.6, 0.8], s).unwrap();
            assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
            assert_eq!(p[2], 0.0);
        }
        let half = cylinder_proj(&[0.5, 0.0], 0.0).unwrap();
        assert!((half[0] - SQRT_2 / 2.0).abs() < 1e-15 && half[2] == 0.0);
        assert!(cylinder_proj(&[1.0, 1.0], 0.0).is_err());
        assert!(cylinder_proj(&[0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn big_lambda_appends_height() {
        assert_eq!(big_lambda(&[1.0, 0.0], -0.5).unwrap(), vec![1.0, 0.0, -0.5]);
        assert!(big_lambda(&[0.0, 0.0], 1.5).is_err());
    }
}
