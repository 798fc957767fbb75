//! Lipschitz differential forms on the cube `[−1,1]^{n+1}`: interior and
//! boundary integrals, the obstruction integral `∫ λ₁dλ₂∧⋯∧dλₙ∧df̄`, its
//! `M`-scaling law, and the comass bound for `dx₁∧⋯∧dxₙ∧du₀`.

mod functions;
mod integrate;
mod quadrature;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::embeddings::{
    BodyFunction, ALPHA_INNER_RADIUS, ALPHA_OUTER_RADIUS, BETA_CENTER, BETA_HALF_WIDTH,
};
use crate::error::{invalid, Result};
use crate::jetgroup::{GroupParams, JetPoint};
use crate::multiindex::MultiIndex;

pub use functions::{
    BarExtension, BarFunction, BarVariant, Coordinate, LambdaComponent, Polynomial, Scaled,
};
pub use integrate::{
    det, face_order, face_sign, integrate_boundary, integrate_face, integrate_interior, CellLayout,
    CubeFunction, Differentiation, FormDomain, FormIntegralSpec, IntegralValue,
};
pub use quadrature::GaussRule;

/// Radii of `|λ(x)| = |x_i|` where the body function changes character.
pub fn obstruction_radial_breaks() -> Vec<f64> {
    let mut b = vec![
        BETA_CENTER - BETA_HALF_WIDTH,
        ALPHA_INNER_RADIUS,
        BETA_CENTER + BETA_HALF_WIDTH,
        ALPHA_OUTER_RADIUS,
    ];
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn obstruction_functions(body: &BodyFunction, variant: BarVariant) -> Vec<Arc<dyn CubeFunction>> {
    let n = body.n();
    let mut fs: Vec<Arc<dyn CubeFunction>> = (0..n)
        .map(|i| Arc::new(LambdaComponent { i, n }) as Arc<dyn CubeFunction>)
        .collect();
    fs.push(Arc::new(BarFunction {
        f: body.expr().clone(),
        n,
        variant,
    }));
    fs
}

fn sector_cells(n: usize) -> CellLayout {
    CellLayout::SectorPyramids {
        dims: n,
        radial_breaks: obstruction_radial_breaks(),
    }
}

/// The boundary spec for `λ₁dλ₂∧⋯∧dλₙ∧df̄`.
pub fn obstruction_spec(
    body: &BodyFunction,
    resolution: usize,
    variant: BarVariant,
) -> FormIntegralSpec {
    FormIntegralSpec::new(
        obstruction_functions(body, variant),
        FormDomain::CubeBoundary,
        resolution,
    )
    .with_cells(sector_cells(body.n()))
}

/// `∫_{∂[−1,1]^{n+1}} λ₁dλ₂∧⋯∧dλₙ∧df̄`.
pub fn obstruction_integral(body: &BodyFunction, resolution: usize) -> Result<IntegralValue> {
    integrate_boundary(&obstruction_spec(body, resolution, BarVariant::Odd))
}

/// Same integral with `f̄` replaced by `+f∘λ` on both horizontal faces.
pub fn obstruction_even_variant(body: &BodyFunction, resolution: usize) -> Result<IntegralValue> {
    integrate_boundary(&obstruction_spec(body, resolution, BarVariant::Even))
}

/// Per-face values `(l, m, value)` over the `2n` side faces `x_l = m`, `l < n`.
pub fn obstruction_side_faces(
    body: &BodyFunction,
    resolution: usize,
) -> Result<Vec<(usize, f64, IntegralValue)>> {
    let spec = obstruction_spec(body, resolution, BarVariant::Odd);
    face_order(body.n() + 1)
        .filter(|&(l, _)| l < body.n())
        .map(|(l, m)| Ok((l, m, integrate_face(&spec, l, m)?)))
        .collect()
}

/// Interior integral of `dλ₁∧⋯∧dλₙ∧d(t·f∘λ)`, the Stokes partner of the
/// obstruction integral.
pub fn obstruction_interior(body: &BodyFunction, resolution: usize) -> Result<IntegralValue> {
    let n = body.n();
    let mut fs: Vec<Arc<dyn CubeFunction>> = (0..n)
        .map(|i| Arc::new(LambdaComponent { i, n }) as Arc<dyn CubeFunction>)
        .collect();
    fs.push(Arc::new(BarExtension {
        f: body.expr().clone(),
        n,
    }));
    let spec =
        FormIntegralSpec::new(fs, FormDomain::CubeInterior, resolution).with_cells(sector_cells(n));
    integrate_interior(&spec)
}

/// `|S^{m}|`, the area of the unit `m`-sphere.
pub fn sphere_area(m: usize) -> f64 {
    use std::f64::consts::PI;
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * sphere_area(m - 2),
    }
}

/// `2∫_{Bⁿ} f` by one-dimensional Gauss quadrature in the radius; valid when
/// `f` is radial (no correction bump).
pub fn radial_ball_integral(body: &BodyFunction, resolution: usize) -> Result<f64> {
    if body.beta().is_some() {
        return Err(invalid(
            "radial quadrature needs a radial body (no correction bump)",
        ));
    }
    let n = body.n();
    let rule = GaussRule::get(resolution.max(2));
    let mut radii = vec![0.0];
    radii.extend(obstruction_radial_breaks());
    radii.push(1.0);
    let mut total = 0.0;
    for w in radii.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let r = mid + half * x;
            let mut p = vec![0.0; n];
            p[0] = r;
            total += half * wt * r.powi(n as i32 - 1) * body.value(&p)?;
        }
    }
    Ok(2.0 * sphere_area(n - 1) * total)
}

/// One row of a scaling table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingRow {
    pub m: f64,
    pub integral: f64,
    pub error: f64,
    /// `M^{n+k+1}` times the `M = 1` integral.
    pub predicted: f64,
    pub relative_error: f64,
    /// `M^{1+k/(n+1)}·|base|^{1/(n+1)}`.
    pub lower_bound: f64,
}

/// Where the lower-bound curve overtakes `M·λ̂`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Crossover {
    pub lambda_hat: f64,
    pub m_star: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingStudy {
    pub n: usize,
    pub k: usize,
    pub resolution: usize,
    pub base: IntegralValue,
    pub rows: Vec<ScalingRow>,
    pub expected_exponent: f64,
    pub fitted_exponent: f64,
    pub crossovers: Vec<Crossover>,
}

/// `M^{1+k/(n+1)}·|base|^{1/(n+1)}`.
pub fn scaling_lower_bound(m: f64, base: f64, n: usize, k: usize) -> f64 {
    let d = (n + 1) as f64;
    m.powf(1.0 + k as f64 / d) * base.abs().powf(1.0 / d)
}

/// Smallest `M` with `scaling_lower_bound(M) ≥ M·λ̂`.
pub fn crossover(lambda_hat: f64, base: f64, n: usize, k: usize) -> Result<f64> {
    if !(lambda_hat > 0.0) || base == 0.0 || k == 0 {
        return Err(invalid("crossover needs λ̂ > 0, a nonzero base and k ≥ 1"));
    }
    let d = (n + 1) as f64;
    Ok((lambda_hat / base.abs().powf(1.0 / d)).powf(d / k as f64))
}

/// Least-squares slope of `log|y|` against `log x`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(invalid("need at least two points to fit an exponent"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.abs().ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("exponent fit needs at least two distinct M values"));
    }
    Ok(sxy / sxx)
}

/// Boundary integral of `(Mλ₁, …, Mλₙ, M^{k+1} f̄)` for each `M`.
pub fn scaling_study(
    body: &BodyFunction,
    ms: &[f64],
    resolution: usize,
    lambda_hats: &[f64],
) -> Result<ScalingStudy> {
    if ms.is_empty() || ms.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(invalid("M values must be positive and finite"));
    }
    let (n, k) = (body.n(), body.k());
    let base = obstruction_integral(body, resolution)?;
    let expected = (n + k + 1) as f64;
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        let fs: Vec<Arc<dyn CubeFunction>> = obstruction_functions(body, BarVariant::Odd)
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                let factor = if i < n { m } else { m.powi(k as i32 + 1) };
                Arc::new(Scaled { factor, inner: g }) as Arc<dyn CubeFunction>
            })
            .collect();
        let spec = FormIntegralSpec::new(fs, FormDomain::CubeBoundary, resolution)
            .with_cells(sector_cells(n));
        let v = integrate_boundary(&spec)?;
        let predicted = m.powf(expected) * base.value;
        rows.push(ScalingRow {
            m,
            integral: v.value,
            error: v.error,
            predicted,
            relative_error: ((v.value - predicted) / predicted).abs(),
            lower_bound: scaling_lower_bound(m, base.value, n, k),
        });
    }
    let fitted = if rows.len() >= 2 {
        fit_exponent(&rows.iter().map(|r| (r.m, r.integral)).collect::<Vec<_>>())?
    } else {
        f64::NAN
    };
    let crossovers = lambda_hats
        .iter()
        .map(|&l| {
            Ok(Crossover {
                lambda_hat: l,
                m_star: crossover(l, base.value, n, k)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScalingStudy {
        n,
        k,
        resolution,
        base,
        rows,
        expected_exponent: expected,
        fitted_exponent: fitted,
        crossovers,
    })
}

/// Result of [`comass_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ComassReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_abs: f64,
    /// `|ω|` on `(X₁, …, Xₙ, ∂/∂u₀)` at the identity.
    pub extremal: f64,
}

/// Frame-coefficient vectors (length `n + #indices`, `X_j` first, then
/// `∂/∂u_I` in canonical order) to `(dx₁, …, dxₙ, du₀)` components at `p`.
fn omega_row(p: &JetPoint, a: &[f64]) -> Vec<f64> {
    let params = p.params();
    let n = params.n;
    let layout = p.layout();
    let zero = layout.position(&MultiIndex::zero(n)).expect("zero index");
    let mut row: Vec<f64> = a[..n].to_vec();
    let mut du0 = a[n + zero];
    for (j, &aj) in a[..n].iter().enumerate() {
        let ej = layout
            .position(&MultiIndex::unit(n, j))
            .expect("unit index");
        du0 += p.u()[ej] * aj;
    }
    row.push(du0);
    row
}

/// `ω_p(v₁, …, v_{n+1})` for vectors given by frame coefficients.
pub fn omega(p: &JetPoint, tuple: &[Vec<f64>]) -> Result<f64> {
    let params = p.params();
    let dim = params.n + params.jet_len();
    if tuple.len() != params.n + 1 || tuple.iter().any(|v| v.len() != dim) {
        return Err(invalid(format!(
            "ω takes {} vectors of length {dim}",
            params.n + 1
        )));
    }
    Ok(det(tuple.iter().map(|v| omega_row(p, v)).collect()))
}

fn gram_schmidt(mut vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for i in 0..vs.len() {
        for j in 0..i {
            let d: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
            let (head, tail) = vs.split_at_mut(i);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= d * y;
            }
        }
        let norm = vs[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        vs[i].iter_mut().for_each(|x| *x /= norm);
    }
    vs
}

/// Sample random points and frame-orthonormal `(n+1)`-tuples and return the
/// largest `|ω|`. Half the tuples are near-extremal: rotations within
/// `span{X₁, …, Xₙ, ∂/∂u₀}` plus small noise.
pub fn comass_check(n: usize, k: usize, samples: usize, seed: u64) -> Result<ComassReport> {
    if samples == 0 {
        return Err(invalid("comass check needs at least one sample"));
    }
    let params = GroupParams::new(n, k)?;
    let layout = params.layout();
    let dim = n + params.jet_len();
    let zero = layout.position(&MultiIndex::zero(n)).expect("zero index");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs: f64 = 0.0;
    for s in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let u: Vec<f64> = (0..params.jet_len())
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let p = JetPoint::new(params, x, u)?;
        let near_extremal = s % 2 == 1;
        let raw: Vec<Vec<f64>> = (0..=n)
            .map(|_| {
                (0..dim)
                    .map(|c| {
                        let g: f64 = rng.sample(StandardNormal);
                        let on_span = c < n || c == n + zero;
                        if near_extremal && !on_span {
                            1e-3 * g
                        } else {
                            g
                        }
                    })
                    .collect()
            })
            .collect();
        let tuple = gram_schmidt(raw);
        max_abs = max_abs.max(omega(&p, &tuple)?.abs());
    }
    Ok(ComassReport {
        n,
        k,
        samples,
        seed,
        max_abs,
        extremal: comass_extremal(n, k)?,
    })
}

/// `|ω|` on `(X₁, …, Xₙ, ∂/∂u₀)` at the identity.
pub fn comass_extremal(n: usize, k: usize) -> Result<f64> {
    let params = GroupParams::new(n, k)?;
    let dim = n + params.jet_len();
    let zero = params
        .layout()
        .position(&MultiIndex::zero(n))
        .expect("zero index");
    let tuple: Vec<Vec<f64>> = (0..=n)
        .map(|r| {
            let mut v = vec![0.0; dim];
            v[if r < n { r } else { n + zero }] = 1.0;
            v
        })
        .collect();
    Ok(omega(&JetPoint::identity(params), &tuple)?.abs())
}

/// One randomized Stokes identity.
#[derive(Debug, Clone, Serialize)]
pub struct StokesCase {
    pub dim: usize,
    pub functions: Vec<Vec<(f64, Vec<u32>)>>,
    pub interior: IntegralValue,
    pub boundary: IntegralValue,
    pub pass: bool,
}

/// A random polynomial in `dim` variables of degree ≤ `max_degree`.
pub fn random_polynomial<R: Rng>(rng: &mut R, dim: usize, max_degree: u32) -> Polynomial {
    let terms = rng.random_range(1..=4);
    let terms = (0..terms)
        .map(|_| {
            let mut e = vec![0u32; dim];
            let degree = rng.random_range(0..=max_degree);
            for _ in 0..degree {
                e[rng.random_range(0..dim)] += 1;
            }
            (rng.random_range(-1.0..1.0), e)
        })
        .collect();
    Polynomial::new(dim, terms)
}

/// `count` random polynomial specs (degree ≤ 3, cube dimensions cycling
/// through `2..=max_dim`), each integrated over the interior and the boundary.
pub fn stokes_suite(
    count: usize,
    seed: u64,
    resolution: usize,
    max_dim: usize,
) -> Result<Vec<StokesCase>> {
    if max_dim < 2 {
        return Err(invalid("Stokes cases need cube dimension ≥ 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|c| {
            let dim = 2 + c % (max_dim - 1);
            let polys: Vec<Polynomial> = (0..dim)
                .map(|_| random_polynomial(&mut rng, dim, 3))
                .collect();
            stokes_case(&polys, resolution)
        })
        .collect()
}

/// Interior and boundary integrals of `dg₁∧⋯∧dg_N` for polynomial `g`.
pub fn stokes_case(polys: &[Polynomial], resolution: usize) -> Result<StokesCase> {
    let fs: Vec<Arc<dyn CubeFunction>> = polys
        .iter()
        .map(|p| Arc::new(p.clone()) as Arc<dyn CubeFunction>)
        .collect();
    let interior = integrate_interior(&FormIntegralSpec::new(
        fs.clone(),
        FormDomain::CubeInterior,
        resolution,
    ))?;
    let boundary = integrate_boundary(&FormIntegralSpec::new(
        fs,
        FormDomain::CubeBoundary,
        resolution,
    ))?;
    Ok(StokesCase {
        dim: polys.len(),
        functions: polys.iter().map(|p| p.terms().to_vec()).collect(),
        pass: (interior.value - boundary.value).abs() <= interior.error + boundary.error,
        interior,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn comass_extremal_tuple_is_one() {
        for (n, k) in [(1, 1), (2, 1), (2, 3)] {
            assert!((comass_extremal(n, k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn comass_kills_higher_jet_directions() {
        let params = GroupParams::new(2, 2).unwrap();
        let layout = params.layout();
        let dim = 2 + params.jet_len();
        let e = |c: usize| {
            let mut v = vec![0.0; dim];
            v[c] = 1.0;
            v
        };
        let i11 = layout.position(&MultiIndex::new(vec![1, 1])).unwrap();
        let p = JetPoint::identity(params);
        assert_eq!(omega(&p, &[e(0), e(1), e(2 + i11)]).unwrap(), 0.0);
    }

    #[test]
    fn comass_bound_holds_on_samples() {
        let r = comass_check(2, 1, 500, 3).unwrap();
        assert!(r.max_abs <= 1.0 + 1e-9);
        assert!(r.max_abs > 0.9);
    }

    #[test]
    fn crossover_formula() {
        let (base, n, k) = (3.0, 2, 1);
        let m = crossover(10.0, base, n, k).unwrap();
        assert!((scaling_lower_bound(m, base, n, k) - 10.0 * m).abs() < 1e-9 * m);
        assert!(scaling_lower_bound(2.0 * m, base, n, k) > 20.0 * m);
        assert!(crossover(0.0, base, n, k).is_err());
    }

    #[test]
    fn exponent_fit_on_exact_power() {
        let pts: Vec<_> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&m: &f64| (m, -3.0 * m.powi(4)))
            .collect();
        assert!((fit_exponent(&pts).unwrap() - 4.0).abs() < 1e-12);
        assert!(fit_exponent(&pts[..1]).is_err());
    }

    #[test]
    fn small_stokes_suite() {
        for case in stokes_suite(4, 7, 8, 3).unwrap() {
            assert!(case.pass, "{case:?}");
        }
    }
}
