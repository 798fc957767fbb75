//! Randomized property suites shared by the command-line tool and the test
//! targets. Each returns the worst observed deviation so callers can report
//! it alongside a pass/fail verdict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::embeddings::{make_fk, BodyFunction};
use crate::error::{invalid, Result};
use crate::jetgroup::{
    box_distance, compose, dilate, homogeneous_norm, inverse, GroupParams, JetPoint, ABS_TOL,
    REL_TOL,
};
use crate::taylor::{jet_eval, SmoothExpr};

/// `|a − b| / (max(|a|,|b|) + ABS_TOL/REL_TOL)`: at most `REL_TOL` exactly
/// when `a` and `b` agree to the group comparison tolerance.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs().max(b.abs()) + ABS_TOL / REL_TOL)
}

fn point_deviation(p: &JetPoint, q: &JetPoint) -> f64 {
    p.coords()
        .zip(q.coords())
        .map(|(a, b)| relative_deviation(a, b))
        .fold(0.0, f64::max)
}

/// A point with every coordinate uniform in `[−1, 1]`.
pub fn random_point<R: Rng>(rng: &mut R, params: GroupParams) -> JetPoint {
    let x = (0..params.n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let u = (0..params.jet_len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    JetPoint::new(params, x, u).expect("finite coordinates of the right length")
}

/// Worst deviations of the group axioms over random samples.
#[derive(Debug, Clone, Serialize)]
pub struct GroupCheckReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub associativity: f64,
    pub identity: f64,
    pub inverse: f64,
    pub dilation_homomorphism: f64,
    pub dilation_composition: f64,
    pub left_invariance: f64,
    /// Largest `N(p⁻¹)/N(p)` seen; the max-norm is only quasi-symmetric.
    pub quasi_symmetry: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Associativity, identity, inverse and dilation checks on `trials` random
/// triples.
pub fn group_checks(params: GroupParams, trials: usize, seed: u64) -> Result<GroupCheckReport> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = JetPoint::identity(params);
    let mut r = GroupCheckReport {
        n: params.n,
        k: params.k,
        trials,
        seed,
        associativity: 0.0,
        identity: 0.0,
        inverse: 0.0,
        dilation_homomorphism: 0.0,
        dilation_composition: 0.0,
        left_invariance: 0.0,
        quasi_symmetry: 0.0,
        tolerance: REL_TOL,
        pass: false,
    };
    for _ in 0..trials {
        let p = random_point(&mut rng, params);
        let q = random_point(&mut rng, params);
        let s = random_point(&mut rng, params);
        let eps = rng.random_range(0.1..10.0);
        let eta = rng.random_range(0.1..10.0);

        let lhs = compose(&compose(&p, &q)?, &s)?;
        let rhs = compose(&p, &compose(&q, &s)?)?;
        r.associativity = r.associativity.max(point_deviation(&lhs, &rhs));

        r.identity = r
            .identity
            .max(point_deviation(&compose(&e, &p)?, &p))
            .max(point_deviation(&compose(&p, &e)?, &p));

        let pi = inverse(&p);
        r.inverse = r
            .inverse
            .max(point_deviation(&compose(&p, &pi)?, &e))
            .max(point_deviation(&compose(&pi, &p)?, &e));

        let a = dilate(eps, &compose(&p, &q)?)?;
        let b = compose(&dilate(eps, &p)?, &dilate(eps, &q)?)?;
        r.dilation_homomorphism = r.dilation_homomorphism.max(point_deviation(&a, &b));

        let a = dilate(eps, &dilate(eta, &p)?)?;
        let b = dilate(eps * eta, &p)?;
        r.dilation_composition = r.dilation_composition.max(point_deviation(&a, &b));

        let d = box_distance(&p, &q)?;
        let dg = box_distance(&compose(&s, &p)?, &compose(&s, &q)?)?;
        r.left_invariance = r.left_invariance.max(relative_deviation(d, dg));

        let np = homogeneous_norm(&p);
        if np > 0.0 {
            r.quasi_symmetry = r.quasi_symmetry.max(homogeneous_norm(&pi) / np);
        }
    }
    r.pass = [
        r.associativity,
        r.identity,
        r.inverse,
        r.dilation_homomorphism,
        r.dilation_composition,
        r.left_invariance,
    ]
    .iter()
    .all(|&d| d <= REL_TOL);
    Ok(r)
}

/// Worst relative errors of the two homogeneity identities.
#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub epsilons: Vec<f64>,
    /// `|N(δ_ε p) − εN(p)| / (εN(p))`.
    pub norm: f64,
    /// `|d(δ_ε p, δ_ε q) − ε·d(p, q)| / (ε·d(p, q))`.
    pub box_distance: f64,
}

pub fn homogeneity_checks(
    params: GroupParams,
    samples: usize,
    epsilons: &[f64],
    seed: u64,
) -> Result<HomogeneityReport> {
    if samples == 0 || epsilons.is_empty() {
        return Err(invalid("need at least one sample and one ε"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_norm, mut worst_box): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let p = random_point(&mut rng, params);
        let q = random_point(&mut rng, params);
        for &eps in epsilons {
            let n0 = eps * homogeneous_norm(&p);
            let n1 = homogeneous_norm(&dilate(eps, &p)?);
            worst_norm = worst_norm.max((n1 - n0).abs() / n0);
            let d0 = eps * box_distance(&p, &q)?;
            let d1 = box_distance(&dilate(eps, &p)?, &dilate(eps, &q)?)?;
            worst_box = worst_box.max((d1 - d0).abs() / d0);
        }
    }
    Ok(HomogeneityReport {
        n: params.n,
        k: params.k,
        samples,
        epsilons: epsilons.to_vec(),
        norm: worst_norm,
        box_distance: worst_box,
    })
}

/// Named expressions exercising every node type, in `n` variables.
pub fn expression_suite(n: usize) -> Result<Vec<(String, SmoothExpr)>> {
    if n == 0 {
        return Err(invalid("suite dimension must be at least 1"));
    }
    let x = |j: usize| SmoothExpr::coord(j % n);
    let c = SmoothExpr::constant;
    let mut suite = vec![
        (
            "polynomial".to_string(),
            c(1.0) + x(0) * x(1).pow(2) - c(3.0) * x(0).pow(3) + x(n - 1),
        ),
        (
            "trig-exp".to_string(),
            x(0).sin() * x(1).cos() + (c(0.5) * x(0)).exp(),
        ),
        (
            "sqrt-recip".to_string(),
            (c(2.0) + x(0).pow(2)).sqrt(1.0) + (c(1.5) + x(1) * x(0)).recip(0.25),
        ),
        ("sigma".to_string(), (x(0) + c(0.5)).sigma() * x(1)),
        (
            "step".to_string(),
            (x(0).pow(2) + x(1).pow(2)).step(0.1, 0.6),
        ),
        ("f2".to_string(), make_fk(2)?),
    ];
    if n >= 2 {
        suite.push((
            "body-k2".to_string(),
            BodyFunction::assemble(n, 2, false)?.expr().clone(),
        ));
    }
    Ok(suite)
}

/// Worst first-order finite-difference disagreement for one expression.
#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub name: String,
    pub points: usize,
    /// `max |jet − fd| / max(|jet|, 1)` over points and coordinates.
    pub max_error: f64,
}

/// Compare `jet_eval` gradients with central differences (step `h`) at
/// `points` uniform points of `[−1,1]ⁿ`.
pub fn gradient_oracle(
    name: &str,
    g: &SmoothExpr,
    n: usize,
    points: usize,
    h: f64,
    seed: u64,
) -> Result<OracleResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let grad = jet_eval(g, &x, 1)?.gradient();
        let mut y = x.clone();
        for j in 0..n {
            y[j] = x[j] + h;
            let a = g.value(&y)?;
            y[j] = x[j] - h;
            let b = g.value(&y)?;
            y[j] = x[j];
            let fd = (a - b) / (2.0 * h);
            worst = worst.max((grad[j] - fd).abs() / grad[j].abs().max(1.0));
        }
    }
    Ok(OracleResult {
        name: name.to_string(),
        points,
        max_error: worst,
    })
}

/// Largest `|∂_I f|`, `|I| ≤ k`, at `points` random points of `S^{n−1}`.
pub fn equator_flatness(body: &BodyFunction, points: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = body.n();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let x: Vec<f64> = v.iter().map(|a| a / r).collect();
        let jet = jet_eval(body.expr(), &x, body.k())?;
        worst = jet.derivatives().iter().fold(worst, |m, d| m.max(d.abs()));
    }
    Ok(worst)
}
