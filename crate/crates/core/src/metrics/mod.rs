//! Distance brackets for jets and sampled biLipschitz distortion of the
//! embeddings.
//!
//! Jet-valued maps are measured with the box quasi-metric
//! [`box_distance`](crate::jetgroup::box_distance); constants reported here
//! are therefore relative to `d_box`, not to the sub-Riemannian distance.

mod sampler;

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::embeddings::{
    circle_distance, embed_circle_with, embed_sphere, lambda_map, make_fk, manhattan, polar_lift,
    BodyFunction, SpherePoint,
};
use crate::error::{invalid, Error, Result};
use crate::jetgroup::box_distance;
use crate::multiindex::{MultiIndex, MAX_JET_ORDER};
use crate::taylor::{jet_eval, jet_to_point, SmoothExpr};

pub use sampler::{log_uniform, SamplerSpec, ShiftedHalton, Stratum};

/// Golden-section steps after the equispaced scan in [`segment_lip_bound`].
const GOLDEN_STEPS: usize = 3;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `(1 + Σ_{|I|≤k} Σ_j (∂_{I+e_j} g)²)^{1/2}` at `x`.
fn lift_speed(g: &SmoothExpr, x: &[f64], k: usize) -> Result<f64> {
    let jet = jet_eval(g, x, k + 1)?;
    let layout = jet.layout();
    let mut s = 1.0;
    for (pos, d) in jet.derivatives().iter().enumerate().skip(1) {
        // number of (I, j) with I + e_j equal to this index
        let mult = layout
            .index(pos)
            .entries()
            .iter()
            .filter(|&&e| e > 0)
            .count();
        s += mult as f64 * d * d;
    }
    Ok(s.sqrt())
}

/// Upper bound for the sub-Riemannian distance between `j^k_x g` and
/// `j^k_y g`: the supremum of the horizontal lift speed along `[x, y]`
/// (equispaced scan plus golden-section refinement) times `|y − x|`.
pub fn segment_lip_bound(
    g: &SmoothExpr,
    x: &[f64],
    y: &[f64],
    k: usize,
    samples: usize,
) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(invalid("segment endpoints must share a positive dimension"));
    }
    if samples < 2 {
        return Err(invalid("segment bound needs at least two samples"));
    }
    if k == 0 || k > MAX_JET_ORDER {
        return Err(Error::OrderTooLarge {
            order: k,
            max: MAX_JET_ORDER,
        });
    }
    let at = |t: f64| -> Result<f64> {
        let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + t * (b - a)).collect();
        lift_speed(g, &p, k)
    };
    let ts: Vec<f64> = (0..samples)
        .map(|i| i as f64 / (samples - 1) as f64)
        .collect();
    let values = ts.iter().map(|&t| at(t)).collect::<Result<Vec<_>>>()?;
    let (imax, mut best) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let mut lo = ts[imax.saturating_sub(1)];
    let mut hi = ts[(imax + 1).min(samples - 1)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (at(c)?, at(d)?);
    best = best.max(fc).max(fd);
    for _ in 1..GOLDEN_STEPS {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = at(c)?;
            best = best.max(fc);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = at(d)?;
            best = best.max(fd);
        }
    }
    Ok(best * euclidean(x, y))
}

/// A map whose distortion can be scanned.
///
/// Domain coordinates used in witnesses:
/// - `circle`: `[angle]`, geodesic metric.
/// - `sphere`: `[x₁, …, xₙ, θ, side]` with `x ∈ S^{n−1}`, `θ ∈ [0,1]`,
///   `side = ±1`; the point is `(x·sin(πθ/2), side·cos(πθ/2))`; Manhattan
///   metric on the ambient coordinates.
/// - `polar-lift`, `identity`: a point of the closed unit ball, Manhattan.
/// - `lambda`: a point of `[−1,1]ⁿ`, Euclidean.
#[derive(Debug, Clone)]
pub enum ScanMap {
    Circle { k: usize, fk: SmoothExpr },
    Sphere { body: Arc<BodyFunction> },
    PolarLift { n: usize },
    Lambda { n: usize },
    Identity { n: usize },
}

const MAX_SCAN_DIM: usize = 8;

fn check_scan_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SCAN_DIM {
        return Err(invalid(format!(
            "scan dimension must be in 1..={MAX_SCAN_DIM}"
        )));
    }
    Ok(())
}

impl ScanMap {
    pub fn circle(k: usize) -> Result<Self> {
        Ok(ScanMap::Circle { k, fk: make_fk(k)? })
    }

    pub fn sphere(body: Arc<BodyFunction>) -> Result<Self> {
        check_scan_dim(body.n())?;
        Ok(ScanMap::Sphere { body })
    }

    pub fn polar_lift(n: usize) -> Result<Self> {
        check_scan_dim(n)?;
        Ok(ScanMap::PolarLift { n })
    }

    pub fn lambda(n: usize) -> Result<Self> {
        check_scan_dim(n)?;
        Ok(ScanMap::Lambda { n })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_scan_dim(n)?;
        Ok(ScanMap::Identity { n })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScanMap::Circle { .. } => "circle",
            ScanMap::Sphere { .. } => "sphere",
            ScanMap::PolarLift { .. } => "polar-lift",
            ScanMap::Lambda { .. } => "lambda",
            ScanMap::Identity { .. } => "identity",
        }
    }

    /// Dimension `n` of the underlying ball, cube or sphere.
    pub fn n(&self) -> usize {
        match self {
            ScanMap::Circle { .. } => 1,
            ScanMap::Sphere { body } => body.n(),
            ScanMap::PolarLift { n } | ScanMap::Lambda { n } | ScanMap::Identity { n } => *n,
        }
    }

    /// Jet order for jet-valued maps.
    pub fn k(&self) -> Option<usize> {
        match self {
            ScanMap::Circle { k, .. } => Some(*k),
            ScanMap::Sphere { body } => Some(body.k()),
            _ => None,
        }
    }

    fn halton_dims(&self) -> usize {
        2 * self.n() + 6
    }

    /// Distance between two domain points.
    pub fn domain_distance(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        Ok(match self {
            ScanMap::Circle { .. } => circle_distance(p[0], q[0]),
            ScanMap::Sphere { .. } => {
                manhattan(&sphere_point(p)?.ambient, &sphere_point(q)?.ambient)
            }
            ScanMap::PolarLift { .. } | ScanMap::Identity { .. } => manhattan(p, q),
            ScanMap::Lambda { .. } => euclidean(p, q),
        })
    }

    /// Distance between the images of two domain points.
    pub fn image_distance(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        match self {
            ScanMap::Circle { k, fk } => box_distance(
                &embed_circle_with(fk, *k, p[0])?,
                &embed_circle_with(fk, *k, q[0])?,
            ),
            ScanMap::Sphere { body } => box_distance(
                &embed_sphere(body, &sphere_point(p)?)?,
                &embed_sphere(body, &sphere_point(q)?)?,
            ),
            ScanMap::PolarLift { .. } => {
                Ok(manhattan(&polar_lift(p)?.ambient, &polar_lift(q)?.ambient))
            }
            ScanMap::Lambda { .. } => Ok(euclidean(&lambda_map(p)?, &lambda_map(q)?)),
            ScanMap::Identity { .. } => Ok(manhattan(p, q)),
        }
    }

    /// `d_image / d_domain`, or `None` for coincident points.
    pub fn ratio(&self, p: &[f64], q: &[f64]) -> Result<Option<f64>> {
        let d = self.domain_distance(p, q)?;
        if d == 0.0 {
            return Ok(None);
        }
        Ok(Some(self.image_distance(p, q)? / d))
    }

    /// The `index`-th sample pair.
    pub fn sample_pair(&self, halton: &ShiftedHalton, index: usize) -> (Vec<f64>, Vec<f64>) {
        let stratum = Stratum::of_index(index);
        let u = halton.point((index / Stratum::ALL.len()) as u64 + 1);
        match self {
            ScanMap::Circle { .. } => circle_pair(stratum, &u),
            ScanMap::Sphere { .. } => {
                let (a, b) = polar_pair(stratum, self.n(), &u);
                (a.encode(), b.encode())
            }
            ScanMap::PolarLift { .. } | ScanMap::Identity { .. } => {
                let (a, b) = polar_pair(stratum, self.n(), &u);
                (a.ball(), b.ball())
            }
            ScanMap::Lambda { .. } => cube_pair(stratum, self.n(), &u),
        }
    }
}

/// Decode the sphere witness encoding `[x…, θ, side]`.
pub fn sphere_point(p: &[f64]) -> Result<SpherePoint> {
    if p.len() < 3 {
        return Err(invalid("sphere encoding needs [x…, θ, side]"));
    }
    let n = p.len() - 2;
    SpherePoint::from_polar(&p[..n], p[n], p[n + 1] >= 0.0)
}

/// Polar parameters of a sampled sphere or ball point.
#[derive(Debug, Clone)]
struct Polar {
    dir: Vec<f64>,
    theta: f64,
    upper: bool,
}

impl Polar {
    fn encode(&self) -> Vec<f64> {
        let mut v = self.dir.clone();
        v.push(self.theta);
        v.push(if self.upper { 1.0 } else { -1.0 });
        v
    }

    fn ball(&self) -> Vec<f64> {
        self.dir.iter().map(|x| x * self.theta).collect()
    }
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r == 0.0 {
        let mut e = vec![0.0; v.len()];
        e[0] = 1.0;
        return e;
    }
    v.into_iter().map(|x| x / r).collect()
}

/// Direction from `n` uniforms via the cube `[−1,1]ⁿ`.
fn direction(u: &[f64]) -> Vec<f64> {
    unit(u.iter().map(|x| 2.0 * x - 1.0).collect())
}

/// `dir` tilted by `scale` towards the direction encoded by `u`.
fn perturb(dir: &[f64], u: &[f64], scale: f64) -> Vec<f64> {
    let d = direction(u);
    unit(dir.iter().zip(d).map(|(a, b)| a + scale * b).collect())
}

fn polar_pair(stratum: Stratum, n: usize, u: &[f64]) -> (Polar, Polar) {
    let (ua, ub, r) = (&u[..n], &u[n..2 * n], &u[2 * n..]);
    let near_equator = |v: f64| 1.0 - log_uniform(v, -4.0, -1.0);
    let side = |v: f64| v < 0.5;
    let dir_a = direction(ua);
    match stratum {
        Stratum::NearSeam => {
            let dir_b = if r[5] < 0.5 {
                perturb(&dir_a, ub, log_uniform(r[4], -4.0, -1.0))
            } else {
                direction(ub)
            };
            (
                Polar {
                    dir: dir_a,
                    theta: near_equator(r[0]),
                    upper: side(r[2]),
                },
                Polar {
                    dir: dir_b,
                    theta: near_equator(r[1]),
                    upper: side(r[3]),
                },
            )
        }
        Stratum::SeamToFar => (
            Polar {
                dir: dir_a,
                theta: near_equator(r[0]),
                upper: side(r[2]),
            },
            Polar {
                dir: direction(ub),
                theta: 0.9 * r[1],
                upper: side(r[3]),
            },
        ),
        Stratum::Antipodal => {
            let theta = r[0];
            let anti: Vec<f64> = dir_a.iter().map(|x| -x).collect();
            let s = 0.05 * r[4];
            (
                Polar {
                    dir: dir_a,
                    theta,
                    upper: side(r[2]),
                },
                Polar {
                    dir: perturb(&anti, ub, s),
                    theta: (theta + s * (2.0 * r[1] - 1.0)).clamp(0.0, 1.0),
                    upper: !side(r[2]),
                },
            )
        }
        Stratum::Uniform => (
            Polar {
                dir: dir_a,
                theta: r[0],
                upper: side(r[2]),
            },
            Polar {
                dir: direction(ub),
                theta: r[1],
                upper: side(r[3]),
            },
        ),
        Stratum::Local => {
            let s = log_uniform(r[4], -2.0, -1.0);
            let theta = r[0];
            (
                Polar {
                    dir: dir_a.clone(),
                    theta,
                    upper: side(r[2]),
                },
                Polar {
                    dir: perturb(&dir_a, ub, s),
                    theta: (theta + s * (2.0 * r[1] - 1.0)).clamp(0.0, 1.0),
                    upper: side(r[2]),
                },
            )
        }
    }
}

fn circle_pair(stratum: Stratum, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let seam = if u[0] < 0.5 { 0.0 } else { PI };
    let signed = |m: f64, s: f64| if s < 0.5 { -m } else { m };
    let near = |v: f64, s: f64| seam + signed(log_uniform(v, -4.0, -1.0), s);
    let (a, b) = match stratum {
        Stratum::NearSeam => (near(u[1], u[3]), near(u[2], u[4])),
        Stratum::SeamToFar => {
            let far = 0.3 + (PI - 0.6) * u[2] + if u[4] < 0.5 { 0.0 } else { PI };
            (near(u[1], u[3]), far)
        }
        Stratum::Antipodal => {
            let a = 2.0 * PI * u[1];
            (a, a + PI + 0.2 * (u[2] - 0.5))
        }
        Stratum::Uniform => (2.0 * PI * u[1], 2.0 * PI * u[2]),
        Stratum::Local => {
            let a = 2.0 * PI * u[1];
            (a, a + signed(log_uniform(u[2], -2.0, -1.0), u[3]))
        }
    };
    (vec![a.rem_euclid(2.0 * PI)], vec![b.rem_euclid(2.0 * PI)])
}

fn cube_pair(stratum: Stratum, n: usize, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (ua, ub, r) = (&u[..n], &u[n..2 * n], &u[2 * n..]);
    let cube = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| 2.0 * x - 1.0).collect() };
    let clamp = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(-1.0, 1.0)).collect() };
    let shift = |p: &[f64], s: f64| -> Vec<f64> {
        clamp(
            p.iter()
                .zip(direction(ub))
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    };
    let a = cube(ua);
    match stratum {
        Stratum::NearSeam if n >= 2 => {
            // onto the boundary between sectors i and j, then straddle it
            let i = ((r[0] * n as f64) as usize).min(n - 1);
            let j = (i + 1 + ((r[1] * (n - 1) as f64) as usize).min(n - 2)) % n;
            let mut a = a;
            a[j] = a[i].abs() * if r[2] < 0.5 { -1.0 } else { 1.0 };
            let s = log_uniform(r[3], -4.0, -1.0);
            (shift(&a, 0.5 * s), shift(&a, -0.5 * s))
        }
        Stratum::NearSeam | Stratum::SeamToFar => {
            let s = log_uniform(r[3], -4.0, -1.0);
            let near: Vec<f64> = direction(ua).into_iter().map(|x| s * x).collect();
            (near, cube(ub))
        }
        Stratum::Antipodal => {
            let b: Vec<f64> = a.iter().map(|x| -x).collect();
            let b = shift(&b, 0.05 * r[4]);
            (a, b)
        }
        Stratum::Uniform => (a, cube(ub)),
        Stratum::Local => {
            let b = shift(&a, log_uniform(r[4], -2.0, -1.0));
            (a, b)
        }
    }
}

/// A pair that realizes a reported ratio.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub index: usize,
    pub stratum: Stratum,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub ratio: f64,
}

/// Running extremes after the first `pairs` samples.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistoryPoint {
    pub pairs: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumSummary {
    pub stratum: Stratum,
    pub count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Sampled distortion of a map.
#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    pub map: String,
    pub n: usize,
    pub k: Option<usize>,
    pub seed: u64,
    pub pairs: usize,
    /// Pairs with a positive domain distance.
    pub count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: Witness,
    pub argmax: Witness,
    pub strata: Vec<StratumSummary>,
    pub history: Vec<HistoryPoint>,
}

impl DistortionReport {
    /// Relative change of the minimum between the last two checkpoints.
    pub fn min_drift(&self) -> Option<f64> {
        let h = &self.history;
        (h.len() >= 2).then(|| {
            let (a, b) = (h[h.len() - 2].min_ratio, h[h.len() - 1].min_ratio);
            (a - b).abs() / b.abs()
        })
    }

    /// Relative change of the maximum between the last two checkpoints.
    pub fn max_drift(&self) -> Option<f64> {
        let h = &self.history;
        (h.len() >= 2).then(|| {
            let (a, b) = (h[h.len() - 2].max_ratio, h[h.len() - 1].max_ratio);
            (a - b).abs() / b.abs()
        })
    }
}

/// Recompute a witness ratio.
pub fn replay(map: &ScanMap, w: &Witness) -> Result<f64> {
    map.ratio(&w.p, &w.q)?
        .ok_or_else(|| invalid("witness points coincide"))
}

/// Min and max of `d_image / d_domain` over the sampler's pairs.
pub fn distortion_scan(map: &ScanMap, spec: &SamplerSpec) -> Result<DistortionReport> {
    if spec.pairs == 0 {
        return Err(invalid("distortion scan needs at least one pair"));
    }
    let halton = ShiftedHalton::new(map.halton_dims(), spec.seed);
    let ratios: Vec<Option<f64>> = (0..spec.pairs)
        .into_par_iter()
        .map(|i| {
            let (p, q) = map.sample_pair(&halton, i);
            map.ratio(&p, &q)
        })
        .collect::<Result<_>>()?;
    let witness = |i: usize, ratio: f64| {
        let (p, q) = map.sample_pair(&halton, i);
        Witness {
            index: i,
            stratum: Stratum::of_index(i),
            p,
            q,
            ratio,
        }
    };

    let mut min = (usize::MAX, f64::INFINITY);
    let mut max = (usize::MAX, f64::NEG_INFINITY);
    let mut count = 0;
    let mut strata: Vec<StratumSummary> = Stratum::ALL
        .iter()
        .map(|&s| StratumSummary {
            stratum: s,
            count: 0,
            min_ratio: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
        })
        .collect();
    let checkpoints = spec.checkpoints();
    let mut history = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    for (i, r) in ratios.iter().enumerate() {
        if let Some(r) = *r {
            if !r.is_finite() {
                return Err(invalid(format!("non-finite ratio at pair {i}")));
            }
            count += 1;
            if r < min.1 {
                min = (i, r);
            }
            if r > max.1 {
                max = (i, r);
            }
            let s = &mut strata[i % Stratum::ALL.len()];
            s.count += 1;
            s.min_ratio = s.min_ratio.min(r);
            s.max_ratio = s.max_ratio.max(r);
        }
        if next < checkpoints.len() && i + 1 == checkpoints[next] {
            history.push(HistoryPoint {
                pairs: i + 1,
                min_ratio: min.1,
                max_ratio: max.1,
            });
            next += 1;
        }
    }
    if count == 0 {
        return Err(invalid("every sampled pair was degenerate"));
    }
    Ok(DistortionReport {
        map: map.name().to_string(),
        n: map.n(),
        k: map.k(),
        seed: spec.seed,
        pairs: spec.pairs,
        count,
        min_ratio: min.1,
        max_ratio: max.1,
        argmin: witness(min.0, min.1),
        argmax: witness(max.0, max.1),
        strata,
        history,
    })
}

/// `π^{k+1}(k+1)!/2`, the slope in the linear lower bound for `f_k^{(k)}`.
pub fn linear_slope(k: usize) -> f64 {
    let fact: f64 = (1..=k + 1).map(|i| i as f64).product();
    PI.powi(k as i32 + 1) * fact / 2.0
}

/// `f_k^{(k)}(θ)`.
pub fn fk_kth_derivative(fk: &SmoothExpr, k: usize, theta: f64) -> Result<f64> {
    let jet = jet_eval(fk, &[theta], k)?;
    Ok(jet.derivatives()[k])
}

/// Largest dyadic `ε ≤ 1/2` such that `f_k^{(k)}(θ) ≥ linear_slope(k)·θ` on
/// a 1000-point grid of `(0, ε]`.
pub fn estimate_linear_epsilon(k: usize) -> Result<f64> {
    let fk = make_fk(k)?;
    let slope = linear_slope(k);
    let mut eps: f64 = 0.5;
    while eps > 1e-6 {
        let ok = (1..=1000).try_fold(true, |ok, j| -> Result<bool> {
            let t = eps * j as f64 / 1000.0;
            Ok(ok && fk_kth_derivative(&fk, k, t)? >= slope * t)
        })?;
        if ok {
            return Ok(eps);
        }
        eps /= 2.0;
    }
    Err(Error::Construction(format!(
        "no workable ε found for k = {k}"
    )))
}

/// Both sides of the near-seam lower bound for the circle embedding.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CaseIBound {
    pub theta: f64,
    pub eta: f64,
    /// `|f_k^{(k)}(θ) + f_k^{(k)}(η)|`.
    pub lhs: f64,
    /// `linear_slope(k)·(θ + η)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluate `|f_k^{(k)}(θ) + f_k^{(k)}(η)| ≥ linear_slope(k)·(θ + η)` for
/// `0 ≤ θ, η ≤ ε̂`.
pub fn case_i_lower_bound(k: usize, theta: f64, eta: f64, eps_hat: f64) -> Result<CaseIBound> {
    if !(theta >= 0.0 && eta >= 0.0) {
        return Err(invalid("angles must be nonnegative"));
    }
    if theta > eps_hat || eta > eps_hat {
        return Err(Error::OutOfRegime(format!(
            "angles ({theta}, {eta}) exceed the estimated ε = {eps_hat}"
        )));
    }
    let fk = make_fk(k)?;
    let lhs = (fk_kth_derivative(&fk, k, theta)? + fk_kth_derivative(&fk, k, eta)?).abs();
    let rhs = linear_slope(k) * (theta + eta);
    Ok(CaseIBound {
        theta,
        eta,
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

/// Sign and size of `∂^k f/∂x_i^k` near the unit sphere.
#[derive(Debug, Clone, Serialize)]
pub struct SignPatternReport {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub points: usize,
    /// `(point, coordinate)` pairs with `|x_i| > 1/(4√n)` that were checked.
    pub checks: usize,
    pub violations: usize,
    /// Extremes of `sign·∂^k f/∂x_i^k / (1 − |x|)`.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max(max_ratio, 1/min_ratio)`.
    pub c_hat: f64,
}

/// Expected sign of `∂^k f/∂x_i^k` near the sphere: `+` for even `k`,
/// `−sign(x_i)` for odd `k`.
pub fn expected_sign(k: usize, xi: f64) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -xi.signum()
    }
}

/// Sample `points` points with `1 − ε ≤ |x| < 1` and check the sign pattern
/// and linear size of the pure `k`-th derivatives.
pub fn derivative_sign_scan(
    body: &BodyFunction,
    eps: f64,
    points: usize,
    seed: u64,
) -> Result<SignPatternReport> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(invalid("ε must lie in (0, 1/2]"));
    }
    if points == 0 {
        return Err(invalid("sign scan needs at least one point"));
    }
    let (n, k) = (body.n(), body.k());
    let cutoff = 1.0 / (4.0 * (n as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<f64>> = (0..points)
        .map(|_| {
            let d = unit((0..n).map(|_| rng.sample(StandardNormal)).collect());
            // 1 − |x| uniform in (0, ε]
            let r = 1.0 - eps * (1.0 - rng.random::<f64>());
            d.into_iter().map(|x| x * r).collect()
        })
        .collect();
    let per_point: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|x| -> Result<Vec<f64>> {
            let jet = jet_eval(body.expr(), x, k)?;
            let gap = 1.0 - x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut out = Vec::new();
            for (i, &xi) in x.iter().enumerate() {
                if xi.abs() > cutoff {
                    let d = jet
                        .get(&MultiIndex::pure(n, i, k as u32))
                        .expect("order k index");
                    out.push(expected_sign(k, xi) * d / gap);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = per_point.into_iter().flatten().collect();
    let violations = ratios.iter().filter(|&&r| !(r > 0.0)).count();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SignPatternReport {
        n,
        k,
        eps,
        points,
        checks: ratios.len(),
        violations,
        min_ratio,
        max_ratio,
        c_hat: if min_ratio > 0.0 {
            max_ratio.max(1.0 / min_ratio)
        } else {
            f64::INFINITY
        },
    })
}

/// Largest dyadic `ε ≤ 1/2` for which [`derivative_sign_scan`] finds no
/// violation on `points` samples.
pub fn estimate_body_epsilon(body: &BodyFunction, points: usize, seed: u64) -> Result<f64> {
    let mut eps: f64 = 0.5;
    while eps > 1e-6 {
        if derivative_sign_scan(body, eps, points, seed)?.violations == 0 {
            return Ok(eps);
        }
        eps /= 2.0;
    }
    Err(Error::Construction(
        "no workable ε for the sign pattern".into(),
    ))
}

/// Ratios `d_box(j^k_a g, j^k_b g) / segment_lip_bound(g, a, b)`.
#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub pairs: usize,
    /// Largest ratio: one empirical constant for the whole sample.
    pub c_emp: f64,
    pub min_ratio: f64,
}

/// Bracket jets of `g` on the given segments.
pub fn bracketing(
    g: &SmoothExpr,
    k: usize,
    segments: &[(Vec<f64>, Vec<f64>)],
    samples: usize,
) -> Result<BracketReport> {
    if segments.is_empty() {
        return Err(invalid("bracketing needs at least one segment"));
    }
    let ratios: Vec<f64> = segments
        .par_iter()
        .map(|(a, b)| -> Result<f64> {
            let d = box_distance(&jet_to_point(g, a, k)?, &jet_to_point(g, b, k)?)?;
            Ok(d / segment_lip_bound(g, a, b, k, samples)?)
        })
        .collect::<Result<_>>()?;
    Ok(BracketReport {
        pairs: ratios.len(),
        c_emp: ratios.iter().copied().fold(0.0, f64::max),
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Same-hemisphere pairs for the sphere body, as ball preimages.
pub fn sphere_bracketing(
    body: &BodyFunction,
    pairs: usize,
    seed: u64,
    samples: usize,
) -> Result<BracketReport> {
    let n = body.n();
    let halton = ShiftedHalton::new(2 * n + 6, seed);
    let segments: Vec<(Vec<f64>, Vec<f64>)> = (0..pairs)
        .map(|i| {
            let u = halton.point((i / Stratum::ALL.len()) as u64 + 1);
            let (a, b) = polar_pair(Stratum::of_index(i), n, &u);
            (a.ball(), b.ball())
        })
        .filter(|(a, b)| a != b)
        .collect();
    bracketing(body.expr(), body.k(), &segments, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_bound_for_zero_and_f1() {
        let zero = SmoothExpr::constant(0.0);
        let b = segment_lip_bound(&zero, &[0.0, 0.0], &[0.3, 0.4], 2, 16).unwrap();
        assert!((b - 0.5).abs() < 1e-15);
        let f1 = make_fk(1).unwrap();
        let b = segment_lip_bound(&f1, &[0.0], &[0.1], 1, 256).unwrap();
        let expected = 0.1 * (1.0 + 4.0 * PI.powi(4)).sqrt();
        assert!((b - expected).abs() < 1e-3 * expected, "{b} vs {expected}");
        assert!(segment_lip_bound(&f1, &[0.0], &[0.1], 1, 1).is_err());
    }

    #[test]
    fn segment_bound_linear_scaling() {
        let g = SmoothExpr::coord(0) * SmoothExpr::constant(3.0) - SmoothExpr::coord(1);
        let a = segment_lip_bound(&g, &[0.0, 0.0], &[0.1, 0.2], 1, 8).unwrap();
        let b = segment_lip_bound(&g, &[0.0, 0.0], &[0.3, 0.6], 1, 8).unwrap();
        assert!((b - 3.0 * a).abs() < 1e-14);
    }

    #[test]
    fn identity_scan_is_isometric() {
        let r = distortion_scan(&ScanMap::identity(2).unwrap(), &SamplerSpec::new(500, 0)).unwrap();
        assert_eq!(r.min_ratio, 1.0);
        assert_eq!(r.max_ratio, 1.0);
    }

    #[test]
    fn scans_are_deterministic_and_replayable() {
        let map = ScanMap::circle(1).unwrap();
        let a = distortion_scan(&map, &SamplerSpec::new(2000, 5)).unwrap();
        let b = distortion_scan(&map, &SamplerSpec::new(2000, 5)).unwrap();
        assert_eq!(a.min_ratio, b.min_ratio);
        assert_eq!(a.argmax.index, b.argmax.index);
        assert!(a.min_ratio > 0.0);
        assert!((replay(&map, &a.argmin).unwrap() - a.min_ratio).abs() <= 1e-10 * a.min_ratio);
        assert!(distortion_scan(&map, &SamplerSpec::new(0, 5)).is_err());
    }

    #[test]
    fn lambda_scan_within_bounds() {
        let r = distortion_scan(&ScanMap::lambda(2).unwrap(), &SamplerSpec::new(5000, 1)).unwrap();
        assert!(r.min_ratio >= 1.0 / 9.0 - 1e-9);
        assert!(r.max_ratio <= 3.0 + 1e-9);
    }

    #[test]
    fn case_i_examples() {
        let eps = estimate_linear_epsilon(1).unwrap();
        let z = case_i_lower_bound(1, 0.0, 0.0, eps).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        assert!(z.holds);
        let c = case_i_lower_bound(1, 1e-3, 1e-3, eps).unwrap();
        assert!((c.lhs - 4.0 * PI * PI * 1e-3).abs() < 1e-4);
        assert!((c.rhs - PI * PI * 2e-3).abs() < 1e-12);
        assert!(c.holds);
        let d = case_i_lower_bound(2, 1e-3, 0.0, estimate_linear_epsilon(2).unwrap()).unwrap();
        assert!((d.lhs / d.rhs - 2.0).abs() < 0.01);
        assert!(matches!(
            case_i_lower_bound(1, 0.9, 0.0, eps),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn sign_pattern_near_the_sphere() {
        let body = BodyFunction::assemble(2, 1, false).unwrap();
        let r = derivative_sign_scan(&body, 0.125, 200, 0).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.checks > 200);
        assert!(r.c_hat.is_finite());
    }
}
