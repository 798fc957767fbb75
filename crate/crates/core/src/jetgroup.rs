//! The jet space Carnot group `J^k(ℝⁿ)`.
//!
//! A point is a base `x ∈ ℝⁿ` together with one coordinate `u_I` for every
//! multi-index `|I| ≤ k`. The group law is
//!
//! ```text
//! (x, u) ⊙ (y, v) = (x + y, w),   w_I = v_I + Σ_{J ≥ I} u_J · y^{J−I} / (J−I)!
//! ```
//!
//! which is the composition of translated Taylor polynomials. Dilations
//! scale `u_I` by `ε^{k+1−|I|}`, and the max-type homogeneous norm built from
//! those weights gives the box quasi-metric used in place of the
//! Carnot–Carathéodory distance.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::multiindex::{IndexLayout, MultiIndex, MAX_JET_ORDER};

/// Relative tolerance for floating comparisons of group coordinates.
pub const REL_TOL: f64 = 1e-10;
/// Absolute floor paired with [`REL_TOL`].
pub const ABS_TOL: f64 = 1e-12;

/// `|a − b| ≤ REL_TOL·max(|a|,|b|) + ABS_TOL`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_TOL
}

/// Dimension and jet order of a jet space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    pub n: usize,
    pub k: usize,
}

impl GroupParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        if k == 0 {
            return Err(invalid("jet order k must be at least 1"));
        }
        if k > MAX_JET_ORDER {
            return Err(Error::OrderTooLarge {
                order: k,
                max: MAX_JET_ORDER,
            });
        }
        Ok(Self { n, k })
    }

    pub fn layout(&self) -> Arc<IndexLayout> {
        IndexLayout::get(self.n, self.k).expect("validated parameters")
    }

    /// Number of jet coordinates `Σ_j d(n,j)`.
    pub fn jet_len(&self) -> usize {
        self.layout().len()
    }
}

/// A point `(x, u)` of `J^k(ℝⁿ)` with `u` stored in canonical index order.
#[derive(Debug, Clone)]
pub struct JetPoint {
    params: GroupParams,
    layout: Arc<IndexLayout>,
    x: Vec<f64>,
    u: Vec<f64>,
}

impl PartialEq for JetPoint {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.x == other.x && self.u == other.u
    }
}

impl JetPoint {
    pub fn new(params: GroupParams, x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        let layout = params.layout();
        if x.len() != params.n {
            return Err(invalid(format!(
                "base point has {} entries, expected {}",
                x.len(),
                params.n
            )));
        }
        if u.len() != layout.len() {
            return Err(invalid(format!(
                "jet has {} coordinates, expected {}",
                u.len(),
                layout.len()
            )));
        }
        if x.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(invalid("jet coordinates must be finite"));
        }
        Ok(Self {
            params,
            layout,
            x,
            u,
        })
    }

    pub fn identity(params: GroupParams) -> Self {
        let layout = params.layout();
        let len = layout.len();
        Self {
            params,
            layout,
            x: vec![0.0; params.n],
            u: vec![0.0; len],
        }
    }

    /// A point of `J^k(ℝ)` in the ordering `(x, u_k, u_{k−1}, …, u_0)`.
    pub fn filiform(k: usize, x: f64, top_down: &[f64]) -> Result<Self> {
        let params = GroupParams::new(1, k)?;
        if top_down.len() != k + 1 {
            return Err(invalid(format!(
                "expected {} jet coordinates, got {}",
                k + 1,
                top_down.len()
            )));
        }
        let u = top_down.iter().rev().copied().collect();
        Self::new(params, vec![x], u)
    }

    /// `(x, u_k, …, u_0)` for `n = 1`; canonical order reversed otherwise.
    pub fn to_filiform(&self) -> Vec<f64> {
        let mut out = self.x.clone();
        out.extend(self.u.iter().rev());
        out
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Jet coordinates in canonical order.
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn u_at(&self, index: &MultiIndex) -> Option<f64> {
        self.layout.position(index).map(|p| self.u[p])
    }

    /// Base followed by jet coordinates.
    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        self.x.iter().chain(&self.u).copied()
    }

    /// Negate every jet coordinate, keeping the base: the jet of `−g`.
    pub fn negate_jet(&self) -> Self {
        Self {
            u: self.u.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(invalid(format!(
                "group parameters differ: {:?} vs {:?}",
                self.params, other.params
            )));
        }
        Ok(())
    }

    /// Largest coordinate deviation relative to the comparison tolerance;
    /// `≤ 1` means the points agree.
    pub fn deviation(&self, other: &Self) -> f64 {
        self.coords()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs() / (REL_TOL * a.abs().max(b.abs()) + ABS_TOL))
            .fold(0.0, f64::max)
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.params == other.params && self.deviation(other) <= 1.0
    }
}

/// `y^D / D!` for every index `D` of the layout.
fn scaled_monomials(layout: &IndexLayout, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; layout.len()];
    out[0] = 1.0;
    // Build each monomial from a lower one by multiplying one factor.
    for pos in 1..layout.len() {
        let index = layout.index(pos);
        let j = index
            .entries()
            .iter()
            .position(|&e| e > 0)
            .expect("nonzero index");
        let mut lower = index.entries().to_vec();
        lower[j] -= 1;
        let lower_pos = layout
            .position(&MultiIndex::new(lower))
            .expect("lower index in layout");
        out[pos] = out[lower_pos] * y[j] / index.entries()[j] as f64;
    }
    out
}

/// `p ⊙ q`.
pub fn compose(p: &JetPoint, q: &JetPoint) -> Result<JetPoint> {
    p.check_same(q)?;
    let layout = &p.layout;
    let powers = scaled_monomials(layout, &q.x);
    let u = (0..layout.len())
        .map(|i| {
            q.u[i]
                + layout
                    .dominating(i)
                    .iter()
                    .map(|&(j, d)| p.u[j] * powers[d])
                    .sum::<f64>()
        })
        .collect();
    let x = p.x.iter().zip(&q.x).map(|(a, b)| a + b).collect();
    Ok(JetPoint {
        params: p.params,
        layout: p.layout.clone(),
        x,
        u,
    })
}

/// `p⁻¹ = (−x, u')` with `u'_I = −Σ_{J ≥ I} u_J (−x)^{J−I}/(J−I)!`.
pub fn inverse(p: &JetPoint) -> JetPoint {
    let layout = &p.layout;
    let neg_x: Vec<f64> = p.x.iter().map(|v| -v).collect();
    let powers = scaled_monomials(layout, &neg_x);
    let u = (0..layout.len())
        .map(|i| {
            -layout
                .dominating(i)
                .iter()
                .map(|&(j, d)| p.u[j] * powers[d])
                .sum::<f64>()
        })
        .collect();
    JetPoint {
        params: p.params,
        layout: p.layout.clone(),
        x: neg_x,
        u,
    }
}

/// Homogeneous weight `k + 1 − |I|` of each jet coordinate.
pub fn weights(params: GroupParams) -> Vec<i32> {
    params
        .layout()
        .indices()
        .iter()
        .map(|i| (params.k + 1 - i.order()) as i32)
        .collect()
}

/// `δ_ε`: `x ↦ εx`, `u_I ↦ ε^{k+1−|I|} u_I`.
pub fn dilate(eps: f64, p: &JetPoint) -> Result<JetPoint> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!(
            "dilation factor must be positive, got {eps}"
        )));
    }
    let u =
        p.u.iter()
            .zip(weights(p.params))
            .map(|(v, w)| v * eps.powi(w))
            .collect();
    Ok(JetPoint {
        params: p.params,
        layout: p.layout.clone(),
        x: p.x.iter().map(|v| v * eps).collect(),
        u,
    })
}

/// `max{|x|, |u_I|^{1/(k+1−|I|)}}`.
pub fn homogeneous_norm(p: &JetPoint) -> f64 {
    let base = p.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    p.u.iter()
        .zip(weights(p.params))
        .map(|(v, w)| v.abs().powf(1.0 / w as f64))
        .fold(base, f64::max)
}

/// `N(p⁻¹ ⊙ q)`, the box quasi-metric.
pub fn box_distance(p: &JetPoint, q: &JetPoint) -> Result<f64> {
    // Rounding left in `p⁻¹ ⊙ p` would be amplified by the fractional roots.
    if p.params() == q.params() && p.coords().eq(q.coords()) {
        return Ok(0.0);
    }
    Ok(homogeneous_norm(&compose(&inverse(p), q)?))
}

/// Discrete contact form defect along a timestamped path:
/// `max |Δu_I/Δt − Σ_j u_{I+e_j} Δx_j/Δt|` over interior samples, using
/// central differences.
pub fn contact_defect(path: &[(f64, JetPoint)], index: &MultiIndex) -> Result<f64> {
    if path.len() < 3 {
        return Err(invalid(format!(
            "contact defect needs at least 3 samples, got {}",
            path.len()
        )));
    }
    let params = path[0].1.params;
    if path.iter().any(|(_, p)| p.params != params) {
        return Err(invalid("path samples have mixed group parameters"));
    }
    if index.dim() != params.n || index.order() + 1 > params.k {
        return Err(invalid(format!(
            "contact form index {index} needs |I| ≤ k−1 = {}",
            params.k - 1
        )));
    }
    let layout = params.layout();
    let pos = layout.position(index).expect("index inside layout");
    let mut worst: f64 = 0.0;
    for w in path.windows(3) {
        let (t0, a) = (&w[0].0, &w[0].1);
        let (t2, c) = (&w[2].0, &w[2].1);
        let mid = &w[1].1;
        let dt = t2 - t0;
        if dt <= 0.0 {
            return Err(invalid("path timestamps must be strictly increasing"));
        }
        let du = (c.u[pos] - a.u[pos]) / dt;
        let horizontal: f64 = (0..params.n)
            .map(|j| {
                let up = layout.plus_unit(pos, j).expect("|I|+1 ≤ k");
                mid.u[up] * (c.x[j] - a.x[j]) / dt
            })
            .sum();
        worst = worst.max((du - horizontal).abs());
    }
    Ok(worst)
}

impl Serialize for JetPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coords<'a>(&'a JetPoint);
        impl Serialize for Coords<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.u.len()))?;
                for (index, value) in self.0.layout.indices().iter().zip(&self.0.u) {
                    map.serialize_entry(&index.to_string(), value)?;
                }
                map.end()
            }
        }
        let mut s = serializer.serialize_struct("JetPoint", 4)?;
        s.serialize_field("n", &self.params.n)?;
        s.serialize_field("k", &self.params.k)?;
        s.serialize_field("x", &self.x)?;
        s.serialize_field("u", &Coords(self))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for JetPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            k: usize,
            x: Vec<f64>,
            u: BTreeMap<String, f64>,
        }
        use serde::de::Error as _;
        let raw = Raw::deserialize(deserializer)?;
        let params = GroupParams::new(raw.n, raw.k).map_err(D::Error::custom)?;
        let layout = params.layout();
        let mut u = vec![0.0; layout.len()];
        let mut seen = 0;
        for (key, value) in &raw.u {
            let index: MultiIndex = key.parse().map_err(D::Error::custom)?;
            let pos = layout
                .position(&index)
                .ok_or_else(|| D::Error::custom(format!("index {key} outside J^{}", raw.k)))?;
            u[pos] = *value;
            seen += 1;
        }
        if seen != layout.len() {
            return Err(D::Error::custom(format!(
                "expected {} jet coordinates, got {seen}",
                layout.len()
            )));
        }
        JetPoint::new(params, raw.x, u).map_err(D::Error::custom)
    }
}
