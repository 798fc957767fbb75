//! Multi-indices `I = (i_1, …, i_n)` and the coordinate layouts built from them.
//!
//! Indices of equal length are ordered graded-lexicographically with the
//! larger leading entry first, so `(2,0) < (1,1) < (0,2)`. Every dense
//! coordinate vector in the crate (jet points, truncated series) stores one
//! slot per index of [`enumerate_up_to`] in exactly this order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{invalid, Error, Result};

/// Largest jet order accepted by [`crate::jetgroup::GroupParams`].
pub const MAX_JET_ORDER: usize = 8;

/// Largest series order; one above the jet cap because Lipschitz bounds
/// consume `∂_{I+e_j}` with `|I| = k`.
pub const MAX_SERIES_ORDER: usize = MAX_JET_ORDER + 1;

/// An n-tuple of nonnegative integers indexing a partial derivative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The unit index `e_j` (zero-based `j`).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        Self(e)
    }

    /// `k·e_j`, the index of the pure derivative `∂^k/∂x_j^k`.
    pub fn pure(n: usize, j: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[j] = k;
        Self(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|I|`, the sum of the entries.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&i| i as usize).sum()
    }

    pub fn plus_unit(&self, j: usize) -> Self {
        let mut e = self.0.clone();
        e[j] += 1;
        Self(e)
    }

    /// `J − I`, or `None` unless `I ≤ J`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, e) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| invalid(format!("bad multi-index entry `{part}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

fn check_same_dim(a: &MultiIndex, b: &MultiIndex) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(invalid(format!(
            "multi-index dimensions differ: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// All indices with `|I| = j` in canonical order.
pub fn enumerate(n: usize, j: usize) -> Vec<MultiIndex> {
    fn rec(n: usize, j: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if n == 1 {
            prefix.push(j);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=j).rev() {
            prefix.push(first);
            rec(n - 1, j - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, j as u32, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All indices with `|I| ≤ k`: `enumerate(n,0)`, then `enumerate(n,1)`, …
pub fn enumerate_up_to(n: usize, k: usize) -> Vec<MultiIndex> {
    (0..=k).flat_map(|j| enumerate(n, j)).collect()
}

/// Componentwise `I ≤ J`.
pub fn leq(a: &MultiIndex, b: &MultiIndex) -> Result<bool> {
    check_same_dim(a, b)?;
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x <= y))
}

/// `I! = ∏ i_l!`.
pub fn factorial(index: &MultiIndex) -> u64 {
    index.0.iter().map(|&i| factorial_u64(i as u64)).product()
}

/// `y^I = ∏ y_l^{i_l}`.
pub fn monomial(y: &[f64], index: &MultiIndex) -> Result<f64> {
    if y.len() != index.dim() {
        return Err(invalid(format!(
            "point has dimension {}, index has dimension {}",
            y.len(),
            index.dim()
        )));
    }
    Ok(y.iter()
        .zip(&index.0)
        .map(|(&v, &e)| v.powi(e as i32))
        .product())
}

pub fn factorial_u64(m: u64) -> u64 {
    (1..=m).product()
}

pub fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1u64, |acc, i| acc * (a - i) / (i + 1))
}

/// `d(n,j) = C(n+j−1, j)`, the number of `j`-indices in `n` variables.
pub fn count(n: usize, j: usize) -> usize {
    binomial((n + j - 1) as u64, j as u64) as usize
}

/// Dense coordinate layout over `enumerate_up_to(n, order)` with the lookup
/// tables shared by jet points and truncated series.
#[derive(Debug)]
pub struct IndexLayout {
    n: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
    plus_unit: Vec<Vec<Option<usize>>>,
    factorials: Vec<f64>,
    products: Vec<(usize, usize, usize)>,
    dominating: Vec<Vec<(usize, usize)>>,
}

type LayoutCache = HashMap<(usize, usize), Arc<IndexLayout>>;

static LAYOUTS: Lazy<Mutex<LayoutCache>> = Lazy::new(|| Mutex::new(HashMap::new()));

impl IndexLayout {
    /// Shared layout for `n` variables up to `order`, built once per pair.
    pub fn get(n: usize, order: usize) -> Result<Arc<IndexLayout>> {
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        if order > MAX_SERIES_ORDER {
            return Err(Error::OrderTooLarge {
                order,
                max: MAX_SERIES_ORDER,
            });
        }
        let mut cache = LAYOUTS.lock().expect("layout cache poisoned");
        Ok(cache
            .entry((n, order))
            .or_insert_with(|| Arc::new(Self::build(n, order)))
            .clone())
    }

    fn build(n: usize, order: usize) -> Self {
        let indices = enumerate_up_to(n, order);
        let positions: HashMap<_, _> = indices
            .iter()
            .enumerate()
            .map(|(p, i)| (i.clone(), p))
            .collect();
        let plus_unit = indices
            .iter()
            .map(|i| {
                (0..n)
                    .map(|j| positions.get(&i.plus_unit(j)).copied())
                    .collect()
            })
            .collect();
        let factorials = indices.iter().map(|i| factorial(i) as f64).collect();
        let mut products = Vec::new();
        let mut dominating = vec![Vec::new(); indices.len()];
        for (a, ia) in indices.iter().enumerate() {
            for (b, ib) in indices.iter().enumerate() {
                if ia.order() + ib.order() <= order {
                    let sum = ia.checked_add(ib).expect("same dimension");
                    products.push((a, b, positions[&sum]));
                }
                if let Some(diff) = ib.checked_sub(ia) {
                    dominating[a].push((b, positions[&diff]));
                }
            }
        }
        Self {
            n,
            order,
            indices,
            positions,
            plus_unit,
            factorials,
            products,
            dominating,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    #[allow(clippy::should_implement_trait)]
    pub fn index(&self, pos: usize) -> &MultiIndex {
        &self.indices[pos]
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.positions.get(index).copied()
    }

    /// Position of `I + e_j`, if it still fits in the layout.
    pub fn plus_unit(&self, pos: usize, j: usize) -> Option<usize> {
        self.plus_unit[pos][j]
    }

    /// `I!` as a float.
    pub fn factorial(&self, pos: usize) -> f64 {
        self.factorials[pos]
    }

    /// Triples `(a, b, c)` with `I_a + I_b = I_c` inside the layout.
    pub fn products(&self) -> &[(usize, usize, usize)] {
        &self.products
    }

    /// Pairs `(J, J − I)` over all `J ≥ I` (including `J = I`).
    pub fn dominating(&self, pos: usize) -> &[(usize, usize)] {
        &self.dominating[pos]
    }
}
