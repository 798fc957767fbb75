//! `∫ dg₁∧⋯∧dg_N` over `[−1,1]^N` and `∫ g₁ dg₂∧⋯∧dg_N` over its boundary.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::quadrature::GaussRule;

/// A function on (a neighbourhood of) the cube `[−1,1]^N`.
pub trait CubeFunction: Send + Sync + fmt::Debug {
    /// Value and full gradient at `p`.
    fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)>;

    fn value(&self, p: &[f64]) -> Result<f64> {
        Ok(self.eval(p)?.0)
    }
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormDomain {
    CubeInterior,
    CubeBoundary,
}

/// How partial derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Differentiation {
    /// Gradients supplied by the functions themselves.
    AnalyticJet,
    /// Central differences of function values with the given step.
    FiniteDifference { step: f64 },
}

/// Decomposition of the integration region into cells on which every
/// integrand is smooth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellLayout {
    /// Each free axis split into `panels` equal pieces.
    Tensor { panels: usize },
    /// The first `dims` coordinates split into the `2·dims` pyramids
    /// `{|x_j| ≤ ±x_i}` (the sectors of `λ`), each further cut at the
    /// radii `radial_breaks` of `s = |x_i|`; remaining axes are whole.
    /// Regions whose free axes do not contain all `dims` coordinates fall
    /// back to a single tensor cell.
    SectorPyramids {
        dims: usize,
        radial_breaks: Vec<f64>,
    },
}

/// A Lipschitz-form integral to evaluate.
#[derive(Debug, Clone)]
pub struct FormIntegralSpec {
    pub functions: Vec<Arc<dyn CubeFunction>>,
    pub domain: FormDomain,
    pub resolution: usize,
    pub cells: CellLayout,
    pub differentiation: Differentiation,
}

impl FormIntegralSpec {
    pub fn new(
        functions: Vec<Arc<dyn CubeFunction>>,
        domain: FormDomain,
        resolution: usize,
    ) -> Self {
        Self {
            functions,
            domain,
            resolution,
            cells: CellLayout::Tensor { panels: 1 },
            differentiation: Differentiation::AnalyticJet,
        }
    }

    pub fn with_cells(mut self, cells: CellLayout) -> Self {
        self.cells = cells;
        self
    }

    pub fn with_differentiation(mut self, d: Differentiation) -> Self {
        self.differentiation = d;
        self
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    /// Cube dimension `N = n + 1`.
    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    /// Stable-within-a-build hex digest of the full description.
    pub fn fingerprint(&self) -> String {
        use std::hash::{DefaultHasher, Hash, Hasher};
        let mut h = DefaultHasher::new();
        format!(
            "{:?}|{:?}|{}|{:?}|{:?}",
            self.functions, self.domain, self.resolution, self.cells, self.differentiation
        )
        .hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    pub value: f64,
    /// `|value(res) − value(res/2)|` plus a floating-point summation floor.
    pub error: f64,
    pub resolution: usize,
}

impl IntegralValue {
    /// `|value| > 10·error`.
    pub fn is_certified_nonzero(&self) -> bool {
        self.value.abs() > 10.0 * self.error
    }
}

/// Summation floor factor: error bars never drop below this multiple of
/// `ε·∫|integrand|`.
const ROUNDING_FLOOR: f64 = 16.0 * f64::EPSILON;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for j in c..n {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    d
}

#[derive(Debug, Clone)]
enum Cell {
    Box {
        mid: Vec<f64>,
        half: Vec<f64>,
    },
    Pyramid {
        dims: usize,
        apex: usize,
        sign: f64,
        s_mid: f64,
        s_half: f64,
        extra: usize,
    },
}

impl Cell {
    fn dim(&self) -> usize {
        match self {
            Cell::Box { mid, .. } => mid.len(),
            Cell::Pyramid { dims, extra, .. } => dims + extra,
        }
    }

    /// Map reference coordinates to free coordinates; returns the Jacobian.
    fn map(&self, xi: &[f64], out: &mut [f64]) -> f64 {
        match self {
            Cell::Box { mid, half } => {
                for a in 0..mid.len() {
                    out[a] = mid[a] + half[a] * xi[a];
                }
                half.iter().product()
            }
            Cell::Pyramid {
                dims,
                apex,
                sign,
                s_mid,
                s_half,
                extra,
            } => {
                let s = s_mid + s_half * xi[0];
                let mut next = 1;
                for j in 0..*dims {
                    if j == *apex {
                        out[j] = sign * s;
                    } else {
                        out[j] = s * xi[next];
                        next += 1;
                    }
                }
                out[*dims..*dims + *extra].copy_from_slice(&xi[*dims..*dims + *extra]);
                s_half * s.powi(*dims as i32 - 1)
            }
        }
    }
}

fn cells_for(layout: &CellLayout, free_axes: &[usize]) -> Vec<Cell> {
    let d = free_axes.len();
    match layout {
        CellLayout::SectorPyramids {
            dims,
            radial_breaks,
        } if *dims >= 1 && free_axes.len() >= *dims && (0..*dims).all(|j| free_axes[j] == j) => {
            let mut radii = vec![0.0];
            radii.extend(
                radial_breaks
                    .iter()
                    .copied()
                    .filter(|&r| r > 0.0 && r < 1.0),
            );
            radii.push(1.0);
            radii.sort_by(f64::total_cmp);
            radii.dedup();
            let mut cells = Vec::new();
            for apex in 0..*dims {
                for sign in [1.0, -1.0] {
                    for w in radii.windows(2) {
                        cells.push(Cell::Pyramid {
                            dims: *dims,
                            apex,
                            sign,
                            s_mid: 0.5 * (w[0] + w[1]),
                            s_half: 0.5 * (w[1] - w[0]),
                            extra: d - dims,
                        });
                    }
                }
            }
            cells
        }
        CellLayout::Tensor { panels } => {
            let panels = (*panels).max(1);
            let h = 1.0 / panels as f64;
            let total = panels.pow(d as u32);
            (0..total)
                .map(|mut code| {
                    let mut mid = vec![0.0; d];
                    for m in mid.iter_mut() {
                        let c = code % panels;
                        code /= panels;
                        *m = -1.0 + (2 * c + 1) as f64 * h;
                    }
                    Cell::Box {
                        mid,
                        half: vec![h; d],
                    }
                })
                .collect()
        }
        _ => vec![Cell::Box {
            mid: vec![0.0; d],
            half: vec![1.0; d],
        }],
    }
}

/// Neumaier-compensated running sum that also tracks `Σ|term|`.
#[derive(Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
        self.abs += v.abs();
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One region to integrate: the full cube, or a face with `fixed = (l, ±1)`.
struct Region {
    fixed: Option<(usize, f64)>,
    free_axes: Vec<usize>,
}

fn gradients(spec: &FormIntegralSpec, p: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    spec.functions
        .iter()
        .map(|g| match spec.differentiation {
            Differentiation::AnalyticJet => g.eval(p),
            Differentiation::FiniteDifference { step } => {
                let v = g.value(p)?;
                let mut q = p.to_vec();
                let grad = (0..p.len())
                    .map(|j| {
                        q[j] = p[j] + step;
                        let a = g.value(&q)?;
                        q[j] = p[j] - step;
                        let b = g.value(&q)?;
                        q[j] = p[j];
                        Ok((a - b) / (2.0 * step))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((v, grad))
            }
        })
        .collect()
}

fn integrand(spec: &FormIntegralSpec, region: &Region, p: &[f64]) -> Result<f64> {
    let n_dim = spec.dim();
    let evals = gradients(spec, p)?;
    Ok(match region.fixed {
        None => det(evals.iter().map(|(_, g)| g.clone()).collect()),
        Some((l, _)) => {
            let minor = evals[1..]
                .iter()
                .map(|(_, g)| (0..n_dim).filter(|&j| j != l).map(|j| g[j]).collect())
                .collect();
            evals[0].0 * det(minor)
        }
    })
}

fn integrate_region(spec: &FormIntegralSpec, region: &Region, res: usize) -> Result<Accumulator> {
    let rule = GaussRule::get(res);
    let cells = cells_for(&spec.cells, &region.free_axes);
    let n_dim = spec.dim();
    let per_cell: Vec<Result<Accumulator>> = cells
        .par_iter()
        .enumerate()
        .map(|(cell_id, cell)| {
            let d = cell.dim();
            let total = res.pow(d as u32);
            let mut acc = Accumulator::default();
            let mut xi = vec![0.0; d];
            let mut free = vec![0.0; d];
            let mut p = vec![0.0; n_dim];
            for code in 0..total {
                let mut c = code;
                let mut w = 1.0;
                for a in 0..d {
                    let i = c % res;
                    c /= res;
                    xi[a] = rule.nodes[i];
                    w *= rule.weights[i];
                }
                let jac = cell.map(&xi, &mut free);
                for (a, &axis) in region.free_axes.iter().enumerate() {
                    p[axis] = free[a];
                }
                if let Some((l, m)) = region.fixed {
                    p[l] = m;
                }
                let v = integrand(spec, region, &p)?;
                let contribution = w * jac * v;
                if !contribution.is_finite() {
                    return Err(Error::NonFinite {
                        cell: cell_id,
                        point: p.clone(),
                    });
                }
                acc.add(contribution);
            }
            Ok(acc)
        })
        .collect();
    let mut out = Accumulator::default();
    for acc in per_cell {
        let acc = acc?;
        out.add(acc.total());
        out.abs += acc.abs - acc.total().abs();
    }
    Ok(out)
}

fn validate(spec: &FormIntegralSpec) -> Result<()> {
    if spec.functions.len() < 2 {
        return Err(invalid(
            "forms need at least two functions (cube dimension ≥ 2)",
        ));
    }
    if spec.resolution < 2 {
        return Err(invalid("resolution must be at least 2"));
    }
    Ok(())
}

fn raw_value(spec: &FormIntegralSpec, res: usize) -> Result<(f64, f64)> {
    let n_dim = spec.dim();
    let mut total = Accumulator::default();
    match spec.domain {
        FormDomain::CubeInterior => {
            let region = Region {
                fixed: None,
                free_axes: (0..n_dim).collect(),
            };
            let acc = integrate_region(spec, &region, res)?;
            total.add(acc.total());
            total.abs += acc.abs - acc.total().abs();
        }
        FormDomain::CubeBoundary => {
            for (l, m) in face_order(n_dim) {
                let acc = face_integral(spec, l, m, res)?;
                let sign = face_sign(l, m);
                total.add(sign * acc.total());
                total.abs += acc.abs - acc.total().abs();
            }
        }
    }
    Ok((total.total(), total.abs))
}

/// Faces in evaluation order: `(l, +1), (l, −1)` for `l = 0, …, N−1`.
pub fn face_order(n_dim: usize) -> impl Iterator<Item = (usize, f64)> {
    (0..n_dim).flat_map(|l| [(l, 1.0), (l, -1.0)])
}

/// Orientation sign of face `x_l = m` (zero-based `l`) for the induced
/// boundary orientation: `(−1)^l · m`.
pub fn face_sign(l: usize, m: f64) -> f64 {
    if l.is_multiple_of(2) {
        m
    } else {
        -m
    }
}

fn face_integral(spec: &FormIntegralSpec, l: usize, m: f64, res: usize) -> Result<Accumulator> {
    let region = Region {
        fixed: Some((l, m)),
        free_axes: (0..spec.dim()).filter(|&j| j != l).collect(),
    };
    integrate_region(spec, &region, res)
}

/// Unsigned integral `∫ ĝ₁ det(∂_j ĝ_i)_{i≥2, j≠l} dx̂_l` over one face.
pub fn integrate_face(spec: &FormIntegralSpec, l: usize, m: f64) -> Result<IntegralValue> {
    validate(spec)?;
    if l >= spec.dim() || m.abs() != 1.0 {
        return Err(invalid(format!("no face x_{l} = {m}")));
    }
    let fine = face_integral(spec, l, m, spec.resolution)?;
    let coarse = face_integral(spec, l, m, spec.resolution / 2)?;
    Ok(IntegralValue {
        value: fine.total(),
        error: (fine.total() - coarse.total()).abs() + ROUNDING_FLOOR * fine.abs,
        resolution: spec.resolution,
    })
}

fn with_error(spec: &FormIntegralSpec) -> Result<IntegralValue> {
    validate(spec)?;
    let (fine, abs) = raw_value(spec, spec.resolution)?;
    let (coarse, _) = raw_value(spec, spec.resolution / 2)?;
    Ok(IntegralValue {
        value: fine,
        error: (fine - coarse).abs() + ROUNDING_FLOOR * abs,
        resolution: spec.resolution,
    })
}

/// `∫_{[−1,1]^N} det(∂_{x_j} g_i)`.
pub fn integrate_interior(spec: &FormIntegralSpec) -> Result<IntegralValue> {
    if spec.domain != FormDomain::CubeInterior {
        return Err(invalid("spec domain is not the cube interior"));
    }
    with_error(spec)
}

/// `∫_{∂[−1,1]^N} g₁ dg₂∧⋯∧dg_N`, summed over the `2N` faces with the
/// induced orientation.
pub fn integrate_boundary(spec: &FormIntegralSpec) -> Result<IntegralValue> {
    if spec.domain != FormDomain::CubeBoundary {
        return Err(invalid("spec domain is not the cube boundary"));
    }
    with_error(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::functions::{Coordinate, Polynomial};

    fn coords(n: usize) -> Vec<Arc<dyn CubeFunction>> {
        (0..n)
            .map(|i| Arc::new(Coordinate(i)) as Arc<dyn CubeFunction>)
            .collect()
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(det(vec![vec![2.0, 0.0], vec![0.0, 3.0]]), 6.0);
        assert_eq!(det(vec![vec![0.0, 1.0], vec![1.0, 0.0]]), -1.0);
        assert_eq!(det(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
        let d = det(vec![
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        assert!((d - 4.0).abs() < 1e-14);
    }

    #[test]
    fn identity_volume() {
        let spec = FormIntegralSpec::new(coords(3), FormDomain::CubeInterior, 4);
        let v = integrate_interior(&spec).unwrap();
        assert!((v.value - 8.0).abs() < 1e-13);
        let b = integrate_boundary(&FormIntegralSpec {
            domain: FormDomain::CubeBoundary,
            ..spec
        })
        .unwrap();
        assert!((b.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let mut fs = coords(3);
        fs[0] = Arc::new(Polynomial::new(3, vec![(1.0, vec![1, 1, 0])]));
        let spec = FormIntegralSpec::new(fs, FormDomain::CubeInterior, 8);
        assert!(integrate_interior(&spec).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn opposite_faces_cancel_for_constant_first_function() {
        let mut fs = coords(3);
        fs[0] = Arc::new(Polynomial::new(3, vec![(1.0, vec![0, 0, 0])]));
        let spec = FormIntegralSpec::new(fs, FormDomain::CubeBoundary, 6);
        assert!(integrate_boundary(&spec).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn swapped_two_form_orientation() {
        // g1 = x2, g2 = x1: det = −1 over area 4, so both sides give −4.
        let fs: Vec<Arc<dyn CubeFunction>> = vec![Arc::new(Coordinate(1)), Arc::new(Coordinate(0))];
        let i = integrate_interior(&FormIntegralSpec::new(
            fs.clone(),
            FormDomain::CubeInterior,
            4,
        ))
        .unwrap();
        let b =
            integrate_boundary(&FormIntegralSpec::new(fs, FormDomain::CubeBoundary, 4)).unwrap();
        assert!((i.value + 4.0).abs() < 1e-14);
        assert!((b.value + 4.0).abs() < 1e-14);
    }

    #[test]
    fn pyramids_tile_the_cube() {
        let spec = FormIntegralSpec::new(coords(3), FormDomain::CubeInterior, 6).with_cells(
            CellLayout::SectorPyramids {
                dims: 2,
                radial_breaks: vec![0.25, 0.5],
            },
        );
        assert!((integrate_interior(&spec).unwrap().value - 8.0).abs() < 1e-12);
        let tensor = FormIntegralSpec::new(coords(3), FormDomain::CubeInterior, 3)
            .with_cells(CellLayout::Tensor { panels: 3 });
        assert!((integrate_interior(&tensor).unwrap().value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_specs() {
        let spec = FormIntegralSpec::new(coords(1), FormDomain::CubeInterior, 4);
        assert!(integrate_interior(&spec).is_err());
        let spec = FormIntegralSpec::new(coords(2), FormDomain::CubeInterior, 1);
        assert!(integrate_interior(&spec).is_err());
        let spec = FormIntegralSpec::new(coords(2), FormDomain::CubeBoundary, 4);
        assert!(integrate_interior(&spec).is_err());
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        #[derive(Debug)]
        struct Bad;
        impl CubeFunction for Bad {
            fn eval(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
                Ok((f64::NAN, vec![0.0; p.len()]))
            }
        }
        let fs: Vec<Arc<dyn CubeFunction>> = vec![Arc::new(Bad), Arc::new(Coordinate(1))];
        let spec = FormIntegralSpec::new(fs, FormDomain::CubeBoundary, 2);
        assert!(matches!(
            integrate_boundary(&spec),
            Err(Error::NonFinite { .. })
        ));
    }
}
