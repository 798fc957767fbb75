//! Deterministic stratified pair sampler: a randomly shifted Halton sequence
//! whose points are routed through one of several pair constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Pair construction, chosen by `pair index mod 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    /// Both points close to the seam (equator, sector boundary, …).
    NearSeam,
    /// One point near the seam, the other far from it.
    SeamToFar,
    /// Roughly antipodal points.
    Antipodal,
    /// Two independent points.
    Uniform,
    /// Nearby points at scale `1e-2 .. 1e-1`.
    Local,
}

impl Stratum {
    pub const ALL: [Stratum; 5] = [
        Stratum::NearSeam,
        Stratum::SeamToFar,
        Stratum::Antipodal,
        Stratum::Uniform,
        Stratum::Local,
    ];

    pub fn of_index(i: usize) -> Self {
        Self::ALL[i % Self::ALL.len()]
    }
}

/// How many pairs to draw and from which seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub pairs: usize,
    pub seed: u64,
    /// Prefix sizes at which the running min/max are recorded; `pairs` is
    /// always included.
    pub checkpoints: Vec<usize>,
}

impl SamplerSpec {
    /// `pairs` pairs with checkpoints at every power of ten below it.
    pub fn new(pairs: usize, seed: u64) -> Self {
        let mut checkpoints = Vec::new();
        let mut c = 10;
        while c < pairs {
            checkpoints.push(c);
            c *= 10;
        }
        Self {
            pairs,
            seed,
            checkpoints,
        }
    }

    pub fn checkpoints(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self
            .checkpoints
            .iter()
            .copied()
            .filter(|&c| c > 0 && c < self.pairs)
            .collect();
        c.push(self.pairs);
        c.sort_unstable();
        c.dedup();
        c
    }
}

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// Maximum number of coordinates per sample.
pub const MAX_DIMS: usize = PRIMES.len();

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton points in `[0,1)^dims` with a seeded Cranley–Patterson rotation.
#[derive(Debug, Clone)]
pub struct ShiftedHalton {
    shift: Vec<f64>,
}

impl ShiftedHalton {
    pub fn new(dims: usize, seed: u64) -> Self {
        assert!(dims <= MAX_DIMS, "at most {MAX_DIMS} Halton dimensions");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            shift: (0..dims).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn dims(&self) -> usize {
        self.shift.len()
    }

    pub fn point(&self, index: u64) -> Vec<f64> {
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, b)| (radical_inverse(index, b) + s).fract())
            .collect()
    }
}

/// `10^{lo + (hi − lo)·u}`.
pub fn log_uniform(u: f64, lo: f64, hi: f64) -> f64 {
    10f64.powf(lo + (hi - lo) * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        let v: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn halton_is_seeded_and_in_range() {
        let a = ShiftedHalton::new(6, 1);
        let b = ShiftedHalton::new(6, 1);
        let c = ShiftedHalton::new(6, 2);
        assert_eq!(a.point(17), b.point(17));
        assert_ne!(a.point(17), c.point(17));
        assert!((0..200).all(|i| a.point(i).iter().all(|&x| (0.0..1.0).contains(&x))));
    }

    #[test]
    fn checkpoints_are_prefixes() {
        let s = SamplerSpec::new(100_000, 0);
        assert_eq!(s.checkpoints(), vec![10, 100, 1000, 10_000, 100_000]);
        assert_eq!(Stratum::of_index(7), Stratum::Antipodal);
    }
}
