//! Seeded random states for verification runs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::C64;
use crate::state::{make_state, NonorthogonalBipartiteState};

pub const DEFAULT_SEED: u64 = 20_000;

/// Largest overlap magnitude drawn; keeps `N^A`, `N^B` away from zero.
pub const MAX_OVERLAP: f64 = 0.95;

/// Draws `(mu, nu)` uniformly on the unit sphere of C^2, overlap
/// magnitudes uniformly on `[0, 0.95]` with uniform phases, then
/// normalizes the state.
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        StateSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn phase(&mut self) -> f64 {
        // (-pi, pi]
        PI - 2.0 * PI * self.rng.random::<f64>()
    }

    pub fn sample(&mut self) -> NonorthogonalBipartiteState {
        loop {
            let g: [f64; 4] = std::array::from_fn(|_| self.rng.sample(StandardNormal));
            let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n == 0.0 {
                continue;
            }
            let mu = C64::new(g[0] / n, g[1] / n);
            let nu = C64::new(g[2] / n, g[3] / n);
            let abs_x = MAX_OVERLAP * self.rng.random::<f64>();
            let x_phase = self.phase();
            let abs_y = MAX_OVERLAP * self.rng.random::<f64>();
            let y_phase = self.phase();
            let x = C64::from_polar(abs_x, x_phase);
            let y = C64::from_polar(abs_y, y_phase);
            if let Ok(state) = make_state(mu, nu, x, y, true) {
                return state;
            }
        }
    }

    pub fn take(&mut self, n: usize) -> Vec<NonorthogonalBipartiteState> {
        (0..n).map(|_| self.sample()).collect()
    }
}

/// `n` states from a fresh sampler seeded with `seed`.
pub fn random_states(seed: u64, n: usize) -> Vec<NonorthogonalBipartiteState> {
    StateSampler::new(seed).take(n)
}
