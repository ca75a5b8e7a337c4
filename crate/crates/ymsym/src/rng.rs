//! Deterministic splitmix64 sampler.
//!
//! Reports must be byte-identical across platforms for a fixed seed, so the
//! generator is hand-rolled rather than pulled from a crate with its own
//! stream evolution.

use crate::mat::{c, C};
use crate::spinor::{Bispinor, CoSpinor, Spinor};

#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [-1, 1).
    pub fn sym(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    pub fn complex_unit(&mut self) -> C {
        c(self.sym(), self.sym())
    }

    pub fn spinor(&mut self) -> Spinor {
        loop {
            let s = Spinor::new(self.complex_unit(), self.complex_unit());
            if s.norm() > 0.3 {
                return s;
            }
        }
    }

    pub fn cospinor(&mut self) -> CoSpinor {
        loop {
            let s = CoSpinor::new(self.complex_unit(), self.complex_unit());
            if s.norm() > 0.3 {
                return s;
            }
        }
    }

    /// Point in the complex ball of the given radius around a basepoint
    /// (uniform by rejection from the 8-cube).
    pub fn ball_point(&mut self, center: &Bispinor, radius: f64) -> Bispinor {
        loop {
            let m = [
                [self.complex_unit(), self.complex_unit()],
                [self.complex_unit(), self.complex_unit()],
            ];
            let b = Bispinor { m };
            if b.norm() <= 1.0 {
                return center.add(&b.scale(c(radius, 0.0)));
            }
        }
    }

    /// Invertible 2x2 complex matrix near the identity.
    pub fn gl2_near_identity(&mut self, spread: f64) -> [[C; 2]; 2] {
        loop {
            let s = c(spread, 0.0);
            let m = [
                [c(1.0, 0.0) + self.complex_unit() * s, self.complex_unit() * s],
                [self.complex_unit() * s, c(1.0, 0.0) + self.complex_unit() * s],
            ];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det.norm() > 0.2 {
                return m;
            }
        }
    }
}
