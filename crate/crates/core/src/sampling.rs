//! Seeded, platform-independent sampling (ChaCha8).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::GroupElement;
use crate::loops::LoopPoint;
use crate::numerics::SearchBox;

pub const DEFAULT_SEED: u64 = 0x5EED_0004;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn sign(&mut self) -> f64 {
        if self.rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn point(&mut self, bx: &SearchBox<3>) -> LoopPoint {
        LoopPoint::new(
            self.uniform(bx.lower[0], bx.upper[0]),
            self.uniform(bx.lower[1], bx.upper[1]),
            self.uniform(bx.lower[2], bx.upper[2]),
        )
    }

    pub fn element(&mut self, half_width: f64) -> GroupElement {
        GroupElement::from_array([(); 4].map(|_| self.uniform(-half_width, half_width)))
    }

    /// An element with coordinates in `[-half_width, half_width]` and
    /// `|x4|` drawn from `[min_abs_x4, half_width]`.
    pub fn element_off_commutator(&mut self, half_width: f64, min_abs_x4: f64) -> GroupElement {
        let mut g = self.element(half_width);
        g.x4 = self.sign() * self.uniform(min_abs_x4, half_width);
        g
    }
}
