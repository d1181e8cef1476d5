//! Seeded random-matrix and panel generators.
//!
//! Every draw is a pure function of a [`SeedSpec`]. A spec maps to a
//! ChaCha8 generator seeded from `base_seed` (expanded by
//! `SeedableRng::seed_from_u64`) with its 64-bit ChaCha stream id set to
//! `stream`, so replicate `r` of an experiment owns stream `r` and never
//! shares state with any other replicate.

mod gue;
mod panel;
mod wishart;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use gue::{gue_top_raw, gue_top_scaled, gue_top_scaled_with, sample_gue, sample_gue_tridiagonal, GueMethod};
pub use panel::{synth_factor_panel, FactorPanelSpec};
pub(crate) use wishart::sample_covariance_eigenvalues;
pub use wishart::{sample_wishart_eigs, WishartDraw};

/// `(base_seed, stream)` pair identifying one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub base_seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(base_seed: u64, stream: u64) -> Self {
        Self { base_seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream);
        rng
    }
}
