//! Seeded, counter-based randomness.
//!
//! Every random draw in the crate comes from a ChaCha20 stream keyed by a
//! master seed and selected by a 64-bit stream id. A release keyed by
//! `(master, stream)` therefore produces the same numbers no matter which
//! thread runs it or in which order releases are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Stream id namespaces. The top byte of a stream id identifies the stage
/// that consumes it so that stages never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamTag {
    CurveRelease = 1,
    PointRelease = 2,
    Synthetic = 3,
    VerifyNull = 4,
    VerifyAlt = 5,
    VerifyData = 6,
    Adhoc = 0xff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoiseSeed {
    pub master: u64,
    pub stream: u64,
}

impl NoiseSeed {
    pub fn new(master: u64, stream: u64) -> Self {
        NoiseSeed { master, stream }
    }

    /// Seed for a stage-specific release indexed by `(major, minor)`.
    ///
    /// `major` must fit in 40 bits and `minor` in 16 bits.
    pub fn derive(master: u64, tag: StreamTag, major: u64, minor: u64) -> Self {
        debug_assert!(major < (1 << 40) && minor < (1 << 16));
        let stream = ((tag as u64) << 56) | ((major & 0xff_ffff_ffff) << 16) | (minor & 0xffff);
        NoiseSeed { master, stream }
    }

    /// Seed for the noise of curve `curve_index`, coordinate `coordinate`.
    pub fn for_curve_release(master: u64, curve_index: usize, coordinate: usize) -> Self {
        Self::derive(master, StreamTag::CurveRelease, curve_index as u64, coordinate as u64)
    }

    /// Seed for the point-wise baseline noise on point `point`, coordinate `coordinate`.
    pub fn for_point_release(master: u64, point: usize, coordinate: usize) -> Self {
        Self::derive(master, StreamTag::PointRelease, point as u64, coordinate as u64)
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}
