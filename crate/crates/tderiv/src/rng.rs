//! Deterministic randomness for campaigns.
//!
//! The generator is SplitMix64, fixed so that results are reproducible from
//! a single `u64` seed on any platform (and reimplementable in a few lines
//! in any language):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Draw conventions, in the order they consume outputs:
//!
//! * bounded integers use rejection sampling (`below`): draw a raw output,
//!   reject values `>= floor(2^64 / n) * n`, reduce the survivor mod `n`;
//! * a random rational draws its numerator uniformly from `[-9, 9]`, then
//!   its denominator uniformly from `{1, 2, 3}`;
//! * a Gaussian scalar draws its real part as a rational, then its
//!   imaginary part the same way;
//! * elements draw one scalar per coordinate in basis order, matrices one
//!   scalar per entry in row-major order;
//! * trial `t` of a campaign with root seed `s` runs on its own generator
//!   seeded with the `(t+1)`-th raw output of `SplitMix64(s)`, so trials
//!   are independent of each other and of evaluation order.

use crate::mat::Mat;
use crate::scalar::{FieldMode, Scalar};

const GAMMA: u64 = 0x9E3779B97F4A7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Seed for the per-trial child generator: the `(index+1)`-th raw output
    /// of a generator seeded with `root`, computed in O(1).
    pub fn child_seed(root: u64, index: u64) -> u64 {
        mix(root.wrapping_add(GAMMA.wrapping_mul(index.wrapping_add(1))))
    }

    /// Uniform in `0..n` by rejection; `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = (u64::MAX / n) * n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// Small rational: numerator in `[-9, 9]`, denominator in `{1, 2, 3}`.
    pub fn rational(&mut self) -> Scalar {
        let num = self.int_in(-9, 9);
        let den = 1 + self.below(3) as i64;
        Scalar::ratio(num, den)
    }

    /// Field scalar; Gaussian mode draws the real part first, then the
    /// imaginary part.
    pub fn scalar(&mut self, field: FieldMode) -> Scalar {
        let re = self.rational();
        match field {
            FieldMode::Rational => re,
            FieldMode::Gaussian => {
                let im = self.rational();
                Scalar::from_parts(re.re().clone(), im.re().clone())
            }
        }
    }

    /// Coordinate vector of length `d`, one scalar per coordinate in order.
    pub fn element(&mut self, d: usize, field: FieldMode) -> Vec<Scalar> {
        (0..d).map(|_| self.scalar(field)).collect()
    }

    /// Dense matrix, entries drawn row-major.
    pub fn matrix(&mut self, rows: usize, cols: usize, field: FieldMode) -> Mat {
        let data: Vec<Vec<Scalar>> =
            (0..rows).map(|_| (0..cols).map(|_| self.scalar(field)).collect()).collect();
        Mat::from_rows(data)
    }
}
