//! MT19937 with classic `init_genrand` seeding and base-R compatible seeding.
//!
//! Two output conventions are supported. [`OutputMode::Classic`] produces the
//! 53-bit `genrand_res53` doubles used by the reference C code and MATLAB's
//! `twister` stream. [`OutputMode::R`] reproduces base R's `unif_rand` (32-bit
//! resolution, kept strictly inside (0, 1)) and its inversion `norm_rand`.

use crate::error::{Error, Result};

pub const STATE_WORDS: usize = 624;
/// Length of the integer vector R exposes as `.Random.seed` for Mersenne-Twister.
pub const R_SEED_LEN: usize = STATE_WORDS + 2;
/// `.Random.seed[1]` for kind "Mersenne-Twister" with normal kind "Inversion".
pub const R_KIND_CODE: i32 = 403;

const MIDDLE: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7fff_ffff;

/// Raw generator state: 624 words and the number of words already consumed
/// from the current block.
#[derive(Clone, PartialEq, Eq)]
pub struct MtState {
    pub words: [u32; STATE_WORDS],
    pub cursor: usize,
}

impl std::fmt::Debug for MtState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MtState")
            .field("words[0..4]", &&self.words[..4])
            .field("cursor", &self.cursor)
            .finish()
    }
}

impl MtState {
    /// `init_genrand(seed)` from mt19937ar.c.
    pub fn from_seed(seed: u32) -> Self {
        let mut words = [0u32; STATE_WORDS];
        words[0] = seed;
        for i in 1..STATE_WORDS {
            let prev = words[i - 1];
            words[i] = 1_812_433_253u32
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        MtState {
            words,
            cursor: STATE_WORDS,
        }
    }

    /// The 625-word layout used by MATLAB's `twister` stream: the state
    /// words followed by the cursor.
    pub fn to_words625(&self) -> Vec<u32> {
        let mut v = self.words.to_vec();
        v.push(self.cursor as u32);
        v
    }

    pub fn from_words625(v: &[u32]) -> Result<Self> {
        if v.len() != STATE_WORDS + 1 {
            return Err(Error::InvalidParameter(format!(
                "state vector must hold {} words, got {}",
                STATE_WORDS + 1,
                v.len()
            )));
        }
        let cursor = v[STATE_WORDS] as usize;
        if cursor > STATE_WORDS {
            return Err(Error::InvalidParameter(format!("cursor {cursor} exceeds 624")));
        }
        let mut words = [0u32; STATE_WORDS];
        words.copy_from_slice(&v[..STATE_WORDS]);
        Ok(MtState { words, cursor })
    }

    fn twist(&mut self) {
        let mt = &mut self.words;
        for kk in 0..STATE_WORDS {
            let y = (mt[kk] & UPPER_MASK) | (mt[(kk + 1) % STATE_WORDS] & LOWER_MASK);
            let mag = if y & 1 == 1 { MATRIX_A } else { 0 };
            mt[kk] = mt[(kk + MIDDLE) % STATE_WORDS] ^ (y >> 1) ^ mag;
        }
        self.cursor = 0;
    }

    /// `genrand_int32`: next tempered 32-bit word.
    pub fn next_u32(&mut self) -> u32 {
        if self.cursor >= STATE_WORDS {
            self.twist();
        }
        let mut y = self.words[self.cursor];
        self.cursor += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^= y >> 18;
        y
    }

    /// `genrand_res53`: `(a * 2^26 + b) / 2^53` from the top 27 and 26 bits
    /// of two successive words.
    pub fn next_res53(&mut self) -> f64 {
        let a = (self.next_u32() >> 5) as f64;
        let b = (self.next_u32() >> 6) as f64;
        (a * 67_108_864.0 + b) * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// One step of the 69069 LCG on the signed 32-bit range.
///
/// Arithmetic is carried in 64 bits and folded back with
/// `mod(n + 2^31, 2^32) - 2^31`, which is the two's-complement wrap.
pub fn int32_lcg(n: i32) -> i32 {
    let wide = 69069i64 * n as i64 + 1;
    ((wide + (1i64 << 31)).rem_euclid(1i64 << 32) - (1i64 << 31)) as i32
}

/// The 626-integer state R stores in `.Random.seed` after
/// `RNGkind("Mersenne-Twister", "Inversion"); set.seed(seed)`.
#[derive(Clone, PartialEq, Eq)]
pub struct RSeedState {
    pub codes: Vec<i32>,
}

impl std::fmt::Debug for RSeedState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RSeedState")
            .field("codes[0..4]", &&self.codes[..self.codes.len().min(4)])
            .field("len", &self.codes.len())
            .finish()
    }
}

impl RSeedState {
    /// Builds the R state for `set.seed(seed)`: 50 burn-in LCG steps, then
    /// 625 generated codes of which the first is overwritten by the cursor.
    pub fn from_seed(seed: i32) -> Self {
        let mut n = seed;
        for _ in 0..50 {
            n = int32_lcg(n);
        }
        let mut codes = vec![0i32; R_SEED_LEN];
        for slot in codes.iter_mut().skip(1) {
            n = int32_lcg(n);
            *slot = n;
        }
        codes[0] = R_KIND_CODE;
        codes[1] = STATE_WORDS as i32;
        RSeedState { codes }
    }

    pub fn from_codes(codes: Vec<i32>) -> Result<Self> {
        if codes.len() != R_SEED_LEN {
            return Err(Error::InvalidParameter(format!(
                "R seed state must hold {R_SEED_LEN} integers, got {}",
                codes.len()
            )));
        }
        Ok(RSeedState { codes })
    }

    /// Drops the kind code, moves the cursor behind the 624 words and
    /// reinterprets the signed integers as unsigned.
    pub fn to_mt_state(&self) -> Result<MtState> {
        if self.codes.len() != R_SEED_LEN {
            return Err(Error::InvalidParameter(format!(
                "R seed state must hold {R_SEED_LEN} integers, got {}",
                self.codes.len()
            )));
        }
        let reordered: Vec<u32> = self.codes[2..]
            .iter()
            .chain(std::iter::once(&self.codes[1]))
            .map(|&c| c as u32)
            .collect();
        MtState::from_words625(&reordered)
    }

    pub fn from_mt_state(state: &MtState) -> Self {
        let mut codes = Vec::with_capacity(R_SEED_LEN);
        codes.push(R_KIND_CODE);
        codes.push(state.cursor as i32);
        codes.extend(state.words.iter().map(|&w| w as i32));
        RSeedState { codes }
    }
}

/// How raw words are turned into doubles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    /// `genrand_res53` uniforms, normals by inversion of one uniform.
    Classic,
    /// base R's `unif_rand` / `norm_rand` (kind "Inversion").
    R,
}

/// A seeded MT19937 stream. Single owner; clone it to snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MersenneTwister {
    state: MtState,
    mode: OutputMode,
}

const R_I2_32M1: f64 = 2.328_306_437_080_797e-10; // 1 / (2^32 - 1)
const R_2_32_INV: f64 = 2.328_306_436_538_696_3e-10; // 1 / 2^32

impl MersenneTwister {
    pub fn new(seed: u32) -> Self {
        Self::from_state(MtState::from_seed(seed), OutputMode::Classic)
    }

    /// Stream identical to base R after `set.seed(seed)`.
    pub fn new_r(seed: i32) -> Self {
        let state = RSeedState::from_seed(seed)
            .to_mt_state()
            .expect("R seed state has the right length by construction");
        Self::from_state(state, OutputMode::R)
    }

    pub fn from_state(state: MtState, mode: OutputMode) -> Self {
        MersenneTwister { state, mode }
    }

    pub fn state(&self) -> &MtState {
        &self.state
    }

    pub fn mode(&self) -> OutputMode {
        self.mode
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state.next_u32()
    }

    /// Uniform double in [0, 1) (classic) or (0, 1) (R).
    pub fn next_uniform(&mut self) -> f64 {
        match self.mode {
            OutputMode::Classic => self.state.next_res53(),
            OutputMode::R => {
                let v = self.state.next_u32() as f64 * R_2_32_INV;
                if v <= 0.0 {
                    0.5 * R_I2_32M1
                } else if 1.0 - v <= 0.0 {
                    1.0 - 0.5 * R_I2_32M1
                } else {
                    v
                }
            }
        }
    }

    /// Standard normal by inversion. Classic mode inverts one uniform and
    /// resamples an exact zero; R mode builds a finer uniform from two draws
    /// exactly as `norm_rand` does for kind "Inversion".
    pub fn next_normal(&mut self) -> f64 {
        match self.mode {
            OutputMode::Classic => loop {
                let u = self.next_uniform();
                if u > 0.0 {
                    return inverse_normal_cdf(u);
                }
            },
            OutputMode::R => {
                const BIG: f64 = 134_217_728.0; // 2^27
                let mut u = self.next_uniform();
                u = (BIG * u).trunc() + self.next_uniform();
                inverse_normal_cdf(u / BIG)
            }
        }
    }

    /// `ceil(u * n)` for the next uniform; always in `1..=n`.
    pub fn uniform_int(&mut self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::InvalidParameter("uniform_int needs N >= 1".into()));
        }
        Ok(uniform_to_int(self.next_uniform(), n))
    }
}

/// Maps a uniform in [0, 1) to `1..=n` as `ceil(u * n)`; a zero draw maps to 1.
pub fn uniform_to_int(u: f64, n: usize) -> usize {
    ((u * n as f64).ceil() as usize).clamp(1, n)
}

/// Lower-tail standard normal quantile, Wichura's AS 241 (`PPND16`).
///
/// Accurate to about 1e-16 relative for `p` in (0, 1). Returns `-inf`/`inf`
/// at 0 and 1 and NaN outside [0, 1].
pub fn inverse_normal_cdf(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((r * 2509.0809287301227 + 33430.575583588128) * r
                + 67265.7709270087)
                * r
                + 45921.95393154987)
                * r
                + 13731.693765509461)
                * r
                + 1971.5909503065514)
                * r
                + 133.14166789178438)
                * r
                + 3.3871328727963665)
            / (((((((r * 5226.495278852546 + 28729.085735721943) * r
                + 39307.89580009271)
                * r
                + 21213.794301586597)
                * r
                + 5394.196021424751)
                * r
                + 687.1870074920579)
                * r
                + 42.31333070160091)
                * r
                + 1.0);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((r * 7.745450142783414e-4 + 0.022723844989269184) * r
            + 0.2417807251774506)
            * r
            + 1.2704582524523684)
            * r
            + 3.6478483247632045)
            * r
            + 5.769497221460691)
            * r
            + 4.630337846156545)
            * r
            + 1.4234371107496835)
            / (((((((r * 1.0507500716444169e-9 + 5.475938084995345e-4) * r
                + 0.015198666563616457)
                * r
                + 0.14810397642748008)
                * r
                + 0.6897673349851)
                * r
                + 1.6763848301838038)
                * r
                + 2.053191626637759)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((r * 2.0103343992922881e-7 + 2.7115555687434876e-5) * r
            + 0.0012426609473880784)
            * r
            + 0.026532189526576124)
            * r
            + 0.2965605718285049)
            * r
            + 1.7848265399172913)
            * r
            + 5.463784911164114)
            * r
            + 6.657904643501103)
            / (((((((r * 2.0442631033899397e-15 + 1.421511758316446e-7) * r
                + 1.8463183175100548e-5)
                * r
                + 7.868691311456133e-4)
                * r
                + 0.014875361290850615)
                * r
                + 0.1369298809227358)
                * r
                + 0.5998322065558879)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}
