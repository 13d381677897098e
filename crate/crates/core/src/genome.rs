//! Direct 10-bit encoding of a network as a 582-byte bitstring.
//!
//! Fields are big-endian and laid out back to back, most significant bit
//! first, in [`Network::params`] order. Index `k` encodes
//! `-64 + k * 128 / 1023`, so both endpoints are exact and zero is not
//! representable. The last 6 bits of the final byte are carried but unused.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::network::{Network, HIDDEN, INPUTS, OUTPUTS, PARAM_COUNT};
use crate::rng::RngStream;

pub const FIELD_BITS: usize = 10;
pub const HIDDEN_UNIT_BITS: usize = (INPUTS + 1) * FIELD_BITS;
pub const OUTPUT_UNIT_BITS: usize = (HIDDEN + 1) * FIELD_BITS;
pub const USED_BITS: usize = HIDDEN * HIDDEN_UNIT_BITS + OUTPUTS * OUTPUT_UNIT_BITS;
pub const GENOME_BYTES: usize = 582;
pub const TOTAL_BITS: usize = GENOME_BYTES * 8;

const _: () = assert!(HIDDEN_UNIT_BITS == 250 && OUTPUT_UNIT_BITS == 100);
const _: () = assert!(USED_BITS == PARAM_COUNT * FIELD_BITS);
const _: () = assert!(USED_BITS == 4650 && TOTAL_BITS - USED_BITS == 6);

pub const QUANT_MAX: u32 = 1023;
pub const WEIGHT_LIMIT: f64 = 64.0;
pub const QUANT_STEP: f64 = 2.0 * WEIGHT_LIMIT / QUANT_MAX as f64;

pub fn quant_value(k: u32) -> Result<f64> {
    if k > QUANT_MAX {
        return Err(Error::QuantIndexOutOfRange(k));
    }
    Ok(value_of(k))
}

#[inline]
fn value_of(k: u32) -> f64 {
    -WEIGHT_LIMIT + k as f64 * (2.0 * WEIGHT_LIMIT) / QUANT_MAX as f64
}

/// Nearest quantization index, ties to even.
pub fn quant_index(value: f64) -> Option<u32> {
    if !(-WEIGHT_LIMIT..=WEIGHT_LIMIT).contains(&value) {
        return None;
    }
    let k = libm::rint((value + WEIGHT_LIMIT) * QUANT_MAX as f64 / (2.0 * WEIGHT_LIMIT));
    Some(k.clamp(0.0, QUANT_MAX as f64) as u32)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genome([u8; GENOME_BYTES]);

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hex = self.to_hex();
        write!(f, "Genome({}..)", &hex[..16])
    }
}

impl Genome {
    pub fn zeros() -> Self {
        Self([0; GENOME_BYTES])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; GENOME_BYTES] = bytes.try_into().map_err(|_| Error::GenomeLength {
            expected: GENOME_BYTES,
            actual: bytes.len(),
        })?;
        Ok(Self(arr))
    }

    pub fn random(rng: &mut RngStream) -> Self {
        let mut g = Self::zeros();
        rand::RngCore::fill_bytes(rng, &mut g.0);
        g
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] >> (7 - i % 8) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.0[i / 8] ^= 1 << (7 - i % 8);
    }

    fn field(&self, n: usize) -> u32 {
        let start = n * FIELD_BITS;
        (start..start + FIELD_BITS).fold(0, |acc, i| acc << 1 | self.bit(i) as u32)
    }

    fn set_field(&mut self, n: usize, k: u32) {
        let start = n * FIELD_BITS;
        for b in 0..FIELD_BITS {
            let want = k >> (FIELD_BITS - 1 - b) & 1 == 1;
            if self.bit(start + b) != want {
                self.flip(start + b);
            }
        }
    }

    /// Clears the 6 phenotype-inert trailing bits.
    pub fn clear_unused(&mut self) {
        self.0[GENOME_BYTES - 1] &= 0b1100_0000;
    }

    pub fn decode(&self) -> Network {
        let params: Vec<f64> = (0..PARAM_COUNT).map(|n| value_of(self.field(n))).collect();
        Network::from_params(&params).expect("quantized parameters are always valid")
    }

    pub fn encode(net: &Network) -> Result<Self> {
        let mut g = Self::zeros();
        for (n, value) in net.params().into_iter().enumerate() {
            let k = quant_index(value).ok_or(Error::ParameterOutOfRange { index: n, value })?;
            g.set_field(n, k);
        }
        Ok(g)
    }

    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let mut s = String::with_capacity(GENOME_BYTES * 2);
        for &b in &self.0 {
            s.push(DIGITS[(b >> 4) as usize] as char);
            s.push(DIGITS[(b & 15) as usize] as char);
        }
        s
    }

    pub fn from_hex(hex: &str) -> Result<Self> {
        let hex = hex.as_bytes();
        if hex.len() != GENOME_BYTES * 2 {
            return Err(Error::GenomeLength {
                expected: GENOME_BYTES,
                actual: hex.len() / 2,
            });
        }
        let nibble = |c: u8| match c {
            b'0'..=b'9' => Ok(c - b'0'),
            b'a'..=b'f' => Ok(c - b'a' + 10),
            _ => Err(Error::Config(alloc::format!(
                "invalid hex digit {:?}",
                c as char
            ))),
        };
        let mut g = Self::zeros();
        for (i, pair) in hex.chunks(2).enumerate() {
            g.0[i] = nibble(pair[0])? << 4 | nibble(pair[1])?;
        }
        Ok(g)
    }
}

/// Single-point crossover at a bit position drawn from `1..TOTAL_BITS`;
/// the children swap everything from the cut onward.
pub fn crossover(a: &Genome, b: &Genome, rng: &mut RngStream) -> (Genome, Genome) {
    let cut = 1 + rng.below(TOTAL_BITS - 1);
    crossover_at(a, b, cut)
}

pub fn crossover_at(a: &Genome, b: &Genome, cut: usize) -> (Genome, Genome) {
    let (mut c1, mut c2) = (a.clone(), b.clone());
    let byte = cut / 8;
    let rem = cut % 8;
    let mut start = byte;
    if rem != 0 {
        // low (8 - rem) bits of this byte lie at or after the cut
        let tail = 0xffu8 >> rem;
        let (x, y) = (a.0[byte], b.0[byte]);
        c1.0[byte] = (x & !tail) | (y & tail);
        c2.0[byte] = (y & !tail) | (x & tail);
        start += 1;
    }
    c1.0[start..].copy_from_slice(&b.0[start..]);
    c2.0[start..].copy_from_slice(&a.0[start..]);
    (c1, c2)
}

/// Flips every bit independently with probability `p`.
pub fn mutate(g: &Genome, p: f64, rng: &mut RngStream) -> Genome {
    let mut out = g.clone();
    mutate_in_place(&mut out, p, rng);
    out
}

pub fn mutate_in_place(g: &mut Genome, p: f64, rng: &mut RngStream) {
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for b in g.0.iter_mut() {
            *b = !*b;
        }
        return;
    }
    // geometric skips between flips: same distribution as per-bit trials
    let ln_q = libm::log(1.0 - p);
    let mut i = 0usize;
    loop {
        let u = 1.0 - rng.unit(); // (0, 1]
        let skip = libm::floor(libm::log(u) / ln_q);
        if skip >= (TOTAL_BITS - i) as f64 {
            break;
        }
        i += skip as usize;
        g.flip(i);
        i += 1;
        if i >= TOTAL_BITS {
            break;
        }
    }
}
