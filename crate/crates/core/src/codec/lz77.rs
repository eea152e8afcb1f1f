//! Greedy LZ77 with byte-aligned token framing.
//!
//! Tokens are grouped eight at a time behind a flag byte. Bit `k` (LSB
//! first) of the flag describes the `k`-th token of the group: set means a
//! back-reference encoded as a 2-byte little-endian offset followed by one
//! byte holding `length - min_match`; clear means one literal byte. Unused
//! bits of the final flag byte are zero.

use crate::error::{Error, Result};

const HASH_BITS: u32 = 15;
const NO_POS: u32 = u32::MAX;
/// Largest offset the 2-byte field can carry.
const MAX_OFFSET: usize = u16::MAX as usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lz77Params {
    /// Sliding window size; offsets are additionally capped at 65535.
    pub window_bytes: usize,
    pub min_match: usize,
    pub max_match: usize,
    /// Candidates examined per position by the encoder's hash-chain search.
    /// Does not affect the wire format.
    pub max_chain: usize,
    /// The encoder takes the first match at least this long without searching
    /// further. Does not affect the wire format.
    pub nice_len: usize,
}

impl Default for Lz77Params {
    fn default() -> Self {
        Self {
            window_bytes: 32 * 1024,
            min_match: 3,
            max_match: 258,
            max_chain: 32,
            nice_len: 32,
        }
    }
}

impl Lz77Params {
    /// Search every candidate in the window: true greedy longest match.
    pub fn exhaustive() -> Self {
        Self { max_chain: usize::MAX, nice_len: usize::MAX, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_bytes == 0 || self.window_bytes > 1 << 16 {
            return Err(Error::param("window_bytes", format!("{} outside 1..=65536", self.window_bytes)));
        }
        if self.min_match < 3 {
            return Err(Error::param("min_match", format!("{} < 3", self.min_match)));
        }
        if self.max_match < self.min_match {
            return Err(Error::param("max_match", "must be >= min_match"));
        }
        if self.max_match - self.min_match > u8::MAX as usize {
            return Err(Error::param("max_match", "max_match - min_match must fit in one byte"));
        }
        if self.max_chain == 0 {
            return Err(Error::param("max_chain", "must be at least 1"));
        }
        if self.nice_len == 0 {
            return Err(Error::param("nice_len", "must be at least 1"));
        }
        Ok(())
    }

    fn max_offset(&self) -> usize {
        self.window_bytes.min(MAX_OFFSET)
    }
}

#[inline]
fn hash3(b: &[u8]) -> usize {
    let v = (b[0] as u32) | (b[1] as u32) << 8 | (b[2] as u32) << 16;
    (v.wrapping_mul(0x9E37_79B1) >> (32 - HASH_BITS)) as usize
}

/// Length of the common prefix of `a` and `b`, at most `limit`. Both slices
/// must hold at least `limit` bytes.
#[inline]
fn common_prefix(a: &[u8], b: &[u8], limit: usize) -> usize {
    let (a, b) = (&a[..limit], &b[..limit]);
    let mut n = 0;
    while n + 8 <= limit {
        let x = u64::from_le_bytes(a[n..n + 8].try_into().unwrap());
        let y = u64::from_le_bytes(b[n..n + 8].try_into().unwrap());
        let diff = x ^ y;
        if diff != 0 {
            return n + (diff.trailing_zeros() / 8) as usize;
        }
        n += 8;
    }
    while n < limit && a[n] == b[n] {
        n += 1;
    }
    n
}

struct TokenWriter {
    out: Vec<u8>,
    flag_at: usize,
    in_group: u8,
}

impl TokenWriter {
    fn with_capacity(n: usize) -> Self {
        Self { out: Vec::with_capacity(n), flag_at: 0, in_group: 8 }
    }

    #[inline]
    fn begin_token(&mut self, is_ref: bool) {
        if self.in_group == 8 {
            self.flag_at = self.out.len();
            self.out.push(0);
            self.in_group = 0;
        }
        if is_ref {
            self.out[self.flag_at] |= 1 << self.in_group;
        }
        self.in_group += 1;
    }

    #[inline]
    fn literal(&mut self, b: u8) {
        self.begin_token(false);
        self.out.push(b);
    }

    #[inline]
    fn reference(&mut self, offset: usize, len: usize, min_match: usize) {
        self.begin_token(true);
        self.out.extend_from_slice(&(offset as u16).to_le_bytes());
        self.out.push((len - min_match) as u8);
    }
}

/// Greedy longest-match encoding. Ties go to the nearest match.
pub fn lz77_encode(data: &[u8], params: &Lz77Params) -> Result<Vec<u8>> {
    params.validate()?;
    let n = data.len();
    let max_offset = params.max_offset();
    let mut w = TokenWriter::with_capacity(n + n / 8 + 1);
    let mut head = vec![NO_POS; 1 << HASH_BITS];
    let mut prev = vec![NO_POS; n];

    let insert = |head: &mut [u32], prev: &mut [u32], pos: usize| {
        if pos + 3 <= n {
            let h = hash3(&data[pos..]);
            prev[pos] = head[h];
            head[h] = pos as u32;
        }
    };

    let mut i = 0;
    while i < n {
        let limit = params.max_match.min(n - i);
        let mut best_len = 0;
        let mut best_off = 0;
        if limit >= params.min_match {
            let mut cand = head[hash3(&data[i..])];
            let mut steps = 0;
            while cand != NO_POS && steps < params.max_chain {
                let j = cand as usize;
                let off = i - j;
                if off > max_offset {
                    break;
                }
                // Cheap reject before the full comparison.
                if data[j + best_len.min(limit - 1)] == data[i + best_len.min(limit - 1)] {
                    let len = common_prefix(&data[j..], &data[i..], limit);
                    if len > best_len {
                        best_len = len;
                        best_off = off;
                        if len == limit || len >= params.nice_len {
                            break;
                        }
                    }
                }
                cand = prev[j];
                steps += 1;
            }
        }

        if best_len >= params.min_match {
            w.reference(best_off, best_len, params.min_match);
            for pos in i..i + best_len {
                insert(&mut head, &mut prev, pos);
            }
            i += best_len;
        } else {
            w.literal(data[i]);
            insert(&mut head, &mut prev, i);
            i += 1;
        }
    }
    Ok(w.out)
}

pub fn lz77_decode(data: &[u8], params: &Lz77Params) -> Result<Vec<u8>> {
    params.validate()?;
    let mut out = Vec::with_capacity(data.len() * 4);
    let mut pos = 0;
    while pos < data.len() {
        let flag_at = pos;
        let flag = data[pos];
        pos += 1;
        for bit in 0..8 {
            if pos == data.len() {
                if bit == 0 || flag >> bit != 0 {
                    return Err(Error::stream(flag_at, "truncated token group"));
                }
                break;
            }
            if flag & (1 << bit) == 0 {
                out.push(data[pos]);
                pos += 1;
                continue;
            }
            let Some(tok) = data.get(pos..pos + 3) else {
                return Err(Error::stream(pos, format!("truncated back-reference: {} of 3 bytes", data.len() - pos)));
            };
            let offset = u16::from_le_bytes([tok[0], tok[1]]) as usize;
            let len = tok[2] as usize + params.min_match;
            if len > params.max_match {
                return Err(Error::stream(pos + 2, format!("match length {len} exceeds {}", params.max_match)));
            }
            if offset == 0 || offset > out.len() {
                return Err(Error::stream(
                    pos,
                    format!("back-reference offset {offset} before stream start ({} bytes decoded)", out.len()),
                ));
            }
            let start = out.len() - offset;
            if offset >= len {
                out.extend_from_within(start..start + len);
            } else {
                for k in 0..len {
                    let b = out[start + k];
                    out.push(b);
                }
            }
            pos += 3;
        }
    }
    Ok(out)
}
