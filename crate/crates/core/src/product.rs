//! Mixed-radix enumeration shared by the spin and boson bases.
//!
//! A configuration is a length-`L` array of per-site digits in `0..radix`,
//! packed into a `u64` key with site 1 as the most significant digit. Keys are
//! generated in strictly increasing order, so ordinal lookup is a binary
//! search over a sorted array.

use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Default cap on the number of configurations a basis may enumerate.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 20_000_000;

/// Opaque identity of a basis, carried by operators and states so that
/// operands on different bases are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisTag(pub u64);

#[derive(Debug, Clone)]
pub(crate) struct ProductBasis {
    length: usize,
    radix: u32,
    keys: Vec<u64>,
    // Row-major `dim x length` digit table.
    digits: Vec<u8>,
    tag: BasisTag,
}

impl ProductBasis {
    pub(crate) fn enumerate(
        kind: &'static str,
        length: usize,
        radix: u32,
        digit_sum: Option<u32>,
        guard: u128,
    ) -> Result<Self> {
        debug_assert!(radix >= 2 && radix <= u8::MAX as u32 + 1);
        let full = (radix as u128)
            .checked_pow(length as u32)
            .filter(|&n| n <= u64::MAX as u128)
            .ok_or(Error::Capacity {
                what: "packed key range",
                requested: u128::MAX,
                limit: u64::MAX as u128,
            })?;

        let count = match digit_sum {
            None => full,
            Some(s) => count_with_sum(length, radix, s),
        };
        if count > guard {
            return Err(Error::Capacity {
                what: "basis enumeration",
                requested: count,
                limit: guard,
            });
        }
        let count = count as usize;

        let mut keys = Vec::with_capacity(count);
        let mut digits = Vec::with_capacity(count * length);
        let mut current = vec![0u8; length];
        match digit_sum {
            None => {
                for key in 0..full as u64 {
                    let mut rest = key;
                    for site in (0..length).rev() {
                        current[site] = (rest % radix as u64) as u8;
                        rest /= radix as u64;
                    }
                    keys.push(key);
                    digits.extend_from_slice(&current);
                }
            }
            Some(s) => {
                let max_tail = max_tail_sums(length, radix);
                fill_with_sum(
                    0,
                    s,
                    0,
                    radix,
                    &max_tail,
                    &mut current,
                    &mut keys,
                    &mut digits,
                );
            }
        }
        debug_assert_eq!(keys.len(), count);

        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        (kind, length, radix, digit_sum, keys.len()).hash(&mut hasher);
        let tag = BasisTag(hasher.finish());

        Ok(Self {
            length,
            radix,
            keys,
            digits,
            tag,
        })
    }

    pub(crate) fn length(&self) -> usize {
        self.length
    }

    pub(crate) fn radix(&self) -> u32 {
        self.radix
    }

    pub(crate) fn len(&self) -> usize {
        self.keys.len()
    }

    pub(crate) fn tag(&self) -> BasisTag {
        self.tag
    }

    pub(crate) fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub(crate) fn digits(&self, ordinal: usize) -> &[u8] {
        &self.digits[ordinal * self.length..(ordinal + 1) * self.length]
    }

    /// Weight of `site` (0-based) in the packed key.
    pub(crate) fn place_value(&self, site: usize) -> u64 {
        (self.radix as u64).pow((self.length - 1 - site) as u32)
    }

    pub(crate) fn pack(&self, digits: &[u8]) -> u64 {
        digits
            .iter()
            .fold(0u64, |acc, &d| acc * self.radix as u64 + d as u64)
    }

    pub(crate) fn index_of_key(&self, key: u64) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }
}

/// Number of length-`length` digit strings over `0..radix` whose digits sum to `sum`.
pub(crate) fn count_with_sum(length: usize, radix: u32, sum: u32) -> u128 {
    let sum = sum as usize;
    let mut ways = vec![0u128; sum + 1];
    ways[0] = 1;
    for _ in 0..length {
        let mut next = vec![0u128; sum + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for d in 0..radix as usize {
                if s + d > sum {
                    break;
                }
                next[s + d] = next[s + d].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[sum]
}

fn max_tail_sums(length: usize, radix: u32) -> Vec<u32> {
    (0..=length)
        .map(|site| (length - site) as u32 * (radix - 1))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn fill_with_sum(
    site: usize,
    remaining: u32,
    key: u64,
    radix: u32,
    max_tail: &[u32],
    current: &mut [u8],
    keys: &mut Vec<u64>,
    digits: &mut Vec<u8>,
) {
    let length = current.len();
    if site == length {
        if remaining == 0 {
            keys.push(key);
            digits.extend_from_slice(current);
        }
        return;
    }
    let tail = max_tail[site + 1];
    let lo = remaining.saturating_sub(tail);
    let hi = remaining.min(radix - 1);
    for d in lo..=hi {
        current[site] = d as u8;
        fill_with_sum(
            site + 1,
            remaining - d,
            key * radix as u64 + d as u64,
            radix,
            max_tail,
            current,
            keys,
            digits,
        );
    }
}
