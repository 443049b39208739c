//! Product bases of spin-S chains restricted to a total-Sᶻ sector.
//!
//! Local states are labelled by `m = 2Sᶻ ∈ {-2S, -2S+2, …, 2S}` so that every
//! projection is an integer. Site indices are 1-based wherever they cross the
//! public API.

use crate::error::{Error, Result};
use crate::product::{BasisTag, ProductBasis, DEFAULT_ENUMERATION_GUARD};

/// Direction of a spin ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Enumerated Sᶻ-sector basis of a length-`L` spin-S chain.
///
/// Immutable after construction; configurations are stored in strictly
/// increasing packed-key order and `index_of` is their exact inverse.
#[derive(Debug, Clone)]
pub struct SpinBasis {
    two_s: u32,
    two_sz_total: Option<i64>,
    inner: ProductBasis,
}

impl SpinBasis {
    /// Enumerate the sector with the default enumeration guard.
    pub fn new(length: usize, two_s: u32, two_sz_total: Option<i64>) -> Result<Self> {
        Self::with_guard(length, two_s, two_sz_total, DEFAULT_ENUMERATION_GUARD)
    }

    /// Enumerate the sector, refusing to build more than `guard` configurations.
    pub fn with_guard(
        length: usize,
        two_s: u32,
        two_sz_total: Option<i64>,
        guard: u128,
    ) -> Result<Self> {
        if length < 2 {
            return Err(Error::InvalidArgument(format!(
                "chain length must be at least 2, got {length}"
            )));
        }
        if two_s == 0 || two_s > 254 {
            return Err(Error::InvalidArgument(format!(
                "2S must lie in 1..=254, got {two_s}"
            )));
        }
        let span = length as i64 * two_s as i64;
        let digit_sum = match two_sz_total {
            None => None,
            Some(tz) => {
                if (tz - span).rem_euclid(2) != 0 || tz.abs() > span {
                    return Err(Error::EmptySector {
                        length,
                        two_s,
                        two_sz_total: tz,
                    });
                }
                Some(((tz + span) / 2) as u32)
            }
        };
        let inner =
            ProductBasis::enumerate("spin", length, two_s + 1, digit_sum, guard)?;
        if inner.len() == 0 {
            return Err(Error::EmptySector {
                length,
                two_s,
                two_sz_total: two_sz_total.unwrap_or(0),
            });
        }
        Ok(Self {
            two_s,
            two_sz_total,
            inner,
        })
    }

    pub fn length(&self) -> usize {
        self.inner.length()
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    /// Spin quantum number S.
    pub fn spin(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn two_sz_total(&self) -> Option<i64> {
        self.two_sz_total
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len() == 0
    }

    pub fn tag(&self) -> BasisTag {
        self.inner.tag()
    }

    /// Packed keys in ascending order.
    pub fn keys(&self) -> &[u64] {
        self.inner.keys()
    }

    /// `m_j = 2Sᶻ_j` of every site (0-based storage) for configuration `ordinal`.
    pub fn config(&self, ordinal: usize) -> Vec<i32> {
        self.inner
            .digits(ordinal)
            .iter()
            .map(|&d| digit_to_m(d, self.two_s))
            .collect()
    }

    /// `m_j` for the 1-based `site` of configuration `ordinal`.
    #[inline]
    pub fn m(&self, ordinal: usize, site: usize) -> i32 {
        digit_to_m(self.inner.digits(ordinal)[site - 1], self.two_s)
    }

    pub(crate) fn digits(&self, ordinal: usize) -> &[u8] {
        self.inner.digits(ordinal)
    }

    pub(crate) fn place_value(&self, site0: usize) -> u64 {
        self.inner.place_value(site0)
    }

    pub(crate) fn index_of_key(&self, key: u64) -> Option<usize> {
        self.inner.index_of_key(key)
    }

    /// Packed key of a configuration given as `m_j` values.
    pub fn key_of(&self, config: &[i32]) -> Result<u64> {
        if config.len() != self.length() {
            return Err(Error::DimensionMismatch(format!(
                "configuration has {} sites, basis has {}",
                config.len(),
                self.length()
            )));
        }
        let digits = config
            .iter()
            .map(|&m| m_to_digit(m, self.two_s))
            .collect::<Result<Vec<u8>>>()?;
        Ok(self.inner.pack(&digits))
    }

    /// Ordinal of a configuration, or `None` if it lies outside the sector.
    pub fn index_of(&self, config: &[i32]) -> Option<usize> {
        self.key_of(config)
            .ok()
            .and_then(|key| self.inner.index_of_key(key))
    }
}

#[inline]
fn digit_to_m(d: u8, two_s: u32) -> i32 {
    2 * d as i32 - two_s as i32
}

fn m_to_digit(m: i32, two_s: u32) -> Result<u8> {
    let shifted = m + two_s as i32;
    if m.abs() > two_s as i32 || shifted % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "m = {m} is not an admissible projection for 2S = {two_s}"
        )));
    }
    Ok((shifted / 2) as u8)
}

/// Whether `m` is a valid value of `2Sᶻ` for spin `two_s / 2`.
pub fn is_admissible(m: i32, two_s: u32) -> bool {
    m_to_digit(m, two_s).is_ok()
}

/// Sᶻ eigenvalue `m_j / 2` of the 1-based `site`.
pub fn apply_sz(config: &[i32], site: usize) -> Result<f64> {
    check_site(site, config.len())?;
    Ok(config[site - 1] as f64 / 2.0)
}

/// `4·|⟨m±2|S±|m⟩|² = 2S(2S+2) - m(m±2)` in doubled units, or zero when the
/// ladder annihilates the state.
#[inline]
pub(crate) fn ladder_weight_x4(two_s: u32, m: i32, direction: Ladder) -> i64 {
    let ts = two_s as i64;
    let m = m as i64;
    let target = match direction {
        Ladder::Raise => m + 2,
        Ladder::Lower => m - 2,
    };
    if target.abs() > ts {
        return 0;
    }
    ts * (ts + 2) - m * target
}

/// Matrix element `√(S(S+1) − m(m±1))` of a ladder operator (physical units).
pub fn ladder_amplitude(two_s: u32, m: i32, direction: Ladder) -> Option<f64> {
    match ladder_weight_x4(two_s, m, direction) {
        0 => None,
        w => Some((w as f64).sqrt() / 2.0),
    }
}

/// Apply `S⁺_j` or `S⁻_j` to a configuration, returning the target
/// configuration and its real amplitude, or `None` if the state is annihilated.
pub fn apply_raise_lower(
    two_s: u32,
    config: &[i32],
    site: usize,
    direction: Ladder,
) -> Result<Option<(Vec<i32>, f64)>> {
    check_site(site, config.len())?;
    let m = config[site - 1];
    if !is_admissible(m, two_s) {
        return Err(Error::InvalidArgument(format!(
            "m = {m} is not an admissible projection for 2S = {two_s}"
        )));
    }
    Ok(ladder_amplitude(two_s, m, direction).map(|amp| {
        let mut out = config.to_vec();
        out[site - 1] += match direction {
            Ladder::Raise => 2,
            Ladder::Lower => -2,
        };
        (out, amp)
    }))
}

fn check_site(site: usize, length: usize) -> Result<()> {
    if site == 0 || site > length {
        return Err(Error::SiteOutOfRange { site, length });
    }
    Ok(())
}
