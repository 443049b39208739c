//! Initial product states: explicit patterns and domain-wall generators.

use crate::basis::{is_admissible, SpinBasis};
use crate::dynamics::StateVector;
use crate::error::{Error, Result};

/// How the initial configuration is produced. Patterns list `m_j = 2Sᶻ_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialSpec {
    Pattern(Vec<i32>),
    /// Block of `+2S` spins in a `−2S` background. `length` defaults to
    /// `⌊L/2⌋` and `center` to `⌊L/2⌋`; the island covers sites
    /// `center − ⌈len/2⌉ + 1 ..= center + ⌊len/2⌋`.
    SingleIsland { length: Option<usize>, center: Option<usize> },
    /// `k + 1` alternating fully polarized domains with zero total
    /// magnetization. Odd `k` starts with an up domain, even `k` with a down one.
    NWalls(usize),
}

impl InitialSpec {
    /// Accepts `single_island`, `single_island(len)`, `single_island(len, center)`,
    /// `n_walls(k)`, or a comma-separated list of integers.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let call = |name: &str| -> Option<Option<Vec<usize>>> {
            let rest = s.strip_prefix(name)?;
            if rest.is_empty() {
                return Some(Some(Vec::new()));
            }
            let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
            if inner.is_empty() {
                return Some(Some(Vec::new()));
            }
            Some(inner.split(',').map(|a| a.parse().ok()).collect())
        };
        if let Some(args) = call("single_island") {
            let args = args.ok_or_else(|| Error::Config(format!("bad arguments in `{text}`")))?;
            return match args[..] {
                [] => Ok(Self::SingleIsland { length: None, center: None }),
                [len] => Ok(Self::SingleIsland { length: Some(len), center: None }),
                [len, c] => Ok(Self::SingleIsland { length: Some(len), center: Some(c) }),
                _ => Err(Error::Config(format!("single_island takes at most two arguments: `{text}`"))),
            };
        }
        if let Some(args) = call("n_walls") {
            return match args.as_deref() {
                Some([k]) => Ok(Self::NWalls(*k)),
                _ => Err(Error::Config(format!("n_walls takes one integer argument: `{text}`"))),
            };
        }
        let pattern = s
            .split(',')
            .map(|x| x.parse::<i32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Config(format!("`{text}` is neither a directive nor a list of integers")))?;
        Ok(Self::Pattern(pattern))
    }

    /// Configuration for a chain of `length` sites with spin `two_s / 2`.
    pub fn resolve(&self, length: usize, two_s: u32) -> Result<Vec<i32>> {
        let up = two_s as i32;
        let config = match self {
            Self::Pattern(p) => p.clone(),
            Self::SingleIsland { length: len, center } => {
                let len = len.unwrap_or(length / 2);
                let center = center.unwrap_or(length / 2);
                let first = (center + 1).checked_sub(len.div_ceil(2));
                let last = center + len / 2;
                match first {
                    Some(first) if len > 0 && first >= 1 && last <= length => (1..=length)
                        .map(|j| if (first..=last).contains(&j) { up } else { -up })
                        .collect(),
                    _ => {
                        return Err(Error::Config(format!(
                            "island of {len} sites around site {center} does not fit in {length} sites"
                        )))
                    }
                }
            }
            Self::NWalls(k) => n_walls(length, two_s, *k)?,
        };
        if config.len() != length {
            return Err(Error::Config(format!(
                "pattern has {} entries but the chain has {length} sites",
                config.len()
            )));
        }
        if let Some((j, &m)) = config.iter().enumerate().find(|(_, &m)| !is_admissible(m, two_s)) {
            return Err(Error::Config(format!(
                "m = {m} at site {} is not admissible for 2S = {two_s}",
                j + 1
            )));
        }
        Ok(config)
    }
}

fn n_walls(length: usize, two_s: u32, k: usize) -> Result<Vec<i32>> {
    let domains = k + 1;
    let ups = domains / 2;
    let downs = domains - ups;
    if k == 0 || length % 2 != 0 || ups > length / 2 || downs > length / 2 {
        return Err(Error::Config(format!(
            "cannot place {k} domain walls with zero magnetization on {length} sites"
        )));
    }
    let split = |sites: usize, parts: usize| -> Vec<usize> {
        (0..parts).map(|i| sites / parts + usize::from(i < sites % parts)).collect()
    };
    let up_sizes = split(length / 2, ups);
    let down_sizes = split(length / 2, downs);
    let start_up = k % 2 == 1;
    let (mut u, mut d) = (up_sizes.iter(), down_sizes.iter());
    let mut config = Vec::with_capacity(length);
    for i in 0..domains {
        let is_up = (i % 2 == 0) == start_up;
        let (size, m) = if is_up {
            (*u.next().expect("domain count"), two_s as i32)
        } else {
            (*d.next().expect("domain count"), -(two_s as i32))
        };
        config.extend(std::iter::repeat(m).take(size));
    }
    Ok(config)
}

/// Product state for `config` on `basis`, which must be the sector of `Σ m_j`.
pub fn build_initial_state(config: &[i32], basis: &SpinBasis) -> Result<StateVector> {
    let total: i64 = config.iter().map(|&m| m as i64).sum();
    if let Some(sector) = basis.two_sz_total() {
        if sector != total {
            return Err(Error::InvalidArgument(format!(
                "initial state has 2Sz_tot = {total}, basis sector is {sector}"
            )));
        }
    }
    StateVector::product(basis, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_three_halves_central_island() {
        let c = InitialSpec::parse("single_island(6)").unwrap().resolve(12, 3).unwrap();
        assert_eq!(c, vec![-3, -3, -3, 3, 3, 3, 3, 3, 3, -3, -3, -3]);
        assert_eq!(c.iter().sum::<i32>(), 0);
    }

    #[test]
    fn two_spin_island_sector() {
        let c = InitialSpec::parse("single_island(2)").unwrap().resolve(12, 3).unwrap();
        assert_eq!(c.iter().filter(|&&m| m == 3).count(), 2);
        assert_eq!(c[5..7], [3, 3]);
        let sz_tot: f64 = c.iter().map(|&m| m as f64 / 2.0).sum();
        assert_eq!(sz_tot, -12.0);
    }

    #[test]
    fn spin_one_island_of_six() {
        let c = InitialSpec::parse("single_island").unwrap().resolve(12, 2).unwrap();
        assert_eq!(c, vec![-2, -2, -2, 2, 2, 2, 2, 2, 2, -2, -2, -2]);
    }

    #[test]
    fn explicit_patterns() {
        let c = InitialSpec::parse(" 1, -1 ,1,-1").unwrap().resolve(4, 1).unwrap();
        assert_eq!(c, vec![1, -1, 1, -1]);
        assert!(InitialSpec::parse("1,-1").unwrap().resolve(4, 1).is_err());
        assert!(InitialSpec::parse("3,-1").unwrap().resolve(2, 1).is_err());
        assert!(InitialSpec::parse("2,-2").unwrap().resolve(2, 1).is_err());
        assert!(InitialSpec::parse("up,down").is_err());
    }

    #[test]
    fn island_placement() {
        let c = InitialSpec::parse("single_island(2, 1)").unwrap().resolve(6, 1).unwrap();
        assert_eq!(c, vec![1, 1, -1, -1, -1, -1]);
        assert!(InitialSpec::parse("single_island(2, 0)").unwrap().resolve(6, 1).is_err());
        assert!(InitialSpec::parse("single_island(4, 5)").unwrap().resolve(6, 1).is_err());
        assert!(InitialSpec::parse("single_island(1,2,3)").is_err());
    }

    #[test]
    fn domain_walls() {
        let walls = |k| InitialSpec::NWalls(k).resolve(12, 3).unwrap();
        assert_eq!(walls(1), [vec![3; 6], vec![-3; 6]].concat());
        assert_eq!(walls(2), InitialSpec::parse("single_island").unwrap().resolve(12, 3).unwrap());
        for k in [1, 2, 3, 5] {
            let c = walls(k);
            assert_eq!(c.iter().sum::<i32>(), 0);
            assert_eq!(c.windows(2).filter(|w| w[0] != w[1]).count(), k);
        }
        assert!(InitialSpec::NWalls(0).resolve(12, 3).is_err());
        assert!(InitialSpec::NWalls(3).resolve(7, 1).is_err());
        assert!(InitialSpec::NWalls(9).resolve(8, 1).is_err());
    }

    #[test]
    fn sector_must_match() {
        let basis = SpinBasis::new(4, 1, Some(0)).unwrap();
        assert!(build_initial_state(&[1, 1, 1, -1], &basis).is_err());
        let psi = build_initial_state(&[1, -1, 1, -1], &basis).unwrap();
        assert_eq!(psi.norm(), 1.0);
    }
}
