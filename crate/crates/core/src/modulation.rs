//! Modulation levels: how far a signal can travel and how many units it
//! needs for a given demand.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    /// Longest path cost this level can serve.
    pub reach: f64,
    /// Demand units are divided by this (rounding up) to get the width.
    pub divisor: u32,
}

/// Levels ordered from least to most spectrally efficient: reaches strictly
/// decreasing, divisors strictly increasing. Level numbers are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulationTable {
    levels: Vec<Level>,
}

impl ModulationTable {
    pub fn new(levels: Vec<Level>) -> Result<Self, Error> {
        if levels.is_empty() {
            return Err(Error::InvalidTable("no levels".into()));
        }
        for (i, l) in levels.iter().enumerate() {
            if !(l.reach > 0.0) || !l.reach.is_finite() {
                return Err(Error::InvalidTable(format!(
                    "level {}: reach must be positive",
                    i + 1
                )));
            }
            if l.divisor == 0 {
                return Err(Error::InvalidTable(format!(
                    "level {}: divisor must be positive",
                    i + 1
                )));
            }
        }
        for (i, w) in levels.windows(2).enumerate() {
            if !(w[1].reach < w[0].reach) || w[1].divisor <= w[0].divisor {
                return Err(Error::InvalidTable(format!(
                    "level {} must have shorter reach and larger divisor than level {}",
                    i + 2,
                    i + 1
                )));
            }
        }
        Ok(ModulationTable { levels })
    }

    /// `levels` levels, the first reaching `1.5 * longest_sp`, each next one
    /// reaching half as far with divisor equal to its level number.
    pub fn default_for(longest_sp: f64, levels: u32) -> Result<Self, Error> {
        Self::with_reach_factor(longest_sp, levels, 1.5)
    }

    pub fn with_reach_factor(longest_sp: f64, levels: u32, factor: f64) -> Result<Self, Error> {
        if !(longest_sp > 0.0) || !(factor > 0.0) {
            return Err(Error::InvalidTable("reach base must be positive".into()));
        }
        let top = factor * longest_sp;
        let mut reach = top;
        let levels = (1..=levels)
            .map(|m| {
                let l = Level { reach, divisor: m };
                reach /= 2.0;
                l
            })
            .collect();
        Self::new(levels)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// 1-based level lookup.
    pub fn level(&self, number: u8) -> &Level {
        &self.levels[number as usize - 1]
    }

    pub fn max_reach(&self) -> f64 {
        self.levels[0].reach
    }

    /// Width of `demand` units at level `number`.
    pub fn width_at(&self, number: u8, demand: u32) -> u32 {
        demand.div_ceil(self.level(number).divisor)
    }

    /// Most efficient level whose reach covers `cost`, or `None` past the
    /// longest reach. Its width is the smallest among all usable levels.
    #[inline]
    pub fn best_level(&self, cost: f64) -> Option<u8> {
        // reaches are decreasing, so usable levels form a prefix
        let usable = self.levels.iter().take_while(|l| l.reach >= cost).count();
        (usable > 0).then_some(usable as u8)
    }

    #[inline]
    pub fn required_width(&self, demand: u32, cost: f64) -> Option<u32> {
        self.best_level(cost).map(|m| self.width_at(m, demand))
    }
}

impl fmt::Display for ModulationTable {
    /// `reach:divisor` pairs, comma separated; parsed back by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", l.reach, l.divisor)?;
        }
        Ok(())
    }
}

impl FromStr for ModulationTable {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let levels = text
            .split(',')
            .map(|part| {
                let (r, d) = part.trim().split_once(':').ok_or_else(|| {
                    Error::InvalidTable(format!("expected reach:divisor, got {part:?}"))
                })?;
                let reach = r
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidTable(format!("bad reach {r:?}")))?;
                let divisor = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidTable(format!("bad divisor {d:?}")))?;
                Ok(Level { reach, divisor })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Self::new(levels)
    }
}
