//! Demands, solver results, and the total order that picks one answer among
//! equally short candidates.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::spectrum::Window;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Demand {
    pub src: u32,
    pub dst: u32,
    /// Units needed at the least efficient modulation level.
    pub units: u32,
}

impl Demand {
    pub fn new(src: u32, dst: u32, units: u32) -> Result<Self, Error> {
        if src == dst {
            return Err(Error::InvalidDemand(alloc::format!(
                "src and dst are both {src}"
            )));
        }
        if units == 0 {
            return Err(Error::InvalidDemand("zero units".into()));
        }
        Ok(Demand { src, dst, units })
    }
}

/// An accepted demand: path, its cost, modulation level and slot window.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// Vertices from source to destination.
    pub path: Vec<u32>,
    pub cost: f64,
    /// 1-based modulation level.
    pub level: u8,
    pub window: Window,
}

impl Assignment {
    pub fn hops(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    /// Preference order shared by every solver: lower cost, then narrower
    /// window, then lower start, then lexicographically smaller path, then
    /// the more efficient level. `Less` means `self` is preferred.
    pub fn preference(&self, other: &Assignment) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.window.width.cmp(&other.window.width))
            .then(self.window.start.cmp(&other.window.start))
            .then_with(|| self.path.cmp(&other.path))
            .then(other.level.cmp(&self.level))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn a(cost: f64, width: u32, start: u32, path: Vec<u32>, level: u8) -> Assignment {
        Assignment {
            path,
            cost,
            level,
            window: Window::new(start, width),
        }
    }

    #[test]
    fn preference_order() {
        let base = a(2.0, 3, 5, vec![0, 1, 2], 2);
        assert_eq!(
            base.preference(&a(3.0, 1, 0, vec![0, 2], 4)),
            Ordering::Less
        );
        assert_eq!(
            base.preference(&a(2.0, 2, 9, vec![0, 2], 3)),
            Ordering::Greater
        );
        assert_eq!(
            base.preference(&a(2.0, 3, 6, vec![0, 0], 2)),
            Ordering::Less
        );
        assert_eq!(
            base.preference(&a(2.0, 3, 5, vec![0, 3, 2], 2)),
            Ordering::Less
        );
        assert_eq!(
            base.preference(&a(2.0, 3, 5, vec![0, 1, 2], 1)),
            Ordering::Less
        );
        assert_eq!(base.preference(&base.clone()), Ordering::Equal);
    }

    #[test]
    fn demand_validation() {
        assert!(Demand::new(1, 1, 3).is_err());
        assert!(Demand::new(0, 1, 0).is_err());
        assert_eq!(Demand::new(0, 1, 3).unwrap().units, 3);
    }
}
