//! Interval-set algebra over the spectrum units of an edge.
//!
//! A [`SlotSet`] is a union of half-open unit intervals kept in canonical
//! form: sorted, non-empty, and with a gap of at least one unit between
//! neighbours. Canonical form is unique, so derived equality and ordering
//! are meaningful.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::Error;

/// Half-open run of units `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub lo: u32,
    pub hi: u32,
}

impl Span {
    pub fn new(lo: u32, hi: u32) -> Self {
        Span { lo, hi }
    }

    pub fn width(&self) -> u32 {
        self.hi - self.lo
    }
}

/// Contiguous block of units handed to one connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub start: u32,
    pub width: u32,
}

impl Window {
    pub fn new(start: u32, width: u32) -> Self {
        debug_assert!(width >= 1);
        Window { start, width }
    }

    pub fn end(&self) -> u32 {
        self.start + self.width
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotSet {
    spans: Vec<Span>,
}

impl SlotSet {
    pub fn empty() -> Self {
        SlotSet { spans: Vec::new() }
    }

    /// `[0, units)`.
    pub fn full(units: u32) -> Self {
        if units == 0 {
            return Self::empty();
        }
        SlotSet {
            spans: alloc::vec![Span::new(0, units)],
        }
    }

    /// Builds the canonical set covering every unit of every input pair.
    /// Empty and inverted pairs contribute nothing.
    pub fn from_spans<I>(spans: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut raw: Vec<Span> = spans
            .into_iter()
            .filter(|&(lo, hi)| lo < hi)
            .map(|(lo, hi)| Span::new(lo, hi))
            .collect();
        raw.sort_unstable();
        let mut out: Vec<Span> = Vec::with_capacity(raw.len());
        for s in raw {
            match out.last_mut() {
                Some(last) if s.lo <= last.hi => last.hi = last.hi.max(s.hi),
                _ => out.push(s),
            }
        }
        SlotSet { spans: out }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Number of units in the set.
    pub fn len(&self) -> u32 {
        self.spans.iter().map(Span::width).sum()
    }

    pub fn contains_unit(&self, unit: u32) -> bool {
        self.contains_window(Window::new(unit, 1))
    }

    pub fn intersect(&self, other: &SlotSet) -> SlotSet {
        self.intersect_constricted(other, 1)
    }

    /// `intersect` followed by `constrict(min_width)` in a single merge.
    ///
    /// Pieces of an intersection of two canonical sets never touch, so the
    /// filtered output is already canonical.
    pub fn intersect_constricted(&self, other: &SlotSet, min_width: u32) -> SlotSet {
        let (a, b) = (&self.spans, &other.spans);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = a[i].hi.min(b[j].hi);
            if hi > lo && hi - lo >= min_width {
                out.push(Span::new(lo, hi));
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        SlotSet { spans: out }
    }

    /// Removes `w`, which must lie inside a single span.
    pub fn subtract(&self, w: Window) -> Result<SlotSet, Error> {
        let mut out = self.clone();
        out.remove_window(w)?;
        Ok(out)
    }

    /// In-place form of [`SlotSet::subtract`].
    pub fn remove_window(&mut self, w: Window) -> Result<(), Error> {
        let idx = self.covering_span(w).ok_or(Error::WindowNotContained {
            start: w.start,
            width: w.width,
        })?;
        let span = self.spans[idx];
        let left = Span::new(span.lo, w.start);
        let right = Span::new(w.end(), span.hi);
        match (left.width() > 0, right.width() > 0) {
            (true, true) => {
                self.spans[idx] = left;
                self.spans.insert(idx + 1, right);
            }
            (true, false) => self.spans[idx] = left,
            (false, true) => self.spans[idx] = right,
            (false, false) => {
                self.spans.remove(idx);
            }
        }
        Ok(())
    }

    /// Keeps the spans at least `min_width` units wide.
    pub fn constrict(&self, min_width: u32) -> SlotSet {
        SlotSet {
            spans: self
                .spans
                .iter()
                .copied()
                .filter(|s| s.width() >= min_width)
                .collect(),
        }
    }

    pub fn contains_window(&self, w: Window) -> bool {
        self.covering_span(w).is_some()
    }

    fn covering_span(&self, w: Window) -> Option<usize> {
        // Last span starting at or before the window.
        let idx = self.spans.partition_point(|s| s.lo <= w.start);
        if idx == 0 {
            return None;
        }
        let s = self.spans[idx - 1];
        (w.width > 0 && s.hi >= w.end()).then_some(idx - 1)
    }

    /// Lowest-start window of `width` units inside the set.
    pub fn first_fit(&self, width: u32) -> Option<Window> {
        self.spans
            .iter()
            .find(|s| s.width() >= width)
            .map(|s| Window::new(s.lo, width))
    }

    /// Highest-start window of `width` units inside the set.
    pub fn last_fit(&self, width: u32) -> Option<Window> {
        self.spans
            .iter()
            .rev()
            .find(|s| s.width() >= width)
            .map(|s| Window::new(s.hi - width, width))
    }

    pub fn is_superset(&self, other: &SlotSet) -> bool {
        let a = &self.spans;
        let mut i = 0;
        for s in &other.spans {
            while i < a.len() && a[i].hi < s.hi {
                i += 1;
            }
            if i == a.len() || a[i].lo > s.lo {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for SlotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.spans.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}-{}", s.lo, s.hi)?;
        }
        Ok(())
    }
}

impl FromStr for SlotSet {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: alloc::format!("{msg}: {text:?}"),
        };
        let text = text.trim();
        if text.is_empty() {
            return Ok(SlotSet::empty());
        }
        let mut pairs = Vec::new();
        for part in text.split(',') {
            let (lo, hi) = part
                .trim()
                .split_once('-')
                .ok_or_else(|| bad("missing '-'"))?;
            let lo: u32 = lo.parse().map_err(|_| bad("bad lower bound"))?;
            let hi: u32 = hi.parse().map_err(|_| bad("bad upper bound"))?;
            if lo >= hi {
                return Err(bad("empty span"));
            }
            pairs.push((lo, hi));
        }
        Ok(SlotSet::from_spans(pairs))
    }
}
