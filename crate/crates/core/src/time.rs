use core::fmt;

use crate::error::Error;

/// Milliseconds since the Unix epoch, UTC.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimeInstant(i64);

impl TimeInstant {
    pub const fn from_millis(epoch_ms: i64) -> Self {
        TimeInstant(epoch_ms)
    }

    pub const fn from_secs(epoch_s: i64) -> Self {
        TimeInstant(epoch_s * 1000)
    }

    pub const fn millis(self) -> i64 {
        self.0
    }

    pub const fn add_millis(self, ms: i64) -> Self {
        TimeInstant(self.0 + ms)
    }

    /// Signed elapsed time from `earlier` to `self`, in seconds.
    pub fn seconds_since(self, earlier: TimeInstant) -> f64 {
        (self.0 - earlier.0) as f64 / 1000.0
    }
}

impl fmt::Debug for TimeInstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}

/// Closed time interval `[begin, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Period {
    pub begin: TimeInstant,
    pub end: TimeInstant,
}

impl Period {
    pub fn new(begin: TimeInstant, end: TimeInstant) -> Result<Self, Error> {
        if begin > end {
            return Err(Error::InvalidPeriod);
        }
        Ok(Period { begin, end })
    }

    pub fn instant(t: TimeInstant) -> Self {
        Period { begin: t, end: t }
    }

    pub fn contains(&self, t: TimeInstant) -> bool {
        self.begin <= t && t <= self.end
    }

    pub fn contains_period(&self, other: &Period) -> bool {
        self.begin <= other.begin && other.end <= self.end
    }

    pub fn duration_ms(&self) -> i64 {
        self.end.millis() - self.begin.millis()
    }

    pub fn union(&self, other: &Period) -> Period {
        Period {
            begin: self.begin.min(other.begin),
            end: self.end.max(other.end),
        }
    }

    pub fn intersection(&self, other: &Period) -> Option<Period> {
        let begin = self.begin.max(other.begin);
        let end = self.end.min(other.end);
        (begin <= end).then_some(Period { begin, end })
    }
}
