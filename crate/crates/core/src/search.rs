//! Expansion budgets for the exponential searches.

use serde::Serialize;

/// Optional cap on node expansions. `Budget::unlimited()` never runs out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub cap: Option<u64>,
}

impl Budget {
    pub const fn unlimited() -> Self {
        Budget { cap: None }
    }

    pub const fn limited(cap: u64) -> Self {
        Budget { cap: Some(cap) }
    }
}

/// Counts expansions against a [`Budget`]. Once exhausted it stays exhausted.
#[derive(Clone, Debug)]
pub struct Meter {
    cap: Option<u64>,
    used: u64,
    exhausted: bool,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Meter {
            cap: budget.cap,
            used: 0,
            exhausted: false,
        }
    }

    /// Charges one expansion; returns `false` when the budget is spent.
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        if let Some(cap) = self.cap {
            if self.used >= cap {
                self.exhausted = true;
                return false;
            }
        }
        self.used += 1;
        true
    }

    pub fn expansions(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }
}

/// Result of an exact search: a witness, a proof of absence, or neither.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<T> {
    Found(T),
    Absent,
    Exhausted,
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Search::Absent)
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, Search::Exhausted)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        match self {
            Search::Found(t) => Search::Found(f(t)),
            Search::Absent => Search::Absent,
            Search::Exhausted => Search::Exhausted,
        }
    }

    /// `Some(found?)`, or `None` when the search ran out of budget.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Search::Found(_) => Some(true),
            Search::Absent => Some(false),
            Search::Exhausted => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_budget_is_exhausted_immediately() {
        let mut m = Meter::new(Budget::limited(0));
        assert!(!m.tick());
        assert!(m.exhausted());
        assert_eq!(m.expansions(), 0);
    }

    #[test]
    fn limited_budget_counts() {
        let mut m = Meter::new(Budget::limited(2));
        assert!(m.tick());
        assert!(m.tick());
        assert!(!m.tick());
        assert!(!m.tick());
        assert_eq!(m.expansions(), 2);
    }
}
