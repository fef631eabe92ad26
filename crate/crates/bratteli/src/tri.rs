//! Three-valued truth for facts that a finite truncation may not decide.

use std::fmt;

/// Kleene-style truth value: `Yes`, `No`, or `Unknown`.
///
/// Rules in this crate never fire on `Unknown` premises, so conclusions are
/// sound even when the underlying object is only represented to finite depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tri {
    Yes,
    No,
    #[default]
    Unknown,
}

impl Tri {
    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }

    pub fn is_no(self) -> bool {
        self == Tri::No
    }

    pub fn is_unknown(self) -> bool {
        self == Tri::Unknown
    }

    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    /// Kleene conjunction.
    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
            (Tri::No, Tri::No) => Tri::No,
            _ => Tri::Unknown,
        }
    }

    pub fn negate(self) -> Tri {
        match self {
            Tri::Yes => Tri::No,
            Tri::No => Tri::Yes,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Tri {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "yes" => Ok(Tri::Yes),
            "no" => Ok(Tri::No),
            "unknown" => Ok(Tri::Unknown),
            _ => Err(()),
        }
    }
}
