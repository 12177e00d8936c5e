use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An ordinary variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Name(pub String);

/// A continuation variable. Lives in its own namespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoName(pub String);

impl Name {
    pub fn new(s: impl Into<String>) -> Self {
        Name(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl CoName {
    pub fn new(s: impl Into<String>) -> Self {
        CoName(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for CoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Strips trailing digits so that `x12` freshens to `x13` rather than `x121`.
pub(crate) fn base_of(s: &str) -> &str {
    let trimmed = s.trim_end_matches(|c: char| c.is_ascii_digit());
    if trimmed.is_empty() {
        s
    } else {
        trimmed
    }
}

/// Deterministic supply of identifiers avoiding a growing set of used names.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    used: HashSet<String>,
}

impl Fresh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Fresh {
            used: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.used.insert(name.into());
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    /// Returns `hint` itself if unused, else `base1`, `base2`, ... for the
    /// first free suffix. The result is reserved.
    pub fn name(&mut self, hint: &str) -> String {
        if !self.used.contains(hint) {
            self.used.insert(hint.to_string());
            return hint.to_string();
        }
        let base = base_of(hint);
        let mut i = 1usize;
        loop {
            let cand = format!("{base}{i}");
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
            i += 1;
        }
    }

    /// Like [`Fresh::name`] but never returns the hint unchanged.
    pub fn renamed(&mut self, hint: &str) -> String {
        self.used.insert(hint.to_string());
        self.name(hint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_never_collides() {
        let mut f = Fresh::avoiding(["x", "x1", "y"]);
        assert_eq!(f.name("z"), "z");
        assert_eq!(f.name("x"), "x2");
        assert_eq!(f.name("x1"), "x3");
        assert_eq!(f.renamed("w"), "w1");
    }
}
