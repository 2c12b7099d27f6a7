//! Finite multisets with ordered keys and positive multiplicities.

use std::collections::BTreeMap;
use std::fmt;

/// A finite multiset over `T`. No zero counts are stored, so structural
/// equality is multiset equality. Ordering is by degree first, then by the
/// sorted `(item, count)` sequence, which keeps basis enumerations stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, u32>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset { counts: BTreeMap::new() }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The Kronecker multiset with a single copy of `item`.
    pub fn delta(item: T) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(item, 1);
        Multiset { counts }
    }

    pub fn from_counts(pairs: impl IntoIterator<Item = (T, u32)>) -> Self {
        let mut counts = BTreeMap::new();
        for (item, k) in pairs {
            if k > 0 {
                *counts.entry(item).or_insert(0) += k;
            }
        }
        Multiset { counts }
    }

    pub fn insert(&mut self, item: T, k: u32) {
        if k > 0 {
            *self.counts.entry(item).or_insert(0) += k;
        }
    }

    /// Total multiplicity.
    pub fn degree(&self) -> u32 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, item: &T) -> u32 {
        self.counts.get(item).copied().unwrap_or(0)
    }

    /// Items with nonzero count.
    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u32)> {
        self.counts.iter().map(|(t, k)| (t, *k))
    }

    /// Pointwise sum.
    pub fn union_add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (item, k) in other.iter() {
            out.insert(item.clone(), k);
        }
        out
    }

    /// Remove one copy of `item`; `None` if it is not present.
    pub fn remove_one(&self, item: &T) -> Option<Self> {
        let k = self.counts.get(item)?;
        let mut out = self.clone();
        if *k == 1 {
            out.counts.remove(item);
        } else {
            *out.counts.get_mut(item).unwrap() -= 1;
        }
        Some(out)
    }

    /// n-fold scaling of every multiplicity.
    pub fn scale(&self, n: u32) -> Self {
        if n == 0 {
            return Self::empty();
        }
        Multiset {
            counts: self.counts.iter().map(|(t, k)| (t.clone(), k * n)).collect(),
        }
    }
}

impl<T: Ord> PartialOrd for Multiset<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Multiset<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let da: u32 = self.counts.values().sum();
        let db: u32 = other.counts.values().sum();
        da.cmp(&db).then_with(|| self.counts.iter().cmp(other.counts.iter()))
    }
}

impl<T: Ord + fmt::Display> fmt::Display for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("{}");
        }
        f.write_str("{")?;
        for (i, (item, k)) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if *k == 1 {
                write!(f, "{item}")?;
            } else {
                write!(f, "{item}:{k}")?;
            }
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_and_removal() {
        let mut m = Multiset::empty();
        m.insert("x", 2);
        m.insert("y", 1);
        assert_eq!(m.degree(), 3);
        assert_eq!(m.support().count(), 2);
        let m2 = m.remove_one(&"x").unwrap();
        assert_eq!(m2.count(&"x"), 1);
        assert_eq!(m2.degree(), 2);
        assert!(m.remove_one(&"z").is_none());
        // removing the last copy drops the key entirely
        let m3 = m2.remove_one(&"x").unwrap();
        assert_eq!(m3.count(&"x"), 0);
        assert_eq!(m3, Multiset::from_counts([("y", 1)]));
    }

    #[test]
    fn ordering_is_degree_then_lex() {
        let small = Multiset::from_counts([("b", 1)]);
        let big = Multiset::from_counts([("a", 2)]);
        assert!(small < big);
        let x = Multiset::from_counts([("a", 1)]);
        let y = Multiset::from_counts([("b", 1)]);
        assert!(x < y);
    }
}
