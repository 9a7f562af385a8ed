//! Finite sample spaces.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Outcomes enumerable per space; keeps `{0,1}^N` constructions bounded.
pub const ENUMERATION_BUDGET: u128 = 1 << 22;

#[derive(Debug)]
struct Inner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Set when the space was built as `left × right`; pair `(i, j)` sits at
    /// position `i * |right| + j`.
    product: Option<(FiniteSpace, FiniteSpace)>,
}

/// An ordered finite set of distinct opaque outcome labels.
///
/// Cheap to clone; two spaces compare equal when their label sequences do.
#[derive(Clone, Debug)]
pub struct FiniteSpace(Arc<Inner>);

impl FiniteSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::build(labels.into_iter().map(Into::into).collect(), None)
    }

    fn build(labels: Vec<String>, product: Option<(FiniteSpace, FiniteSpace)>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(FiniteSpace(Arc::new(Inner {
            labels,
            index,
            product,
        })))
    }

    /// The space `{0,1}^n` of binary strings in lexicographic order.
    pub fn binary_strings(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        if (1u128 << n.min(127)) > ENUMERATION_BUDGET || n >= 127 {
            return Err(Error::BudgetExceeded(1u128 << n.min(127)));
        }
        let count = 1usize << n;
        let labels = (0..count)
            .map(|v| {
                (0..n)
                    .map(|bit| {
                        if v >> (n - 1 - bit) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect::<String>()
            })
            .collect();
        Self::build(labels, None)
    }

    /// The space `{0, …, n}` of counts.
    pub fn counts(n: usize) -> Self {
        Self::build((0..=n).map(|k| k.to_string()).collect(), None)
            .expect("count labels are distinct")
    }

    /// All sequences of length `n` over `alphabet`, in lexicographic order.
    pub fn sequences(alphabet: &FiniteSpace, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let m = alphabet.len() as u128;
        let total = m
            .checked_pow(n as u32)
            .ok_or(Error::BudgetExceeded(u128::MAX))?;
        if total > ENUMERATION_BUDGET {
            return Err(Error::BudgetExceeded(total));
        }
        let mut labels = Vec::with_capacity(total as usize);
        let mut idx = vec![0usize; n];
        loop {
            labels.push(
                idx.iter()
                    .map(|&i| alphabet.label(i))
                    .collect::<Vec<_>>()
                    .join(""),
            );
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Self::build(labels, None);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < alphabet.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// The product `left × right`, pairs ordered left-major.
    pub fn product(left: &FiniteSpace, right: &FiniteSpace) -> Result<Self> {
        let mut labels = Vec::with_capacity(left.len() * right.len());
        for a in left.labels() {
            for b in right.labels() {
                labels.push(pair_label(a, b));
            }
        }
        Self::build(labels, Some((left.clone(), right.clone())))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one label
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.0.index.get(label).copied()
    }

    /// Component spaces when this is a product space.
    pub fn factors(&self) -> Result<(&FiniteSpace, &FiniteSpace)> {
        match &self.0.product {
            Some((l, r)) => Ok((l, r)),
            None => Err(Error::NotAProductSpace),
        }
    }

    pub fn pair_index(&self, left: usize, right: usize) -> Result<usize> {
        let (_, r) = self.factors()?;
        Ok(left * r.len() + right)
    }

    pub fn unpair_index(&self, i: usize) -> Result<(usize, usize)> {
        let (_, r) = self.factors()?;
        Ok((i / r.len(), i % r.len()))
    }
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for FiniteSpace {}

pub fn pair_label(left: &str, right: &str) -> String {
    format!("({left},{right})")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(matches!(
            FiniteSpace::new(["a", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            FiniteSpace::new(Vec::<String>::new()),
            Err(Error::EmptySpace)
        ));
    }

    #[test]
    fn binary_strings_lexicographic() {
        let s = FiniteSpace::binary_strings(2).unwrap();
        assert_eq!(s.labels(), ["00", "01", "10", "11"]);
        assert_eq!(s.position("10"), Some(2));
    }

    #[test]
    fn counts_space() {
        let s = FiniteSpace::counts(3);
        assert_eq!(s.labels(), ["0", "1", "2", "3"]);
    }

    #[test]
    fn product_indexing() {
        let a = FiniteSpace::new(["x", "y"]).unwrap();
        let b = FiniteSpace::new(["A", "B", "C"]).unwrap();
        let p = FiniteSpace::product(&a, &b).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.label(p.pair_index(1, 2).unwrap()), "(y,C)");
        assert_eq!(p.unpair_index(4).unwrap(), (1, 1));
        assert!(a.factors().is_err());
    }

    #[test]
    fn sequences_over_alphabet() {
        let alpha = FiniteSpace::new(["a", "b"]).unwrap();
        let s = FiniteSpace::sequences(&alpha, 2).unwrap();
        assert_eq!(s.labels(), ["aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn enumeration_budget_enforced() {
        let alpha = FiniteSpace::new(["a", "b", "c"]).unwrap();
        assert!(matches!(
            FiniteSpace::sequences(&alpha, 20),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(matches!(
            FiniteSpace::binary_strings(40),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
