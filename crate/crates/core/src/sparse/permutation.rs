use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A reordering of `0..n`.
///
/// `order()[k]` is the original index placed at position `k` (the Matlab
/// convention `A(p, p)`), and `new_index(i)` is the position original index
/// `i` moves to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut inverse = vec![usize::MAX; n];
        for (k, &i) in order.iter().enumerate() {
            if i >= n {
                return Err(Error::invalid(format!("index {i} out of range for length {n}")));
            }
            if inverse[i] != usize::MAX {
                return Err(Error::invalid(format!("index {i} appears twice")));
            }
            inverse[i] = k;
        }
        Ok(Permutation { order, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn reversal(n: usize) -> Self {
        let order: Vec<usize> = (0..n).rev().collect();
        Permutation {
            inverse: order.clone(),
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inverse
    }

    pub fn new_index(&self, old: usize) -> usize {
        self.inverse[old]
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            order: self.inverse.clone(),
            inverse: self.order.clone(),
        }
    }

    /// `self ∘ inner`: permuting by the result equals permuting by `inner`
    /// first and then by `self`.
    pub fn compose(&self, inner: &Permutation) -> Result<Permutation> {
        if self.len() != inner.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: inner.len(),
            });
        }
        Permutation::from_order(self.order.iter().map(|&k| inner.order[k]).collect())
    }

    /// Whitespace-separated 0-based indices, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(8 * self.len());
        for i in &self.order {
            let _ = writeln!(s, "{i}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Permutation> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let order = text
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    msg: format!("bad index {t:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_order(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_order(vec![0, 0]).is_err());
        assert!(Permutation::from_order(vec![0, 2]).is_err());
        assert!(Permutation::from_order(vec![]).unwrap().is_empty());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let p = Permutation::from_order(vec![2, 0, 3, 1]).unwrap();
        for i in 0..4 {
            assert_eq!(p.new_index(p.order()[i]), i);
        }
        let id = p.compose(&p.inverse()).unwrap();
        assert_eq!(id, Permutation::identity(4));
    }

    #[test]
    fn text_round_trip() {
        let p = Permutation::from_order(vec![3, 1, 0, 2]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.txt");
        p.write(&path).unwrap();
        assert_eq!(Permutation::read(&path).unwrap(), p);
        std::fs::write(&path, "0 1 x").unwrap();
        assert!(Permutation::read(&path).is_err());
    }
}
