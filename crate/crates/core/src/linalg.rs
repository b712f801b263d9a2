//! Exact sparse Gaussian elimination.

use std::collections::BTreeMap;

use crate::scalar::FieldCoeff;

pub type SparseRow<F> = BTreeMap<usize, F>;

/// Incrementally reduced row echelon form of a linear system `A x = b`.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    ncols: usize,
    pivots: BTreeMap<usize, (SparseRow<F>, F)>,
    inconsistent: bool,
}

fn axpy<F: FieldCoeff>(row: &mut SparseRow<F>, factor: &F, other: &SparseRow<F>) {
    for (c, v) in other {
        let delta = factor.clone() * v.clone();
        match row.remove(c) {
            Some(old) => {
                let s = old - delta;
                if !s.is_zero() {
                    row.insert(*c, s);
                }
            }
            None => {
                if !delta.is_zero() {
                    row.insert(*c, -delta);
                }
            }
        }
    }
}

impl<F: FieldCoeff> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new(), inconsistent: false }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Add the equation `row · x = rhs`; returns false when it was dependent.
    pub fn insert(&mut self, mut row: SparseRow<F>, mut rhs: F) -> bool {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0usize;
        loop {
            let next = row.range(cursor..).find(|(c, _)| self.pivots.contains_key(c)).map(|(c, v)| (*c, v.clone()));
            let Some((c, factor)) = next else { break };
            let (prow, prhs) = &self.pivots[&c];
            axpy(&mut row, &factor, prow);
            rhs = rhs - factor * prhs.clone();
            cursor = c + 1;
        }
        let Some((&lead, lv)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return false;
        };
        let inv = F::one() / lv.clone();
        let row: SparseRow<F> = row.into_iter().map(|(c, v)| (c, v * inv.clone())).collect();
        self.pivots.insert(lead, (row, rhs * inv));
        true
    }

    fn back_substitute(&self, free: &BTreeMap<usize, F>) -> Vec<F> {
        let mut x = vec![F::zero(); self.ncols];
        for (c, v) in free {
            x[*c] = v.clone();
        }
        for (&p, (row, rhs)) in self.pivots.iter().rev() {
            let mut acc = rhs.clone();
            for (c, v) in row.range(p + 1..) {
                if !x[*c].is_zero() {
                    acc = acc - v.clone() * x[*c].clone();
                }
            }
            x[p] = acc;
        }
        x
    }

    /// A particular solution with all free variables zero.
    pub fn solution(&self) -> Option<Vec<F>> {
        if self.inconsistent {
            return None;
        }
        Some(self.back_substitute(&BTreeMap::new()))
    }

    /// Basis of the homogeneous solution space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let zeroed: BTreeMap<usize, (SparseRow<F>, F)> =
            self.pivots.iter().map(|(k, (r, _))| (*k, (r.clone(), F::zero()))).collect();
        let hom = Echelon { ncols: self.ncols, pivots: zeroed, inconsistent: false };
        (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|f| {
                let mut free = BTreeMap::new();
                free.insert(f, F::one());
                hom.back_substitute(&free)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_rational::BigRational;

    fn row(entries: &[(usize, i64)]) -> SparseRow<BigRational> {
        entries.iter().map(|&(c, v)| (c, q(v))).collect()
    }

    #[test]
    fn solves_small_system() {
        // x + y = 3, x - y = 1
        let mut e = Echelon::new(2);
        e.insert(row(&[(0, 1), (1, 1)]), q(3));
        e.insert(row(&[(0, 1), (1, -1)]), q(1));
        assert_eq!(e.solution().unwrap(), vec![q(2), q(1)]);
        assert!(e.kernel().is_empty());
    }

    #[test]
    fn detects_inconsistency() {
        let mut e = Echelon::new(2);
        e.insert(row(&[(0, 1), (1, 1)]), q(1));
        assert!(!e.insert(row(&[(0, 2), (1, 2)]), q(3)));
        assert!(e.solution().is_none());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let rows = [row(&[(0, 1), (1, 2), (2, 3)]), row(&[(1, 1), (3, -1)])];
        let mut e = Echelon::new(4);
        for r in &rows {
            e.insert(r.clone(), q(0));
        }
        let k = e.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            for r in &rows {
                let s = r.iter().fold(q(0), |a, (c, x)| a + x.clone() * v[*c].clone());
                assert_eq!(s, q(0));
            }
        }
    }
}
