//! Finite formal linear combinations with a canonical key order.

use std::collections::BTreeMap;

use crate::scalar::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub struct Lin<K: Ord, R> {
    terms: BTreeMap<K, R>,
}

impl<K: Ord, R> Default for Lin<K, R> {
    fn default() -> Self {
        Lin { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, R: Coeff> Lin<K, R> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: R) -> Self {
        let mut out = Self::zero();
        out.add_term(k, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&K, &R)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn get(&self, k: &K) -> R {
        self.terms.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn add_term(&mut self, k: K, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&k) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(k, s);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &R) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone() * c.clone());
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v.clone());
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-R::one());
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-R::one())
    }

    pub fn map_keys<K2: Ord + Clone>(&self, f: impl Fn(&K) -> K2) -> Lin<K2, R> {
        let mut out = Lin::zero();
        for (k, v) in &self.terms {
            out.add_term(f(k), v.clone());
        }
        out
    }

    pub fn into_map(self) -> BTreeMap<K, R> {
        self.terms
    }
}

impl<K: Ord + Clone, R: Coeff> FromIterator<(K, R)> for Lin<K, R> {
    fn from_iter<I: IntoIterator<Item = (K, R)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (k, v) in iter {
            out.add_term(k, v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut a: Lin<u32, _> = Lin::single(1, q(2));
        a.add_term(1, q(-2));
        assert!(a.is_zero());
        a.add_term(3, q(0));
        assert!(a.is_zero());
    }

    #[test]
    fn arithmetic() {
        let a: Lin<u32, _> = [(0, q(1)), (1, q(2))].into_iter().collect();
        let b: Lin<u32, _> = [(1, q(2)), (2, q(5))].into_iter().collect();
        let d = a.minus(&b);
        assert_eq!(d.get(&1), q(0));
        assert_eq!(d.get(&2), q(-5));
        assert_eq!(a.plus(&a), a.scale(&q(2)));
        assert!(a.plus(&a.neg()).is_zero());
    }
}
