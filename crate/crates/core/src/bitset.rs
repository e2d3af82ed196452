//! Fixed-size bit sets over dense vertex ids.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for v in 0..len {
            s.insert(v);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.len && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self ∩ mask ⊆ other`.
    #[inline]
    pub fn is_subset_within(&self, other: &BitSet, mask: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .zip(&mask.words)
            .all(|((a, b), m)| a & m & !b == 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }
}

impl FromIterator<usize> for BitSet {
    /// Capacity is one past the largest element.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let items: Vec<usize> = iter.into_iter().collect();
        let len = items.iter().max().map_or(0, |m| m + 1);
        let mut s = BitSet::new(len);
        for v in items {
            s.insert(v);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_iter() {
        let mut s = BitSet::new(130);
        for v in [0, 5, 64, 129] {
            s.insert(v);
        }
        s.remove(5);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(s.count(), 3);
        assert!(!s.contains(500));
    }

    #[test]
    fn subset_within_mask() {
        let a: BitSet = [1, 2, 3].into_iter().collect();
        let mut b = BitSet::new(4);
        b.insert(1);
        b.insert(2);
        let mut mask = BitSet::new(4);
        mask.insert(1);
        mask.insert(2);
        assert!(!a.is_subset(&b));
        assert!(a.is_subset_within(&b, &mask));
    }
}
