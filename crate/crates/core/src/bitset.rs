//! Fixed-length bitset used for subsets of group elements.

const BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bitset {
    len: usize,
    blocks: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            len,
            blocks: vec![0; (len + BITS - 1) / BITS],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bitset {
            len,
            blocks: vec![!0u64; (len + BITS - 1) / BITS],
        };
        b.mask_tail();
        b
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, iter: I) -> Self {
        let mut b = Bitset::new(len);
        for i in iter {
            b.set(i);
        }
        b
    }

    fn mask_tail(&mut self) {
        let rem = self.len % BITS;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.blocks[i / BITS] |= 1u64 << (i % BITS);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.blocks[i / BITS] &= !(1u64 << (i % BITS));
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.blocks[i / BITS] >> (i % BITS) & 1 != 0
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn or_assign(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
    }

    pub fn and_assign(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    /// self \ other
    pub fn difference(&self, other: &Bitset) -> Bitset {
        debug_assert_eq!(self.len, other.len);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a & !b)
            .collect();
        Bitset {
            len: self.len,
            blocks,
        }
    }

    pub fn complement(&self) -> Bitset {
        let mut b = Bitset {
            len: self.len,
            blocks: self.blocks.iter().map(|x| !x).collect(),
        };
        b.mask_tail();
        b
    }

    pub fn intersects(&self, other: &Bitset) -> bool {
        self.blocks.iter().zip(&other.blocks).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &Bitset) -> bool {
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (w, &b) in self.blocks.iter().enumerate() {
            if b != 0 {
                return Some(w * BITS + b.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(w, &block)| {
            let mut b = block;
            std::iter::from_fn(move || {
                if b == 0 {
                    None
                } else {
                    let i = b.trailing_zeros() as usize;
                    b &= b - 1;
                    Some(w * BITS + i)
                }
            })
        })
    }

    /// Stable key for deduplication and deterministic ordering.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut b = Bitset::new(70);
        b.set(0);
        b.set(63);
        b.set(69);
        assert!(b.get(0) && b.get(63) && b.get(69));
        assert!(!b.get(1));
        assert_eq!(b.count(), 3);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![0, 63, 69]);
    }

    #[test]
    fn full_and_complement_respect_length() {
        let b = Bitset::full(70);
        assert_eq!(b.count(), 70);
        assert!(b.is_full());
        let c = b.complement();
        assert!(c.is_empty());
        assert_eq!(Bitset::new(70).complement().count(), 70);
    }

    #[test]
    fn difference_and_subset() {
        let a = Bitset::from_indices(10, [1, 2, 3]);
        let b = Bitset::from_indices(10, [2, 3, 4]);
        assert_eq!(a.difference(&b).iter_ones().collect::<Vec<_>>(), vec![1]);
        assert!(Bitset::from_indices(10, [2]).is_subset_of(&b));
        assert!(!a.is_subset_of(&b));
    }
}
