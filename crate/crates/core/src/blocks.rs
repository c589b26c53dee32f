//! Division of an `m`-element vector into pipeline blocks.

use core::ops::Range;

use crate::error::{Error, Result};

/// `m` elements in `ceil(m / block_size)` blocks; all blocks are full except
/// possibly the last. Indices outside `[0, blocks)` name zero-length virtual
/// blocks, which the pipelines use for warm-up and drain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockPartition {
    elements: usize,
    block_size: usize,
}

impl BlockPartition {
    pub fn new(elements: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidArgument("block size must be at least 1"));
        }
        Ok(Self {
            elements,
            block_size,
        })
    }

    /// Partition into (at most) `blocks` blocks of size `ceil(m / blocks)`.
    ///
    /// The resulting count can be smaller than requested when `blocks` does
    /// not divide `m` evenly; with `m = 0` the partition is empty.
    pub fn with_block_count(elements: usize, blocks: usize) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidArgument("block count must be at least 1"));
        }
        Self::new(elements, elements.div_ceil(blocks).max(1))
    }

    /// A single block covering the whole vector.
    pub fn unpipelined(elements: usize) -> Self {
        Self {
            elements,
            block_size: elements.max(1),
        }
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> usize {
        self.elements.div_ceil(self.block_size)
    }

    /// `(offset, length)` of block `j`; length 0 outside `[0, blocks)`.
    pub fn extent(&self, j: isize) -> (usize, usize) {
        if j < 0 || j as usize >= self.blocks() {
            return (0, 0);
        }
        let offset = j as usize * self.block_size;
        (offset, self.block_size.min(self.elements - offset))
    }

    pub fn range(&self, j: isize) -> Range<usize> {
        let (offset, len) = self.extent(j);
        offset..offset + len
    }

    pub fn len_of(&self, j: isize) -> usize {
        self.extent(j).1
    }

    /// Block index holding element `index`.
    pub fn block_of(&self, index: usize) -> usize {
        index / self.block_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn ten_by_four() {
        let p = BlockPartition::new(10, 4).unwrap();
        assert_eq!(p.blocks(), 3);
        let ext: Vec<_> = (0..3).map(|j| p.extent(j)).collect();
        assert_eq!(ext, [(0, 4), (4, 4), (8, 2)]);
        assert_eq!(p.extent(2), (8, 2));
    }

    #[test]
    fn empty_vector_has_no_blocks() {
        let p = BlockPartition::new(0, 16000).unwrap();
        assert_eq!(p.blocks(), 0);
        assert_eq!(p.len_of(0), 0);
    }

    #[test]
    fn exact_single_block() {
        let p = BlockPartition::new(16000, 16000).unwrap();
        assert_eq!(p.blocks(), 1);
        assert_eq!(p.extent(0), (0, 16000));
    }

    #[test]
    fn virtual_blocks_are_empty() {
        let p = BlockPartition::new(10, 4).unwrap();
        assert_eq!(p.len_of(-1), 0);
        assert_eq!(p.len_of(3), 0);
        assert_eq!(p.len_of(isize::MIN), 0);
        assert_eq!(p.range(-5), 0..0);
    }

    #[test]
    fn zero_block_size_rejected() {
        assert!(matches!(
            BlockPartition::new(10, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(BlockPartition::with_block_count(10, 0).is_err());
    }

    #[test]
    fn by_count() {
        let p = BlockPartition::with_block_count(10, 3).unwrap();
        assert_eq!(p.block_size(), 4);
        assert_eq!(p.blocks(), 3);
        // 4 requested, ceil(10/4)=3 per block, still 4 blocks
        assert_eq!(BlockPartition::with_block_count(10, 4).unwrap().blocks(), 4);
        // 6 requested, size 2, only 5 blocks materialise
        assert_eq!(BlockPartition::with_block_count(10, 6).unwrap().blocks(), 5);
        assert_eq!(BlockPartition::with_block_count(0, 6).unwrap().blocks(), 0);
        assert_eq!(BlockPartition::unpipelined(7).blocks(), 1);
        assert_eq!(BlockPartition::unpipelined(0).blocks(), 0);
    }

    #[test]
    fn exhaustive_small_partitions() {
        for m in 0..200usize {
            for bs in 1..=m + 1 {
                let p = BlockPartition::new(m, bs).unwrap();
                let b = p.blocks() as isize;
                let mut next = 0;
                for j in 0..b {
                    let (off, len) = p.extent(j);
                    assert_eq!(off, next);
                    assert!(len > 0);
                    if j + 1 < b {
                        assert_eq!(len, bs);
                    }
                    next += len;
                }
                assert_eq!(next, m);
                let total: usize = (-3..b + 3).map(|j| p.len_of(j)).sum();
                assert_eq!(total, m);
            }
        }
    }

    proptest! {
        #[test]
        fn block_of_agrees_with_extent(m in 1usize..5000, bs in 1usize..300, idx in 0usize..5000) {
            let p = BlockPartition::new(m, bs).unwrap();
            let idx = idx % m;
            let j = p.block_of(idx);
            prop_assert!(p.range(j as isize).contains(&idx));
        }
    }
}
