//! Post-order numbered, balanced binary trees over contiguous rank ranges.
//!
//! Every subtree occupies a contiguous range of ranks that ends at its root,
//! so the product over a subtree is the ordered product over that range. The
//! first child of a non-leaf `i` is always `i - 1`; it roots the upper part of
//! the remaining ranks, the second child roots the lower part.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{Error, Result};

pub type Rank = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeId {
    A,
    B,
}

impl TreeId {
    pub fn as_char(self) -> char {
        match self {
            TreeId::A => 'A',
            TreeId::B => 'B',
        }
    }
}

/// Per-rank links.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub tree: TreeId,
    pub parent: Option<Rank>,
    pub child_first: Option<Rank>,
    pub child_second: Option<Rank>,
    pub depth: usize,
    /// Smallest rank of the subtree rooted here.
    pub subtree_lo: Rank,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.child_first.is_none()
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }
}

/// Either two post-order trees whose roots are each other's dual, or a
/// single post-order tree over all ranks (used by the reduce-then-broadcast
/// baselines).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeTopology {
    nodes: Vec<Node>,
    root_a: Rank,
    root_b: Option<Rank>,
}

const PLACEHOLDER: Node = Node {
    tree: TreeId::A,
    parent: None,
    child_first: None,
    child_second: None,
    depth: 0,
    subtree_lo: 0,
};

impl TreeTopology {
    /// Two trees: A over the lower `ceil(p/2)` ranks, B over the rest.
    pub fn build_dual_trees(procs: usize) -> Result<Self> {
        if procs == 0 {
            return Err(Error::InvalidArgument("process count must be at least 1"));
        }
        let split = procs.div_ceil(2);
        let mut nodes = vec![PLACEHOLDER; procs];
        let root_a = build_subtree(&mut nodes, 0, split - 1, None, 0, TreeId::A);
        let root_b = (split < procs)
            .then(|| build_subtree(&mut nodes, split, procs - 1, None, 0, TreeId::B));
        Ok(Self {
            nodes,
            root_a,
            root_b,
        })
    }

    /// One tree over all ranks, root `p - 1`.
    pub fn build_single_tree(procs: usize) -> Result<Self> {
        if procs == 0 {
            return Err(Error::InvalidArgument("process count must be at least 1"));
        }
        let mut nodes = vec![PLACEHOLDER; procs];
        let root_a = build_subtree(&mut nodes, 0, procs - 1, None, 0, TreeId::A);
        Ok(Self {
            nodes,
            root_a,
            root_b: None,
        })
    }

    pub fn procs(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, rank: Rank) -> Result<&Node> {
        self.nodes.get(rank).ok_or(Error::RankOutOfRange {
            rank,
            procs: self.nodes.len(),
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root_a(&self) -> Rank {
        self.root_a
    }

    pub fn root_b(&self) -> Option<Rank> {
        self.root_b
    }

    pub fn root_of(&self, tree: TreeId) -> Option<Rank> {
        match tree {
            TreeId::A => Some(self.root_a),
            TreeId::B => self.root_b,
        }
    }

    /// The other root for a root rank; `None` for everything else.
    pub fn dual_of(&self, rank: Rank) -> Option<Rank> {
        let root_b = self.root_b?;
        if rank == self.root_a {
            Some(root_b)
        } else if rank == root_b {
            Some(self.root_a)
        } else {
            None
        }
    }

    pub fn depth_of(&self, rank: Rank) -> Result<usize> {
        self.node(rank).map(|n| n.depth)
    }

    /// `(lo, rank)`: the contiguous rank range of the subtree rooted at `rank`.
    pub fn subtree_range(&self, rank: Rank) -> Result<(Rank, Rank)> {
        self.node(rank).map(|n| (n.subtree_lo, rank))
    }

    pub fn tree_ranks(&self, tree: TreeId) -> RangeInclusive<Rank> {
        match (tree, self.root_b) {
            (TreeId::A, _) => 0..=self.root_a,
            (TreeId::B, Some(root_b)) => (self.root_a + 1)..=root_b,
            // Empty.
            (TreeId::B, None) => (self.root_a + 1)..=self.root_a,
        }
    }

    /// Largest depth over all ranks.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn tree_height(&self, tree: TreeId) -> Option<usize> {
        self.tree_ranks(tree).map(|r| self.nodes[r].depth).max()
    }

    /// True when `a` and `b` are parent and child, or the two roots.
    pub fn are_linked(&self, a: Rank, b: Rank) -> bool {
        let (Some(na), Some(nb)) = (self.nodes.get(a), self.nodes.get(b)) else {
            return false;
        };
        na.parent == Some(b) || nb.parent == Some(a) || self.dual_of(a) == Some(b)
    }
}

fn build_subtree(
    nodes: &mut [Node],
    lo: Rank,
    hi: Rank,
    parent: Option<Rank>,
    depth: usize,
    tree: TreeId,
) -> Rank {
    let rest = hi - lo;
    let upper = rest.div_ceil(2);
    let lower = rest / 2;
    let child_first =
        (upper > 0).then(|| build_subtree(nodes, hi - upper, hi - 1, Some(hi), depth + 1, tree));
    let child_second =
        (lower > 0).then(|| build_subtree(nodes, lo, lo + lower - 1, Some(hi), depth + 1, tree));
    nodes[hi] = Node {
        tree,
        parent,
        child_first,
        child_second,
        depth,
        subtree_lo: lo,
    };
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks parent links from scratch and checks every structural invariant.
    fn check_invariants(t: &TreeTopology) {
        let p = t.procs();
        let split = p.div_ceil(2);
        for (i, n) in t.nodes().iter().enumerate() {
            let expected_tree = if i < split { TreeId::A } else { TreeId::B };
            assert_eq!(n.tree, expected_tree, "rank {i}");
            if let Some(c1) = n.child_first {
                assert_eq!(c1, i - 1, "first child of {i}");
            }
            if n.child_second.is_some() {
                assert!(n.child_first.is_some());
            }
            let (lo, hi) = t.subtree_range(i).unwrap();
            assert_eq!(hi, i);
            // every rank in [lo, hi] reaches i by parent links, nothing outside does
            for k in 0..p {
                let mut cur = k;
                let mut inside = cur == i;
                while let Some(up) = t.nodes()[cur].parent {
                    cur = up;
                    inside |= cur == i;
                }
                assert_eq!(inside, (lo..=hi).contains(&k), "rank {k} vs subtree of {i}");
            }
            match (n.child_first, n.child_second) {
                (Some(c1), Some(c2)) => {
                    let (lo1, _) = t.subtree_range(c1).unwrap();
                    let (lo2, hi2) = t.subtree_range(c2).unwrap();
                    assert_eq!(lo2, lo);
                    assert_eq!(hi2 + 1, lo1);
                }
                (Some(c1), None) => assert_eq!(t.subtree_range(c1).unwrap().0, lo),
                _ => assert_eq!(lo, i),
            }
            match n.parent {
                Some(par) => assert_eq!(n.depth, t.nodes()[par].depth + 1),
                None => assert_eq!(n.depth, 0),
            }
        }
        for tree in [TreeId::A, TreeId::B] {
            let ranks = t.tree_ranks(tree);
            let size = ranks.clone().count();
            if size == 0 {
                continue;
            }
            let root = t.root_of(tree).unwrap();
            assert_eq!(root, *ranks.end(), "post-order root is the maximum rank");
            let bound = (usize::BITS - size.leading_zeros()) as usize; // ceil(log2(size + 1))
            assert!(t.tree_height(tree).unwrap() < bound.max(1));
        }
        if p >= 2 {
            let (a, b) = (t.root_a(), t.root_b().unwrap());
            assert_eq!(t.dual_of(a), Some(b));
            assert_eq!(t.dual_of(b), Some(a));
        }
        let duals = (0..p).filter(|&i| t.dual_of(i).is_some()).count();
        assert_eq!(duals, if p >= 2 { 2 } else { 0 });
    }

    #[test]
    fn invariants_hold_for_p_up_to_64() {
        for p in 1..=64 {
            let t = TreeTopology::build_dual_trees(p).unwrap();
            check_invariants(&t);
            let a = t.tree_ranks(TreeId::A).count();
            let b = t.tree_ranks(TreeId::B).count();
            assert_eq!(a + b, p);
            assert!(a - b <= 1);
        }
    }

    #[test]
    fn zero_procs_rejected() {
        assert!(matches!(
            TreeTopology::build_dual_trees(0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(TreeTopology::build_single_tree(0).is_err());
    }

    #[test]
    fn two_procs_are_two_roots() {
        let t = TreeTopology::build_dual_trees(2).unwrap();
        assert_eq!((t.root_a(), t.root_b()), (0, Some(1)));
        assert_eq!(t.dual_of(0), Some(1));
        assert_eq!(t.depth_of(0).unwrap(), 0);
        assert_eq!(t.depth_of(1).unwrap(), 0);
    }

    #[test]
    fn one_proc_has_no_dual() {
        let t = TreeTopology::build_dual_trees(1).unwrap();
        assert_eq!(t.root_a(), 0);
        assert_eq!(t.root_b(), None);
        assert_eq!(t.dual_of(0), None);
    }

    #[test]
    fn six_procs_by_hand() {
        let t = TreeTopology::build_dual_trees(6).unwrap();
        let n = |i| *t.node(i).unwrap();
        assert_eq!(t.root_a(), 2);
        assert_eq!(n(2).child_first, Some(1));
        assert_eq!(n(2).child_second, Some(0));
        assert_eq!([n(0).depth, n(1).depth, n(2).depth], [1, 1, 0]);
        assert_eq!(t.root_b(), Some(5));
        assert_eq!(n(5).child_first, Some(4));
        assert_eq!(n(5).child_second, Some(3));
        assert_eq!(t.dual_of(2), Some(5));
        assert_eq!(t.subtree_range(2).unwrap(), (0, 2));
        assert_eq!(t.subtree_range(5).unwrap(), (3, 5));
        assert_eq!(t.subtree_range(4).unwrap(), (4, 4));
        assert_eq!(t.depth_of(1).unwrap(), 1);
    }

    #[test]
    fn fourteen_procs_deepest_leaf() {
        let t = TreeTopology::build_dual_trees(14).unwrap();
        assert_eq!(t.height(), 2);
        assert_eq!(t.depth_of(0).unwrap(), 2);
    }

    #[test]
    fn perfect_when_p_is_two_pow_h_minus_two() {
        for h in 2..=7u32 {
            let p = (1usize << h) - 2;
            let t = TreeTopology::build_dual_trees(p).unwrap();
            for tree in [TreeId::A, TreeId::B] {
                let ranks = t.tree_ranks(tree);
                assert_eq!(ranks.clone().count(), (1 << (h - 1)) - 1);
                // h - 1 levels
                assert_eq!(t.tree_height(tree), Some(h as usize - 2));
                let leaves = ranks.clone().filter(|&r| t.nodes()[r].is_leaf()).count();
                assert_eq!(leaves, 1 << (h - 2));
                assert!(ranks
                    .filter(|&r| t.nodes()[r].is_leaf())
                    .all(|r| t.nodes()[r].depth == h as usize - 2));
            }
        }
    }

    #[test]
    fn out_of_range_rank() {
        let t = TreeTopology::build_dual_trees(6).unwrap();
        assert_eq!(
            t.subtree_range(6),
            Err(Error::RankOutOfRange { rank: 6, procs: 6 })
        );
        assert!(t.depth_of(99).is_err());
    }

    #[test]
    fn single_tree_covers_all_ranks() {
        for p in 1..=40 {
            let t = TreeTopology::build_single_tree(p).unwrap();
            assert_eq!(t.root_a(), p - 1);
            assert_eq!(t.subtree_range(p - 1).unwrap(), (0, p - 1));
            assert!(t.nodes().iter().all(|n| n.tree == TreeId::A));
            for (i, n) in t.nodes().iter().enumerate() {
                if let Some(c1) = n.child_first {
                    assert_eq!(c1, i - 1);
                }
            }
        }
        let t = TreeTopology::build_single_tree(7).unwrap();
        assert_eq!(t.height(), 2);
    }

    #[test]
    fn linked_pairs() {
        let t = TreeTopology::build_dual_trees(6).unwrap();
        assert!(t.are_linked(1, 2));
        assert!(t.are_linked(2, 5));
        assert!(!t.are_linked(1, 0));
        assert!(!t.are_linked(1, 5));
        assert!(!t.are_linked(1, 17));
    }
}
