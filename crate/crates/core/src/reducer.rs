//! Associative, not necessarily commutative, element-wise operators.

use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{Error, Result};

pub trait Reducer {
    type Elem: Copy + PartialEq + Debug;

    /// `left ⊙ right`; must be associative.
    fn combine(&self, left: Self::Elem, right: Self::Elem) -> Self::Elem;

    /// Metadata only; the protocols never rely on it.
    fn is_commutative(&self) -> bool;

    fn name(&self) -> &'static str;
}

/// Which side the received block goes on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `y := t ⊙ y`
    Left,
    /// `y := y ⊙ t`
    Right,
}

/// Combines `t` into `y` element-wise and returns the number of `⊙`
/// applications performed.
pub fn reduce_block_into<R: Reducer>(
    op: &R,
    t: &[R::Elem],
    y: &mut [R::Elem],
    orientation: Orientation,
) -> Result<usize> {
    if t.len() != y.len() {
        return Err(Error::BlockLengthMismatch {
            incoming: t.len(),
            local: y.len(),
        });
    }
    match orientation {
        Orientation::Left => {
            for (dst, &src) in y.iter_mut().zip(t) {
                *dst = op.combine(src, *dst);
            }
        }
        Orientation::Right => {
            for (dst, &src) in y.iter_mut().zip(t) {
                *dst = op.combine(*dst, src);
            }
        }
    }
    Ok(t.len())
}

/// Ground truth: `x_0 ⊙ x_1 ⊙ … ⊙ x_{p-1}`, folded strictly left to right.
pub fn sequential_fold_oracle<R: Reducer>(op: &R, inputs: &[Vec<R::Elem>]) -> Result<Vec<R::Elem>> {
    let (first, rest) = inputs
        .split_first()
        .ok_or(Error::InconsistentWorld("no inputs"))?;
    if rest.iter().any(|x| x.len() != first.len()) {
        return Err(Error::InconsistentWorld("input vectors differ in length"));
    }
    let mut acc = first.clone();
    for x in rest {
        for (a, &b) in acc.iter_mut().zip(x) {
            *a = op.combine(*a, b);
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WrappingSum;

impl Reducer for WrappingSum {
    type Elem = i64;
    fn combine(&self, left: i64, right: i64) -> i64 {
        left.wrapping_add(right)
    }
    fn is_commutative(&self) -> bool {
        true
    }
    fn name(&self) -> &'static str {
        "sum"
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Max;

impl Reducer for Max {
    type Elem = i64;
    fn combine(&self, left: i64, right: i64) -> i64 {
        left.max(right)
    }
    fn is_commutative(&self) -> bool {
        true
    }
    fn name(&self) -> &'static str {
        "max"
    }
}

/// Floating-point sum. Not associative under rounding, so only usable for
/// cost experiments, never for exact comparisons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FloatSum;

impl Reducer for FloatSum {
    type Elem = f64;
    fn combine(&self, left: f64, right: f64) -> f64 {
        left + right
    }
    fn is_commutative(&self) -> bool {
        true
    }
    fn name(&self) -> &'static str {
        "fsum"
    }
}

/// The map `x ↦ mul·x + add` over `u32` with wrapping arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub mul: u32,
    pub add: u32,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { mul: 1, add: 0 };

    pub fn apply(self, x: u32) -> u32 {
        self.mul.wrapping_mul(x).wrapping_add(self.add)
    }
}

/// Composition of affine maps mod 2^32: `f ⊙ g` applies `f` first, then `g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Affine;

impl Reducer for Affine {
    type Elem = AffineMap;
    fn combine(&self, f: AffineMap, g: AffineMap) -> AffineMap {
        AffineMap {
            mul: g.mul.wrapping_mul(f.mul),
            add: g.mul.wrapping_mul(f.add).wrapping_add(g.add),
        }
    }
    fn is_commutative(&self) -> bool {
        false
    }
    fn name(&self) -> &'static str {
        "affine"
    }
}

/// Row-major 2×2 matrix over `u32` with wrapping arithmetic.
pub type Matrix2 = [u32; 4];

/// Matrix product over the wrapping ring `Z / 2^32`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Mat2;

impl Reducer for Mat2 {
    type Elem = Matrix2;
    fn combine(&self, a: Matrix2, b: Matrix2) -> Matrix2 {
        let dot =
            |x: u32, y: u32, z: u32, w: u32| x.wrapping_mul(y).wrapping_add(z.wrapping_mul(w));
        [
            dot(a[0], b[0], a[1], b[2]),
            dot(a[0], b[1], a[1], b[3]),
            dot(a[2], b[0], a[3], b[2]),
            dot(a[2], b[1], a[3], b[3]),
        ]
    }
    fn is_commutative(&self) -> bool {
        false
    }
    fn name(&self) -> &'static str {
        "mat2"
    }
}

/// A contiguous rank interval `[lo, hi]`, or `Invalid` once two
/// non-adjacent intervals have been combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Span {
    Range { lo: u32, hi: u32 },
    Invalid,
}

impl Span {
    pub fn single(rank: usize) -> Self {
        Span::Range {
            lo: rank as u32,
            hi: rank as u32,
        }
    }
}

/// Interval concatenation. Tagging each rank's input with its own rank turns
/// every value in flight into a statement about which ranks it covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RangeTag;

impl Reducer for RangeTag {
    type Elem = Span;
    fn combine(&self, left: Span, right: Span) -> Span {
        match (left, right) {
            (Span::Range { lo, hi }, Span::Range { lo: lo2, hi: hi2 })
                if hi.wrapping_add(1) == lo2 =>
            {
                Span::Range { lo, hi: hi2 }
            }
            _ => Span::Invalid,
        }
    }
    fn is_commutative(&self) -> bool {
        false
    }
    fn name(&self) -> &'static str {
        "rangetag"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat_naive(a: Matrix2, b: Matrix2) -> Matrix2 {
        // independent: 64-bit products reduced mod 2^32 at the end
        let a: [u64; 4] = a.map(u64::from);
        let b: [u64; 4] = b.map(u64::from);
        let mut c = [0u64; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    c[2 * i + j] =
                        c[2 * i + j].wrapping_add(a[2 * i + k].wrapping_mul(b[2 * k + j]));
                }
            }
        }
        c.map(|v| v as u32)
    }

    #[test]
    fn sum_left() {
        let mut y = [10, 20];
        assert_eq!(
            reduce_block_into(&WrappingSum, &[1, 2], &mut y, Orientation::Left).unwrap(),
            2
        );
        assert_eq!(y, [11, 22]);
    }

    #[test]
    fn mat2_orientation_matters() {
        let m1: Matrix2 = [1, 2, 3, 4];
        let m2: Matrix2 = [0, 1, 1, 0];
        // hand computed: M1·M2 = [2,1,4,3], M2·M1 = [3,4,1,2]
        let mut y = [m2];
        reduce_block_into(&Mat2, &[m1], &mut y, Orientation::Left).unwrap();
        assert_eq!(y[0], [2, 1, 4, 3]);
        let mut y = [m2];
        reduce_block_into(&Mat2, &[m1], &mut y, Orientation::Right).unwrap();
        assert_eq!(y[0], [3, 4, 1, 2]);
    }

    #[test]
    fn empty_blocks_are_noop() {
        let mut y: [i64; 0] = [];
        assert_eq!(
            reduce_block_into(&WrappingSum, &[], &mut y, Orientation::Left).unwrap(),
            0
        );
    }

    #[test]
    fn mismatched_lengths() {
        let mut y = [1i64, 2];
        assert_eq!(
            reduce_block_into(&WrappingSum, &[1], &mut y, Orientation::Right),
            Err(Error::BlockLengthMismatch {
                incoming: 1,
                local: 2
            })
        );
    }

    #[test]
    fn oracle_sum() {
        let inputs: Vec<Vec<i64>> = (0..3).map(|i| vec![i]).collect();
        assert_eq!(sequential_fold_oracle(&WrappingSum, &inputs).unwrap(), [3]);
        assert_eq!(
            sequential_fold_oracle(&WrappingSum, &[vec![7, 8]]).unwrap(),
            [7, 8]
        );
        assert!(sequential_fold_oracle::<WrappingSum>(&WrappingSum, &[]).is_err());
        assert!(sequential_fold_oracle(&WrappingSum, &[vec![1], vec![1, 2]]).is_err());
    }

    #[test]
    fn oracle_affine_matches_sequential_application() {
        let maps = [
            AffineMap { mul: 3, add: 7 },
            AffineMap {
                mul: 0xdead_beef,
                add: 1,
            },
            AffineMap {
                mul: 5,
                add: u32::MAX,
            },
            AffineMap { mul: 2, add: 11 },
        ];
        let inputs: Vec<Vec<AffineMap>> = maps.iter().map(|&f| vec![f]).collect();
        let folded = sequential_fold_oracle(&Affine, &inputs).unwrap()[0];
        for probe in [0u32, 1, 12345, u32::MAX] {
            let mut x = probe;
            for f in maps {
                x = f.mul.wrapping_mul(x).wrapping_add(f.add);
            }
            assert_eq!(folded.apply(probe), x);
        }
    }

    #[test]
    fn mat2_matches_naive_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let a: Matrix2 = rng.random();
            let b: Matrix2 = rng.random();
            assert_eq!(Mat2.combine(a, b), mat_naive(a, b));
        }
    }

    fn assoc<R: Reducer>(op: &R, gen: impl Fn(&mut ChaCha8Rng) -> R::Elem) {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let (a, b, c) = (gen(&mut rng), gen(&mut rng), gen(&mut rng));
            assert_eq!(
                op.combine(op.combine(a, b), c),
                op.combine(a, op.combine(b, c)),
                "{}",
                op.name()
            );
        }
    }

    #[test]
    fn associativity_on_random_triples() {
        assoc(&WrappingSum, |r| r.random());
        assoc(&Max, |r| r.random());
        assoc(&Affine, |r| AffineMap {
            mul: r.random(),
            add: r.random(),
        });
        assoc(&Mat2, |r| r.random());
        assoc(&RangeTag, |r| {
            if r.random_bool(0.1) {
                Span::Invalid
            } else {
                let lo = r.random_range(0..6);
                Span::Range {
                    lo,
                    hi: lo + r.random_range(0..2),
                }
            }
        });
    }

    #[test]
    fn permutation_sensitivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sums: Vec<Vec<i64>> = (0..5).map(|_| vec![rng.random(), rng.random()]).collect();
        let mats: Vec<Vec<Matrix2>> = (0..5).map(|_| vec![rng.random()]).collect();
        let mut rev_sums = sums.clone();
        rev_sums.reverse();
        assert_eq!(
            sequential_fold_oracle(&WrappingSum, &sums).unwrap(),
            sequential_fold_oracle(&WrappingSum, &rev_sums).unwrap()
        );
        let mut rev_mats = mats.clone();
        rev_mats.reverse();
        assert_ne!(
            sequential_fold_oracle(&Mat2, &mats).unwrap(),
            sequential_fold_oracle(&Mat2, &rev_mats).unwrap()
        );
    }

    #[test]
    fn range_tag_concatenates_adjacent_only() {
        assert_eq!(
            RangeTag.combine(Span::single(2), Span::single(3)),
            Span::Range { lo: 2, hi: 3 }
        );
        assert_eq!(
            RangeTag.combine(Span::single(3), Span::single(2)),
            Span::Invalid
        );
        assert_eq!(
            RangeTag.combine(Span::single(1), Span::single(3)),
            Span::Invalid
        );
    }
}
