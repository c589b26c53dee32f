//! Operator selection by name and deterministic input generation.

use std::fmt;
use std::str::FromStr;

use allreduce_core::reducer::{Affine, AffineMap, Mat2, Matrix2, Max, Reducer, WrappingSum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Sum,
    Max,
    Affine,
    Mat2,
}

impl OpKind {
    pub const ALL: [OpKind; 4] = [OpKind::Sum, OpKind::Max, OpKind::Affine, OpKind::Mat2];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Sum => "sum",
            OpKind::Max => "max",
            OpKind::Affine => "affine",
            OpKind::Mat2 => "mat2",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                SimError::Config(format!(
                    "unknown operator `{s}` (expected sum|max|affine|mat2)"
                ))
            })
    }
}

/// An operator with exact arithmetic and a way to draw random elements.
pub trait ExactOp: Reducer {
    fn random_elem(rng: &mut ChaCha8Rng) -> Self::Elem;

    /// Some element different from `e`, used to corrupt payloads.
    fn perturb(e: Self::Elem) -> Self::Elem;
}

impl ExactOp for WrappingSum {
    fn random_elem(rng: &mut ChaCha8Rng) -> i64 {
        // small values keep CSV dumps readable; wrapping makes range irrelevant
        rng.random_range(-1000..1000)
    }
    fn perturb(e: i64) -> i64 {
        e.wrapping_add(1)
    }
}

impl ExactOp for Max {
    fn random_elem(rng: &mut ChaCha8Rng) -> i64 {
        rng.random_range(-1000..1000)
    }
    fn perturb(_: i64) -> i64 {
        // exceeds every generated value, so the corruption survives max
        i64::MAX
    }
}

impl ExactOp for Affine {
    fn random_elem(rng: &mut ChaCha8Rng) -> AffineMap {
        AffineMap {
            mul: rng.random(),
            add: rng.random(),
        }
    }
    fn perturb(e: AffineMap) -> AffineMap {
        AffineMap {
            add: e.add.wrapping_add(1),
            ..e
        }
    }
}

impl ExactOp for Mat2 {
    fn random_elem(rng: &mut ChaCha8Rng) -> Matrix2 {
        rng.random()
    }
    fn perturb(mut e: Matrix2) -> Matrix2 {
        e[0] = e[0].wrapping_add(1);
        e
    }
}

/// `procs` input vectors of `elements` each, a pure function of the seed.
pub fn random_inputs<R: ExactOp>(procs: usize, elements: usize, seed: u64) -> Vec<Vec<R::Elem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..procs)
        .map(|_| (0..elements).map(|_| R::random_elem(&mut rng)).collect())
        .collect()
}

/// Calls `$body` with `$op` bound to the operator instance named by `$kind`.
#[macro_export]
macro_rules! with_op {
    ($kind:expr, $op:ident => $body:expr) => {
        match $kind {
            $crate::ops::OpKind::Sum => {
                let $op = $crate::core::reducer::WrappingSum;
                $body
            }
            $crate::ops::OpKind::Max => {
                let $op = $crate::core::reducer::Max;
                $body
            }
            $crate::ops::OpKind::Affine => {
                let $op = $crate::core::reducer::Affine;
                $body
            }
            $crate::ops::OpKind::Mat2 => {
                let $op = $crate::core::reducer::Mat2;
                $body
            }
        }
    };
}
