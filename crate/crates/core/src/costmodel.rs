//! Closed-form alpha-beta(-gamma) predictions and block-count optimisation.
//!
//! `h` is the tree parameter of the perfect case `p = 2^h - 2` (dual trees)
//! or `p = 2^h - 1` (single tree). Doubly pipelined time with `b` blocks is
//! `(4h - 3 + 3(b - 1))(α + βm/b)`; reduce-then-broadcast takes
//! `2(2h + 2(b - 1))(α + βm/b)`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostParams {
    /// Start-up latency per communication step.
    pub alpha: f64,
    /// Transfer time per element.
    pub beta: f64,
    /// Time per element-wise `⊙`.
    pub gamma: f64,
}

impl CostParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(alpha) && ok(beta) && ok(gamma)) {
            return Err(Error::InvalidArgument(
                "cost parameters must be finite and non-negative",
            ));
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Unit cost per step, nothing per element.
    pub fn steps_only() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    /// `α + β·n`: one bidirectional step moving `n` elements each way.
    pub fn slot_cost(&self, elements: f64) -> f64 {
        self.alpha + self.beta * elements
    }
}

/// Tree parameter derived from a process count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeParam {
    pub h: u32,
    /// False when the count is not of the perfect form and `h` was rounded
    /// up; predictions made with it are upper bounds.
    pub exact: bool,
}

impl TreeParam {
    pub fn label(&self) -> &'static str {
        if self.exact {
            "exact"
        } else {
            "upper-bound"
        }
    }
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

/// `h` with `p = 2^h - 2` (dual trees); `p = 1` maps to the rounded `h = 2`.
pub fn dual_tree_param(procs: usize) -> Result<TreeParam> {
    if procs == 0 {
        return Err(Error::InvalidArgument("process count must be at least 1"));
    }
    let n = procs + 2;
    Ok(TreeParam {
        h: ceil_log2(n),
        exact: n.is_power_of_two(),
    })
}

/// `h` with `p = 2^h - 1` (single tree).
pub fn single_tree_param(procs: usize) -> Result<TreeParam> {
    if procs == 0 {
        return Err(Error::InvalidArgument("process count must be at least 1"));
    }
    let n = procs + 1;
    Ok(TreeParam {
        h: ceil_log2(n).max(1),
        exact: n.is_power_of_two(),
    })
}

/// Steps until the first result block reaches the last leaf: `4h - 3`.
pub fn doubly_latency_steps(h: u32) -> u64 {
    4 * h as u64 - 3
}

/// `4h - 3 + 3(b - 1)`.
pub fn doubly_steps(h: u32, blocks: u64) -> u64 {
    doubly_latency_steps(h) + 3 * (blocks - 1)
}

/// `2(2h + 2(b - 1))`.
pub fn reduce_bcast_steps(h: u32, blocks: u64) -> u64 {
    2 * (2 * h as u64 + 2 * (blocks - 1))
}

/// First-block latency with one doubly pipelined tree over `p = 2^h - 1`
/// ranks: `4h`.
pub fn single_tree_doubly_latency_steps(h: u32) -> u64 {
    4 * h as u64
}

fn check(h: u32, blocks: u64, elements: u64) -> Result<()> {
    if h < 1 {
        return Err(Error::InvalidArgument("h must be at least 1"));
    }
    if blocks < 1 {
        return Err(Error::InvalidArgument("block count must be at least 1"));
    }
    if elements > 0 && blocks > elements {
        return Err(Error::InvalidArgument("more blocks than elements"));
    }
    Ok(())
}

/// `(4h - 3 + 3(b - 1))(α + βm/b)`.
pub fn predict_doubly(h: u32, blocks: u64, elements: u64, c: &CostParams) -> Result<f64> {
    check(h, blocks, elements)?;
    Ok(doubly_continuous(h, blocks as f64, elements as f64, c))
}

/// The doubly pipelined prediction for real-valued `b`.
pub fn doubly_continuous(h: u32, blocks: f64, elements: f64, c: &CostParams) -> f64 {
    (4.0 * h as f64 - 3.0 + 3.0 * (blocks - 1.0)) * (c.alpha + c.beta * elements / blocks)
}

/// `2(2h + 2(b - 1))(α + βm/b)`.
pub fn predict_reduce_bcast(h: u32, blocks: u64, elements: u64, c: &CostParams) -> Result<f64> {
    check(h, blocks, elements)?;
    Ok(reduce_bcast_continuous(
        h,
        blocks as f64,
        elements as f64,
        c,
    ))
}

pub fn reduce_bcast_continuous(h: u32, blocks: f64, elements: f64, c: &CostParams) -> f64 {
    2.0 * (2.0 * h as f64 + 2.0 * (blocks - 1.0)) * (c.alpha + c.beta * elements / blocks)
}

/// Best doubly pipelined time over real `b`:
/// `(4h - 6)α + 2√(3(4h - 6)αβm) + 3βm`.
pub fn doubly_closed_form(h: u32, elements: u64, c: &CostParams) -> f64 {
    let lat = 4.0 * h as f64 - 6.0;
    let m = elements as f64;
    lat * c.alpha + 2.0 * libm::sqrt(3.0 * lat * c.alpha * c.beta * m) + 3.0 * c.beta * m
}

/// Best reduce-then-broadcast time over real `b`:
/// `(4h - 4)α + 2√(4(4h - 4)αβm) + 4βm`.
pub fn reduce_bcast_closed_form(h: u32, elements: u64, c: &CostParams) -> f64 {
    let lat = 4.0 * h as f64 - 4.0;
    let m = elements as f64;
    lat * c.alpha + 2.0 * libm::sqrt(4.0 * lat * c.alpha * c.beta * m) + 4.0 * c.beta * m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneracy {
    /// `α = 0`: more blocks never hurt, `b* = m`.
    NoLatency,
    /// `β = 0`: blocks only add latency, `b* = 1`.
    NoBandwidth,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalBlocks {
    /// Integer block count in `[1, m]` minimising the prediction.
    pub blocks: u64,
    /// Prediction at `blocks`.
    pub time: f64,
    /// Real-valued minimiser (unclamped; infinite when `α = 0`).
    pub continuous_blocks: f64,
    /// Minimum over real `b`, from the closed form.
    pub closed_form: f64,
    pub degenerate: Option<Degeneracy>,
}

/// Shape shared by both predictions: `(L + k(b - 1))(α + βm/b)`, with
/// `L = latency_steps` and `k = steps_per_block`.
fn optimise(
    latency_steps: f64,
    steps_per_block: f64,
    elements: u64,
    c: &CostParams,
    eval: impl Fn(u64) -> f64,
    closed_form: f64,
) -> OptimalBlocks {
    let m = elements as f64;
    // Expanding gives (L - k)α + kβm + kbα + (L - k)βm/b.
    let fixed = latency_steps - steps_per_block;
    let (continuous, degenerate) = if c.beta == 0.0 {
        (1.0, Some(Degeneracy::NoBandwidth))
    } else if c.alpha == 0.0 {
        (f64::INFINITY, Some(Degeneracy::NoLatency))
    } else {
        (
            libm::sqrt(fixed * c.beta * m / (steps_per_block * c.alpha)),
            None,
        )
    };
    let clamp = |b: f64| (b.max(1.0).min(m)) as u64;
    let lo = clamp(libm::floor(continuous));
    let hi = clamp(libm::ceil(continuous));
    let (t_lo, t_hi) = (eval(lo), eval(hi));
    let (blocks, time) = if t_hi < t_lo { (hi, t_hi) } else { (lo, t_lo) };
    OptimalBlocks {
        blocks,
        time,
        continuous_blocks: continuous,
        closed_form,
        degenerate,
    }
}

fn check_opt(h: u32, elements: u64) -> Result<()> {
    if h < 2 {
        return Err(Error::InvalidArgument("block optimisation needs h >= 2"));
    }
    if elements < 1 {
        return Err(Error::InvalidArgument("block optimisation needs m >= 1"));
    }
    Ok(())
}

/// Integer block count minimising [`predict_doubly`]; the prediction is
/// convex in `b`, so the better neighbour of the real minimiser
/// `√((4h - 6)βm / 3α)` is the integer optimum. Ties go to fewer blocks.
pub fn optimal_blocks(h: u32, elements: u64, c: &CostParams) -> Result<OptimalBlocks> {
    check_opt(h, elements)?;
    let lat = doubly_latency_steps(h) as f64;
    Ok(optimise(
        lat,
        3.0,
        elements,
        c,
        |b| doubly_continuous(h, b as f64, elements as f64, c),
        doubly_closed_form(h, elements, c),
    ))
}

/// Integer block count minimising [`predict_reduce_bcast`].
pub fn optimal_blocks_reduce_bcast(h: u32, elements: u64, c: &CostParams) -> Result<OptimalBlocks> {
    check_opt(h, elements)?;
    Ok(optimise(
        4.0 * h as f64,
        4.0,
        elements,
        c,
        |b| reduce_bcast_continuous(h, b as f64, elements as f64, c),
        reduce_bcast_closed_form(h, elements, c),
    ))
}

/// Extra reduction time per round: `3γm/b` (two child reductions plus the
/// roots' dual reduction).
pub fn reduction_overhead_per_round(gamma: f64, elements: u64, blocks: u64) -> Result<f64> {
    if blocks < 1 {
        return Err(Error::InvalidArgument("block count must be at least 1"));
    }
    Ok(3.0 * gamma * elements as f64 / blocks as f64)
}

/// Optimal reduce-then-broadcast time over optimal doubly pipelined time;
/// tends to 4/3 as `m` grows.
pub fn beta_term_ratio(h: u32, elements: u64, c: &CostParams) -> Result<f64> {
    let doubly = optimal_blocks(h, elements, c)?;
    let rb = optimal_blocks_reduce_bcast(h, elements, c)?;
    Ok(rb.time / doubly.time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn params(alpha: f64, beta: f64) -> CostParams {
        CostParams::new(alpha, beta, 0.0).unwrap()
    }

    /// Independent oracle: scan every b in [1, m], keep the first minimum.
    fn brute_argmin(m: u64, f: impl Fn(u64) -> f64) -> (u64, f64) {
        (1..=m).map(|b| (b, f(b))).fold(
            (0, f64::INFINITY),
            |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            },
        )
    }

    #[test]
    fn doubly_examples() {
        assert_eq!(predict_doubly(3, 1, 100, &params(1.0, 0.0)).unwrap(), 9.0);
        assert_eq!(predict_doubly(1, 1, 1, &params(1.0, 1.0)).unwrap(), 2.0);
        for m in [1, 10, 1000] {
            assert_eq!(
                predict_doubly(4, 5, m.max(5), &params(2.0, 0.0)).unwrap(),
                (13.0 + 12.0) * 2.0
            );
        }
    }

    #[test]
    fn reduce_bcast_examples() {
        assert_eq!(
            predict_reduce_bcast(3, 1, 7, &params(1.0, 0.0)).unwrap(),
            12.0
        );
        assert_eq!(
            predict_reduce_bcast(1, 2, 2, &params(0.0, 1.0)).unwrap(),
            8.0
        );
        assert_eq!(
            predict_reduce_bcast(2, 1, 9, &params(1.0, 1.0)).unwrap(),
            2.0 * 4.0 * 10.0
        );
    }

    #[test]
    fn invalid_predictions() {
        assert!(predict_doubly(3, 5, 4, &params(1.0, 1.0)).is_err());
        assert!(predict_doubly(0, 1, 4, &params(1.0, 1.0)).is_err());
        assert!(predict_doubly(2, 0, 4, &params(1.0, 1.0)).is_err());
        // m = 0 allows any b
        assert!(predict_doubly(2, 7, 0, &params(1.0, 1.0)).is_ok());
        assert!(CostParams::new(-1.0, 0.0, 0.0).is_err());
        assert!(CostParams::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn optimum_h3_m300() {
        let c = params(1.0, 1.0);
        let opt = optimal_blocks(3, 300, &c).unwrap();
        assert!((opt.continuous_blocks - 600f64.sqrt()).abs() < 1e-12);
        let (b, t) = brute_argmin(300, |b| predict_doubly(3, b, 300, &c).unwrap());
        assert_eq!(opt.blocks, b);
        assert!(b == 24 || b == 25);
        assert_eq!(opt.time, t);
        let closed = 6.0 + 2.0 * 5400f64.sqrt() + 900.0;
        assert!((opt.closed_form - closed).abs() < 1e-9);
        assert!((closed - 1052.97).abs() < 0.01);
        assert!(t >= closed && (t - closed) / closed < 0.01);
    }

    #[test]
    fn single_element_takes_one_block() {
        let opt = optimal_blocks(4, 1, &params(1.0, 1.0)).unwrap();
        assert_eq!(opt.blocks, 1);
        assert!(optimal_blocks(1, 10, &params(1.0, 1.0)).is_err());
        assert!(optimal_blocks(3, 0, &params(1.0, 1.0)).is_err());
    }

    #[test]
    fn degenerate_parameters() {
        let opt = optimal_blocks(3, 50, &params(0.0, 1.0)).unwrap();
        assert_eq!(
            (opt.blocks, opt.degenerate),
            (50, Some(Degeneracy::NoLatency))
        );
        let opt = optimal_blocks(3, 50, &params(1.0, 0.0)).unwrap();
        assert_eq!(
            (opt.blocks, opt.degenerate),
            (1, Some(Degeneracy::NoBandwidth))
        );
    }

    #[test]
    fn integer_optimum_matches_brute_force_on_grid() {
        for h in 2..=6 {
            for m in [10u64, 100, 1000] {
                for (a, b) in [(0.1, 10.0), (1.0, 1.0), (10.0, 0.1)] {
                    let c = params(a, b);
                    let opt = optimal_blocks(h, m, &c).unwrap();
                    let (bb, _) = brute_argmin(m, |x| predict_doubly(h, x, m, &c).unwrap());
                    assert_eq!(opt.blocks, bb, "h={h} m={m} a={a} b={b}");
                    let opt = optimal_blocks_reduce_bcast(h, m, &c).unwrap();
                    let (bb, _) = brute_argmin(m, |x| predict_reduce_bcast(h, x, m, &c).unwrap());
                    assert_eq!(opt.blocks, bb, "rb h={h} m={m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn closed_form_is_the_continuous_minimum() {
        for h in 2..=6 {
            for m in [10u64, 1000, 1_000_000] {
                let c = params(0.7, 0.3);
                let opt = optimal_blocks(h, m, &c).unwrap();
                let at = doubly_continuous(h, opt.continuous_blocks, m as f64, &c);
                assert!(((at - opt.closed_form) / at).abs() < 1e-12);
                // general-b expansion
                let bx = 3.7;
                let lat = 4.0 * h as f64 - 6.0;
                let mf = m as f64;
                let expanded =
                    lat * c.alpha + 3.0 * c.beta * mf + 3.0 * bx * c.alpha + lat * c.beta * mf / bx;
                let direct = doubly_continuous(h, bx, mf, &c);
                assert!(((expanded - direct) / direct).abs() < 1e-12);
                let rb = optimal_blocks_reduce_bcast(h, m, &c).unwrap();
                let at = reduce_bcast_continuous(h, rb.continuous_blocks, mf, &c);
                assert!(((at - rb.closed_form) / at).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overhead() {
        assert_eq!(reduction_overhead_per_round(1.0, 9, 3).unwrap(), 9.0);
        assert_eq!(reduction_overhead_per_round(0.0, 9, 3).unwrap(), 0.0);
        assert_eq!(reduction_overhead_per_round(2.0, 9, 9).unwrap(), 6.0);
        assert!(reduction_overhead_per_round(1.0, 9, 0).is_err());
    }

    #[test]
    fn ratio_tends_to_four_thirds() {
        let r = beta_term_ratio(3, 1_000_000_000, &params(1.0, 1.0)).unwrap();
        assert!((r - 4.0 / 3.0).abs() / (4.0 / 3.0) < 0.01);
        // latency dominated: ratio of the b = 1 latency terms 4h / (4h - 3)
        let r = beta_term_ratio(3, 1, &params(1e9, 1.0)).unwrap();
        assert!((r - 12.0 / 9.0).abs() < 1e-6);
        let r = beta_term_ratio(6, 1, &params(1e9, 1.0)).unwrap();
        assert!((r - 24.0 / 21.0).abs() < 1e-6);
    }

    #[test]
    fn doubly_never_slower_at_own_optimum() {
        let ms: Vec<u64> = (0..7).map(|k| 10u64.pow(k)).collect();
        for h in 2..=8 {
            for &m in &ms {
                for (a, b) in [(0.1, 1.0), (1.0, 1.0), (10.0, 0.01), (1.0, 10.0)] {
                    assert!(beta_term_ratio(h, m, &params(a, b)).unwrap() >= 1.0);
                }
            }
        }
    }

    #[test]
    fn tree_params() {
        assert_eq!(dual_tree_param(6).unwrap(), TreeParam { h: 3, exact: true });
        assert_eq!(dual_tree_param(2).unwrap(), TreeParam { h: 2, exact: true });
        assert_eq!(
            dual_tree_param(7).unwrap(),
            TreeParam { h: 4, exact: false }
        );
        assert_eq!(dual_tree_param(1).unwrap().label(), "upper-bound");
        assert_eq!(
            single_tree_param(7).unwrap(),
            TreeParam { h: 3, exact: true }
        );
        assert_eq!(
            single_tree_param(1).unwrap(),
            TreeParam { h: 1, exact: true }
        );
        assert!(dual_tree_param(0).is_err());
        assert_eq!(doubly_steps(3, 5), 21);
        assert_eq!(reduce_bcast_steps(2, 1), 8);
        assert_eq!(single_tree_doubly_latency_steps(3), 12);
    }
}
