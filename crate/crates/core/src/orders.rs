//! Grid verifiers for the usual, convex and Laplace-transform orders.
//!
//! `X ⪯st Y` iff `F_X ≥ F_Y` everywhere; `X ⪯Lt Y` iff
//! `E[e^{−ρY}] ≤ E[e^{−ρX}]` for all `ρ > 0`. For the convex order only the
//! classical sufficient sign-change conditions are checked, so a convex
//! verdict is never `Fails` unless the means differ.

use std::fmt;

use rayon::prelude::*;

use crate::channels::{ChannelModel, Moment};
use crate::error::{Error, Result};

/// Per-point slack below which a comparison counts as violated.
pub const ORDER_TOL: f64 = 1e-9;

/// Allowed mean mismatch for the convex order.
pub const MEAN_TOL: f64 = 1e-4;

/// Values with `|f| < ZERO_REL · max|f|` are treated as zero in sign counts.
pub const ZERO_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Usual,
    Convex,
    Laplace,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Usual => "st",
            Order::Convex => "cx",
            Order::Laplace => "Lt",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

/// Evidence attached to a failed comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// Grid point where `lhs ≥ rhs − tol` is violated.
    Point { at: f64, lhs: f64, rhs: f64 },
    /// The means differ, which rules out the convex order.
    Means { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub order: Order,
    pub outcome: Outcome,
    pub counterexample: Option<Witness>,
    /// Smallest slack over the grid.
    pub margin: f64,
}

impl OrderVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    pub changes: usize,
    pub sequence: Vec<Sign>,
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// 200 points on `[1e-4, 1e3]`.
pub fn default_x_grid() -> Vec<f64> {
    log_grid(1e-4, 1e3, 200)
}

/// 100 points on `[1e-3, 1e3]`.
pub fn default_rho_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 100)
}

fn check_grid(grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least {min_len} points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("grid points must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Sign alternations of precomputed values.
pub fn sign_pattern(values: &[f64]) -> SignPattern {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sequence: Vec<Sign> = Vec::new();
    if max > 0.0 {
        for &v in values {
            if v.abs() < ZERO_REL * max {
                continue;
            }
            let s = if v > 0.0 { Sign::Plus } else { Sign::Minus };
            if sequence.last() != Some(&s) {
                sequence.push(s);
            }
        }
    }
    SignPattern {
        changes: sequence.len().saturating_sub(1),
        sequence,
    }
}

/// Number of sign changes of `f` along an ascending grid.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Result<SignPattern> {
    if grid.len() < 3 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("need an ascending grid of at least 3 points".into()));
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("function is not finite on the grid".into()));
    }
    Ok(sign_pattern(&values))
}

/// Evaluate `lhs(t) − rhs(t)` on the grid and summarize as a verdict.
fn dominance<L, R>(order: Order, grid: &[f64], lhs: L, rhs: R) -> Result<OrderVerdict>
where
    L: Fn(f64) -> Result<f64> + Sync,
    R: Fn(f64) -> Result<f64> + Sync,
{
    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&t| Ok((t, lhs(t)?, rhs(t)?)))
        .collect::<Result<Vec<_>>>()?;
    let (at, l, r) = rows
        .iter()
        .copied()
        .min_by(|a, b| (a.1 - a.2).total_cmp(&(b.1 - b.2)))
        .expect("nonempty grid");
    let margin = l - r;
    if margin >= -ORDER_TOL {
        Ok(OrderVerdict {
            order,
            outcome: Outcome::Holds,
            counterexample: None,
            margin,
        })
    } else {
        Ok(OrderVerdict {
            order,
            outcome: Outcome::Fails,
            counterexample: Some(Witness::Point { at, lhs: l, rhs: r }),
            margin,
        })
    }
}

/// `X ⪯st Y`: `F_X(x) ≥ F_Y(x)` at every grid point.
pub fn check_usual(x: &ChannelModel, y: &ChannelModel, grid: &[f64]) -> Result<OrderVerdict> {
    check_grid(grid, 1)?;
    dominance(Order::Usual, grid, |t| x.cdf(t), |t| y.cdf(t))
}

/// `X ⪯Lt Y`: `E[e^{−ρY}] ≤ E[e^{−ρX}]` at every grid `ρ`.
pub fn check_lt(x: &ChannelModel, y: &ChannelModel, rho_grid: &[f64]) -> Result<OrderVerdict> {
    check_grid(rho_grid, 1)?;
    dominance(
        Order::Laplace,
        rho_grid,
        |r| x.laplace(r).map(|e| e.value),
        |r| y.laplace(r).map(|e| e.value),
    )
}

/// `X ⪯cx Y` via equal means plus either `S(f_Y − f_X) = 2` with pattern
/// `+,−,+` or `S(F_Y − F_X) = 1` with pattern `+,−`.
pub fn check_convex(x: &ChannelModel, y: &ChannelModel, grid: &[f64]) -> Result<OrderVerdict> {
    check_grid(grid, 3)?;
    let inconclusive = |margin| OrderVerdict {
        order: Order::Convex,
        outcome: Outcome::Inconclusive,
        counterexample: None,
        margin,
    };
    let (mx, my) = match (x.mean()?, y.mean()?) {
        (Moment::Finite(a), Moment::Finite(b)) => (a, b),
        _ => return Ok(inconclusive(f64::NAN)),
    };
    let margin = -(mx - my).abs();
    if (mx - my).abs() > MEAN_TOL {
        return Ok(OrderVerdict {
            order: Order::Convex,
            outcome: Outcome::Fails,
            counterexample: Some(Witness::Means { x: mx, y: my }),
            margin,
        });
    }
    if x.has_density() && y.has_density() {
        let d: Vec<f64> = grid
            .par_iter()
            .map(|&t| Ok(y.pdf(t)? - x.pdf(t)?))
            .collect::<Result<Vec<_>>>()?;
        let p = sign_pattern(&d);
        if p.sequence == [Sign::Plus, Sign::Minus, Sign::Plus] {
            return Ok(OrderVerdict {
                order: Order::Convex,
                outcome: Outcome::Holds,
                counterexample: None,
                margin,
            });
        }
    }
    let d: Vec<f64> = grid
        .par_iter()
        .map(|&t| Ok(y.cdf(t)? - x.cdf(t)?))
        .collect::<Result<Vec<_>>>()?;
    if sign_pattern(&d).sequence == [Sign::Plus, Sign::Minus] {
        return Ok(OrderVerdict {
            order: Order::Convex,
            outcome: Outcome::Holds,
            counterexample: None,
            margin,
        });
    }
    Ok(inconclusive(margin))
}

/// All three orders in both directions, with a consistency check of
/// `st ⇒ Lt` and `X ⪯cx Y ⇒ Y ⪯Lt X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicationAudit {
    pub st_xy: OrderVerdict,
    pub st_yx: OrderVerdict,
    pub cx_xy: OrderVerdict,
    pub cx_yx: OrderVerdict,
    pub lt_xy: OrderVerdict,
    pub lt_yx: OrderVerdict,
    /// Human-readable description of each broken implication.
    pub violations: Vec<String>,
}

impl ImplicationAudit {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn implication_audit(
    x: &ChannelModel,
    y: &ChannelModel,
    x_grid: &[f64],
    rho_grid: &[f64],
) -> Result<ImplicationAudit> {
    let st_xy = check_usual(x, y, x_grid)?;
    let st_yx = check_usual(y, x, x_grid)?;
    let cx_xy = check_convex(x, y, x_grid)?;
    let cx_yx = check_convex(y, x, x_grid)?;
    let lt_xy = check_lt(x, y, rho_grid)?;
    let lt_yx = check_lt(y, x, rho_grid)?;
    let mut violations = Vec::new();
    let mut imply = |premise: &OrderVerdict, conclusion: &OrderVerdict, what: &str| {
        if premise.holds() && conclusion.outcome == Outcome::Fails {
            violations.push(format!("{what}: premise holds but conclusion fails ({:?})", conclusion.counterexample));
        }
    };
    imply(&st_xy, &lt_xy, "X st Y => X Lt Y");
    imply(&st_yx, &lt_yx, "Y st X => Y Lt X");
    imply(&cx_xy, &lt_yx, "X cx Y => Y Lt X");
    imply(&cx_yx, &lt_xy, "Y cx X => X Lt Y");
    Ok(ImplicationAudit {
        st_xy,
        st_yx,
        cx_xy,
        cx_yx,
        lt_xy,
        lt_yx,
        violations,
    })
}
