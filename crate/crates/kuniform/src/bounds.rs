//! Closed-form support-size, density, and concentration bounds.
//!
//! All logarithms are natural unless a name says otherwise; quantities that
//! can dwarf f64 range are returned in log2 space.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bound inapplicable: {0}")]
    Inapplicable(String),
}

fn check_counts(n: usize, m: usize) -> Result<(), BoundsError> {
    if n == 0 || m == 0 {
        return Err(BoundsError::InvalidParameter(
            "players and actions must be positive".into(),
        ));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<(), BoundsError> {
    if !(epsilon > 0.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// Support size sufficient for an ε-equilibrium in a degree-d game:
/// `ceil((8/ε²) · d · (ln n + ln m))`, clamped to at least 1.
pub fn k_graphical(n: usize, m: usize, d: usize, epsilon: f64) -> Result<u64, BoundsError> {
    check_counts(n, m)?;
    check_epsilon(epsilon)?;
    let raw = (8.0 / (epsilon * epsilon))
        * d as f64
        * ((n as f64).ln() + (m as f64).ln());
    Ok((raw.ceil() as u64).max(1))
}

/// The general-game support bound: degree d = n − 1.
pub fn k_general(n: usize, m: usize, epsilon: f64) -> Result<u64, BoundsError> {
    check_counts(n, m)?;
    k_graphical(n, m, n - 1, epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBound {
    /// log2 of the guaranteed number of ordered k-uniform ε-equilibria.
    pub log2_count: f64,
    /// The k at which the guarantee is stated.
    pub theorem_k: u64,
    /// True when the queried k differs from `theorem_k`; the value is then
    /// the same formula but carries no guarantee.
    pub advisory: bool,
}

/// Guaranteed count of ordered k-uniform ε-equilibria in a game that has a
/// c-small equilibrium: `m^(kn) / (2 (nm)^((8/ε²)(n−1) n ln c))`, in log2
/// space.
pub fn theorem2_lower_bound(
    n: usize,
    m: usize,
    c: f64,
    epsilon: f64,
    k: u64,
) -> Result<DensityBound, BoundsError> {
    check_counts(n, m)?;
    check_epsilon(epsilon)?;
    if !(c >= 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "smallness parameter must be at least 1, got {c}"
        )));
    }
    if k == 0 {
        return Err(BoundsError::InvalidParameter("k must be positive".into()));
    }
    let exponent = (8.0 / (epsilon * epsilon)) * ((n - 1) as f64) * (n as f64) * c.ln();
    let log2_count = (k as f64) * (n as f64) * (m as f64).log2()
        - 1.0
        - exponent * ((n * m) as f64).log2();
    let theorem_k = k_general(n, m, epsilon)?;
    Ok(DensityBound {
        log2_count,
        theorem_k,
        advisory: k != theorem_k,
    })
}

/// Expected number of uniform ordered samples until one is an
/// ε-equilibrium, `(nm)^((8/ε²)(n−1) n ln c)`, in log2 space.
pub fn corollary2_samples(n: usize, m: usize, c: f64, epsilon: f64) -> Result<f64, BoundsError> {
    check_counts(n, m)?;
    check_epsilon(epsilon)?;
    if !(c >= 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "smallness parameter must be at least 1, got {c}"
        )));
    }
    let exponent = (8.0 / (epsilon * epsilon)) * ((n - 1) as f64) * (n as f64) * c.ln();
    Ok(exponent * ((n * m) as f64).log2())
}

/// Lower bound on the probability that a payoff against sampled opponents
/// lands within δ of its expectation: `1 − 2 exp(−δ² / (d λ²))`. Negative
/// values are vacuous but returned as computed.
pub fn concentration_bound(delta: f64, d: usize, lambda: f64) -> Result<f64, BoundsError> {
    if delta < 0.0 || delta.is_nan() {
        return Err(BoundsError::InvalidParameter(format!(
            "delta must be nonnegative, got {delta}"
        )));
    }
    if d == 0 || lambda == 0.0 {
        return Err(BoundsError::Inapplicable(
            "degree 0 or Lipschitz constant 0 means the payoff is deterministic; \
             the probability is 1"
                .into(),
        ));
    }
    if lambda < 0.0 || lambda.is_nan() {
        return Err(BoundsError::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(1.0 - 2.0 * (-(delta * delta) / (d as f64 * lambda * lambda)).exp())
}
