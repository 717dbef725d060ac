use crate::error::{Error, Result};

fn check_common(delta: f64, sigma: usize, c: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("δ must lie in (0, 1)".into()));
    }
    if sigma == 0 {
        return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
    }
    if c <= 0.0 {
        return Err(Error::InvalidParameter("C must be positive".into()));
    }
    Ok(())
}

/// C·√((|Σ|·n·(ln n + 1) + ln(1/δ)) / m): risk gap between a size-n DFA's
/// empirical and true risk, holding with probability ≥ 1 − δ.
pub fn generalization_bound(m: usize, n: usize, delta: f64, sigma: usize, c: f64) -> Result<f64> {
    check_common(delta, sigma, c)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be ≥ 1".into()));
    }
    let nf = n as f64;
    Ok(c * ((sigma as f64 * nf * (nf.ln() + 1.0) + (1.0 / delta).ln()) / m as f64).sqrt())
}

/// Variant holding simultaneously for every size n, by splitting the
/// failure budget as δ·2^{−n} per size.
pub fn generalization_bound_weighted(
    m: usize,
    n: usize,
    delta: f64,
    sigma: usize,
    c: f64,
) -> Result<f64> {
    check_common(delta, sigma, c)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be ≥ 1".into()));
    }
    let nf = n as f64;
    let log_term = (1.0 / delta).ln() + nf * 2f64.ln();
    Ok(c * ((sigma as f64 * nf * (nf.ln() + 1.0) + log_term) / m as f64).sqrt())
}

fn bound_holds(m: u64, eps: f64, delta: f64, sigma: usize, c: f64, growth: f64) -> bool {
    let inner = growth * sigma as f64 * (1.0 / eps) * ((growth / eps).ln() + 1.0)
        + (1.0 / delta).ln();
    2.0 * c * (inner / m as f64).sqrt() <= eps
}

/// Smallest m with 2C·√((c|Σ|(1/ε)(ln(c/ε)+1) + ln(1/δ)) / m) ≤ ε, where c
/// is the automaton growth-rate constant. Scales as 1/ε³ up to logs.
pub fn sample_size_bound(
    eps: f64,
    delta: f64,
    sigma: usize,
    c: f64,
    growth: f64,
) -> Result<u64> {
    check_common(delta, sigma, c)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("ε must lie in (0, 1)".into()));
    }
    if growth <= 0.0 || (growth / eps).ln() + 1.0 <= 0.0 {
        return Err(Error::InvalidParameter(
            "growth constant must keep the log term positive".into(),
        ));
    }
    let inner = growth * sigma as f64 * (1.0 / eps) * ((growth / eps).ln() + 1.0)
        + (1.0 / delta).ln();
    // closed form, then nudge against rounding
    let mut m = (4.0 * c * c * inner / (eps * eps)).ceil() as u64;
    m = m.max(1);
    while !bound_holds(m, eps, delta, sigma, c, growth) {
        m += 1;
    }
    while m > 1 && bound_holds(m - 1, eps, delta, sigma, c, growth) {
        m -= 1;
    }
    Ok(m)
}
