//! Mapping of variable-length daily series onto a fixed number of states.
//!
//! State `s` (1-based) of an `n`-state grid over a `d`-day campaign ends on
//! day `ceil(s * d / n)`. Campaigns shorter than the grid repeat days, so a
//! state can be empty.

/// Last day (1-based) covered by state `s` of `n` for a `days`-long series.
pub fn state_end_day(s: usize, days: usize, n: usize) -> usize {
    debug_assert!(n > 0 && s <= n);
    (s * days).div_ceil(n)
}

/// Running sum, left to right.
pub fn cumulative(daily: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    daily
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Cumulative value at the end of every state, states `1..=n`.
pub fn sample_states(cum: &[f64], n: usize) -> Vec<f64> {
    let d = cum.len();
    (1..=n)
        .map(|s| match state_end_day(s, d, n) {
            0 => 0.0,
            day => cum[day - 1],
        })
        .collect()
}

/// Amount accrued inside each state: differences of the sampled cumulative
/// series. Sums telescope to the series total.
pub fn state_increments(daily: &[f64], n: usize) -> Vec<f64> {
    let sampled = sample_states(&cumulative(daily), n);
    let mut prev = 0.0;
    sampled
        .into_iter()
        .map(|c| {
            let inc = c - prev;
            prev = c;
            inc
        })
        .collect()
}
