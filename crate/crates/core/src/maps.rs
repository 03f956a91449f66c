//! One-dimensional string maps over price windows.
//!
//! A string map sends a window of `l_s + 1` quotes onto a real sequence over
//! the internal coordinate `h ∈ 0..=l_s`, built so that prescribed end points
//! are pinned to zero. Everything here is a pure function of the price
//! window; scalar kernels (`*_value`) exist alongside the full-state builders
//! so sweeps can evaluate a single `h` without allocating.

use crate::error::{Error, Result};

/// Map topology selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    OneEnd,
    TwoEnd,
    MultiScale,
    Homotopy,
    SpreadAdjusted,
}

/// Symmetry channel under the quotation-inversion transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Plain,
    Symmetric,
    Antisymmetric,
}

/// Full parameterization of a string map.
#[derive(Debug, Clone)]
pub struct StringConfig {
    pub topology: Topology,
    /// Deformation exponent, > 0.
    pub q: f64,
    /// String length in ticks, >= 2.
    pub l_s: usize,
    pub channel: Channel,
    /// Compactification count; 1 = none.
    pub n_m: usize,
    /// Homotopy weight in [0, 1].
    pub eta: f64,
    /// Second deformation exponent for the homotopy's 2-end parent
    /// (defaults to `q` when absent).
    pub q2: Option<f64>,
    /// Node lengths for the multi-scale product, strictly increasing.
    pub scales: Vec<usize>,
}

impl StringConfig {
    pub fn new(topology: Topology, q: f64, l_s: usize) -> Self {
        Self {
            topology,
            q,
            l_s,
            channel: Channel::Plain,
            n_m: 1,
            eta: 0.0,
            q2: None,
            scales: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0) {
            return Err(Error::InvalidParams(format!("q must be > 0, got {}", self.q)));
        }
        if self.l_s < 2 {
            return Err(Error::InvalidParams(format!("l_s must be >= 2, got {}", self.l_s)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParams(format!("eta must be in [0,1], got {}", self.eta)));
        }
        if self.n_m == 0 {
            return Err(Error::InvalidParams("N_m must be >= 1".into()));
        }
        if let Some(q2) = self.q2 {
            if !(q2 > 0.0) {
                return Err(Error::InvalidParams(format!("q2 must be > 0, got {q2}")));
            }
        }
        if !self.scales.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams("scales must be strictly increasing".into()));
        }
        if self.topology == Topology::MultiScale && self.scales.is_empty() {
            return Err(Error::InvalidParams("MultiScale needs a nonempty scales list".into()));
        }
        Ok(())
    }

    pub fn q2(&self) -> f64 {
        self.q2.unwrap_or(self.q)
    }
}

/// One string map evaluated at a fixed window start. `values[h]`, h = 0..=l_s.
#[derive(Debug, Clone, PartialEq)]
pub struct StringState {
    pub tau: usize,
    pub values: Vec<f64>,
}

impl StringState {
    pub fn l_s(&self) -> usize {
        self.values.len() - 1
    }
}

/// The conjugate variable: discrete time-integral of the string momentum.
/// `values[0] == values[1]` holds by construction (left Neumann condition).
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateState {
    pub tau: usize,
    pub values: Vec<f64>,
}

impl ConjugateState {
    pub fn l_s(&self) -> usize {
        self.values.len() - 1
    }

    /// The recurrence does not pin the right end; this is the residual
    /// X[l_s] - X[l_s - 1] that a Neumann right end would require to vanish.
    pub fn right_end_residual(&self) -> f64 {
        let n = self.values.len();
        self.values[n - 1] - self.values[n - 2]
    }
}

/// Sign-preserving power law `sign(x) |x|^q`. Zero maps to zero for every q,
/// which is also the continuous limit for q < 1.
#[inline]
pub fn f_q(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if q == 1.0 {
        return x;
    }
    let mag = if q.fract() == 0.0 && (1.0..=64.0).contains(&q) {
        x.abs().powi(q as i32)
    } else {
        x.abs().powf(q)
    };
    if x < 0.0 {
        -mag
    } else {
        mag
    }
}

#[inline]
fn one_end_ratio(p0: f64, ph: f64) -> f64 {
    (ph - p0) / ph
}

#[inline]
fn two_end_product(p0: f64, ph: f64, pl: f64) -> f64 {
    ((ph - p0) / ph) * ((pl - ph) / pl)
}

fn check_window(p: &[f64], tau: usize, l_s: usize) -> Result<()> {
    let last = tau + l_s;
    if last >= p.len() {
        return Err(Error::IndexOutOfRange { index: last, len: p.len() });
    }
    for (off, &v) in p[tau..=last].iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonPositivePrice { index: tau + off });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scalar kernels
// ---------------------------------------------------------------------------

/// 1-end-point value at one `h`: f_q((p(τ+h) − p(τ)) / p(τ+h)).
#[inline]
pub fn one_end_value(p: &[f64], tau: usize, h: usize, q: f64) -> f64 {
    f_q(one_end_ratio(p[tau], p[tau + h]), q)
}

/// 1-end-point value of the quotation-inverted series 1/p.
#[inline]
pub fn one_end_dual_value(p: &[f64], tau: usize, h: usize, q: f64) -> f64 {
    f_q(one_end_ratio(p[tau].recip(), p[tau + h].recip()), q)
}

#[inline]
pub fn one_end_channel_value(p: &[f64], tau: usize, h: usize, q: f64, channel: Channel) -> f64 {
    match channel {
        Channel::Plain => one_end_value(p, tau, h, q),
        Channel::Symmetric => {
            0.5 * (one_end_value(p, tau, h, q) + one_end_dual_value(p, tau, h, q))
        }
        Channel::Antisymmetric => {
            0.5 * (one_end_value(p, tau, h, q) - one_end_dual_value(p, tau, h, q))
        }
    }
}

/// 2-end-point value at one `h`.
#[inline]
pub fn two_end_value(p: &[f64], tau: usize, h: usize, l_s: usize, q: f64) -> f64 {
    f_q(two_end_product(p[tau], p[tau + h], p[tau + l_s]), q)
}

#[inline]
pub fn two_end_dual_value(p: &[f64], tau: usize, h: usize, l_s: usize, q: f64) -> f64 {
    f_q(
        two_end_product(p[tau].recip(), p[tau + h].recip(), p[tau + l_s].recip()),
        q,
    )
}

#[inline]
pub fn two_end_channel_value(
    p: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    q: f64,
    channel: Channel,
) -> f64 {
    match channel {
        Channel::Plain => two_end_value(p, tau, h, l_s, q),
        Channel::Symmetric => {
            0.5 * (two_end_value(p, tau, h, l_s, q) + two_end_dual_value(p, tau, h, l_s, q))
        }
        Channel::Antisymmetric => {
            0.5 * (two_end_value(p, tau, h, l_s, q) - two_end_dual_value(p, tau, h, l_s, q))
        }
    }
}

/// Homotopy between the 1-end and 2-end maps: (1−η)·P¹_{q1} + η·P²_{q2}.
#[inline]
pub fn homotopy_value(
    p: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    eta: f64,
    q1: f64,
    q2: f64,
    channel: Channel,
) -> f64 {
    (1.0 - eta) * one_end_channel_value(p, tau, h, q1, channel)
        + eta * two_end_channel_value(p, tau, h, l_s, q2, channel)
}

/// Spread-adjusted 2-end value: bid-vs-ask segment products over the mid
/// denominator. Does not vanish at h = 0 when the spread is nonzero.
#[inline]
pub fn spread_adjusted_value(
    ask: &[f64],
    bid: &[f64],
    mid: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    q: f64,
) -> f64 {
    f_q(
        ((bid[tau + h] - ask[tau]) / mid[tau + h])
            * ((bid[tau + l_s] - ask[tau + h]) / mid[tau + l_s]),
        q,
    )
}

/// Spread-adjusted value of the ask/bid-inverted quotes (ask, bid) → (1/bid, 1/ask).
#[inline]
pub fn spread_adjusted_dual_value(
    ask: &[f64],
    bid: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    q: f64,
) -> f64 {
    let ra = |i: usize| bid[i].recip(); // dual ask
    let rb = |i: usize| ask[i].recip(); // dual bid
    let rm = |i: usize| (ask[i].recip() + bid[i].recip()) / 2.0;
    f_q(
        ((rb(tau + h) - ra(tau)) / rm(tau + h)) * ((rb(tau + l_s) - ra(tau + h)) / rm(tau + l_s)),
        q,
    )
}

#[inline]
pub fn spread_adjusted_channel_value(
    ask: &[f64],
    bid: &[f64],
    mid: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    q: f64,
    channel: Channel,
) -> f64 {
    match channel {
        Channel::Plain => spread_adjusted_value(ask, bid, mid, tau, h, l_s, q),
        Channel::Symmetric => {
            0.5 * (spread_adjusted_value(ask, bid, mid, tau, h, l_s, q)
                + spread_adjusted_dual_value(ask, bid, tau, h, l_s, q))
        }
        Channel::Antisymmetric => {
            0.5 * (spread_adjusted_value(ask, bid, mid, tau, h, l_s, q)
                - spread_adjusted_dual_value(ask, bid, tau, h, l_s, q))
        }
    }
}

// ---------------------------------------------------------------------------
// Full-state builders
// ---------------------------------------------------------------------------

/// 1-end-point open string over the window `tau..=tau+l_s`. `values[0] = 0`
/// exactly. Honors `cfg.channel`.
pub fn string_1end(p: &[f64], tau: usize, cfg: &StringConfig) -> Result<StringState> {
    cfg.validate()?;
    check_window(p, tau, cfg.l_s)?;
    let values = (0..=cfg.l_s)
        .map(|h| one_end_channel_value(p, tau, h, cfg.q, cfg.channel))
        .collect();
    Ok(StringState { tau, values })
}

/// 2-end-point open string; `values[0] = values[l_s] = 0` exactly.
pub fn string_2end(p: &[f64], tau: usize, cfg: &StringConfig) -> Result<StringState> {
    cfg.validate()?;
    check_window(p, tau, cfg.l_s)?;
    let values = (0..=cfg.l_s)
        .map(|h| two_end_channel_value(p, tau, h, cfg.l_s, cfg.q, cfg.channel))
        .collect();
    Ok(StringState { tau, values })
}

/// Degree-2 polynomial numerator fixed by the Dirichlet conditions:
/// β₀ (p(τ) − p(τ+h)) (p(τ+l_s) − p(τ+h)). Equals −1 × the numerator of the
/// q = 1 2-end map when β₀ = 1.
pub fn string_numerator_form(p: &[f64], tau: usize, h: usize, l_s: usize, beta0: f64) -> f64 {
    beta0 * (p[tau] - p[tau + h]) * (p[tau + l_s] - p[tau + h])
}

/// Multi-scale product value: Π_i f_q((p(τ+l_i) − p(τ+h)) / p(τ+h)).
/// Vanishes whenever `h` hits one of the node scales.
pub fn string_multiscale(
    p: &[f64],
    tau: usize,
    scales: &[usize],
    q: f64,
    h: usize,
) -> Result<f64> {
    if scales.is_empty() {
        return Err(Error::InvalidParams("scales must be nonempty".into()));
    }
    let max_idx = tau + scales.iter().copied().max().unwrap().max(h);
    if max_idx >= p.len() {
        return Err(Error::IndexOutOfRange { index: max_idx, len: p.len() });
    }
    let ph = p[tau + h];
    let mut prod = 1.0;
    for &l_i in scales {
        prod *= f_q((p[tau + l_i] - ph) / ph, q);
    }
    Ok(prod)
}

/// Multi-scale value on the inverted series 1/p.
pub fn string_multiscale_dual(
    p: &[f64],
    tau: usize,
    scales: &[usize],
    q: f64,
    h: usize,
) -> Result<f64> {
    if scales.is_empty() {
        return Err(Error::InvalidParams("scales must be nonempty".into()));
    }
    let max_idx = tau + scales.iter().copied().max().unwrap().max(h);
    if max_idx >= p.len() {
        return Err(Error::IndexOutOfRange { index: max_idx, len: p.len() });
    }
    let rh = p[tau + h].recip();
    let mut prod = 1.0;
    for &l_i in scales {
        prod *= f_q((p[tau + l_i].recip() - rh) / rh, q);
    }
    Ok(prod)
}

/// Conjugate variable by recurrent summation: X[0] = X[1] = 0, then
/// X[h+1] = X[h] + P[h−1]·Δt(h) for h = 1..l_s−1, with Δt in seconds taken
/// from the tick timestamps. The left Neumann condition is exact by
/// construction; the right end is left to the recurrence (see
/// [`ConjugateState::right_end_residual`]).
pub fn conjugate_x(state: &StringState, times_ms: &[i64]) -> Result<ConjugateState> {
    let l_s = state.l_s();
    let last = state.tau + l_s;
    if last >= times_ms.len() {
        return Err(Error::LengthMismatch { left: last + 1, right: times_ms.len() });
    }
    let mut x = vec![0.0; l_s + 1];
    for h in 1..l_s {
        let dt = (times_ms[state.tau + h] - times_ms[state.tau + h - 1]) as f64 / 1000.0;
        x[h + 1] = x[h] + state.values[h - 1] * dt;
    }
    Ok(ConjugateState { tau: state.tau, values: x })
}

/// Elementwise reciprocal, the quotation-inversion acting on the series.
pub fn reciprocal_series(p: &[f64]) -> Vec<f64> {
    p.iter().map(|v| v.recip()).collect()
}

/// Evaluates a 1-end or 2-end map on the inverted series 1/p. Applying it
/// twice round-trips to the original map up to reciprocal rounding.
pub fn dual_transform(
    topology: Topology,
    p: &[f64],
    tau: usize,
    cfg: &StringConfig,
) -> Result<StringState> {
    let r = reciprocal_series(p);
    match topology {
        Topology::OneEnd => string_1end(&r, tau, cfg),
        Topology::TwoEnd => string_2end(&r, tau, cfg),
        other => Err(Error::InvalidParams(format!(
            "dual_transform is defined for OneEnd/TwoEnd, got {other:?}"
        ))),
    }
}

/// Symmetric/antisymmetric projection (P ± P̄)/2 of a 1-end or 2-end map,
/// as a full state.
pub fn symmetry_channel(
    topology: Topology,
    p: &[f64],
    tau: usize,
    cfg: &StringConfig,
    channel: Channel,
) -> Result<StringState> {
    let mut cfg = cfg.clone();
    cfg.channel = channel;
    match topology {
        Topology::OneEnd => string_1end(p, tau, &cfg),
        Topology::TwoEnd => string_2end(p, tau, &cfg),
        other => Err(Error::InvalidParams(format!(
            "symmetry_channel is defined for OneEnd/TwoEnd, got {other:?}"
        ))),
    }
}

/// Partial-compactification pre-map: p̃(τ+j) = (1/N_m) Σ_m p(τ + j + l_s·m)
/// for j = 0..=l_s. Feeding the result into an open-string map yields the
/// partially compactified string.
pub fn compactify(p: &[f64], tau: usize, l_s: usize, n_m: usize) -> Result<Vec<f64>> {
    if n_m == 0 {
        return Err(Error::InvalidParams("N_m must be >= 1".into()));
    }
    let last = tau + l_s + l_s * (n_m - 1);
    if last >= p.len() {
        return Err(Error::IndexOutOfRange { index: last, len: p.len() });
    }
    let inv = 1.0 / n_m as f64;
    Ok((0..=l_s)
        .map(|j| {
            let mut s = 0.0;
            for m in 0..n_m {
                s += p[tau + j + l_s * m];
            }
            s * inv
        })
        .collect())
}

/// Homotopy string (1−η)·P¹_{q1} + η·P²_{q2} as a full state.
pub fn string_homotopy(
    p: &[f64],
    tau: usize,
    l_s: usize,
    eta: f64,
    q1: f64,
    q2: f64,
) -> Result<StringState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParams(format!("eta must be in [0,1], got {eta}")));
    }
    check_window(p, tau, l_s)?;
    let values = (0..=l_s)
        .map(|h| homotopy_value(p, tau, h, l_s, eta, q1, q2, Channel::Plain))
        .collect();
    Ok(StringState { tau, values })
}

/// Spread-adjusted 2-end string. The Dirichlet conditions are deliberately
/// not asserted: a nonzero spread leaves values[0] ≠ 0.
pub fn string_spread_adjusted(
    ask: &[f64],
    bid: &[f64],
    mid: &[f64],
    tau: usize,
    cfg: &StringConfig,
) -> Result<StringState> {
    cfg.validate()?;
    check_window(ask, tau, cfg.l_s)?;
    check_window(bid, tau, cfg.l_s)?;
    check_window(mid, tau, cfg.l_s)?;
    let values = (0..=cfg.l_s)
        .map(|h| spread_adjusted_channel_value(ask, bid, mid, tau, h, cfg.l_s, cfg.q, cfg.channel))
        .collect();
    Ok(StringState { tau, values })
}

/// Spread-adjusted string with the boundary renewed by subtraction:
/// values[h] = P_ab(τ,h) − P_ab(τ,0), so values[0] = 0 exactly.
pub fn string_spread_renewed(
    ask: &[f64],
    bid: &[f64],
    mid: &[f64],
    tau: usize,
    cfg: &StringConfig,
) -> Result<StringState> {
    let mut state = string_spread_adjusted(ask, bid, mid, tau, cfg)?;
    let base = state.values[0];
    for v in &mut state.values {
        *v -= base;
    }
    Ok(state)
}
