//! Buy-condition polarized strings, the polarization measure g, inter-state
//! distances, the correlation sum and its fractal-dimension fit.
//!
//! The latch walks every window start in order (the update is inherently
//! sequential); statistics are emitted at a configurable stride once both
//! branches have been assigned.

use serde::Serialize;

use crate::brane::{brane_2d, BraneState};
use crate::error::{Error, Result};
use crate::ingest::TickSeries;
use crate::maps::{two_end_channel_value, StringConfig, StringState, Topology};
use crate::numeric;

/// Latched string states: `plus` holds the most recent state whose window
/// opened on a profitable buy (p_bid(τ+l_s) ≥ p_ask(τ)), `minus` the most
/// recent one that did not.
#[derive(Debug, Clone)]
pub struct PolarizedPair {
    plus: Vec<f64>,
    minus: Vec<f64>,
    plus_warm: bool,
    minus_warm: bool,
}

impl PolarizedPair {
    pub fn new(l_s: usize) -> Self {
        Self {
            plus: vec![0.0; l_s + 1],
            minus: vec![0.0; l_s + 1],
            plus_warm: false,
            minus_warm: false,
        }
    }

    pub fn plus(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus(&self) -> &[f64] {
        &self.minus
    }

    pub fn plus_warm(&self) -> bool {
        self.plus_warm
    }

    pub fn minus_warm(&self) -> bool {
        self.minus_warm
    }

    /// Both branches assigned at least once.
    pub fn warm(&self) -> bool {
        self.plus_warm && self.minus_warm
    }
}

/// One latch update. The tie p_bid = p_ask counts as a buy.
pub fn polarize_step(
    pair: &mut PolarizedPair,
    state: &StringState,
    ask_at_open: f64,
    bid_at_close: f64,
) {
    if bid_at_close >= ask_at_open {
        pair.plus.copy_from_slice(&state.values);
        pair.plus_warm = true;
    } else {
        pair.minus.copy_from_slice(&state.values);
        pair.minus_warm = true;
    }
}

/// ℓ1 mean distance between two equal-length string states.
pub fn string_distance(a: &StringState, b: &StringState) -> Result<f64> {
    slice_distance(&a.values, &b.values)
}

pub(crate) fn slice_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let s = numeric::sum_indexed(a.len(), |i| (a[i] - b[i]).abs());
    Ok(s / a.len() as f64)
}

/// ℓ1 mean distance between two equal-shape brane states.
pub fn brane_distance(a: &BraneState, b: &BraneState) -> Result<f64> {
    if a.l_s != b.l_s {
        return Err(Error::ShapeMismatch { left: a.l_s + 1, right: b.l_s + 1 });
    }
    let (av, bv) = (a.values(), b.values());
    let s = numeric::sum_indexed(av.len(), |i| (av[i] - bv[i]).abs());
    Ok(s / av.len() as f64)
}

/// Output of a polarization walk: one record per emitted (warm) window.
#[derive(Debug, Clone, Serialize)]
pub struct PolarizationRun {
    pub tau: Vec<usize>,
    pub t_ms: Vec<i64>,
    /// Per-window ratio Σ|P₊−P₋| / Σ|P₊+P₋|.
    pub g_window: Vec<f64>,
    /// Per-window ℓ1 distance between the latched branches.
    pub distance: Vec<f64>,
    /// Warm windows dropped because the g denominator was zero.
    pub excluded_zero_denominator: usize,
    /// Windows evaluated while both branches were warm (emitted + excluded).
    pub warm_windows: usize,
}

/// Walks every window start, latching the 2-end string of the configured
/// channel by the buy condition; emits g and branch distance every `stride`
/// warm windows.
pub fn polarization_run(
    series: &TickSeries,
    cfg: &StringConfig,
    stride: usize,
) -> Result<PolarizationRun> {
    cfg.validate()?;
    if cfg.topology != Topology::TwoEnd {
        return Err(Error::InvalidParams(
            "polarization latches the 2-end map; set topology TwoEnd".into(),
        ));
    }
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be >= 1".into()));
    }
    let l_s = cfg.l_s;
    if series.len() <= l_s {
        return Err(Error::SeriesTooShort { needed: l_s + 1, len: series.len() });
    }
    let mid = series.mids();
    let mut pair = PolarizedPair::new(l_s);
    let mut state = StringState { tau: 0, values: vec![0.0; l_s + 1] };
    let mut out = PolarizationRun {
        tau: Vec::new(),
        t_ms: Vec::new(),
        g_window: Vec::new(),
        distance: Vec::new(),
        excluded_zero_denominator: 0,
        warm_windows: 0,
    };
    for tau in 0..series.len() - l_s {
        state.tau = tau;
        for h in 0..=l_s {
            state.values[h] = two_end_channel_value(&mid, tau, h, l_s, cfg.q, cfg.channel);
        }
        polarize_step(&mut pair, &state, series.ask[tau], series.bid[tau + l_s]);
        if !pair.warm() || tau % stride != 0 {
            continue;
        }
        out.warm_windows += 1;
        let mut num = numeric::CompensatedSum::new();
        let mut den = numeric::CompensatedSum::new();
        for h in 0..=l_s {
            num.add((pair.plus[h] - pair.minus[h]).abs());
            den.add((pair.plus[h] + pair.minus[h]).abs());
        }
        let (num, den) = (num.value(), den.value());
        if den == 0.0 {
            out.excluded_zero_denominator += 1;
            continue;
        }
        out.tau.push(tau);
        out.t_ms.push(series.t_ms[tau]);
        out.g_window.push(num / den);
        out.distance.push(num / (l_s + 1) as f64);
    }
    Ok(out)
}

/// Aggregate polarization measure: the mean of the per-window ratios.
/// Zero-denominator windows were already excluded (and counted) by the run.
pub fn polarization_measure(run: &PolarizationRun) -> Result<f64> {
    if run.warm_windows == 0 {
        return Err(Error::NoQualifyingWindows);
    }
    if run.g_window.is_empty() {
        return Err(Error::AllDenominatorsZero);
    }
    Ok(numeric::sum_slice(&run.g_window) / run.g_window.len() as f64)
}

/// Brane analogue of the polarization walk: latches full 2D brane states by
/// the same buy condition and emits the inter-brane ℓ1 distance.
pub fn brane_polarization_run(
    series: &TickSeries,
    q: f64,
    l_s: usize,
    stride: usize,
) -> Result<PolarizationRun> {
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be >= 1".into()));
    }
    if series.len() <= l_s {
        return Err(Error::SeriesTooShort { needed: l_s + 1, len: series.len() });
    }
    let mut plus: Option<BraneState> = None;
    let mut minus: Option<BraneState> = None;
    let mut out = PolarizationRun {
        tau: Vec::new(),
        t_ms: Vec::new(),
        g_window: Vec::new(),
        distance: Vec::new(),
        excluded_zero_denominator: 0,
        warm_windows: 0,
    };
    for tau in 0..series.len() - l_s {
        let state = brane_2d(&series.ask, &series.bid, tau, q, l_s)?;
        if series.bid[tau + l_s] >= series.ask[tau] {
            plus = Some(state);
        } else {
            minus = Some(state);
        }
        let (Some(p), Some(m)) = (&plus, &minus) else { continue };
        if tau % stride != 0 {
            continue;
        }
        out.warm_windows += 1;
        let (pv, mv) = (p.values(), m.values());
        let mut num = numeric::CompensatedSum::new();
        let mut den = numeric::CompensatedSum::new();
        for i in 0..pv.len() {
            num.add((pv[i] - mv[i]).abs());
            den.add((pv[i] + mv[i]).abs());
        }
        if den.value() == 0.0 {
            out.excluded_zero_denominator += 1;
            continue;
        }
        out.tau.push(tau);
        out.t_ms.push(series.t_ms[tau]);
        out.g_window.push(num.value() / den.value());
        out.distance.push(num.value() / pv.len() as f64);
    }
    Ok(out)
}

/// Normalized correlation sum: C(ε) = ⟨Θ(ε − d)⟩ / ∫dε′ ⟨Θ(ε′ − d)⟩, with the
/// integral discretized by the trapezoid rule on the given ε grid.
/// Θ(0) = 1: a distance exactly at the threshold counts.
pub fn correlation_sum(distances: &[f64], epsilons: &[f64]) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(Error::EmptyDistances);
    }
    if epsilons.len() < 2 {
        return Err(Error::InvalidParams("need at least 2 epsilon grid points".into()));
    }
    if !epsilons.windows(2).all(|w| w[0] < w[1]) || epsilons[0] <= 0.0 {
        return Err(Error::InvalidParams("epsilons must be positive ascending".into()));
    }
    let n = distances.len() as f64;
    let raw: Vec<f64> = epsilons
        .iter()
        .map(|&eps| distances.iter().filter(|&&d| d <= eps).count() as f64 / n)
        .collect();
    let mut integral = 0.0;
    for i in 1..epsilons.len() {
        integral += 0.5 * (raw[i] + raw[i - 1]) * (epsilons[i] - epsilons[i - 1]);
    }
    if integral == 0.0 {
        return Err(Error::InsufficientFitPoints { found: 0 });
    }
    Ok(raw.into_iter().map(|r| r / integral).collect())
}

/// Unnormalized counting fraction ⟨Θ(ε − d)⟩ per ε (monotone in ε).
pub fn raw_correlation(distances: &[f64], epsilons: &[f64]) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(Error::EmptyDistances);
    }
    let n = distances.len() as f64;
    Ok(epsilons
        .iter()
        .map(|&eps| distances.iter().filter(|&&d| d <= eps).count() as f64 / n)
        .collect())
}

/// Log-spaced ε grid spanning [min positive distance / 2, 2 × max distance].
pub fn default_epsilon_grid(distances: &[f64], points: usize) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(Error::EmptyDistances);
    }
    if points < 2 {
        return Err(Error::InvalidParams("need at least 2 grid points".into()));
    }
    let min_pos = distances.iter().copied().filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min);
    let max = distances.iter().copied().fold(0.0f64, f64::max);
    if !min_pos.is_finite() || max <= 0.0 {
        return Err(Error::InvalidParams("all distances are zero".into()));
    }
    let lo = (min_pos / 2.0).ln();
    let hi = (2.0 * max).ln();
    Ok((0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

/// Fit report for the log-log slope of the correlation sum.
#[derive(Debug, Clone, Serialize)]
pub struct FractalFit {
    pub d_f: f64,
    pub stderr: f64,
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub points: usize,
}

/// Least-squares slope of ln C(ε) vs ln ε over grid points inside
/// [fit_lo, fit_hi]; points with C = 0 are dropped.
pub fn fractal_dimension(
    epsilons: &[f64],
    c: &[f64],
    fit_lo: f64,
    fit_hi: f64,
) -> Result<FractalFit> {
    if epsilons.len() != c.len() {
        return Err(Error::LengthMismatch { left: epsilons.len(), right: c.len() });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (&e, &ci) in epsilons.iter().zip(c) {
        if e >= fit_lo && e <= fit_hi && ci > 0.0 {
            x.push(e.ln());
            y.push(ci.ln());
        }
    }
    if x.len() < 3 {
        return Err(Error::InsufficientFitPoints { found: x.len() });
    }
    let (slope, _, stderr) = numeric::ols_fit(&x, &y);
    Ok(FractalFit { d_f: slope, stderr, fit_lo, fit_hi, points: x.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Tick;
    use crate::maps::Channel;
    use approx::assert_relative_eq;

    fn state(vals: &[f64]) -> StringState {
        StringState { tau: 0, values: vals.to_vec() }
    }

    #[test]
    fn latch_semantics() {
        let mut pair = PolarizedPair::new(2);
        polarize_step(&mut pair, &state(&[0.0, 1.0, 0.0]), 1.0, 1.2);
        assert!(pair.plus_warm() && !pair.minus_warm());
        assert_eq!(pair.plus(), &[0.0, 1.0, 0.0]);
        polarize_step(&mut pair, &state(&[0.0, 2.0, 0.0]), 1.3, 1.1);
        assert!(pair.warm());
        assert_eq!(pair.minus(), &[0.0, 2.0, 0.0]);
        // plus unchanged by a non-buy update.
        assert_eq!(pair.plus(), &[0.0, 1.0, 0.0]);
        // Tie counts as a buy.
        polarize_step(&mut pair, &state(&[0.0, 3.0, 0.0]), 1.5, 1.5);
        assert_eq!(pair.plus(), &[0.0, 3.0, 0.0]);
    }

    #[test]
    fn rising_market_never_warms_minus() {
        let ticks: Vec<Tick> = (0..50)
            .map(|i| {
                let p = 1.0 + 0.01 * i as f64;
                Tick { t_ms: i as i64 * 1000, ask: p, bid: p }
            })
            .collect();
        let s = TickSeries::new("X", ticks).unwrap();
        let cfg = StringConfig::new(Topology::TwoEnd, 1.0, 10);
        let run = polarization_run(&s, &cfg, 1).unwrap();
        assert_eq!(run.warm_windows, 0);
        assert!(matches!(polarization_measure(&run), Err(Error::NoQualifyingWindows)));
    }

    #[test]
    fn g_zero_for_identical_branches_and_one_for_one_sided() {
        let plus = [0.0, 0.5, -0.25, 0.0];
        let minus_same = plus;
        let num: f64 = plus.iter().zip(&minus_same).map(|(a, b)| (a - b).abs()).sum();
        assert_eq!(num, 0.0);

        // minus all-zero, plus nonzero: ratio is 1.
        let minus0 = [0.0; 4];
        let num: f64 = plus.iter().zip(&minus0).map(|(a, b)| (a - b).abs()).sum();
        let den: f64 = plus.iter().zip(&minus0).map(|(a, b)| (a + b).abs()).sum();
        assert_eq!(num / den, 1.0);
    }

    #[test]
    fn polarization_run_on_alternating_series() {
        // Prices swing so buys and non-buys alternate at l_s = 4.
        let ticks: Vec<Tick> = (0..200)
            .map(|i| {
                let p = 1.0 + 0.05 * ((i as f64) * 0.8).sin();
                Tick { t_ms: i as i64 * 1000, ask: p + 0.001, bid: p - 0.001 }
            })
            .collect();
        let s = TickSeries::new("X", ticks).unwrap();
        let mut cfg = StringConfig::new(Topology::TwoEnd, 2.0, 4);
        cfg.channel = Channel::Symmetric;
        let run = polarization_run(&s, &cfg, 1).unwrap();
        assert!(run.warm_windows > 100);
        let g = polarization_measure(&run).unwrap();
        assert!(g > 0.0, "distinct branches must polarize");
        assert_eq!(run.g_window.len(), run.distance.len());
        // distance = num / (l_s + 1) is consistent with g · den / (l_s + 1)
        for (d, g) in run.distance.iter().zip(&run.g_window) {
            assert!(*d >= 0.0 && *g >= 0.0);
        }
    }

    #[test]
    fn string_distance_examples() {
        let a = state(&[0.0, 1.0, 0.0]);
        let z = state(&[0.0, 0.0, 0.0]);
        assert_relative_eq!(string_distance(&a, &z).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(string_distance(&a, &a).unwrap(), 0.0);
        let short = state(&[0.0, 0.0]);
        assert!(matches!(
            string_distance(&a, &short),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn brane_distance_single_cell() {
        let mut a = BraneState::new(0, 2);
        let b = BraneState::new(0, 2);
        a.set(1, 1, -0.6);
        assert_relative_eq!(brane_distance(&a, &b).unwrap(), 0.6 / 9.0, max_relative = 1e-15);
        assert_eq!(
            brane_distance(&a, &b).unwrap(),
            brane_distance(&b, &a).unwrap()
        );
        let c = BraneState::new(0, 3);
        assert!(matches!(brane_distance(&a, &c), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn correlation_sum_counting() {
        let d = [1.0, 2.0, 3.0];
        let raw = raw_correlation(&d, &[2.5]).unwrap();
        assert_relative_eq!(raw[0], 2.0 / 3.0, max_relative = 1e-15);
        // Threshold exactly at a distance counts it.
        let raw = raw_correlation(&d, &[2.0]).unwrap();
        assert_relative_eq!(raw[0], 2.0 / 3.0, max_relative = 1e-15);

        let eps: Vec<f64> = (1..=8).map(|i| i as f64 * 0.5).collect();
        let raw = raw_correlation(&d, &eps).unwrap();
        assert!(raw.windows(2).all(|w| w[1] >= w[0]), "raw counts are monotone");

        // Saturated counting: C is the constant 1/(ε span).
        let all_small = [0.1, 0.2];
        let eps = [1.0, 2.0, 3.0];
        let c = correlation_sum(&all_small, &eps).unwrap();
        for v in &c {
            assert_relative_eq!(*v, 0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn fractal_fit_exact_square_law() {
        let eps: Vec<f64> = (1..=40).map(|i| 1e-3 * 1.2f64.powi(i)).collect();
        let c: Vec<f64> = eps.iter().map(|e| 3.0 * e * e).collect();
        let fit = fractal_dimension(&eps, &c, eps[0], *eps.last().unwrap()).unwrap();
        assert!((fit.d_f - 2.0).abs() < 1e-9, "slope {}", fit.d_f);
        assert!(fit.stderr < 1e-9);
        assert_eq!(fit.points, 40);
    }

    #[test]
    fn fractal_fit_needs_points() {
        let eps = [1.0, 2.0, 4.0, 8.0];
        let c = [0.0, 0.0, 0.1, 0.2];
        assert!(matches!(
            fractal_dimension(&eps, &c, 1.0, 8.0),
            Err(Error::InsufficientFitPoints { found: 2 })
        ));
    }

    #[test]
    fn epsilon_grid_spans_distances() {
        let d = [1e-4, 5e-3, 2e-2];
        let grid = default_epsilon_grid(&d, 64).unwrap();
        assert_eq!(grid.len(), 64);
        assert_relative_eq!(grid[0], 5e-5, max_relative = 1e-12);
        assert_relative_eq!(grid[63], 4e-2, max_relative = 1e-12);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }
}
