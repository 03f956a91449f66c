//! Unconditioned statistics over sliding string windows: midpoint sweeps,
//! moments, volatility coupling, intra-string profiles, Fourier modes, and
//! the analytic reference formulas the tests check against.
//!
//! All aggregations reduce through `numeric`, so results are deterministic
//! for any rayon thread count.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{mean_window_time, TickSeries};
use crate::maps::{
    homotopy_value, one_end_channel_value, spread_adjusted_channel_value, string_multiscale,
    string_multiscale_dual, two_end_channel_value, Channel, StringConfig, StringState, Topology,
};
use crate::numeric;

/// Price columns a sweep needs; borrowed views over one series.
pub struct Columns<'a> {
    pub ask: &'a [f64],
    pub bid: &'a [f64],
    pub mid: &'a [f64],
}

impl<'a> Columns<'a> {
    pub fn len(&self) -> usize {
        self.mid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mid.is_empty()
    }
}

/// Scalar map value at one (tau, h) for the configured topology and channel,
/// with the string length overridden by `l_s` (sweeps vary it).
pub fn window_value(cols: &Columns, cfg: &StringConfig, tau: usize, l_s: usize, h: usize) -> f64 {
    match cfg.topology {
        Topology::OneEnd => one_end_channel_value(cols.mid, tau, h, cfg.q, cfg.channel),
        Topology::TwoEnd => two_end_channel_value(cols.mid, tau, h, l_s, cfg.q, cfg.channel),
        Topology::Homotopy => {
            homotopy_value(cols.mid, tau, h, l_s, cfg.eta, cfg.q, cfg.q2(), cfg.channel)
        }
        Topology::SpreadAdjusted => {
            spread_adjusted_channel_value(cols.ask, cols.bid, cols.mid, tau, h, l_s, cfg.q, cfg.channel)
        }
        // Multi-scale keeps its configured node set; the swept length only
        // moves the midpoint and the window span.
        Topology::MultiScale => {
            let plain = string_multiscale(cols.mid, tau, &cfg.scales, cfg.q, h)
                .expect("window span checked by caller");
            match cfg.channel {
                Channel::Plain => plain,
                Channel::Symmetric | Channel::Antisymmetric => {
                    let dual = string_multiscale_dual(cols.mid, tau, &cfg.scales, cfg.q, h)
                        .expect("window span checked by caller");
                    if cfg.channel == Channel::Symmetric {
                        0.5 * (plain + dual)
                    } else {
                        0.5 * (plain - dual)
                    }
                }
            }
        }
    }
}

/// Ticks past `tau` a single window evaluation touches.
pub fn window_span(cfg: &StringConfig, l_s: usize) -> usize {
    match cfg.topology {
        Topology::MultiScale => l_s.max(cfg.scales.last().copied().unwrap_or(0)),
        _ => l_s,
    }
}

fn window_count(len: usize, span: usize, stride: usize) -> Option<usize> {
    if len <= span || stride == 0 {
        return None;
    }
    Some((len - 1 - span) / stride + 1)
}

/// Per-length midpoint statistics.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub lengths: Vec<usize>,
    /// Mean wall-clock span T(l_s) of each window, seconds.
    pub real_time_s: Vec<f64>,
    pub mean: Vec<f64>,
    pub dispersion: Vec<f64>,
    pub sample_count: Vec<usize>,
    /// Lengths skipped because the series was too short.
    pub skipped: Vec<usize>,
}

/// Slides windows of each requested length by `stride`, evaluating the map
/// at the midpoint h = floor(l_s / 2); aggregates mean and population
/// dispersion per length. Lengths the series cannot host are skipped.
pub fn midpoint_sweep(
    series: &TickSeries,
    lengths: &[usize],
    cfg: &StringConfig,
    stride: usize,
) -> Result<SweepResult> {
    cfg.validate()?;
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be >= 1".into()));
    }
    let mid = series.mids();
    let cols = Columns { ask: &series.ask, bid: &series.bid, mid: &mid };
    let mut out = SweepResult {
        lengths: Vec::new(),
        real_time_s: Vec::new(),
        mean: Vec::new(),
        dispersion: Vec::new(),
        sample_count: Vec::new(),
        skipped: Vec::new(),
    };
    for &l_s in lengths {
        let span = window_span(cfg, l_s);
        let Some(n) = window_count(cols.len(), span, stride) else {
            out.skipped.push(l_s);
            continue;
        };
        let h = l_s / 2;
        let (mean, disp) =
            numeric::mean_dispersion_indexed(n, |w| window_value(&cols, cfg, w * stride, l_s, h));
        out.lengths.push(l_s);
        out.real_time_s.push(mean_window_time(series, l_s)?);
        out.mean.push(mean);
        out.dispersion.push(disp);
        out.sample_count.push(n);
    }
    if out.lengths.is_empty() {
        return Err(Error::SeriesTooShort {
            needed: lengths.iter().copied().min().unwrap_or(0) + 1,
            len: series.len(),
        });
    }
    Ok(out)
}

/// Moment of order ξ at the half length: ⟨ |P(τ, l_s/2)|^(ξ/q) ⟩.
pub fn midpoint_moments(
    series: &TickSeries,
    cfg: &StringConfig,
    xi: f64,
    stride: usize,
) -> Result<f64> {
    cfg.validate()?;
    if !(xi > 0.0) {
        return Err(Error::InvalidParams(format!("xi must be > 0, got {xi}")));
    }
    let mid = series.mids();
    let cols = Columns { ask: &series.ask, bid: &series.bid, mid: &mid };
    let span = window_span(cfg, cfg.l_s);
    let n = window_count(cols.len(), span, stride)
        .ok_or(Error::SeriesTooShort { needed: span + 1, len: series.len() })?;
    let h = cfg.l_s / 2;
    let expo = xi / cfg.q;
    let total = numeric::sum_indexed(n, |w| {
        window_value(&cols, cfg, w * stride, cfg.l_s, h).abs().powf(expo)
    });
    Ok(total / n as f64)
}

/// Return volatility over the window `tau..=tau+len`: σ_r = sqrt(r₂ − r₁²)
/// with r_m the literal sums Σ_{h=1..len} [(p(τ+h) − p(τ+h−1)) / p(τ+h)]^m.
/// The literal sums make r₁² > r₂ possible on strongly trending windows;
/// the discriminant is clamped at zero.
pub fn return_volatility(p: &[f64], tau: usize, len: usize) -> f64 {
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for h in 1..=len {
        let r = (p[tau + h] - p[tau + h - 1]) / p[tau + h];
        r1 += r;
        r2 += r * r;
    }
    (r2 - r1 * r1).max(0.0).sqrt()
}

/// One (σ_r, P(τ, l_s/2)) pair per window, for external scatter plotting.
/// The volatility is measured at the half-length scale L = floor(l_s/2).
pub fn volatility_amplitude_scatter(
    series: &TickSeries,
    cfg: &StringConfig,
    stride: usize,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let mid = series.mids();
    let cols = Columns { ask: &series.ask, bid: &series.bid, mid: &mid };
    let span = window_span(cfg, cfg.l_s);
    let n = window_count(cols.len(), span, stride)
        .ok_or(Error::SeriesTooShort { needed: span + 1, len: series.len() })?;
    let h = cfg.l_s / 2;
    Ok((0..n)
        .map(|w| {
            let tau = w * stride;
            (return_volatility(&mid, tau, h), window_value(&cols, cfg, tau, cfg.l_s, h))
        })
        .collect())
}

/// Per-h mean and dispersion over windows.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileResult {
    pub l_s: usize,
    pub mean: Vec<f64>,
    pub dispersion: Vec<f64>,
    pub sample_count: usize,
}

/// Intra-string statistics: mean and population dispersion of P(τ, h) over
/// windows, per h. An optional predicate on the window start restricts the
/// aggregate (e.g. to windows where the buy at τ closes profitably).
pub fn intra_string_profile(
    series: &TickSeries,
    cfg: &StringConfig,
    stride: usize,
    condition: Option<&(dyn Fn(usize) -> bool + Sync)>,
) -> Result<ProfileResult> {
    cfg.validate()?;
    let mid = series.mids();
    let cols = Columns { ask: &series.ask, bid: &series.bid, mid: &mid };
    let span = window_span(cfg, cfg.l_s);
    let n = window_count(cols.len(), span, stride)
        .ok_or(Error::SeriesTooShort { needed: span + 1, len: series.len() })?;
    let taus: Vec<usize> = (0..n)
        .map(|w| w * stride)
        .filter(|&tau| condition.map_or(true, |c| c(tau)))
        .collect();
    if taus.is_empty() {
        return Err(Error::NoQualifyingWindows);
    }
    let dim = cfg.l_s + 1;
    let count = taus.len() as f64;
    let sums = numeric::sum_vec_indexed(taus.len(), dim, |i, scratch| {
        let tau = taus[i];
        for (h, slot) in scratch.iter_mut().enumerate() {
            *slot = window_value(&cols, cfg, tau, cfg.l_s, h);
        }
    });
    let mean: Vec<f64> = sums.iter().map(|s| s / count).collect();
    let mean_ref = &mean;
    let sq = numeric::sum_vec_indexed(taus.len(), dim, |i, scratch| {
        let tau = taus[i];
        for (h, slot) in scratch.iter_mut().enumerate() {
            let d = window_value(&cols, cfg, tau, cfg.l_s, h) - mean_ref[h];
            *slot = d * d;
        }
    });
    let dispersion = sq.iter().map(|s| (s / count).max(0.0).sqrt()).collect();
    Ok(ProfileResult { l_s: cfg.l_s, mean, dispersion, sample_count: taus.len() })
}

/// The buy predicate used throughout: bid at window close covers the ask at
/// the open, p_bid(τ+l_s) ≥ p_ask(τ).
pub fn buy_condition<'a>(series: &'a TickSeries, l_s: usize) -> impl Fn(usize) -> bool + Sync + 'a {
    move |tau: usize| series.bid[tau + l_s] >= series.ask[tau]
}

/// Mean of the 1-end map under Gaussian log-slope fluctuations b ~ N(0, σ_b²):
/// E[1 − e^(−hb)] = 1 − e^(h²σ_b²/2).
pub fn gaussian_mean_1end(h: usize, sigma_b: f64) -> f64 {
    let hs = h as f64 * sigma_b;
    1.0 - (hs * hs / 2.0).exp()
}

/// Mean of the 2-end map under the same weight:
/// 1 − e^(h²σ²/2) − e^((h−l_s)²σ²/2) + e^(l_s²σ²/2). Zero at h = 0 exactly.
pub fn gaussian_mean_2end(h: usize, l_s: usize, sigma_b: f64) -> f64 {
    let hs = h as f64 * sigma_b;
    let rs = (h as f64 - l_s as f64) * sigma_b;
    let ls = l_s as f64 * sigma_b;
    1.0 - (hs * hs / 2.0).exp() - (rs * rs / 2.0).exp() + (ls * ls / 2.0).exp()
}

/// Forward DFT of a string: P_DFT(k) = Σ_h P(h)·e^(−2πikh/N), N = l_s + 1,
/// k = 0..=l_s. Direct evaluation with a precomputed twiddle table.
pub fn dft_modes(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let table = twiddles(n, -1.0);
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (h, &v) in values.iter().enumerate() {
                acc += v * table[(k * h) % n];
            }
            acc
        })
        .collect()
}

/// Inverse transform with the 1/N normalization, so `idft(dft(p)) = p`:
/// P(h) = (1/N)·Σ_k P_DFT(k)·e^(+2πikh/N). Returns the real part; the
/// imaginary part of a roundtrip is rounding noise.
pub fn idft_modes(modes: &[Complex64]) -> Vec<f64> {
    let n = modes.len();
    let table = twiddles(n, 1.0);
    let norm = 1.0 / n as f64;
    (0..n)
        .map(|h| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, m) in modes.iter().enumerate() {
                acc += m * table[(k * h) % n];
            }
            acc.re * norm
        })
        .collect()
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let ang = sign * 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect()
}

/// Temporal averages of the slow Fourier modes over sliding windows.
#[derive(Debug, Clone, Serialize)]
pub struct MeanModes {
    pub k_max: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub sample_count: usize,
}

/// Averages P_DFT(k, τ) over window starts for k = 0..=k_max (the paper's
/// slow-mode cut is k ≤ 14). Only the requested modes are evaluated.
pub fn mean_fourier_modes(
    series: &TickSeries,
    cfg: &StringConfig,
    stride: usize,
    k_max: usize,
) -> Result<MeanModes> {
    cfg.validate()?;
    let mid = series.mids();
    let cols = Columns { ask: &series.ask, bid: &series.bid, mid: &mid };
    let span = window_span(cfg, cfg.l_s);
    let n_win = window_count(cols.len(), span, stride)
        .ok_or(Error::SeriesTooShort { needed: span + 1, len: series.len() })?;
    let n = cfg.l_s + 1;
    let k_max = k_max.min(cfg.l_s);
    let table = twiddles(n, -1.0);
    let dim = 2 * (k_max + 1);
    let sums = numeric::sum_vec_indexed(n_win, dim, |w, scratch| {
        let tau = w * stride;
        let string: Vec<f64> = (0..n).map(|h| window_value(&cols, cfg, tau, cfg.l_s, h)).collect();
        for k in 0..=k_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for (h, &v) in string.iter().enumerate() {
                acc += v * table[(k * h) % n];
            }
            scratch[2 * k] = acc.re;
            scratch[2 * k + 1] = acc.im;
        }
    });
    let count = n_win as f64;
    let re = (0..=k_max).map(|k| sums[2 * k] / count).collect();
    let im = (0..=k_max).map(|k| sums[2 * k + 1] / count).collect();
    Ok(MeanModes { k_max, re, im, sample_count: n_win })
}

/// Closed forms of both maps on the log-linear input ln p = ln p₀ + bτ:
/// P¹(h) = 1 − e^(−hb), P²(h) = (1 − e^(−hb))(1 − e^((h−l_s)b)), independent
/// of τ. Computed via expm1 so small-h values keep full relative precision.
pub fn exp_invariant_reference(b: f64, l_s: usize, h: usize) -> (f64, f64) {
    let p1 = -f64::exp_m1(-(h as f64) * b);
    let p2 = f64::exp_m1(-(h as f64) * b) * f64::exp_m1((h as f64 - l_s as f64) * b);
    (p1, p2)
}

/// Convenience: full reference state of the 2-end map on log-linear input.
pub fn exp_invariant_two_end(b: f64, l_s: usize) -> StringState {
    let values = (0..=l_s).map(|h| exp_invariant_reference(b, l_s, h).1).collect();
    StringState { tau: 0, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Tick;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn series_from_mids(mids: &[f64]) -> TickSeries {
        let ticks: Vec<Tick> = mids
            .iter()
            .enumerate()
            .map(|(i, &p)| Tick { t_ms: i as i64 * 1000, ask: p, bid: p })
            .collect();
        TickSeries::new("TEST", ticks).unwrap()
    }

    fn lnlinear(b: f64, n: usize) -> TickSeries {
        let mids: Vec<f64> = (0..n).map(|i| (b * i as f64).exp()).collect();
        series_from_mids(&mids)
    }

    #[test]
    fn sweep_constant_is_zero() {
        let s = series_from_mids(&vec![1.5; 500]);
        let cfg = StringConfig::new(Topology::TwoEnd, 6.0, 2);
        let r = midpoint_sweep(&s, &[10, 50, 100], &cfg, 1).unwrap();
        assert_eq!(r.lengths, vec![10, 50, 100]);
        assert!(r.mean.iter().all(|&m| m == 0.0));
        assert!(r.dispersion.iter().all(|&d| d == 0.0));
        assert_eq!(r.sample_count[0], 490);
        // Uniform 1 s ticks: T(l_s) = l_s seconds.
        assert_eq!(r.real_time_s, vec![10.0, 50.0, 100.0]);
    }

    #[test]
    fn sweep_lnlinear_matches_closed_form() {
        let b = 0.002;
        let s = lnlinear(b, 400);
        let cfg = StringConfig::new(Topology::TwoEnd, 1.0, 2);
        let r = midpoint_sweep(&s, &[100], &cfg, 1).unwrap();
        let (_, p2) = exp_invariant_reference(b, 100, 50);
        assert_relative_eq!(r.mean[0], p2, max_relative = 1e-12);
        assert!(r.dispersion[0] < 1e-13, "τ-invariant map: dispersion {}", r.dispersion[0]);
    }

    #[test]
    fn sweep_skips_short_lengths() {
        let s = series_from_mids(&vec![1.0; 50]);
        let cfg = StringConfig::new(Topology::TwoEnd, 1.0, 2);
        let r = midpoint_sweep(&s, &[10, 100], &cfg, 1).unwrap();
        assert_eq!(r.lengths, vec![10]);
        assert_eq!(r.skipped, vec![100]);
        assert!(matches!(
            midpoint_sweep(&s, &[100], &cfg, 1),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn resonance_structure_on_cosine() {
        // p = 1 + 0.01 cos(0.02 τ): period 314.16. The midpoint mean is
        // large at the one-period window (opposite-sign half-trends) and
        // suppressed at one-and-a-half periods, where the perturbative
        // bracket vanishes for every h.
        let om = 0.02;
        let n = 200_000;
        let mids: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (om * i as f64).cos()).collect();
        let s = series_from_mids(&mids);
        let one_period = (2.0 * std::f64::consts::PI / om).round() as usize; // 314
        let one_and_half = (3.0 * std::f64::consts::PI / om).round() as usize; // 471
        let mut cfg = StringConfig::new(Topology::TwoEnd, 1.0, 2);
        cfg.channel = Channel::Symmetric;
        let r = midpoint_sweep(&s, &[one_period, one_and_half], &cfg, 1).unwrap();
        let (m_res, m_anti) = (r.mean[0].abs(), r.mean[1].abs());
        assert!(
            m_anti < 0.5 * m_res,
            "anti-resonant mean {m_anti} should be far below resonant {m_res}"
        );
        assert_relative_eq!(r.mean[0], -2.0e-4, max_relative = 0.02);
    }

    #[test]
    fn antisymmetric_mean_vanishes_on_cosine() {
        let om = 0.02;
        let n = 100_000;
        let mids: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (om * i as f64).cos()).collect();
        let s = series_from_mids(&mids);
        let mut cfg = StringConfig::new(Topology::TwoEnd, 1.0, 314);
        cfg.channel = Channel::Antisymmetric;
        let mid = s.mids();
        let cols = Columns { ask: &s.ask, bid: &s.bid, mid: &mid };
        let vals: Vec<f64> =
            (0..n - 314).map(|tau| window_value(&cols, &cfg, tau, 314, 157)).collect();
        let (mean, se) = numeric::batch_mean_se(&vals, 100);
        assert!(mean.abs() <= 3.0 * se, "antisymmetric mean {mean} exceeds 3·SE {se}");
    }

    #[test]
    fn moments_basic() {
        let s = series_from_mids(&vec![2.0; 300]);
        let cfg = StringConfig::new(Topology::TwoEnd, 6.0, 100);
        assert_eq!(midpoint_moments(&s, &cfg, 6.0, 1).unwrap(), 0.0);

        // ξ = q reduces to the mean absolute q=1 amplitude: check against a
        // direct computation on a wavy series.
        let mids: Vec<f64> = (0..300).map(|i| 1.0 + 0.01 * ((i as f64) * 0.2).sin()).collect();
        let s = series_from_mids(&mids);
        let cfg6 = StringConfig::new(Topology::TwoEnd, 6.0, 50);
        let cfg1 = StringConfig::new(Topology::TwoEnd, 1.0, 50);
        let mu6 = midpoint_moments(&s, &cfg6, 6.0, 1).unwrap();
        let mu1 = midpoint_moments(&s, &cfg1, 1.0, 1).unwrap();
        assert_relative_eq!(mu6, mu1, max_relative = 1e-12);
    }

    #[test]
    fn volatility_examples() {
        assert_eq!(return_volatility(&[1.0; 10], 0, 4), 0.0);
        // Alternating 1.0/1.1 over a 2-step window: σ_r = sqrt(1/55).
        let p = [1.0, 1.1, 1.0];
        let sigma = return_volatility(&p, 0, 2);
        assert_relative_eq!(sigma, (1.0f64 / 55.0).sqrt(), max_relative = 1e-14);
        // Strong monotone trend: the literal sums give r₁² > r₂; clamped to 0.
        let trend: Vec<f64> = (0..20).map(|i| (0.01 * i as f64).exp()).collect();
        assert_eq!(return_volatility(&trend, 0, 10), 0.0);
    }

    #[test]
    fn scatter_pairs_and_deformation_relation() {
        let mids: Vec<f64> = (0..400).map(|i| 1.0 + 0.02 * ((i as f64) * 0.13).sin()).collect();
        let s = series_from_mids(&mids);
        let cfg1 = StringConfig::new(Topology::TwoEnd, 1.0, 40);
        let cfg6 = StringConfig::new(Topology::TwoEnd, 6.0, 40);
        let s1 = volatility_amplitude_scatter(&s, &cfg1, 7).unwrap();
        let s6 = volatility_amplitude_scatter(&s, &cfg6, 7).unwrap();
        assert_eq!(s1.len(), s6.len());
        for ((v1, a1), (v6, a6)) in s1.iter().zip(&s6) {
            assert_eq!(v1, v6);
            assert_relative_eq!(a6.abs(), a1.abs().powi(6), max_relative = 1e-12);
            assert_eq!(a6.signum(), a1.signum());
        }
        let flat = series_from_mids(&vec![1.0; 100]);
        let pairs = volatility_amplitude_scatter(&flat, &cfg1, 1).unwrap();
        assert!(pairs.iter().all(|&(v, a)| v == 0.0 && a == 0.0));
    }

    #[test]
    fn profile_unconditioned_and_conditioned() {
        let flat = series_from_mids(&vec![1.0; 200]);
        let cfg = StringConfig::new(Topology::TwoEnd, 1.0, 20);
        let prof = intra_string_profile(&flat, &cfg, 1, None).unwrap();
        assert!(prof.mean.iter().all(|&m| m == 0.0));
        assert!(prof.dispersion.iter().all(|&d| d == 0.0));
        assert_eq!(prof.mean.len(), 21);

        // Condition never true -> NoQualifyingWindows.
        let never = |_tau: usize| false;
        assert!(matches!(
            intra_string_profile(&flat, &cfg, 1, Some(&never)),
            Err(Error::NoQualifyingWindows)
        ));

        // Dirichlet ends of the mean profile are exact zeros.
        let mids: Vec<f64> = (0..200).map(|i| 1.0 + 0.01 * ((i as f64) * 0.7).sin()).collect();
        let s = series_from_mids(&mids);
        let prof = intra_string_profile(&s, &cfg, 1, None).unwrap();
        assert_eq!(prof.mean[0], 0.0);
        assert_eq!(prof.mean[20], 0.0);
        assert!(prof.dispersion.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn buy_condition_is_inclusive() {
        let ticks = vec![
            Tick { t_ms: 0, ask: 1.0, bid: 1.0 },
            Tick { t_ms: 1000, ask: 1.0, bid: 1.0 },
            Tick { t_ms: 2000, ask: 1.0, bid: 1.0 },
        ];
        let s = TickSeries::new("X", ticks).unwrap();
        let cond = buy_condition(&s, 2);
        assert!(cond(0), "tie p_bid = p_ask counts as a buy");
    }

    #[test]
    fn gaussian_means_structure() {
        assert_eq!(gaussian_mean_1end(10, 0.0), 0.0);
        assert_eq!(gaussian_mean_2end(7, 100, 0.0), 0.0);
        assert_eq!(gaussian_mean_2end(0, 100, 0.01), 0.0);
        // Magnitude grows with h for the 1-end form.
        assert!(gaussian_mean_1end(20, 0.01).abs() > gaussian_mean_1end(10, 0.01).abs());
    }

    #[test]
    fn dft_roundtrip_and_zero_mode() {
        let vals: Vec<f64> = (0..101).map(|i| ((i as f64) * 0.37).sin()).collect();
        let modes = dft_modes(&vals);
        assert_relative_eq!(modes[0].re, vals.iter().sum::<f64>(), max_relative = 1e-12);
        assert_abs_diff_eq!(modes[0].im, 0.0, epsilon = 1e-12);
        let back = idft_modes(&modes);
        for (a, b) in vals.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        let zeros = dft_modes(&vec![0.0; 32]);
        assert!(zeros.iter().all(|m| m.norm() == 0.0));
    }

    #[test]
    fn mean_modes_conjugate_symmetry() {
        let mids: Vec<f64> = (0..300).map(|i| 1.0 + 0.01 * ((i as f64) * 0.11).cos()).collect();
        let s = series_from_mids(&mids);
        let cfg = StringConfig::new(Topology::TwoEnd, 1.0, 32);
        let full = mean_fourier_modes(&s, &cfg, 3, 32).unwrap();
        // Mean mode at k equals the conjugate of the mode at N − k.
        let n = 33;
        for k in 1..n {
            assert_abs_diff_eq!(full.re[k], full.re[n - k], epsilon = 1e-12);
            assert_abs_diff_eq!(full.im[k], -full.im[n - k], epsilon = 1e-12);
        }
        let constant = series_from_mids(&vec![1.0; 300]);
        let m = mean_fourier_modes(&constant, &cfg, 1, 14).unwrap();
        assert_eq!(m.k_max, 14);
        assert!(m.re.iter().all(|&x| x == 0.0));
        assert!(m.im.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn invariant_reference_values() {
        assert_eq!(exp_invariant_reference(0.0, 100, 17), (0.0, 0.0));
        let (p1, _) = exp_invariant_reference(0.01, 100, 10);
        assert_relative_eq!(p1, 0.09516258196404048, max_relative = 1e-14);
        // Small-b Taylor structure of the 2-end form.
        let b = 1e-5;
        let (_, p2) = exp_invariant_reference(b, 100, 30);
        assert_relative_eq!(p2, b * b * 30.0 * 70.0, max_relative = 1e-3);
    }
}
