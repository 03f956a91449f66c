//! Directional (Gâteaux) derivatives of the string maps along an auxiliary
//! series ψ, with a finite-difference verifier.
//!
//! The analytic forms are the q = 1 derivatives; general q is reachable
//! through the numeric path. All derivative maps vanish at the fixed string
//! ends; the boundary values are returned as exact zeros (the expressions
//! are identically zero there, while literal evaluation would leave ~1 ulp).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::GridSeries;
use crate::maps::{f_q, Topology};

/// Choice of the perturbing series ψ.
#[derive(Debug, Clone)]
pub enum PsiField {
    /// ψ = 1 everywhere, the benchmark setting.
    Unit,
    /// ψ(τ) = p_bid(τ) − p_ask(τ−lag); entries before `lag` are zero.
    SpreadLagged { lag: usize },
    /// ψ(τ) = amplitude · cos(2πτ / period).
    Periodic { period: f64, amplitude: f64 },
    /// A companion series (e.g. another currency on the same grid).
    SeriesDirected(Vec<f64>),
}

impl PsiField {
    /// Materializes ψ aligned index-by-index with a series of quotes.
    pub fn materialize(&self, ask: &[f64], bid: &[f64]) -> Result<Vec<f64>> {
        let n = ask.len();
        match self {
            PsiField::Unit => Ok(vec![1.0; n]),
            PsiField::SpreadLagged { lag } => Ok((0..n)
                .map(|tau| if tau >= *lag { bid[tau] - ask[tau - lag] } else { 0.0 })
                .collect()),
            PsiField::Periodic { period, amplitude } => {
                if !(*period > 0.0) {
                    return Err(Error::InvalidParams("period must be positive".into()));
                }
                let w = 2.0 * std::f64::consts::PI / period;
                Ok((0..n).map(|tau| amplitude * (w * tau as f64).cos()).collect())
            }
            PsiField::SeriesDirected(series) => {
                if series.len() < n {
                    return Err(Error::LengthMismatch { left: n, right: series.len() });
                }
                Ok(series[..n].to_vec())
            }
        }
    }
}

/// First derivative of the 1-end map (q = 1) in the direction ψ:
/// [p(τ)ψ(τ+h) − ψ(τ)p(τ+h)] / p(τ+h)². The single-fraction form makes the
/// h = 0 value an exact zero.
pub fn gateaux_d1_1end(p: &[f64], psi: &[f64], tau: usize, h: usize) -> f64 {
    let (p0, ph) = (p[tau], p[tau + h]);
    let (s0, sh) = (psi[tau], psi[tau + h]);
    (p0 * sh - s0 * ph) / (ph * ph)
}

/// First derivative of the 2-end map (q = 1): the three-term expression in
/// (ψ(τ), ψ(τ+h), ψ(τ+l_s)). Identically zero at both ends.
pub fn gateaux_d1_2end(p: &[f64], psi: &[f64], tau: usize, h: usize, l_s: usize) -> f64 {
    if h == 0 || h == l_s {
        return 0.0;
    }
    let (p0, ph, pl) = (p[tau], p[tau + h], p[tau + l_s]);
    let (s0, sh, sl) = (psi[tau], psi[tau + h], psi[tau + l_s]);
    s0 * (1.0 / pl - 1.0 / ph) + sh * (p0 / (ph * ph) - 1.0 / pl)
        + sl / (pl * pl) * (ph - p0)
}

/// Second derivative of the 1-end map (q = 1):
/// (2ψ(τ+h)/p²(τ+h)) · [ψ(τ) − p(τ)ψ(τ+h)/p(τ+h)].
pub fn gateaux_d2_1end(p: &[f64], psi: &[f64], tau: usize, h: usize) -> f64 {
    if h == 0 {
        return 0.0;
    }
    let (p0, ph) = (p[tau], p[tau + h]);
    let (s0, sh) = (psi[tau], psi[tau + h]);
    2.0 * sh / (ph * ph) * (s0 - p0 * sh / ph)
}

/// Second derivative of the 2-end map (q = 1): the three-term display with
/// the ψ²(τ+l_s) term. Identically zero at both ends.
pub fn gateaux_d2_2end(p: &[f64], psi: &[f64], tau: usize, h: usize, l_s: usize) -> f64 {
    if h == 0 || h == l_s {
        return 0.0;
    }
    let (p0, ph, pl) = (p[tau], p[tau + h], p[tau + l_s]);
    let (s0, sh, sl) = (psi[tau], psi[tau + h], psi[tau + l_s]);
    2.0 * sl / (pl * pl) * (sh - s0) + 2.0 * sh / (ph * ph) * (s0 - p0 * sh / ph)
        + 2.0 * sl * sl / (pl * pl * pl) * (p0 - ph)
}

/// Second derivative dispatched by map parentage.
pub fn gateaux_d2(
    kind: Topology,
    p: &[f64],
    psi: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
) -> Result<f64> {
    match kind {
        Topology::OneEnd => Ok(gateaux_d2_1end(p, psi, tau, h)),
        Topology::TwoEnd => Ok(gateaux_d2_2end(p, psi, tau, h, l_s)),
        other => Err(Error::InvalidParams(format!(
            "gateaux derivatives are defined for OneEnd/TwoEnd, got {other:?}"
        ))),
    }
}

fn perturbed_value(
    kind: Topology,
    p: &[f64],
    psi: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    q: f64,
    eps: f64,
) -> f64 {
    let at = |i: usize| p[i] + eps * psi[i];
    match kind {
        Topology::OneEnd => {
            let (p0, ph) = (at(tau), at(tau + h));
            f_q((ph - p0) / ph, q)
        }
        _ => {
            let (p0, ph, pl) = (at(tau), at(tau + h), at(tau + l_s));
            f_q(((ph - p0) / ph) * ((pl - ph) / pl), q)
        }
    }
}

/// Central finite difference of order `m` ∈ {1, 2} in the direction ψ, for
/// any q. The default steps for the verifier are chosen so truncation, not
/// rounding, dominates: 1e−4·scale for m = 1, 3e−3·scale for m = 2.
pub fn numeric_gateaux(
    kind: Topology,
    order: u8,
    p: &[f64],
    psi: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    q: f64,
    eps: f64,
) -> Result<f64> {
    if !matches!(kind, Topology::OneEnd | Topology::TwoEnd) {
        return Err(Error::InvalidParams("numeric gateaux: OneEnd/TwoEnd only".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParams("eps must be positive".into()));
    }
    let plus = perturbed_value(kind, p, psi, tau, h, l_s, q, eps);
    let minus = perturbed_value(kind, p, psi, tau, h, l_s, q, -eps);
    match order {
        1 => Ok((plus - minus) / (2.0 * eps)),
        2 => {
            let center = perturbed_value(kind, p, psi, tau, h, l_s, q, 0.0);
            Ok((plus - 2.0 * center + minus) / (eps * eps))
        }
        other => Err(Error::InvalidParams(format!("derivative order {other} not supported"))),
    }
}

/// One analytic-vs-numeric comparison with an ε-halving order estimate.
#[derive(Debug, Clone, Serialize)]
pub struct GateauxVerification {
    pub analytic: f64,
    pub numeric: f64,
    pub err: f64,
    pub err_half: f64,
    /// log2(err / err_half); ~2 for a clean central difference. Infinite
    /// when both errors sit at rounding level.
    pub observed_order: f64,
}

/// Compares the q = 1 analytic derivative against central differences at
/// ε and ε/2.
pub fn verify_gateaux(
    kind: Topology,
    order: u8,
    p: &[f64],
    psi: &[f64],
    tau: usize,
    h: usize,
    l_s: usize,
    eps: f64,
) -> Result<GateauxVerification> {
    let analytic = match (kind, order) {
        (Topology::OneEnd, 1) => gateaux_d1_1end(p, psi, tau, h),
        (Topology::TwoEnd, 1) => gateaux_d1_2end(p, psi, tau, h, l_s),
        (Topology::OneEnd, 2) => gateaux_d2_1end(p, psi, tau, h),
        (Topology::TwoEnd, 2) => gateaux_d2_2end(p, psi, tau, h, l_s),
        _ => {
            return Err(Error::InvalidParams(
                "verify_gateaux: OneEnd/TwoEnd, order 1 or 2".into(),
            ))
        }
    };
    let num = numeric_gateaux(kind, order, p, psi, tau, h, l_s, 1.0, eps)?;
    let num_half = numeric_gateaux(kind, order, p, psi, tau, h, l_s, 1.0, eps / 2.0)?;
    let err = (num - analytic).abs();
    let err_half = (num_half - analytic).abs();
    let floor = 1e-13 * analytic.abs().max(1.0);
    let observed_order = if err_half <= floor {
        f64::INFINITY
    } else {
        (err / err_half).log2()
    };
    Ok(GateauxVerification { analytic, numeric: num, err, err_half, observed_order })
}

/// Midpoint time series of dP¹⁾²({p}; {ψ})(t, l_s/2) for two currencies on a
/// shared grid: `p` from the first series, ψ from the second.
pub fn cross_currency_gateaux(
    a: &GridSeries,
    b: &GridSeries,
    l_s: usize,
    stride: usize,
) -> Result<Vec<(i64, f64)>> {
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be >= 1".into()));
    }
    if a.step_ms != b.step_ms {
        return Err(Error::GridMismatch(format!(
            "steps differ: {} ms vs {} ms",
            a.step_ms, b.step_ms
        )));
    }
    let start = a.t_ms[0].max(b.t_ms[0]);
    let end = (*a.t_ms.last().unwrap()).min(*b.t_ms.last().unwrap());
    if start > end {
        return Err(Error::GridMismatch("no overlapping time range".into()));
    }
    if (start - a.t_ms[0]) % a.step_ms != 0 || (start - b.t_ms[0]) % b.step_ms != 0 {
        return Err(Error::GridMismatch("grids are phase-shifted".into()));
    }
    let oa = ((start - a.t_ms[0]) / a.step_ms) as usize;
    let ob = ((start - b.t_ms[0]) / b.step_ms) as usize;
    let common = ((end - start) / a.step_ms) as usize + 1;
    if common <= l_s {
        return Err(Error::SeriesTooShort { needed: l_s + 1, len: common });
    }
    let p = a.mids();
    let psi = b.mids();
    let h = l_s / 2;
    let n = (common - 1 - l_s) / stride + 1;
    Ok((0..n)
        .map(|w| {
            let i = w * stride;
            // Evaluate with both windows re-based so ψ indices line up with p.
            let val = gateaux_d1_2end_offset(&p, oa + i, &psi, ob + i, h, l_s);
            (a.t_ms[oa + i], val)
        })
        .collect())
}

fn gateaux_d1_2end_offset(
    p: &[f64],
    tau_p: usize,
    psi: &[f64],
    tau_psi: usize,
    h: usize,
    l_s: usize,
) -> f64 {
    if h == 0 || h == l_s {
        return 0.0;
    }
    let (p0, ph, pl) = (p[tau_p], p[tau_p + h], p[tau_p + l_s]);
    let (s0, sh, sl) = (psi[tau_psi], psi[tau_psi + h], psi[tau_psi + l_s]);
    s0 * (1.0 / pl - 1.0 / ph) + sh * (p0 / (ph * ph) - 1.0 / pl)
        + sl / (pl * pl) * (ph - p0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{one_end_value, two_end_value};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn wavy(n: usize, phase: f64, scale: f64) -> Vec<f64> {
        (0..n).map(|i| scale * (1.0 + 0.1 * ((i as f64) * 0.47 + phase).sin())).collect()
    }

    #[test]
    fn boundary_values_are_exact_zeros() {
        let p = wavy(30, 0.0, 1.3);
        let psi = wavy(30, 2.1, 0.8);
        for tau in [0usize, 3, 7] {
            assert_eq!(gateaux_d1_1end(&p, &psi, tau, 0), 0.0);
            assert_eq!(gateaux_d1_2end(&p, &psi, tau, 0, 20), 0.0);
            assert_eq!(gateaux_d1_2end(&p, &psi, tau, 20, 20), 0.0);
            assert_eq!(gateaux_d2_1end(&p, &psi, tau, 0), 0.0);
            assert_eq!(gateaux_d2_2end(&p, &psi, tau, 0, 20), 0.0);
            assert_eq!(gateaux_d2_2end(&p, &psi, tau, 20, 20), 0.0);
        }
    }

    #[test]
    fn psi_unit_identities() {
        let p = wavy(40, 0.3, 1.2);
        let ones = vec![1.0; 40];
        // dP¹|ψ=1 = −P¹(τ,h) / p(τ+h).
        for h in 1..10 {
            let got = gateaux_d1_1end(&p, &ones, 2, h);
            let expect = -one_end_value(&p, 2, h, 1.0) / p[2 + h];
            assert_relative_eq!(got, expect, max_relative = 1e-12);
        }
        // dP²|ψ=1 = −(1/p(τ+h) + 1/p(τ+l_s)) · P²(τ,h); the derivative of the
        // three-term display carries the minus sign (uniform price shifts
        // shrink relative returns).
        let l_s = 16;
        for h in 1..l_s {
            let got = gateaux_d1_2end(&p, &ones, 2, h, l_s);
            let expect =
                -(1.0 / p[2 + h] + 1.0 / p[2 + l_s]) * two_end_value(&p, 2, h, l_s, 1.0);
            assert_relative_eq!(got, expect, max_relative = 1e-11);
        }
    }

    #[test]
    fn psi_zero_second_order_vanishes() {
        let p = wavy(30, 0.0, 1.0);
        let zeros = vec![0.0; 30];
        for h in 0..=12 {
            assert_eq!(gateaux_d2_1end(&p, &zeros, 4, h), 0.0);
            assert_eq!(gateaux_d2_2end(&p, &zeros, 4, h, 12), 0.0);
        }
    }

    #[test]
    fn finite_difference_agreement() {
        let p = wavy(50, 1.0, 1.4);
        let psi = wavy(50, 0.2, 0.6);
        for (kind, order, eps) in [
            (Topology::OneEnd, 1u8, 1e-4),
            (Topology::TwoEnd, 1, 1e-4),
            (Topology::OneEnd, 2, 3e-3),
            (Topology::TwoEnd, 2, 3e-3),
        ] {
            for h in [1usize, 7, 14] {
                let v = verify_gateaux(kind, order, &p, &psi, 3, h, 15, eps).unwrap();
                assert!(
                    v.err <= 1e-5 * v.analytic.abs().max(1.0),
                    "{kind:?} d{order} h={h}: err {} too large",
                    v.err
                );
                assert!(
                    v.observed_order >= 1.9,
                    "{kind:?} d{order} h={h}: order {}",
                    v.observed_order
                );
            }
        }
    }

    #[test]
    fn scale_invariance_direction_p() {
        // P² is homogeneous of degree 0 in p, so dP²({p}; {p}) = 0.
        let p = wavy(40, 0.9, 1.1);
        for h in 1..20 {
            let v = gateaux_d1_2end(&p, &p, 1, h, 20);
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn psi_field_materialization() {
        let ask = vec![1.2, 1.3, 1.4, 1.5];
        let bid = vec![1.1, 1.2, 1.3, 1.4];
        assert_eq!(PsiField::Unit.materialize(&ask, &bid).unwrap(), vec![1.0; 4]);
        let lagged = PsiField::SpreadLagged { lag: 2 }.materialize(&ask, &bid).unwrap();
        assert_eq!(lagged[0], 0.0);
        assert_eq!(lagged[1], 0.0);
        assert_relative_eq!(lagged[2], bid[2] - ask[0], max_relative = 1e-15);
        let per = PsiField::Periodic { period: 4.0, amplitude: 2.0 }
            .materialize(&ask, &bid)
            .unwrap();
        assert_relative_eq!(per[0], 2.0, max_relative = 1e-15);
        assert_abs_diff_eq!(per[1], 0.0, epsilon = 1e-12);
        let short = PsiField::SeriesDirected(vec![1.0, 2.0]);
        assert!(matches!(
            short.materialize(&ask, &bid),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn cross_currency_series_on_grids() {
        let step = 10_000i64;
        let n = 80;
        let mk = |phase: f64| GridSeries {
            pair: "X".into(),
            step_ms: step,
            t_ms: (0..n).map(|i| i as i64 * step).collect(),
            ask: wavy(n, phase, 1.3),
            bid: wavy(n, phase, 1.3),
        };
        let a = mk(0.0);
        let b = mk(1.7);
        let series = cross_currency_gateaux(&a, &b, 20, 2).unwrap();
        assert!(!series.is_empty());
        assert!(series.iter().any(|&(_, v)| v != 0.0));
        // ψ = p collapses the series to zero by homogeneity.
        let same = cross_currency_gateaux(&a, &a, 20, 2).unwrap();
        for &(_, v) in &same {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-13);
        }
    }
}
