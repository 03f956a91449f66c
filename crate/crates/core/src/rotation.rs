//! Inter-currency comparisons on the regular time grid: momentum distance,
//! angular momentum, ask/bid self-rotation, and the slope analogue
//! α′ = ⟨|M|⟩ / (2π l_s²).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::GridSeries;
use crate::maps::{conjugate_x, string_2end, ConjugateState, StringConfig, StringState};
use crate::numeric;

/// Two strings (and their conjugates) sharing one grid timestamp and length.
#[derive(Debug, Clone)]
pub struct PairedStrings {
    pub t_ms: i64,
    pub p_i: StringState,
    pub p_j: StringState,
    pub x_i: ConjugateState,
    pub x_j: ConjugateState,
}

impl PairedStrings {
    pub fn new(
        t_ms: i64,
        p_i: StringState,
        p_j: StringState,
        x_i: ConjugateState,
        x_j: ConjugateState,
    ) -> Result<Self> {
        let n = p_i.values.len();
        for other in [p_j.values.len(), x_i.values.len(), x_j.values.len()] {
            if other != n {
                return Err(Error::LengthMismatch { left: n, right: other });
            }
        }
        Ok(Self { t_ms, p_i, p_j, x_i, x_j })
    }

    pub fn l_s(&self) -> usize {
        self.p_i.l_s()
    }
}

/// Inter-currency momentum distance: (1/(l_s+1)) Σ_h |P_I(h) − P_J(h)|.
pub fn pair_distance(ps: &PairedStrings) -> f64 {
    let n = ps.p_i.values.len();
    let (pi, pj) = (&ps.p_i.values, &ps.p_j.values);
    numeric::sum_indexed(n, |h| (pi[h] - pj[h]).abs()) / n as f64
}

/// Angular momentum Σ_h [P_I(h)·X_J(h) − P_J(h)·X_I(h)]. Antisymmetric in
/// (I, J) exactly; zero on the diagonal exactly.
pub fn angular_momentum(ps: &PairedStrings) -> f64 {
    let n = ps.p_i.values.len();
    let (pi, pj) = (&ps.p_i.values, &ps.p_j.values);
    let (xi, xj) = (&ps.x_i.values, &ps.x_j.values);
    numeric::sum_indexed(n, |h| pi[h] * xj[h] - pj[h] * xi[h])
}

fn paired_from_grids(
    a: &GridSeries,
    b: &GridSeries,
    mid_a: &[f64],
    mid_b: &[f64],
    offset_a: usize,
    offset_b: usize,
    i: usize,
    cfg: &StringConfig,
) -> Result<PairedStrings> {
    let p_i = string_2end(mid_a, offset_a + i, cfg)?;
    let p_j = string_2end(mid_b, offset_b + i, cfg)?;
    let x_i = conjugate_x(&p_i, &a.t_ms)?;
    let x_j = conjugate_x(&p_j, &b.t_ms)?;
    PairedStrings::new(a.t_ms[offset_a + i], p_i, p_j, x_i, x_j)
}

/// Time series of (d, M) for two currencies on a shared grid.
#[derive(Debug, Clone, Serialize)]
pub struct RotationSeries {
    pub t_ms: Vec<i64>,
    pub distance: Vec<f64>,
    pub momentum: Vec<f64>,
}

/// Slides the window over the common timestamp range of two grid series and
/// emits the momentum distance and angular momentum at each stride.
pub fn rotation_series(
    a: &GridSeries,
    b: &GridSeries,
    cfg: &StringConfig,
    stride: usize,
) -> Result<RotationSeries> {
    cfg.validate()?;
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be >= 1".into()));
    }
    if a.step_ms != b.step_ms {
        return Err(Error::GridMismatch(format!(
            "steps differ: {} ms vs {} ms",
            a.step_ms, b.step_ms
        )));
    }
    // Align on the common timestamp range.
    let start = a.t_ms[0].max(b.t_ms[0]);
    let end = (*a.t_ms.last().unwrap()).min(*b.t_ms.last().unwrap());
    if start > end {
        return Err(Error::GridMismatch("no overlapping time range".into()));
    }
    if (start - a.t_ms[0]) % a.step_ms != 0 || (start - b.t_ms[0]) % b.step_ms != 0 {
        return Err(Error::GridMismatch("grids are phase-shifted".into()));
    }
    let offset_a = ((start - a.t_ms[0]) / a.step_ms) as usize;
    let offset_b = ((start - b.t_ms[0]) / b.step_ms) as usize;
    let common = ((end - start) / a.step_ms) as usize + 1;
    if common <= cfg.l_s {
        return Err(Error::SeriesTooShort { needed: cfg.l_s + 1, len: common });
    }
    let mid_a = a.mids();
    let mid_b = b.mids();
    let n = (common - 1 - cfg.l_s) / stride + 1;
    let mut out = RotationSeries {
        t_ms: Vec::with_capacity(n),
        distance: Vec::with_capacity(n),
        momentum: Vec::with_capacity(n),
    };
    for w in 0..n {
        let ps = paired_from_grids(a, b, &mid_a, &mid_b, offset_a, offset_b, w * stride, cfg)?;
        out.t_ms.push(ps.t_ms);
        out.distance.push(pair_distance(&ps));
        out.momentum.push(angular_momentum(&ps));
    }
    Ok(out)
}

/// Ask-vs-bid self-rotation of a single pair at one window: the ℓ1 distance
/// between the ask-string and bid-string and their cross angular momentum.
pub fn spread_rotation(grid: &GridSeries, tau: usize, cfg: &StringConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let p_ask = string_2end(&grid.ask, tau, cfg)?;
    let p_bid = string_2end(&grid.bid, tau, cfg)?;
    let x_ask = conjugate_x(&p_ask, &grid.t_ms)?;
    let x_bid = conjugate_x(&p_bid, &grid.t_ms)?;
    let ps = PairedStrings::new(grid.t_ms[tau], p_ask, p_bid, x_ask, x_bid)?;
    Ok((pair_distance(&ps), angular_momentum(&ps)))
}

/// Time series of (d_ab, M_ab) over one pair's grid.
pub fn spread_rotation_series(
    grid: &GridSeries,
    cfg: &StringConfig,
    stride: usize,
) -> Result<RotationSeries> {
    cfg.validate()?;
    if stride == 0 {
        return Err(Error::InvalidParams("stride must be >= 1".into()));
    }
    if grid.len() <= cfg.l_s {
        return Err(Error::SeriesTooShort { needed: cfg.l_s + 1, len: grid.len() });
    }
    let n = (grid.len() - 1 - cfg.l_s) / stride + 1;
    let mut out = RotationSeries {
        t_ms: Vec::with_capacity(n),
        distance: Vec::with_capacity(n),
        momentum: Vec::with_capacity(n),
    };
    for w in 0..n {
        let tau = w * stride;
        let (d, m) = spread_rotation(grid, tau, cfg)?;
        out.t_ms.push(grid.t_ms[tau]);
        out.distance.push(d);
        out.momentum.push(m);
    }
    Ok(out)
}

/// Slope analogue α′ = ⟨|M|⟩ / (2π l²) with the string length expressed in
/// the given time unit: `l = l_s_seconds / unit_seconds`.
pub fn regge_slope(m_history: &[f64], l_s_seconds: f64, unit_seconds: f64) -> Result<f64> {
    if m_history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    if !(l_s_seconds > 0.0) || !(unit_seconds > 0.0) {
        return Err(Error::InvalidParams("lengths and units must be positive".into()));
    }
    let mean_abs = numeric::sum_indexed(m_history.len(), |i| m_history[i].abs())
        / m_history.len() as f64;
    let l = l_s_seconds / unit_seconds;
    Ok(mean_abs / (2.0 * std::f64::consts::PI * l * l))
}
