//! 2D brane maps over bid/ask pairs and the general product-form brane.

use crate::error::{Error, Result};
use crate::maps::f_q;

/// One 2D brane evaluation: a dense (l_s+1) × (l_s+1) grid, row-major,
/// indexed by (h1, h2). All four edges are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BraneState {
    pub tau: usize,
    pub l_s: usize,
    values: Vec<f64>,
}

impl BraneState {
    pub fn new(tau: usize, l_s: usize) -> Self {
        Self { tau, l_s, values: vec![0.0; (l_s + 1) * (l_s + 1)] }
    }

    #[inline]
    pub fn get(&self, h1: usize, h2: usize) -> f64 {
        self.values[h1 * (self.l_s + 1) + h2]
    }

    #[inline]
    pub fn set(&mut self, h1: usize, h2: usize, v: f64) {
        self.values[h1 * (self.l_s + 1) + h2] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transpose(&self) -> BraneState {
        let mut out = BraneState::new(self.tau, self.l_s);
        for h1 in 0..=self.l_s {
            for h2 in 0..=self.l_s {
                out.set(h1, h2, self.get(h2, h1));
            }
        }
        out
    }
}

#[inline]
fn ask_factor(ask: &[f64], tau: usize, h1: usize, l_s: usize) -> f64 {
    ((ask[tau + h1] - ask[tau]) / ask[tau + h1])
        * ((ask[tau + l_s] - ask[tau + h1]) / ask[tau + l_s])
}

#[inline]
fn bid_factor(bid: &[f64], tau: usize, h2: usize, l_s: usize) -> f64 {
    ((bid[tau] - bid[tau + h2]) / bid[tau])
        * ((bid[tau + h2] - bid[tau + l_s]) / bid[tau + h2])
}

/// Single brane cell: f_q of the ask two-segment product along h1 times the
/// bid product along h2. The bid factors carry the reversed sign the display
/// prescribes; both orientations pin the edges to zero.
#[inline]
pub fn brane_2d_value(
    ask: &[f64],
    bid: &[f64],
    tau: usize,
    h1: usize,
    h2: usize,
    l_s: usize,
    q: f64,
) -> f64 {
    f_q(ask_factor(ask, tau, h1, l_s) * bid_factor(bid, tau, h2, l_s), q)
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

/// Full 2D brane state over the window `tau..=tau+l_s` of both quote series.
pub fn brane_2d(ask: &[f64], bid: &[f64], tau: usize, q: f64, l_s: usize) -> Result<BraneState> {
    check_window(ask, tau, l_s)?;
    check_window(bid, tau, l_s)?;
    let mut out = BraneState::new(tau, l_s);
    // Precompute the two 1D factor profiles; the grid is their outer product
    // under f_q.
    let af: Vec<f64> = (0..=l_s).map(|h1| ask_factor(ask, tau, h1, l_s)).collect();
    let bf: Vec<f64> = (0..=l_s).map(|h2| bid_factor(bid, tau, h2, l_s)).collect();
    for h1 in 0..=l_s {
        for h2 in 0..=l_s {
            out.set(h1, h2, f_q(af[h1] * bf[h2], q));
        }
    }
    Ok(out)
}

/// The ask/bid inversion (p_ask, p_bid) → (1/p_bid, 1/p_ask) applied to the
/// brane map. Equivalent to the coordinate permutation (h1, h2) → (h2, h1).
pub fn brane_2d_dual_ab(
    ask: &[f64],
    bid: &[f64],
    tau: usize,
    q: f64,
    l_s: usize,
) -> Result<BraneState> {
    let inv_bid: Vec<f64> = bid.iter().map(|v| v.recip()).collect();
    let inv_ask: Vec<f64> = ask.iter().map(|v| v.recip()).collect();
    brane_2d(&inv_bid, &inv_ask, tau, q, l_s)
}

/// Symmetric (`sign = +1`) or antisymmetric (`sign = -1`) combination of a
/// brane with its coordinate swap: values[h1][h2] ± values[h2][h1].
pub fn brane_symmetrize(b: &BraneState, sign: i8) -> BraneState {
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    let mut out = BraneState::new(b.tau, b.l_s);
    for h1 in 0..=b.l_s {
        for h2 in 0..=b.l_s {
            out.set(h1, h2, b.get(h1, h2) + s * b.get(h2, h1));
        }
    }
    out
}

/// Per-dimension sign of the compactified shifts in the general brane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSign {
    Plus,
    Minus,
}

/// General (D̃+1)-brane value: a plain 1-end factor in `h[0]` times one
/// 1-end factor per extra dimension evaluated on the shifted-sum series
/// p̃_j(τ) = Σ_m p(τ ± m·l_{s,j}) (no 1/N_m prefactor — the sums enter raw).
///
/// `h` has length D̃+1; `scales`, `n_m` and `signs` have length D̃.
pub fn brane_general(
    p: &[f64],
    tau: usize,
    h: &[usize],
    scales: &[usize],
    n_m: &[usize],
    q: f64,
    signs: &[ShiftSign],
) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::InvalidParams("need at least the h0 coordinate".into()));
    }
    let d = h.len() - 1;
    if scales.len() != d || n_m.len() != d || signs.len() != d {
        return Err(Error::LengthMismatch { left: d, right: scales.len() });
    }
    if tau + h[0] >= p.len() {
        return Err(Error::IndexOutOfRange { index: tau + h[0], len: p.len() });
    }
    let mut prod = f_q((p[tau + h[0]] - p[tau]) / p[tau + h[0]], q);
    for j in 0..d {
        if n_m[j] == 0 {
            return Err(Error::InvalidParams("N_m must be >= 1".into()));
        }
        let tilde = |base: usize| -> Result<f64> {
            let mut s = 0.0;
            for m in 0..n_m[j] {
                let shift = m * scales[j];
                let idx = match signs[j] {
                    ShiftSign::Plus => base.checked_add(shift),
                    ShiftSign::Minus => base.checked_sub(shift),
                };
                let idx = idx.ok_or(Error::IndexOutOfRange { index: 0, len: p.len() })?;
                if idx >= p.len() {
                    return Err(Error::IndexOutOfRange { index: idx, len: p.len() });
                }
                s += p[idx];
            }
            Ok(s)
        };
        let at_tau = tilde(tau)?;
        let at_h = tilde(tau + h[j + 1])?;
        prod *= f_q((at_h - at_tau) / at_h, q);
    }
    Ok(prod)
}
