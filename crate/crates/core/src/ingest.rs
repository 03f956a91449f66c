//! Tick-file parsing, validation, decimation and grid resampling.
//!
//! Two data layouts feed everything downstream: the tick-indexed
//! [`TickSeries`] (map coordinate = quote index) and the regularly spaced
//! [`GridSeries`] (map coordinate = wall-clock step), the latter used for
//! inter-currency comparisons where quote times must line up.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};

/// One quote: epoch-millisecond timestamp, ask and bid prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub t_ms: i64,
    pub ask: f64,
    pub bid: f64,
}

impl Tick {
    /// Mid price (ask + bid) / 2.
    #[inline]
    pub fn mid(&self) -> f64 {
        (self.ask + self.bid) / 2.0
    }
}

/// Ordered quote series for one currency pair, stored columnar.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    pub pair: String,
    pub t_ms: Vec<i64>,
    pub ask: Vec<f64>,
    pub bid: Vec<f64>,
}

impl TickSeries {
    /// Validates the series invariants: at least two ticks, non-decreasing
    /// timestamps, positive prices, ask >= bid.
    pub fn new(pair: impl Into<String>, ticks: Vec<Tick>) -> Result<Self> {
        if ticks.len() < 2 {
            return Err(Error::SeriesTooShort { needed: 2, len: ticks.len() });
        }
        let mut t_ms = Vec::with_capacity(ticks.len());
        let mut ask = Vec::with_capacity(ticks.len());
        let mut bid = Vec::with_capacity(ticks.len());
        for (i, tick) in ticks.iter().enumerate() {
            validate_tick(tick, i + 1)?;
            if i > 0 && tick.t_ms < ticks[i - 1].t_ms {
                return Err(Error::NonMonotoneTimestamp {
                    line: i + 1,
                    prev: ticks[i - 1].t_ms,
                    curr: tick.t_ms,
                });
            }
            t_ms.push(tick.t_ms);
            ask.push(tick.ask);
            bid.push(tick.bid);
        }
        Ok(Self { pair: pair.into(), t_ms, ask, bid })
    }

    pub fn len(&self) -> usize {
        self.t_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_ms.is_empty()
    }

    pub fn tick(&self, i: usize) -> Tick {
        Tick { t_ms: self.t_ms[i], ask: self.ask[i], bid: self.bid[i] }
    }

    /// Mid prices, materialized once for the map kernels.
    pub fn mids(&self) -> Vec<f64> {
        self.ask.iter().zip(&self.bid).map(|(a, b)| (a + b) / 2.0).collect()
    }

    /// Timestamps in seconds (f64), as used by the conjugate recurrence.
    pub fn times_s(&self) -> Vec<f64> {
        self.t_ms.iter().map(|&t| t as f64 / 1000.0).collect()
    }
}

fn validate_tick(tick: &Tick, line: usize) -> Result<()> {
    if !(tick.ask > 0.0) || !(tick.bid > 0.0) {
        return Err(Error::NonPositivePrice { index: line });
    }
    if tick.bid > tick.ask {
        return Err(Error::InvertedSpread { line, ask: tick.ask, bid: tick.bid });
    }
    Ok(())
}

/// Regularly spaced series: consecutive timestamps differ by exactly `step_ms`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSeries {
    pub pair: String,
    pub step_ms: i64,
    pub t_ms: Vec<i64>,
    pub ask: Vec<f64>,
    pub bid: Vec<f64>,
}

impl GridSeries {
    pub fn len(&self) -> usize {
        self.t_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_ms.is_empty()
    }

    pub fn mids(&self) -> Vec<f64> {
        self.ask.iter().zip(&self.bid).map(|(a, b)| (a + b) / 2.0).collect()
    }

    pub fn step_seconds(&self) -> f64 {
        self.step_ms as f64 / 1000.0
    }
}

/// Which CSV column holds which field. Defaults to `epoch_ms,ask,bid`.
#[derive(Debug, Clone, Copy)]
pub struct ColumnMap {
    pub time: usize,
    pub ask: usize,
    pub bid: usize,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self { time: 0, ask: 1, bid: 2 }
    }
}

/// Parser options: column order and whether invalid records abort or are skipped.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub columns: ColumnMap,
    pub skip_invalid: bool,
}

/// Parses CSV tick records (`epoch_ms,ask,bid` by default, optional header)
/// from a reader. Invalid records abort with a line-numbered error unless
/// `skip_invalid` is set, in which case they are dropped.
pub fn parse_ticks<R: Read>(source: R, pair: &str, opts: ParseOptions) -> Result<TickSeries> {
    let reader = BufReader::new(source);
    let mut ticks: Vec<Tick> = Vec::new();
    let mut last_t: Option<i64> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match parse_record(trimmed, opts.columns, line_no) {
            Ok(tick) => {
                if let Err(e) = validate_tick(&tick, line_no) {
                    if opts.skip_invalid {
                        continue;
                    }
                    return Err(e);
                }
                if let Some(prev) = last_t {
                    if tick.t_ms < prev {
                        if opts.skip_invalid {
                            continue;
                        }
                        return Err(Error::NonMonotoneTimestamp {
                            line: line_no,
                            prev,
                            curr: tick.t_ms,
                        });
                    }
                }
                last_t = Some(tick.t_ms);
                ticks.push(tick);
            }
            Err(e) => {
                // A non-numeric first line is a header, not an error.
                if line_no == 1 && ticks.is_empty() {
                    continue;
                }
                if opts.skip_invalid {
                    continue;
                }
                return Err(e);
            }
        }
    }
    TickSeries::new(pair, ticks)
}

fn parse_record(line: &str, cols: ColumnMap, line_no: usize) -> Result<Tick> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let need = cols.time.max(cols.ask).max(cols.bid) + 1;
    if fields.len() < need {
        return Err(Error::MalformedLine {
            line: line_no,
            reason: format!("expected at least {need} fields, got {}", fields.len()),
        });
    }
    let t_ms: i64 = fields[cols.time].parse().map_err(|_| Error::MalformedLine {
        line: line_no,
        reason: format!("bad timestamp {:?}", fields[cols.time]),
    })?;
    let ask: f64 = fields[cols.ask].parse().map_err(|_| Error::MalformedLine {
        line: line_no,
        reason: format!("bad ask {:?}", fields[cols.ask]),
    })?;
    let bid: f64 = fields[cols.bid].parse().map_err(|_| Error::MalformedLine {
        line: line_no,
        reason: format!("bad bid {:?}", fields[cols.bid]),
    })?;
    Ok(Tick { t_ms, ask, bid })
}

/// Opens a tick file, transparently gunzipping when the extension is `.gz`.
pub fn read_tick_file(path: &Path, pair: &str, opts: ParseOptions) -> Result<TickSeries> {
    let file = std::fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        parse_ticks(GzDecoder::new(file), pair, opts)
    } else {
        parse_ticks(file, pair, opts)
    }
}

/// Keeps ticks at indices 0, factor, 2·factor, ...
pub fn decimate(series: &TickSeries, factor: usize) -> Result<TickSeries> {
    if factor == 0 {
        return Err(Error::InvalidParams("decimation factor must be >= 1".into()));
    }
    if factor == 1 {
        return Ok(series.clone());
    }
    let pick = |v: &Vec<i64>| v.iter().step_by(factor).copied().collect::<Vec<_>>();
    let pickf = |v: &Vec<f64>| v.iter().step_by(factor).copied().collect::<Vec<_>>();
    let t_ms = pick(&series.t_ms);
    if t_ms.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2 * factor, len: series.len() });
    }
    Ok(TickSeries {
        pair: series.pair.clone(),
        t_ms,
        ask: pickf(&series.ask),
        bid: pickf(&series.bid),
    })
}

/// Mid price of one tick.
pub fn mid_price(tick: &Tick) -> f64 {
    tick.mid()
}

/// Projects ticks onto a regular grid by previous-tick interpolation: each
/// grid time takes the last quote at or before it. The grid starts at the
/// first whole step strictly after the first tick and ends at or before the
/// last tick.
pub fn resample_grid(series: &TickSeries, step_ms: i64) -> Result<GridSeries> {
    if step_ms <= 0 {
        return Err(Error::InvalidParams("grid step must be positive".into()));
    }
    let t0 = series.t_ms[0];
    let t_end = *series.t_ms.last().unwrap();
    let g0 = (t0.div_euclid(step_ms) + 1) * step_ms;
    if g0 > t_end {
        return Err(Error::EmptyWindow);
    }
    let n_pts = ((t_end - g0) / step_ms + 1) as usize;
    let mut t_ms = Vec::with_capacity(n_pts);
    let mut ask = Vec::with_capacity(n_pts);
    let mut bid = Vec::with_capacity(n_pts);
    let mut src = 0usize;
    for k in 0..n_pts {
        let g = g0 + k as i64 * step_ms;
        while src + 1 < series.len() && series.t_ms[src + 1] <= g {
            src += 1;
        }
        t_ms.push(g);
        ask.push(series.ask[src]);
        bid.push(series.bid[src]);
    }
    Ok(GridSeries { pair: series.pair.clone(), step_ms, t_ms, ask, bid })
}

/// Mean real time spanned by a window of `l_s` ticks: the average of
/// t(tau+l_s) - t(tau) over all admissible window starts, in seconds.
pub fn mean_window_time(series: &TickSeries, l_s: usize) -> Result<f64> {
    let n = series.len();
    if n <= l_s {
        return Err(Error::SeriesTooShort { needed: l_s + 1, len: n });
    }
    if l_s == 0 {
        return Ok(0.0);
    }
    let windows = n - l_s;
    let t = &series.t_ms;
    let total = crate::numeric::sum_indexed(windows, |tau| (t[tau + l_s] - t[tau]) as f64);
    Ok(total / windows as f64 / 1000.0)
}
