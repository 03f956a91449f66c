//! Plot-ready CSV and JSON serialization with fixed column schemas.
//!
//! Floats are written in shortest round-trip form, so identical results give
//! identical bytes.

use std::fmt::Write as _;

use crate::brane::BraneState;
use crate::ingest::{GridSeries, TickSeries};
use crate::maps::{ConjugateState, StringState};
use crate::polarization::PolarizationRun;
use crate::rotation::RotationSeries;
use crate::stats::{MeanModes, ProfileResult, SweepResult};

pub fn ticks_to_csv(series: &TickSeries) -> String {
    let mut out = String::from("epoch_ms,ask,bid\n");
    for i in 0..series.len() {
        writeln!(out, "{},{},{}", series.t_ms[i], series.ask[i], series.bid[i]).unwrap();
    }
    out
}

pub fn grid_to_csv(grid: &GridSeries) -> String {
    let mut out = String::from("epoch_ms,ask,bid\n");
    for i in 0..grid.len() {
        writeln!(out, "{},{},{}", grid.t_ms[i], grid.ask[i], grid.bid[i]).unwrap();
    }
    out
}

pub fn sweep_to_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("l_s,T_seconds,mean,dispersion,n\n");
    for i in 0..sweep.lengths.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            sweep.lengths[i],
            sweep.real_time_s[i],
            sweep.mean[i],
            sweep.dispersion[i],
            sweep.sample_count[i]
        )
        .unwrap();
    }
    out
}

pub fn profile_to_csv(profile: &ProfileResult) -> String {
    let mut out = String::from("h,mean,dispersion,n\n");
    for h in 0..profile.mean.len() {
        writeln!(
            out,
            "{},{},{},{}",
            h, profile.mean[h], profile.dispersion[h], profile.sample_count
        )
        .unwrap();
    }
    out
}

pub fn scatter_to_csv(pairs: &[(f64, f64)]) -> String {
    let mut out = String::from("sigma_r,P_mid\n");
    for (v, a) in pairs {
        writeln!(out, "{v},{a}").unwrap();
    }
    out
}

pub fn modes_to_csv(modes: &MeanModes) -> String {
    let mut out = String::from("k,re,im\n");
    for k in 0..=modes.k_max {
        writeln!(out, "{},{},{}", k, modes.re[k], modes.im[k]).unwrap();
    }
    out
}

pub fn correlation_to_csv(epsilons: &[f64], c: &[f64]) -> String {
    let mut out = String::from("epsilon,C\n");
    for (e, v) in epsilons.iter().zip(c) {
        writeln!(out, "{e},{v}").unwrap();
    }
    out
}

pub fn polarization_to_csv(run: &PolarizationRun) -> String {
    let mut out = String::from("tau,t,g_window\n");
    for i in 0..run.tau.len() {
        writeln!(out, "{},{},{}", run.tau[i], run.t_ms[i], run.g_window[i]).unwrap();
    }
    out
}

pub fn distances_to_csv(run: &PolarizationRun) -> String {
    let mut out = String::from("tau,t,d\n");
    for i in 0..run.tau.len() {
        writeln!(out, "{},{},{}", run.tau[i], run.t_ms[i], run.distance[i]).unwrap();
    }
    out
}

pub fn rotation_to_csv(series: &RotationSeries) -> String {
    let mut out = String::from("t,d,M\n");
    for i in 0..series.t_ms.len() {
        writeln!(out, "{},{},{}", series.t_ms[i], series.distance[i], series.momentum[i]).unwrap();
    }
    out
}

pub fn timeseries_to_csv(series: &[(i64, f64)]) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in series {
        writeln!(out, "{t},{v}").unwrap();
    }
    out
}

/// String state as `h,value`, optionally with the conjugate as a third column.
pub fn string_state_to_csv(state: &StringState, conjugate: Option<&ConjugateState>) -> String {
    let mut out = String::new();
    match conjugate {
        Some(x) => {
            out.push_str("h,P,X\n");
            for h in 0..state.values.len() {
                writeln!(out, "{},{},{}", h, state.values[h], x.values[h]).unwrap();
            }
        }
        None => {
            out.push_str("h,P\n");
            for h in 0..state.values.len() {
                writeln!(out, "{},{}", h, state.values[h]).unwrap();
            }
        }
    }
    out
}

/// Long-form triples `h1,h2,value`.
pub fn brane_to_csv_long(brane: &BraneState) -> String {
    let mut out = String::from("h1,h2,value\n");
    for h1 in 0..=brane.l_s {
        for h2 in 0..=brane.l_s {
            writeln!(out, "{},{},{}", h1, h2, brane.get(h1, h2)).unwrap();
        }
    }
    out
}

/// Dense matrix rows, one line per h1.
pub fn brane_to_csv_matrix(brane: &BraneState) -> String {
    let mut out = String::new();
    for h1 in 0..=brane.l_s {
        for h2 in 0..=brane.l_s {
            if h2 > 0 {
                out.push(',');
            }
            write!(out, "{}", brane.get(h1, h2)).unwrap();
        }
        out.push('\n');
    }
    out
}
