use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::link_budget::{EnergyReport, Mode, SlotPlan};
use crate::scenario::{distance, Scenario};

use super::{run_dlo, StrategySpec};

/// One flying slot of a distance-energy trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub slot_index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// 3-D distance to the nearest predefined antenna.
    pub nearest_pa_distance_m: f64,
    /// Perpendicular distance to the waveguide axis.
    pub waveguide_distance_m: f64,
    pub power_w: f64,
}

/// Flying-slot distances and optimized powers for one full run.
/// Hovering slots are left out: they only repeat the previous activation.
pub fn distance_energy_trace(scenario: &Scenario, spec: &StrategySpec) -> Result<Vec<TraceRow>> {
    let out = run_dlo(scenario, spec)?;
    Ok(trace_rows(scenario, &out.slot_plan, out.report()))
}

/// Trace rows for an existing run.
pub fn trace_rows(scenario: &Scenario, plan: &SlotPlan, report: &EnergyReport) -> Vec<TraceRow> {
    let wg = &scenario.waveguide;
    plan.slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.mode == Mode::Flying)
        .map(|(l, s)| {
            let p = s.uav_position_m;
            let nearest = (0..wg.pa_count())
                .map(|k| distance(&p, &wg.pa_position(k)))
                .fold(f64::INFINITY, f64::min);
            TraceRow {
                slot_index: l,
                x: p[0],
                y: p[1],
                z: p[2],
                nearest_pa_distance_m: nearest,
                waveguide_distance_m: (p[1] - wg.y_m).hypot(p[2] - wg.z_m),
                power_w: report.per_slot_power_w[l],
            }
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Ranks starting at 1; ties share their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson on tie-averaged ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
