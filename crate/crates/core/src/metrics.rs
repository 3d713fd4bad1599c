//! Peak overshoot, peak undershoot and settling time of frequency responses,
//! plus method-by-area comparison tables.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Scenario;
use crate::simulator::TraceSet;

/// Default absolute settling band on Δf, in Hz.
pub const DEFAULT_BAND_HZ: f64 = 0.0005;

fn check_finite(series: &[f64]) -> Result<()> {
    match series.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

/// Largest negative excursion as a magnitude; 0 if the series never dips.
pub fn peak_undershoot(series: &[f64]) -> Result<f64> {
    check_finite(series)?;
    Ok(series.iter().fold(0.0, |acc: f64, &v| acc.max(-v)))
}

/// Largest positive excursion; 0 if the series never rises above zero.
pub fn peak_overshoot(series: &[f64]) -> Result<f64> {
    check_finite(series)?;
    Ok(series.iter().fold(0.0, |acc: f64, &v| acc.max(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum SettlingBand {
    /// Fixed half-width in Hz.
    Absolute(f64),
    /// Half-width as a percentage of the peak absolute deviation.
    PercentOfPeak(f64),
}

impl Default for SettlingBand {
    fn default() -> Self {
        SettlingBand::Absolute(DEFAULT_BAND_HZ)
    }
}

impl SettlingBand {
    pub fn half_width(&self, series: &[f64]) -> f64 {
        match *self {
            SettlingBand::Absolute(w) => w,
            SettlingBand::PercentOfPeak(pct) => {
                let peak = series
                    .iter()
                    .filter(|v| v.is_finite())
                    .fold(0.0, |acc: f64, v| acc.max(v.abs()));
                pct / 100.0 * peak
            }
        }
    }
}

/// Settling time, or the absence of one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<f64>", into = "Option<f64>")]
pub enum Settling {
    Settled(f64),
    Unsettled,
}

impl Settling {
    pub fn time(self) -> Option<f64> {
        match self {
            Settling::Settled(t) => Some(t),
            Settling::Unsettled => None,
        }
    }
}

impl From<Option<f64>> for Settling {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Settling::Unsettled, Settling::Settled)
    }
}

impl From<Settling> for Option<f64> {
    fn from(s: Settling) -> Self {
        s.time()
    }
}

impl fmt::Display for Settling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Settling::Settled(t) => write!(f, "{t:.2}"),
            Settling::Unsettled => f.write_str("unsettled"),
        }
    }
}

/// Earliest sample time after which the series stays within the band.
/// A non-finite sample counts as outside the band.
pub fn settling_time(series: &[f64], times: &[f64], band: SettlingBand) -> Settling {
    let width = band.half_width(series);
    let outside = |v: f64| !(v.abs() <= width);
    match series.iter().rposition(|&v| outside(v)) {
        None => times.first().copied().map_or(Settling::Unsettled, Settling::Settled),
        Some(last) => times
            .get(last + 1)
            .copied()
            .map_or(Settling::Unsettled, Settling::Settled),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseMetrics {
    pub peak_overshoot: f64,
    pub peak_undershoot: f64,
    pub settling_time: Settling,
    /// Last recorded value.
    pub steady_state_value: f64,
}

impl ResponseMetrics {
    pub fn of(series: &[f64], times: &[f64], band: SettlingBand) -> Result<Self> {
        Ok(Self {
            peak_overshoot: peak_overshoot(series)?,
            peak_undershoot: peak_undershoot(series)?,
            settling_time: settling_time(series, times, band),
            steady_state_value: series.last().copied().unwrap_or(0.0),
        })
    }
}

/// Metrics of Δf for every area.
pub fn area_metrics(traces: &TraceSet, band: SettlingBand) -> Result<Vec<ResponseMetrics>> {
    traces
        .delta_f
        .iter()
        .map(|s| ResponseMetrics::of(s, &traces.times, band))
        .collect()
}

#[derive(Debug, Clone)]
pub struct LabeledRun {
    pub label: String,
    pub scenario: Scenario,
    pub traces: TraceSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Undershoot,
    Overshoot,
    Settling,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Undershoot, Quantity::Overshoot, Quantity::Settling];

    pub fn title(self) -> &'static str {
        match self {
            Quantity::Undershoot => "Peak Undershoot (Hz)",
            Quantity::Overshoot => "Peak Overshoot (Hz)",
            Quantity::Settling => "Settling Time (s)",
        }
    }

    fn cell(self, m: &ResponseMetrics) -> String {
        match self {
            Quantity::Undershoot => format!("{:.6}", m.peak_undershoot),
            Quantity::Overshoot => format!("{:.6}", m.peak_overshoot),
            Quantity::Settling => m.settling_time.to_string(),
        }
    }

    fn csv_cell(self, m: &ResponseMetrics) -> String {
        match self {
            Quantity::Undershoot => m.peak_undershoot.to_string(),
            Quantity::Overshoot => m.peak_overshoot.to_string(),
            Quantity::Settling => m.settling_time.time().map(|t| t.to_string()).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub areas: usize,
    pub rows: Vec<(String, Vec<ResponseMetrics>)>,
}

pub fn area_label(index: usize) -> String {
    const ROMAN: [&str; 10] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"];
    match ROMAN.get(index) {
        Some(r) => format!("Area {r}"),
        None => format!("Area {}", index + 1),
    }
}

/// Tabulates Δf metrics, one row per run. All runs must share a scenario.
pub fn comparison_report(runs: &[LabeledRun], band: SettlingBand) -> Result<ComparisonReport> {
    let first = runs
        .first()
        .ok_or_else(|| Error::ScenarioMismatch("no runs to compare".into()))?;
    let mut rows = Vec::with_capacity(runs.len());
    for run in runs {
        if run.scenario != first.scenario {
            return Err(Error::ScenarioMismatch(format!(
                "run `{}` uses a different scenario from `{}`",
                run.label, first.label
            )));
        }
        rows.push((run.label.clone(), area_metrics(&run.traces, band)?));
    }
    Ok(ComparisonReport {
        areas: first.scenario.config.area_count(),
        rows,
    })
}

impl ComparisonReport {
    fn header(&self) -> Vec<String> {
        std::iter::once("Method".to_string())
            .chain((0..self.areas).map(area_label))
            .collect()
    }

    pub fn table(&self, q: Quantity) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|(label, m)| {
                std::iter::once(label.clone())
                    .chain(m.iter().map(|x| q.cell(x)))
                    .collect()
            })
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (k, q) in Quantity::ALL.into_iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let header = self.header();
            let body = self.table(q);
            let widths: Vec<usize> = (0..header.len())
                .map(|c| {
                    body.iter()
                        .map(|r| r[c].chars().count())
                        .chain(std::iter::once(header[c].chars().count()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| -> String {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", q.title());
            let _ = writeln!(out, "{}", line(&header));
            let _ = writeln!(out, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
            for r in &body {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        out
    }

    /// Long-form CSV: `quantity,method,area,value`. Unsettled values are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,method,area,value\n");
        for q in Quantity::ALL {
            let key = match q {
                Quantity::Undershoot => "peak_undershoot_hz",
                Quantity::Overshoot => "peak_overshoot_hz",
                Quantity::Settling => "settling_time_s",
            };
            for (label, metrics) in &self.rows {
                for (a, m) in metrics.iter().enumerate() {
                    let _ = writeln!(out, "{key},{label},{},{}", a + 1, q.csv_cell(m));
                }
            }
        }
        out
    }
}
