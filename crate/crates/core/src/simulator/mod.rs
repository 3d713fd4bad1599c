//! Fixed-step RK4 integration of the interconnected block diagram.
//!
//! Each area contributes its frequency deviation, the integral of its area
//! control error and the states of its prime-mover chain. Every tie line adds
//! one pairwise flow state. The governor input is
//! `u − Δf/R` with `u = −(Kp·ACE + Ki·∫ACE)` and `ACE = B·Δf + ΔP_tie`.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use affine::AffineStep;

use crate::error::{Error, Result};
use crate::model::{
    capacity_ratio, ensure_valid, DecisionVector, GrcPlacement, PrimeMover, SystemConfig,
};

mod affine;

/// Magnitude below which a state is set to zero after each step.
const FLUSH_BELOW: f64 = 1e-200;

/// Frequency excursion beyond which a run counts as diverged, Hz.
pub const DIVERGENCE_LIMIT_HZ: f64 = 5.0;

/// Step change of load in one area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    /// Zero-based area index.
    pub area: usize,
    /// Load step, pu MW of the area's rating (0.01 = 1 %).
    pub magnitude: f64,
    #[serde(default)]
    pub start_time: f64,
}

impl Disturbance {
    pub fn step(area: usize, magnitude: f64) -> Self {
        Self {
            area,
            magnitude,
            start_time: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Integration step, s.
    pub dt: f64,
    /// Simulated time, s.
    pub horizon: f64,
    /// Record every `record_stride`-th step.
    pub record_stride: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            horizon: 250.0,
            record_stride: 1,
        }
    }
}

impl SimOptions {
    pub fn check(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidParams { what: "simulation options", reason });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon >= 10.0 * self.dt) {
            return bad(format!("horizon {} must be at least 10·dt", self.horizon));
        }
        if self.record_stride == 0 {
            return bad("record_stride must be >= 1".into());
        }
        Ok(())
    }

    /// Number of integration steps covering the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt + 1e-9).floor() as usize
    }

    /// Number of recorded samples of a complete run.
    pub fn samples(&self) -> usize {
        self.steps() / self.record_stride + 1
    }
}

/// Recorded time series of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSet {
    pub times: Vec<f64>,
    /// Per area, Hz.
    pub delta_f: Vec<Vec<f64>>,
    /// Zero-based `(a, b)` of each tie, same order as `delta_p_tie`.
    pub tie_pairs: Vec<(usize, usize)>,
    /// Per tie, pu MW on the base of the tie's first area.
    pub delta_p_tie: Vec<Vec<f64>>,
    /// Per area net tie export in the area's own base, pu MW.
    pub tie_net: Vec<Vec<f64>>,
    /// Per area generation change, pu MW.
    pub delta_p_g: Vec<Vec<f64>>,
    /// Per area control error, pu MW.
    pub ace: Vec<Vec<f64>>,
    pub horizon: f64,
    /// Time of the step that breached the divergence test, if any.
    pub diverged_at: Option<f64>,
}

impl TraceSet {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn area_count(&self) -> usize {
        self.delta_f.len()
    }

    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    /// Column names of the CSV export.
    pub fn csv_header(&self) -> String {
        let n = self.area_count();
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=n).map(|i| format!("delf{i}")));
        cols.extend(self.tie_pairs.iter().map(|(a, b)| format!("ptie{}{}", a + 1, b + 1)));
        cols.extend((1..=n).map(|i| format!("pg{i}")));
        cols.extend((1..=n).map(|i| format!("ace{i}")));
        cols.join(",")
    }

    /// One row per sample; values use the shortest representation that
    /// round-trips exactly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for k in 0..self.len() {
            write!(out, "{}", self.times[k])?;
            for series in self
                .delta_f
                .iter()
                .chain(&self.delta_p_tie)
                .chain(&self.delta_p_g)
                .chain(&self.ace)
            {
                write!(out, ",{}", series[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }
}

/// Symmetric rate limit used for the generation rate constraint.
pub fn grc_clamp(rate: f64, limit: f64) -> f64 {
    rate.clamp(-limit, limit)
}

/// Number of first-order states the assembled network integrates.
pub fn state_dimension(config: &SystemConfig) -> usize {
    config
        .areas
        .iter()
        .map(|a| 2 + chain_order(&a.prime_mover))
        .sum::<usize>()
        + config.ties.len()
}

fn chain_order(pm: &PrimeMover) -> usize {
    match pm {
        PrimeMover::Thermal(_) => 3,
        PrimeMover::Hydro(_) => 3,
        PrimeMover::Wind(_) => 2,
    }
}

/// Frequency, ACE-integral and controller data shared by every area kind.
#[derive(Debug, Clone, Copy)]
struct Common {
    area: usize,
    base: usize,
    gain_over_tp: f64,
    inv_tp: f64,
    kp: f64,
    ki: f64,
    bias: f64,
    inv_r: f64,
}

impl Common {
    fn new(area: usize, base: usize, config: &SystemConfig, decision: &DecisionVector) -> Self {
        let p = &config.areas[area].plant;
        Self {
            area,
            base,
            gain_over_tp: p.gain / p.time_constant,
            inv_tp: 1.0 / p.time_constant,
            kp: decision.kp[area],
            ki: decision.ki[area],
            bias: decision.b[area],
            inv_r: 1.0 / decision.r[area],
        }
    }

    fn ace(&self, x: &[f64], tie: f64) -> f64 {
        self.bias * x[self.base] + tie
    }

    /// Writes the frequency and ACE-integral derivatives and returns the
    /// governor input.
    #[inline(always)]
    fn step(&self, x: &[f64], dx: &mut [f64], tie: f64, pg: f64, load: f64) -> f64 {
        let (df, ace_integral) = (x[0], x[1]);
        let ace = self.bias * df + tie;
        dx[0] = self.gain_over_tp * (pg - load - tie) - self.inv_tp * df;
        dx[1] = ace;
        -(self.kp * ace + self.ki * ace_integral) - df * self.inv_r
    }
}

/// States after the common pair: governor valve, turbine output, reheater
/// output. Disabled rate limits are infinite.
#[derive(Debug, Clone, Copy)]
struct ThermalBlock {
    c: Common,
    inv_tg: f64,
    inv_tt: f64,
    inv_tr: f64,
    kr: f64,
    turbine_limit: f64,
    reheat_limit: f64,
}

impl ThermalBlock {
    fn pg(&self, x: &[f64]) -> f64 {
        x[self.c.base + 4]
    }
}

/// States after the common pair: governor, transient droop lag, penstock lag.
#[derive(Debug, Clone, Copy)]
struct HydroBlock {
    c: Common,
    inv_tgh: f64,
    inv_lag: f64,
    inv_ratio: f64,
    inv_half_tw: f64,
}

impl HydroBlock {
    fn compensator(&self, x: &[f64]) -> f64 {
        let s = self.c.base;
        self.inv_ratio * x[s + 2] + (1.0 - self.inv_ratio) * x[s + 3]
    }

    // (1 − s·Tw)/(1 + 0.5·s·Tw) = −2 + 3/(1 + 0.5·s·Tw)
    fn pg(&self, x: &[f64]) -> f64 {
        -2.0 * self.compensator(x) + 3.0 * x[self.c.base + 4]
    }
}

/// States after the common pair: actuator, plant output.
#[derive(Debug, Clone, Copy)]
struct WindBlock {
    c: Common,
    inv_ti: f64,
    kpt: f64,
    inv_tpt: f64,
}

impl WindBlock {
    fn pg(&self, x: &[f64]) -> f64 {
        x[self.c.base + 3]
    }
}

/// Pairwise flow state in the base of `a`; `b` sees it scaled by `factor_b`.
#[derive(Debug, Clone, Copy)]
struct TieBlock {
    state: usize,
    coef: f64,
    a: usize,
    b: usize,
    freq_a: usize,
    freq_b: usize,
    factor_b: f64,
}

struct Network {
    thermal: Vec<ThermalBlock>,
    hydro: Vec<HydroBlock>,
    wind: Vec<WindBlock>,
    ties: Vec<TieBlock>,
    /// State index of Δf for each area.
    freq: Vec<usize>,
    dim: usize,
    load_area: usize,
    load_magnitude: f64,
    load_start: f64,
}

/// Fixed-size views of one area's states and derivatives.
#[inline(always)]
fn block<'a, const N: usize>(
    x: &'a [f64],
    dx: &'a mut [f64],
    base: usize,
) -> (&'a [f64; N], &'a mut [f64; N]) {
    let xs = x[base..base + N].try_into().expect("block within state vector");
    let ds = (&mut dx[base..base + N]).try_into().expect("block within state vector");
    (xs, ds)
}

/// Instantaneous algebraic outputs of one area.
#[derive(Clone, Copy, Default)]
struct AreaOutputs {
    tie: f64,
    ace: f64,
    pg: f64,
}

impl Network {
    fn assemble(
        config: &SystemConfig,
        decision: &DecisionVector,
        disturbance: &Disturbance,
    ) -> Result<Self> {
        let mut net = Network {
            thermal: Vec::new(),
            hydro: Vec::new(),
            wind: Vec::new(),
            ties: Vec::with_capacity(config.ties.len()),
            freq: Vec::with_capacity(config.areas.len()),
            dim: 0,
            load_area: disturbance.area,
            load_magnitude: disturbance.magnitude,
            load_start: disturbance.start_time,
        };
        let mut base = 0;
        for (i, area) in config.areas.iter().enumerate() {
            let c = Common::new(i, base, config, decision);
            match &area.prime_mover {
                PrimeMover::Thermal(t) => {
                    let limit = |placement| {
                        if t.grc_enabled && t.grc_placement == placement {
                            t.grc_limit
                        } else {
                            f64::INFINITY
                        }
                    };
                    net.thermal.push(ThermalBlock {
                        c,
                        inv_tg: 1.0 / t.governor_time_constant,
                        inv_tt: 1.0 / t.turbine_time_constant,
                        inv_tr: 1.0 / t.reheat_time_constant,
                        kr: t.reheat_gain,
                        turbine_limit: limit(GrcPlacement::BeforeReheat),
                        reheat_limit: limit(GrcPlacement::AfterReheat),
                    })
                }
                PrimeMover::Hydro(h) => net.hydro.push(HydroBlock {
                    c,
                    inv_tgh: 1.0 / h.governor_time_constant,
                    inv_lag: 1.0 / (h.droop_ratio * h.reset_time),
                    inv_ratio: 1.0 / h.droop_ratio,
                    inv_half_tw: 2.0 / h.water_starting_time,
                }),
                PrimeMover::Wind(w) => net.wind.push(WindBlock {
                    c,
                    inv_ti: 1.0 / w.actuator_time_constant,
                    kpt: w.gain,
                    inv_tpt: 1.0 / w.time_constant,
                }),
            }
            net.freq.push(base);
            base += 2 + chain_order(&area.prime_mover);
        }

        for tie in &config.ties {
            let (a, b) = (tie.area_a, tie.area_b);
            net.ties.push(TieBlock {
                state: base + net.ties.len(),
                coef: 2.0 * PI * tie.synchronizing_coefficient,
                a,
                b,
                freq_a: net.freq[a],
                freq_b: net.freq[b],
                factor_b: capacity_ratio(config, a, b)?,
            });
        }
        net.dim = base + net.ties.len();
        debug_assert_eq!(net.dim, state_dimension(config));
        Ok(net)
    }

    fn area_count(&self) -> usize {
        self.freq.len()
    }

    /// Net tie flow out of each area, in that area's base.
    fn tie_flows(&self, x: &[f64], tie: &mut [f64]) {
        tie.fill(0.0);
        for tb in &self.ties {
            let flow = x[tb.state];
            tie[tb.a] += flow;
            tie[tb.b] += tb.factor_b * flow;
        }
    }

    fn outputs(&self, x: &[f64], tie: &mut [f64], out: &mut [AreaOutputs]) {
        self.tie_flows(x, tie);
        let mut put = |c: &Common, pg: f64| {
            out[c.area] = AreaOutputs {
                tie: tie[c.area],
                ace: c.ace(x, tie[c.area]),
                pg,
            };
        };
        self.thermal.iter().for_each(|b| put(&b.c, b.pg(x)));
        self.hydro.iter().for_each(|b| put(&b.c, b.pg(x)));
        self.wind.iter().for_each(|b| put(&b.c, b.pg(x)));
    }

    /// `tie` is scratch space of one entry per area.
    fn derivative(&self, t: f64, x: &[f64], dx: &mut [f64], tie: &mut [f64]) {
        self.tie_flows(x, tie);
        for tb in &self.ties {
            dx[tb.state] = tb.coef * (x[tb.freq_a] - x[tb.freq_b]);
        }
        let load_on = t >= self.load_start;
        let load = |area: usize| {
            if load_on && area == self.load_area {
                self.load_magnitude
            } else {
                0.0
            }
        };

        for b in &self.thermal {
            let (xs, ds) = block::<5>(x, dx, b.c.base);
            let u = b.c.step(xs, ds, tie[b.c.area], xs[4], load(b.c.area));
            let [_, _, valve, turbine, reheat] = *xs;
            ds[2] = (u - valve) * b.inv_tg;
            let d_turbine = grc_clamp((valve - turbine) * b.inv_tt, b.turbine_limit);
            // (1 + s·Kr·Tr)/(1 + s·Tr) realised with the output as state
            let d_reheat = (turbine - reheat) * b.inv_tr + b.kr * d_turbine;
            ds[3] = d_turbine;
            ds[4] = grc_clamp(d_reheat, b.reheat_limit);
        }
        for b in &self.hydro {
            let (xs, ds) = block::<5>(x, dx, b.c.base);
            let [_, _, gov, lag, pen] = *xs;
            let comp = b.inv_ratio * gov + (1.0 - b.inv_ratio) * lag;
            let u = b.c.step(xs, ds, tie[b.c.area], -2.0 * comp + 3.0 * pen, load(b.c.area));
            ds[2] = (u - gov) * b.inv_tgh;
            ds[3] = (gov - lag) * b.inv_lag;
            ds[4] = (comp - pen) * b.inv_half_tw;
        }
        for b in &self.wind {
            let (xs, ds) = block::<4>(x, dx, b.c.base);
            let u = b.c.step(xs, ds, tie[b.c.area], xs[3], load(b.c.area));
            let [_, _, act, out] = *xs;
            ds[2] = (u - act) * b.inv_ti;
            ds[3] = (b.kpt * act - out) * b.inv_tpt;
        }
    }
}

/// Receives the state at every recorded step.
trait Sink {
    fn record(&mut self, net: &Network, t: f64, x: &[f64]);
    fn diverged(&mut self, t: f64);
}

struct Recorder {
    traces: TraceSet,
    tie: Vec<f64>,
    outputs: Vec<AreaOutputs>,
}

impl Recorder {
    fn new(config: &SystemConfig, options: &SimOptions) -> Self {
        let n = config.areas.len();
        let cap = options.samples();
        let series = |count: usize| vec![Vec::with_capacity(cap); count];
        Self {
            traces: TraceSet {
                times: Vec::with_capacity(cap),
                delta_f: series(n),
                tie_pairs: config.ties.iter().map(|t| (t.area_a, t.area_b)).collect(),
                delta_p_tie: series(config.ties.len()),
                tie_net: series(n),
                delta_p_g: series(n),
                ace: series(n),
                horizon: options.horizon,
                diverged_at: None,
            },
            tie: vec![0.0; n],
            outputs: vec![AreaOutputs::default(); n],
        }
    }

}

impl Sink for Recorder {
    fn diverged(&mut self, t: f64) {
        self.traces.diverged_at = Some(t);
    }

    fn record(&mut self, net: &Network, t: f64, x: &[f64]) {
        net.outputs(x, &mut self.tie, &mut self.outputs);
        let tr = &mut self.traces;
        tr.times.push(t);
        for (i, out) in self.outputs.iter().enumerate() {
            tr.delta_f[i].push(x[net.freq[i]]);
            tr.tie_net[i].push(out.tie);
            tr.delta_p_g[i].push(out.pg);
            tr.ace[i].push(out.ace);
        }
        for (k, tb) in net.ties.iter().enumerate() {
            tr.delta_p_tie[k].push(x[tb.state]);
        }
    }
}

fn check_inputs(
    config: &SystemConfig,
    decision: &DecisionVector,
    disturbance: &Disturbance,
    options: &SimOptions,
) -> Result<()> {
    ensure_valid(config)?;
    options.check()?;
    decision.check_shape(config.area_count())?;
    if disturbance.area >= config.area_count() {
        return Err(Error::AreaIndex {
            index: disturbance.area,
            areas: config.area_count(),
        });
    }
    if !disturbance.magnitude.is_finite() || !(disturbance.start_time >= 0.0) {
        return Err(Error::InvalidParams {
            what: "disturbance",
            reason: "magnitude must be finite and start_time >= 0".into(),
        });
    }
    if decision.r.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParams {
            what: "decision",
            reason: "speed regulation R must be > 0".into(),
        });
    }
    Ok(())
}

/// Integrates the network under a single step load change.
///
/// Runs that breach [`DIVERGENCE_LIMIT_HZ`] or produce a non-finite state are
/// stopped at that step and flagged through [`TraceSet::diverged_at`]; the
/// trace keeps every sample recorded before the breach.
pub fn simulate(
    config: &SystemConfig,
    decision: &DecisionVector,
    disturbance: &Disturbance,
    options: &SimOptions,
) -> Result<TraceSet> {
    check_inputs(config, decision, disturbance, options)?;
    let mut recorder = Recorder::new(config, options);
    integrate(config, decision, disturbance, options, &mut recorder, true)?;
    Ok(recorder.traces)
}

/// Trapezoidal ISE accumulated on the fly over the recorded samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IseRun {
    pub ise: f64,
    pub diverged_at: Option<f64>,
}

struct IseSink {
    total: f64,
    prev: Option<(f64, f64)>,
    diverged_at: Option<f64>,
}

impl Sink for IseSink {
    fn diverged(&mut self, t: f64) {
        self.diverged_at = Some(t);
    }

    fn record(&mut self, net: &Network, t: f64, x: &[f64]) {
        let cur: f64 = net
            .freq
            .iter()
            .chain(net.ties.iter().map(|tb| &tb.state))
            .map(|&k| x[k] * x[k])
            .sum();
        if let Some((t0, prev)) = self.prev {
            self.total += 0.5 * (prev + cur) * (t - t0);
        }
        self.prev = Some((t, cur));
    }
}

/// Same run as [`simulate`] but only integrates the squared Δf and tie-flow
/// deviations, without storing traces.
pub fn simulate_ise(
    config: &SystemConfig,
    decision: &DecisionVector,
    disturbance: &Disturbance,
    options: &SimOptions,
) -> Result<IseRun> {
    check_inputs(config, decision, disturbance, options)?;
    let mut sink = IseSink {
        total: 0.0,
        prev: None,
        diverged_at: None,
    };
    integrate(config, decision, disturbance, options, &mut sink, true)?;
    Ok(IseRun {
        ise: sink.total,
        diverged_at: sink.diverged_at,
    })
}

fn integrate<S: Sink>(
    config: &SystemConfig,
    decision: &DecisionVector,
    disturbance: &Disturbance,
    options: &SimOptions,
    sink: &mut S,
    closed_form: bool,
) -> Result<()> {
    let net = Network::assemble(config, decision, disturbance)?;
    let n = net.dim;
    let h = options.dt;
    let mut x = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut stage = vec![0.0; n];
    let mut tie = vec![0.0; net.area_count()];
    let axpy = |out: &mut [f64], x: &[f64], k: &[f64], a: f64| {
        for ((o, xi), ki) in out.iter_mut().zip(x).zip(k) {
            *o = xi + a * ki;
        }
    };

    let mut affine = AffineStep::new(&net, h);

    sink.record(&net, 0.0, &x);
    for step in 1..=options.steps() {
        let t = (step - 1) as f64 * h;
        let load_on = t >= net.load_start;
        let same_load = load_on == (t + h >= net.load_start);
        if !(closed_form && same_load && affine.try_step(&mut x, load_on)) {
            net.derivative(t, &x, &mut k1, &mut tie);
            axpy(&mut stage, &x, &k1, 0.5 * h);
            net.derivative(t + 0.5 * h, &stage, &mut k2, &mut tie);
            axpy(&mut stage, &x, &k2, 0.5 * h);
            net.derivative(t + 0.5 * h, &stage, &mut k3, &mut tie);
            axpy(&mut stage, &x, &k3, h);
            net.derivative(t + h, &stage, &mut k4, &mut tie);
            for ((((xi, a), b), c), d) in x.iter_mut().zip(&k1).zip(&k2).zip(&k3).zip(&k4) {
                *xi += h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
            }
        }

        // keep decayed states out of the (slow) subnormal range
        let mut finite = true;
        for v in x.iter_mut() {
            let a = v.abs();
            *v = if a < FLUSH_BELOW { 0.0 } else { *v };
            finite &= a <= f64::MAX;
        }

        let t_new = step as f64 * h;
        let blown = !finite || net.freq.iter().any(|&k| x[k].abs() > DIVERGENCE_LIMIT_HZ);
        if blown {
            sink.diverged(t_new);
            break;
        }
        if step % options.record_stride == 0 {
            sink.record(&net, t_new, &x);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stepwise(
        config: &SystemConfig,
        decision: &DecisionVector,
        disturbance: &Disturbance,
        options: &SimOptions,
    ) -> TraceSet {
        let mut recorder = Recorder::new(config, options);
        integrate(config, decision, disturbance, options, &mut recorder, false).unwrap();
        recorder.traces
    }

    fn max_abs_diff(a: &TraceSet, b: &TraceSet) -> f64 {
        a.delta_f
            .iter()
            .chain(&a.delta_p_tie)
            .chain(&a.delta_p_g)
            .zip(b.delta_f.iter().chain(&b.delta_p_tie).chain(&b.delta_p_g))
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn closed_form_steps_match_stepwise_rk4() {
        let opts = SimOptions {
            horizon: 60.0,
            ..SimOptions::default()
        };
        let mut late = Disturbance::step(2, 0.01);
        late.start_time = 3.005;
        let decisions = [
            DecisionVector::reference(),
            DecisionVector::droop_only(3, 0.425, 8.0),
            DecisionVector::from_slice(&[
                0.2, 0.48, 1.97, 0.09, 1.98, 0.08, 0.3, 0.27, 0.48, 4.38, 3.44, 5.49,
            ])
            .unwrap(),
        ];
        for placement in [GrcPlacement::BeforeReheat, GrcPlacement::AfterReheat] {
            for grc in [true, false] {
                let mut cfg = nominal_system();
                if let PrimeMover::Thermal(t) = &mut cfg.areas[0].prime_mover {
                    t.grc_enabled = grc;
                    t.grc_placement = placement;
                }
                for d in &decisions {
                    for dist in [Disturbance::step(0, 0.01), late.clone()] {
                        let fast = simulate(&cfg, d, &dist, &opts).unwrap();
                        let slow = stepwise(&cfg, d, &dist, &opts);
                        assert_eq!(fast.len(), slow.len());
                        assert_eq!(fast.diverged_at.is_some(), slow.diverged_at.is_some());
                        let diff = max_abs_diff(&fast, &slow);
                        assert!(diff < 1e-9, "grc {grc} {placement:?}: {diff}");
                    }
                }
            }
        }
    }
    use crate::model::{nominal_system, nominal_thermal, Area, PlantCommon, TieLine};

    fn thermal_area(rating_mw: f64, grc: bool) -> Area {
        let mut t = nominal_thermal();
        t.grc_enabled = grc;
        Area {
            name: "thermal".into(),
            plant: PlantCommon {
                nominal_frequency: 60.0,
                rating_mw,
                inertia: Some(5.0),
                damping: Some(0.00833),
                gain: 120.0,
                time_constant: 20.0,
            },
            prime_mover: PrimeMover::Thermal(t),
        }
    }

    #[test]
    fn grc_clamp_cases() {
        assert_eq!(grc_clamp(0.001, 0.0017), 0.001);
        assert_eq!(grc_clamp(0.01, 0.0017), 0.0017);
        assert_eq!(grc_clamp(-0.01, 0.0017), -0.0017);
    }

    #[test]
    fn state_counts() {
        assert_eq!(state_dimension(&nominal_system()), 17);

        let two = SystemConfig {
            areas: vec![thermal_area(1000.0, true), thermal_area(1000.0, true)],
            ties: vec![TieLine {
                area_a: 0,
                area_b: 1,
                synchronizing_coefficient: 0.5,
            }],
            tie_limit_mw: None,
        };
        assert_eq!(state_dimension(&two), 11);

        let mut cfg = nominal_system();
        cfg.ties.pop();
        assert_eq!(state_dimension(&cfg) + 1, 17);
    }

    #[test]
    fn zero_load_stays_at_equilibrium() {
        let cfg = nominal_system();
        let opts = SimOptions {
            horizon: 20.0,
            ..SimOptions::default()
        };
        let tr = simulate(&cfg, &DecisionVector::reference(), &Disturbance::step(0, 0.0), &opts).unwrap();
        assert_eq!(tr.len(), opts.samples());
        for series in tr.delta_f.iter().chain(&tr.delta_p_tie).chain(&tr.delta_p_g).chain(&tr.ace) {
            assert!(series.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn isolated_droop_only_matches_final_value() {
        let cfg = SystemConfig {
            areas: vec![thermal_area(2000.0, false)],
            ties: vec![],
            tie_limit_mw: None,
        };
        let opts = SimOptions {
            horizon: 100.0,
            ..SimOptions::default()
        };
        let d = DecisionVector::droop_only(1, 0.425, 2.4);
        let tr = simulate(&cfg, &d, &Disturbance::step(0, 0.01), &opts).unwrap();
        let last = *tr.delta_f[0].last().unwrap();
        // Δf(∞) = −ΔPd/(1/Kp + 1/R)
        let expected = -0.01 / (1.0 / 120.0 + 1.0 / 2.4);
        assert!((last - expected).abs() < 1e-4, "{last} vs {expected}");
        assert!((last + 0.0235299).abs() < 1e-4);
    }

    #[test]
    fn sample_count_follows_stride() {
        let opts = SimOptions {
            dt: 0.01,
            horizon: 10.0,
            record_stride: 7,
        };
        let tr = simulate(&nominal_system(), &DecisionVector::reference(), &Disturbance::step(0, 0.01), &opts)
            .unwrap();
        assert_eq!(tr.len(), (10.0f64 / (0.01 * 7.0)).floor() as usize + 1);
        assert!(tr.delta_f.iter().all(|s| s.len() == tr.len()));
    }

    #[test]
    fn csv_header_matches_schema() {
        let opts = SimOptions {
            horizon: 1.0,
            ..SimOptions::default()
        };
        let tr = simulate(&nominal_system(), &DecisionVector::reference(), &Disturbance::step(0, 0.01), &opts)
            .unwrap();
        let csv = tr.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,delf1,delf2,delf3,ptie12,ptie13,ptie23,pg1,pg2,pg3,ace1,ace2,ace3"
        );
        let row: Vec<f64> = lines.nth(5).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row.len(), 13);
        assert_eq!(row[1], tr.delta_f[0][5]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = nominal_system();
        let d = DecisionVector::reference();
        let opts = SimOptions::default();
        assert!(simulate(&cfg, &d, &Disturbance::step(3, 0.01), &opts).is_err());
        assert!(simulate(&cfg, &DecisionVector::droop_only(2, 0.425, 2.4), &Disturbance::step(0, 0.01), &opts).is_err());
        let short = SimOptions {
            horizon: 0.05,
            ..opts.clone()
        };
        assert!(simulate(&cfg, &d, &Disturbance::step(0, 0.01), &short).is_err());
        let mut broken = cfg.clone();
        broken.ties.clear();
        assert!(matches!(
            simulate(&broken, &d, &Disturbance::step(0, 0.01), &opts),
            Err(Error::Validation(_))
        ));
    }
}
