//! Physical description of an interconnected multi-area network and the
//! twelve-dimensional (four per area) controller/system decision space.
//!
//! Areas are indexed from zero throughout the API. Output files and reports
//! label them from one.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by every area's power-system block `Kp/(1 + s·Tp)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantCommon {
    /// Nominal frequency, Hz.
    pub nominal_frequency: f64,
    /// Area capacity, MW.
    pub rating_mw: f64,
    /// Inertia constant H, s. Only used for the consistency check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    /// Load damping D, pu MW/Hz. Only used for the consistency check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    /// Plant gain Kp, Hz/pu MW.
    pub gain: f64,
    /// Plant time constant Tp, s.
    pub time_constant: f64,
}

/// Where the generation rate constraint acts in the thermal chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrcPlacement {
    /// On the turbine output, ahead of the reheater.
    #[default]
    BeforeReheat,
    /// On the reheater output (the generation signal itself).
    AfterReheat,
}

/// Non-reheat governor, turbine and reheat stage with a generation rate
/// constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Tg, s.
    pub governor_time_constant: f64,
    /// Tt, s.
    pub turbine_time_constant: f64,
    /// Kr, fraction of power from the high-pressure stage.
    pub reheat_gain: f64,
    /// Tr, s.
    pub reheat_time_constant: f64,
    /// Generation rate limit, pu MW/s.
    pub grc_limit: f64,
    pub grc_enabled: bool,
    #[serde(default)]
    pub grc_placement: GrcPlacement,
}

/// Mechanical-hydraulic governor with transient droop compensation and a
/// linearised penstock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydroParams {
    /// Tgh, s.
    pub governor_time_constant: f64,
    /// Transient droop reset time TR, s.
    pub reset_time: f64,
    /// Temporary to permanent droop ratio RT/R.
    pub droop_ratio: f64,
    /// Water starting time Tw, s.
    pub water_starting_time: f64,
}

/// Aerodynamic data of the wind plant. Carried for the record only; the
/// linear model works at a fixed operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindAerodynamics {
    /// kg/m^3
    pub air_density: f64,
    /// m/s
    pub mean_wind_speed: f64,
    /// m
    pub blade_radius: f64,
    pub gear_ratio: f64,
}

/// Pitch actuator lag followed by the wind plant `Kpt/(1 + s·Tpt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindParams {
    /// Ti, s.
    pub actuator_time_constant: f64,
    /// Kpt.
    pub gain: f64,
    /// Tpt, s.
    pub time_constant: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aerodynamics: Option<WindAerodynamics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimeMover {
    Thermal(ThermalParams),
    Hydro(HydroParams),
    Wind(WindParams),
}

impl PrimeMover {
    pub fn kind(&self) -> &'static str {
        match self {
            PrimeMover::Thermal(_) => "thermal",
            PrimeMover::Hydro(_) => "hydro",
            PrimeMover::Wind(_) => "wind",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub name: String,
    pub plant: PlantCommon,
    pub prime_mover: PrimeMover,
}

/// Tie line between two areas. The pairwise flow integrates
/// `2π·T·(Δf_a − Δf_b)` and is expressed in `area_a`'s per-unit base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieLine {
    pub area_a: usize,
    pub area_b: usize,
    /// Synchronizing coefficient T, pu MW/Hz.
    pub synchronizing_coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub areas: Vec<Area>,
    #[serde(default)]
    pub ties: Vec<TieLine>,
    /// Tie-line power limit, MW. Metadata only; the linear model does not
    /// saturate the tie flow.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_limit_mw: Option<f64>,
}

impl SystemConfig {
    pub fn area_count(&self) -> usize {
        self.areas.len()
    }

    /// Dimension of the decision space: Kp, Ki, B and R per area.
    pub fn decision_dimension(&self) -> usize {
        4 * self.areas.len()
    }
}

/// A single violated invariant, located by a dotted path into the config.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Per-area PI gains, frequency bias and speed regulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    pub kp: Vec<f64>,
    pub ki: Vec<f64>,
    /// Frequency bias B, pu MW/Hz.
    pub b: Vec<f64>,
    /// Speed regulation R, Hz/pu MW.
    pub r: Vec<f64>,
}

impl DecisionVector {
    pub fn area_count(&self) -> usize {
        self.kp.len()
    }

    pub fn dimension(&self) -> usize {
        self.kp.len() + self.ki.len() + self.b.len() + self.r.len()
    }

    /// Flat layout `[kp.., ki.., b.., r..]` used by the optimizers.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dimension());
        out.extend_from_slice(&self.kp);
        out.extend_from_slice(&self.ki);
        out.extend_from_slice(&self.b);
        out.extend_from_slice(&self.r);
        out
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(4) {
            return Err(Error::DecisionShape {
                expected: 4 * (values.len() / 4).max(1),
                got: values.len(),
            });
        }
        let n = values.len() / 4;
        Ok(Self {
            kp: values[..n].to_vec(),
            ki: values[n..2 * n].to_vec(),
            b: values[2 * n..3 * n].to_vec(),
            r: values[3 * n..].to_vec(),
        })
    }

    pub fn check_shape(&self, areas: usize) -> Result<()> {
        let ok = [&self.kp, &self.ki, &self.b, &self.r]
            .iter()
            .all(|v| v.len() == areas);
        if ok {
            Ok(())
        } else {
            Err(Error::DecisionShape {
                expected: 4 * areas,
                got: self.dimension(),
            })
        }
    }

    /// Droop-only operation: no supplementary control, bias and droop at the
    /// given values.
    pub fn droop_only(areas: usize, b: f64, r: f64) -> Self {
        Self {
            kp: vec![0.0; areas],
            ki: vec![0.0; areas],
            b: vec![b; areas],
            r: vec![r; areas],
        }
    }

    /// A decision for the nominal three-area network that settles under a
    /// 1 % step in area 1, with every integral gain at least 0.05.
    pub fn reference() -> Self {
        Self {
            kp: vec![0.001, 2.0, 2.0],
            ki: vec![0.05, 0.05, 0.05],
            b: vec![1.0, 1.0, 0.44],
            r: vec![8.0, 1.0, 2.8],
        }
    }
}

/// Box bounds over the flat decision layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self { lower, upper };
        b.check()?;
        Ok(b)
    }

    /// The same interval on every dimension.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
        }
    }

    /// Default tuning box: kp, ki in [0.001, 2], b in [0.1, 1], r in [1, 8].
    pub fn controller_default(areas: usize) -> Self {
        let mut lower = Vec::with_capacity(4 * areas);
        let mut upper = Vec::with_capacity(4 * areas);
        for (lo, hi) in [(0.001, 2.0), (0.001, 2.0), (0.1, 1.0), (1.0, 8.0)] {
            lower.extend(std::iter::repeat_n(lo, areas));
            upper.extend(std::iter::repeat_n(hi, areas));
        }
        Self { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn check(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return Err(Error::InvalidParams {
                what: "bounds",
                reason: format!(
                    "lower has {} entries, upper has {}",
                    self.lower.len(),
                    self.upper.len()
                ),
            });
        }
        for (d, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParams {
                    what: "bounds",
                    reason: format!("dimension {d}: need finite lower < upper, got [{lo}, {hi}]"),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| (*lo..=*hi).contains(v))
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn corner_lower(&self) -> Vec<f64> {
        self.lower.clone()
    }

    pub fn corner_upper(&self) -> Vec<f64> {
        self.upper.clone()
    }
}

/// The reheat thermal / wind / hydro network with its published constants.
/// Hydro chain constants, the rate limit and the two unprinted tie
/// coefficients are modelling choices.
pub fn nominal_system() -> SystemConfig {
    let plant = |rating_mw: f64| PlantCommon {
        nominal_frequency: 60.0,
        rating_mw,
        inertia: Some(5.0),
        damping: Some(0.00833),
        gain: 120.0,
        time_constant: 20.0,
    };
    let tie = |area_a, area_b| TieLine {
        area_a,
        area_b,
        synchronizing_coefficient: 0.544,
    };
    SystemConfig {
        areas: vec![
            Area {
                name: "thermal".into(),
                plant: plant(2000.0),
                prime_mover: PrimeMover::Thermal(nominal_thermal()),
            },
            Area {
                name: "wind".into(),
                plant: plant(35.0),
                prime_mover: PrimeMover::Wind(WindParams {
                    actuator_time_constant: 3.0,
                    gain: 0.012,
                    time_constant: 10.55,
                    aerodynamics: Some(WindAerodynamics {
                        air_density: 1.25,
                        mean_wind_speed: 7.0,
                        blade_radius: 45.0,
                        gear_ratio: 70.0,
                    }),
                }),
            },
            Area {
                name: "hydro".into(),
                plant: plant(2000.0),
                prime_mover: PrimeMover::Hydro(HydroParams {
                    governor_time_constant: 0.2,
                    reset_time: 5.0,
                    droop_ratio: 4.75,
                    water_starting_time: 1.0,
                }),
            },
        ],
        ties: vec![tie(0, 1), tie(0, 2), tie(1, 2)],
        tie_limit_mw: Some(200.0),
    }
}

pub(crate) fn nominal_thermal() -> ThermalParams {
    ThermalParams {
        governor_time_constant: 0.08,
        turbine_time_constant: 0.3,
        reheat_gain: 0.5,
        reheat_time_constant: 10.0,
        grc_limit: 0.0017,
        grc_enabled: true,
        grc_placement: GrcPlacement::BeforeReheat,
    }
}

/// Checks every invariant of `config` and returns all violations.
pub fn validate(config: &SystemConfig) -> std::result::Result<(), Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    let mut push = |path: String, message: String| issues.push(ValidationIssue { path, message });

    if config.areas.is_empty() {
        push("areas".into(), "at least one area is required".into());
    }

    for (i, area) in config.areas.iter().enumerate() {
        let label = format!("area {} ({})", i + 1, area.prime_mover.kind());
        let base = format!("areas[{i}]");
        let p = &area.plant;
        let mut positive = |field: &str, what: &str, value: f64| {
            if !(value.is_finite() && value > 0.0) {
                push(
                    format!("{base}.{field}"),
                    format!("{label}: {what} must be > 0, got {value}"),
                );
            }
        };
        positive("plant.nominal_frequency", "nominal frequency", p.nominal_frequency);
        positive("plant.rating_mw", "rating", p.rating_mw);
        positive("plant.gain", "plant gain Kp", p.gain);
        positive("plant.time_constant", "plant time constant Tp", p.time_constant);
        if let Some(h) = p.inertia {
            positive("plant.inertia", "inertia constant H", h);
        }
        match &area.prime_mover {
            PrimeMover::Thermal(t) => {
                positive("prime_mover.governor_time_constant", "governor time constant Tg", t.governor_time_constant);
                positive("prime_mover.turbine_time_constant", "turbine time constant Tt", t.turbine_time_constant);
                positive("prime_mover.reheat_time_constant", "reheat time constant Tr", t.reheat_time_constant);
                positive("prime_mover.grc_limit", "generation rate limit", t.grc_limit);
            }
            PrimeMover::Hydro(h) => {
                positive("prime_mover.governor_time_constant", "governor time constant Tgh", h.governor_time_constant);
                positive("prime_mover.reset_time", "reset time TR", h.reset_time);
                positive("prime_mover.droop_ratio", "droop ratio RT/R", h.droop_ratio);
                positive("prime_mover.water_starting_time", "water starting time Tw", h.water_starting_time);
            }
            PrimeMover::Wind(w) => {
                positive("prime_mover.actuator_time_constant", "actuator time constant Ti", w.actuator_time_constant);
                positive("prime_mover.gain", "wind plant gain Kpt", w.gain);
                positive("prime_mover.time_constant", "wind plant time constant Tpt", w.time_constant);
            }
        }

        if let Some(d) = p.damping {
            if !(d.is_finite() && d >= 0.0) {
                push(
                    format!("{base}.plant.damping"),
                    format!("{label}: load damping D must be >= 0, got {d}"),
                );
            }
        }
        if let (Some(h), Some(d)) = (p.inertia, p.damping) {
            if h > 0.0 && d > 0.0 && p.nominal_frequency > 0.0 && p.time_constant > 0.0 && p.gain > 0.0 {
                let tp = 2.0 * h / (p.nominal_frequency * d);
                if ((p.time_constant - tp) / p.time_constant).abs() >= 0.01 {
                    push(
                        format!("{base}.plant.time_constant"),
                        format!("{label}: Tp = {} disagrees with 2H/(f·D) = {tp:.4}", p.time_constant),
                    );
                }
                if ((p.gain - 1.0 / d) / p.gain).abs() >= 0.01 {
                    push(
                        format!("{base}.plant.gain"),
                        format!("{label}: Kp = {} disagrees with 1/D = {:.4}", p.gain, 1.0 / d),
                    );
                }
            }
        }

        match &area.prime_mover {
            PrimeMover::Thermal(t) if !(t.reheat_gain > 0.0 && t.reheat_gain <= 1.0) => push(
                format!("{base}.prime_mover.reheat_gain"),
                format!("{label}: reheat gain Kr must lie in (0, 1], got {}", t.reheat_gain),
            ),
            PrimeMover::Hydro(h) if h.water_starting_time >= 2.0 * h.reset_time => push(
                format!("{base}.prime_mover.water_starting_time"),
                format!("{label}: Tw = {} must be below 2·TR = {}", h.water_starting_time, 2.0 * h.reset_time),
            ),
            _ => {}
        }
    }

    let n = config.areas.len();
    let mut seen = BTreeSet::new();
    for (k, tie) in config.ties.iter().enumerate() {
        let base = format!("ties[{k}]");
        if tie.area_a >= n || tie.area_b >= n {
            push(
                base.clone(),
                format!("tie references area {} / {} but only {n} areas exist", tie.area_a, tie.area_b),
            );
            continue;
        }
        if tie.area_a == tie.area_b {
            push(base.clone(), format!("tie connects area {} to itself", tie.area_a + 1));
        }
        if !(tie.synchronizing_coefficient.is_finite() && tie.synchronizing_coefficient > 0.0) {
            push(
                format!("{base}.synchronizing_coefficient"),
                format!("synchronizing coefficient must be > 0, got {}", tie.synchronizing_coefficient),
            );
        }
        let key = (tie.area_a.min(tie.area_b), tie.area_a.max(tie.area_b));
        if !seen.insert(key) {
            push(
                base,
                format!("duplicate tie between areas {} and {}", key.0 + 1, key.1 + 1),
            );
        }
    }

    if n > 1 && !is_connected(n, &config.ties) {
        push("ties".into(), "tie-line graph is not connected".into());
    }

    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// [`validate`] mapped into the crate error type.
pub fn ensure_valid(config: &SystemConfig) -> Result<()> {
    validate(config).map_err(Error::Validation)
}

fn is_connected(n: usize, ties: &[TieLine]) -> bool {
    let mut reached = vec![false; n];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(a) = stack.pop() {
        for t in ties.iter().filter(|t| t.area_a < n && t.area_b < n) {
            let other = if t.area_a == a {
                t.area_b
            } else if t.area_b == a {
                t.area_a
            } else {
                continue;
            };
            if !reached[other] {
                reached[other] = true;
                stack.push(other);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Per-unit conversion factor `a_ij = −rating_i / rating_j` for a flow leaving
/// area `i` as seen from area `j`.
pub fn capacity_ratio(config: &SystemConfig, i: usize, j: usize) -> Result<f64> {
    let n = config.areas.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::AreaIndex { index: idx, areas: n });
        }
    }
    Ok(-config.areas[i].plant.rating_mw / config.areas[j].plant.rating_mw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn thermal_of(cfg: &SystemConfig) -> &ThermalParams {
        match &cfg.areas[0].prime_mover {
            PrimeMover::Thermal(t) => t,
            other => panic!("area 1 is {}", other.kind()),
        }
    }

    #[test]
    fn nominal_values_match_tables() {
        let cfg = nominal_system();
        let t = thermal_of(&cfg);
        assert_eq!(t.governor_time_constant, 0.08);
        assert_eq!(t.turbine_time_constant, 0.3);
        assert_eq!(t.reheat_gain, 0.5);
        assert_eq!(t.reheat_time_constant, 10.0);
        match &cfg.areas[1].prime_mover {
            PrimeMover::Wind(w) => {
                assert_eq!(w.time_constant, 10.55);
                assert_eq!(w.gain, 0.012);
                assert_eq!(w.actuator_time_constant, 3.0);
            }
            other => panic!("area 2 is {}", other.kind()),
        }
        let ratings: Vec<f64> = cfg.areas.iter().map(|a| a.plant.rating_mw).collect();
        assert_eq!(ratings, [2000.0, 35.0, 2000.0]);
        assert!(cfg.ties.iter().all(|t| t.synchronizing_coefficient == 0.544));
    }

    #[test]
    fn nominal_plant_constants_are_consistent() {
        for area in nominal_system().areas {
            let p = area.plant;
            let tp = 2.0 * p.inertia.unwrap() / (p.nominal_frequency * p.damping.unwrap());
            assert!(((tp - 20.0) / 20.0).abs() < 0.01, "Tp from H, f, D = {tp}");
        }
    }

    #[test]
    fn nominal_validates() {
        assert_eq!(validate(&nominal_system()), Ok(()));
    }

    #[test]
    fn negative_governor_constant_is_reported() {
        let mut cfg = nominal_system();
        if let PrimeMover::Thermal(t) = &mut cfg.areas[0].prime_mover {
            t.governor_time_constant = -0.1;
        }
        let issues = validate(&cfg).unwrap_err();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].path, "areas[0].prime_mover.governor_time_constant");
        assert!(issues[0].message.contains("area 1"));
        assert!(issues[0].message.contains("governor"));
    }

    #[test]
    fn empty_ties_is_disconnected() {
        let mut cfg = nominal_system();
        cfg.ties.clear();
        let issues = validate(&cfg).unwrap_err();
        assert!(issues.iter().any(|i| i.message.contains("not connected")));
    }

    #[test]
    fn duplicate_and_self_ties_are_reported() {
        let mut cfg = nominal_system();
        cfg.ties.push(TieLine {
            area_a: 1,
            area_b: 0,
            synchronizing_coefficient: 0.5,
        });
        cfg.ties.push(TieLine {
            area_a: 2,
            area_b: 2,
            synchronizing_coefficient: 0.5,
        });
        let issues = validate(&cfg).unwrap_err();
        assert!(issues.iter().any(|i| i.message.contains("duplicate")));
        assert!(issues.iter().any(|i| i.message.contains("itself")));
    }

    #[test]
    fn validation_collects_every_issue() {
        let mut cfg = nominal_system();
        cfg.areas[1].plant.time_constant = 0.0;
        if let PrimeMover::Hydro(h) = &mut cfg.areas[2].prime_mover {
            h.water_starting_time = 11.0;
        }
        cfg.ties[0].synchronizing_coefficient = -1.0;
        let issues = validate(&cfg).unwrap_err();
        let paths: Vec<&str> = issues.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"areas[1].plant.time_constant"));
        assert!(paths.contains(&"areas[2].prime_mover.water_starting_time"));
        assert!(paths.contains(&"ties[0].synchronizing_coefficient"));
    }

    #[test]
    fn inconsistent_plant_constants_are_reported() {
        let mut cfg = nominal_system();
        cfg.areas[0].plant.time_constant = 25.0;
        let issues = validate(&cfg).unwrap_err();
        assert_eq!(issues[0].path, "areas[0].plant.time_constant");
    }

    #[test]
    fn capacity_ratios() {
        let cfg = nominal_system();
        assert_eq!(capacity_ratio(&cfg, 0, 2).unwrap(), -1.0);
        assert!((capacity_ratio(&cfg, 0, 1).unwrap() + 57.142857).abs() < 1e-6);
        assert!(matches!(
            capacity_ratio(&cfg, 0, 3),
            Err(Error::AreaIndex { index: 3, areas: 3 })
        ));

        let mut equal = cfg.clone();
        for a in &mut equal.areas {
            a.plant.rating_mw = 500.0;
        }
        assert_eq!(capacity_ratio(&equal, 1, 2).unwrap(), -1.0);
    }

    #[test]
    fn decision_layout_round_trips() {
        let d = DecisionVector {
            kp: vec![1.0, 2.0, 3.0],
            ki: vec![4.0, 5.0, 6.0],
            b: vec![7.0, 8.0, 9.0],
            r: vec![10.0, 11.0, 12.0],
        };
        let flat = d.to_vec();
        assert_eq!(flat, (1..=12).map(f64::from).collect::<Vec<_>>());
        assert_eq!(DecisionVector::from_slice(&flat).unwrap(), d);
        assert!(DecisionVector::from_slice(&flat[..7]).is_err());
    }

    #[test]
    fn default_bounds_bracket_nominals() {
        let b = Bounds::controller_default(3);
        assert_eq!(b.dim(), 12);
        b.check().unwrap();
        assert!(b.contains(&DecisionVector::reference().to_vec()));
    }

    proptest! {
        #[test]
        fn capacity_ratio_is_reciprocal(
            ratings in proptest::collection::vec(1.0f64..5000.0, 3),
            i in 0usize..3,
            j in 0usize..3,
        ) {
            let mut cfg = nominal_system();
            for (a, r) in cfg.areas.iter_mut().zip(&ratings) {
                a.plant.rating_mw = *r;
            }
            let prod = capacity_ratio(&cfg, i, j).unwrap() * capacity_ratio(&cfg, j, i).unwrap();
            prop_assert!((prod - 1.0).abs() < 1e-12);
        }

        #[test]
        fn clamping_lands_inside_bounds(x in proptest::collection::vec(-100.0f64..100.0, 12)) {
            let b = Bounds::controller_default(3);
            let mut x = x;
            b.clamp(&mut x);
            prop_assert!(b.contains(&x));
        }
    }
}
