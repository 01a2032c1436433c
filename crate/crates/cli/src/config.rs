//! Run configuration: layered TOML files with dotted keys plus `--set`
//! overrides.
//!
//! Files are merged in order, then overrides are applied, then every leaf key
//! is checked against the known schema before deserialising. Errors always
//! name the offending key.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anpc_core::{
    Attribution, DeviceParams, EnergyCurve, LossModel, OperatingPoint, ReferenceKind, Strategy,
};
use anpc_core::device::fit_power_law;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {expected}, found {found}")]
    Type {
        key: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("override `{0}` is not of the form key=value")]
    Override(String),
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    pub rds_on: f64,
    pub v_ds_max: f64,
    pub i_d_rated: f64,
    pub v_gs_on: f64,
    pub v_gs_off: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        let d = DeviceParams::default();
        DeviceSection {
            rds_on: d.rds_on,
            v_ds_max: d.v_ds_max,
            i_d_rated: d.i_d_rated,
            v_gs_on: d.v_gs_on,
            v_gs_off: d.v_gs_off,
        }
    }
}

/// Power-law curve `E = a·I^b`, or a sample file to fit it from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub a: f64,
    pub b: f64,
    /// CSV with `current_a,energy_j`; when set, `a` and `b` are fitted from it.
    /// Relative paths are resolved against the config file that sets them.
    #[serde(default)]
    pub samples: String,
}

impl CurveSection {
    fn from_curve(c: EnergyCurve) -> Self {
        CurveSection {
            a: c.coeff_a(),
            b: c.exponent_b(),
            samples: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwitchingSection {
    pub e_on: CurveSection,
    pub e_off: CurveSection,
    /// `hard` or `all-edges`.
    pub attribution: String,
}

impl Default for SwitchingSection {
    fn default() -> Self {
        SwitchingSection {
            e_on: CurveSection::from_curve(EnergyCurve::TURN_ON),
            e_off: CurveSection::from_curve(EnergyCurve::TURN_OFF),
            attribution: Attribution::default().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatingSection {
    pub m: f64,
    pub cos_phi: f64,
    pub i_peak: f64,
    pub v_dc: f64,
    pub f_e: f64,
    pub f_sw: f64,
}

impl Default for OperatingSection {
    fn default() -> Self {
        let op = OperatingPoint::default();
        OperatingSection {
            m: op.m,
            cos_phi: 0.9,
            i_peak: op.i_peak,
            v_dc: op.v_dc,
            f_e: op.f_e,
            f_sw: op.f_sw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulationSection {
    pub strategies: Vec<String>,
    /// `sinusoidal` or `thi`.
    pub reference: String,
}

impl Default for ModulationSection {
    fn default() -> Self {
        ModulationSection {
            strategies: Strategy::ALL.iter().map(|s| s.to_string()).collect(),
            reference: ReferenceKind::Sinusoidal.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulatorSection {
    /// Seconds.
    pub dead_time: f64,
    pub steps_per_carrier: i64,
    pub reverse_drop: bool,
    pub reverse_drop_v: f64,
    /// Also write per-strategy waveform CSVs from `simulate`.
    pub waveform: bool,
}

impl Default for SimulatorSection {
    fn default() -> Self {
        SimulatorSection {
            dead_time: 0.0,
            steps_per_carrier: 256,
            reverse_drop: false,
            reverse_drop_v: 4.5,
            waveform: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub threshold: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            threshold: anpc_core::oracle::DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub m: Vec<f64>,
    pub cos_phi: Vec<f64>,
    pub i_peak: Vec<f64>,
    /// Add simulated RMS columns.
    pub simulate: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            m: vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            cos_phi: vec![0.9],
            i_peak: vec![3.0],
            simulate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternsSection {
    /// Rows per fundamental period.
    pub steps: i64,
}

impl Default for PatternsSection {
    fn default() -> Self {
        PatternsSection { steps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceSection,
    pub switching: SwitchingSection,
    pub operating: OperatingSection,
    pub modulation: ModulationSection,
    pub simulator: SimulatorSection,
    pub compare: CompareSection,
    pub sweep: SweepSection,
    pub patterns: PatternsSection,
    pub output: OutputSection,
}

/// Simulator options after validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub dead_time: f64,
    pub steps_per_carrier: usize,
    pub reverse_drop: bool,
    pub reverse_drop_v: f64,
    pub waveform: bool,
}

/// One sweep grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub m: f64,
    pub cos_phi: f64,
    pub i_peak: f64,
}

/// Validated configuration in library types.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: LossModel,
    pub operating_point: OperatingPoint,
    pub strategies: Vec<Strategy>,
    pub reference: ReferenceKind,
    pub sim: SimSettings,
    pub threshold: f64,
    pub grid: Vec<GridPoint>,
    pub sweep_simulate: bool,
    pub pattern_steps: usize,
    pub out_dir: PathBuf,
}

impl Scenario {
    pub fn sim_config(&self, strategy: Strategy, op: OperatingPoint) -> anpc_core::SimConfig {
        let mut cfg = anpc_core::SimConfig::new(strategy, op);
        cfg.reference = self.reference;
        cfg.dead_time = self.sim.dead_time;
        cfg.steps_per_carrier = self.sim.steps_per_carrier;
        cfg.include_reverse_conduction_drop = self.sim.reverse_drop;
        cfg.reverse_drop_v = self.sim.reverse_drop_v;
        cfg
    }

    pub fn operating_point_at(&self, p: GridPoint) -> OperatingPoint {
        OperatingPoint {
            m: p.m,
            i_peak: p.i_peak,
            ..self.operating_point
        }
        .with_cos_phi(p.cos_phi)
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "integer",
        Value::Float(_) => "float",
        Value::Boolean(_) => "boolean",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

fn flatten(table: &Table, prefix: &str, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(t, &key, out),
            _ => {
                out.insert(key, v.clone());
            }
        }
    }
}

fn default_leaves() -> BTreeMap<String, Value> {
    let table = Table::try_from(RunConfig::default()).expect("default config serialises");
    let mut out = BTreeMap::new();
    flatten(&table, "", &mut out);
    out
}

/// Every key accepted in a config file or by `--set`, with its default.
pub fn known_keys() -> Vec<(String, String)> {
    default_leaves()
        .into_iter()
        .map(|(k, v)| (k, v.to_string()))
        .collect()
}

/// Checks one user value against the default's type, widening integers to
/// floats where a float is expected.
fn conform(key: &str, user: &Value, default: &Value) -> Result<Value, ConfigError> {
    let mismatch = || ConfigError::Type {
        key: key.to_string(),
        expected: type_name(default),
        found: type_name(user),
    };
    match (default, user) {
        (Value::Float(_), Value::Integer(i)) => Ok(Value::Float(*i as f64)),
        (Value::Array(d), Value::Array(u)) => {
            let Some(proto) = d.first() else {
                return Ok(user.clone());
            };
            u.iter()
                .map(|item| {
                    conform(key, item, proto).map_err(|_| ConfigError::Type {
                        key: key.to_string(),
                        expected: "array of matching items",
                        found: type_name(item),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array)
        }
        (d, u) if type_name(d) == type_name(u) => Ok(u.clone()),
        _ => Err(mismatch()),
    }
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), ConfigError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().unwrap_or_default();
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = match entry {
            Value::Table(t) => t,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        };
    }
    cursor.insert(leaf.to_string(), value);
    Ok(())
}

fn merge(into: &mut Table, from: Table) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(Value::Table(a)), Value::Table(b)) => merge(a, b),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

/// Rewrites relative sample paths so they resolve against `base`.
fn anchor_sample_paths(table: &mut Table, base: &Path) {
    let Some(Value::Table(sw)) = table.get_mut("switching") else {
        return;
    };
    for edge in ["e_on", "e_off"] {
        if let Some(Value::Table(curve)) = sw.get_mut(edge) {
            if let Some(Value::String(p)) = curve.get_mut("samples") {
                if !p.is_empty() && Path::new(p.as_str()).is_relative() {
                    *p = base.join(p.as_str()).to_string_lossy().into_owned();
                }
            }
        }
    }
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_override_value(value: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()))
}

/// Builds a configuration from files (merged in order) and `key=value` overrides.
pub fn load(files: &[PathBuf], overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut merged = Table::new();
    for path in files {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let mut table: Table = toml::from_str(&text).map_err(|e| ConfigError::Syntax {
            path: path.clone(),
            message: e.message().to_string(),
        })?;
        anchor_sample_paths(&mut table, path.parent().unwrap_or(Path::new(".")));
        merge(&mut merged, table);
    }
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| ConfigError::Override(o.clone()))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Override(o.clone()));
        }
        set_path(&mut merged, key, parse_override_value(value.trim()))?;
    }
    from_table(merged)
}

/// Validates and deserialises a merged table.
pub fn from_table(table: Table) -> Result<RunConfig, ConfigError> {
    let defaults = default_leaves();
    let mut user = BTreeMap::new();
    flatten(&table, "", &mut user);
    let mut conformed = Table::try_from(RunConfig::default()).expect("default config serialises");
    for (key, value) in user {
        let default = defaults
            .get(&key)
            .ok_or_else(|| ConfigError::UnknownKey(key.clone()))?;
        set_path(&mut conformed, &key, conform(&key, &value, default)?)?;
    }
    conformed.try_into().map_err(|e: toml::de::Error| ConfigError::Invalid {
        key: "<config>".into(),
        reason: e.message().to_string(),
    })
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive (got {v})")))
    }
}

fn resolve_curve(key: &str, c: &CurveSection) -> Result<EnergyCurve, ConfigError> {
    if !c.samples.is_empty() {
        let samples = crate::output::read_energy_samples(Path::new(&c.samples))
            .map_err(|e| invalid(&format!("{key}.samples"), e.to_string()))?;
        return fit_power_law(&samples)
            .map(|f| f.curve)
            .map_err(|e| invalid(&format!("{key}.samples"), e.to_string()));
    }
    EnergyCurve::new(c.a, c.b).map_err(|e| invalid(key, e.to_string()))
}

fn check_cos_phi(key: &str, c: f64) -> Result<(), ConfigError> {
    if (-1.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(invalid(key, format!("must lie in [-1, 1] (got {c})")))
    }
}

impl RunConfig {
    /// Validates every field and converts to library types.
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        let d = &self.device;
        let device = DeviceParams {
            rds_on: positive("device.rds_on", d.rds_on)?,
            v_ds_max: positive("device.v_ds_max", d.v_ds_max)?,
            i_d_rated: positive("device.i_d_rated", d.i_d_rated)?,
            v_gs_on: d.v_gs_on,
            v_gs_off: d.v_gs_off,
        };
        let attribution: Attribution = self
            .switching
            .attribution
            .parse()
            .map_err(|e: String| invalid("switching.attribution", e))?;
        let model = LossModel {
            device,
            e_on: resolve_curve("switching.e_on", &self.switching.e_on)?,
            e_off: resolve_curve("switching.e_off", &self.switching.e_off)?,
            attribution,
        };

        let reference: ReferenceKind = self
            .modulation
            .reference
            .parse()
            .map_err(|e: String| invalid("modulation.reference", e))?;
        if self.modulation.strategies.is_empty() {
            return Err(invalid("modulation.strategies", "at least one strategy is required"));
        }
        let mut strategies = Vec::new();
        for name in &self.modulation.strategies {
            let s: Strategy = name
                .parse()
                .map_err(|e: String| invalid("modulation.strategies", e))?;
            if !strategies.contains(&s) {
                strategies.push(s);
            }
        }

        let o = &self.operating;
        reference
            .check(o.m)
            .map_err(|e| invalid("operating.m", e.to_string()))?;
        check_cos_phi("operating.cos_phi", o.cos_phi)?;
        if !(o.i_peak >= 0.0 && o.i_peak.is_finite()) {
            return Err(invalid("operating.i_peak", format!("must be >= 0 (got {})", o.i_peak)));
        }
        let f_e = positive("operating.f_e", o.f_e)?;
        let f_sw = positive("operating.f_sw", o.f_sw)?;
        if f_sw / f_e < 20.0 {
            return Err(invalid(
                "operating.f_sw",
                format!("carrier ratio f_sw/f_e = {} is below 20", f_sw / f_e),
            ));
        }
        let operating_point = OperatingPoint {
            m: o.m,
            phi: 0.0,
            i_peak: o.i_peak,
            v_dc: positive("operating.v_dc", o.v_dc)?,
            f_e,
            f_sw,
        }
        .with_cos_phi(o.cos_phi);

        let s = &self.simulator;
        if !(s.dead_time >= 0.0 && s.dead_time.is_finite()) {
            return Err(invalid("simulator.dead_time", format!("must be >= 0 (got {})", s.dead_time)));
        }
        let min_steps = anpc_core::SimConfig::MIN_STEPS_PER_CARRIER as i64;
        if s.steps_per_carrier < min_steps {
            return Err(invalid(
                "simulator.steps_per_carrier",
                format!("must be >= {min_steps} (got {})", s.steps_per_carrier),
            ));
        }
        if !(s.reverse_drop_v >= 0.0 && s.reverse_drop_v.is_finite()) {
            return Err(invalid(
                "simulator.reverse_drop_v",
                format!("must be >= 0 (got {})", s.reverse_drop_v),
            ));
        }
        let sim = SimSettings {
            dead_time: s.dead_time,
            steps_per_carrier: s.steps_per_carrier as usize,
            reverse_drop: s.reverse_drop,
            reverse_drop_v: s.reverse_drop_v,
            waveform: s.waveform,
        };
        let step = 1.0 / (f_sw * sim.steps_per_carrier as f64);
        if sim.dead_time > 0.0 && step > sim.dead_time {
            return Err(invalid(
                "simulator.steps_per_carrier",
                format!(
                    "step of {step:e} s cannot resolve the {:e} s dead time",
                    sim.dead_time
                ),
            ));
        }

        let threshold = self.compare.threshold;
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(invalid("compare.threshold", format!("must be >= 0 (got {threshold})")));
        }

        let w = &self.sweep;
        for (key, list) in [("sweep.m", &w.m), ("sweep.cos_phi", &w.cos_phi), ("sweep.i_peak", &w.i_peak)] {
            if list.is_empty() {
                return Err(invalid(key, "grid must not be empty"));
            }
        }
        for &m in &w.m {
            reference
                .check(m)
                .map_err(|e| invalid("sweep.m", e.to_string()))?;
        }
        for &c in &w.cos_phi {
            check_cos_phi("sweep.cos_phi", c)?;
        }
        for &i in &w.i_peak {
            if !(i >= 0.0 && i.is_finite()) {
                return Err(invalid("sweep.i_peak", format!("must be >= 0 (got {i})")));
            }
        }
        let mut grid = Vec::new();
        for &m in &w.m {
            for &cos_phi in &w.cos_phi {
                for &i_peak in &w.i_peak {
                    grid.push(GridPoint { m, cos_phi, i_peak });
                }
            }
        }

        if self.patterns.steps < 2 {
            return Err(invalid("patterns.steps", format!("must be >= 2 (got {})", self.patterns.steps)));
        }
        if self.output.dir.is_empty() {
            return Err(invalid("output.dir", "must not be empty"));
        }

        Ok(Scenario {
            model,
            operating_point,
            strategies,
            reference,
            sim,
            threshold,
            grid,
            sweep_simulate: w.simulate,
            pattern_steps: self.patterns.steps as usize,
            out_dir: PathBuf::from(&self.output.dir),
        })
    }
}
