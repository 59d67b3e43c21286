//! Experiment configs: a JSON schema walk that reports every violation at
//! once, then typed deserialization of configs that pass it.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qusense_core::metrology::{SensingParams, Strategy, Units};
use qusense_core::register::{DimensionVector, Limits};
use qusense_core::sensing::{CorrelationRun, Mapping, TargetSpinConfig};

/// Seed used when neither the config nor `--seed` sets one.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Digitize,
    Acfield,
    Correlate,
    Fisher,
    Purity,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Digitize,
        Experiment::Acfield,
        Experiment::Correlate,
        Experiment::Fisher,
        Experiment::Purity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Digitize => "digitize",
            Experiment::Acfield => "acfield",
            Experiment::Correlate => "correlate",
            Experiment::Fisher => "fisher",
            Experiment::Purity => "purity",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One schema or precondition violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Dotted path of the offending field (`""` for the document root).
    pub path: String,
    /// `parse_error`, `missing_field`, `unknown_field`, `invalid_type`,
    /// `invalid_value` or `experiment_mismatch`.
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, code: &'static str, message: impl Into<String>) -> Self {
        Diagnostic {
            path: path.into(),
            code,
            message: message.into(),
        }
    }
}

// ---------------------------------------------------------------- schema

#[derive(Debug, Clone, Copy)]
enum Bound {
    Any,
    NonZero,
    Positive,
    NonNegative,
    Unit,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    UInt { min: u64, max: u64 },
    Float(Bound),
    Bool,
    Text,
    OneOf(&'static [&'static str]),
    Array { item: &'static Kind, min: usize, max: usize },
    Object(&'static [Field]),
}

#[derive(Debug, Clone, Copy)]
struct Field {
    name: &'static str,
    kind: Kind,
    required: bool,
    nullable: bool,
}

const fn req(name: &'static str, kind: Kind) -> Field {
    Field {
        name,
        kind,
        required: true,
        nullable: false,
    }
}

const fn opt(name: &'static str, kind: Kind) -> Field {
    Field {
        name,
        kind,
        required: false,
        nullable: false,
    }
}

const fn nullable(name: &'static str, kind: Kind) -> Field {
    Field {
        name,
        kind,
        required: false,
        nullable: true,
    }
}

const EXPERIMENTS: &[&str] = &["digitize", "acfield", "correlate", "fisher", "purity"];
const MAPPINGS: &[&str] = &["qft", "local_h"];
const STRATEGIES: &[&str] = &["sql", "qpea", "noon"];
const MAX: u64 = u64::MAX;

const RADIX: Kind = Kind::UInt { min: 2, max: 64 };
const DIMS: Kind = Kind::Array {
    item: &RADIX,
    min: 1,
    max: 16,
};
const COUNT: Kind = Kind::UInt { min: 1, max: MAX };
const MAPPING: Kind = Kind::OneOf(MAPPINGS);
const MAPPING_LIST: Kind = Kind::Array {
    item: &MAPPING,
    min: 1,
    max: 2,
};

const COMMON: &[Field] = &[
    opt("experiment", Kind::OneOf(EXPERIMENTS)),
    opt("seed", Kind::UInt { min: 0, max: MAX }),
    opt("format", Kind::OneOf(&["csv", "json"])),
    opt("output", Kind::Text),
];

const DIGITIZE: &[Field] = &[
    req("dims", DIMS),
    opt("phase_points", COUNT),
    opt("mappings", MAPPING_LIST),
];

const SPREAD_QUBIT: Kind = Kind::UInt { min: 1, max: 10 };
const SPREAD: &[Field] = &[
    req(
        "qubits",
        Kind::Array {
            item: &SPREAD_QUBIT,
            min: 1,
            max: 10,
        },
    ),
    opt("shots", COUNT),
    opt("trials", Kind::UInt { min: 2, max: MAX }),
];

const ACFIELD: &[Field] = &[
    req("dims", DIMS),
    opt("phase_points", COUNT),
    opt("shots", COUNT),
    opt("spread", Kind::Object(SPREAD)),
];

const COUPLING: Kind = Kind::Float(Bound::Positive);
const SPIN: Kind = Kind::OneOf(&["up", "down", "superposition"]);
const BOOL: Kind = Kind::Bool;
const FIDELITY: Kind = Kind::Float(Bound::Unit);

const TARGETS: &[Field] = &[
    req(
        "couplings_hz",
        Kind::Array {
            item: &COUPLING,
            min: 2,
            max: 2,
        },
    ),
    opt("initial", Kind::Array { item: &SPIN, min: 2, max: 2 }),
    opt("detuning_hz", Kind::Float(Bound::Any)),
];

const RUN: &[Field] = &[
    nullable("tau", Kind::Float(Bound::Positive)),
    opt("tc_start", Kind::Float(Bound::NonNegative)),
    opt("tc_step", Kind::Float(Bound::Positive)),
    opt("tc_points", Kind::UInt { min: 2, max: MAX }),
    nullable("t2_star", Kind::Float(Bound::Positive)),
    opt("evolve", Kind::Array { item: &BOOL, min: 2, max: 2 }),
    opt("ledger", Kind::OneOf(&["double", "single"])),
    nullable(
        "readout_fidelities",
        Kind::Array {
            item: &FIDELITY,
            min: 2,
            max: 2,
        },
    ),
    nullable("shots", COUNT),
    nullable("pad_to", COUNT),
];

const CORRELATE: &[Field] = &[req("targets", Kind::Object(TARGETS)), opt("run", Kind::Object(RUN))];

const FISHER_QUBIT: Kind = Kind::UInt { min: 1, max: 10 };
const STRATEGY: Kind = Kind::OneOf(STRATEGIES);
const SENSING: &[Field] = &[
    req("de_dalpha", Kind::Float(Bound::NonZero)),
    req("tau", Kind::Float(Bound::Positive)),
    req("measurements", COUNT),
    opt("units", Kind::OneOf(&["natural", "si"])),
];

const FISHER: &[Field] = &[
    req(
        "qubits",
        Kind::Array {
            item: &FISHER_QUBIT,
            min: 1,
            max: 10,
        },
    ),
    opt("strategies", Kind::Array { item: &STRATEGY, min: 1, max: 3 }),
    opt("grid_points", Kind::UInt { min: 3, max: MAX }),
    opt("step", Kind::Float(Bound::Positive)),
    opt("sensing", Kind::Object(SENSING)),
];

const PURITY_QUBIT: Kind = Kind::UInt { min: 1, max: 6 };
const PURITY: &[Field] = &[
    req(
        "qubits",
        Kind::Array {
            item: &PURITY_QUBIT,
            min: 1,
            max: 6,
        },
    ),
    opt("phase_points", COUNT),
    opt("mappings", MAPPING_LIST),
];

fn fields_of(e: Experiment) -> &'static [Field] {
    match e {
        Experiment::Digitize => DIGITIZE,
        Experiment::Acfield => ACFIELD,
        Experiment::Correlate => CORRELATE,
        Experiment::Fisher => FISHER,
        Experiment::Purity => PURITY,
    }
}

fn join(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn check_value(path: &str, kind: &Kind, v: &Value, out: &mut Vec<Diagnostic>) {
    let wrong = |expected: &str| {
        Diagnostic::new(path, "invalid_type", format!("expected {expected}, found {}", type_name(v)))
    };
    match *kind {
        Kind::UInt { min, max } => match v.as_u64() {
            Some(x) if x < min || x > max => {
                let range = if max == MAX {
                    format!("at least {min}")
                } else {
                    format!("in {min}..={max}")
                };
                out.push(Diagnostic::new(path, "invalid_value", format!("must be {range}, got {x}")));
            }
            Some(_) => {}
            None if v.as_i64().is_some() => {
                out.push(Diagnostic::new(path, "invalid_value", format!("must be non-negative, got {v}")))
            }
            None => out.push(wrong("non-negative integer")),
        },
        Kind::Float(bound) => match v.as_f64() {
            Some(x) => {
                let (ok, rule) = match bound {
                    Bound::Any => (true, ""),
                    Bound::NonZero => (x != 0.0, "must be nonzero"),
                    Bound::Positive => (x > 0.0, "must be positive"),
                    Bound::NonNegative => (x >= 0.0, "must be non-negative"),
                    Bound::Unit => ((0.0..=1.0).contains(&x), "must lie in [0, 1]"),
                };
                if !ok {
                    out.push(Diagnostic::new(path, "invalid_value", format!("{rule}, got {x}")));
                }
            }
            None => out.push(wrong("number")),
        },
        Kind::Bool => {
            if !v.is_boolean() {
                out.push(wrong("boolean"));
            }
        }
        Kind::Text => {
            if !v.is_string() {
                out.push(wrong("string"));
            }
        }
        Kind::OneOf(options) => match v.as_str() {
            Some(s) if options.contains(&s) => {}
            Some(s) => out.push(Diagnostic::new(
                path,
                "invalid_value",
                format!("'{s}' is not one of {}", options.join(", ")),
            )),
            None => out.push(wrong("string")),
        },
        Kind::Array { item, min, max } => match v.as_array() {
            Some(items) => {
                if items.len() < min || items.len() > max {
                    let want = if min == max {
                        format!("exactly {min}")
                    } else {
                        format!("{min} to {max}")
                    };
                    out.push(Diagnostic::new(
                        path,
                        "invalid_value",
                        format!("needs {want} entries, got {}", items.len()),
                    ));
                }
                for (i, x) in items.iter().enumerate() {
                    check_value(&format!("{path}[{i}]"), item, x, out);
                }
            }
            None => out.push(wrong("array")),
        },
        Kind::Object(fields) => match v.as_object() {
            Some(_) => check_object(path, &[fields], v, out),
            None => out.push(wrong("object")),
        },
    }
}

fn check_object(path: &str, groups: &[&[Field]], v: &Value, out: &mut Vec<Diagnostic>) {
    let map = v.as_object().expect("caller checked object");
    let known = |k: &str| groups.iter().flat_map(|g| g.iter()).find(|f| f.name == k);
    for (k, x) in map {
        match known(k) {
            None => out.push(Diagnostic::new(join(path, k), "unknown_field", format!("unknown field '{k}'"))),
            Some(f) if x.is_null() && f.nullable => {}
            Some(f) => check_value(&join(path, k), &f.kind, x, out),
        }
    }
    for f in groups.iter().flat_map(|g| g.iter()) {
        if f.required && !map.contains_key(f.name) {
            out.push(Diagnostic::new(
                join(path, f.name),
                "missing_field",
                format!("missing required field '{}'", f.name),
            ));
        }
    }
}

// ---------------------------------------------------------------- typed configs

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitizeConfig {
    pub dims: Vec<usize>,
    #[serde(default = "default_digitize_points")]
    pub phase_points: usize,
    #[serde(default = "all_mappings")]
    pub mappings: Vec<Mapping>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadConfig {
    pub qubits: Vec<usize>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcFieldConfig {
    pub dims: Vec<usize>,
    #[serde(default = "default_acfield_points")]
    pub phase_points: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    pub spread: Option<SpreadConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateConfig {
    pub targets: TargetSpinConfig,
    #[serde(default)]
    pub run: CorrelationRun,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingConfig {
    pub de_dalpha: f64,
    pub tau: f64,
    pub measurements: u64,
    #[serde(default)]
    pub units: Units,
}

impl SensingConfig {
    pub fn params(&self, n: usize) -> SensingParams {
        SensingParams {
            de_dalpha: self.de_dalpha,
            tau: self.tau,
            measurements: self.measurements,
            n,
            units: self.units,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FisherConfig {
    pub qubits: Vec<usize>,
    #[serde(default = "all_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    pub sensing: Option<SensingConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurityConfig {
    pub qubits: Vec<usize>,
    #[serde(default = "default_purity_points")]
    pub phase_points: usize,
    #[serde(default = "all_mappings")]
    pub mappings: Vec<Mapping>,
}

fn default_digitize_points() -> usize {
    120
}

fn default_acfield_points() -> usize {
    240
}

fn default_purity_points() -> usize {
    qusense_core::noise::DEFAULT_PURITY_GRID
}

fn default_shots() -> u64 {
    10_000
}

fn default_trials() -> usize {
    2_000
}

fn default_grid_points() -> usize {
    qusense_core::metrology::DEFAULT_GRID_POINTS
}

fn default_step() -> f64 {
    qusense_core::metrology::DEFAULT_STEP
}

fn all_mappings() -> Vec<Mapping> {
    Mapping::ALL.to_vec()
}

fn all_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Settings {
    Digitize(DigitizeConfig),
    Acfield(AcFieldConfig),
    Correlate(CorrelateConfig),
    Fisher(FisherConfig),
    Purity(PurityConfig),
}

/// A validated config.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<String>,
    pub settings: Settings,
}

fn split_common(v: &Value) -> (Value, Option<u64>, Option<Format>, Option<String>) {
    let mut body = v.clone();
    let map = body.as_object_mut().expect("validated object");
    map.remove("experiment");
    let seed = map.remove("seed").and_then(|s| s.as_u64());
    let format = map
        .remove("format")
        .map(|f| if f == "json" { Format::Json } else { Format::Csv });
    let output = map.remove("output").and_then(|o| o.as_str().map(str::to_string));
    (body, seed, format, output)
}

fn typed<T: for<'de> Deserialize<'de>>(body: Value) -> Result<T, Vec<Diagnostic>> {
    serde_json::from_value(body).map_err(|e| vec![Diagnostic::new("", "invalid_value", e.to_string())])
}

/// Preconditions that the schema cannot express.
fn semantic_checks(settings: &Settings, out: &mut Vec<Diagnostic>) {
    let dims_check = |dims: &[usize], out: &mut Vec<Diagnostic>| {
        let checked = DimensionVector::new(dims.to_vec()).and_then(|d| Limits::default().check_dense(d.total()));
        if let Err(e) = checked {
            out.push(Diagnostic::new("dims", "invalid_value", e.to_string()));
        }
    };
    match settings {
        Settings::Digitize(c) => dims_check(&c.dims, out),
        Settings::Acfield(c) => dims_check(&c.dims, out),
        Settings::Correlate(c) => {
            if let Err(e) = c.targets.validate() {
                out.push(Diagnostic::new("targets", "invalid_value", e.to_string()));
            }
            if let Err(e) = c.run.validate() {
                out.push(Diagnostic::new("run", "invalid_value", e.to_string()));
            }
        }
        Settings::Fisher(_) | Settings::Purity(_) => {}
    }
}

/// Parses and validates `text`. `expected` is the experiment named on the
/// command line, if any; without it the config must name its experiment.
pub fn parse(text: &str, expected: Option<Experiment>) -> Result<Config, Vec<Diagnostic>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| vec![Diagnostic::new("", "parse_error", format!("invalid JSON: {e}"))])?;
    if !v.is_object() {
        return Err(vec![Diagnostic::new(
            "",
            "invalid_type",
            format!("expected object, found {}", type_name(&v)),
        )]);
    }
    let named = v.get("experiment").and_then(Value::as_str).and_then(Experiment::from_name);
    let mut diags = Vec::new();
    let experiment = match (expected, named) {
        (Some(e), Some(n)) if e != n => {
            diags.push(Diagnostic::new(
                "experiment",
                "experiment_mismatch",
                format!("config is for '{n}' but '{e}' was requested"),
            ));
            e
        }
        (Some(e), _) | (None, Some(e)) => e,
        (None, None) => {
            if v.get("experiment").is_none() {
                diags.push(Diagnostic::new(
                    "experiment",
                    "missing_field",
                    "missing required field 'experiment'",
                ));
            } else {
                check_value("experiment", &Kind::OneOf(EXPERIMENTS), &v["experiment"], &mut diags);
            }
            return Err(diags);
        }
    };
    check_object("", &[COMMON, fields_of(experiment)], &v, &mut diags);
    if !diags.is_empty() {
        return Err(diags);
    }

    let (body, seed, format, output) = split_common(&v);
    let settings = match experiment {
        Experiment::Digitize => Settings::Digitize(typed(body)?),
        Experiment::Acfield => Settings::Acfield(typed(body)?),
        Experiment::Correlate => Settings::Correlate(typed(body)?),
        Experiment::Fisher => Settings::Fisher(typed(body)?),
        Experiment::Purity => Settings::Purity(typed(body)?),
    };
    semantic_checks(&settings, &mut diags);
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Config {
        experiment,
        seed,
        format,
        output,
        settings,
    })
}
