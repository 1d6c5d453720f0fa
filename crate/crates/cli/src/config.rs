//! Scenario configuration: a flat key-value format with section headers.
//!
//! ```text
//! # comment lines start with '#' or ';'
//! [scenario]
//! name = pattern-1d
//!
//! [params]
//! a = 0.2          # sets a1 = a2; a1/a2 override individually
//! chi = 20         # sets chi1 = chi2; 'eps' instead derives chi = chi* + eps
//! L = 30
//! dim = 1
//!
//! [grid]
//! n = 300
//!
//! [time]
//! dt = 0.05
//! t_end = 200
//! snapshots = 0, 100, 200
//!
//! [initial]
//! kind = mode-perturbation
//! a0 = 0.01
//!
//! [solver]
//! elliptic_tol = 1e-10
//! tol_neg = 1e-8
//! front_level = 0.5
//!
//! [output]
//! dir = out/pattern-1d
//! ```
//!
//! Every scenario name carries a complete default parameter set (the
//! experiments the solver reproduces); a config only has to override what
//! differs. Unknown sections or keys are rejected by name.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chemcomp_core::stability;
use chemcomp_core::stepper::SchemeConfig;
use chemcomp_core::{CoreError, Dim, Params};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("unknown key `{key}` in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("invalid value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("config validation failed: {0}")]
    Core(#[from] CoreError),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

/// The experiments the harness knows how to set up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Near-onset run measuring the amplitude of the critical mode against
    /// the amplitude-equation prediction (1D, symmetric coefficients).
    AmplitudeVerify,
    /// Far-above-threshold periodic pattern formation on a long interval.
    Pattern1d,
    /// Segregated initial blocks colliding into a traveling interface.
    TravelingWave,
    /// Nested compactly-supported blocks spreading into alternating clusters.
    FrontPropagation,
    /// Near-onset pattern on the square (2D critical mode perturbation).
    Pattern2d,
    /// Concentric Gaussian data under strong competition and chemotaxis (2D).
    Gaussian2d,
    /// No defaults; everything explicit.
    Custom,
}

impl ScenarioKind {
    fn parse(name: &str) -> Option<ScenarioKind> {
        match name {
            "amplitude-verify" => Some(ScenarioKind::AmplitudeVerify),
            "pattern-1d" => Some(ScenarioKind::Pattern1d),
            "traveling-wave" => Some(ScenarioKind::TravelingWave),
            "front-propagation" => Some(ScenarioKind::FrontPropagation),
            "pattern-2d" => Some(ScenarioKind::Pattern2d),
            "gaussian-2d" => Some(ScenarioKind::Gaussian2d),
            "custom" => Some(ScenarioKind::Custom),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::AmplitudeVerify => "amplitude-verify",
            ScenarioKind::Pattern1d => "pattern-1d",
            ScenarioKind::TravelingWave => "traveling-wave",
            ScenarioKind::FrontPropagation => "front-propagation",
            ScenarioKind::Pattern2d => "pattern-2d",
            ScenarioKind::Gaussian2d => "gaussian-2d",
            ScenarioKind::Custom => "custom",
        }
    }
}

/// Initial data builders; the mode-perturbation kinds take the critical mode
/// from the stability analysis, not from the config.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `(u, v) = (ubar, vbar) + a0 cos(k* pi x / L) (1, -1)`, with the
    /// product-cosine analogue on the square.
    ModePerturbation { a0: f64 },
    /// Uniform unit-mass blocks `u` on `[s2, L]`, `v` on `[0, s1]`.
    Segregated { s1: f64, s2: f64 },
    /// Uniform unit-mass blocks on nested intervals `i2` inside `i1`.
    NestedIndicator { i1: (f64, f64), i2: (f64, f64) },
    /// Isotropic Gaussian densities centered mid-domain (2D).
    Gaussian { sigma1_sq: f64, sigma2_sq: f64 },
    Constant { u: f64, v: f64 },
}

/// A fully resolved scenario: model coefficients, grid size, scheme settings,
/// initial condition, and output destination.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub params: Params,
    /// Distance to threshold when chi was given as `eps` (`chi = chi* + eps`).
    pub eps: Option<f64>,
    /// Cells per axis.
    pub n: usize,
    pub scheme: SchemeConfig,
    pub initial: InitialCondition,
    /// Uniform noise amplitude added to the initial data (0 = off).
    pub noise: f64,
    /// Seed of the noise generator; reruns are bit-identical.
    pub seed: u64,
    pub out_dir: PathBuf,
}

#[derive(Default)]
struct RawConfig {
    // section -> key -> (value, line)
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    let mut section: Option<String> = None;
    for (idx, line_raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line_raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ConfigError::Parse {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            section = Some(name.trim().to_string());
            raw.sections.entry(section.clone().unwrap()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let section = section.clone().ok_or(ConfigError::Parse {
            line: line_no,
            msg: "key outside a [section]".into(),
        })?;
        // strip a trailing comment from the value
        let value = value.split('#').next().unwrap_or("").trim().to_string();
        let key = key.trim().to_string();
        if raw
            .sections
            .entry(section.clone())
            .or_default()
            .insert(key.clone(), (value, line_no))
            .is_some()
        {
            return Err(ConfigError::Parse {
                line: line_no,
                msg: format!("duplicate key `{key}` in section [{section}]"),
            });
        }
    }
    Ok(raw)
}

const KNOWN: &[(&str, &[&str])] = &[
    ("scenario", &["name"]),
    (
        "params",
        &["a", "a1", "a2", "chi", "chi1", "chi2", "eps", "d1", "d2", "b1", "b2", "L", "dim"],
    ),
    ("grid", &["n"]),
    ("time", &["dt", "t_end", "snapshots"]),
    (
        "initial",
        &["kind", "a0", "s1", "s2", "i1", "i2", "sigma1_sq", "sigma2_sq", "u0", "v0", "noise", "seed"],
    ),
    ("solver", &["elliptic_tol", "tol_neg", "front_level"]),
    ("output", &["dir"]),
];

fn check_known(raw: &RawConfig) -> Result<(), ConfigError> {
    for (section, keys) in &raw.sections {
        let allowed = KNOWN
            .iter()
            .find(|(s, _)| s == section)
            .map(|(_, k)| *k)
            .ok_or_else(|| ConfigError::UnknownSection(section.clone()))?;
        for key in keys.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    section: section.clone(),
                    key: key.clone(),
                });
            }
        }
    }
    Ok(())
}

struct Getter<'a> {
    raw: &'a RawConfig,
}

impl<'a> Getter<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a str> {
        self.raw
            .sections
            .get(section)
            .and_then(|m| m.get(key))
            .map(|(v, _)| v.as_str())
    }

    fn f64(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(section, key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    msg: format!("`{v}` is not a number"),
                })
            })
            .transpose()
    }

    fn usize(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    msg: format!("`{v}` is not a non-negative integer"),
                })
            })
            .transpose()
    }

    fn u64(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(section, key)
            .map(|v| {
                v.parse::<u64>().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    msg: format!("`{v}` is not a non-negative integer"),
                })
            })
            .transpose()
    }

    fn f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(section, key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| ConfigError::BadValue {
                            key: key.into(),
                            msg: format!("`{s}` is not a number"),
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn pair(&self, section: &str, key: &str) -> Result<Option<(f64, f64)>, ConfigError> {
        match self.f64_list(section, key)? {
            None => Ok(None),
            Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
            Some(v) => Err(ConfigError::BadValue {
                key: key.into(),
                msg: format!("expected two comma-separated numbers, got {}", v.len()),
            }),
        }
    }
}

struct Defaults {
    a: f64,
    chi: Option<f64>,
    eps: Option<f64>,
    length: f64,
    dim: Dim,
    n: usize,
    dt: f64,
    t_end: f64,
    initial: InitialCondition,
}

fn defaults_for(kind: ScenarioKind) -> Option<Defaults> {
    // Desk-scale defaults. The near-onset run needs dx well below 1e-2: the
    // flux dissipation dx^2/(2 dt) acts as extra diffusivity and shifts the
    // instability threshold by about 4.2 dx^2/(2 dt), which must stay small
    // against eps for the amplitude comparison to mean anything.
    Some(match kind {
        ScenarioKind::AmplitudeVerify => Defaults {
            a: 0.2,
            chi: None,
            eps: Some(0.05),
            length: 2.0,
            dim: Dim::One,
            n: 800,
            dt: 0.01,
            t_end: 200.0,
            initial: InitialCondition::ModePerturbation { a0: 1e-2 },
        },
        ScenarioKind::Pattern1d => Defaults {
            a: 0.2,
            chi: Some(20.0),
            eps: None,
            length: 30.0,
            dim: Dim::One,
            n: 300,
            dt: 0.05,
            t_end: 200.0,
            initial: InitialCondition::ModePerturbation { a0: 1e-2 },
        },
        ScenarioKind::TravelingWave => Defaults {
            a: 2.0,
            chi: Some(20.0), // chi2 = 80 applied below
            eps: None,
            length: 100.0,
            dim: Dim::One,
            n: 1000,
            dt: 0.05,
            t_end: 60.0,
            initial: InitialCondition::Segregated { s1: 10.0, s2: 90.0 },
        },
        ScenarioKind::FrontPropagation => Defaults {
            a: 0.2,
            chi: Some(20.0),
            eps: None,
            length: 100.0,
            dim: Dim::One,
            n: 1000,
            dt: 0.05,
            t_end: 10.0,
            initial: InitialCondition::NestedIndicator {
                i1: (45.0, 55.0),
                i2: (48.0, 52.0),
            },
        },
        ScenarioKind::Pattern2d => Defaults {
            a: 0.5,
            chi: Some(4.7),
            eps: None,
            length: 30.0,
            dim: Dim::Two,
            n: 300,
            dt: 0.05,
            t_end: 50.0,
            initial: InitialCondition::ModePerturbation { a0: 0.05 },
        },
        ScenarioKind::Gaussian2d => Defaults {
            a: 2.0,
            chi: Some(100.0),
            eps: None,
            length: 30.0,
            dim: Dim::Two,
            n: 300,
            dt: 0.05,
            t_end: 30.0,
            initial: InitialCondition::Gaussian {
                sigma1_sq: 0.25,
                sigma2_sq: 1.0 / 9.0,
            },
        },
        ScenarioKind::Custom => return None,
    })
}

fn require<T>(value: Option<T>, what: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| ConfigError::Invalid(format!("scenario `custom` requires `{what}`")))
}

/// Parse, apply scenario defaults, and validate.
pub fn load_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw = parse_raw(text)?;
    check_known(&raw)?;
    let get = Getter { raw: &raw };

    let name = get
        .get("scenario", "name")
        .ok_or_else(|| ConfigError::Invalid("missing [scenario] name".into()))?;
    let kind = ScenarioKind::parse(name)
        .ok_or_else(|| ConfigError::BadValue {
            key: "name".into(),
            msg: format!("unknown scenario `{name}`"),
        })?;
    let defaults = defaults_for(kind);

    let dim = match get.usize("params", "dim")? {
        Some(1) => Some(Dim::One),
        Some(2) => Some(Dim::Two),
        Some(d) => {
            return Err(ConfigError::BadValue {
                key: "dim".into(),
                msg: format!("dim must be 1 or 2, got {d}"),
            })
        }
        None => defaults.as_ref().map(|d| d.dim),
    };
    let dim = require(dim, "params.dim")?;
    let length = require(
        get.f64("params", "L")?.or(defaults.as_ref().map(|d| d.length)),
        "params.L",
    )?;

    let a_common = get.f64("params", "a")?.or(defaults.as_ref().map(|d| d.a));
    let a1 = require(get.f64("params", "a1")?.or(a_common), "params.a1 (or a)")?;
    let a2 = require(get.f64("params", "a2")?.or(a_common), "params.a2 (or a)")?;

    // chi may come directly, split per species, or as a distance to threshold
    let chi_common = get.f64("params", "chi")?;
    let chi1_key = get.f64("params", "chi1")?;
    let chi2_key = get.f64("params", "chi2")?;
    let eps_key = get.f64("params", "eps")?;
    if eps_key.is_some() && (chi_common.is_some() || chi1_key.is_some() || chi2_key.is_some()) {
        return Err(ConfigError::Invalid(
            "`eps` and explicit `chi`/`chi1`/`chi2` are mutually exclusive".into(),
        ));
    }
    let default_eps = defaults.as_ref().and_then(|d| d.eps);
    let default_chi = defaults.as_ref().and_then(|d| d.chi);
    let (eps, chi1, chi2);
    if let Some(e) = eps_key.or(if chi_common.or(chi1_key).or(chi2_key).is_none() {
        default_eps
    } else {
        None
    }) {
        if a1 != a2 {
            return Err(ConfigError::Invalid(
                "`eps` needs symmetric competition (a1 = a2) to locate the threshold".into(),
            ));
        }
        let (star, _) = stability::chi_star(a1, length, dim)?;
        eps = Some(e);
        chi1 = star + e;
        chi2 = star + e;
    } else {
        eps = None;
        let base = chi_common.or(default_chi);
        chi1 = require(chi1_key.or(base), "params.chi1 (or chi/eps)")?;
        chi2 = require(
            chi2_key
                .or(if kind == ScenarioKind::TravelingWave && chi2_key.is_none() && chi_common.is_none() {
                    Some(80.0)
                } else {
                    None
                })
                .or(base),
            "params.chi2 (or chi/eps)",
        )?;
    }

    let params = Params {
        d1: get.f64("params", "d1")?.unwrap_or(1.0),
        d2: get.f64("params", "d2")?.unwrap_or(1.0),
        chi1,
        chi2,
        a1,
        a2,
        b1: get.f64("params", "b1")?.unwrap_or(1.0),
        b2: get.f64("params", "b2")?.unwrap_or(1.0),
        length,
        dim,
    };
    params.validate()?;

    let n = require(
        get.usize("grid", "n")?.or(defaults.as_ref().map(|d| d.n)),
        "grid.n",
    )?;

    let dt = require(get.f64("time", "dt")?.or(defaults.as_ref().map(|d| d.dt)), "time.dt")?;
    let t_end = require(
        get.f64("time", "t_end")?.or(defaults.as_ref().map(|d| d.t_end)),
        "time.t_end",
    )?;
    let mut scheme = SchemeConfig::new(dt, t_end);
    if let Some(s) = get.f64_list("time", "snapshots")? {
        scheme.snapshot_times = s;
    }
    if let Some(v) = get.f64("solver", "elliptic_tol")? {
        scheme.elliptic_tol = v;
    }
    if let Some(v) = get.f64("solver", "tol_neg")? {
        scheme.tol_neg = v;
    }
    if let Some(v) = get.f64("solver", "front_level")? {
        scheme.front_level = v;
    }
    scheme.validate()?;

    let initial = match get.get("initial", "kind") {
        None => require(defaults.as_ref().map(|d| d.initial.clone()), "initial.kind")?,
        Some("mode-perturbation") => InitialCondition::ModePerturbation {
            a0: require(
                get.f64("initial", "a0")?.or(defaults.as_ref().and_then(|d| match &d.initial {
                    InitialCondition::ModePerturbation { a0 } => Some(*a0),
                    _ => None,
                })),
                "initial.a0",
            )?,
        },
        Some("segregated") => {
            let (ds1, ds2) = (Some(10.0), Some(90.0));
            InitialCondition::Segregated {
                s1: require(get.f64("initial", "s1")?.or(ds1), "initial.s1")?,
                s2: require(get.f64("initial", "s2")?.or(ds2), "initial.s2")?,
            }
        }
        Some("nested-indicator") => InitialCondition::NestedIndicator {
            i1: require(get.pair("initial", "i1")?.or(Some((45.0, 55.0))), "initial.i1")?,
            i2: require(get.pair("initial", "i2")?.or(Some((48.0, 52.0))), "initial.i2")?,
        },
        Some("gaussian") => InitialCondition::Gaussian {
            sigma1_sq: require(
                get.f64("initial", "sigma1_sq")?.or(Some(0.25)),
                "initial.sigma1_sq",
            )?,
            sigma2_sq: require(
                get.f64("initial", "sigma2_sq")?.or(Some(1.0 / 9.0)),
                "initial.sigma2_sq",
            )?,
        },
        Some("constant") => InitialCondition::Constant {
            u: require(get.f64("initial", "u0")?, "initial.u0")?,
            v: require(get.f64("initial", "v0")?, "initial.v0")?,
        },
        Some(other) => {
            return Err(ConfigError::BadValue {
                key: "kind".into(),
                msg: format!("unknown initial condition `{other}`"),
            })
        }
    };
    validate_initial(&initial, &params)?;

    let out_dir = PathBuf::from(get.get("output", "dir").unwrap_or("out"));

    Ok(ScenarioConfig {
        kind,
        params,
        eps,
        n,
        scheme,
        initial,
        noise: get.f64("initial", "noise")?.unwrap_or(0.0),
        seed: get.u64("initial", "seed")?.unwrap_or(1),
        out_dir,
    })
}

fn validate_initial(initial: &InitialCondition, params: &Params) -> Result<(), ConfigError> {
    let l = params.length;
    match *initial {
        InitialCondition::ModePerturbation { a0 } => {
            if a0.is_nan() || a0 <= 0.0 {
                return Err(ConfigError::Invalid("a0 must be > 0".into()));
            }
        }
        InitialCondition::Segregated { s1, s2 } => {
            if !(0.0 < s1 && s1 < s2 && s2 < l) {
                return Err(ConfigError::Invalid(format!(
                    "segregated supports need 0 < s1 < s2 < L, got s1={s1}, s2={s2}, L={l}"
                )));
            }
            if params.dim != Dim::One {
                return Err(ConfigError::Invalid("segregated data is 1D only".into()));
            }
        }
        InitialCondition::NestedIndicator { i1, i2 } => {
            if !(0.0 <= i1.0 && i1.0 < i2.0 && i2.0 < i2.1 && i2.1 < i1.1 && i1.1 <= l) {
                return Err(ConfigError::Invalid(format!(
                    "need i2 strictly inside i1 inside [0, L], got i1={i1:?}, i2={i2:?}"
                )));
            }
            if params.dim != Dim::One {
                return Err(ConfigError::Invalid("indicator data is 1D only".into()));
            }
        }
        InitialCondition::Gaussian { sigma1_sq, sigma2_sq } => {
            if !(sigma1_sq > 0.0 && sigma2_sq > 0.0) {
                return Err(ConfigError::Invalid("gaussian variances must be > 0".into()));
            }
            if params.dim != Dim::Two {
                return Err(ConfigError::Invalid("gaussian data is 2D only".into()));
            }
        }
        InitialCondition::Constant { u, v } => {
            if !(u >= 0.0 && v >= 0.0) {
                return Err(ConfigError::Invalid("constant data must be non-negative".into()));
            }
        }
    }
    Ok(())
}

pub fn load_config_file(path: &std::path::Path) -> Result<ScenarioConfig, ConfigError> {
    load_config(&std::fs::read_to_string(path)?)
}
