//! Network parameterization, outage targets, and the scenario config file.
//!
//! Everything here is linear scale. The only place a dB value is accepted is
//! [`ConfigOptions::gamma_in_db`], which converts at parse time.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::ops::Deref;

use thiserror::Error;

/// Largest meaningful near-eavesdropper radius: the diagonal of the unit square.
pub const MAX_R0: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("n must be ≥ 2")]
    TooFewRelays,
    #[error("{0} must be finite")]
    NotFinite(&'static str),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("alpha must be ≥ 2")]
    PathLossExponent,
    #[error("{name} must be in [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
}

impl ScenarioError {
    /// Config key of the parameter that violated its invariant.
    pub fn key(&self) -> &'static str {
        match self {
            ScenarioError::TooFewRelays => "n",
            ScenarioError::PathLossExponent => "alpha",
            ScenarioError::NotFinite(k) | ScenarioError::NotPositive(k) | ScenarioError::Negative(k) => k,
            ScenarioError::OutOfRange { name, .. } => name,
        }
    }
}

/// A value whose invariants have been checked. Only the `validate_*`
/// functions construct one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Valid<T>(T);

impl<T> Valid<T> {
    pub fn into_inner(self) -> T {
        self.0
    }
}

impl<T> Deref for Valid<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.0
    }
}

/// Relay selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Best min(source, destination) link.
    Optimal,
    /// Uniform over all relays.
    Random,
    /// Uniform over relays inside the selection rectangle (distance-dependent path loss).
    Region,
}

impl Protocol {
    pub fn id(self) -> u8 {
        match self {
            Protocol::Optimal => 1,
            Protocol::Random => 2,
            Protocol::Region => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Protocol> {
        match id {
            1 => Some(Protocol::Optimal),
            2 => Some(Protocol::Random),
            3 => Some(Protocol::Region),
            _ => None,
        }
    }

    pub fn is_geometric(self) -> bool {
        self == Protocol::Region
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Equal path-loss network: every link has unit distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioEqual {
    pub n: u32,
    pub m: u32,
    pub gamma_r: f64,
    pub gamma_e: f64,
    pub tau: f64,
    pub es: f64,
    pub n0: f64,
}

impl ScenarioEqual {
    /// Unit transmit power and no environment noise.
    pub fn new(n: u32, m: u32, gamma_r: f64, gamma_e: f64, tau: f64) -> Self {
        ScenarioEqual {
            n,
            m,
            gamma_r,
            gamma_e,
            tau,
            es: 1.0,
            n0: 0.0,
        }
    }
}

/// Unit-square coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    /// `None` unless the point lies in the closed unit square.
    pub fn new(x: f64, y: f64) -> Option<Point> {
        ((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)).then_some(Point { x, y })
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Distance-dependent path-loss network on the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioGeo {
    pub base: ScenarioEqual,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub r0: f64,
}

impl ScenarioGeo {
    pub const SOURCE: Point = Point { x: 0.0, y: 0.5 };
    pub const DESTINATION: Point = Point { x: 1.0, y: 0.5 };

    pub fn source(&self) -> Point {
        Self::SOURCE
    }

    pub fn destination(&self) -> Point {
        Self::DESTINATION
    }
}

/// Outage targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirements {
    pub eps_t: f64,
    pub eps_s: f64,
}

fn finite(name: &'static str, v: f64) -> Result<f64, ScenarioError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScenarioError::NotFinite(name))
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), ScenarioError> {
    if finite(name, v)? > 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::NotPositive(name))
    }
}

fn nonnegative(name: &'static str, v: f64) -> Result<(), ScenarioError> {
    if finite(name, v)? >= 0.0 {
        Ok(())
    } else {
        Err(ScenarioError::Negative(name))
    }
}

fn within(name: &'static str, v: f64, lo: f64, hi: f64) -> Result<(), ScenarioError> {
    if (lo..=hi).contains(&finite(name, v)?) {
        Ok(())
    } else {
        Err(ScenarioError::OutOfRange { name, lo, hi })
    }
}

pub fn validate_equal(s: ScenarioEqual) -> Result<Valid<ScenarioEqual>, ScenarioError> {
    if s.n < 2 {
        return Err(ScenarioError::TooFewRelays);
    }
    positive("gamma_r", s.gamma_r)?;
    positive("gamma_e", s.gamma_e)?;
    nonnegative("tau", s.tau)?;
    positive("es", s.es)?;
    nonnegative("n0", s.n0)?;
    Ok(Valid(s))
}

pub fn validate_geo(s: ScenarioGeo) -> Result<Valid<ScenarioGeo>, ScenarioError> {
    validate_equal(s.base)?;
    if finite("alpha", s.alpha)? < 2.0 {
        return Err(ScenarioError::PathLossExponent);
    }
    within("a", s.a, 0.0, 0.5)?;
    within("b", s.b, 0.0, 0.5)?;
    within("r0", s.r0, 0.0, MAX_R0)?;
    Ok(Valid(s))
}

pub fn validate_requirements(r: Requirements) -> Result<Valid<Requirements>, ScenarioError> {
    within("eps_t", r.eps_t, 0.0, 1.0)?;
    within("eps_s", r.eps_s, 0.0, 1.0)?;
    Ok(Valid(r))
}

/// Geometry parameters of a protocol-3 config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoParams {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub r0: f64,
}

/// Parsed scenario config file.
///
/// Geometry keys are optional for protocols 1 and 2 and required for
/// protocol 3. Requirements, trials, and seed are optional everywhere; the
/// commands that need them say so.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub protocol: Protocol,
    pub equal: ScenarioEqual,
    pub geo: Option<GeoParams>,
    pub eps_t: Option<f64>,
    pub eps_s: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: &'static str,
        value: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("missing required key `{key}` for protocol {protocol}")]
    MissingForProtocol { key: &'static str, protocol: Protocol },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: ScenarioError,
    },
}

/// Every key the config file may contain, in serialization order.
pub const CONFIG_KEYS: [&str; 16] = [
    "protocol", "n", "m", "gamma_r", "gamma_e", "tau", "es", "n0", "alpha", "a", "b", "r0", "eps_t",
    "eps_s", "trials", "seed",
];

const GEO_KEYS: [&str; 4] = ["alpha", "a", "b", "r0"];

#[derive(Debug, Clone, Copy, Default)]
pub struct ConfigOptions {
    /// Interpret `gamma_r` and `gamma_e` as dB and convert to linear.
    pub gamma_in_db: bool,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

struct RawEntry<'a> {
    line: usize,
    value: &'a str,
}

struct RawConfig<'a> {
    entries: HashMap<&'static str, RawEntry<'a>>,
}

impl<'a> RawConfig<'a> {
    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn get<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| ConfigError::BadValue {
                line: e.line,
                key,
                value: e.value.to_string(),
            }),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &'static str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or(ConfigError::Missing(key))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        Self::parse_with(text, ConfigOptions::default())
    }

    pub fn parse_with(text: &str, opts: ConfigOptions) -> Result<ScenarioConfig, ConfigError> {
        let mut raw = RawConfig {
            entries: HashMap::new(),
        };
        for (idx, full_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = full_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            let known = CONFIG_KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
            if raw.entries.insert(known, RawEntry { line, value }).is_some() {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
        }

        let protocol_id: u8 = raw.require("protocol")?;
        let protocol = Protocol::from_id(protocol_id).ok_or_else(|| ConfigError::BadValue {
            line: raw.line_of("protocol"),
            key: "protocol",
            value: protocol_id.to_string(),
        })?;

        let mut gamma_r: f64 = raw.require("gamma_r")?;
        let mut gamma_e: f64 = raw.require("gamma_e")?;
        if opts.gamma_in_db {
            gamma_r = db_to_linear(gamma_r);
            gamma_e = db_to_linear(gamma_e);
        }
        let equal = ScenarioEqual {
            n: raw.require("n")?,
            m: raw.require("m")?,
            gamma_r,
            gamma_e,
            tau: raw.require("tau")?,
            es: raw.get("es")?.unwrap_or(1.0),
            n0: raw.get("n0")?.unwrap_or(0.0),
        };

        let present = GEO_KEYS.iter().filter(|k| raw.entries.contains_key(**k)).count();
        let geo = if present == 0 && !protocol.is_geometric() {
            None
        } else {
            let need = |key: &'static str| -> Result<f64, ConfigError> {
                raw.get(key)?
                    .ok_or(ConfigError::MissingForProtocol { key, protocol })
            };
            Some(GeoParams {
                alpha: need("alpha")?,
                a: need("a")?,
                b: need("b")?,
                r0: need("r0")?,
            })
        };

        let cfg = ScenarioConfig {
            protocol,
            equal,
            geo,
            eps_t: raw.get("eps_t")?,
            eps_s: raw.get("eps_s")?,
            trials: raw.get("trials")?,
            seed: raw.get("seed")?,
        };
        cfg.check().map_err(|source| ConfigError::Invalid {
            line: raw.line_of(source.key()),
            source,
        })?;
        Ok(cfg)
    }

    /// Validates every present parameter group.
    pub fn check(&self) -> Result<(), ScenarioError> {
        validate_equal(self.equal)?;
        if let Some(g) = self.geo {
            validate_geo(self.geo_from(g))?;
        }
        if let Some(e) = self.eps_t {
            within("eps_t", e, 0.0, 1.0)?;
        }
        if let Some(e) = self.eps_s {
            within("eps_s", e, 0.0, 1.0)?;
        }
        Ok(())
    }

    fn geo_from(&self, g: GeoParams) -> ScenarioGeo {
        ScenarioGeo {
            base: self.equal,
            alpha: g.alpha,
            a: g.a,
            b: g.b,
            r0: g.r0,
        }
    }

    pub fn scenario_equal(&self) -> Result<Valid<ScenarioEqual>, ScenarioError> {
        validate_equal(self.equal)
    }

    /// `Ok(None)` when the config carries no geometry.
    pub fn scenario_geo(&self) -> Result<Option<Valid<ScenarioGeo>>, ScenarioError> {
        self.geo.map(|g| validate_geo(self.geo_from(g))).transpose()
    }

    /// `Ok(None)` unless both targets are present.
    pub fn requirements(&self) -> Result<Option<Valid<Requirements>>, ScenarioError> {
        match (self.eps_t, self.eps_s) {
            (Some(eps_t), Some(eps_s)) => validate_requirements(Requirements { eps_t, eps_s }).map(Some),
            _ => Ok(None),
        }
    }

    /// Config-file text; `parse` of the result reproduces `self` exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("protocol", self.protocol.id().to_string());
        put("n", self.equal.n.to_string());
        put("m", self.equal.m.to_string());
        put("gamma_r", fmt_f64(self.equal.gamma_r));
        put("gamma_e", fmt_f64(self.equal.gamma_e));
        put("tau", fmt_f64(self.equal.tau));
        put("es", fmt_f64(self.equal.es));
        put("n0", fmt_f64(self.equal.n0));
        if let Some(g) = self.geo {
            put("alpha", fmt_f64(g.alpha));
            put("a", fmt_f64(g.a));
            put("b", fmt_f64(g.b));
            put("r0", fmt_f64(g.r0));
        }
        if let Some(e) = self.eps_t {
            put("eps_t", fmt_f64(e));
        }
        if let Some(e) = self.eps_s {
            put("eps_s", fmt_f64(e));
        }
        if let Some(t) = self.trials {
            put("trials", t.to_string());
        }
        if let Some(s) = self.seed {
            put("seed", s.to_string());
        }
        out
    }

    /// Sets one numeric parameter by config key. Integer keys reject
    /// non-integral values.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<(), String> {
        let as_count = |v: f64| -> Result<u32, String> {
            if v.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&v) {
                Ok(v as u32)
            } else {
                Err(format!("`{key}` needs an integer value, got {v}"))
            }
        };
        fn geo<'a>(cfg: &'a mut ScenarioConfig, key: &str) -> Result<&'a mut GeoParams, String> {
            cfg.geo
                .as_mut()
                .ok_or_else(|| format!("`{key}` is a geometry key and the config has no geometry"))
        }
        match key {
            "n" => self.equal.n = as_count(value)?,
            "m" => self.equal.m = as_count(value)?,
            "gamma_r" => self.equal.gamma_r = value,
            "gamma_e" => self.equal.gamma_e = value,
            "tau" => self.equal.tau = value,
            "es" => self.equal.es = value,
            "n0" => self.equal.n0 = value,
            "alpha" => geo(self, key)?.alpha = value,
            "a" => geo(self, key)?.a = value,
            "b" => geo(self, key)?.b = value,
            "r0" => geo(self, key)?.r0 = value,
            "eps_t" => self.eps_t = Some(value),
            "eps_s" => self.eps_s = Some(value),
            _ => return Err(format!("`{key}` is not a sweepable parameter")),
        }
        Ok(())
    }
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
