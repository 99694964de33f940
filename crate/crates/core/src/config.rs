//! Flat `key = value` configuration with `#` comments.
//!
//! Values from the file are overridden by `set` (command-line flags); keys
//! missing from both fall back to the defaults of [`SimulationConfig::new`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{MuskatError, Result};
use crate::evolve::{InitialDataSpec, MonitorMode, Scheme, SimulationConfig};
use crate::rhs::{QuadratureConfig, SingularRule};
use crate::series::SeriesConstants;
use crate::spectral::GridSpec;

pub const KNOWN_KEYS: &[&str] = &[
    "d",
    "n",
    "length",
    "t_end",
    "cfl",
    "record_every",
    "s_list",
    "nu_list",
    "sobolev_order",
    "dealias",
    "linear_only",
    "scheme",
    "monitors",
    "initial.kind",
    "initial.amplitude",
    "initial.k_min",
    "initial.k_max",
    "initial.exponent",
    "initial.seed",
    "quad.image_count",
    "quad.max_n",
    "quad.delta",
    "quad.singular_rule",
    "quad.rho_jump",
];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    /// Source line, 0 for overrides.
    line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, Entry>,
}

fn check_key(key: &str) -> std::result::Result<(), String> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(format!("unknown key '{key}'"))
    }
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fail = |message: String| MuskatError::ConfigLine { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| fail(format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            check_key(key).map_err(fail)?;
            if value.is_empty() {
                return Err(fail(format!("empty value for '{key}'")));
            }
            if let Some(prev) = map.entries.get(key) {
                return Err(fail(format!("duplicate key '{key}' (first set on line {})", prev.line)));
            }
            map.entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| MuskatError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overrides a key, as a command-line flag does.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key).map_err(MuskatError::Config)?;
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                line: 0,
            },
        );
        Ok(())
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| MuskatError::config(format!("override '{pair}' is not key=value")))?;
        self.set(k.trim(), v)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn error(&self, key: &str, message: String) -> MuskatError {
        match self.entries.get(key) {
            Some(e) if e.line > 0 => MuskatError::ConfigLine {
                line: e.line,
                message: format!("{key}: {message}"),
            },
            _ => MuskatError::config(format!("{key}: {message}")),
        }
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse(v).map(Some).map_err(|m| self.error(key, m)),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.parsed(key, parse_f64)
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.parsed(key, |v| v.parse::<usize>().map_err(|e| format!("'{v}': {e}")))
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.parsed(key, |v| match v {
            "true" | "on" | "yes" | "1" => Ok(true),
            "false" | "off" | "no" | "0" => Ok(false),
            _ => Err(format!("'{v}' is not a boolean")),
        })
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.parsed(key, |v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_f64)
                .collect()
        })
    }

    fn get_enum<T: FromStr<Err = MuskatError>>(&self, key: &str) -> Result<Option<T>> {
        self.parsed(key, |v| v.parse::<T>().map_err(|e| e.to_string()))
    }

    /// Assembles a validated simulation configuration.
    pub fn simulation(&self) -> Result<SimulationConfig> {
        let d = self.get_usize("d")?.unwrap_or(1);
        let n = self.get_usize("n")?.unwrap_or(256);
        let length = self.get_f64("length")?.unwrap_or(2.0 * PI);
        let grid = GridSpec::new(d, n, length).map_err(|e| self.error(grid_key(self), e.to_string()))?;

        let mut initial = InitialDataSpec::default();
        if let Some(k) = self.get_enum("initial.kind")? {
            initial.kind = k;
        }
        if let Some(v) = self.get_f64("initial.amplitude")? {
            initial.amplitude = v;
        }
        if let Some(v) = self.get_usize("initial.k_min")? {
            initial.k_min = to_u32(self, "initial.k_min", v)?;
        }
        if let Some(v) = self.get_usize("initial.k_max")? {
            initial.k_max = to_u32(self, "initial.k_max", v)?;
        }
        if let Some(v) = self.get_f64("initial.exponent")? {
            initial.exponent = v;
        }
        if let Some(v) = self.get_usize("initial.seed")? {
            initial.seed = v as u64;
        }

        let mut cfg = SimulationConfig::new(grid, initial);
        let mut quad = QuadratureConfig::default();
        if let Some(v) = self.get_usize("quad.image_count")? {
            quad.image_count = v;
        }
        if let Some(v) = self.get_enum::<SingularRule>("quad.singular_rule")? {
            quad.singular_rule = Some(v);
        }
        if let Some(v) = self.get_f64("quad.rho_jump")? {
            quad.rho_jump = v;
        }
        cfg.quad = quad;
        if let Some(v) = self.get_f64("t_end")? {
            cfg.t_end = v;
        }
        if let Some(v) = self.get_f64("cfl")? {
            cfg.cfl = v;
        }
        if let Some(v) = self.get_usize("record_every")? {
            cfg.record_every = v;
        }
        if let Some(v) = self.get_list("s_list")? {
            cfg.s_list = v;
        }
        if let Some(v) = self.get_list("nu_list")? {
            cfg.nu_list = v;
        }
        if let Some(v) = self.get_f64("sobolev_order")? {
            cfg.sobolev_order = v;
        }
        if let Some(v) = self.get_bool("dealias")? {
            cfg.dealias = v;
        }
        if let Some(v) = self.get_bool("linear_only")? {
            cfg.linear_only = v;
        }
        if let Some(v) = self.get_enum::<Scheme>("scheme")? {
            cfg.scheme = v;
        }
        if let Some(v) = self.get_enum::<MonitorMode>("monitors")? {
            cfg.monitors = v;
        }
        cfg.series_max_n = self.series()?.max_n;

        if !(cfg.cfl > 0.0 && cfg.cfl <= 0.5) {
            return Err(self.error("cfl", format!("must lie in (0, 0.5], got {}", cfg.cfl)));
        }
        if !(cfg.t_end.is_finite() && cfg.t_end >= 0.0) {
            return Err(self.error("t_end", format!("must be >= 0, got {}", cfg.t_end)));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Series truncation and admissibility exponent (`quad.max_n`, `quad.delta`).
    pub fn series(&self) -> Result<SeriesConstants> {
        let base = SeriesConstants::default();
        let max_n = self.get_usize("quad.max_n")?.unwrap_or(base.max_n);
        let delta = self.get_f64("quad.delta")?.unwrap_or(base.delta);
        SeriesConstants::new(max_n, delta).map_err(|e| {
            let key = if self.raw("quad.delta").is_some() { "quad.delta" } else { "quad.max_n" };
            self.error(key, e.to_string())
        })
    }
}

fn grid_key(map: &ConfigMap) -> &'static str {
    ["n", "length", "d"]
        .into_iter()
        .find(|k| map.raw(k).is_some())
        .unwrap_or("n")
}

fn to_u32(map: &ConfigMap, key: &str, v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| map.error(key, format!("{v} is too large")))
}

/// A float, optionally with a `pi` factor: `2pi`, `2*pi`, `pi`.
fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    let v = v.trim();
    if let Some(head) = v.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().map_err(|e| format!("'{v}': {e}"))?
        };
        return Ok(factor * PI);
    }
    v.parse::<f64>().map_err(|e| format!("'{v}': {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::InitialKind;

    const SAMPLE: &str = "\
# curve interface
d = 1
n = 64          # grid points per side
length = 2pi
t_end = 1.5
s_list = 0, 1, 2.5
initial.kind = random-band
initial.k_max = 6
initial.seed = 9
quad.singular_rule = removable-limit
";

    #[test]
    fn parses_sample() {
        let cfg = ConfigMap::parse(SAMPLE).unwrap().simulation().unwrap();
        assert_eq!(cfg.grid.n(), 64);
        assert!((cfg.grid.length() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(cfg.t_end, 1.5);
        assert_eq!(cfg.s_list, vec![0.0, 1.0, 2.5]);
        assert_eq!(cfg.initial.kind, InitialKind::RandomBand);
        assert_eq!(cfg.initial.seed, 9);
        assert_eq!(cfg.quad.singular_rule, Some(SingularRule::RemovableLimit));
        assert_eq!(cfg.cfl, 0.25);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ConfigMap::parse("n = 32\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, MuskatError::ConfigLine { line: 2, .. }), "{err}");
        let err = ConfigMap::parse("n = 32\n\ncfl = 0.9\n").unwrap().simulation().unwrap_err();
        assert!(matches!(err, MuskatError::ConfigLine { line: 3, .. }), "{err}");
        let err = ConfigMap::parse("n = x\n").unwrap().simulation().unwrap_err();
        assert!(matches!(err, MuskatError::ConfigLine { line: 1, .. }));
        assert!(ConfigMap::parse("n 32\n").is_err());
        assert!(ConfigMap::parse("n = 32\nn = 64\n").is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut map = ConfigMap::parse("n = 64\ncfl = 0.9\n").unwrap();
        map.set_pair("cfl=0.1").unwrap();
        let cfg = map.simulation().unwrap();
        assert_eq!(cfg.cfl, 0.1);
        assert!(map.set("nope", "1").is_err());
        map.set("cfl", "0.7").unwrap();
        assert!(matches!(map.simulation(), Err(MuskatError::Config(_))));
    }

    #[test]
    fn pi_values() {
        assert_eq!(parse_f64("pi").unwrap(), PI);
        assert_eq!(parse_f64("4*pi").unwrap(), 4.0 * PI);
        assert!(parse_f64("xpi").is_err());
    }
}
