//! `key = value` configuration files with `[section]` headers.
//!
//! ```text
//! [channel]
//! nx = 16
//! ny = 16
//! nz = 33
//! beta = 0.5
//!
//! [model]
//! kind = lns-alpha
//! alpha = 0.01
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use alphaflow::domain::ChannelConfig;
use alphaflow::solver::{InitialCondition, ModelKind, SimConfig};

use crate::CliError;

const KEYS: &[(&str, &[&str])] = &[
    ("channel", &["lx", "ly", "nx", "ny", "nz", "beta", "nu", "dealias"]),
    ("model", &["kind", "alpha"]),
    ("run", &["dt", "t_end", "modes", "snapshot_every", "nonlinear"]),
    ("initial", &["kind", "amplitude", "perturbation", "seed", "index", "path"]),
];

const REQUIRED: &[(&str, &str)] = &[("channel", "nx"), ("channel", "ny"), ("channel", "nz"), ("channel", "beta")];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw `(section, key) -> value` table with source lines.
#[derive(Debug, Default)]
struct Table {
    entries: BTreeMap<(String, String), Entry>,
}

fn err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

fn strip_comment(s: &str) -> &str {
    match s.find(['#', ';']) {
        Some(i) => &s[..i],
        None => s,
    }
}

fn parse_table(text: &str) -> Result<Table, CliError> {
    let mut table = Table::default();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = strip_comment(raw).trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| err(line, "unterminated section header"))?.trim();
            if !KEYS.iter().any(|(sec, _)| *sec == name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (k, v) = s.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, got `{s}`")))?;
        let (k, v) = (k.trim(), v.trim().trim_matches('"'));
        let sec = section.as_deref().ok_or_else(|| err(line, format!("key `{k}` appears before any section")))?;
        let allowed = KEYS.iter().find(|(name, _)| *name == sec).map(|(_, keys)| *keys).unwrap_or(&[]);
        if !allowed.contains(&k) {
            return Err(err(line, format!("unknown key `{k}` in [{sec}]")));
        }
        if v.is_empty() {
            return Err(err(line, format!("empty value for `{k}`")));
        }
        let key = (sec.to_string(), k.to_string());
        if let Some(prev) = table.entries.get(&key) {
            return Err(err(line, format!("duplicate key `{k}` (first set on line {})", prev.line)));
        }
        table.entries.insert(key, Entry { value: v.to_string(), line });
    }
    for (sec, k) in REQUIRED {
        if !table.entries.contains_key(&(sec.to_string(), k.to_string())) {
            return Err(CliError::Config(format!("missing required key `{k}` in [{sec}]")));
        }
    }
    Ok(table)
}

impl Table {
    fn get(&self, sec: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(sec.to_string(), key.to_string()))
    }

    fn parse<T: std::str::FromStr>(&self, sec: &str, key: &str) -> Result<Option<(T, usize)>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(sec, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(|v| Some((v, e.line)))
                .map_err(|x| err(e.line, format!("invalid value `{}` for `{key}`: {x}", e.value))),
        }
    }

    fn number(&self, sec: &str, key: &str, default: f64, ok: fn(f64) -> bool, rule: &str) -> Result<f64, CliError> {
        match self.parse::<f64>(sec, key)? {
            None => Ok(default),
            Some((v, _)) if v.is_finite() && ok(v) => Ok(v),
            Some((v, line)) => Err(err(line, format!("{key} = {v} violates {rule}"))),
        }
    }

    fn count(&self, sec: &str, key: &str, default: usize, ok: fn(usize) -> bool, rule: &str) -> Result<usize, CliError> {
        match self.parse::<usize>(sec, key)? {
            None => Ok(default),
            Some((v, _)) if ok(v) => Ok(v),
            Some((v, line)) => Err(err(line, format!("{key} = {v} violates {rule}"))),
        }
    }

    fn flag(&self, sec: &str, key: &str, default: bool) -> Result<bool, CliError> {
        Ok(self.parse::<bool>(sec, key)?.map_or(default, |(v, _)| v))
    }

    fn line(&self, sec: &str, key: &str) -> Option<usize> {
        self.get(sec, key).map(|e| e.line)
    }
}

/// Parse configuration text; relative file paths resolve against `base`.
pub fn parse_config_text(text: &str, base: &Path) -> Result<SimConfig, CliError> {
    let t = parse_table(text)?;
    let d = ChannelConfig::default();
    let pos = |v: f64| v > 0.0;
    let nonneg = |v: f64| v >= 0.0;
    let even = |n: usize| n > 0 && n % 2 == 0;
    let channel = ChannelConfig {
        lx: t.number("channel", "lx", d.lx, pos, "lx > 0")?,
        ly: t.number("channel", "ly", d.ly, pos, "ly > 0")?,
        nx: t.count("channel", "nx", d.nx, even, "nx even and positive")?,
        ny: t.count("channel", "ny", d.ny, even, "ny even and positive")?,
        nz: t.count("channel", "nz", d.nz, |n| n >= 3, "nz >= 3")?,
        beta: t.number("channel", "beta", d.beta, nonneg, "beta >= 0")?,
        nu: t.number("channel", "nu", d.nu, pos, "nu > 0")?,
        dealias: t.flag("channel", "dealias", d.dealias)?,
    };

    let alpha = t.number("model", "alpha", 0.01, nonneg, "alpha >= 0")?;
    let kind_line = t.line("model", "kind");
    let model = match t.get("model", "kind").map(|e| e.value.as_str()).unwrap_or("lns-alpha") {
        "ns" => ModelKind::Ns,
        "lns-alpha" => ModelKind::LnsAlpha(alpha),
        "leray-alpha" if alpha > 0.0 => ModelKind::LerayAlpha(alpha),
        "leray-alpha" => {
            return Err(err(t.line("model", "alpha").or(kind_line).unwrap_or(0), "leray-alpha needs alpha > 0"))
        }
        other => {
            return Err(err(kind_line.unwrap_or(0), format!("unknown model `{other}` (ns, lns-alpha, leray-alpha)")))
        }
    };

    let defaults = SimConfig::default();
    let dt = t.number("run", "dt", defaults.dt, pos, "dt > 0")?;
    let t_end = t.number("run", "t_end", defaults.t_end, nonneg, "t_end >= 0")?;
    let modes = t.parse::<usize>("run", "modes")?;
    if let Some((0, line)) = modes {
        return Err(err(line, "modes = 0 violates modes >= 1"));
    }
    let snapshot_every = t.count("run", "snapshot_every", 0, |_| true, "")?;
    let nonlinear = t.flag("run", "nonlinear", true)?;

    let ikind_line = t.line("initial", "kind");
    let initial = match t.get("initial", "kind").map(|e| e.value.as_str()).unwrap_or("taylor-green") {
        "zero" => InitialCondition::Zero,
        "taylor-green" => InitialCondition::TaylorGreen {
            amplitude: t.number("initial", "amplitude", 1.0, |_| true, "")?,
            perturbation: t.number("initial", "perturbation", 0.05, |_| true, "")?,
            seed: t.parse::<u64>("initial", "seed")?.map_or(7, |v| v.0),
        },
        "mode" => InitialCondition::Mode {
            index: t.count("initial", "index", 0, |_| true, "")?,
            amplitude: t.number("initial", "amplitude", 1.0, |_| true, "")?,
        },
        "file" => {
            let e = t
                .get("initial", "path")
                .ok_or_else(|| err(ikind_line.unwrap_or(0), "initial kind `file` needs a `path`"))?;
            let p = PathBuf::from(&e.value);
            InitialCondition::File(if p.is_absolute() { p } else { base.join(p) })
        }
        other => {
            return Err(err(
                ikind_line.unwrap_or(0),
                format!("unknown initial condition `{other}` (zero, taylor-green, mode, file)"),
            ))
        }
    };

    let cfg = SimConfig { channel, model, modes: modes.map(|m| m.0), dt, t_end, initial, snapshot_every, nonlinear };
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_text(&text, base).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
