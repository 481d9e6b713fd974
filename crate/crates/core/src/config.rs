//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Recognised keys are exactly `gamma`, `gamma41`, `gamma42`, `K`, `omega21`,
//! `Omega_C`, `Delta_C`, `theta` and `omega41`. Keys that are absent keep the
//! value of the base configuration they are applied to.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::SystemConfig;

pub const KEYS: [&str; 9] = [
    "gamma", "gamma41", "gamma42", "K", "omega21", "Omega_C", "Delta_C", "theta", "omega41",
];

fn slot<'a>(cfg: &'a mut SystemConfig, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "gamma" => &mut cfg.gamma,
        "gamma41" => &mut cfg.gamma41,
        "gamma42" => &mut cfg.gamma42,
        "K" => &mut cfg.k,
        "omega21" => &mut cfg.omega21,
        "Omega_C" => &mut cfg.omega_c,
        "Delta_C" => &mut cfg.delta_c,
        "theta" => &mut cfg.theta,
        "omega41" => &mut cfg.omega41,
        _ => return None,
    })
}

/// Sets a single named parameter. Returns `false` for an unknown key.
pub fn set_value(cfg: &mut SystemConfig, key: &str, value: f64) -> bool {
    match slot(cfg, key) {
        Some(v) => {
            *v = value;
            true
        }
        None => false,
    }
}

pub fn get_value(cfg: &SystemConfig, key: &str) -> Option<f64> {
    let mut copy = *cfg;
    slot(&mut copy, key).map(|v| *v)
}

/// Parses configuration text on top of `base` and validates the result.
pub fn parse_with_base(text: &str, base: SystemConfig) -> Result<SystemConfig> {
    let mut cfg = base;
    let mut seen = [false; KEYS.len()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let pos = KEYS.iter().position(|k| *k == key).ok_or_else(|| Error::Config {
            line,
            msg: format!("unknown key `{key}`"),
        })?;
        if seen[pos] {
            return Err(Error::Config {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        seen[pos] = true;
        let number: f64 = value.parse().map_err(|_| Error::Config {
            line,
            msg: format!("`{value}` is not a number"),
        })?;
        set_value(&mut cfg, key, number);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse(text: &str) -> Result<SystemConfig> {
    parse_with_base(text, SystemConfig::default())
}

pub fn load(path: impl AsRef<Path>) -> Result<SystemConfig> {
    parse(&std::fs::read_to_string(path)?)
}

/// Renders every key with round-trip precision.
pub fn to_string(cfg: &SystemConfig) -> String {
    let mut out = String::from("# tripod medium configuration, frequencies in units of gamma\n");
    for key in KEYS {
        let v = get_value(cfg, key).expect("known key");
        let _ = writeln!(out, "{key} = {v:?}");
    }
    out
}

pub fn save(cfg: &SystemConfig, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_string(cfg))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_partial_files() {
        let text = "# medium\nK = 10   # dense\n\n  theta=0.39269908169872414\n";
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.k, 10.0);
        assert_eq!(cfg.theta, std::f64::consts::FRAC_PI_8);
        assert_eq!(cfg.omega_c, 2.0);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(parse("K 10"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse("\nk = 1"), Err(Error::Config { line: 2, .. })));
        assert!(matches!(parse("K = one"), Err(Error::Config { .. })));
        assert!(matches!(parse("K = 1\nK = 2"), Err(Error::Config { line: 2, .. })));
        // parsed but invalid physics
        assert!(matches!(parse("theta = 3"), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn writer_emits_every_key_once() {
        let text = to_string(&SystemConfig::cold_gas());
        for key in KEYS {
            let hits = text
                .lines()
                .filter(|l| l.split('=').next().map(str::trim) == Some(key))
                .count();
            assert_eq!(hits, 1, "{key}");
        }
    }

    proptest! {
        #[test]
        fn round_trip(theta in 0.0..std::f64::consts::FRAC_PI_2, k in 0.0..100.0f64,
                      oc in 0.0..20.0f64, dc in -5.0..5.0f64, w21 in 0.1..20.0f64) {
            let cfg = SystemConfig { theta, k, omega_c: oc, delta_c: dc, omega21: w21,
                                     ..SystemConfig::cold_gas() };
            prop_assert_eq!(parse(&to_string(&cfg)).unwrap(), cfg);
        }
    }
}
