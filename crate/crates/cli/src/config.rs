//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cvmdi_core::protocol::v_s_from_eps_s;
use cvmdi_core::{CaseId, Geometry, PeMode, Scenario};

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "v_mod",
    "epsilon_1",
    "epsilon_2",
    "t_s",
    "v_s",
    "eps_s",
    "eta_m_alice",
    "eta_m_bob",
    "eta_d",
    "v_el",
    "v_rin",
    "alpha_db_per_km",
    "xi",
    "block_n",
    "key_fraction",
    "eps_smooth",
    "eps_pa",
    "eps_pe",
    "pe_mode",
    "geometry",
    "case",
    "seed",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub cases: Vec<CaseId>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { scenario: Scenario::default(), cases: vec![CaseId::Both], seed: 1 }
    }
}

/// Raw settings by key, collected from a file and command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{origin}:{}: expected key = value, got `{line}`", n + 1)))?;
            let key = key.trim();
            check_key(key)?;
            if s.values.contains_key(key) {
                return Err(CliError::Config(format!("{origin}:{}: key `{key}` given twice", n + 1)));
            }
            s.values.insert(key.to_string(), value.trim().to_string());
        }
        if s.values.contains_key("v_s") && s.values.contains_key("eps_s") {
            return Err(CliError::Config(format!("{origin}: `v_s` and `eps_s` are mutually exclusive")));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Settings::parse(&text, &path.display().to_string())
    }

    /// Applies a `key=value` override. Setting `v_s` drops `eps_s` and the
    /// other way round.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
        let key = key.trim();
        check_key(key)?;
        match key {
            "v_s" => self.values.remove("eps_s"),
            "eps_s" => self.values.remove("v_s"),
            _ => None,
        };
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        let sc = &mut cfg.scenario;
        for (key, value) in &self.values {
            let num = || parse_f64(key, value);
            match key.as_str() {
                "v_mod" => sc.params.v_mod = num()?,
                "epsilon_1" => sc.epsilon_1 = num()?,
                "epsilon_2" => sc.epsilon_2 = num()?,
                "t_s" => sc.params.t_s = num()?,
                "v_s" => sc.params.v_s = num()?,
                "eps_s" => {}
                "eta_m_alice" => sc.params.eta_m_alice = num()?,
                "eta_m_bob" => sc.params.eta_m_bob = num()?,
                "eta_d" => sc.params.eta_d = num()?,
                "v_el" => sc.params.v_el = num()?,
                "v_rin" => sc.params.v_rin = num()?,
                "alpha_db_per_km" => sc.alpha_db_per_km = num()?,
                "xi" => sc.params.xi = num()?,
                "block_n" => sc.fs.block_n = num()?,
                "key_fraction" => sc.fs.key_fraction = num()?,
                "eps_smooth" => sc.fs.eps_smooth = num()?,
                "eps_pa" => sc.fs.eps_pa = num()?,
                "eps_pe" => sc.fs.eps_pe = num()?,
                "pe_mode" => sc.pe_mode = parse_pe_mode(value)?,
                "geometry" => sc.geometry = parse_geometry(value)?,
                "case" => cfg.cases = parse_cases(value)?,
                "seed" => {
                    cfg.seed = value.parse().map_err(|_| {
                        CliError::Config(format!("`seed` must be a non-negative integer, got `{value}`"))
                    })?
                }
                other => unreachable!("key `{other}` passed validation"),
            }
        }
        // Needs the final t_s.
        if let Some(value) = self.values.get("eps_s") {
            let eps_s = parse_f64("eps_s", value)?;
            sc.params.v_s = v_s_from_eps_s(sc.params.t_s, eps_s).map_err(|e| CliError::Config(e.to_string()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let sc = &self.scenario;
        let invalid = |e: cvmdi_core::Error| CliError::Config(e.to_string());
        sc.params.validate().map_err(invalid)?;
        sc.fs.validate().map_err(invalid)?;
        for (name, eps) in [("epsilon_1", sc.epsilon_1), ("epsilon_2", sc.epsilon_2)] {
            if !(eps >= 0.0) || !eps.is_finite() {
                return Err(CliError::Config(format!("`{name}` must be finite and >= 0, got {eps}")));
            }
        }
        if !(sc.alpha_db_per_km >= 0.0) || !sc.alpha_db_per_km.is_finite() {
            return Err(CliError::Config(format!("`alpha_db_per_km` must be >= 0, got {}", sc.alpha_db_per_km)));
        }
        Ok(())
    }
}

fn check_key(key: &str) -> Result<(), CliError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(CliError::Config(format!("unknown key `{key}`")))
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("`{key}` expects a finite number, got `{value}`")))
}

pub fn parse_pe_mode(value: &str) -> Result<PeMode, CliError> {
    value.parse().map_err(|e: cvmdi_core::Error| CliError::Config(e.to_string()))
}

pub fn parse_geometry(value: &str) -> Result<Geometry, CliError> {
    value.parse().map_err(|e: cvmdi_core::Error| CliError::Config(e.to_string()))
}

/// `all`, a single case, or a comma-separated list.
pub fn parse_cases(value: &str) -> Result<Vec<CaseId>, CliError> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(CaseId::ALL.to_vec());
    }
    let cases = value
        .split(',')
        .map(|c| c.trim().parse().map_err(|e: cvmdi_core::Error| CliError::Config(e.to_string())))
        .collect::<Result<Vec<CaseId>, _>>()?;
    if cases.is_empty() {
        return Err(CliError::Config("no case selected".into()));
    }
    Ok(cases)
}
