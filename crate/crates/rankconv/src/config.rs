//! Flat `key=value` simulation configuration.
//!
//! ```text
//! # field and code
//! q=2
//! m=8
//! n=8
//! k=4
//! k1=2
//! phi=0
//! blocks=6
//! # campaign
//! trials=500
//! seed=1
//! level=direct
//! t_max=2
//! rho_max=1
//! gamma_max=1
//! conditioned=true
//! baseline=true
//! ```
//!
//! `modulus=<hex>` overrides the built-in modulus. The `direct` level draws
//! `(t, rho, gamma)` per shot uniformly up to `t_max`, `rho_max`,
//! `gamma_max`; the `packet` level sends lifted shots through the operator
//! channel with up to `erased_max` dropped and `errors_max` injected packets.
//! With `conditioned=true` whole channel draws are redrawn until the sequence
//! satisfies the BRD condition.

use std::collections::BTreeSet;

use rankconv_core::pum::PumCode;
use rankconv_core::{BaseField, ExtField, FieldParams};

use crate::error::{CliError, Result};
use crate::format::unpack_hex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Direct,
    Packet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationConfig {
    pub q: u32,
    pub m: usize,
    pub modulus: Option<Vec<u16>>,
    pub n: usize,
    pub k: usize,
    pub k1: usize,
    pub phi: usize,
    /// Number of information blocks `N`; the code sequence has `N + 1`.
    pub blocks: usize,
    pub trials: usize,
    pub seed: u64,
    pub level: Level,
    pub t_max: usize,
    pub rho_max: usize,
    pub gamma_max: usize,
    pub erased_max: usize,
    pub errors_max: usize,
    pub conditioned: bool,
    pub baseline: bool,
    pub affine: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            q: 2,
            m: 8,
            modulus: None,
            n: 8,
            k: 4,
            k1: 2,
            phi: 0,
            blocks: 6,
            trials: 100,
            seed: 0,
            level: Level::Direct,
            t_max: 1,
            rho_max: 1,
            gamma_max: 1,
            erased_max: 1,
            errors_max: 1,
            conditioned: false,
            baseline: false,
            affine: false,
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

impl SimulationConfig {
    /// Parses a config file; keys not present keep their defaults.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut cfg = SimulationConfig::default();
        let mut seen = BTreeSet::new();
        let mut modulus_hex = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| CliError::format(name, i + 1, msg);
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key=value`, found {line:?}")))?;
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{key}` needs a non-negative integer, found {value:?}")))
            };
            let flag = || parse_bool(value).ok_or_else(|| err(format!("`{key}` needs true or false")));
            match key {
                "q" => cfg.q = int()? as u32,
                "m" => cfg.m = int()?,
                "modulus" => modulus_hex = Some((i + 1, value.to_string())),
                "n" => cfg.n = int()?,
                "k" => cfg.k = int()?,
                "k1" => cfg.k1 = int()?,
                "phi" => cfg.phi = int()?,
                "blocks" => cfg.blocks = int()?,
                "trials" => cfg.trials = int()?,
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| err(format!("bad seed {value:?}")))?
                }
                "level" => {
                    cfg.level = match value {
                        "direct" => Level::Direct,
                        "packet" => Level::Packet,
                        _ => return Err(err(format!("level must be direct or packet, found {value:?}"))),
                    }
                }
                "t_max" => cfg.t_max = int()?,
                "rho_max" => cfg.rho_max = int()?,
                "gamma_max" => cfg.gamma_max = int()?,
                "erased_max" => cfg.erased_max = int()?,
                "errors_max" => cfg.errors_max = int()?,
                "conditioned" => cfg.conditioned = flag()?,
                "baseline" => cfg.baseline = flag()?,
                "affine" => cfg.affine = flag()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if let Some((line, hex)) = modulus_hex {
            let base = BaseField::new(cfg.q).map_err(|e| CliError::format(name, line, e.to_string()))?;
            let coeffs =
                unpack_hex(&hex, cfg.m + 1, base.bit_width()).map_err(|e| CliError::format(name, line, e))?;
            cfg.modulus = Some(coeffs);
        }
        Ok(cfg)
    }

    pub fn field(&self) -> Result<ExtField> {
        let params = match &self.modulus {
            Some(c) => FieldParams::with_modulus(self.q, self.m, c.clone()),
            None => FieldParams::new(self.q, self.m).map_err(|e| CliError::Config(e.to_string()))?,
        };
        ExtField::new(params).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn code(&self, f: &ExtField) -> Result<PumCode> {
        PumCode::new(f, self.n, self.k, self.k1, self.phi).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Builds the field and the code and checks the channel law, so that a
    /// bad configuration is rejected before any trial runs.
    pub fn validate(&self) -> Result<(ExtField, PumCode)> {
        let f = self.field()?;
        let code = self.code(&f)?;
        if self.blocks == 0 {
            return Err(CliError::Config("blocks must be at least 1".into()));
        }
        let cap = self.n.min(self.m);
        match self.level {
            Level::Direct => {
                if self.t_max + self.rho_max + self.gamma_max > cap {
                    return Err(CliError::Config(format!(
                        "t_max + rho_max + gamma_max = {} exceeds min(n, m) = {cap}",
                        self.t_max + self.rho_max + self.gamma_max
                    )));
                }
            }
            Level::Packet => {
                if self.erased_max > self.n {
                    return Err(CliError::Config(format!(
                        "erased_max = {} exceeds n = {}",
                        self.erased_max, self.n
                    )));
                }
            }
        }
        if self.affine && self.level == Level::Direct {
            return Err(CliError::Config("affine lifting needs level=packet".into()));
        }
        Ok((f, code))
    }

    /// One-line summary for CSV headers.
    pub fn summary(&self) -> String {
        let level = match self.level {
            Level::Direct => format!(
                "level=direct t_max={} rho_max={} gamma_max={}",
                self.t_max, self.rho_max, self.gamma_max
            ),
            Level::Packet => format!(
                "level=packet erased_max={} errors_max={} affine={}",
                self.erased_max, self.errors_max, self.affine
            ),
        };
        format!(
            "q={} m={} n={} k={} k1={} phi={} blocks={} trials={} seed={} {level} conditioned={} baseline={}",
            self.q,
            self.m,
            self.n,
            self.k,
            self.k1,
            self.phi,
            self.blocks,
            self.trials,
            self.seed,
            self.conditioned,
            self.baseline
        )
    }
}
