//! Flat `key = value` configuration shared by the config file and the CLI.
//!
//! Keys: `n protocol attack target k positions l m fseed trials seed schedule
//! oracle out format c p origin`. Blank lines and `#` comments are ignored.
//! Values given on the command line replace values from the file.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use super::{HarnessError, RunConfig};
use crate::attacks::{AttackKind, AttackSpec, Placement};
use crate::protocols::{PhaseParams, ProtocolKind};
use crate::ring::Schedule;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json|csv)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub n: Option<usize>,
    pub protocol: Option<ProtocolKind>,
    pub attack: Option<AttackKind>,
    pub target: Option<u64>,
    pub k: Option<usize>,
    pub positions: Option<Vec<usize>>,
    pub l: Option<usize>,
    pub m: Option<u64>,
    pub fseed: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub schedule: Option<Schedule>,
    pub oracle: Option<bool>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub c: Option<usize>,
    pub p: Option<f64>,
    pub origin: Option<usize>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| HarnessError::Config(format!("{key} = {v}: {e}")))
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<usize>, HarnessError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s.trim())).collect()
}

impl Settings {
    pub fn from_kv(text: &str) -> Result<Self, HarnessError> {
        let mut s = Settings::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", no + 1)))?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), HarnessError> {
        match key {
            "n" => self.n = Some(parse(key, v)?),
            "protocol" => self.protocol = Some(parse(key, v)?),
            "attack" => self.attack = Some(parse(key, v)?),
            "target" | "w" => self.target = Some(parse(key, v)?),
            "k" => self.k = Some(parse(key, v)?),
            "positions" => self.positions = Some(parse_list(key, v)?),
            "l" => self.l = Some(parse(key, v)?),
            "m" => self.m = Some(parse(key, v)?),
            "fseed" => self.fseed = Some(parse(key, v)?),
            "trials" => self.trials = Some(parse(key, v)?),
            "seed" => self.seed = Some(parse(key, v)?),
            "schedule" => self.schedule = Some(parse(key, v)?),
            "oracle" => self.oracle = Some(parse(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => self.format = Some(parse(key, v)?),
            "c" => self.c = Some(parse(key, v)?),
            "p" => self.p = Some(parse(key, v)?),
            "origin" => self.origin = Some(parse(key, v)?),
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            n: over.n.or(self.n),
            protocol: over.protocol.or(self.protocol),
            attack: over.attack.or(self.attack),
            target: over.target.or(self.target),
            k: over.k.or(self.k),
            positions: over.positions.or(self.positions),
            l: over.l.or(self.l),
            m: over.m.or(self.m),
            fseed: over.fseed.or(self.fseed),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            schedule: over.schedule.or(self.schedule),
            oracle: over.oracle.or(self.oracle),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            c: over.c.or(self.c),
            p: over.p.or(self.p),
            origin: over.origin.or(self.origin),
        }
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(1000)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    /// Build the run configuration and, if an attack is named, its attack. The
    /// protocol defaults to the attack's target protocol, else A-LEAD.
    pub fn build(&self) -> Result<(RunConfig, Option<AttackSpec>), HarnessError> {
        let n = self.n.ok_or_else(|| HarnessError::Config("missing n".into()))?;
        if n < 2 {
            return Err(HarnessError::Config(format!("n = {n} but a ring needs n ≥ 2")));
        }
        let protocol = self
            .protocol
            .or(self.attack.map(|a| a.protocol()))
            .unwrap_or(ProtocolKind::ALead);
        let mut params = PhaseParams::defaults(n, self.fseed.unwrap_or(0));
        if let Some(l) = self.l {
            params.l = l;
        }
        if let Some(m) = self.m {
            params.m = m;
        }
        let mut cfg = RunConfig::new(protocol, n).with_params(params);
        cfg.schedule = self.schedule.unwrap_or_default();
        cfg.oracle = self.oracle.unwrap_or(false);
        cfg.origin = self.origin.unwrap_or(0);
        let attack = self.attack.map(|kind| {
            let mut spec = AttackSpec::new(kind, self.target.unwrap_or(0));
            spec.k = self.k;
            spec.c = self.c.unwrap_or(3);
            if let Some(pos) = &self.positions {
                spec.placement = Some(Placement::Explicit(pos.clone()));
            } else if let Some(p) = self.p {
                spec.placement = Some(Placement::Bernoulli { p });
            }
            spec
        });
        cfg.validate(attack.as_ref())?;
        Ok((cfg, attack))
    }
}
