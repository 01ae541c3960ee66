//! `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment. Function-valued keys
//! (`w_expr`, `b_expr`, `g0_expr`, `h0_expr`, `vL_expr`) take basis
//! coefficients, e.g. `poly:1,0.1 cos:0.05`, meaning
//! `1 + 0.1 x + 0.05 cos(pi x / P)` with period `P = L` for `w`, `b` and
//! `P = ell` for the boundary functions.

use std::collections::BTreeMap;
use std::path::Path;

use eplab::elliptic::{BoundaryData, Formulation, NozzleGrid, PicardConfig};
use eplab::{BackgroundOptions, Basis1D, DopingProfile, FieldCase, PressureLaw};

use crate::error::{CliError, CliResult};

/// Every accepted key, in manifest order.
pub const KEYS: &[&str] = &[
    "gamma", "case", "formulation", "L", "ell", "nx", "ny", "J", "rho0", "E0", "Phi0", "substeps", "w_expr",
    "b_expr", "g0_expr", "h0_expr", "vL_expr", "perturb", "tol", "max_iter", "damping", "delta", "lambda",
    "n_pairs", "n_t", "n_samples", "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    /// Explicit case; inferred from the sign of `w` when absent.
    pub case: Option<FieldCase>,
    /// Formulation for `uniqueness-test` and `coercivity-probe`; defaults to
    /// potential in the electric case and stream in the gravitational case.
    pub formulation: Option<Formulation>,
    pub length: f64,
    pub width: f64,
    pub nx: usize,
    pub ny: usize,
    pub flux: f64,
    pub rho0: f64,
    pub e0: f64,
    pub phi0: f64,
    pub substeps: usize,
    pub w_expr: String,
    pub b_expr: String,
    pub g0_expr: String,
    pub h0_expr: String,
    pub vl_expr: String,
    /// Factor applied to all boundary perturbations.
    pub perturb: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub delta: f64,
    pub lambda: f64,
    pub n_pairs: usize,
    pub n_t: usize,
    pub n_samples: usize,
    pub seed: u64,
    lines: BTreeMap<&'static str, usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            case: None,
            formulation: None,
            length: 1.0,
            width: 1.0,
            nx: 64,
            ny: 32,
            flux: 0.5,
            rho0: 1.0,
            e0: 0.0,
            phi0: 0.0,
            substeps: 16,
            w_expr: "poly:1".into(),
            b_expr: "poly:1".into(),
            g0_expr: "0".into(),
            h0_expr: "0".into(),
            vl_expr: "0".into(),
            perturb: 1.0,
            tol: 1e-10,
            max_iter: 100,
            damping: 1.0,
            delta: 0.1,
            lambda: 0.1,
            n_pairs: 10_000,
            n_t: 11,
            n_samples: 100,
            seed: 0,
            lines: BTreeMap::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| CliError::ConfigLine {
        line,
        message: format!("`{key}` expects a {}, got `{v}`", std::any::type_name::<T>()),
    })
}

pub fn parse_case(v: &str) -> Option<FieldCase> {
    match v.to_ascii_lowercase().as_str() {
        "electric" | "1" => Some(FieldCase::Electric),
        "gravitational" | "2" => Some(FieldCase::Gravitational),
        _ => None,
    }
}

pub fn parse_formulation(v: &str) -> Option<Formulation> {
    match v.to_ascii_lowercase().as_str() {
        "potential" => Some(Formulation::Potential),
        "stream" => Some(Formulation::Stream),
        _ => None,
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses and validates a configuration text.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::ConfigLine {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let known = KEYS.iter().find(|&&k| k == key).ok_or_else(|| CliError::ConfigLine {
                line,
                message: format!("unknown key `{key}`"),
            })?;
            if let Some(prev) = cfg.lines.insert(known, line) {
                return Err(CliError::ConfigLine {
                    line,
                    message: format!("`{key}` already set on line {prev}"),
                });
            }
            cfg.set(line, known, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> CliResult<()> {
        match key {
            "gamma" => self.gamma = parse_num(line, key, v)?,
            "case" => {
                self.case = Some(parse_case(v).ok_or_else(|| CliError::ConfigLine {
                    line,
                    message: format!("`case` must be electric (1) or gravitational (2), got `{v}`"),
                })?)
            }
            "formulation" => {
                self.formulation = Some(parse_formulation(v).ok_or_else(|| CliError::ConfigLine {
                    line,
                    message: format!("`formulation` must be potential or stream, got `{v}`"),
                })?)
            }
            "L" => self.length = parse_num(line, key, v)?,
            "ell" => self.width = parse_num(line, key, v)?,
            "nx" => self.nx = parse_num(line, key, v)?,
            "ny" => self.ny = parse_num(line, key, v)?,
            "J" => self.flux = parse_num(line, key, v)?,
            "rho0" => self.rho0 = parse_num(line, key, v)?,
            "E0" => self.e0 = parse_num(line, key, v)?,
            "Phi0" => self.phi0 = parse_num(line, key, v)?,
            "substeps" => self.substeps = parse_num(line, key, v)?,
            "w_expr" => self.w_expr = v.into(),
            "b_expr" => self.b_expr = v.into(),
            "g0_expr" => self.g0_expr = v.into(),
            "h0_expr" => self.h0_expr = v.into(),
            "vL_expr" => self.vl_expr = v.into(),
            "perturb" => self.perturb = parse_num(line, key, v)?,
            "tol" => self.tol = parse_num(line, key, v)?,
            "max_iter" => self.max_iter = parse_num(line, key, v)?,
            "damping" => self.damping = parse_num(line, key, v)?,
            "delta" => self.delta = parse_num(line, key, v)?,
            "lambda" => self.lambda = parse_num(line, key, v)?,
            "n_pairs" => self.n_pairs = parse_num(line, key, v)?,
            "n_t" => self.n_t = parse_num(line, key, v)?,
            "n_samples" => self.n_samples = parse_num(line, key, v)?,
            "seed" => self.seed = parse_num(line, key, v)?,
            _ => unreachable!("key list and setter disagree"),
        }
        Ok(())
    }

    fn fail(&self, key: &str, message: String) -> CliError {
        match self.lines.get(key) {
            Some(&line) => CliError::ConfigLine { line, message },
            None => CliError::Config(message),
        }
    }

    /// Eager invariant checks; errors point at the offending line.
    pub fn validate(&self) -> CliResult<()> {
        let positive = [("gamma", self.gamma), ("L", self.length), ("ell", self.width), ("rho0", self.rho0)];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(self.fail(k, format!("`{k}` must be positive, got {v}")));
            }
        }
        if self.gamma < 1.0 {
            return Err(self.fail("gamma", format!("`gamma` must be at least 1, got {}", self.gamma)));
        }
        if self.nx < 4 || self.ny < 4 {
            let k = if self.nx < 4 { "nx" } else { "ny" };
            return Err(self.fail(k, format!("grid needs nx, ny >= 4, got {} x {}", self.nx, self.ny)));
        }
        if !(self.flux >= 0.0 && self.flux.is_finite()) {
            return Err(self.fail("J", format!("`J` must be non-negative, got {}", self.flux)));
        }
        if self.substeps == 0 {
            return Err(self.fail("substeps", "`substeps` must be positive".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            let k = if self.max_iter == 0 { "max_iter" } else { "tol" };
            return Err(self.fail(k, "`tol` must be positive and `max_iter` at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(self.fail("damping", format!("`damping` must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.delta > 0.0) || !(self.lambda > 0.0) {
            let k = if self.delta > 0.0 { "lambda" } else { "delta" };
            return Err(self.fail(k, "`delta` and `lambda` must be positive".into()));
        }
        if self.n_t < 3 {
            return Err(self.fail("n_t", "`n_t` must be at least 3".into()));
        }
        if !self.perturb.is_finite() {
            return Err(self.fail("perturb", "`perturb` must be finite".into()));
        }
        self.doping()?;
        self.boundary()?;
        Ok(())
    }

    fn basis(&self, key: &str, text: &str, period: f64) -> CliResult<Basis1D> {
        Basis1D::parse(text, period).map_err(|e| self.fail(key, e.to_string()))
    }

    pub fn law(&self) -> CliResult<PressureLaw> {
        PressureLaw::polytropic(self.gamma).map_err(|e| self.fail("gamma", e.to_string()))
    }

    pub fn doping(&self) -> CliResult<DopingProfile> {
        let w = self.basis("w_expr", &self.w_expr, self.length)?;
        let b = self.basis("b_expr", &self.b_expr, self.length)?;
        match self.case {
            Some(case) => DopingProfile::with_case(w, b, self.length, case),
            None => DopingProfile::new(w, b, self.length),
        }
        .map_err(|e| self.fail("w_expr", e.to_string()))
    }

    pub fn boundary(&self) -> CliResult<BoundaryData> {
        Ok(BoundaryData {
            g0: self.basis("g0_expr", &self.g0_expr, self.width)?,
            h0: self.basis("h0_expr", &self.h0_expr, self.width)?,
            vl: self.basis("vL_expr", &self.vl_expr, self.width)?,
        }
        .scaled(self.perturb))
    }

    pub fn grid(&self) -> CliResult<NozzleGrid> {
        Ok(NozzleGrid::new(self.length, self.width, self.nx, self.ny)?)
    }

    pub fn background_options(&self) -> BackgroundOptions {
        BackgroundOptions {
            phi0: self.phi0,
            substeps: self.substeps,
            ..Default::default()
        }
    }

    pub fn picard(&self) -> PicardConfig {
        PicardConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            damping: self.damping,
            ..Default::default()
        }
    }

    /// Formulation used by formulation-agnostic subcommands.
    pub fn default_formulation(&self) -> CliResult<Formulation> {
        Ok(match self.formulation {
            Some(f) => f,
            None => match self.doping()?.case {
                FieldCase::Electric => Formulation::Potential,
                FieldCase::Gravitational => Formulation::Stream,
            },
        })
    }

    /// The configuration in the same grammar, with every key spelled out.
    /// Parsing the result gives back an equal configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("gamma", format!("{:?}", self.gamma));
        if let Some(c) = self.case {
            put("case", c.name().into());
        }
        if let Some(f) = self.formulation {
            put("formulation", f.name().into());
        }
        put("L", format!("{:?}", self.length));
        put("ell", format!("{:?}", self.width));
        put("nx", self.nx.to_string());
        put("ny", self.ny.to_string());
        put("J", format!("{:?}", self.flux));
        put("rho0", format!("{:?}", self.rho0));
        put("E0", format!("{:?}", self.e0));
        put("Phi0", format!("{:?}", self.phi0));
        put("substeps", self.substeps.to_string());
        put("w_expr", self.w_expr.clone());
        put("b_expr", self.b_expr.clone());
        put("g0_expr", self.g0_expr.clone());
        put("h0_expr", self.h0_expr.clone());
        put("vL_expr", self.vl_expr.clone());
        put("perturb", format!("{:?}", self.perturb));
        put("tol", format!("{:?}", self.tol));
        put("max_iter", self.max_iter.to_string());
        put("damping", format!("{:?}", self.damping));
        put("delta", format!("{:?}", self.delta));
        put("lambda", format!("{:?}", self.lambda));
        put("n_pairs", self.n_pairs.to_string());
        put("n_t", self.n_t.to_string());
        put("n_samples", self.n_samples.to_string());
        put("seed", self.seed.to_string());
        out
    }

    /// Equality of the settings, ignoring where they came from.
    pub fn same_settings(&self, other: &RunConfig) -> bool {
        self.to_text() == other.to_text()
    }
}
