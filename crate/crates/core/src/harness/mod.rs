//! Scenario generation, verification suites, reports and plot emitters.

mod gen;
mod plot;
mod suite;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::bracket::QnParams;
use crate::family::{FamilyError, HGrid};
use crate::local::{LocalParams, TOL_LOC};

pub use gen::{
    commuting_nilpotent, generate_pair, random_catalog_family, random_decaying_coeff, random_diagonalizable,
    random_entry, random_matrix, random_similarity, random_supported_vector, random_vector, rng_for, separated_points,
    CommutingNilpotent, GeneratedPair, KnownSpectrum, PairKind, Relation, MAX_COND,
};
pub use plot::{emit_plot, parse_csv, pgm_level, render_csv, render_pgm, render_plot, render_svg, PlotFormat};
pub use suite::{check_ids, run_suite};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("unknown pair kind `{0}`")]
    UnknownKind(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Bracket,
    Family,
    Spectra,
    Local,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Bracket, Suite::Family, Suite::Spectra, Suite::Local];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bracket => "bracket",
            Suite::Family => "family",
            Suite::Spectra => "spectra",
            Suite::Local => "local",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::InvalidConfig(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Largest dimension of randomly sized instances (2..=8).
    pub dim: usize,
    pub grid: HGrid,
    pub qn: QnParams,
    pub delta_res: f64,
    pub tol_loc: f64,
    /// `B_max = b_max_factor·‖x‖/scale`.
    pub b_max_factor: f64,
    pub suites: Vec<Suite>,
    /// Restrict the run to one check id.
    pub only: Option<String>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dim: 6,
            grid: HGrid::default(),
            qn: QnParams::default(),
            delta_res: 1e-6,
            tol_loc: TOL_LOC,
            b_max_factor: 1e8,
            suites: Suite::ALL.to_vec(),
            only: None,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(2..=8).contains(&self.dim) {
            return Err(HarnessError::InvalidConfig(format!(
                "dim must be in 2..=8, got {}",
                self.dim
            )));
        }
        let positive = [
            ("eps_q", self.qn.eps_q),
            ("delta_q", self.qn.delta_q),
            ("delta_res", self.delta_res),
            ("tol_loc", self.tol_loc),
            ("b_max", self.b_max_factor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(HarnessError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.suites.is_empty() {
            return Err(HarnessError::InvalidConfig("no suite selected".into()));
        }
        if let Some(id) = &self.only {
            if !check_ids().iter().any(|(c, _)| c == id) {
                return Err(HarnessError::InvalidConfig(format!("unknown check `{id}`")));
            }
        }
        Ok(())
    }

    pub fn local_params(&self) -> LocalParams {
        let mut p = LocalParams {
            b_max_factor: self.b_max_factor,
            ..LocalParams::default()
        };
        p.spectra.delta_res = self.delta_res;
        p
    }

    /// Command line reproducing one check.
    pub fn repro(&self, suite: Suite, id: &str) -> String {
        format!(
            "opfam verify --seed {} --dim {} --grid {} --suite {} --check {}",
            self.seed, self.dim, self.grid, suite, id
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckVerdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckVerdict::Pass => "pass",
            CheckVerdict::Fail => "fail",
            CheckVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub suite: Suite,
    /// The mathematical statement checked.
    pub anchor: String,
    pub instance: String,
    pub verdict: CheckVerdict,
    /// Named measurements in a fixed order, already formatted.
    pub numerics: Vec<(String, String)>,
    /// First failure or inconclusive reason, empty on pass.
    pub note: String,
    /// Set for failed checks.
    pub repro: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportBundle {
    pub config: ScenarioConfig,
    pub records: Vec<CheckRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

/// Keeps rendered fields on one tab-separated line.
fn field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

impl ReportBundle {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for r in &self.records {
            match r.verdict {
                CheckVerdict::Pass => s.pass += 1,
                CheckVerdict::Fail => s.fail += 1,
                CheckVerdict::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }

    pub fn any_failed(&self) -> bool {
        self.summary().fail > 0
    }

    /// One tab-separated `key=value` record per line:
    ///
    /// ```text
    /// run     seed= dim= grid= suites=
    /// check   id= suite= verdict= anchor= instance= numerics=k:v;… note= repro=
    /// summary checks= pass= fail= inconclusive=
    /// ```
    pub fn render_machine(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let suites: Vec<&str> = c.suites.iter().map(|s| s.name()).collect();
        let _ = writeln!(
            out,
            "run\tseed={}\tdim={}\tgrid={}\tsuites={}",
            c.seed,
            c.dim,
            c.grid,
            suites.join(",")
        );
        for r in &self.records {
            let numerics: Vec<String> = r.numerics.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let _ = writeln!(
                out,
                "check\tid={}\tsuite={}\tverdict={}\tanchor={}\tinstance={}\tnumerics={}\tnote={}\trepro={}",
                field(&r.id),
                r.suite,
                r.verdict,
                field(&r.anchor),
                field(&r.instance),
                field(&numerics.join(";")),
                field(&r.note),
                field(r.repro.as_deref().unwrap_or("-"))
            );
        }
        let s = self.summary();
        let _ = writeln!(
            out,
            "summary\tchecks={}\tpass={}\tfail={}\tinconclusive={}",
            self.records.len(),
            s.pass,
            s.fail,
            s.inconclusive
        );
        out
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "opfam verification, seed {}, grid {}",
            self.config.seed, self.config.grid
        );
        for r in &self.records {
            let tag = match r.verdict {
                CheckVerdict::Pass => "PASS",
                CheckVerdict::Fail => "FAIL",
                CheckVerdict::Inconclusive => "INCONCLUSIVE",
            };
            let _ = writeln!(out, "{tag:<13}{}  [{}]", r.id, r.anchor);
            let _ = writeln!(out, "             {}", r.instance);
            for (k, v) in &r.numerics {
                let _ = writeln!(out, "             {k} = {v}");
            }
            if !r.note.is_empty() {
                let _ = writeln!(out, "             note: {}", r.note);
            }
            if let Some(cmd) = &r.repro {
                let _ = writeln!(out, "             reproduce: {cmd}");
            }
        }
        let s = self.summary();
        let _ = writeln!(
            out,
            "{} checks: {} pass, {} fail, {} inconclusive",
            self.records.len(),
            s.pass,
            s.fail,
            s.inconclusive
        );
        out
    }
}
