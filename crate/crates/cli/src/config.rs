//! Experiment configuration: one TOML document per run.
//!
//! Every field has a default. [`ExperimentConfig::resolve`] fills the
//! defaults that depend on the subcommand, so the resolved value is a
//! complete description of the run and is echoed into the outputs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kplab::estimates::{CounterexampleConfig, PairKind, Quadrature};
use kplab::evolution::{CutoffSpec, SolveConfig};
use kplab::fields::{Flavor, GridParams, GridSpec, NormSpec};
use kplab::illposed::IllposedConfig;
use kplab::{DispersionParams, Violation};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Evolve,
    Picard,
    Strichartz2d,
    Strichartz3d,
    Counterexample,
    BilinearRatio,
    IllposedScaling,
    ResonanceAudit,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Evolve => "evolve",
            Subcommand::Picard => "picard",
            Subcommand::Strichartz2d => "strichartz2d",
            Subcommand::Strichartz3d => "strichartz3d",
            Subcommand::Counterexample => "counterexample",
            Subcommand::BilinearRatio => "bilinear-ratio",
            Subcommand::IllposedScaling => "illposed-scaling",
            Subcommand::ResonanceAudit => "resonance-audit",
        }
    }

    /// Whether the experiment ends in a bounded/fails verdict.
    pub fn has_verdict(self) -> bool {
        !matches!(self, Subcommand::Evolve | Subcommand::Picard)
    }

    fn sweeps_pairs(self) -> bool {
        matches!(
            self,
            Subcommand::Strichartz2d | Subcommand::Strichartz3d | Subcommand::BilinearRatio
        )
    }
}

/// What a run is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Bounded,
    Fails,
}

impl Expectation {
    pub fn name(self) -> &'static str {
        match self {
            Expectation::Bounded => "bounded",
            Expectation::Fails => "fails",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    #[serde(default = "two")]
    pub alpha: f64,
    /// 1 for `T x R`, 2 for `T x R^2`; strichartz3d defaults to 2.
    #[serde(default)]
    pub y_dims: Option<usize>,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            y_dims: None,
        }
    }
}

/// N-list, seeds and the per-N lattices of the pair sweeps.
///
/// Knapp pairs get `knapp_points` transverse modes with `knapp_cells`
/// cells per half-width `knapp_coeff N^{1/2}`. Random pairs use a lattice
/// that does not change with N: spacing `random_eta_step`, `random_points`
/// modes, data in `|eta_j| <= random_eta_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub kinds: Vec<PairKind>,
    #[serde(default = "half")]
    pub knapp_coeff: f64,
    #[serde(default = "eight")]
    pub knapp_cells: f64,
    #[serde(default = "thirty_two")]
    pub knapp_points: usize,
    #[serde(default = "eighth")]
    pub random_eta_step: f64,
    #[serde(default = "quarter")]
    pub random_eta_max: f64,
    #[serde(default = "sixteen")]
    pub random_points: usize,
    #[serde(default = "t_points")]
    pub t_points: usize,
    #[serde(default = "t_window")]
    pub t_window: f64,
    /// Scale `T` of the time cutoff on the free blocks.
    #[serde(default = "one")]
    pub cutoff: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            n: Vec::new(),
            seeds: Vec::new(),
            kinds: Vec::new(),
            knapp_coeff: half(),
            knapp_cells: eight(),
            knapp_points: thirty_two(),
            random_eta_step: eighth(),
            random_eta_max: quarter(),
            random_points: sixteen(),
            t_points: t_points(),
            t_window: t_window(),
            cutoff: one(),
        }
    }
}

impl Sweep {
    /// Lattice for one pair of the given kind at frequency scale `n`.
    pub fn pair_grid(&self, n: u64, y_dims: usize, kind: PairKind) -> kplab::Result<GridSpec> {
        let (d_eta, y_points) = match kind {
            PairKind::Knapp => (self.knapp_coeff * (n as f64).sqrt() / self.knapp_cells, self.knapp_points),
            _ => (self.random_eta_step, self.random_points),
        };
        GridSpec::new(GridParams {
            k_max: 2 * n as usize,
            y_points,
            y_length: 2.0 * PI / d_eta,
            y_dims,
            t_points: self.t_points,
            t_window: self.t_window,
        })
    }
}

/// Exponents of the estimate under test. Strichartz runs read `s1`, `s2`;
/// bilinear runs read the full `lhs` and `rhs` norms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Norms {
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub lhs: Option<NormSpec>,
    pub rhs: Option<NormSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// `amplitude cos(k0 x) exp(-y^2 width^2 / 2)`.
    Gaussian,
    /// Random coefficients in `k0 <= |k| <= k1`, `|eta| <= width`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default = "gaussian")]
    pub kind: InitialKind,
    #[serde(default = "one_i")]
    pub k0: i64,
    #[serde(default = "four_i")]
    pub k1: i64,
    #[serde(default = "half")]
    pub width: f64,
    #[serde(default = "half")]
    pub amplitude: f64,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            kind: InitialKind::Gaussian,
            k0: 1,
            k1: 4,
            width: 0.5,
            amplitude: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evolve {
    #[serde(default = "milli")]
    pub dt: f64,
    #[serde(default = "one")]
    pub t_final: f64,
    #[serde(default = "ten")]
    pub samples: usize,
    #[serde(default = "two_thirds")]
    pub dealias: f64,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Writes the initial and final states under `fields/`.
    #[serde(default)]
    pub checkpoint: bool,
}

impl Default for Evolve {
    fn default() -> Self {
        Self {
            dt: milli(),
            t_final: one(),
            samples: ten(),
            dealias: two_thirds(),
            nonlinear: true,
            checkpoint: false,
        }
    }
}

impl Evolve {
    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            dealias: self.dealias,
            samples: self.samples,
            nonlinear: self.nonlinear,
            ..SolveConfig::new(self.dt, self.t_final)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Picard {
    /// Existence time `T`; the cutoff is `psi_T`.
    #[serde(default = "twentieth")]
    pub t: f64,
    #[serde(default = "eight_u")]
    pub iterations: usize,
    #[serde(default = "sixty_four")]
    pub t_steps: usize,
}

impl Default for Picard {
    fn default() -> Self {
        Self {
            t: twentieth(),
            iterations: eight_u(),
            t_steps: sixty_four(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    /// `|I| = 2 width_coeff N^{width_exponent}`.
    #[serde(default = "one")]
    pub width_coeff: f64,
    #[serde(default)]
    pub width_exponent: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl Default for Counterexample {
    fn default() -> Self {
        Self {
            width_coeff: 1.0,
            width_exponent: 0.0,
            s: 0.0,
            quadrature: Quadrature::default(),
        }
    }
}

impl Counterexample {
    pub fn point(&self, n: u64) -> kplab::Result<CounterexampleConfig> {
        CounterexampleConfig::new(n, self.width_coeff * (n as f64).powf(self.width_exponent))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Illposed {
    #[serde(default = "tenth")]
    pub beta_interval: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default = "sixty_four")]
    pub eta_quad_points: usize,
}

impl Default for Illposed {
    fn default() -> Self {
        Self {
            beta_interval: tenth(),
            s: 0.0,
            t: 1.0,
            eta_quad_points: sixty_four(),
        }
    }
}

impl Illposed {
    pub fn point(&self, n: u64) -> kplab::Result<IllposedConfig> {
        IllposedConfig::new(n, self.beta_interval, self.s, self.t, self.eta_quad_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Audit {
    #[serde(default = "two_hundred")]
    pub k_max: i64,
    /// Random checks of the modulation identity per alpha.
    #[serde(default = "hundred_thousand")]
    pub identity_points: usize,
    /// Transverse frequencies of the random checks are drawn from `[-eta_max, eta_max]`.
    #[serde(default = "hundred")]
    pub eta_max: f64,
    /// Defaults to `[physics.alpha]`.
    #[serde(default)]
    pub alphas: Vec<f64>,
}

impl Default for Audit {
    fn default() -> Self {
        Self {
            k_max: two_hundred(),
            identity_points: hundred_thousand(),
            eta_max: hundred(),
            alphas: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    #[serde(default)]
    pub expectation: Option<Expectation>,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub physics: Physics,
    /// Lattice of the evolve and picard runs.
    #[serde(default)]
    pub grid: Option<GridParams>,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub norms: Norms,
    #[serde(default)]
    pub evolve: Evolve,
    #[serde(default)]
    pub picard: Picard,
    #[serde(default)]
    pub counterexample: Counterexample,
    #[serde(default)]
    pub illposed: Illposed,
    #[serde(default)]
    pub audit: Audit,
}

impl ExperimentConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            expectation: None,
            output: None,
            physics: Physics::default(),
            grid: None,
            initial: InitialData::default(),
            sweep: Sweep::default(),
            norms: Norms::default(),
            evolve: Evolve::default(),
            picard: Picard::default(),
            counterexample: Counterexample::default(),
            illposed: Illposed::default(),
            audit: Audit::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Fills every subcommand-dependent default.
    pub fn resolve(mut self) -> Self {
        use Subcommand::*;
        let sub = self.subcommand;
        let y_dims = *self
            .physics
            .y_dims
            .get_or_insert(if sub == Strichartz3d { 2 } else { 1 });
        if matches!(sub, Evolve | Picard) && self.grid.is_none() {
            self.grid = Some(GridParams {
                k_max: 32,
                y_points: 128,
                y_length: 64.0 * PI,
                y_dims,
                t_points: 256,
                t_window: 2.5,
            });
        }
        if self.sweep.n.is_empty() {
            self.sweep.n = match sub {
                Strichartz2d => vec![8, 16, 32, 64, 128],
                Strichartz3d => vec![4, 8, 16, 32],
                BilinearRatio => vec![8, 16, 32, 64],
                Counterexample => vec![16, 32, 64, 128, 256, 512],
                IllposedScaling => vec![16, 32, 64, 128],
                _ => Vec::new(),
            };
        }
        if self.sweep.seeds.is_empty() {
            self.sweep.seeds = (0..5).collect();
        }
        if self.sweep.kinds.is_empty() && sub.sweeps_pairs() {
            self.sweep.kinds = vec![
                PairKind::Comparable,
                PairKind::HighHighToLow,
                PairKind::LowHigh,
                PairKind::Knapp,
            ];
        }
        match sub {
            Strichartz2d => {
                self.norms.s1.get_or_insert(0.25);
                self.norms.s2.get_or_insert(0.0);
            }
            Strichartz3d => {
                self.norms.s1.get_or_insert(0.6);
                self.norms.s2.get_or_insert(0.6);
            }
            BilinearRatio => {
                let s1 = *self.norms.s1.get_or_insert(0.2);
                let s2 = *self.norms.s2.get_or_insert(0.0);
                self.norms.lhs.get_or_insert(NormSpec::x_weighted(s1, s2, -0.45, 0.4));
                self.norms.rhs.get_or_insert(NormSpec::x_weighted(s1, s2, 0.55, 0.4));
            }
            _ => {}
        }
        if sub == ResonanceAudit && self.audit.alphas.is_empty() {
            self.audit.alphas = vec![self.physics.alpha];
        }
        self
    }

    pub fn y_dims(&self) -> usize {
        self.physics.y_dims.unwrap_or(1)
    }

    pub fn params(&self) -> kplab::Result<DispersionParams> {
        DispersionParams::new(self.physics.alpha, self.y_dims())
    }

    /// Replaces the seed list by `base, base + 1, ...` of the same length.
    pub fn reseed(&mut self, base: u64) {
        let len = self.sweep.seeds.len().max(1);
        self.sweep.seeds = (0..len as u64).map(|i| base.wrapping_add(i)).collect();
    }

    /// Checks a resolved configuration, collecting every violation.
    pub fn validate(&self) -> Result<()> {
        use Subcommand::*;
        let mut v = Vec::new();
        let sub = self.subcommand;
        absorb("physics", self.params(), &mut v);

        if let (Some(e), false) = (self.expectation, sub.has_verdict()) {
            v.push(Violation::new(
                "expectation",
                format!("{} has no verdict, cannot expect {}", sub.name(), e.name()),
            ));
        }

        if matches!(sub, Evolve | Picard) {
            match &self.grid {
                None => v.push(Violation::new("grid", "missing")),
                Some(g) => {
                    absorb("grid", GridSpec::new(*g), &mut v);
                    if g.y_dims != self.y_dims() {
                        v.push(Violation::new("grid.y_dims", "must equal physics.y_dims"));
                    }
                }
            }
            let d = &self.initial;
            if d.k0 < 1 || (d.kind == InitialKind::Random && d.k1 < d.k0) {
                v.push(Violation::new("initial", "need 1 <= k0 (<= k1 for random data)"));
            }
            if !(d.width > 0.0 && d.amplitude.is_finite()) {
                v.push(Violation::new("initial", "width must be positive and amplitude finite"));
            }
        }
        if sub == Evolve {
            absorb("evolve", self.evolve.solve_config().validate(), &mut v);
        }
        if sub == Picard {
            let p = &self.picard;
            absorb("picard.t", CutoffSpec::new(p.t), &mut v);
            if p.iterations < 1 {
                v.push(Violation::new("picard.iterations", "must be >= 1"));
            }
            if p.t_steps < 4 {
                v.push(Violation::new("picard.t_steps", "must be >= 4"));
            }
        }

        let needs_n = match sub {
            Strichartz2d | Strichartz3d | BilinearRatio | Counterexample => 3,
            IllposedScaling => 4,
            _ => 0,
        };
        let mut distinct = self.sweep.n.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < needs_n {
            v.push(Violation::new(
                "sweep.n",
                format!("need at least {needs_n} distinct values, got {}", distinct.len()),
            ));
        }
        if self.sweep.seeds.is_empty() {
            v.push(Violation::new("sweep.seeds", "must not be empty"));
        }

        if sub.sweeps_pairs() {
            let s = &self.sweep;
            if s.kinds.is_empty() {
                v.push(Violation::new("sweep.kinds", "must not be empty"));
            }
            if !(s.knapp_coeff > 0.0 && s.knapp_cells >= 1.0) {
                v.push(Violation::new("sweep", "need knapp_coeff > 0 and knapp_cells >= 1"));
            }
            if !(s.random_eta_step > 0.0 && s.random_eta_max >= 0.0) {
                v.push(Violation::new("sweep", "need random_eta_step > 0 and random_eta_max >= 0"));
            }
            let cutoff = absorb("sweep.cutoff", CutoffSpec::new(s.cutoff), &mut v);
            if distinct.first() == Some(&0) {
                v.push(Violation::new("sweep.n", "values must be >= 1"));
            }
            if let Some(&n) = distinct.last() {
                for kind in [PairKind::Comparable, PairKind::Knapp] {
                    let g = absorb("sweep", s.pair_grid(n, self.y_dims(), kind), &mut v);
                    if let (Some(g), Some(c)) = (g, cutoff) {
                        if sub != Strichartz3d && c.support() > g.t_window() {
                            v.push(Violation::new("sweep.cutoff", "support exceeds t_window"));
                        }
                    }
                }
            }
            if s.random_eta_max > (s.random_points as f64 / 2.0 - 1.0) * s.random_eta_step {
                v.push(Violation::new("sweep.random_eta_max", "exceeds the random lattice"));
            }
        }

        match sub {
            Strichartz2d | Strichartz3d => {
                for (name, s) in [("norms.s1", self.norms.s1), ("norms.s2", self.norms.s2)] {
                    if !matches!(s, Some(x) if x >= 0.0) {
                        v.push(Violation::new(name, "must be >= 0"));
                    }
                }
                if sub == Strichartz3d && self.y_dims() != 2 {
                    v.push(Violation::new("physics.y_dims", "strichartz3d needs 2"));
                }
                if sub == Strichartz2d && self.y_dims() != 1 {
                    v.push(Violation::new("physics.y_dims", "strichartz2d needs 1"));
                }
            }
            BilinearRatio => {
                for (name, spec, allowed) in [
                    ("norms.lhs", self.norms.lhs, &[Flavor::X, Flavor::Xweighted, Flavor::Z][..]),
                    ("norms.rhs", self.norms.rhs, &[Flavor::X, Flavor::Xweighted][..]),
                ] {
                    match spec {
                        None => v.push(Violation::new(name, "missing")),
                        Some(spec) => {
                            absorb(name, spec.validate(), &mut v);
                            if !allowed.contains(&spec.flavor) {
                                v.push(Violation::new(name, format!("flavor {:?} not allowed", spec.flavor)));
                            }
                        }
                    }
                }
            }
            Counterexample => {
                let c = &self.counterexample;
                for &n in &distinct {
                    absorb("counterexample", c.point(n), &mut v);
                }
                let q = &c.quadrature;
                if q.order < 1 || q.panels < 1 || !(q.floor > 0.0 && q.floor < 1.0) {
                    v.push(Violation::new(
                        "counterexample.quadrature",
                        "need order, panels >= 1 and 0 < floor < 1",
                    ));
                }
            }
            IllposedScaling => {
                for &n in &distinct {
                    absorb("illposed", self.illposed.point(n), &mut v);
                }
                if self.y_dims() != 1 {
                    v.push(Violation::new("physics.y_dims", "illposed-scaling needs 1"));
                }
            }
            ResonanceAudit => {
                let a = &self.audit;
                if a.k_max < 2 {
                    v.push(Violation::new("audit.k_max", "must be >= 2"));
                }
                if !(a.eta_max >= 0.0 && a.eta_max.is_finite()) {
                    v.push(Violation::new("audit.eta_max", "must be finite and >= 0"));
                }
                if a.alphas.is_empty() {
                    v.push(Violation::new("audit.alphas", "must not be empty"));
                }
                for &alpha in &a.alphas {
                    absorb("audit.alphas", DispersionParams::new(alpha, self.y_dims()), &mut v);
                }
            }
            _ => {}
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(v))
        }
    }
}

/// Moves the violations of a failed core call into `out`, prefixing field names.
fn absorb<T>(prefix: &str, r: kplab::Result<T>, out: &mut Vec<Violation>) -> Option<T> {
    match r {
        Ok(x) => Some(x),
        Err(kplab::Error::InvalidSpec(list)) => {
            out.extend(
                list.into_iter()
                    .map(|x| Violation::new(format!("{prefix}.{}", x.field), x.message)),
            );
            None
        }
        Err(e) => {
            out.push(Violation::new(prefix, e.to_string()));
            None
        }
    }
}

fn two() -> f64 {
    2.0
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn quarter() -> f64 {
    0.25
}
fn eighth() -> f64 {
    0.125
}
fn tenth() -> f64 {
    0.1
}
fn twentieth() -> f64 {
    0.05
}
fn milli() -> f64 {
    1e-3
}
fn two_thirds() -> f64 {
    2.0 / 3.0
}
fn eight() -> f64 {
    8.0
}
fn hundred() -> f64 {
    100.0
}
fn eight_u() -> usize {
    8
}
fn ten() -> usize {
    10
}
fn sixteen() -> usize {
    16
}
fn thirty_two() -> usize {
    32
}
fn sixty_four() -> usize {
    64
}
fn t_points() -> usize {
    128
}
fn t_window() -> f64 {
    2.5
}
fn two_hundred() -> i64 {
    200
}
fn hundred_thousand() -> usize {
    100_000
}
fn one_i() -> i64 {
    1
}
fn four_i() -> i64 {
    4
}
fn gaussian() -> InitialKind {
    InitialKind::Gaussian
}
fn yes() -> bool {
    true
}
