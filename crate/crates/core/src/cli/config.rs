//! TOML run configuration. Unknown keys are rejected everywhere.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{CheckerConfig, InconclusivePolicy, Property, Tail};
use crate::error::{Error, Result};
use crate::maps::{ControlSpec, InversionMethod, PerturbationTriple};
use crate::measure::MeasureSpec;
use crate::neutral::{self, HistorySegment, NeutralSystem};
use crate::numerics::{steps_in, Grid, Matrix, StateVector};
use crate::semigroups::SemigroupSpec;
use crate::translation::translation_triple;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub horizon: f64,
    /// realization step; for neutral systems `1 / step` is the number of history cells
    pub step: f64,
    /// spacing of the written orbit samples; defaults to `step`
    #[serde(default)]
    pub output_step: Option<f64>,
    #[serde(default)]
    pub method: MethodConfig,
    pub system: SystemConfig,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub probes: ProbeConfig,
    #[serde(default)]
    pub admissibility: AdmissibilityConfig,
    #[serde(default)]
    pub asymptotics: AsymptoticsConfig,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Neumann,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    #[serde(default = "MethodConfig::default_kind")]
    pub kind: MethodKind,
    #[serde(default = "MethodConfig::default_tol")]
    pub tol: f64,
    #[serde(default = "MethodConfig::default_max_terms")]
    pub max_terms: usize,
}

impl MethodConfig {
    fn default_kind() -> MethodKind {
        MethodKind::Neumann
    }
    fn default_tol() -> f64 {
        1e-12
    }
    fn default_max_terms() -> usize {
        500
    }

    pub fn inversion(&self) -> InversionMethod<f64> {
        match self.kind {
            MethodKind::Neumann => InversionMethod::Neumann {
                tol: self.tol,
                max_terms: self.max_terms,
            },
            MethodKind::Direct => InversionMethod::Direct,
        }
    }
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            kind: Self::default_kind(),
            tol: Self::default_tol(),
            max_terms: Self::default_max_terms(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    Identity,
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// `x' = A x` perturbed through `B C`
    Matrix {
        a: Vec<Vec<f64>>,
        control: ControlKind,
        #[serde(default)]
        b: Option<Vec<Vec<f64>>>,
        c: Vec<Vec<f64>>,
    },
    /// left translation on `[-length, 0]` with Dirichlet control and a measure observation
    Translation {
        length: f64,
        lambda_re: f64,
        #[serde(default)]
        lambda_im: f64,
        measure: MeasureConfig,
    },
    /// neutral delay equation; `scaling` conjugates with `(x, f) -> (x, scaling f)`
    Neutral {
        a: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
        p: MeasureConfig,
        k: MeasureConfig,
        #[serde(default)]
        scaling: Option<f64>,
    },
}

/// Scalar weights stand for multiples of the identity.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Weight {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

impl Weight {
    fn matrix(&self, dim: usize) -> Result<Matrix<f64>> {
        match self {
            Weight::Scalar(s) => Ok(Matrix::identity(dim).scale(*s)),
            Weight::Matrix(rows) => {
                let m = matrix(rows)?;
                if m.rows() != dim || m.cols() != dim {
                    return Err(Error::Config(format!("measure weight must be {dim}x{dim}")));
                }
                Ok(m)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub location: f64,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub start: f64,
    pub end: f64,
    pub value: Weight,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    #[serde(default)]
    pub atoms: Vec<AtomConfig>,
    #[serde(default)]
    pub densities: Vec<DensityConfig>,
}

impl MeasureConfig {
    pub fn build(&self, dim: usize) -> Result<MeasureSpec<f64>> {
        let mut mu = MeasureSpec::zero(dim);
        for a in &self.atoms {
            mu = mu.with_atom(a.location, a.weight.matrix(dim)?)?;
        }
        for d in &self.densities {
            mu = mu.with_density(d.start, d.end, d.value.matrix(dim)?)?;
        }
        Ok(mu)
    }
}

/// Initial data. Histories are point samples, evenly spaced over the history interval and
/// interpolated linearly onto the grid.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub state: Option<Vec<f64>>,
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    #[serde(default)]
    pub history: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// include (thinned) canonical basis vectors
    #[serde(default = "yes")]
    pub basis: bool,
    #[serde(default = "ProbeConfig::default_random")]
    pub random: usize,
    /// explicit probe states in full state coordinates
    #[serde(default)]
    pub states: Vec<Vec<f64>>,
}

fn yes() -> bool {
    true
}

impl ProbeConfig {
    fn default_random() -> usize {
        4
    }
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            basis: true,
            random: Self::default_random(),
            states: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibilityConfig {
    #[serde(default = "AdmissibilityConfig::default_signals")]
    pub signals: usize,
    /// threshold `q < 1` for the Miyadera-Voigt check (needs `B = I`)
    #[serde(default)]
    pub miyadera_voigt_q: Option<f64>,
    #[serde(default)]
    pub desch_schappacher: Option<DeschSchappacherConfig>,
}

impl AdmissibilityConfig {
    fn default_signals() -> usize {
        8
    }
}

impl Default for AdmissibilityConfig {
    fn default() -> Self {
        Self {
            signals: Self::default_signals(),
            miyadera_voigt_q: None,
            desch_schappacher: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DeschSchappacherConfig {
    pub omega: f64,
    /// Favard-class constant; not derivable from the system, so it is an input
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "DeschSchappacherConfig::default_terms")]
    pub terms: usize,
}

fn one() -> f64 {
    1.0
}

impl DeschSchappacherConfig {
    fn default_terms() -> usize {
        20
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    CountsAgainst,
    Ignored,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    #[serde(default = "AsymptoticsConfig::default_properties")]
    pub properties: Vec<String>,
    #[serde(default = "AsymptoticsConfig::default_policy")]
    pub policy: PolicyConfig,
    /// random functionals for weak stability, on top of the coordinate functionals
    #[serde(default = "AsymptoticsConfig::default_functionals")]
    pub functionals: usize,
    /// absolute tail duration; overrides `tail_fraction`
    #[serde(default)]
    pub tail_duration: Option<f64>,
    #[serde(default)]
    pub tail_fraction: Option<f64>,
    #[serde(default)]
    pub band: Option<f64>,
    #[serde(default)]
    pub bound_hint: Option<f64>,
    #[serde(default)]
    pub slope_tol: Option<f64>,
    #[serde(default)]
    pub strong_tol: Option<f64>,
    #[serde(default)]
    pub weak_tol: Option<f64>,
    #[serde(default)]
    pub ergodic_tol: Option<f64>,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub sub_windows: Option<usize>,
}

impl AsymptoticsConfig {
    fn default_properties() -> Vec<String> {
        Property::ALL.iter().map(|p| p.name().to_string()).collect()
    }
    fn default_policy() -> PolicyConfig {
        PolicyConfig::CountsAgainst
    }
    fn default_functionals() -> usize {
        4
    }

    pub fn properties(&self) -> Result<Vec<Property>> {
        if self.properties.is_empty() {
            return Err(Error::Config("no asymptotic properties requested".into()));
        }
        self.properties
            .iter()
            .map(|s| Property::parse(s).ok_or_else(|| Error::Config(format!("unknown property {s:?}"))))
            .collect()
    }

    pub fn policy(&self) -> InconclusivePolicy {
        match self.policy {
            PolicyConfig::CountsAgainst => InconclusivePolicy::CountsAgainst,
            PolicyConfig::Ignored => InconclusivePolicy::Ignored,
        }
    }

    pub fn checker(&self) -> CheckerConfig<f64> {
        let mut c = CheckerConfig::default();
        if let Some(f) = self.tail_fraction {
            c.tail = Tail::Fraction(f);
        }
        if let Some(d) = self.tail_duration {
            c.tail = Tail::Duration(d);
        }
        c.band = self.band.unwrap_or(c.band);
        c.bound_hint = self.bound_hint.unwrap_or(c.bound_hint);
        c.slope_tol = self.slope_tol.unwrap_or(c.slope_tol);
        c.strong_tol = self.strong_tol.unwrap_or(c.strong_tol);
        c.weak_tol = self.weak_tol.unwrap_or(c.weak_tol);
        c.ergodic_tol = self.ergodic_tol.unwrap_or(c.ergodic_tol);
        c.window = self.window.unwrap_or(c.window);
        c.sub_windows = self.sub_windows.unwrap_or(c.sub_windows);
        c
    }
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self {
            properties: Self::default_properties(),
            policy: Self::default_policy(),
            functionals: Self::default_functionals(),
            tail_duration: None,
            tail_fraction: None,
            band: None,
            bound_hint: None,
            slope_tol: None,
            strong_tol: None,
            weak_tol: None,
            ergodic_tol: None,
            window: None,
            sub_windows: None,
        }
    }
}

pub fn matrix(rows: &[Vec<f64>]) -> Result<Matrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Config(
            "matrices must be nonempty with rows of equal length".into(),
        ));
    }
    Matrix::from_rows(rows)
}

/// A configured system reduced to what the commands need.
#[derive(Debug, Clone)]
pub enum System {
    Plain(PerturbationTriple<f64>),
    Neutral(NeutralSystem<f64>),
}

impl System {
    pub fn triple(&self) -> Result<PerturbationTriple<f64>> {
        match self {
            System::Plain(t) => Ok(t.clone()),
            System::Neutral(sys) => neutral::build_perturbation(sys),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("horizon", self.horizon), ("step", self.step)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        steps_in(self.horizon, self.step)?;
        steps_in(self.output_step(), self.step)?;
        steps_in(self.horizon, self.output_step())?;
        if self.method.tol <= 0.0 {
            return Err(Error::Config("method tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn output_step(&self) -> f64 {
        self.output_step.unwrap_or(self.step)
    }

    pub fn output_grid(&self) -> Result<Grid<f64>> {
        Grid::covering(0.0, self.horizon, self.output_step())
    }

    pub fn system(&self) -> Result<System> {
        match &self.system {
            SystemConfig::Matrix { a, control, b, c } => {
                let a = matrix(a)?;
                let control = match (control, b) {
                    (ControlKind::Identity, None) => ControlSpec::Identity,
                    (ControlKind::Bounded, Some(b)) => ControlSpec::Bounded(matrix(b)?),
                    (ControlKind::Identity, Some(_)) => {
                        return Err(Error::Config("`b` given with control = \"identity\"".into()))
                    }
                    (ControlKind::Bounded, None) => {
                        return Err(Error::Config("control = \"bounded\" needs `b`".into()))
                    }
                };
                Ok(System::Plain(PerturbationTriple::new(
                    SemigroupSpec::Matrix(a),
                    control,
                    matrix(c)?,
                )?))
            }
            SystemConfig::Translation {
                length,
                lambda_re,
                lambda_im,
                measure,
            } => {
                let mu = measure.build(1)?;
                Ok(System::Plain(translation_triple(
                    &mu,
                    Complex::new(*lambda_re, *lambda_im),
                    *length,
                    self.step,
                )?))
            }
            SystemConfig::Neutral { a, c, p, k, scaling } => {
                let a = matrix(a)?;
                let n = a.rows();
                let cells = steps_in(1.0, self.step).map_err(|_| {
                    Error::Config(format!(
                        "neutral systems need 1 / step integral, got step {}",
                        self.step
                    ))
                })?;
                let sys = NeutralSystem::new(a, p.build(n)?, k.build(n)?, matrix(c)?, cells)?;
                match scaling {
                    Some(alpha) => Ok(System::Neutral(neutral::scaling_conjugation(&sys, *alpha)?)),
                    None => Ok(System::Neutral(sys)),
                }
            }
        }
    }

    fn initial(&self) -> Result<&InitialConfig> {
        self.initial
            .as_ref()
            .ok_or_else(|| Error::Config("missing [initial] section".into()))
    }

    /// Initial state of a plain system.
    pub fn initial_state(&self, triple: &PerturbationTriple<f64>) -> Result<StateVector<f64>> {
        let init = self.initial()?;
        match (&triple.base, &init.state, &init.history) {
            (SemigroupSpec::LeftTranslation { grid, dim }, None, Some(h)) => {
                let seg = history(h, *dim, grid)?;
                triple.base.state(seg.cell_averages())
            }
            (SemigroupSpec::LeftTranslation { .. }, ..) => {
                Err(Error::Config("translation systems take `initial.history` only".into()))
            }
            (_, Some(s), None) => triple.base.state(s.clone()),
            _ => Err(Error::Config("matrix systems take `initial.state` only".into())),
        }
    }

    /// Initial data `(y, f)` of a neutral system.
    pub fn neutral_initial(&self, sys: &NeutralSystem<f64>) -> Result<(Vec<f64>, HistorySegment<f64>)> {
        let init = self.initial()?;
        match (&init.y, &init.history, &init.state) {
            (Some(y), Some(h), None) => Ok((y.clone(), history(h, sys.dim(), &sys.history_grid())?)),
            _ => Err(Error::Config(
                "neutral systems take `initial.y` and `initial.history`".into(),
            )),
        }
    }

    pub fn probes(&self, base: &SemigroupSpec<f64>) -> Result<Vec<StateVector<f64>>> {
        let mut probes = crate::admissibility::default_probes(base, self.probes.random, self.seed);
        if !self.probes.basis {
            probes.drain(..probes.len() - self.probes.random);
        }
        for s in &self.probes.states {
            probes.push(base.state(s.clone())?);
        }
        if probes.is_empty() {
            return Err(Error::Config("empty probe list".into()));
        }
        Ok(probes)
    }
}

/// Samples `rows` (each in `R^dim`), evenly spaced over the grid's span, interpolated onto
/// the grid points.
fn history(rows: &[Vec<f64>], dim: usize, grid: &Grid<f64>) -> Result<HistorySegment<f64>> {
    if rows.is_empty() || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Config(format!(
            "history samples must be nonempty points of R^{dim}"
        )));
    }
    let span = grid.end() - grid.start();
    let last = rows.len() - 1;
    HistorySegment::from_fn(grid, dim, |s| {
        if last == 0 {
            return rows[0].clone();
        }
        let x = ((s - grid.start()) / span * last as f64).clamp(0.0, last as f64);
        let i = (x.floor() as usize).min(last - 1);
        let w = x - i as f64;
        rows[i]
            .iter()
            .zip(&rows[i + 1])
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect()
    })
}
