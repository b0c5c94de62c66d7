//! Control, observation and input-output maps of a perturbation triple `(T, B, C)`, the
//! inversion of `I - F_t`, and the perturbed semigroup
//! `T_BC(t) x = T(t) x + B_t (I - F_t)^{-1} C_t x`.
//!
//! Everything is computed on one uniform time grid of step `h` through [`Realization`].
//! Boundary control operators never appear as operators: their effect is the injection of
//! the input value at the right end of a shift component.

mod realization;
mod signal;

pub use realization::{InversionMethod, InversionOutcome, Realization};
pub use signal::InputSignal;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, NormTag};
use crate::scalar::Scalar;
use crate::semigroups::SemigroupSpec;

/// The control operator `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ControlSpec<T> {
    /// `B in L(U, X)` with `U = R^m`; needs a matrix base semigroup.
    Bounded(Matrix<T>),
    /// `B = I` on a matrix base semigroup (Miyadera-Voigt setting).
    Identity,
    /// Dirichlet boundary control of the left translation; `U = R^dim`. Only `Re lambda > 0`
    /// is used (as a validity check); on `L1` the injected profile does not depend on it.
    BoundaryDirichlet { lambda_re: T, lambda_im: T },
    /// Neutral delay structure on `X x L1(-1, 0; X)`: `u = (u1, u2)`, with `u1` driving the
    /// matrix component and `u2` entering the history at `s = 0`.
    NeutralBoundary,
}

/// A base semigroup with control and observation operators. `C` acts on the discretized
/// state and maps into the input space `U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationTriple<T> {
    pub base: SemigroupSpec<T>,
    pub control: ControlSpec<T>,
    pub observation: Matrix<T>,
}

/// How the state space decomposes for a triple.
#[derive(Debug, Clone)]
pub(crate) struct Layout<T> {
    pub state_dim: usize,
    /// generator of the leading matrix component
    pub generator: Option<Matrix<T>>,
    /// `n x m` map from inputs to the matrix component
    pub bpart: Option<Matrix<T>>,
    /// `(state offset, cells, dim, input offset)` of a boundary-driven shift component
    pub boundary: Option<(usize, usize, usize, usize)>,
    pub width: usize,
    pub unorm: NormTag<T>,
}

impl<T: Scalar> PerturbationTriple<T> {
    pub fn new(base: SemigroupSpec<T>, control: ControlSpec<T>, observation: Matrix<T>) -> Result<Self> {
        let triple = Self {
            base,
            control,
            observation,
        };
        triple.layout()?;
        Ok(triple)
    }

    /// The unperturbed triple `C = 0` with the same spaces.
    pub fn unperturbed(&self) -> Self {
        Self {
            observation: Matrix::zeros(self.observation.rows(), self.observation.cols()),
            ..self.clone()
        }
    }

    /// Dimension of the input space `U`.
    pub fn input_dim(&self) -> usize {
        self.observation.rows()
    }

    pub fn input_norm(&self) -> NormTag<T> {
        match self.layout() {
            Ok(l) => l.unorm,
            Err(_) => NormTag::Sup,
        }
    }

    /// `||C||` induced by the state norm on a matrix base and by the max-norm otherwise.
    pub fn observation_norm(&self) -> T {
        self.observation.norm_inf()
    }

    pub(crate) fn layout(&self) -> Result<Layout<T>> {
        self.base.validate()?;
        let state_dim = self.base.state_dim();
        if self.observation.cols() != state_dim {
            return Err(Error::Dimension(format!(
                "observation has {} columns, state has {state_dim} coordinates",
                self.observation.cols()
            )));
        }
        let m = self.observation.rows();
        if m == 0 {
            return Err(Error::Dimension("observation must have at least one row".into()));
        }
        let layout = match (&self.control, &self.base) {
            (ControlSpec::Bounded(b), SemigroupSpec::Matrix(a)) => {
                if b.rows() != a.rows() || b.cols() != m {
                    return Err(Error::Dimension(format!(
                        "B is {}x{}, expected {}x{m}",
                        b.rows(),
                        b.cols(),
                        a.rows()
                    )));
                }
                Layout {
                    state_dim,
                    generator: Some(a.clone()),
                    bpart: Some(b.clone()),
                    boundary: None,
                    width: m,
                    unorm: NormTag::Sup,
                }
            }
            (ControlSpec::Identity, SemigroupSpec::Matrix(a)) => {
                if m != a.rows() {
                    return Err(Error::Dimension(format!(
                        "with B = I the observation must have {} rows, got {m}",
                        a.rows()
                    )));
                }
                Layout {
                    state_dim,
                    generator: Some(a.clone()),
                    bpart: Some(Matrix::identity(m)),
                    boundary: None,
                    width: m,
                    unorm: NormTag::Sup,
                }
            }
            (ControlSpec::BoundaryDirichlet { lambda_re, .. }, SemigroupSpec::LeftTranslation { grid, dim }) => {
                if !(*lambda_re > T::zero()) {
                    return Err(Error::Domain(format!(
                        "Dirichlet operator needs Re lambda > 0, got {lambda_re}"
                    )));
                }
                if m != *dim {
                    return Err(Error::Dimension(format!("observation must have {dim} rows, got {m}")));
                }
                Layout {
                    state_dim,
                    generator: None,
                    bpart: None,
                    boundary: Some((0, grid.count(), *dim, 0)),
                    width: m,
                    unorm: NormTag::Sup,
                }
            }
            (ControlSpec::NeutralBoundary, SemigroupSpec::BlockDiag(parts)) => match parts.as_slice() {
                [SemigroupSpec::Matrix(a), SemigroupSpec::NilpotentShift { grid, dim }] if *dim == a.rows() => {
                    let n = a.rows();
                    if m != 2 * n {
                        return Err(Error::Dimension(format!(
                            "neutral observation must have {} rows, got {m}",
                            2 * n
                        )));
                    }
                    let mut bpart = Matrix::zeros(n, 2 * n);
                    bpart.set_block(0, 0, &Matrix::identity(n));
                    Layout {
                        state_dim,
                        generator: Some(a.clone()),
                        bpart: Some(bpart),
                        boundary: Some((n, grid.count(), n, n)),
                        width: m,
                        unorm: NormTag::Product(vec![(n, NormTag::Sup), (n, NormTag::Sup)]),
                    }
                }
                _ => {
                    return Err(Error::Domain(
                        "neutral control needs diag(matrix(n), nilpotent shift with n components)".into(),
                    ))
                }
            },
            (c, _) => {
                return Err(Error::Domain(format!(
                    "control {} is incompatible with the base semigroup",
                    control_name(c)
                )))
            }
        };
        Ok(layout)
    }
}

fn control_name<T>(c: &ControlSpec<T>) -> &'static str {
    match c {
        ControlSpec::Bounded(_) => "bounded",
        ControlSpec::Identity => "identity",
        ControlSpec::BoundaryDirichlet { .. } => "Dirichlet boundary",
        ControlSpec::NeutralBoundary => "neutral boundary",
    }
}
