//! Concrete C0-semigroup engines: matrix exponentials, grid shifts and block-diagonal
//! combinations of them.
//!
//! Shift semigroups act on piecewise-constant functions stored as one value block per grid
//! cell `[s_j, s_j + h)`, so they can only be evaluated at whole multiples of the cell width.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{matexp, steps_in, Grid, Matrix, NormTag, StateVector};
use crate::scalar::Scalar;

/// Declarative description of a semigroup `T(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SemigroupSpec<T> {
    /// `T(t) = exp(tA)` on `R^n` with the max-norm.
    Matrix(Matrix<T>),
    /// Nilpotent left shift on `L1(-1, 0; R^dim)`: `(S(t)f)(s) = f(s + t)` for `s + t <= 0`, else 0.
    NilpotentShift { grid: Grid<T>, dim: usize },
    /// Left translation on `L1(R_-)` truncated to `[-L, 0]`; mass moved past `-L` is dropped.
    LeftTranslation { grid: Grid<T>, dim: usize },
    /// `diag(T_1(t), T_2(t), ...)` with the sum of component norms.
    BlockDiag(Vec<SemigroupSpec<T>>),
}

impl<T: Scalar> SemigroupSpec<T> {
    pub fn nilpotent_shift(cells: usize, dim: usize) -> Result<Self> {
        let h = T::one() / T::from_usize_lossy(cells);
        let spec = SemigroupSpec::NilpotentShift {
            grid: Grid::new(-T::one(), h, cells)?,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn left_translation(length: T, step: T) -> Result<Self> {
        let spec = SemigroupSpec::LeftTranslation {
            grid: Grid::covering(-length, T::zero(), step)?,
            dim: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SemigroupSpec::Matrix(a) => {
                if !a.is_square() {
                    return Err(Error::Dimension(format!(
                        "generator must be square, got {}x{}",
                        a.rows(),
                        a.cols()
                    )));
                }
            }
            SemigroupSpec::NilpotentShift { grid, dim } => {
                check_dim(*dim)?;
                if (grid.start() + T::one()).abs() > T::lit(1e-12) || grid.end().abs() > T::lit(1e-9) {
                    return Err(Error::Domain(format!(
                        "nilpotent shift grid must cover [-1, 0], got [{}, {}]",
                        grid.start(),
                        grid.end()
                    )));
                }
            }
            SemigroupSpec::LeftTranslation { grid, dim } => {
                check_dim(*dim)?;
                if grid.end().abs() > T::lit(1e-9) * (T::one() + grid.len()) {
                    return Err(Error::Domain("translation grid must end at 0".into()));
                }
                if grid.len() < T::one() - T::lit(1e-12) {
                    return Err(Error::Domain(format!(
                        "truncation length must be at least 1, got {}",
                        grid.len()
                    )));
                }
            }
            SemigroupSpec::BlockDiag(parts) => {
                if parts.is_empty() {
                    return Err(Error::Domain("empty block-diagonal semigroup".into()));
                }
                for p in parts {
                    if matches!(p, SemigroupSpec::BlockDiag(_)) {
                        return Err(Error::Domain("nested block-diagonal semigroups".into()));
                    }
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Number of coordinates of the discretized state.
    pub fn state_dim(&self) -> usize {
        match self {
            SemigroupSpec::Matrix(a) => a.rows(),
            SemigroupSpec::NilpotentShift { grid, dim } | SemigroupSpec::LeftTranslation { grid, dim } => {
                grid.count() * dim
            }
            SemigroupSpec::BlockDiag(parts) => parts.iter().map(Self::state_dim).sum(),
        }
    }

    /// Norm of the discretized state space.
    pub fn norm_tag(&self) -> NormTag<T> {
        match self {
            SemigroupSpec::Matrix(_) => NormTag::Sup,
            SemigroupSpec::NilpotentShift { grid, dim } | SemigroupSpec::LeftTranslation { grid, dim } => {
                NormTag::l1(grid.step(), *dim)
            }
            SemigroupSpec::BlockDiag(parts) => {
                NormTag::Product(parts.iter().map(|p| (p.state_dim(), p.norm_tag())).collect())
            }
        }
    }

    pub fn zero_state(&self) -> StateVector<T> {
        StateVector::zeros(self.state_dim(), self.norm_tag())
    }

    /// Wraps raw coordinates as a state of this space.
    pub fn state(&self, coords: Vec<T>) -> Result<StateVector<T>> {
        if coords.len() != self.state_dim() {
            return Err(Error::Dimension(format!(
                "state has {} coordinates, space needs {}",
                coords.len(),
                self.state_dim()
            )));
        }
        StateVector::new(coords, self.norm_tag())
    }

    /// Cell width of the shift components, if any; all of them must agree.
    pub fn shift_step(&self) -> Option<T> {
        match self {
            SemigroupSpec::Matrix(_) => None,
            SemigroupSpec::NilpotentShift { grid, .. } | SemigroupSpec::LeftTranslation { grid, .. } => {
                Some(grid.step())
            }
            SemigroupSpec::BlockDiag(parts) => parts.iter().find_map(Self::shift_step),
        }
    }

    /// `T(t) x`.
    pub fn apply(&self, t: T, x: &StateVector<T>) -> Result<StateVector<T>> {
        Ok(self.apply_tracking(t, x)?.0)
    }

    /// `T(t) x` together with the L1 mass dropped at the truncation boundary of
    /// left-translation components.
    pub fn apply_tracking(&self, t: T, x: &StateVector<T>) -> Result<(StateVector<T>, T)> {
        if t < T::zero() || !t.is_finite() {
            return Err(Error::Domain(format!("semigroup evaluated at t = {t}")));
        }
        self.check_state(x)?;
        if t == T::zero() {
            return Ok((x.clone(), T::zero()));
        }
        let mut coords = x.coords().to_vec();
        let dropped = self.apply_in_place(t, &mut coords)?;
        Ok((x.with_coords(coords)?, dropped))
    }

    fn apply_in_place(&self, t: T, coords: &mut [T]) -> Result<T> {
        match self {
            SemigroupSpec::Matrix(a) => {
                let e = matexp(a, t)?;
                let y = e.matvec(coords)?;
                coords.copy_from_slice(&y);
                Ok(T::zero())
            }
            SemigroupSpec::NilpotentShift { grid, dim } => {
                let m = steps_in(t, grid.step())?;
                shift_cells(coords, m, *dim);
                Ok(T::zero())
            }
            SemigroupSpec::LeftTranslation { grid, dim } => {
                let m = steps_in(t, grid.step())?;
                let lost = NormTag::l1(grid.step(), *dim).eval(&coords[..(m * dim).min(coords.len())]);
                shift_cells(coords, m, *dim);
                Ok(lost)
            }
            SemigroupSpec::BlockDiag(parts) => {
                let mut offset = 0;
                let mut lost = T::zero();
                for p in parts {
                    let n = p.state_dim();
                    lost = lost + p.apply_in_place(t, &mut coords[offset..offset + n])?;
                    offset += n;
                }
                Ok(lost)
            }
        }
    }

    fn check_state(&self, x: &StateVector<T>) -> Result<()> {
        if x.dim() != self.state_dim() {
            return Err(Error::Dimension(format!(
                "state has {} coordinates, semigroup acts on {}",
                x.dim(),
                self.state_dim()
            )));
        }
        Ok(())
    }

    /// Precomputed one-step propagator `T(h)`.
    pub fn stepper(&self, h: T) -> Result<Stepper<T>> {
        self.validate()?;
        if !(h > T::zero()) {
            return Err(Error::Domain(format!("time step must be positive, got {h}")));
        }
        let mut parts = Vec::new();
        self.collect_steppers(h, &mut parts)?;
        Ok(Stepper { parts })
    }

    fn collect_steppers(&self, h: T, out: &mut Vec<StepPart<T>>) -> Result<()> {
        match self {
            SemigroupSpec::Matrix(a) => out.push(StepPart::Matrix(matexp(a, h)?)),
            SemigroupSpec::NilpotentShift { grid, dim } => out.push(StepPart::Shift {
                cells: grid.count(),
                dim: *dim,
                by: steps_in(h, grid.step())?,
                step: grid.step(),
                track: false,
            }),
            SemigroupSpec::LeftTranslation { grid, dim } => out.push(StepPart::Shift {
                cells: grid.count(),
                dim: *dim,
                by: steps_in(h, grid.step())?,
                step: grid.step(),
                track: true,
            }),
            SemigroupSpec::BlockDiag(parts) => {
                for p in parts {
                    p.collect_steppers(h, out)?;
                }
            }
        }
        Ok(())
    }

    /// Orbit `t_k -> T(t_k) x` on `time_grid`, built by repeated one-step application.
    pub fn orbit(&self, x: &StateVector<T>, time_grid: &Grid<T>) -> Result<OrbitSeries<T>> {
        if time_grid.start() != T::zero() {
            return Err(Error::Domain("orbit time grid must start at 0".into()));
        }
        self.check_state(x)?;
        let stepper = self.stepper(time_grid.step())?;
        let mut states = Vec::with_capacity(time_grid.count() + 1);
        let mut cur = x.coords().to_vec();
        let mut dropped = T::zero();
        states.push(x.clone());
        for _ in 0..time_grid.count() {
            dropped = dropped + stepper.step(&mut cur);
            states.push(x.with_coords(cur.clone())?);
        }
        let mut orbit = OrbitSeries::new(*time_grid, states)?;
        orbit.truncated_mass = dropped;
        Ok(orbit)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::Dimension("function values need at least one component".into()));
    }
    Ok(())
}

/// `(S f)_j = f_{j+m}`, with the last `m` cells cleared.
fn shift_cells<T: Scalar>(coords: &mut [T], m: usize, dim: usize) {
    let n = coords.len();
    let k = (m * dim).min(n);
    coords.copy_within(k.., 0);
    coords[n - k..].iter_mut().for_each(|c| *c = T::zero());
}

#[derive(Debug, Clone)]
enum StepPart<T> {
    Matrix(Matrix<T>),
    Shift {
        cells: usize,
        dim: usize,
        by: usize,
        step: T,
        track: bool,
    },
}

/// One-step propagator `T(h)` acting in place on state coordinates.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    parts: Vec<StepPart<T>>,
}

impl<T: Scalar> Stepper<T> {
    /// Advances `coords` by one step; returns the L1 mass dropped by truncated translations.
    pub fn step(&self, coords: &mut [T]) -> T {
        let mut offset = 0;
        let mut lost = T::zero();
        for part in &self.parts {
            match part {
                StepPart::Matrix(e) => {
                    let n = e.rows();
                    let seg = &mut coords[offset..offset + n];
                    let mut out = vec![T::zero(); n];
                    e.matvec_acc(seg, &mut out);
                    seg.copy_from_slice(&out);
                    offset += n;
                }
                StepPart::Shift {
                    cells,
                    dim,
                    by,
                    step,
                    track,
                } => {
                    let n = cells * dim;
                    let seg = &mut coords[offset..offset + n];
                    if *track {
                        lost = lost + NormTag::l1(*step, *dim).eval(&seg[..(by * dim).min(n)]);
                    }
                    shift_cells(seg, *by, *dim);
                    offset += n;
                }
            }
        }
        lost
    }
}

/// Sampled orbit with its norm track.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSeries<T> {
    pub grid: Grid<T>,
    pub states: Vec<StateVector<T>>,
    pub norms: Vec<T>,
    /// L1 mass dropped at a truncation boundary while computing the orbit.
    pub truncated_mass: T,
}

impl<T: Scalar> OrbitSeries<T> {
    pub fn new(grid: Grid<T>, states: Vec<StateVector<T>>) -> Result<Self> {
        if states.len() != grid.count() + 1 {
            return Err(Error::Dimension(format!(
                "{} states for {} grid points",
                states.len(),
                grid.count() + 1
            )));
        }
        let norms = states.iter().map(StateVector::norm).collect();
        Ok(Self {
            grid,
            states,
            norms,
            truncated_mass: T::zero(),
        })
    }

    /// Orbit with coordinates multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        let states: Vec<_> = self.states.iter().map(|s| s.scaled(c)).collect();
        Self {
            grid: self.grid,
            norms: states.iter().map(StateVector::norm).collect(),
            states,
            truncated_mass: self.truncated_mass * c.abs(),
        }
    }

    /// The orbit `t -> x(t + b)`, i.e. the left translate by `k` grid steps.
    pub fn shifted(&self, k: usize) -> Result<Self> {
        if k >= self.grid.count() {
            return Err(Error::Domain(format!(
                "cannot shift an orbit of {} steps by {k}",
                self.grid.count()
            )));
        }
        let grid = Grid::new(T::zero(), self.grid.step(), self.grid.count() - k)?;
        Ok(Self {
            grid,
            states: self.states[k..].to_vec(),
            norms: self.norms[k..].to_vec(),
            truncated_mass: T::zero(),
        })
    }

    /// Largest coordinate-wise deviation between two orbits on the same grid.
    pub fn max_deviation(&self, other: &Self) -> Result<T> {
        if self.states.len() != other.states.len() {
            return Err(Error::Dimension("orbits of different lengths".into()));
        }
        self.states
            .iter()
            .zip(&other.states)
            .try_fold(T::zero(), |m, (a, b)| Ok(m.max(a.max_abs_diff(b)?)))
    }

    pub fn sup_norm(&self) -> T {
        self.norms.iter().fold(T::zero(), |m, n| m.max(*n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalar(a: f64) -> SemigroupSpec<f64> {
        SemigroupSpec::Matrix(Matrix::scalar(a))
    }

    #[test]
    fn matrix_apply_is_exponential() {
        let x = StateVector::sup(vec![1.0]);
        let y = scalar(-1.0).apply(1.0, &x).unwrap();
        assert_abs_diff_eq!(y.coords()[0], (-1.0_f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn zero_time_is_identity_exactly() {
        let shift = SemigroupSpec::<f64>::nilpotent_shift(8, 1).unwrap();
        let f = shift.state((0..8).map(|k| k as f64 * 0.3 - 1.0).collect()).unwrap();
        assert_eq!(shift.apply(0.0, &f).unwrap(), f);
        let x = StateVector::sup(vec![0.7]);
        assert_eq!(scalar(-3.0).apply(0.0, &x).unwrap(), x);
    }

    #[test]
    fn nilpotent_after_unit_time() {
        let shift = SemigroupSpec::<f64>::nilpotent_shift(16, 2).unwrap();
        let f = shift.state((0..32).map(|k| 1.0 + k as f64).collect()).unwrap();
        assert!(shift.apply(1.0, &f).unwrap().is_zero());
        assert!(shift.apply(1.5, &f).unwrap().is_zero());
        let half = shift.apply(0.5, &f).unwrap();
        assert_eq!(half.coords()[0], f.coords()[16]);
        assert!(half.coords()[16..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn misaligned_and_negative_times_rejected() {
        let shift = SemigroupSpec::<f64>::nilpotent_shift(4, 1).unwrap();
        let f = shift.zero_state();
        assert!(matches!(shift.apply(0.1, &f), Err(Error::GridAlignment(_))));
        assert!(matches!(shift.apply(-0.25, &f), Err(Error::Domain(_))));
        assert!(scalar(1.0).apply(-1.0, &StateVector::sup(vec![1.0])).is_err());
    }

    #[test]
    fn orbit_matches_exponential() {
        let g = Grid::covering(0.0, 5.0, 0.01).unwrap();
        let orbit = scalar(-1.0).orbit(&StateVector::sup(vec![1.0]), &g).unwrap();
        for (t, n) in g.points().zip(&orbit.norms) {
            assert!((n - (-t).exp()).abs() <= 1e-8);
        }
        let zero = scalar(-1.0).orbit(&StateVector::sup(vec![0.0]), &g).unwrap();
        assert!(zero.norms.iter().all(|n| *n == 0.0));
    }

    #[test]
    fn shift_orbit_vanishes_after_one() {
        let shift = SemigroupSpec::<f64>::nilpotent_shift(32, 1).unwrap();
        let f = shift.state((0..32).map(|k| (k as f64).sin() + 2.0).collect()).unwrap();
        let g = Grid::covering(0.0, 2.0, 1.0 / 32.0).unwrap();
        let orbit = shift.orbit(&f, &g).unwrap();
        for (t, n) in g.points().zip(&orbit.norms) {
            if t >= 1.0 - 1e-12 {
                assert_eq!(*n, 0.0);
            }
        }
    }

    #[test]
    fn semigroup_law_for_shifts_is_exact() {
        let spec = SemigroupSpec::BlockDiag(vec![
            SemigroupSpec::Matrix(Matrix::from_rows(&[vec![-1.0, 0.5], vec![0.0, -2.0]]).unwrap()),
            SemigroupSpec::nilpotent_shift(20, 2).unwrap(),
        ]);
        let x = spec
            .state((0..42).map(|k| ((k * 7) % 5) as f64 - 2.0).collect())
            .unwrap();
        let a = spec.apply(0.35, &spec.apply(0.25, &x).unwrap()).unwrap();
        let b = spec.apply(0.6, &x).unwrap();
        assert_eq!(&a.coords()[2..], &b.coords()[2..]);
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn block_diag_bound() {
        // sup_t ||T0(t)|| <= max(M, 1) with M = 1 for a contraction and the nilpotent shift
        let spec = SemigroupSpec::BlockDiag(vec![
            SemigroupSpec::Matrix(Matrix::from_diag(&[-1.0, -0.5])),
            SemigroupSpec::nilpotent_shift(10, 2).unwrap(),
        ]);
        let x = spec.state((0..22).map(|k| (k as f64 * 1.3).cos()).collect()).unwrap();
        let g = Grid::covering(0.0, 3.0, 0.1).unwrap();
        let orbit = spec.orbit(&x, &g).unwrap();
        assert!(orbit.sup_norm() <= x.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn hurwitz_decay() {
        let a = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, -3.0]]).unwrap();
        let spec = SemigroupSpec::Matrix(a);
        let x = StateVector::sup(vec![1.0, -2.0]);
        let g = Grid::covering(0.0, 20.0, 0.05).unwrap();
        let orbit = spec.orbit(&x, &g).unwrap();
        for (t, n) in g.points().zip(&orbit.norms) {
            if t >= 1.0 {
                assert!(*n <= 2.0 * (-0.5_f64 * t).exp() * x.norm());
            }
        }
    }

    #[test]
    fn translation_reports_dropped_mass() {
        let spec = SemigroupSpec::<f64>::left_translation(2.0, 0.5).unwrap();
        let f = spec.state(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (g, lost) = spec.apply_tracking(1.0, &f).unwrap();
        assert_eq!(g.coords(), &[3.0, 4.0, 0.0, 0.0]);
        assert_eq!(lost, 0.5 * 3.0);
        assert!(SemigroupSpec::<f64>::left_translation(0.5, 0.25).is_err());
    }
}
