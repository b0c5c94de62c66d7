use serde::Serialize;

use super::{InputSignal, Layout, PerturbationTriple};
use crate::error::{Error, Result};
use crate::numerics::{matexp, steps_in, Grid, Lu, Matrix, NormTag, StateVector};
use crate::scalar::Scalar;
use crate::semigroups::{OrbitSeries, Stepper};

/// How to solve `(I - F_t) w = v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InversionMethod<T> {
    /// Partial sums of `sum_n F_t^n v` until a term has norm `<= tol`. Refused unless the
    /// discrete norm of `F_t` is below 1.
    Neumann { tol: T, max_terms: usize },
    /// Block forward substitution in time.
    Direct,
}

impl<T: Scalar> InversionMethod<T> {
    pub fn neumann_default() -> Self {
        InversionMethod::Neumann {
            tol: T::lit(1e-12),
            max_terms: 500,
        }
    }
}

/// Result of an inversion, with the Neumann diagnostics when they apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionOutcome<T> {
    pub signal: InputSignal<T>,
    /// `||F^n v||_1` for `n = 0, 1, ...` (Neumann only)
    pub term_norms: Vec<T>,
    /// discrete `||F_t||` (Neumann only)
    pub io_norm: Option<T>,
}

/// Time discretization of a triple with step `h`.
///
/// Inputs are constant on cells `[kh, (k+1)h)`. The state is propagated exactly for such
/// inputs, and the observation returns the cell averages of `C T(s) x` over each cell,
/// which keeps every discrete `L1` norm below its continuous counterpart. The price is a
/// diagonal term `D`: the output on cell `k` sees the input on the same cell, so
/// `I - F_t` is block lower triangular with diagonal blocks `I - D`.
#[derive(Debug, Clone)]
pub struct Realization<T> {
    triple: PerturbationTriple<T>,
    layout: Layout<T>,
    h: T,
    stepper: Stepper<T>,
    /// `Phi(h) B` on the matrix component
    gain: Option<Matrix<T>>,
    /// `C` composed with the cell-averaging operator
    c_avg: Matrix<T>,
    diag: Matrix<T>,
    diag_lu: Lu<T>,
}

impl<T: Scalar> Realization<T> {
    pub fn new(triple: &PerturbationTriple<T>, h: T) -> Result<Self> {
        let layout = triple.layout()?;
        let stepper = triple.base.stepper(h)?;
        if layout.boundary.is_some() {
            let cell = triple.base.shift_step().unwrap_or(h);
            if steps_in(h, cell)? != 1 {
                return Err(Error::GridAlignment(format!(
                    "boundary control needs the time step {h} to equal the cell width {cell}"
                )));
            }
        }
        let m = layout.width;
        let mut c_avg = triple.observation.clone();
        let mut diag = Matrix::zeros(m, m);
        let mut gain = None;
        if let (Some(a), Some(b)) = (&layout.generator, &layout.bpart) {
            let n = a.rows();
            let (phi, psi) = phi_psi(a, h)?;
            let c_mat = triple.observation.block(0, 0, m, n);
            c_avg.set_block(0, 0, &c_mat.mul(&phi.scale(T::one() / h))?);
            diag = c_mat.mul(&psi)?.mul(b)?;
            gain = Some(phi.mul(b)?);
        }
        let diag_lu = Matrix::identity(m).sub(&diag)?.lu()?;
        Ok(Self {
            triple: triple.clone(),
            layout,
            h,
            stepper,
            gain,
            c_avg,
            diag,
            diag_lu,
        })
    }

    pub fn triple(&self) -> &PerturbationTriple<T> {
        &self.triple
    }

    pub fn step(&self) -> T {
        self.h
    }

    pub fn input_dim(&self) -> usize {
        self.layout.width
    }

    pub fn input_norm(&self) -> &NormTag<T> {
        &self.layout.unorm
    }

    pub fn state_dim(&self) -> usize {
        self.layout.state_dim
    }

    /// Instantaneous part `D` of the discrete input-output map.
    pub fn feedthrough(&self) -> &Matrix<T> {
        &self.diag
    }

    /// Number of steps up to `t`.
    pub fn steps(&self, t: T) -> Result<usize> {
        steps_in(t, self.h)
    }

    /// Cell grid of `count` cells starting at 0.
    pub fn signal_grid(&self, count: usize) -> Result<Grid<T>> {
        Grid::new(T::zero(), self.h, count)
    }

    pub fn zero_signal(&self, count: usize) -> Result<InputSignal<T>> {
        InputSignal::zeros(self.signal_grid(count)?, self.layout.width, self.layout.unorm.clone())
    }

    /// Wraps raw cell values as an input signal of this realization.
    pub fn signal(&self, values: Vec<T>) -> Result<InputSignal<T>> {
        let m = self.layout.width;
        if values.is_empty() || !values.len().is_multiple_of(m) {
            return Err(Error::Dimension(format!(
                "{} values do not form cells of width {m}",
                values.len()
            )));
        }
        InputSignal::new(
            self.signal_grid(values.len() / m)?,
            m,
            values,
            self.layout.unorm.clone(),
        )
    }

    fn positive_steps(&self, t: T) -> Result<usize> {
        let k = self.steps(t)?;
        if k == 0 {
            return Err(Error::Domain("signals need a positive horizon".into()));
        }
        Ok(k)
    }

    fn check_signal(&self, u: &InputSignal<T>, k: usize) -> Result<()> {
        if u.width() != self.layout.width {
            return Err(Error::Dimension(format!(
                "signal has {} components, U has {}",
                u.width(),
                self.layout.width
            )));
        }
        if steps_in(u.step(), self.h)? != 1 {
            return Err(Error::GridAlignment(format!(
                "signal step {} differs from the realization step {}",
                u.step(),
                self.h
            )));
        }
        if u.count() < k {
            return Err(Error::Domain(format!("signal has {} cells, {k} needed", u.count())));
        }
        Ok(())
    }

    fn check_state(&self, x: &StateVector<T>) -> Result<()> {
        if x.dim() != self.layout.state_dim {
            return Err(Error::Dimension(format!(
                "state has {} coordinates, expected {}",
                x.dim(),
                self.layout.state_dim
            )));
        }
        Ok(())
    }

    /// `state <- T(h) state + (contribution of the input u on one cell)`; returns truncated mass.
    fn advance(&self, state: &mut [T], u: &[T]) -> T {
        let lost = self.stepper.step(state);
        if let Some(g) = &self.gain {
            let n = g.rows();
            g.matvec_acc(u, &mut state[..n]);
        }
        if let Some((off, cells, dim, uoff)) = self.layout.boundary {
            let last = off + (cells - 1) * dim;
            for i in 0..dim {
                state[last + i] = state[last + i] + u[uoff + i];
            }
        }
        lost
    }

    /// Output on the current cell, `C Avg state + D u`.
    fn output(&self, state: &[T], u: Option<&[T]>, out: &mut [T]) {
        out.iter_mut().for_each(|o| *o = T::zero());
        self.c_avg.matvec_acc(state, out);
        if let Some(u) = u {
            self.diag.matvec_acc(u, out);
        }
    }

    /// `B_t u`: the state reached at `t` from 0 under the input `u`.
    pub fn control_map(&self, t: T, u: &InputSignal<T>) -> Result<StateVector<T>> {
        let k = self.steps(t)?;
        self.check_signal(u, k)?;
        let mut state = vec![T::zero(); self.layout.state_dim];
        for j in 0..k {
            self.advance(&mut state, u.cell(j));
        }
        self.triple.base.state(state)
    }

    /// `j -> B_{jh} u` for `j = 0..=steps(t)`.
    pub fn control_orbit(&self, t: T, u: &InputSignal<T>) -> Result<OrbitSeries<T>> {
        let k = self.positive_steps(t)?;
        self.check_signal(u, k)?;
        let zero = self.triple.base.zero_state();
        let mut state = zero.coords().to_vec();
        let mut states = Vec::with_capacity(k + 1);
        states.push(zero.clone());
        for j in 0..k {
            self.advance(&mut state, u.cell(j));
            states.push(zero.with_coords(state.clone())?);
        }
        OrbitSeries::new(self.signal_grid(k)?, states)
    }

    /// `C_t x`: cell averages of `s -> C T(s) x` on `[0, t]`.
    pub fn observation_map(&self, t: T, x: &StateVector<T>) -> Result<InputSignal<T>> {
        let k = self.positive_steps(t)?;
        self.check_state(x)?;
        let m = self.layout.width;
        let mut state = x.coords().to_vec();
        let mut values = vec![T::zero(); k * m];
        for j in 0..k {
            self.output(&state, None, &mut values[j * m..(j + 1) * m]);
            self.stepper.step(&mut state);
        }
        self.signal(values)
    }

    /// `F_t u`, causal: the output on cell `j` only uses `u` on cells `0..=j`.
    pub fn io_map(&self, t: T, u: &InputSignal<T>) -> Result<InputSignal<T>> {
        let k = self.positive_steps(t)?;
        self.check_signal(u, k)?;
        let m = self.layout.width;
        let mut state = vec![T::zero(); self.layout.state_dim];
        let mut values = vec![T::zero(); k * m];
        for j in 0..k {
            self.output(&state, Some(u.cell(j)), &mut values[j * m..(j + 1) * m]);
            self.advance(&mut state, u.cell(j));
        }
        self.signal(values)
    }

    /// Discrete operator norm of `F_t` on `L1(0, t; U)`.
    ///
    /// `F_t` is causal and shift-invariant, so an impulse on the first cell has the longest
    /// response; its norm over the extreme points of the unit ball of `U` is the exact norm.
    /// For sup-norm blocks wider than 16 the sign vectors are replaced by unit vectors and
    /// the all-ones vector, which gives a lower bound.
    pub fn io_norm(&self, t: T) -> Result<T> {
        let k = self.positive_steps(t)?;
        let m = self.layout.width;
        let blocks: Vec<(usize, usize)> = match &self.layout.unorm {
            NormTag::Product(parts) => {
                let mut off = 0;
                parts
                    .iter()
                    .map(|(len, _)| {
                        off += len;
                        (off - len, *len)
                    })
                    .collect()
            }
            _ => vec![(0, m)],
        };
        let inv_h = T::one() / self.h;
        let mut best = T::zero();
        for (off, len) in blocks {
            for sigma in extreme_signs::<T>(len) {
                let mut values = vec![T::zero(); k * m];
                for (i, s) in sigma.iter().enumerate() {
                    values[off + i] = *s * inv_h;
                }
                let u = self.signal(values)?;
                best = best.max(self.io_map(t, &u)?.norm());
            }
        }
        Ok(best)
    }

    /// Solves `(I - F_t) w = v`.
    pub fn invert_io(&self, t: T, v: &InputSignal<T>, method: InversionMethod<T>) -> Result<InversionOutcome<T>> {
        let k = self.positive_steps(t)?;
        self.check_signal(v, k)?;
        let v = v.truncated(k)?;
        match method {
            InversionMethod::Direct => Ok(InversionOutcome {
                signal: self.forward_substitution(&v)?,
                term_norms: Vec::new(),
                io_norm: None,
            }),
            InversionMethod::Neumann { tol, max_terms } => {
                let norm = self.io_norm(t)?;
                if norm >= T::one() {
                    return Err(Error::ContractionViolation {
                        estimate: norm.as_f64(),
                    });
                }
                let mut term = v.clone();
                let mut sum = v.clone();
                let mut norms = vec![term.norm()];
                let mut n = 0;
                while *norms.last().unwrap_or(&T::zero()) > tol {
                    if n >= max_terms {
                        return Err(Error::NoConvergence {
                            terms: n,
                            last_term_norm: norms.last().map_or(0.0, |x| x.as_f64()),
                            term_norms: norms.iter().map(|x| x.as_f64()).collect(),
                        });
                    }
                    term = self.io_map(t, &term)?;
                    sum = sum.add(&term)?;
                    norms.push(term.norm());
                    n += 1;
                }
                Ok(InversionOutcome {
                    signal: sum,
                    term_norms: norms,
                    io_norm: Some(norm),
                })
            }
        }
    }

    fn forward_substitution(&self, v: &InputSignal<T>) -> Result<InputSignal<T>> {
        let m = self.layout.width;
        let mut state = vec![T::zero(); self.layout.state_dim];
        let mut w = vec![T::zero(); v.count() * m];
        let mut rhs = vec![T::zero(); m];
        for j in 0..v.count() {
            self.output(&state, None, &mut rhs);
            for (r, vi) in rhs.iter_mut().zip(v.cell(j)) {
                *r = *r + *vi;
            }
            let wj = self.diag_lu.solve(&rhs)?;
            self.advance(&mut state, &wj);
            w[j * m..(j + 1) * m].copy_from_slice(&wj);
        }
        v.with_values(w)
    }

    /// `T(t) x + B_t (I - F_t)^{-1} C_t x`.
    pub fn perturbed_apply(&self, t: T, x: &StateVector<T>, method: InversionMethod<T>) -> Result<StateVector<T>> {
        self.check_state(x)?;
        let free = self.triple.base.apply(t, x)?;
        if self.steps(t)? == 0 {
            return Ok(free);
        }
        let obs = self.observation_map(t, x)?;
        let w = self.invert_io(t, &obs, method)?.signal;
        let forced = self.control_map(t, &w)?;
        free.add(&forced)
    }

    /// `(I - F_t)^{-1} C_t x` on `[0, t]`.
    pub fn closed_loop_output(
        &self,
        t: T,
        x: &StateVector<T>,
        method: InversionMethod<T>,
    ) -> Result<InversionOutcome<T>> {
        let obs = self.observation_map(t, x)?;
        self.invert_io(t, &obs, method)
    }

    fn orbit_steps(&self, time_grid: &Grid<T>) -> Result<usize> {
        if time_grid.start() != T::zero() {
            return Err(Error::Domain("orbit time grid must start at 0".into()));
        }
        let r = steps_in(time_grid.step(), self.h)?;
        if r == 0 {
            return Err(Error::GridAlignment("orbit step below the realization step".into()));
        }
        Ok(r)
    }

    /// Perturbed orbit by stepwise feedback: on each cell the input is
    /// `w = (I - D)^{-1} C Avg state`, then the state is advanced.
    pub fn perturbed_orbit(&self, x: &StateVector<T>, time_grid: &Grid<T>) -> Result<OrbitSeries<T>> {
        self.check_state(x)?;
        let r = self.orbit_steps(time_grid)?;
        let m = self.layout.width;
        let mut state = x.coords().to_vec();
        let mut rhs = vec![T::zero(); m];
        let mut lost = T::zero();
        let mut states = Vec::with_capacity(time_grid.count() + 1);
        states.push(x.clone());
        for _ in 0..time_grid.count() {
            for _ in 0..r {
                self.output(&state, None, &mut rhs);
                let w = self.diag_lu.solve(&rhs)?;
                lost = lost + self.advance(&mut state, &w);
            }
            states.push(x.with_coords(state.clone())?);
        }
        let mut orbit = OrbitSeries::new(*time_grid, states)?;
        orbit.truncated_mass = lost;
        Ok(orbit)
    }

    /// Perturbed orbit from one inversion over the whole horizon: with
    /// `w = (I - F_T)^{-1} C_T x`, causality gives `T_BC(t) x = T(t) x + B_t w` for all `t <= T`.
    pub fn perturbed_orbit_formula(
        &self,
        x: &StateVector<T>,
        time_grid: &Grid<T>,
        method: InversionMethod<T>,
    ) -> Result<OrbitSeries<T>> {
        self.check_state(x)?;
        let r = self.orbit_steps(time_grid)?;
        let w = self.closed_loop_output(time_grid.end(), x, method)?.signal;
        let mut state = x.coords().to_vec();
        let mut lost = T::zero();
        let mut states = Vec::with_capacity(time_grid.count() + 1);
        states.push(x.clone());
        for i in 0..time_grid.count() {
            for j in 0..r {
                lost = lost + self.advance(&mut state, w.cell(i * r + j));
            }
            states.push(x.with_coords(state.clone())?);
        }
        let mut orbit = OrbitSeries::new(*time_grid, states)?;
        orbit.truncated_mass = lost;
        Ok(orbit)
    }
}

/// `Phi = int_0^h e^{sA} ds` and `Psi = (1/h) int_0^h (h - s) e^{sA} ds`, read off the
/// exponential of a block-triangular augmentation of `A`.
fn phi_psi<T: Scalar>(a: &Matrix<T>, h: T) -> Result<(Matrix<T>, Matrix<T>)> {
    let n = a.rows();
    let mut aug = Matrix::zeros(3 * n, 3 * n);
    aug.set_block(0, 0, a);
    aug.set_block(0, n, &Matrix::identity(n));
    aug.set_block(n, 2 * n, &Matrix::identity(n));
    let e = matexp(&aug, h)?;
    Ok((e.block(0, n, n, n), e.block(0, 2 * n, n, n).scale(T::one() / h)))
}

/// Sign vectors up to global sign, or a reduced set for wide blocks.
fn extreme_signs<T: Scalar>(len: usize) -> Vec<Vec<T>> {
    if len <= 16 {
        (0..1usize << (len - 1))
            .map(|bits| {
                (0..len)
                    .map(|i| {
                        if i > 0 && bits >> (i - 1) & 1 == 1 {
                            -T::one()
                        } else {
                            T::one()
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        let mut v: Vec<Vec<T>> = (0..len)
            .map(|i| (0..len).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        v.push(vec![T::one(); len]);
        v
    }
}
