//! Dirichlet boundary perturbation of the left translation on `L1(R_-)`, truncated to
//! `[-L, 0]`, with the control, observation and input-output maps in closed form.
//!
//! Complex-valued functions are stored as interleaved `(re, im)` pairs with the modulus
//! as pointwise norm.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{ControlSpec, InputSignal, PerturbationTriple};
use crate::measure::MeasureSpec;
use crate::numerics::{BlockNorm, Grid, NormTag, StateVector};
use crate::scalar::Scalar;
use crate::semigroups::SemigroupSpec;

/// The Dirichlet operator `c -> c e^{lambda .}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletSpec<T> {
    lambda: Complex<T>,
}

impl<T: Scalar> DirichletSpec<T> {
    pub fn new(lambda: Complex<T>) -> Result<Self> {
        if !(lambda.re > T::zero()) {
            return Err(Error::Domain(format!(
                "Dirichlet operator needs Re lambda > 0, got {}",
                lambda.re
            )));
        }
        Ok(Self { lambda })
    }

    pub fn real(lambda: T) -> Result<Self> {
        Self::new(Complex::new(lambda, T::zero()))
    }

    pub fn lambda(&self) -> Complex<T> {
        self.lambda
    }
}

/// `L1` norm tag for complex cell values.
pub fn complex_l1<T: Scalar>(step: T) -> NormTag<T> {
    NormTag::L1Grid {
        step,
        block: 2,
        block_norm: BlockNorm::Euclidean,
    }
}

fn interleave<T: Scalar>(z: impl Iterator<Item = Complex<T>>) -> Vec<T> {
    z.flat_map(|c| [c.re, c.im]).collect()
}

/// `c e^{lambda s}` at one point.
pub fn dirichlet_eval<T: Scalar>(spec: &DirichletSpec<T>, c: Complex<T>, s: T) -> Complex<T> {
    c * (spec.lambda * s).exp()
}

/// Cell averages of `s -> c e^{lambda s}` over the cells of `grid` (a grid on `[-L, 0]`).
pub fn dirichlet_apply<T: Scalar>(spec: &DirichletSpec<T>, c: Complex<T>, grid: &Grid<T>) -> Result<StateVector<T>> {
    if grid.end().abs() > T::lit(1e-9) * (T::one() + grid.len()) {
        return Err(Error::Domain("Dirichlet profiles live on grids ending at 0".into()));
    }
    let lam = spec.lambda;
    let h = grid.step();
    let cells = (0..grid.count()).map(|j| {
        let (a, b) = (grid.point(j), grid.point(j) + h);
        c * ((lam * b).exp() - (lam * a).exp()) / (lam * h)
    });
    StateVector::new(interleave(cells), complex_l1(h))
}

/// A real signal on `[0, T]` given by its values at the grid points and interpolated
/// linearly in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSignal<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Scalar> SampledSignal<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if grid.start() != T::zero() {
            return Err(Error::Domain("sampled signals start at 0".into()));
        }
        if values.len() != grid.count() + 1 {
            return Err(Error::Dimension(format!(
                "{} samples for {} grid points",
                values.len(),
                grid.count() + 1
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Linear interpolation; constant continuation outside `[0, T]`.
    pub fn eval(&self, r: T) -> T {
        let h = self.grid.step();
        let x = (r / h).max(T::zero());
        let k = x.floor().to_usize().unwrap_or(usize::MAX).min(self.grid.count());
        if k >= self.grid.count() {
            return self.values[self.grid.count()];
        }
        let w = x - T::from_usize_lossy(k);
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }

    /// Slope on the piece containing `r`.
    fn slope(&self, r: T) -> T {
        let h = self.grid.step();
        let k = (r / h)
            .floor()
            .max(T::zero())
            .to_usize()
            .unwrap_or(0)
            .min(self.grid.count() - 1);
        (self.values[k + 1] - self.values[k]) / h
    }

    /// `int_0^r u`, exact for the interpolant.
    fn primitive(&self, r: T) -> T {
        let h = self.grid.step();
        let r = r.max(T::zero()).min(self.grid.end());
        let k = (r / h).floor().to_usize().unwrap_or(0).min(self.grid.count());
        let mut acc = T::zero();
        let half = T::lit(0.5);
        for j in 0..k {
            acc = acc + half * h * (self.values[j] + self.values[j + 1]);
        }
        if k < self.grid.count() {
            let rem = r - T::from_usize_lossy(k) * h;
            acc = acc + rem * (self.values[k] + half * (self.eval(r) - self.values[k]));
        }
        acc
    }

    /// Trapezoid `L1` norm.
    pub fn l1_norm(&self) -> T {
        let h = self.grid.step();
        let half = T::lit(0.5);
        self.values
            .windows(2)
            .map(|p| half * h * (p[0].abs() + p[1].abs()))
            .sum()
    }

    /// Cell averages as an input signal.
    pub fn to_cells(&self) -> Result<InputSignal<T>> {
        let half = T::lit(0.5);
        let cells = self.values.windows(2).map(|p| half * (p[0] + p[1])).collect();
        InputSignal::scalar(self.grid, cells)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormControl<T> {
    /// cell averages of `B_{t0} u`, complex interleaved
    pub state: StateVector<T>,
    /// set when `u(0) != 0`, in which case the profile carries an exponential tail
    pub warning: Option<String>,
}

/// `(B_{t0} u)(s) = e^{lambda min(0, s + t0)} u(max(0, s + t0))` at one point.
pub fn boundary_control_eval<T: Scalar>(spec: &DirichletSpec<T>, t0: T, u: &SampledSignal<T>, s: T) -> Complex<T> {
    let r = s + t0;
    if r >= T::zero() {
        Complex::new(u.eval(r), T::zero())
    } else {
        (spec.lambda * r).exp() * u.eval(T::zero())
    }
}

fn check_horizon<T: Scalar>(t0: T, u: &SampledSignal<T>) -> Result<()> {
    if !(t0 > T::zero()) {
        return Err(Error::Domain(format!("control time must be positive, got {t0}")));
    }
    if t0 > u.grid().end() * (T::one() + T::lit(1e-12)) {
        return Err(Error::Domain(format!(
            "signal ends at {} before t0 = {t0}",
            u.grid().end()
        )));
    }
    Ok(())
}

/// Cell averages of the closed-form control map over `grid` (on `[-L, 0]`).
pub fn boundary_control_closed_form<T: Scalar>(
    spec: &DirichletSpec<T>,
    t0: T,
    u: &SampledSignal<T>,
    grid: &Grid<T>,
) -> Result<ClosedFormControl<T>> {
    check_horizon(t0, u)?;
    let u0 = u.values()[0];
    let warning = (u0 != T::zero()).then(|| format!("u(0) = {u0} is nonzero; the profile has an exponential tail"));
    let h = grid.step();
    let lam = spec.lambda;
    let cells = (0..grid.count()).map(|j| {
        let (a, b) = (grid.point(j), grid.point(j) + h);
        let split = (-t0).max(a).min(b);
        // s + t0 >= 0 on [split, b]
        let body = u.primitive(b + t0) - u.primitive(split + t0);
        // exponential tail on [a, split]
        let tail = if split > a {
            ((lam * (split + t0)).exp() - (lam * (a + t0)).exp()) / lam * u0
        } else {
            Complex::new(T::zero(), T::zero())
        };
        (tail + Complex::new(body, T::zero())) / h
    });
    Ok(ClosedFormControl {
        state: StateVector::new(interleave(cells), complex_l1(h))?,
        warning,
    })
}

/// The same map through
/// `e^{lambda s} u(t0) - int_{max(0, s+t0)}^{t0} e^{lambda (s + t0 - r)} (u'(r) - lambda u(r)) dr`,
/// evaluated at cell midpoints by the trapezoid rule with `sub` nodes per signal step.
pub fn boundary_control_quadrature<T: Scalar>(
    spec: &DirichletSpec<T>,
    t0: T,
    u: &SampledSignal<T>,
    grid: &Grid<T>,
    sub: usize,
) -> Result<StateVector<T>> {
    check_horizon(t0, u)?;
    let lam = spec.lambda;
    let h = grid.step();
    let du = u.grid().step() / T::from_usize_lossy(sub.max(1));
    let half = T::lit(0.5);
    let cells = (0..grid.count()).map(|j| {
        let s = grid.point(j) + half * h;
        let lo = (s + t0).max(T::zero());
        // split at signal nodes so the slope is constant on each piece
        let mut acc = Complex::new(T::zero(), T::zero());
        let us = u.grid().step();
        let first = (lo / us).floor().to_usize().unwrap_or(0);
        let last = (t0 / us).ceil().to_usize().unwrap_or(0);
        for piece in first..last {
            let a = lo.max(T::from_usize_lossy(piece) * us);
            let b = t0.min(T::from_usize_lossy(piece + 1) * us);
            if b <= a {
                continue;
            }
            let n = ((b - a) / du).ceil().to_usize().unwrap_or(1).max(1);
            let step = (b - a) / T::from_usize_lossy(n);
            let slope = u.slope(a + half * (b - a));
            let f = |r: T| (lam * (s + t0 - r)).exp() * (Complex::new(slope, T::zero()) - lam * u.eval(r));
            for i in 0..n {
                let x0 = a + T::from_usize_lossy(i) * step;
                acc = acc + (f(x0) + f(x0 + step)) * (half * step);
            }
        }
        (lam * s).exp() * u.eval(t0) - acc
    });
    StateVector::new(interleave(cells), complex_l1(h))
}

/// `int f dmu` for a real cell function `f` on `grid`.
pub fn measure_observation<T: Scalar>(mu: &MeasureSpec<T>, f: &StateVector<T>, grid: &Grid<T>) -> Result<Vec<T>> {
    mu.as_functional(grid)?.matvec(f.coords())
}

/// `int f dmu` for `f` given by its values at the grid points, linear in between.
pub fn measure_observation_points<T: Scalar>(mu: &MeasureSpec<T>, values: &[T], grid: &Grid<T>) -> Result<Vec<T>> {
    mu.as_point_functional(grid)?.matvec(values)
}

/// `(F_inf u)(t) = int_{-t}^0 u(t + s) dmu(s)` for a cell signal `u`. Atoms act as exact
/// delays; the density part is evaluated at cell midpoints.
pub fn io_infty_closed_form<T: Scalar>(mu: &MeasureSpec<T>, u: &InputSignal<T>) -> Result<InputSignal<T>> {
    let d = mu.dim();
    if u.width() != d {
        return Err(Error::Dimension(format!(
            "signal width {} for a measure on R^{d}",
            u.width()
        )));
    }
    let h = u.step();
    let n = u.count();
    let mut out = vec![T::zero(); n * d];
    for atom in mu.atoms() {
        let lag = -atom.location / h;
        let l = lag.round();
        if (lag - l).abs() > T::lit(1e-9) * (T::one() + lag.abs()) {
            return Err(Error::GridAlignment(format!(
                "atom at {} is not on the signal grid",
                atom.location
            )));
        }
        let l = l.to_usize().unwrap_or(usize::MAX);
        for k in l..n {
            let y = atom.weight.matvec(u.cell(k - l))?;
            for i in 0..d {
                out[k * d + i] = out[k * d + i] + y[i];
            }
        }
    }
    let half = T::lit(0.5);
    for seg in mu.density() {
        for k in 0..n {
            let t = (T::from_usize_lossy(k) + half) * h;
            let lo = seg.start.max(-t);
            if seg.end <= lo {
                continue;
            }
            // r = t + s runs over [t + lo, t + end]; u is constant on cells
            let (r0, r1) = (t + lo, t + seg.end);
            let mut acc = vec![T::zero(); d];
            let first = (r0 / h).floor().to_usize().unwrap_or(0);
            let last = ((r1 / h).ceil().to_usize().unwrap_or(0)).min(n);
            for c in first..last {
                let a = r0.max(T::from_usize_lossy(c) * h);
                let b = r1.min(T::from_usize_lossy(c + 1) * h);
                if b > a {
                    for (i, v) in u.cell(c).iter().enumerate() {
                        acc[i] = acc[i] + (b - a) * *v;
                    }
                }
            }
            let y = seg.value.matvec(&acc)?;
            for i in 0..d {
                out[k * d + i] = out[k * d + i] + y[i];
            }
        }
    }
    u.with_values(out)
}

/// The triple (left translation on `[-length, 0]`, Dirichlet control, `C = mu`).
pub fn translation_triple<T: Scalar>(
    mu: &MeasureSpec<T>,
    lambda: Complex<T>,
    length: T,
    step: T,
) -> Result<PerturbationTriple<T>> {
    DirichletSpec::new(lambda)?;
    let base = SemigroupSpec::LeftTranslation {
        grid: Grid::covering(-length, T::zero(), step)?,
        dim: mu.dim(),
    };
    let grid = match &base {
        SemigroupSpec::LeftTranslation { grid, .. } => *grid,
        _ => unreachable!(),
    };
    if length < T::one() {
        return Err(Error::Domain(format!("truncation length {length} below 1")));
    }
    let c = mu.as_functional(&grid)?;
    PerturbationTriple::new(
        base,
        ControlSpec::BoundaryDirichlet {
            lambda_re: lambda.re,
            lambda_im: lambda.im,
        },
        c,
    )
}
