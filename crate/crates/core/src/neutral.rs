//! Neutral delay equations
//!
//! ```text
//! z'(t) = A z(t) + P x_t,     x(t) = C z(t) + K x_t,     x_t(s) = x(t + s), s in [-1, 0]
//! ```
//!
//! with measure kernels `P`, `K` on `[-1, 0]`, realized as a boundary perturbation of
//! `diag(e^{tA}, S(t))` on `X x L1(-1, 0; X)` (`S` the nilpotent shift), and an independent
//! method-of-steps solver to compare against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{ControlSpec, InversionMethod, PerturbationTriple, Realization};
use crate::measure::MeasureSpec;
use crate::numerics::{matexp, steps_in, Grid, Lu, Matrix, NormTag, StateVector};
use crate::scalar::Scalar;
use crate::semigroups::{OrbitSeries, SemigroupSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeutralSystem<T> {
    pub a: Matrix<T>,
    pub p_kernel: MeasureSpec<T>,
    pub k_kernel: MeasureSpec<T>,
    pub c: Matrix<T>,
    /// cells of the history grid; the step is `1 / cells`
    pub cells: usize,
}

impl<T: Scalar> NeutralSystem<T> {
    pub fn new(
        a: Matrix<T>,
        p_kernel: MeasureSpec<T>,
        k_kernel: MeasureSpec<T>,
        c: Matrix<T>,
        cells: usize,
    ) -> Result<Self> {
        let sys = Self {
            a,
            p_kernel,
            k_kernel,
            c,
            cells,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// `P = p delta_{-1}`, `K = k delta_{-1}`.
    pub fn atom_delay(a: Matrix<T>, p: Matrix<T>, k: Matrix<T>, c: Matrix<T>, cells: usize) -> Result<Self> {
        let m1 = -T::one();
        Self::new(a, MeasureSpec::atom(m1, p)?, MeasureSpec::atom(m1, k)?, c, cells)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn step(&self) -> T {
        T::one() / T::from_usize_lossy(self.cells)
    }

    pub fn history_grid(&self) -> Grid<T> {
        Grid::new(-T::one(), self.step(), self.cells).expect("cells >= 1 checked at construction")
    }

    fn validate(&self) -> Result<()> {
        let n = self.a.rows();
        if !self.a.is_square() || n == 0 {
            return Err(Error::Dimension("A must be square and nonempty".into()));
        }
        if self.c.rows() != n || self.c.cols() != n {
            return Err(Error::Dimension(format!("C must be {n}x{n}")));
        }
        if self.cells == 0 {
            return Err(Error::Domain("history grid needs at least one cell".into()));
        }
        for (name, mu) in [("P", &self.p_kernel), ("K", &self.k_kernel)] {
            if mu.dim() != n {
                return Err(Error::Dimension(format!(
                    "kernel {name} acts on R^{}, need R^{n}",
                    mu.dim()
                )));
            }
            if mu.has_atom_at_zero() {
                return Err(Error::Domain(format!("kernel {name} has an atom at 0")));
            }
            if mu.support_start() < -T::one() {
                return Err(Error::Domain(format!("kernel {name} reaches beyond -1")));
            }
        }
        Ok(())
    }

    /// Norm of the state space `R^n x L1(-1, 0; R^n)`.
    pub fn state_norm(&self) -> NormTag<T> {
        let n = self.dim();
        NormTag::Product(vec![(n, NormTag::Sup), (n * self.cells, NormTag::l1(self.step(), n))])
    }

    /// `(y, f)` as a state vector, with `f` replaced by its cell averages.
    pub fn state(&self, y: &[T], f: &HistorySegment<T>) -> Result<StateVector<T>> {
        self.check_initial(y, f)?;
        let mut coords = y.to_vec();
        coords.extend(f.cell_averages());
        StateVector::new(coords, self.state_norm())
    }

    fn check_initial(&self, y: &[T], f: &HistorySegment<T>) -> Result<()> {
        let n = self.dim();
        if y.len() != n || f.dim != n || f.cells() != self.cells {
            return Err(Error::Dimension(format!(
                "initial data must be (R^{n}, {} history cells of R^{n})",
                self.cells
            )));
        }
        Ok(())
    }

    /// `||C y - (f(0) - K f)||` (max-norm).
    pub fn compatibility_residual(&self, y: &[T], f: &HistorySegment<T>) -> Result<T> {
        self.check_initial(y, f)?;
        let kf = self
            .k_kernel
            .as_point_functional(&self.history_grid())?
            .matvec(&f.values)?;
        let cy = self.c.matvec(y)?;
        let f0 = f.point(self.cells);
        Ok(cy
            .iter()
            .zip(&kf)
            .zip(f0)
            .fold(T::zero(), |m, ((a, b), c)| m.max((*a - (*c - *b)).abs())))
    }

    /// Sup of `||e^{tA}||` over a grid on `[0, horizon]`.
    pub fn growth_bound(&self, horizon: T, step: T) -> Result<T> {
        let e = matexp(&self.a, step)?;
        let mut p = Matrix::identity(self.dim());
        let mut best = T::one();
        for _ in 0..steps_in(horizon, step)? {
            p = e.mul(&p)?;
            best = best.max(p.norm_inf());
        }
        Ok(best)
    }
}

/// Point values of a history `f` on the `cells + 1` points of `[-1, 0]`, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistorySegment<T> {
    dim: usize,
    values: Vec<T>,
}

impl<T: Scalar> HistorySegment<T> {
    pub fn new(dim: usize, values: Vec<T>) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) || values.len() < 2 * dim {
            return Err(Error::Dimension(format!(
                "{} values do not form at least two points of R^{dim}",
                values.len()
            )));
        }
        Ok(Self { dim, values })
    }

    pub fn from_fn(grid: &Grid<T>, dim: usize, f: impl Fn(T) -> Vec<T>) -> Result<Self> {
        let mut values = Vec::with_capacity((grid.count() + 1) * dim);
        for s in grid.points() {
            let v = f(s);
            if v.len() != dim {
                return Err(Error::Dimension(format!(
                    "history function returned {} values",
                    v.len()
                )));
            }
            values.extend(v);
        }
        Self::new(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> usize {
        self.values.len() / self.dim - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn point(&self, j: usize) -> &[T] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    /// Trapezoid averages over the cells.
    pub fn cell_averages(&self) -> Vec<T> {
        let half = T::lit(0.5);
        let d = self.dim;
        (0..self.cells())
            .flat_map(|j| (0..d).map(move |i| (j, i)))
            .map(|(j, i)| half * (self.values[j * d + i] + self.values[(j + 1) * d + i]))
            .collect()
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            dim: self.dim,
            values: self.values.iter().map(|v| *v * a).collect(),
        }
    }
}

/// `diag(e^{tA}, S(t))`.
pub fn build_a0<T: Scalar>(sys: &NeutralSystem<T>) -> Result<SemigroupSpec<T>> {
    Ok(SemigroupSpec::BlockDiag(vec![
        SemigroupSpec::Matrix(sys.a.clone()),
        SemigroupSpec::NilpotentShift {
            grid: sys.history_grid(),
            dim: sys.dim(),
        },
    ]))
}

/// The triple `(diag(e^{tA}, S), neutral boundary control, [[0, P], [C, K]])`.
pub fn build_perturbation<T: Scalar>(sys: &NeutralSystem<T>) -> Result<PerturbationTriple<T>> {
    sys.validate()?;
    let n = sys.dim();
    let g = sys.history_grid();
    let hist = n * sys.cells;
    let mut obs = Matrix::zeros(2 * n, n + hist);
    obs.set_block(0, n, &sys.p_kernel.as_functional(&g)?);
    obs.set_block(n, 0, &sys.c);
    obs.set_block(n, n, &sys.k_kernel.as_functional(&g)?);
    PerturbationTriple::new(build_a0(sys)?, ControlSpec::NeutralBoundary, obs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeutralOrbit<T> {
    pub orbit: OrbitSeries<T>,
    /// `||C y - (f(0) - K f)||` of the initial data
    pub compatibility_residual: T,
    /// false when the initial data violate the domain condition (mild solution)
    pub compatible: bool,
    /// domain residual along the orbit, on point values reconstructed from the cells
    pub domain_residuals: Vec<T>,
}

/// Tolerance for the compatibility flag, relative to the size of the data.
pub const COMPATIBILITY_TOL: f64 = 1e-9;

fn compatibility_tol<T: Scalar>(y: &[T], f: &HistorySegment<T>) -> T {
    let scale = y.iter().chain(f.values()).fold(T::one(), |m, v| m.max(v.abs()));
    T::lit(COMPATIBILITY_TOL).max(T::lit(64.0) * T::epsilon()) * scale
}

/// Orbit of the perturbed semigroup from `(y, f)`.
pub fn neutral_orbit<T: Scalar>(
    sys: &NeutralSystem<T>,
    y: &[T],
    f: &HistorySegment<T>,
    time_grid: &Grid<T>,
) -> Result<NeutralOrbit<T>> {
    let triple = build_perturbation(sys)?;
    let r = Realization::new(&triple, sys.step())?;
    let x0 = sys.state(y, f)?;
    let residual = sys.compatibility_residual(y, f)?;
    let orbit = r.perturbed_orbit(&x0, time_grid)?;
    let domain_residuals = domain_residuals(sys, &orbit)?;
    Ok(NeutralOrbit {
        orbit,
        compatibility_residual: residual,
        compatible: residual <= compatibility_tol(y, f),
        domain_residuals,
    })
}

/// The same orbit through a single inversion of `I - F_T` over the whole horizon.
pub fn neutral_orbit_formula<T: Scalar>(
    sys: &NeutralSystem<T>,
    y: &[T],
    f: &HistorySegment<T>,
    time_grid: &Grid<T>,
    method: InversionMethod<T>,
) -> Result<OrbitSeries<T>> {
    let triple = build_perturbation(sys)?;
    let r = Realization::new(&triple, sys.step())?;
    r.perturbed_orbit_formula(&sys.state(y, f)?, time_grid, method)
}

fn domain_residuals<T: Scalar>(sys: &NeutralSystem<T>, orbit: &OrbitSeries<T>) -> Result<Vec<T>> {
    let n = sys.dim();
    let kf = sys.k_kernel.as_point_functional(&sys.history_grid())?;
    orbit
        .states
        .iter()
        .map(|s| {
            let c = s.coords();
            let cz = sys.c.matvec(&c[..n])?;
            let pts = points_from_cells(&c[n..], n);
            let k = kf.matvec(&pts)?;
            let x0 = &pts[sys.cells * n..];
            Ok((0..n).fold(T::zero(), |m, i| m.max((cz[i] - (x0[i] - k[i])).abs())))
        })
        .collect()
}

/// Second-order point values from cell averages: midpoints of neighbours inside, linear
/// extrapolation at both ends.
fn points_from_cells<T: Scalar>(cells: &[T], n: usize) -> Vec<T> {
    let nc = cells.len() / n;
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity((nc + 1) * n);
    for j in 0..=nc {
        for i in 0..n {
            let c = |k: usize| cells[k * n + i];
            let v = if nc == 1 {
                c(0)
            } else if j == 0 {
                c(0) - half * (c(1) - c(0))
            } else if j == nc {
                c(nc - 1) + half * (c(nc - 1) - c(nc - 2))
            } else {
                half * (c(j - 1) + c(j))
            };
            out.push(v);
        }
    }
    out
}

/// Method-of-steps solution: point values of `x` on the grid of step `1 / cells`, with
/// `z_{k+1} = E z_k + (h/2) (E g_k + g_{k+1})`, `E = e^{hA}`, `g = P x_t`, and
/// `x(t) = C z(t) + K x_t`. Kernel quadrature treats `x` as piecewise linear; the
/// contribution of the newest point is solved for, so densities may reach 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOfSteps<T> {
    /// `(z, cell averages of x_t)` at the points of the time grid
    pub orbit: OrbitSeries<T>,
    /// `x(k h)` for `k = 0 ..= K`
    pub points: Vec<Vec<T>>,
}

pub fn method_of_steps<T: Scalar>(
    sys: &NeutralSystem<T>,
    y: &[T],
    f: &HistorySegment<T>,
    time_grid: &Grid<T>,
) -> Result<MethodOfSteps<T>> {
    sys.validate()?;
    sys.check_initial(y, f)?;
    if time_grid.start() != T::zero() {
        return Err(Error::Domain("time grid must start at 0".into()));
    }
    let n = sys.dim();
    let nc = sys.cells;
    let h = sys.step();
    let g = sys.history_grid();
    let r = steps_in(time_grid.step(), h)?;
    let total = r * time_grid.count();
    let e = matexp(&sys.a, h)?;
    let pf = sys.p_kernel.as_point_functional(&g)?;
    let kf = sys.k_kernel.as_point_functional(&g)?;
    // split off the weight of the newest point s = 0
    let width = nc * n;
    let p_old = pf.block(0, 0, n, width);
    let k_old = kf.block(0, 0, n, width);
    let p_new = pf.block(0, width, n, n);
    let k_new = kf.block(0, width, n, n);
    let half_h = T::lit(0.5) * h;
    let lhs = Matrix::identity(n)
        .sub(&k_new)?
        .sub(&sys.c.mul(&p_new)?.scale(half_h))?;
    let lu: Lu<T> = lhs.lu()?;

    // point buffer: x(-1), ..., x(0), x(h), ...
    let mut xs: Vec<T> = f.values().to_vec();
    let x0 = {
        let mut kv = k_old.matvec(&xs[..width])?;
        let newest = k_new.matvec(f.point(nc))?;
        let cy = sys.c.matvec(y)?;
        kv.iter_mut()
            .zip(newest)
            .zip(cy)
            .for_each(|((a, b), c)| *a = *a + b + c);
        kv
    };
    xs[width..].copy_from_slice(&x0);
    let mut z = y.to_vec();
    let window = |k: usize| -> (usize, usize) { (k * n, (k + nc + 1) * n) };
    let gk = |xs: &[T], k: usize| -> Result<Vec<T>> {
        let (a, b) = window(k);
        pf.matvec(&xs[a..b])
    };
    let mut g_cur = gk(&xs, 0)?;
    let norm = sys.state_norm();
    let half = T::lit(0.5);
    let snapshot = |xs: &[T], z: &[T], k: usize| -> Result<StateVector<T>> {
        let (a, _) = window(k);
        let mut coords = z.to_vec();
        for j in 0..nc {
            for i in 0..n {
                coords.push(half * (xs[a + j * n + i] + xs[a + (j + 1) * n + i]));
            }
        }
        StateVector::new(coords, norm.clone())
    };
    let mut states = vec![snapshot(&xs, &z, 0)?];
    for k in 0..total {
        // known part of the next window: points k+1 ..= k+nc
        let known = &xs[(k + 1) * n..(k + 1 + nc) * n];
        let mut rhs_z = e.matvec(&z)?;
        let eg = e.matvec(&g_cur)?;
        let pk = p_old.matvec(known)?;
        for i in 0..n {
            rhs_z[i] = rhs_z[i] + half_h * (eg[i] + pk[i]);
        }
        let mut rhs_x = sys.c.matvec(&rhs_z)?;
        let kk = k_old.matvec(known)?;
        for i in 0..n {
            rhs_x[i] = rhs_x[i] + kk[i];
        }
        let x_new = lu.solve(&rhs_x)?;
        let pn = p_new.matvec(&x_new)?;
        for i in 0..n {
            z[i] = rhs_z[i] + half_h * pn[i];
        }
        xs.extend_from_slice(&x_new);
        g_cur = gk(&xs, k + 1)?;
        if (k + 1) % r == 0 {
            states.push(snapshot(&xs, &z, k + 1)?);
        }
    }
    let points = xs[width..].chunks(n).map(<[T]>::to_vec).collect();
    Ok(MethodOfSteps {
        orbit: OrbitSeries::new(*time_grid, states)?,
        points,
    })
}

/// The conjugated system for `S_a (x, f) = (x, a f)`: `P -> P / a`, `C -> a C`.
pub fn scaling_conjugation<T: Scalar>(sys: &NeutralSystem<T>, alpha: T) -> Result<NeutralSystem<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::Domain(format!("scaling factor must be positive, got {alpha}")));
    }
    NeutralSystem::new(
        sys.a.clone(),
        sys.p_kernel.scaled(T::one() / alpha),
        sys.k_kernel.clone(),
        sys.c.scale(alpha),
        sys.cells,
    )
}

/// `S_a^{-1}` applied to every state of an orbit of the conjugated system.
pub fn unscale_orbit<T: Scalar>(sys: &NeutralSystem<T>, orbit: &OrbitSeries<T>, alpha: T) -> Result<OrbitSeries<T>> {
    let n = sys.dim();
    let states = orbit
        .states
        .iter()
        .map(|s| {
            let mut c = s.coords().to_vec();
            c[n..].iter_mut().for_each(|v| *v = *v / alpha);
            s.with_coords(c)
        })
        .collect::<Result<Vec<_>>>()?;
    OrbitSeries::new(orbit.grid, states)
}

/// Per-probe check of `||C_H (y, f)||_1 <= (|P| + |K|) ||f||_1 + H ||C|| M ||y||`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationBound<T> {
    pub observed: T,
    pub bound: T,
    pub margin: T,
}

pub fn observation_bound<T: Scalar>(
    sys: &NeutralSystem<T>,
    y: &[T],
    f: &HistorySegment<T>,
    horizon: T,
) -> Result<ObservationBound<T>> {
    let triple = build_perturbation(sys)?;
    let r = Realization::new(&triple, sys.step())?;
    let x = sys.state(y, f)?;
    let observed = r.observation_map(horizon, &x)?.norm();
    let f_norm = NormTag::l1(sys.step(), sys.dim()).eval(&x.coords()[sys.dim()..]);
    let y_norm = NormTag::Sup.eval(y);
    let m = sys.growth_bound(horizon, sys.step())?;
    let bound = (sys.p_kernel.total() + sys.k_kernel.total()) * f_norm + horizon * sys.c.norm_inf() * m * y_norm;
    Ok(ObservationBound {
        observed,
        bound,
        margin: bound - observed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalar(a: f64, p: f64, k: f64, c: f64, cells: usize) -> NeutralSystem<f64> {
        NeutralSystem::atom_delay(
            Matrix::scalar(a),
            Matrix::scalar(p),
            Matrix::scalar(k),
            Matrix::scalar(c),
            cells,
        )
        .unwrap()
    }

    /// Compatible history: f(s) = g(s) on [-1, 0) with f(0) = C y + K f.
    fn compatible(sys: &NeutralSystem<f64>, y: f64, g: impl Fn(f64) -> f64) -> HistorySegment<f64> {
        let grid = sys.history_grid();
        let mut f = HistorySegment::from_fn(&grid, 1, |s| vec![g(s)]).unwrap();
        let kf = sys
            .k_kernel
            .as_point_functional(&grid)
            .unwrap()
            .matvec(f.values())
            .unwrap()[0];
        let last = f.values.len() - 1;
        f.values[last] = sys.c[(0, 0)] * y + kf;
        f
    }

    #[test]
    fn a0_structure() {
        let sys = scalar(-1.0, 0.0, 0.0, 0.0, 8);
        let a0 = build_a0(&sys).unwrap();
        let x = sys
            .state(&[1.0], &HistorySegment::new(1, vec![1.0; 9]).unwrap())
            .unwrap();
        assert_eq!(a0.apply(0.0, &x).unwrap(), x);
        let y = a0.apply(1.0, &x).unwrap();
        assert!(y.coords()[1..].iter().all(|c| *c == 0.0));
        assert_abs_diff_eq!(y.coords()[0], (-1.0_f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn zero_kernels_give_the_unperturbed_semigroup() {
        let sys = scalar(-1.0, 0.0, 0.0, 0.0, 16);
        let f = HistorySegment::from_fn(&sys.history_grid(), 1, |s| vec![s.sin()]).unwrap();
        let g = Grid::covering(0.0, 2.0, 1.0 / 16.0).unwrap();
        let pert = neutral_orbit(&sys, &[1.0], &f, &g).unwrap().orbit;
        let base = build_a0(&sys)
            .unwrap()
            .orbit(&sys.state(&[1.0], &f).unwrap(), &g)
            .unwrap();
        assert!(pert.max_deviation(&base).unwrap() <= 1e-15);
    }

    #[test]
    fn observation_reads_left_end() {
        let sys = scalar(-1.0, 0.3, 0.0, 0.0, 4);
        let t = build_perturbation(&sys).unwrap();
        let f = HistorySegment::new(1, vec![2.0, 5.0, 5.0, 5.0, 5.0]).unwrap();
        let x = sys.state(&[0.0], &f).unwrap();
        let out = t.observation.matvec(x.coords()).unwrap();
        // first cell averages f(-1) = 2 and f(-3/4) = 5
        assert_abs_diff_eq!(out[0], 0.3 * 3.5, epsilon = 1e-15);
    }

    #[test]
    fn boundary_input_enters_history() {
        let sys = scalar(-1.0, 0.2, 0.1, 0.5, 8);
        let t = build_perturbation(&sys).unwrap();
        let r = Realization::new(&t, 0.125).unwrap();
        let vals: Vec<f64> = (0..4).flat_map(|k| [0.0, 1.0 + k as f64]).collect();
        let x = r.control_map(0.5, &r.signal(vals).unwrap()).unwrap();
        // after 4 steps the last four cells hold u2 on [0, 0.5] in order
        assert_eq!(&x.coords()[5..], &[1.0, 2.0, 3.0, 4.0]);
        assert!(x.coords()[1..5].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn rejects_mass_at_zero_and_bad_alpha() {
        let zero_atom = MeasureSpec::scalar_atom(0.0, 0.1).unwrap();
        let ok = MeasureSpec::scalar_atom(-1.0, 0.1).unwrap();
        assert!(NeutralSystem::new(Matrix::scalar(-1.0), ok.clone(), zero_atom, Matrix::scalar(1.0), 4).is_err());
        let sys = scalar(-1.0, 0.2, 0.2, 1.0, 4);
        assert!(scaling_conjugation(&sys, 0.0).is_err());
        assert!(scaling_conjugation(&sys, -1.0).is_err());
        assert_eq!(scaling_conjugation(&sys, 1.0).unwrap(), sys);
    }

    #[test]
    fn zero_data_zero_orbit() {
        let sys = scalar(-1.0, 0.3, 0.3, 0.2, 16);
        let f = HistorySegment::new(1, vec![0.0; 17]).unwrap();
        let g = Grid::covering(0.0, 3.0, 1.0 / 16.0).unwrap();
        let o = neutral_orbit(&sys, &[0.0], &f, &g).unwrap();
        assert!(o.orbit.norms.iter().all(|n| *n == 0.0));
        assert!(o.compatible);
    }

    #[test]
    fn decoupled_oracle_is_the_exponential() {
        let sys = scalar(-1.0, 0.0, 0.0, 1.0, 32);
        let f = compatible(&sys, 1.0, |_| 0.0);
        let g = Grid::covering(0.0, 3.0, 1.0 / 32.0).unwrap();
        let m = method_of_steps(&sys, &[1.0], &f, &g).unwrap();
        for (k, s) in m.orbit.states.iter().enumerate() {
            assert_abs_diff_eq!(s.coords()[0], (-(k as f64) / 32.0).exp(), epsilon = 1e-14);
        }
        // x = C z after the history has passed
        assert_abs_diff_eq!(m.points[96][0], (-3.0_f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn oracle_on_the_first_interval() {
        // A = -1, k = 0.5, p = 0, f = 1, C = 1: x(t) = y e^{-t} + 0.5 on [0, 1)
        let sys = scalar(-1.0, 0.0, 0.5, 1.0, 64);
        let y = 0.5;
        let f = compatible(&sys, y, |_| 1.0);
        assert_eq!(f.values()[64], 1.0);
        let g = Grid::covering(0.0, 1.0, 1.0 / 64.0).unwrap();
        let m = method_of_steps(&sys, &[y], &f, &g).unwrap();
        for k in 0..64 {
            let t = k as f64 / 64.0;
            assert_abs_diff_eq!(m.points[k][0], y * (-t).exp() + 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn formula_orbit_matches_oracle() {
        let sys = scalar(-1.0, 0.3, 0.3, 0.2, 64);
        let y = 1.0;
        let f = compatible(&sys, y, |s| (2.0 * s).cos());
        let g = Grid::covering(0.0, 5.0, 1.0 / 64.0).unwrap();
        let a = neutral_orbit(&sys, &[y], &f, &g).unwrap();
        let b = method_of_steps(&sys, &[y], &f, &g).unwrap();
        assert!(a.compatible);
        let dev = a.orbit.max_deviation(&b.orbit).unwrap();
        assert!(dev <= 1e-2, "{dev}");
        let c = neutral_orbit_formula(&sys, &[y], &f, &g, InversionMethod::neumann_default()).unwrap();
        assert!(a.orbit.max_deviation(&c).unwrap() <= 1e-10);
    }

    #[test]
    fn density_kernels_reaching_zero() {
        let k = MeasureSpec::zero(1)
            .with_density(-0.5, 0.0, Matrix::scalar(0.4))
            .unwrap();
        let p = MeasureSpec::zero(1)
            .with_density(-1.0, -0.25, Matrix::scalar(-0.3))
            .unwrap();
        let sys = NeutralSystem::new(Matrix::scalar(-0.5), p, k, Matrix::scalar(0.5), 64).unwrap();
        let f = compatible(&sys, 0.7, |s| 1.0 + s);
        let g = Grid::covering(0.0, 4.0, 1.0 / 64.0).unwrap();
        let a = neutral_orbit(&sys, &[0.7], &f, &g).unwrap();
        let b = method_of_steps(&sys, &[0.7], &f, &g).unwrap();
        assert!(a.orbit.max_deviation(&b.orbit).unwrap() <= 1e-2);
    }

    #[test]
    fn domain_condition_is_preserved() {
        for cells in [32, 64, 128] {
            let sys = scalar(-1.0, 0.125, 0.25, 1.0, cells);
            let f = HistorySegment::from_fn(&sys.history_grid(), 1, |s| vec![(2.0 * s).cos()]).unwrap();
            let y = 1.0 - 0.25 * (-2.0_f64).cos();
            let g = Grid::covering(0.0, 10.0, 1.0 / 32.0).unwrap();
            let o = neutral_orbit(&sys, &[y], &f, &g).unwrap();
            assert!(o.compatible);
            let r = &o.domain_residuals;
            let worst = r.iter().copied().fold(0.0, f64::max);
            assert!(worst <= 10.0 * r[0], "{cells}: {worst} vs {}", r[0]);
        }
    }

    #[test]
    fn incompatible_data_are_flagged() {
        let sys = scalar(-1.0, 0.3, 0.3, 0.2, 16);
        let f = HistorySegment::new(1, vec![1.0; 17]).unwrap();
        let g = Grid::covering(0.0, 1.0, 1.0 / 16.0).unwrap();
        let o = neutral_orbit(&sys, &[10.0], &f, &g).unwrap();
        assert!(!o.compatible);
        assert_abs_diff_eq!(o.compatibility_residual, 1.3, epsilon = 1e-12);
    }

    #[test]
    fn conjugation_identity() {
        let sys = scalar(-1.0, 0.125, 0.25, 1.0, 32);
        let alpha = 0.5;
        let tilde = scaling_conjugation(&sys, alpha).unwrap();
        let f = compatible(&sys, 1.0, |s| 1.0 - s * s);
        let g = Grid::covering(0.0, 5.0, 1.0 / 32.0).unwrap();
        let direct = neutral_orbit(&sys, &[1.0], &f, &g).unwrap().orbit;
        let conj = neutral_orbit(&tilde, &[1.0], &f.scaled(alpha), &g).unwrap().orbit;
        let back = unscale_orbit(&sys, &conj, alpha).unwrap();
        assert!(direct.max_deviation(&back).unwrap() <= 1e-8);
    }

    #[test]
    fn observation_bound_holds() {
        let sys = scalar(-1.0, 0.3, 0.3, 0.2, 32);
        let f = compatible(&sys, 1.0, |s| (3.0 * s).sin());
        let b = observation_bound(&sys, &[1.0], &f, 5.0).unwrap();
        assert!(b.margin >= 0.0, "{b:?}");
    }
}
