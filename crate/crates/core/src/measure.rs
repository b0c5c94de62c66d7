//! Matrix-valued measures on an interval `[a, 0]`: finitely many atoms plus a
//! piecewise-constant density.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Grid, Matrix};
use crate::scalar::Scalar;

/// Relative distance, in grid steps, within which an atom snaps to a grid point.
const ATOM_SNAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom<T> {
    pub location: T,
    pub weight: Matrix<T>,
}

/// Constant density `value` on `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySegment<T> {
    pub start: T,
    pub end: T,
    pub value: Matrix<T>,
}

/// `mu = sum_i W_i delta_{a_i} + rho(s) ds` with `d x d` matrix weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSpec<T> {
    dim: usize,
    atoms: Vec<Atom<T>>,
    density: Vec<DensitySegment<T>>,
}

impl<T: Scalar> MeasureSpec<T> {
    /// The zero measure acting on `R^dim`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            atoms: Vec::new(),
            density: Vec::new(),
        }
    }

    /// A single atom `weight * delta_location`.
    pub fn atom(location: T, weight: Matrix<T>) -> Result<Self> {
        Self::zero(weight.rows()).with_atom(location, weight)
    }

    pub fn scalar_atom(location: T, weight: T) -> Result<Self> {
        Self::atom(location, Matrix::scalar(weight))
    }

    pub fn with_atom(mut self, location: T, weight: Matrix<T>) -> Result<Self> {
        self.check_weight(&weight)?;
        if !(location <= T::zero()) {
            return Err(Error::Domain(format!("atom location {location} must be <= 0")));
        }
        self.atoms.push(Atom { location, weight });
        Ok(self)
    }

    pub fn with_density(mut self, start: T, end: T, value: Matrix<T>) -> Result<Self> {
        self.check_weight(&value)?;
        if !(start < end) || end > T::zero() {
            return Err(Error::Domain(format!(
                "density segment [{start}, {end}) must be nonempty and lie in (-inf, 0]"
            )));
        }
        self.density.push(DensitySegment { start, end, value });
        Ok(self)
    }

    fn check_weight(&self, w: &Matrix<T>) -> Result<()> {
        if w.rows() != self.dim || w.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "measure weights must be {0}x{0}, got {1}x{2}",
                self.dim,
                w.rows(),
                w.cols()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn density(&self) -> &[DensitySegment<T>] {
        &self.density
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.weight.max_abs() == T::zero())
            && self.density.iter().all(|d| d.value.max_abs() == T::zero())
    }

    /// `c * mu`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location,
                    weight: a.weight.scale(c),
                })
                .collect(),
            density: self
                .density
                .iter()
                .map(|d| DensitySegment {
                    start: d.start,
                    end: d.end,
                    value: d.value.scale(c),
                })
                .collect(),
        }
    }

    /// `|mu|([a, 0])` with the max-norm operator norm on weights.
    pub fn total_variation(&self, a: T) -> T {
        let atoms: T = self
            .atoms
            .iter()
            .filter(|at| at.location >= a)
            .map(|at| at.weight.norm_inf())
            .sum();
        let dens: T = self
            .density
            .iter()
            .map(|d| {
                let lo = d.start.max(a);
                if d.end > lo {
                    (d.end - lo) * d.value.norm_inf()
                } else {
                    T::zero()
                }
            })
            .sum();
        atoms + dens
    }

    /// `|mu|` of the whole half-line.
    pub fn total(&self) -> T {
        self.total_variation(T::neg_infinity())
    }

    /// Leftmost point carrying mass, or 0 for the zero measure.
    pub fn support_start(&self) -> T {
        let a = self.atoms.iter().map(|a| a.location);
        let d = self.density.iter().map(|d| d.start);
        a.chain(d).fold(T::zero(), T::min)
    }

    /// Whether some atom with nonzero weight sits at 0.
    pub fn has_atom_at_zero(&self) -> bool {
        self.atoms
            .iter()
            .any(|a| a.location == T::zero() && a.weight.max_abs() > T::zero())
    }

    /// Grid index of an atom; atoms must sit on a grid point up to `ATOM_SNAP` steps.
    fn atom_index(&self, atom: &Atom<T>, grid: &Grid<T>) -> Result<usize> {
        let r = (atom.location - grid.start()) / grid.step();
        let k = r.round();
        if (r - k).abs() > T::lit(ATOM_SNAP) * (T::one() + r.abs()) {
            return Err(Error::GridAlignment(format!(
                "atom at {} is not on the grid of step {}",
                atom.location,
                grid.step()
            )));
        }
        if k < T::zero() || k > T::from_usize_lossy(grid.count()) {
            return Err(Error::Domain(format!(
                "atom at {} lies outside [{}, {}]",
                atom.location,
                grid.start(),
                grid.end()
            )));
        }
        Ok(k.to_usize().unwrap_or(0))
    }

    fn check_density_inside(&self, grid: &Grid<T>) -> Result<()> {
        let eps = T::lit(1e-9) * (T::one() + grid.len());
        for d in &self.density {
            if d.start < grid.start() - eps {
                return Err(Error::Domain(format!(
                    "density segment starting at {} leaves the grid at {}",
                    d.start,
                    grid.start()
                )));
            }
        }
        Ok(())
    }

    /// The functional `f -> int f dmu` on piecewise-constant cell functions over `grid`,
    /// as a `dim x (count * dim)` matrix. An atom at a grid point reads the cell that
    /// starts there; an atom at the right end has no cell and is rejected.
    pub fn as_functional(&self, grid: &Grid<T>) -> Result<Matrix<T>> {
        let d = self.dim;
        let n = grid.count();
        let mut m = Matrix::zeros(d, n * d);
        for atom in &self.atoms {
            let k = self.atom_index(atom, grid)?;
            if k == n {
                return Err(Error::Domain(format!(
                    "atom at {} sits on the right endpoint, which no cell reads",
                    atom.location
                )));
            }
            add_block(&mut m, k * d, &atom.weight, T::one());
        }
        self.check_density_inside(grid)?;
        for seg in &self.density {
            for j in 0..n {
                let (a, b) = (grid.point(j), grid.point(j) + grid.step());
                let lo = seg.start.max(a);
                let hi = seg.end.min(b);
                if hi > lo {
                    add_block(&mut m, j * d, &seg.value, hi - lo);
                }
            }
        }
        Ok(m)
    }

    /// The same functional on continuous piecewise-linear functions given by their values
    /// at the `count + 1` grid points: `dim x ((count + 1) * dim)`.
    pub fn as_point_functional(&self, grid: &Grid<T>) -> Result<Matrix<T>> {
        let d = self.dim;
        let n = grid.count();
        let h = grid.step();
        let mut m = Matrix::zeros(d, (n + 1) * d);
        for atom in &self.atoms {
            let k = self.atom_index(atom, grid)?;
            add_block(&mut m, k * d, &atom.weight, T::one());
        }
        self.check_density_inside(grid)?;
        let half = T::lit(0.5);
        for seg in &self.density {
            for j in 0..n {
                let sj = grid.point(j);
                let lo = seg.start.max(sj);
                let hi = seg.end.min(sj + h);
                if hi > lo {
                    // integrals of the two hat pieces over [lo, hi]
                    let (x0, x1) = ((lo - sj) / h, (hi - sj) / h);
                    let right = half * h * (x1 * x1 - x0 * x0);
                    let left = (hi - lo) - right;
                    add_block(&mut m, j * d, &seg.value, left);
                    add_block(&mut m, (j + 1) * d, &seg.value, right);
                }
            }
        }
        Ok(m)
    }
}

fn add_block<T: Scalar>(m: &mut Matrix<T>, col: usize, w: &Matrix<T>, c: T) {
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            m[(i, col + j)] = m[(i, col + j)] + c * w[(i, j)];
        }
    }
}
