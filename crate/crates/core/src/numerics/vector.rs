use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Norm applied inside one block of an `L1Grid` vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockNorm {
    /// max-norm of the block
    Max,
    /// Euclidean norm; a 2-block is the modulus of an embedded complex number
    Euclidean,
}

/// Which norm a [`StateVector`] carries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NormTag<T> {
    /// max-norm over all coordinates
    Sup,
    /// `step * sum_k |f_k|` over consecutive blocks of `block` coordinates, each block
    /// being the value of a piecewise-constant function on one grid cell
    L1Grid {
        step: T,
        block: usize,
        block_norm: BlockNorm,
    },
    /// Sum of the norms of consecutive segments of the given lengths.
    Product(Vec<(usize, NormTag<T>)>),
}

impl<T: Scalar> NormTag<T> {
    pub fn l1(step: T, block: usize) -> Self {
        NormTag::L1Grid {
            step,
            block,
            block_norm: BlockNorm::Max,
        }
    }

    /// Evaluates the norm of `coords` under this tag.
    pub fn eval(&self, coords: &[T]) -> T {
        match self {
            NormTag::Sup => coords.iter().fold(T::zero(), |m, c| m.max(c.abs())),
            NormTag::L1Grid {
                step,
                block,
                block_norm,
            } => {
                let b = (*block).max(1);
                let s: T = coords
                    .chunks(b)
                    .map(|chunk| match block_norm {
                        BlockNorm::Max => chunk.iter().fold(T::zero(), |m, c| m.max(c.abs())),
                        BlockNorm::Euclidean => chunk.iter().map(|c| *c * *c).sum::<T>().sqrt(),
                    })
                    .sum();
                *step * s
            }
            NormTag::Product(parts) => {
                let mut offset = 0;
                let mut total = T::zero();
                for (len, tag) in parts {
                    let end = (offset + len).min(coords.len());
                    total = total + tag.eval(&coords[offset..end]);
                    offset = end;
                }
                total
            }
        }
    }

    /// Total coordinate count implied by a `Product` tag.
    pub fn product_len(&self) -> Option<usize> {
        match self {
            NormTag::Product(parts) => Some(parts.iter().map(|p| p.0).sum()),
            _ => None,
        }
    }
}

/// A point of a discretized state space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector<T> {
    coords: Vec<T>,
    norm: NormTag<T>,
}

impl<T: Scalar> StateVector<T> {
    pub fn new(coords: Vec<T>, norm: NormTag<T>) -> Result<Self> {
        if let Some(n) = norm.product_len() {
            if n != coords.len() {
                return Err(Error::Dimension(format!(
                    "norm layout covers {n} coordinates, vector has {}",
                    coords.len()
                )));
            }
        }
        Ok(Self { coords, norm })
    }

    pub fn sup(coords: Vec<T>) -> Self {
        Self {
            coords,
            norm: NormTag::Sup,
        }
    }

    pub fn zeros(dim: usize, norm: NormTag<T>) -> Self {
        Self {
            coords: vec![T::zero(); dim],
            norm,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.dim(), self.norm.clone())
    }

    pub fn with_coords(&self, coords: Vec<T>) -> Result<Self> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        Ok(Self {
            coords,
            norm: self.norm.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [T] {
        &mut self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn norm_tag(&self) -> &NormTag<T> {
        &self.norm
    }

    pub fn norm(&self) -> T {
        self.norm.eval(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == T::zero())
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            coords: self.coords.iter().map(|c| *c * a).collect(),
            norm: self.norm.clone(),
        }
    }

    /// `self + a * other`
    pub fn axpy(&self, a: T, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| *x + a * *y)
                .collect(),
            norm: self.norm.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    /// Largest coordinate-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs())))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "vector lengths {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}
