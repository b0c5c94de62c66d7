use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Grid, StateVector};

/// Composite trapezoid rule for vector-valued samples on `grid`; exact for affine integrands.
pub fn quad<T: Scalar>(grid: &Grid<T>, samples: &[StateVector<T>]) -> Result<StateVector<T>> {
    if samples.len() != grid.count() + 1 {
        return Err(Error::Dimension(format!(
            "{} samples for a grid with {} points",
            samples.len(),
            grid.count() + 1
        )));
    }
    let mut acc = samples[0].zeros_like();
    for (w, s) in grid.trapezoid_weights().into_iter().zip(samples) {
        acc = acc.axpy(w, s)?;
    }
    Ok(acc)
}

/// Scalar convenience wrapper around [`quad`].
pub fn quad_scalar<T: Scalar>(grid: &Grid<T>, samples: &[T]) -> Result<T> {
    if samples.len() != grid.count() + 1 {
        return Err(Error::Dimension(format!(
            "{} samples for a grid with {} points",
            samples.len(),
            grid.count() + 1
        )));
    }
    Ok(grid
        .trapezoid_weights()
        .into_iter()
        .zip(samples)
        .map(|(w, s)| w * *s)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(g: &Grid<f64>, f: impl Fn(f64) -> f64) -> Vec<f64> {
        g.points().map(f).collect()
    }

    #[test]
    fn constant_and_affine_exact() {
        let g = Grid::covering(0.0, 2.0, 0.5).unwrap();
        assert_eq!(quad_scalar(&g, &sample(&g, |_| 1.0)).unwrap(), 2.0);
        let g = Grid::covering(0.0, 1.0, 0.25).unwrap();
        assert_eq!(quad_scalar(&g, &sample(&g, |s| s)).unwrap(), 0.5);
    }

    #[test]
    fn exponential_integral() {
        let g = Grid::covering(0.0, 1.0, 2f64.powi(-10)).unwrap();
        let v = quad_scalar(&g, &sample(&g, |s| (-s).exp())).unwrap();
        assert!((v - 0.632_120_558_828_557_7).abs() < 1e-6);
    }

    #[test]
    fn vector_samples_and_mismatch() {
        let g = Grid::covering(0.0, 1.0, 0.5).unwrap();
        let s: Vec<_> = g.points().map(|t| StateVector::sup(vec![1.0, t])).collect();
        let v = quad(&g, &s).unwrap();
        assert_eq!(v.coords(), &[1.0, 0.5]);
        assert!(quad(&g, &s[..2]).is_err());
    }

    #[test]
    fn second_order_convergence() {
        let f = |s: f64| (2.0 * s).sin() + s * s;
        let exact = (1.0 - 2.0_f64.cos()) / 2.0 + 1.0 / 3.0;
        let err = |h: f64| {
            let g = Grid::covering(0.0, 1.0, h).unwrap();
            (quad_scalar(&g, &sample(&g, f)).unwrap() - exact).abs()
        };
        let order = (err(1.0 / 32.0) / err(1.0 / 64.0)).log2();
        assert!(order >= 1.9, "order {order}");
    }
}
