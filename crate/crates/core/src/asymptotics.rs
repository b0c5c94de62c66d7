//! Checkers for asymptotic orbit properties, decided from tail statistics on a finite
//! horizon.
//!
//! Every statistic is measured on a terminal window of the orbit and compared with a
//! reference taken from the whole orbit (its supremum, or its maximum before the window).
//! Removing an initial piece of the orbit can only shrink such references, so a PASS for a
//! translated orbit implies a PASS for the full one. Multiplying an orbit by `c > 0`
//! leaves every verdict unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{PerturbationTriple, Realization};
use crate::numerics::{fit_line, Grid, Matrix, NormTag, StateVector};
use crate::scalar::Scalar;
use crate::semigroups::{OrbitSeries, SemigroupSpec};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Property {
    Bounded,
    StronglyStable,
    WeaklyStable,
    MeanErgodic,
    UniformlyErgodic,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Bounded,
        Property::StronglyStable,
        Property::WeaklyStable,
        Property::MeanErgodic,
        Property::UniformlyErgodic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Bounded => "BOUNDED",
            Property::StronglyStable => "STRONGLY_STABLE",
            Property::WeaklyStable => "WEAKLY_STABLE",
            Property::MeanErgodic => "MEAN_ERGODIC",
            Property::UniformlyErgodic => "UNIFORMLY_ERGODIC",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(s))
    }
}

/// Length of the terminal window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tail<T> {
    /// this fraction of the orbit's time span
    Fraction(T),
    /// this absolute duration
    Duration(T),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckerConfig<T> {
    pub tail: Tail<T>,
    /// relative half-width of the band around each threshold in which the verdict is INCONCLUSIVE
    pub band: T,
    /// bound on (max over the tail) / (max before the tail)
    pub bound_hint: T,
    /// largest admissible fitted slope of `log ||x(t)||` on the tail
    pub slope_tol: T,
    /// strong stability: tail mean norm relative to the orbit supremum
    pub strong_tol: T,
    /// weak stability: tail mean pairing relative to `sup ||x|| * ||phi||_*`
    pub weak_tol: T,
    /// mean and uniform ergodicity: difference of window means relative to the supremum
    pub ergodic_tol: T,
    /// shift range for uniform ergodicity
    pub window: T,
    /// number of sub-windows for the monotonicity test of strong stability
    pub sub_windows: usize,
}

impl<T: Scalar> Default for CheckerConfig<T> {
    fn default() -> Self {
        Self {
            tail: Tail::Fraction(T::lit(0.5)),
            band: T::lit(0.05),
            bound_hint: T::lit(10.0),
            slope_tol: T::lit(1e-3),
            strong_tol: T::lit(1e-3),
            weak_tol: T::lit(1e-3),
            ergodic_tol: T::lit(0.05),
            window: T::lit(2.0) * T::PI(),
            sub_windows: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<T> {
    /// `sup ||x(t)||` over the orbit
    pub attained_sup: T,
    pub tail_start: T,
    /// the decision statistic and its threshold
    pub statistic: T,
    pub threshold: T,
    /// fitted slope of `log ||x(t)||` on the tail
    pub fitted_rate: Option<T>,
    /// mean over the terminal window
    pub limit_estimate: Option<Vec<T>>,
    /// `||M(t_k) - M(T)||` for the running Cesaro means `M`
    pub cesaro_residual: Option<Vec<T>>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticVerdict<T> {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Witness<T>,
}

/// PASS below the band, FAIL above it, INCONCLUSIVE inside.
fn decide<T: Scalar>(stat: T, threshold: T, band: T) -> Verdict {
    if !stat.is_finite() {
        Verdict::Fail
    } else if stat <= threshold * (T::one() - band) {
        Verdict::Pass
    } else if stat > threshold * (T::one() + band) {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

/// Combined verdict: FAIL dominates INCONCLUSIVE, which dominates PASS.
fn both(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    }
}

fn check_orbit<T: Scalar>(orbit: &OrbitSeries<T>) -> Result<()> {
    if orbit.states.len() < 2 {
        return Err(Error::Domain("orbit needs at least two samples".into()));
    }
    Ok(())
}

/// Index of the first grid point of the terminal window; at least 1.
fn tail_start<T: Scalar>(orbit: &OrbitSeries<T>, tail: Tail<T>) -> usize {
    let n = orbit.grid.count();
    let len = match tail {
        Tail::Fraction(f) => f * orbit.grid.len(),
        Tail::Duration(d) => d,
    };
    let cells = (len / orbit.grid.step()).round().to_usize().unwrap_or(n);
    n.saturating_sub(cells).clamp(1, n.saturating_sub(1).max(1))
}

fn mean<T: Scalar>(v: &[T]) -> T {
    if v.is_empty() {
        T::zero()
    } else {
        v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
    }
}

fn sup<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(*x))
}

fn witness<T: Scalar>(orbit: &OrbitSeries<T>, start: usize, statistic: T, threshold: T) -> Witness<T> {
    Witness {
        attained_sup: orbit.sup_norm(),
        tail_start: orbit.grid.point(start),
        statistic,
        threshold,
        fitted_rate: None,
        limit_estimate: None,
        cesaro_residual: None,
        note: None,
    }
}

/// Slope of `log ||x||` over the positive samples from `start` on.
fn tail_slope<T: Scalar>(orbit: &OrbitSeries<T>, start: usize) -> Option<T> {
    let (mut ts, mut ls) = (Vec::new(), Vec::new());
    for k in start..orbit.norms.len() {
        if orbit.norms[k] > T::zero() {
            ts.push(orbit.grid.point(k));
            ls.push(orbit.norms[k].ln());
        }
    }
    fit_line(&ts, &ls).map(|f| f.slope)
}

/// Bounded: the tail maximum stays within `bound_hint` times the maximum before the tail,
/// and `log ||x||` shows no growth trend on the tail.
pub fn check_bounded<T: Scalar>(orbit: &OrbitSeries<T>, config: &CheckerConfig<T>) -> Result<AsymptoticVerdict<T>> {
    check_orbit(orbit)?;
    let s = tail_start(orbit, config.tail);
    let head = sup(&orbit.norms[..=s]);
    let tail = sup(&orbit.norms[s..]);
    let ratio = if tail == T::zero() {
        T::zero()
    } else if head == T::zero() {
        T::infinity()
    } else {
        tail / head
    };
    let slope = tail_slope(orbit, s);
    let slope_verdict = match slope {
        None => Verdict::Pass,
        Some(k) if k <= T::zero() => Verdict::Pass,
        Some(k) => decide(k, config.slope_tol, config.band),
    };
    let mut w = witness(orbit, s, ratio, config.bound_hint);
    w.fitted_rate = slope;
    Ok(AsymptoticVerdict {
        property: Property::Bounded,
        verdict: both(decide(ratio, config.bound_hint, config.band), slope_verdict),
        witness: w,
    })
}

/// Strongly stable: the tail mean of `||x||` is below `strong_tol * sup ||x||` and the means
/// over consecutive sub-windows of the tail do not increase.
pub fn check_strongly_stable<T: Scalar>(
    orbit: &OrbitSeries<T>,
    config: &CheckerConfig<T>,
) -> Result<AsymptoticVerdict<T>> {
    check_orbit(orbit)?;
    let s = tail_start(orbit, config.tail);
    let top = orbit.sup_norm();
    let tail = &orbit.norms[s..];
    let stat = if top == T::zero() { T::zero() } else { mean(tail) / top };
    let pieces = config.sub_windows.max(1).min(tail.len());
    let chunk = tail.len().div_ceil(pieces);
    let means: Vec<T> = tail.chunks(chunk).map(mean).collect();
    let slack = config.band * config.strong_tol * top;
    let monotone = means.windows(2).all(|p| p[1] <= p[0] + slack);
    let mut w = witness(orbit, s, stat, config.strong_tol);
    w.fitted_rate = tail_slope(orbit, s);
    if !monotone {
        w.note = Some("tail sub-window means increase".into());
    }
    Ok(AsymptoticVerdict {
        property: Property::StronglyStable,
        verdict: both(
            decide(stat, config.strong_tol, config.band),
            Verdict::from_bool(monotone),
        ),
        witness: w,
    })
}

/// Dual norm of `phi` for the pairing `sum_i phi_i x_i` under the norm `tag`.
pub fn dual_norm<T: Scalar>(tag: &NormTag<T>, phi: &[T]) -> T {
    match tag {
        NormTag::Sup => phi.iter().map(|p| p.abs()).sum(),
        NormTag::L1Grid { step, block, .. } => {
            // exact for max-norm blocks, an upper bound for Euclidean ones
            phi.chunks((*block).max(1))
                .map(|c| c.iter().map(|p| p.abs()).sum::<T>())
                .fold(T::zero(), T::max)
                / *step
        }
        NormTag::Product(parts) => {
            let mut off = 0;
            let mut best = T::zero();
            for (len, t) in parts {
                best = best.max(dual_norm(t, &phi[off..off + len]));
                off += len;
            }
            best
        }
    }
}

/// Canonical basis functionals (thinned to at most 16) plus `random` seeded ones.
pub fn default_functionals<T: Scalar>(dim: usize, random: usize, seed: u64) -> Vec<Vec<T>> {
    let stride = dim.div_ceil(16).max(1);
    let mut out: Vec<Vec<T>> = (0..dim)
        .step_by(stride)
        .map(|j| (0..dim).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push((0..dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect());
    }
    out
}

/// Weakly stable, as a surrogate over a finite set of functionals: every tail mean of
/// `|<phi, x(t)>|` is below `weak_tol * sup ||x|| * ||phi||_*`.
pub fn check_weakly_stable<T: Scalar>(
    orbit: &OrbitSeries<T>,
    functionals: &[Vec<T>],
    config: &CheckerConfig<T>,
) -> Result<AsymptoticVerdict<T>> {
    check_orbit(orbit)?;
    if functionals.is_empty() {
        return Err(Error::Config("no functionals for the weak stability check".into()));
    }
    let s = tail_start(orbit, config.tail);
    let top = orbit.sup_norm();
    let tag = orbit.states[0].norm_tag().clone();
    let mut stat = T::zero();
    for phi in functionals {
        if phi.len() != orbit.states[0].dim() {
            return Err(Error::Dimension(format!(
                "functional of length {} for states of dimension {}",
                phi.len(),
                orbit.states[0].dim()
            )));
        }
        let scale = top * dual_norm(&tag, phi);
        if scale == T::zero() {
            continue;
        }
        let pairings: Vec<T> = orbit.states[s..]
            .iter()
            .map(|x| x.coords().iter().zip(phi).map(|(a, b)| *a * *b).sum::<T>().abs())
            .collect();
        stat = stat.max(mean(&pairings) / scale);
    }
    let mut w = witness(orbit, s, stat, config.weak_tol);
    w.note = Some(format!("sampled over {} functionals", functionals.len()));
    Ok(AsymptoticVerdict {
        property: Property::WeaklyStable,
        verdict: decide(stat, config.weak_tol, config.band),
        witness: w,
    })
}

/// Running integrals `int_0^{t_k} x` by the trapezoid rule, flattened per grid point.
fn cumulative<T: Scalar>(orbit: &OrbitSeries<T>) -> Vec<Vec<T>> {
    let h = orbit.grid.step();
    let half = T::lit(0.5) * h;
    let dim = orbit.states[0].dim();
    let mut out = Vec::with_capacity(orbit.states.len());
    let mut acc = vec![T::zero(); dim];
    out.push(acc.clone());
    for pair in orbit.states.windows(2) {
        for (i, a) in acc.iter_mut().enumerate() {
            *a = *a + half * (pair[0].coords()[i] + pair[1].coords()[i]);
        }
        out.push(acc.clone());
    }
    out
}

/// Mean of the orbit over grid points `[i, j]`.
fn window_mean<T: Scalar>(cum: &[Vec<T>], h: T, i: usize, j: usize) -> Vec<T> {
    let len = h * T::from_usize_lossy(j - i);
    cum[j].iter().zip(&cum[i]).map(|(b, a)| (*b - *a) / len).collect()
}

fn diff_norm<T: Scalar>(tag: &NormTag<T>, a: &[T], b: &[T]) -> T {
    let d: Vec<T> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
    tag.eval(&d)
}

/// Mean ergodic: the mean over the terminal window and the mean over its second half agree
/// to `ergodic_tol * sup ||x||`. The terminal-window mean is reported as the limit
/// estimate, together with the distance of the running Cesaro means to it.
pub fn check_mean_ergodic<T: Scalar>(
    orbit: &OrbitSeries<T>,
    config: &CheckerConfig<T>,
) -> Result<AsymptoticVerdict<T>> {
    check_orbit(orbit)?;
    let s = tail_start(orbit, config.tail);
    let n = orbit.grid.count();
    let h = orbit.grid.step();
    let tag = orbit.states[0].norm_tag().clone();
    let cum = cumulative(orbit);
    let half = (s + n).div_ceil(2).min(n - 1).max(s);
    let whole = window_mean(&cum, h, s, n);
    let late = window_mean(&cum, h, half, n);
    let top = orbit.sup_norm();
    let stat = if top == T::zero() {
        T::zero()
    } else {
        diff_norm(&tag, &whole, &late) / top
    };
    let limit = whole.clone();
    let residual = (0..=n)
        .map(|k| {
            if k == 0 {
                diff_norm(&tag, orbit.states[0].coords(), &limit)
            } else {
                diff_norm(&tag, &window_mean(&cum, h, 0, k), &limit)
            }
        })
        .collect();
    let mut w = witness(orbit, s, stat, config.ergodic_tol);
    w.limit_estimate = Some(limit);
    w.cesaro_residual = Some(residual);
    Ok(AsymptoticVerdict {
        property: Property::MeanErgodic,
        verdict: decide(stat, config.ergodic_tol, config.band),
        witness: w,
    })
}

/// Uniformly ergodic: the mean-ergodic comparison applied to every translate `x(. + tau)`,
/// `tau in [0, window]`, with the supremum over `tau` as statistic.
pub fn check_uniformly_ergodic<T: Scalar>(
    orbit: &OrbitSeries<T>,
    config: &CheckerConfig<T>,
) -> Result<AsymptoticVerdict<T>> {
    check_orbit(orbit)?;
    let n = orbit.grid.count();
    let h = orbit.grid.step();
    let shift = (config.window / h).round().to_usize().unwrap_or(0);
    if shift + 2 > n {
        return Err(Error::Domain(format!(
            "orbit of {} steps is too short for a shift window of {} steps",
            n, shift
        )));
    }
    let s = tail_start(orbit, config.tail).min(n - shift - 1);
    let tag = orbit.states[0].norm_tag().clone();
    let cum = cumulative(orbit);
    let top = orbit.sup_norm();
    // the window [s, n - shift] slides right by tau
    let end0 = n - shift;
    let start0 = s.saturating_sub(shift).max(1).min(end0 - 1);
    let half0 = (start0 + end0).div_ceil(2).min(end0 - 1).max(start0);
    let mut stat = T::zero();
    for tau in 0..=shift {
        let whole = window_mean(&cum, h, start0 + tau, end0 + tau);
        let late = window_mean(&cum, h, half0 + tau, end0 + tau);
        stat = stat.max(diff_norm(&tag, &whole, &late));
    }
    let stat = if top == T::zero() { T::zero() } else { stat / top };
    Ok(AsymptoticVerdict {
        property: Property::UniformlyErgodic,
        verdict: decide(stat, config.ergodic_tol, config.band),
        witness: witness(orbit, start0, stat, config.ergodic_tol),
    })
}

/// Runs the checker for `property`; weak stability uses `functionals`.
pub fn check<T: Scalar>(
    property: Property,
    orbit: &OrbitSeries<T>,
    functionals: &[Vec<T>],
    config: &CheckerConfig<T>,
) -> Result<AsymptoticVerdict<T>> {
    match property {
        Property::Bounded => check_bounded(orbit, config),
        Property::StronglyStable => check_strongly_stable(orbit, config),
        Property::WeaklyStable => check_weakly_stable(orbit, functionals, config),
        Property::MeanErgodic => check_mean_ergodic(orbit, config),
        Property::UniformlyErgodic => check_uniformly_ergodic(orbit, config),
    }
}

/// Whether INCONCLUSIVE perturbed verdicts count against robustness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InconclusivePolicy {
    #[default]
    CountsAgainst,
    Ignored,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeOutcome<T> {
    pub probe: usize,
    pub base: AsymptoticVerdict<T>,
    pub perturbed: AsymptoticVerdict<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessReport<T> {
    pub property: Property,
    pub policy: InconclusivePolicy,
    /// the base orbit of every probe passes
    pub base_holds: bool,
    /// if `base_holds`, the perturbed orbit of every probe passes as well
    pub robust: bool,
    /// every probe whose base orbit passes also passes when perturbed; stronger than
    /// `robust`, and not implied by it
    pub per_probe_consistent: bool,
    pub outcomes: Vec<ProbeOutcome<T>>,
}

/// Base and perturbed orbits for every probe, checked for `property`. Robustness is a
/// statement about the whole semigroup: a single decaying base orbit may well be excited by
/// the perturbation when other orbits of the base semigroup do not decay.
#[allow(clippy::too_many_arguments)]
pub fn robustness_experiment<T: Scalar>(
    triple: &PerturbationTriple<T>,
    step: T,
    property: Property,
    probes: &[StateVector<T>],
    time_grid: &Grid<T>,
    functionals: &[Vec<T>],
    config: &CheckerConfig<T>,
    policy: InconclusivePolicy,
) -> Result<RobustnessReport<T>> {
    if probes.is_empty() {
        return Err(Error::Config("empty probe set".into()));
    }
    let r = Realization::new(triple, step)?;
    let accepted = |v: Verdict| match v {
        Verdict::Pass => true,
        Verdict::Fail => false,
        Verdict::Inconclusive => policy == InconclusivePolicy::Ignored,
    };
    let mut outcomes = Vec::with_capacity(probes.len());
    let mut base_holds = true;
    let mut perturbed_holds = true;
    let mut per_probe_consistent = true;
    for (i, x) in probes.iter().enumerate() {
        let base = check(property, &triple.base.orbit(x, time_grid)?, functionals, config)?;
        let perturbed = check(property, &r.perturbed_orbit(x, time_grid)?, functionals, config)?;
        let ok = accepted(perturbed.verdict);
        base_holds &= base.verdict.is_pass();
        perturbed_holds &= ok;
        if base.verdict.is_pass() {
            per_probe_consistent &= ok;
        }
        outcomes.push(ProbeOutcome {
            probe: i,
            base,
            perturbed,
        });
    }
    Ok(RobustnessReport {
        property,
        policy,
        base_holds,
        robust: !base_holds || perturbed_holds,
        per_probe_consistent,
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiinvarianceOutcome {
    pub property: Property,
    pub shifted: Verdict,
    pub full: Verdict,
    /// false only when the shifted orbit passes and the full one does not
    pub consistent: bool,
}

/// Compares every checker on `orbit` and on its translate by `shift` grid steps, using the
/// same absolute tail window for both.
pub fn biinvariance_check<T: Scalar>(
    orbit: &OrbitSeries<T>,
    shift: usize,
    functionals: &[Vec<T>],
    config: &CheckerConfig<T>,
) -> Result<Vec<BiinvarianceOutcome>> {
    let shifted = orbit.shifted(shift)?;
    let s = tail_start(orbit, config.tail);
    let duration = orbit.grid.end() - orbit.grid.point(s);
    let cfg = CheckerConfig {
        tail: Tail::Duration(duration),
        ..config.clone()
    };
    Property::ALL
        .into_iter()
        .map(|p| {
            let a = check(p, &shifted, functionals, &cfg)?.verdict;
            let b = check(p, orbit, functionals, &cfg)?.verdict;
            Ok(BiinvarianceOutcome {
                property: p,
                shifted: a,
                full: b,
                consistent: !(a.is_pass() && !b.is_pass()),
            })
        })
        .collect()
}

/// A rotation in the first two coordinates with a damped third coordinate: bounded and mean
/// ergodic but not strongly stable. The observation `C = eps * e_0 e_2^T` only reads the
/// damped channel, so `int_0^inf ||C T(s) x|| ds <= eps ||x||`.
pub fn rotation_triple<T: Scalar>(eps: T) -> Result<PerturbationTriple<T>> {
    let z = T::zero();
    let o = T::one();
    let a = Matrix::from_rows(&[vec![z, -o, z], vec![o, z, z], vec![z, z, -o]])?;
    let mut c = Matrix::zeros(3, 3);
    c[(0, 2)] = eps;
    PerturbationTriple::new(SemigroupSpec::Matrix(a), crate::maps::ControlSpec::Identity, c)
}

/// Seeded synthetic orbits of varied type on `[0, horizon]`: decaying, growing and constant
/// exponentials, damped and undamped rotations, and nilpotent shift orbits.
pub fn synthetic_orbits<T: Scalar>(count: usize, seed: u64, horizon: T, step: T) -> Result<Vec<OrbitSeries<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::covering(T::zero(), horizon, step)?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let amp = T::lit(rng.gen_range(0.1..5.0));
        let orbit = match i % 5 {
            0 => {
                let rate = T::lit(rng.gen_range(-1.0..0.1));
                SemigroupSpec::Matrix(Matrix::scalar(rate)).orbit(&StateVector::sup(vec![amp]), &grid)?
            }
            1 => {
                let damp = T::lit(if rng.gen_bool(0.5) {
                    0.0
                } else {
                    rng.gen_range(0.0..0.5)
                });
                let freq = T::lit(rng.gen_range(0.5..3.0));
                let a = Matrix::from_rows(&[vec![-damp, -freq], vec![freq, -damp]])?;
                SemigroupSpec::Matrix(a).orbit(&StateVector::sup(vec![amp, T::zero()]), &grid)?
            }
            2 => SemigroupSpec::Matrix(Matrix::scalar(T::zero())).orbit(&StateVector::sup(vec![amp]), &grid)?,
            3 => {
                let cells = (T::one() / step).round().to_usize().unwrap_or(1).max(1);
                let shift = SemigroupSpec::nilpotent_shift(cells, 1)?;
                let f = (0..cells).map(|_| T::lit(rng.gen_range(-1.0..1.0)) * amp).collect();
                shift.orbit(&shift.state(f)?, &grid)?
            }
            _ => {
                let rate = T::lit(rng.gen_range(0.01..0.2));
                SemigroupSpec::Matrix(Matrix::scalar(rate)).orbit(&StateVector::sup(vec![amp]), &grid)?
            }
        };
        out.push(orbit);
    }
    Ok(out)
}
