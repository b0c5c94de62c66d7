//! Sampled estimates of admissibility constants, the Miyadera-Voigt and Desch-Schappacher
//! conditions, and Favard-class norms.
//!
//! Every constant is a maximum over a finite set of probes, signals and grid times, hence a
//! lower bound for the true supremum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{ControlSpec, InputSignal, InversionMethod, PerturbationTriple, Realization};
use crate::numerics::{fit_line, Grid, Matrix, StateVector};
use crate::scalar::Scalar;
use crate::semigroups::SemigroupSpec;
use crate::verdict::Verdict;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest number of canonical basis vectors used as probes.
const MAX_BASIS_PROBES: usize = 32;

/// A named condition with its measured value and threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict<T> {
    pub condition: String,
    pub verdict: Verdict,
    pub value: T,
    pub threshold: T,
    /// `threshold - value`; positive when the condition holds with room to spare
    pub margin: T,
}

impl<T: Scalar> ConditionVerdict<T> {
    fn below(condition: &str, value: T, threshold: T) -> Self {
        Self {
            condition: condition.to_string(),
            verdict: Verdict::from_bool(value < threshold),
            value,
            threshold,
            margin: threshold - value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleCounts {
    pub probes: usize,
    pub signals: usize,
    pub time_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport<T> {
    pub schema_version: u32,
    pub horizon: T,
    pub step: T,
    /// `max ||B_t u|| / ||u||_{L1(0,t)}`
    pub m_b_est: T,
    /// `max ||C_H x||_1 / ||x||`
    pub m_c_est: T,
    /// `max ||F_H u||_1 / ||u||_1` over the supplied signals
    pub m_bc_est: T,
    /// discrete operator norm of `F_H`
    pub io_norm_est: T,
    /// `max ||(I - F_H)^{-1} C_H x||_1 / ||x||`
    pub sup_inv_obs_est: T,
    /// the same at horizon `2H`
    pub sup_inv_obs_doubled: T,
    /// Miyadera-Voigt constant, for `B = I`
    pub q_est: Option<T>,
    /// `max ||T_BC(t) x|| / ||x||` over probes and grid times up to `H`; sampled only
    pub perturbed_norm_sample: T,
    pub sample_counts: SampleCounts,
    pub verdicts: Vec<ConditionVerdict<T>>,
}

/// Canonical basis vectors of the state space (evenly thinned when there are many) plus
/// `random` seeded probes with coordinates uniform in `[-1, 1]`.
pub fn default_probes<T: Scalar>(base: &SemigroupSpec<T>, random: usize, seed: u64) -> Vec<StateVector<T>> {
    let n = base.state_dim();
    let stride = n.div_ceil(MAX_BASIS_PROBES).max(1);
    let zero = base.zero_state();
    let mut probes: Vec<_> = (0..n)
        .step_by(stride)
        .map(|j| {
            let mut e = zero.clone();
            e.coords_mut()[j] = T::one();
            e
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let mut x = zero.clone();
        for c in x.coords_mut() {
            *c = T::lit(rng.gen_range(-1.0..1.0));
        }
        probes.push(x);
    }
    probes
}

/// Seeded signals on `count` cells with cell values uniform in `[-1, 1]`.
pub fn random_signals<T: Scalar>(
    r: &Realization<T>,
    count: usize,
    how_many: usize,
    seed: u64,
) -> Result<Vec<InputSignal<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..how_many)
        .map(|_| {
            let values = (0..count * r.input_dim())
                .map(|_| T::lit(rng.gen_range(-1.0..1.0)))
                .collect();
            r.signal(values)
        })
        .collect()
}

fn fit_to<T: Scalar>(r: &Realization<T>, u: &InputSignal<T>, k: usize) -> Result<InputSignal<T>> {
    if u.count() >= k {
        u.truncated(k)
    } else {
        u.zero_padded(k)
    }
    .and_then(|s| r.signal(s.values().to_vec()))
}

/// Estimates all admissibility constants of `triple` at time step `step` up to `horizon`.
pub fn estimate_constants<T: Scalar>(
    triple: &PerturbationTriple<T>,
    step: T,
    probes: &[StateVector<T>],
    signals: &[InputSignal<T>],
    horizon: T,
) -> Result<AdmissibilityReport<T>> {
    if probes.is_empty() {
        return Err(Error::Config("empty probe set".into()));
    }
    if signals.is_empty() {
        return Err(Error::Config("empty signal set".into()));
    }
    let r = Realization::new(triple, step)?;
    let k = r.steps(horizon)?;
    if k == 0 {
        return Err(Error::Domain("horizon must be positive".into()));
    }
    let tiny = T::min_positive_value();

    let mut m_b = T::zero();
    let mut m_bc = T::zero();
    for u in signals {
        let u = fit_to(&r, u, k)?;
        let states = r.control_orbit(horizon, &u)?;
        let cell_norms = u.pointwise_norms();
        let mut acc = T::zero();
        for j in 1..=k {
            acc = acc + step * cell_norms[j - 1];
            if acc > tiny {
                m_b = m_b.max(states.norms[j] / acc);
            }
        }
        let un = u.norm();
        if un > tiny {
            m_bc = m_bc.max(r.io_map(horizon, &u)?.norm() / un);
        }
    }

    let mut m_c = T::zero();
    let mut inv_h = T::zero();
    let mut inv_2h = T::zero();
    let mut pert = T::zero();
    let time_grid = Grid::new(T::zero(), step, k)?;
    for x in probes {
        let xn = x.norm();
        if xn <= tiny {
            continue;
        }
        m_c = m_c.max(r.observation_map(horizon, x)?.norm() / xn);
        let w = r
            .closed_loop_output(horizon + horizon, x, InversionMethod::Direct)?
            .signal;
        inv_h = inv_h.max(w.truncated(k)?.norm() / xn);
        inv_2h = inv_2h.max(w.norm() / xn);
        pert = pert.max(r.perturbed_orbit(x, &time_grid)?.sup_norm() / xn);
    }
    let io_norm = r.io_norm(horizon)?;

    let mut verdicts = vec![ConditionVerdict::below("io_contraction", io_norm, T::one())];
    let rel = if inv_h > tiny {
        (inv_2h - inv_h).abs() / inv_h
    } else if inv_2h > tiny {
        T::infinity()
    } else {
        T::zero()
    };
    let stable = inv_2h.is_finite() && rel < T::lit(0.05);
    verdicts.push(ConditionVerdict {
        condition: "inverse_observation_bounded".into(),
        verdict: Verdict::from_bool(stable),
        value: rel,
        threshold: T::lit(0.05),
        margin: T::lit(0.05) - rel,
    });
    let q_est = matches!(triple.control, ControlSpec::Identity).then_some(m_c);
    if let Some(q) = q_est {
        verdicts.push(ConditionVerdict::below("miyadera_voigt", q, T::one()));
    }

    Ok(AdmissibilityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        horizon,
        step,
        m_b_est: m_b,
        m_c_est: m_c,
        m_bc_est: m_bc,
        io_norm_est: io_norm,
        sup_inv_obs_est: inv_h,
        sup_inv_obs_doubled: inv_2h,
        q_est,
        perturbed_norm_sample: pert,
        sample_counts: SampleCounts {
            probes: probes.len(),
            signals: signals.len(),
            time_steps: k,
        },
        verdicts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiyaderaVoigtCheck<T> {
    pub verdict: Verdict,
    /// `max_x int_0^H ||C T(s) x|| ds / ||x||`
    pub ratio: T,
    pub threshold: T,
}

/// Checks `int_0^H ||C T(s) x|| ds <= q ||x||` on the probes, with `q = q_threshold < 1`.
pub fn check_miyadera_voigt<T: Scalar>(
    triple: &PerturbationTriple<T>,
    step: T,
    probes: &[StateVector<T>],
    horizon: T,
    q_threshold: T,
) -> Result<MiyaderaVoigtCheck<T>> {
    if !matches!(triple.control, ControlSpec::Identity) {
        return Err(Error::Config("the Miyadera-Voigt check needs B = I".into()));
    }
    if !(q_threshold < T::one()) {
        return Err(Error::Config(format!("threshold {q_threshold} must be below 1")));
    }
    if probes.is_empty() {
        return Err(Error::Config("empty probe set".into()));
    }
    let r = Realization::new(triple, step)?;
    let mut ratio = T::zero();
    for x in probes {
        if x.norm() > T::zero() {
            ratio = ratio.max(r.observation_map(horizon, x)?.norm() / x.norm());
        }
    }
    Ok(MiyaderaVoigtCheck {
        verdict: Verdict::from_bool(ratio <= q_threshold),
        ratio,
        threshold: q_threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FavardEstimate<T> {
    pub favard_norm: T,
    pub probe_grid: Grid<T>,
    pub argmax_t: T,
}

/// `max_t ||(T(t) x - x) / t||` over the points of `probe_grid`.
pub fn favard_norm<T: Scalar>(
    spec: &SemigroupSpec<T>,
    x: &StateVector<T>,
    probe_grid: &Grid<T>,
) -> Result<FavardEstimate<T>> {
    if !(probe_grid.start() > T::zero()) {
        return Err(Error::Domain("Favard probes must start after t = 0".into()));
    }
    let mut best = T::zero();
    let mut arg = probe_grid.start();
    for t in probe_grid.points() {
        let q = spec.apply(t, x)?.sub(x)?.norm() / t;
        if q > best {
            best = q;
            arg = t;
        }
    }
    Ok(FavardEstimate {
        favard_norm: best,
        probe_grid: *probe_grid,
        argmax_t: arg,
    })
}

/// Per-probe Neumann diagnostics of the Desch-Schappacher check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeumannTrace<T> {
    pub probe_norm: T,
    /// `||F^n T(.) x||_1` for `n = 0..=terms`
    pub term_norms: Vec<T>,
    /// `rho^n (M / omega) ||x||`
    pub term_bounds: Vec<T>,
    pub partial_sum: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeschSchappacherCheck<T> {
    pub verdict: Verdict,
    /// `m ||B|| / omega`
    pub rho: T,
    pub omega: T,
    pub m: T,
    /// growth bound `M` measured on the probe orbits
    pub growth_constant: T,
    /// slowest decay rate fitted to `log ||T(t) x||`
    pub fitted_rate: T,
    /// quality of the log-linear fits; diagnostic only
    pub min_r_squared: T,
    /// `M / (omega - m ||B||)`, infinite when `rho >= 1`
    pub sum_bound: T,
    /// smallest `bound - value` over all terms (absolute, in units of `||x||`)
    pub tightest_term_margin: T,
    /// smallest `sum_bound ||x|| - partial sum` over probes
    pub tightest_sum_margin: T,
    pub traces: Vec<NeumannTrace<T>>,
}

/// Tolerance for the term-wise geometric bound.
const TERM_SLACK: f64 = 1e-8;

/// Bounded perturbation `B` of an exponentially stable matrix semigroup, observed through
/// `C = I`: checks `rho = m ||B|| / omega < 1` and the geometric domination of the Neumann
/// terms `F^n [T(.) x]` up to `terms`.
pub fn check_desch_schappacher<T: Scalar>(
    triple: &PerturbationTriple<T>,
    step: T,
    probes: &[StateVector<T>],
    omega: T,
    m: T,
    horizon: T,
    terms: usize,
) -> Result<DeschSchappacherCheck<T>> {
    let b = match &triple.control {
        ControlSpec::Bounded(b) => b,
        _ => return Err(Error::Config("the Desch-Schappacher check needs a bounded B".into())),
    };
    if triple.observation != Matrix::identity(triple.base.state_dim()) {
        return Err(Error::Config(
            "the Desch-Schappacher check observes through C = I".into(),
        ));
    }
    if !(omega > T::zero()) || !(m > T::zero()) {
        return Err(Error::Config("omega and m must be positive".into()));
    }
    if probes.is_empty() {
        return Err(Error::Config("empty probe set".into()));
    }
    let r = Realization::new(triple, step)?;
    let k = r.steps(horizon)?;
    let grid = Grid::new(T::zero(), step, k)?;

    // stability precondition on the probe orbits
    let mut growth = T::one();
    let mut early_growth = T::zero();
    let mut late_growth = T::zero();
    let mut slowest = T::infinity();
    let mut min_r2 = T::one();
    let half = k / 2;
    for x in probes {
        let xn = x.norm();
        if xn == T::zero() {
            continue;
        }
        let orbit = triple.base.orbit(x, &grid)?;
        let (mut ts, mut ls) = (Vec::new(), Vec::new());
        for (j, (t, n)) in grid.points().zip(&orbit.norms).enumerate() {
            let g = *n * (omega * t).exp() / xn;
            growth = growth.max(g);
            if j > half {
                late_growth = late_growth.max(g);
            } else {
                early_growth = early_growth.max(g);
            }
            if *n > T::lit(1e-12) * xn {
                ts.push(t);
                ls.push((*n / xn).ln());
            }
        }
        if let Some(fit) = fit_line(&ts, &ls) {
            slowest = slowest.min(-fit.slope);
            min_r2 = min_r2.min(fit.r_squared);
        }
    }
    // e^{omega t} ||T(t) x|| must have stopped growing by the second half of the horizon
    let rate_ok = slowest >= omega * (T::one() - T::lit(1e-6));
    let settled = growth.is_finite() && late_growth <= early_growth * (T::one() + T::lit(1e-6));
    if !rate_ok || !settled {
        return Err(Error::Precondition(format!(
            "base semigroup not exponentially stable at rate {omega}: fitted rate {slowest}, growth {growth}, early {early_growth}, late {late_growth}"
        )));
    }

    let rho = m * b.norm_inf() / omega;
    let sum_bound = if rho < T::one() {
        growth / (omega - m * b.norm_inf())
    } else {
        T::infinity()
    };
    let mut traces = Vec::new();
    let mut term_margin = T::infinity();
    let mut sum_margin = T::infinity();
    let mut ok = rho < T::one();
    for x in probes {
        let xn = x.norm();
        if xn == T::zero() {
            continue;
        }
        let mut y = r.observation_map(horizon, x)?;
        let mut norms = Vec::with_capacity(terms + 1);
        let mut bounds = Vec::with_capacity(terms + 1);
        for n in 0..=terms {
            if n > 0 {
                y = r.io_map(horizon, &y)?;
            }
            let bound = rho.powi(n as i32) * growth / omega * xn;
            let value = y.norm();
            term_margin = term_margin.min(bound - value);
            ok &= value <= bound + T::lit(TERM_SLACK);
            norms.push(value);
            bounds.push(bound);
        }
        let partial: T = norms.iter().copied().sum();
        sum_margin = sum_margin.min(sum_bound * xn - partial);
        ok &= partial <= sum_bound * xn + T::lit(TERM_SLACK);
        traces.push(NeumannTrace {
            probe_norm: xn,
            term_norms: norms,
            term_bounds: bounds,
            partial_sum: partial,
        });
    }
    Ok(DeschSchappacherCheck {
        verdict: Verdict::from_bool(ok),
        rho,
        omega,
        m,
        growth_constant: growth,
        fitted_rate: slowest,
        min_r_squared: min_r2,
        sum_bound,
        tightest_term_margin: term_margin,
        tightest_sum_margin: sum_margin,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalar_base(a: f64) -> SemigroupSpec<f64> {
        SemigroupSpec::Matrix(Matrix::scalar(a))
    }

    fn mv(q: f64) -> PerturbationTriple<f64> {
        PerturbationTriple::new(scalar_base(-1.0), ControlSpec::Identity, Matrix::scalar(q)).unwrap()
    }

    fn one() -> Vec<StateVector<f64>> {
        vec![StateVector::sup(vec![1.0])]
    }

    #[test]
    fn zero_control_gives_zero_m_b() {
        let t = PerturbationTriple::new(
            scalar_base(-1.0),
            ControlSpec::Bounded(Matrix::scalar(0.0)),
            Matrix::scalar(0.7),
        )
        .unwrap();
        let r = Realization::new(&t, 0.05).unwrap();
        let sig = random_signals(&r, 40, 3, 7).unwrap();
        let rep = estimate_constants(&t, 0.05, &one(), &sig, 2.0).unwrap();
        assert_eq!(rep.m_b_est, 0.0);
        assert_eq!(rep.m_bc_est, 0.0);
        assert_eq!(rep.io_norm_est, 0.0);
    }

    #[test]
    fn scalar_miyadera_voigt_constants() {
        let t = mv(0.5);
        let r = Realization::new(&t, 0.01).unwrap();
        let sig = random_signals(&r, 100, 4, 1).unwrap();
        let rep = estimate_constants(&t, 0.01, &one(), &sig, 20.0).unwrap();
        assert_abs_diff_eq!(rep.m_c_est, 0.5, epsilon = 1e-6);
        assert!(rep.sup_inv_obs_est <= 1.0 + 1e-6);
        assert_eq!(rep.q_est, Some(rep.m_c_est));
        assert!(rep.verdicts.iter().all(|v| v.verdict.is_pass()), "{:?}", rep.verdicts);
        assert!(rep.m_b_est <= 1.0 + 1e-12);
    }

    #[test]
    fn contraction_violation_is_reported() {
        let t = mv(1.5);
        let r = Realization::new(&t, 0.05).unwrap();
        let sig = random_signals(&r, 10, 1, 1).unwrap();
        let rep = estimate_constants(&t, 0.05, &one(), &sig, 10.0).unwrap();
        assert!(rep.io_norm_est > 1.0);
        assert_eq!(rep.verdicts[0].verdict, Verdict::Fail);
    }

    #[test]
    fn empty_sets_rejected() {
        let t = mv(0.5);
        let r = Realization::new(&t, 0.1).unwrap();
        let sig = random_signals(&r, 10, 1, 1).unwrap();
        assert!(matches!(
            estimate_constants(&t, 0.1, &[], &sig, 1.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            estimate_constants(&t, 0.1, &one(), &[], 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn miyadera_voigt_verdicts() {
        let c = check_miyadera_voigt(&mv(0.0), 0.01, &one(), 30.0, 0.9).unwrap();
        assert_eq!((c.verdict, c.ratio), (Verdict::Pass, 0.0));
        let c = check_miyadera_voigt(&mv(0.5), 0.01, &one(), 30.0, 0.9).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_abs_diff_eq!(c.ratio, 0.5, epsilon = 1e-6);
        let c = check_miyadera_voigt(&mv(1.5), 0.01, &one(), 30.0, 0.9).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert_abs_diff_eq!(c.ratio, 1.5, epsilon = 1e-6);
        let bounded = PerturbationTriple::new(
            scalar_base(-1.0),
            ControlSpec::Bounded(Matrix::scalar(1.0)),
            Matrix::scalar(0.5),
        )
        .unwrap();
        assert!(matches!(
            check_miyadera_voigt(&bounded, 0.01, &one(), 1.0, 0.9),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn favard_norms() {
        let g = Grid::new(1e-4, 1e-4, 100).unwrap();
        let zero = favard_norm(&scalar_base(-1.0), &StateVector::sup(vec![0.0]), &g).unwrap();
        assert_eq!(zero.favard_norm, 0.0);
        let f = favard_norm(&scalar_base(-1.0), &StateVector::sup(vec![1.0]), &g).unwrap();
        assert_abs_diff_eq!(f.favard_norm, 1.0, epsilon = 1e-3);
        let a = SemigroupSpec::Matrix(Matrix::from_diag(&[-1.0, -3.0]));
        let f = favard_norm(&a, &StateVector::sup(vec![1.0, 1.0]), &g).unwrap();
        assert_abs_diff_eq!(f.favard_norm, 3.0, epsilon = 1e-3);
        assert!(favard_norm(&a, &StateVector::sup(vec![1.0, 1.0]), &Grid::new(0.0, 0.1, 3).unwrap()).is_err());
    }

    #[test]
    fn favard_refinement_never_decreases() {
        let a = SemigroupSpec::Matrix(Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, -0.2]]).unwrap());
        let x = StateVector::sup(vec![1.0, 0.3]);
        let coarse = favard_norm(&a, &x, &Grid::new(0.1, 0.1, 20).unwrap()).unwrap();
        let fine = favard_norm(&a, &x, &Grid::new(0.05, 0.05, 40).unwrap()).unwrap();
        assert!(fine.favard_norm >= coarse.favard_norm - 1e-12);
    }

    fn ds(b: f64) -> PerturbationTriple<f64> {
        PerturbationTriple::new(
            scalar_base(-1.0),
            ControlSpec::Bounded(Matrix::scalar(b)),
            Matrix::identity(1),
        )
        .unwrap()
    }

    #[test]
    fn desch_schappacher_zero_b() {
        let c = check_desch_schappacher(&ds(0.0), 0.01, &one(), 1.0, 1.0, 20.0, 20).unwrap();
        assert_eq!((c.verdict, c.rho), (Verdict::Pass, 0.0));
        assert!(c.traces[0].term_norms[0] <= 1.0);
        assert!(c.traces[0].term_norms[1..].iter().all(|t| *t == 0.0));
    }

    #[test]
    fn desch_schappacher_geometric_sum() {
        let c = check_desch_schappacher(&ds(0.5), 0.01, &one(), 1.0, 1.0, 30.0, 20).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_abs_diff_eq!(c.rho, 0.5);
        assert_abs_diff_eq!(c.sum_bound, 2.0, epsilon = 1e-12);
        // the scalar sum approaches the bound from below
        assert!((c.traces[0].partial_sum - 2.0).abs() < 1e-3);
    }

    #[test]
    fn desch_schappacher_divergent() {
        let c = check_desch_schappacher(&ds(1.2), 0.01, &one(), 1.0, 1.0, 30.0, 20).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        let t = &c.traces[0].term_norms;
        assert!(t[20] > t[1]);
    }

    #[test]
    fn desch_schappacher_needs_stable_base() {
        let t = PerturbationTriple::new(
            scalar_base(0.1),
            ControlSpec::Bounded(Matrix::scalar(0.1)),
            Matrix::identity(1),
        )
        .unwrap();
        assert!(matches!(
            check_desch_schappacher(&t, 0.01, &one(), 1.0, 1.0, 10.0, 5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn desch_schappacher_mixed_modes() {
        // the probe switches from the slow to the fast mode: not log-linear, still stable at rate 1
        let a = Matrix::from_diag(&[-1.0, -2.0]);
        let t = PerturbationTriple::new(
            SemigroupSpec::Matrix(a),
            ControlSpec::Bounded(Matrix::identity(2).scale(0.3)),
            Matrix::identity(2),
        )
        .unwrap();
        let x = vec![StateVector::sup(vec![0.01, 1.0])];
        let c = check_desch_schappacher(&t, 0.01, &x, 1.0, 1.0, 20.0, 10).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.min_r_squared < 0.99);
        // a Jordan block at rate 1 has e^t ||T(t) x|| growing like t
        let j = Matrix::from_rows(&[vec![-1.0, 1.0], vec![0.0, -1.0]]).unwrap();
        let t = PerturbationTriple::new(
            SemigroupSpec::Matrix(j),
            ControlSpec::Bounded(Matrix::identity(2).scale(0.3)),
            Matrix::identity(2),
        )
        .unwrap();
        let x = vec![StateVector::sup(vec![0.0, 1.0])];
        assert!(matches!(
            check_desch_schappacher(&t, 0.01, &x, 1.0, 1.0, 20.0, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn probes_are_seeded() {
        let base = scalar_base(-1.0);
        assert_eq!(default_probes(&base, 3, 9), default_probes(&base, 3, 9));
        assert_eq!(default_probes(&base, 3, 9).len(), 4);
        let shift = SemigroupSpec::<f64>::nilpotent_shift(100, 1).unwrap();
        assert_eq!(default_probes(&shift, 0, 1).len(), 25);
    }
}
