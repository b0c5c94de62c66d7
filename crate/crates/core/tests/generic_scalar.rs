use sw_semigroup::maps::{ControlSpec, InversionMethod, PerturbationTriple, Realization};
use sw_semigroup::neutral::{method_of_steps, neutral_orbit, HistorySegment, NeutralSystem};
use sw_semigroup::numerics::{Grid, Matrix, StateVector};
use sw_semigroup::{Grid32, Matrix32, Semigroup32};

#[test]
fn f32_matches_f64() {
    let run64 = {
        let t = PerturbationTriple::new(
            sw_semigroup::Semigroup64::Matrix(Matrix::scalar(-1.0)),
            ControlSpec::Identity,
            Matrix::scalar(0.5),
        )
        .unwrap();
        let r = Realization::new(&t, 0.01).unwrap();
        r.perturbed_orbit_formula(
            &StateVector::sup(vec![1.0]),
            &Grid::covering(0.0, 5.0, 0.1).unwrap(),
            InversionMethod::Direct,
        )
        .unwrap()
    };
    let t = PerturbationTriple::new(
        Semigroup32::Matrix(Matrix32::scalar(-1.0)),
        ControlSpec::Identity,
        Matrix32::scalar(0.5),
    )
    .unwrap();
    let r = Realization::new(&t, 0.01_f32).unwrap();
    let grid = Grid32::covering(0.0, 5.0, 0.1).unwrap();
    let o = r
        .perturbed_orbit_formula(
            &StateVector::sup(vec![1.0_f32]),
            &grid,
            InversionMethod::neumann_default(),
        )
        .unwrap();
    assert_eq!(o.states.len(), run64.states.len());
    for (a, b) in o.states.iter().zip(&run64.states) {
        assert!((f64::from(a.coords()[0]) - b.coords()[0]).abs() < 1e-5);
    }
}

#[test]
fn f32_neutral_oracle() {
    let sys = NeutralSystem::atom_delay(
        Matrix32::scalar(-1.0),
        Matrix32::scalar(0.3),
        Matrix32::scalar(0.3),
        Matrix32::scalar(0.2),
        64,
    )
    .unwrap();
    let f = HistorySegment::from_fn(&sys.history_grid(), 1, |_| vec![1.0_f32]).unwrap();
    let y = [3.5_f32];
    let g = Grid32::covering(0.0, 3.0, 0.125).unwrap();
    let a = neutral_orbit(&sys, &y, &f, &g).unwrap();
    let b = method_of_steps(&sys, &y, &f, &g).unwrap();
    assert!(a.compatible);
    assert!(a.orbit.max_deviation(&b.orbit).unwrap() < 1e-3);
}
