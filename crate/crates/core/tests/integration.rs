use soliton_toffoli::analysis::Bit;
use soliton_toffoli::gate::{build_scenario, run_gate, verify_truth_table, Controls};
use soliton_toffoli::sweep::{self, PlaneOptions, Probe};
use soliton_toffoli::{Error, GateParams64, Grid64, NumericsConfig64, PotentialConfig64};

fn coarse() -> (Grid64, NumericsConfig64) {
    (Grid64::new(256.0, 2048).unwrap(), NumericsConfig64::new(0.01, 200.0))
}

#[test]
fn swapping_components_swaps_coefficients_when_uncoupled() {
    let (grid, numerics) = coarse();
    let params = GateParams64::default();
    let c = Controls::new(Bit::One, Bit::One);
    let a = run_gate(&build_scenario(c, Bit::Zero, &params).unwrap(), &numerics, &grid).unwrap();
    let b = run_gate(&build_scenario(c, Bit::One, &params).unwrap(), &numerics, &grid).unwrap();
    assert_eq!(a.transport.component(0), b.transport.component(1));
    assert_eq!(a.transport.component(1), b.transport.component(0));
    assert_eq!(a.target_out, Some(Bit::One));
    assert_eq!(b.target_out, Some(Bit::Zero));
}

#[test]
fn plane_cell_matches_gate_run() {
    let (grid, numerics) = coarse();
    let params = GateParams64::default();
    let map = sweep::scan_plane(
        &params,
        &[params.velocity],
        &[params.amplitude],
        params.alpha,
        0.0,
        &numerics,
        &grid,
        PlaneOptions { short_circuit: false },
    )
    .unwrap();
    let cell = map.cell(0, 0);
    let probe = sweep::probe_coefficient(&params, Probe::Double, &numerics, &grid).unwrap();
    assert_eq!(cell.r11, Some(probe.value));
    let gate = run_gate(
        &build_scenario(Controls::new(Bit::One, Bit::One), Bit::Zero, &params).unwrap(),
        &numerics,
        &grid,
    )
    .unwrap();
    assert_eq!(cell.r11, Some(gate.transport.component(0).reflection));
    assert!(cell.t10.is_some() && cell.t01.is_some());
    assert_eq!(map.mask_at(map.theta_r, map.theta_t), vec![cell.pass]);
}

#[test]
fn masks_shrink_with_thresholds() {
    let (grid, numerics) = coarse();
    let params = GateParams64::default();
    let map = sweep::scan_plane(
        &params,
        &[0.45, 0.5, 0.525, 0.56],
        &[1.3, 1.4],
        params.alpha,
        0.0,
        &numerics,
        &grid,
        PlaneOptions { short_circuit: false },
    )
    .unwrap();
    let pass: Vec<bool> = map.cells.iter().map(|c| c.pass).collect();
    assert_eq!(map.mask_at(0.9, 0.9), pass);
    let strict = map.mask_at(0.95, 0.95);
    assert!(strict.iter().zip(&pass).all(|(&s, &p)| !s || p));
    assert!(map.max_norm_drift() < 1e-10);
    assert_eq!(map.invalid_count(), 0);
}

#[test]
fn sweep_results_do_not_depend_on_worker_count() {
    let (grid, numerics) = coarse();
    let params = GateParams64::default();
    let vs = [0.49, 0.52, 0.55];
    let one = sweep::with_workers(Some(1), || sweep::scan_velocity(&params, &vs, &numerics, &grid))
        .unwrap()
        .unwrap();
    let two = sweep::with_workers(Some(2), || sweep::scan_velocity(&params, &vs, &numerics, &grid))
        .unwrap()
        .unwrap();
    assert_eq!(one, two);
}

#[test]
fn empty_velocity_list_is_rejected() {
    let (grid, numerics) = coarse();
    let err = sweep::scan_velocity(&GateParams64::default(), &[], &numerics, &grid).unwrap_err();
    assert!(matches!(err, Error::EmptyScan(_)), "{err}");
}

#[test]
fn critical_velocity_of_second_well() {
    let (grid, numerics) = coarse();
    let params = GateParams64::default();
    let pot = PotentialConfig64::new(vec![params.well2().unwrap()]).unwrap();
    let vc = sweep::critical_velocity(&pot, params.amplitude, params.x0, &params.region, &numerics, &grid, (0.3, 0.7))
        .unwrap();
    assert!(vc > 0.0 && vc < 0.4925, "v_c = {vc}");

    let err = sweep::critical_velocity(&pot, params.amplitude, params.x0, &params.region, &numerics, &grid, (0.9, 1.0))
        .unwrap_err();
    assert!(matches!(err, Error::InvalidBracket { .. }), "{err}");
    let err = sweep::critical_velocity(&pot, params.amplitude, params.x0, &params.region, &numerics, &grid, (0.7, 0.3))
        .unwrap_err();
    assert!(matches!(err, Error::InvalidBracket { .. }), "{err}");
}

#[test]
fn fast_solitons_break_the_gate() {
    let (grid, _) = coarse();
    let params = GateParams64 { velocity: 1.0, ..GateParams64::default() };
    let report = verify_truth_table(&params, &NumericsConfig64::new(0.01, 110.0), &grid).unwrap();
    assert!(!report.all_pass);
    for t in [Bit::Zero, Bit::One] {
        let row = report.row(t, Controls::new(Bit::One, Bit::One)).unwrap();
        assert!(!row.pass());
    }
}

#[test]
fn slow_solitons_break_the_gate() {
    let (grid, _) = coarse();
    let params = GateParams64 { velocity: 0.3, ..GateParams64::default() };
    let report = verify_truth_table(&params, &NumericsConfig64::new(0.01, 150.0), &grid).unwrap();
    assert!(!report.all_pass);
    for t in [Bit::Zero, Bit::One] {
        for c in [Controls::new(Bit::One, Bit::Zero), Controls::new(Bit::Zero, Bit::One)] {
            assert!(!report.row(t, c).unwrap().pass());
        }
    }
}
