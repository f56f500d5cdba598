mod common;

use gridlease::io::{resolve_case_file, CaseFile};
use gridlease::kkt::{apply_forward_bounds, Key, PiBlock, ZBlock};
use gridlease::model::{BusKind, ForwardPolicy, Scheme};
use gridlease::scenario::{
    audit_clearing, delta_sweep, forward_baseline, forward_sweep, mdc_intensities, solve_case, solve_ex_ante,
    solve_ex_post, solve_instance, FixedPointConfig,
};
use gridlease::solver::SolverConfig;
use gridlease::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{bus, case, curve, gen, hyperscaler, line, mdc, micro, micro_with_hyperscaler, random_case, RandomOpts};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * b.abs().max(1.0)
}

#[test]
fn single_bus_market_clears_at_the_curve_intersection() {
    let c = micro(500.0);
    let s = solve_instance(&c, None, None, &cfg()).unwrap();
    let lay = &s.instance.layout;
    let k = Key::gen_bus(0, 0, 0);
    let z = &s.solution.z;
    assert!(close(z[lay.z(ZBlock::D, k).unwrap()], 200.0));
    assert!(close(z[lay.z(ZBlock::G, k).unwrap()], 200.0));
    assert!(close(s.solution.pi[lay.pi(PiBlock::ThetaD, k).unwrap()], 30.0));
    assert!(z[lay.z(ZBlock::Lambda, Key::gen(0, 0)).unwrap()].abs() < 1e-9);

    // the bundled file describes the same market
    let file = resolve_case_file("micro1").unwrap();
    let r = solve_case(&file.to_case().unwrap(), &cfg(), &FixedPointConfig::default()).unwrap();
    assert!(close(r.total_demand, 200.0));
    assert!(close(r.theta_d[0].price, 30.0));
    assert!(close(r.emissions_system, 100.0));
}

#[test]
fn capacity_bound_market() {
    let c = micro(100.0);
    let s = solve_instance(&c, None, None, &cfg()).unwrap();
    let lay = &s.instance.layout;
    let k = Key::gen_bus(0, 0, 0);
    assert!(close(s.solution.z[lay.z(ZBlock::D, k).unwrap()], 100.0));
    assert!(close(s.solution.pi[lay.pi(PiBlock::ThetaD, k).unwrap()], 35.0));
    assert!(close(s.solution.z[lay.z(ZBlock::Lambda, Key::gen(0, 0)).unwrap()], 15.0));
}

#[test]
fn market_without_batches_reports_no_datacenter_activity() {
    let (_, r) = solve_ex_post(&micro(500.0), &cfg()).unwrap();
    assert_eq!(r.processing_cost_total, 0.0);
    assert_eq!(r.emissions_workload_total, 0.0);
    assert!(r.mdcs.is_empty() && r.leasing_prices.is_empty());
    assert_eq!(r.congestion_cost, 0.0);
}

#[test]
fn hyperscaler_buys_at_the_generator_price() {
    // 40 - 0.05 d = 10 + 0.1 (d + 50)  =>  d = 500 / 3
    let (_, r) = solve_ex_post(&micro_with_hyperscaler(50.0), &cfg()).unwrap();
    let d = 500.0 / 3.0;
    assert!(close(r.total_demand, d));
    let price = 10.0 + 0.1 * (d + 50.0);
    assert!(close(r.processing_cost_local, 50.0 * price));
    assert!(close(r.emissions_local, 25.0));
    assert!(close(r.emissions_system, 0.5 * (d + 50.0)));
}

#[test]
fn full_forward_cover_keeps_the_baseline_contracts() {
    let mut c = micro_with_hyperscaler(50.0);
    let base = forward_baseline(&c, &cfg()).unwrap();
    assert!(close(base.quantities[&(0, 0, 0)], 200.0));

    c.forward = Some(ForwardPolicy {
        fraction: 1.0,
        baseline: None,
    });
    let (sol, r) = solve_ex_post(&c, &cfg()).unwrap();
    assert!(close(r.total_demand, 200.0));
    assert!(close(r.theta_d[0].price, 30.0));
    // generator price 10 + 0.1 * 250 = 35; the floor carries the gap
    let beta = *sol.z.last().unwrap();
    assert!(close(beta, 5.0), "beta = {beta}");
}

#[test]
fn zero_fraction_bound_changes_nothing() {
    let c = micro_with_hyperscaler(50.0);
    let plain = solve_instance(&c, None, None, &cfg()).unwrap();
    let base = forward_baseline(&c, &cfg()).unwrap();
    let inst = apply_forward_bounds(&plain.instance, &c, &base, 0.0).unwrap();
    let sol = gridlease::solver::solve_mixed(&inst.lcp, &cfg()).unwrap();
    for (a, b) in plain.solution.z.iter().zip(&sol.z) {
        assert!(close(*a, *b));
    }
}

#[test]
fn mdc_intensity_is_the_purchase_weighted_rate() {
    let mut c = case(
        vec![bus(1, BusKind::ConventionalLoad), bus(2, BusKind::Mdc), bus(3, BusKind::Hyperscaler)],
        vec![line(1, 2, 0.1, 500.0), line(2, 3, 0.1, 500.0)],
        vec![gen("dirty", 1, 10.0, 0.0, 100.0, 0.9), gen("clean", 1, 12.0, 0.0, 100.0, 0.1)],
        vec![curve(1, 60.0, 0.1)],
    );
    c.hyperscaler = Some(hyperscaler(3, &[10.0], 0.5));
    c.mdcs = vec![mdc(2, 30.0, 0.0, &[1])];
    let s = solve_instance(&c, None, None, &cfg()).unwrap();
    let lay = &s.instance.layout;
    let mut z = vec![0.0; lay.n_z()];
    z[lay.z(ZBlock::P, Key::gen_bus(0, 1, 0)).unwrap()] = 10.0;
    z[lay.z(ZBlock::P, Key::gen_bus(1, 1, 0)).unwrap()] = 10.0;
    assert!(close(mdc_intensities(&c, &s.instance, &z).get(0, 0), 0.5));
    let none = vec![0.0; lay.n_z()];
    assert_eq!(mdc_intensities(&c, &s.instance, &none).get(0, 0), 0.0);
}

#[test]
fn renewable_only_mdc_discloses_zero() {
    let mut c = case(
        vec![
            bus(1, BusKind::ConventionalLoad),
            bus(2, BusKind::Mdc),
            bus(3, BusKind::Mdc),
            bus(4, BusKind::Hyperscaler),
        ],
        vec![line(1, 2, 0.1, 500.0), line(1, 3, 0.1, 500.0), line(1, 4, 0.1, 10.0)],
        vec![gen("coal", 1, 10.0, 0.01, 300.0, 1.0)],
        vec![curve(1, 60.0, 0.1)],
    );
    c.hyperscaler = Some(hyperscaler(4, &[40.0], 0.3));
    c.mdcs = vec![mdc(2, 30.0, 1.0, &[1]), mdc(3, 5.0, 5.0, &[1])];
    c.scheme = Scheme::ExAnte;
    let (_, r, it) = solve_ex_ante(&c, &cfg(), &FixedPointConfig::default()).unwrap();
    assert!(it <= 100);
    let e = r.intensities.as_ref().unwrap();
    assert_eq!(e[1], 0.0);
    assert!(e[0] > 0.0);
    // the clean site earns more per GPU
    assert!(r.mdcs[1].leasing_price > r.mdcs[0].leasing_price);
}

#[test]
fn overloaded_case_names_both_sides_of_the_comparison() {
    let c = resolve_case_file("micro-overload").unwrap().to_case().unwrap();
    match solve_case(&c, &cfg(), &FixedPointConfig::default()) {
        Err(Error::Infeasible { period, load, limit }) => {
            assert_eq!(period, 0);
            assert_eq!(load, 60.0);
            assert!(close(limit, 50.0));
        }
        other => panic!("expected an infeasibility error, got {other:?}"),
    }
}

#[test]
fn sweeps_match_direct_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let opts = RandomOpts {
        max_buses: 4,
        hyperscaler: true,
        mdcs: true,
        stress_load: false,
    };
    let c = random_case(&mut rng, opts);
    let fp = FixedPointConfig::default();
    let direct = solve_case(&c.with_delta(0.5), &cfg(), &fp).unwrap();
    let swept = delta_sweep(&c, &[0.5], &cfg(), &fp).pop().unwrap().unwrap();
    assert_eq!(direct, swept);

    let deltas = [0.2, 0.8];
    let plain = delta_sweep(&c, &deltas, &cfg(), &fp);
    let rows = forward_sweep(&c, &[0.0, 0.5], &deltas, &cfg(), &fp).unwrap();
    assert_eq!(rows[0].fraction, 0.0);
    for (a, b) in plain.iter().zip(&rows[0].points) {
        assert_eq!(a.as_ref().unwrap(), b.as_ref().unwrap());
    }
    for p in &rows[1].points {
        assert_eq!(p.as_ref().unwrap().forward_fraction, Some(0.5));
    }
    // out-of-range points fail alone
    let mixed = delta_sweep(&c, &[0.5, 1.5], &cfg(), &fp);
    assert!(mixed[0].is_ok() && mixed[1].is_err());
}

#[test]
fn reports_are_internally_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let opts = RandomOpts {
        max_buses: 5,
        hyperscaler: true,
        mdcs: true,
        stress_load: false,
    };
    let mut solved = 0;
    for _ in 0..30 {
        let c = random_case(&mut rng, opts);
        let Ok(s) = solve_instance(&c, None, None, &cfg()) else { continue };
        solved += 1;
        let (_, r) = solve_ex_post(&c, &cfg()).unwrap();
        assert!(close(r.processing_cost_total, r.processing_cost_local + r.processing_cost_mdc));
        assert!(close(r.emissions_workload_total, r.emissions_local + r.emissions_mdc));
        assert!(r.emissions_system >= r.emissions_workload_total - 1e-6);
        assert!(r.congestion_cost >= -1e-9);
        let a = audit_clearing(&c, &s.instance, &s.solution).unwrap();
        assert!(a.max() <= 1e-6, "{a:?}");
    }
    assert!(solved >= 25);
}

#[test]
fn case_files_round_trip() {
    for name in gridlease::io::bundled_names() {
        let file = resolve_case_file(name).unwrap();
        let case = file.to_case().unwrap();
        let text = CaseFile::from_case(&case).to_toml();
        let again = CaseFile::parse(&text).unwrap().to_case().unwrap();
        assert_eq!(case, again, "{name}");
    }
}
