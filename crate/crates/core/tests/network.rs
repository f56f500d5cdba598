mod common;

use approx::assert_abs_diff_eq;
use gridlease::model::BusKind;
use gridlease::network::{compute_ptdf, line_flows, Network};
use gridlease::Error;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bus, line};

fn network(n: u32, lines: Vec<gridlease::network::Line>, reference: u32) -> Network {
    Network {
        buses: (1..=n).map(|i| bus(i, BusKind::Transit)).collect(),
        lines,
        reference_bus: reference,
    }
}

/// Flows from bus angles: solve the reduced `B θ = y` with the reference
/// angle fixed at zero.
fn nodal_flows(net: &Network, y: &[f64]) -> Vec<f64> {
    let n = net.buses.len();
    let r = net.bus_index(net.reference_bus).unwrap();
    let mut b = DMatrix::zeros(n, n);
    for l in &net.lines {
        let (i, j) = (net.bus_index(l.from).unwrap(), net.bus_index(l.to).unwrap());
        let s = 1.0 / l.reactance;
        b[(i, i)] += s;
        b[(j, j)] += s;
        b[(i, j)] -= s;
        b[(j, i)] -= s;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| i != r).collect();
    let red = DMatrix::from_fn(n - 1, n - 1, |a, c| b[(keep[a], keep[c])]);
    let rhs = DVector::from_iterator(n - 1, keep.iter().map(|&i| y[i]));
    let th_red = red.lu().solve(&rhs).expect("connected network");
    let mut theta = vec![0.0; n];
    for (a, &i) in keep.iter().enumerate() {
        theta[i] = th_red[a];
    }
    net.lines
        .iter()
        .map(|l| {
            let (i, j) = (net.bus_index(l.from).unwrap(), net.bus_index(l.to).unwrap());
            (theta[i] - theta[j]) / l.reactance
        })
        .collect()
}

#[test]
fn ring_flows_match_nodal_solve() {
    let net = network(3, vec![line(1, 2, 0.1, 100.0), line(2, 3, 0.1, 100.0), line(1, 3, 0.1, 100.0)], 1);
    let ptdf = compute_ptdf(&net).unwrap();
    let y = [0.0, 30.0, -30.0];
    let flows = line_flows(&ptdf, &y, 0).unwrap();
    let oracle = nodal_flows(&net, &y);
    for (f, o) in flows.iter().zip(&oracle) {
        assert_abs_diff_eq!(f, o, epsilon = 1e-12);
    }
    // two thirds of the transfer takes the direct line
    assert_abs_diff_eq!(flows[1], 20.0, epsilon = 1e-12);
}

#[test]
fn two_bus_transfer() {
    let net = network(2, vec![line(1, 2, 0.2, 50.0)], 1);
    let ptdf = compute_ptdf(&net).unwrap();
    assert_abs_diff_eq!(ptdf.get(0, 1), -1.0, epsilon = 1e-14);
    let flows = line_flows(&ptdf, &[10.0, -10.0], 0).unwrap();
    assert_abs_diff_eq!(flows[0], 10.0, epsilon = 1e-12);
    assert!(matches!(line_flows(&ptdf, &[10.0, 0.0], 3), Err(Error::Unbalanced { period: 3, .. })));
}

#[test]
fn random_networks_match_nodal_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let n = rng.gen_range(2..=30u32);
        let mut lines = Vec::new();
        for i in 2..=n {
            lines.push(line(rng.gen_range(1..i), i, rng.gen_range(0.01..0.5), 100.0));
        }
        for _ in 0..rng.gen_range(0..n) {
            let (a, b) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            if a != b {
                let mut l = line(a, b, rng.gen_range(0.01..0.5), 100.0);
                l.id = format!("x{}", lines.len());
                lines.push(l);
            }
        }
        let reference = rng.gen_range(1..=n);
        let net = network(n, lines, reference);
        let ptdf = compute_ptdf(&net).unwrap();

        let r = net.bus_index(reference).unwrap();
        for k in 0..ptdf.n_lines() {
            assert_eq!(ptdf.get(k, r), 0.0);
            assert!(ptdf.row(k).iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }

        let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let s: f64 = y.iter().sum();
        y[0] -= s;
        let flows = line_flows(&ptdf, &y, 0).unwrap();
        let oracle = nodal_flows(&net, &y);
        let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (f, o) in flows.iter().zip(&oracle) {
            assert!((f - o).abs() <= 1e-9 * scale, "{f} vs {o}");
        }
    }
}

#[test]
fn islands_are_rejected() {
    let net = network(3, vec![line(1, 2, 0.1, 10.0)], 1);
    assert!(matches!(compute_ptdf(&net), Err(Error::Topology { bus: 3 })));
}
