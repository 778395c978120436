use num_complex::Complex64;

use super::*;
use crate::detuning::{engineer_detunings, DetuningProfile, ProfileFamily};
use crate::graph::{fixtures, Graph};
use crate::mis::enumerate_independent_sets;

const OMEGA: f64 = 1.0;
const DELTA0: f64 = 4.0;
const C6: f64 = 8.0 * std::f64::consts::PI;

fn single_site() -> Graph {
    Graph::from_edge_list(1, &[], Some(vec![(0.0, 0.0)])).unwrap()
}

fn model_of(g: &Graph) -> HamiltonianModel {
    HamiltonianModel::new(g.clone(), C6).unwrap()
}

fn ld_schedule(g: &Graph, t_f: f64) -> PulseSchedule {
    let profile = engineer_detunings(g, &ProfileFamily::Linear, DELTA0, 0.99).unwrap();
    PulseSchedule::local_degree(t_f, OMEGA, OmegaShape::SineSquared, profile)
}

fn trad_schedule(g: &Graph, t_f: f64) -> PulseSchedule {
    PulseSchedule::traditional(t_f, OMEGA, OmegaShape::SineSquared, g.n(), DELTA0)
}

/// Dense RK4 reference propagation, independent of the production integrator.
fn reference_evolve(model: &HamiltonianModel, schedule: &PulseSchedule, steps: usize) -> Vec<Complex64> {
    let tables = BasisTables::new(model, &schedule.profile.factors, 20).unwrap();
    let dim = tables.dim();
    let dt = schedule.t_f / steps as f64;
    let mut psi = vec![Complex64::ZERO; dim];
    psi[0] = Complex64::ONE;
    let rhs = |t: f64, y: &[Complex64], out: &mut Vec<Complex64>| {
        tables.apply(schedule.omega(t), schedule.delta_scale(t), 1.0, y, out);
        for a in out.iter_mut() {
            *a *= -Complex64::i();
        }
    };
    let mut k1 = vec![Complex64::ZERO; dim];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    for step in 0..steps {
        let t = step as f64 * dt;
        rhs(t, &psi, &mut k1);
        for i in 0..dim {
            tmp[i] = psi[i] + k1[i] * (0.5 * dt);
        }
        rhs(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = psi[i] + k2[i] * (0.5 * dt);
        }
        rhs(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = psi[i] + k3[i] * dt;
        }
        rhs(t + dt, &tmp, &mut k4);
        for i in 0..dim {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    psi
}

#[test]
fn single_qubit_final_time_assembly() {
    let g = single_site();
    let model = model_of(&g);
    let schedule = trad_schedule(&g, 10.0);
    let h = assemble_hamiltonian(&model, &schedule, 10.0).unwrap();
    // Omega vanishes at t_f; Delta(t_f) = delta0/2.
    assert!(h[(0, 0)].abs() < 1e-12);
    assert!((h[(1, 1)] + DELTA0 / 2.0).abs() < 1e-12);
    assert!(h[(0, 1)].abs() < 1e-12);
}

#[test]
fn two_qubit_midpoint_assembly() {
    let g = Graph::from_edge_list(2, &[(0, 1)], Some(vec![(0.0, 0.0), (1.0, 0.0)])).unwrap();
    let model = model_of(&g);
    let schedule = trad_schedule(&g, 8.0);
    let h = assemble_hamiltonian(&model, &schedule, 4.0).unwrap();
    let omega_mid = schedule.omega(4.0);
    assert!((omega_mid - OMEGA).abs() < 1e-12);
    // Detunings vanish at the midpoint; only the drive and the interaction remain.
    for s in 0..3 {
        assert!(h[(s, s)].abs() < 1e-12, "state {s}");
    }
    assert!((h[(3, 3)] - C6).abs() < 1e-12);
    for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        assert!((h[(a, b)] - omega_mid).abs() < 1e-12);
    }
    assert!(h[(0, 3)].abs() < 1e-12);
    assert!(h[(1, 2)].abs() < 1e-12);
}

#[test]
fn assembled_operator_is_symmetric() {
    let g = Graph::kings(3, 2, 0.2, 5).unwrap();
    let model = model_of(&g);
    let schedule = ld_schedule(&g, 12.0);
    for t in [0.0, 3.3, 6.0, 11.7] {
        let h = assemble_hamiltonian(&model, &schedule, t).unwrap();
        assert_eq!(h, h.transpose());
    }
}

#[test]
fn p3_band_energies_match_final_diagonal() {
    let g = fixtures::path(3);
    let model = model_of(&g);
    let schedule = ld_schedule(&g, 10.0);
    let catalog = enumerate_independent_sets(&g, 20).unwrap();
    let spectrum = final_band_spectrum(&catalog, &schedule.profile);
    let h = assemble_hamiltonian(&model, &schedule, 10.0).unwrap();
    for band in &spectrum.bands {
        for &(mask, energy) in band {
            assert!(
                (h[(mask as usize, mask as usize)] - energy).abs() < 1e-12,
                "state {mask}"
            );
        }
    }
}

#[test]
fn rapid_adiabatic_passage_excites_single_qubit() {
    let g = single_site();
    let model = model_of(&g);
    let t_f = 20.0 * std::f64::consts::PI;
    let schedule = trad_schedule(&g, t_f);
    let result = evolve(&model, &schedule, &IntegratorConfig::default()).unwrap();
    let p_excited = result.state.probability(1);
    assert!(p_excited > 0.99, "P(excited) = {p_excited}");
    assert!(result.norm_drift <= 1e-6);

    let reference = reference_evolve(&model, &schedule, 100_000);
    let p_ref = reference[1].norm_sqr();
    assert!(
        (p_excited - p_ref).abs() < 1e-6,
        "{p_excited} vs reference {p_ref}"
    );
}

#[test]
fn zero_drive_keeps_initial_state() {
    let g = fixtures::path(3);
    let model = model_of(&g);
    let schedule = PulseSchedule::traditional(10.0, 0.0, OmegaShape::SineSquared, 3, DELTA0);
    let result = evolve(&model, &schedule, &IntegratorConfig::default()).unwrap();
    assert!((result.state.probability(0) - 1.0).abs() < 1e-12);
}

#[test]
fn p3_reaches_mis_adiabatically() {
    let g = fixtures::path(3);
    let model = model_of(&g);
    let schedule = ld_schedule(&g, 20.0 * std::f64::consts::PI);
    let result = evolve(&model, &schedule, &IntegratorConfig::default()).unwrap();
    let p_mis = result.state.probability(0b101);
    assert!(p_mis > 0.99, "P_MIS = {p_mis}");
}

#[test]
fn homogeneous_profile_equals_traditional_bitwise() {
    let g = Graph::kings(2, 3, 0.0, 0).unwrap();
    let model = model_of(&g);
    let t_f = 8.0 * std::f64::consts::PI;
    let trad = trad_schedule(&g, t_f);
    let ld = PulseSchedule::local_degree(
        t_f,
        OMEGA,
        OmegaShape::SineSquared,
        DetuningProfile::homogeneous(g.n(), DELTA0),
    );
    let a = evolve(&model, &trad, &IntegratorConfig::default()).unwrap();
    let b = evolve(&model, &ld, &IntegratorConfig::default()).unwrap();
    assert_eq!(a.state.amplitudes(), b.state.amplitudes());
}

#[test]
fn blockade_violations_stay_suppressed() {
    for seed in [3, 11] {
        let g = Graph::kings(3, 3, 0.2, seed).unwrap();
        let model = model_of(&g);
        let schedule = ld_schedule(&g, 20.0 * std::f64::consts::PI);
        let result = evolve(&model, &schedule, &IntegratorConfig::default()).unwrap();
        let adj = g.adjacency_masks().unwrap();
        let mut violating = 0.0;
        for (s, amp) in result.state.amplitudes().iter().enumerate() {
            let mask = s as u64;
            let independent = (0..g.n())
                .all(|v| mask & (1 << v) == 0 || adj[v] & mask == 0);
            if !independent {
                violating += amp.norm_sqr();
            }
        }
        assert!(violating <= 0.05, "seed {seed}: violating population {violating}");
    }
}

#[test]
fn step_halving_is_converged() {
    let g = fixtures::path(3);
    let model = model_of(&g);
    let schedule = ld_schedule(&g, 10.0 * std::f64::consts::PI);
    let config = IntegratorConfig::default();
    let coarse = evolve(&model, &schedule, &config).unwrap();
    let fine = evolve(
        &model,
        &schedule,
        &IntegratorConfig {
            steps: Some(coarse.steps * 2),
            ..config
        },
    )
    .unwrap();
    let dp = (coarse.state.probability(0b101) - fine.state.probability(0b101)).abs();
    assert!(dp < 1e-8, "step-halving changed P_MIS by {dp}");
}

#[test]
fn integrator_is_fourth_order() {
    // Deliberately fast sweep so the time-dependence error is visible.
    let g = fixtures::path(3);
    let model = model_of(&g);
    let schedule = ld_schedule(&g, 2.0);
    let reference = reference_evolve(&model, &schedule, 400_000);
    let error_at = |steps: usize| -> f64 {
        let result = evolve(
            &model,
            &schedule,
            &IntegratorConfig {
                steps: Some(steps),
                ..IntegratorConfig::default()
            },
        )
        .unwrap();
        result
            .state
            .amplitudes()
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let e8 = error_at(8);
    let e16 = error_at(16);
    let e32 = error_at(32);
    assert!(e16 < e8 / 8.0, "e8 = {e8}, e16 = {e16}");
    assert!(e32 < e16 / 8.0, "e16 = {e16}, e32 = {e32}");
}

#[test]
fn agrees_with_reference_on_a_kings_graph() {
    let g = Graph::kings(2, 3, 0.2, 7).unwrap();
    let model = model_of(&g);
    let schedule = ld_schedule(&g, 4.0 * std::f64::consts::PI);
    let result = evolve(&model, &schedule, &IntegratorConfig::default()).unwrap();
    let reference = reference_evolve(&model, &schedule, 300_000);
    let err: f64 = result
        .state
        .amplitudes()
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(err < 1e-7, "l2 deviation {err}");
}

#[test]
fn minimal_gap_matches_two_level_closed_form() {
    let g = single_site();
    let model = model_of(&g);
    let t_f = 20.0;
    let schedule = trad_schedule(&g, t_f);
    let analytic = (0..=200_000)
        .map(|i| {
            let t = t_f * i as f64 / 200_000.0;
            let omega = schedule.omega(t);
            let delta = schedule.delta_scale(t);
            (4.0 * omega * omega + delta * delta).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    let gap = minimal_gap(&model, &schedule, &GapConfig::new(1)).unwrap();
    assert!(
        (gap.delta_min - analytic).abs() < 1e-5,
        "{} vs analytic {analytic}",
        gap.delta_min
    );
    assert!(!gap.degenerate);
}

#[test]
fn diagonal_sweep_hits_exact_degeneracy() {
    // No drive, no edges: H(t_f/2) = 0 exactly, so the bare gap closes.
    let g = Graph::from_edge_list(2, &[], Some(vec![(0.0, 0.0), (5.0, 0.0)])).unwrap();
    let model = model_of(&g);
    let mut profile = DetuningProfile::homogeneous(2, DELTA0);
    profile.factors = vec![1.0, 0.5];
    let schedule = PulseSchedule {
        t_f: 10.0,
        omega_max: 0.0,
        shape: OmegaShape::SineSquared,
        protocol: Protocol::LocalDegree,
        profile,
    };
    let gap = minimal_gap(&model, &schedule, &GapConfig::new(1)).unwrap();
    assert!(gap.degenerate);
    assert_eq!(gap.first_excited_min, 0.0);
    assert!(gap.delta_min < 1e-9);
}

#[test]
fn band_separation_follows_energy_condition() {
    for seed in 0..10 {
        let g = Graph::kings(3, 3, 0.3, seed).unwrap();
        let catalog = enumerate_independent_sets(&g, 20).unwrap();
        let profile = engineer_detunings(&g, &ProfileFamily::Linear, DELTA0, 0.99).unwrap();
        let spectrum = final_band_spectrum(&catalog, &profile);
        assert!(spectrum.band_separated, "seed {seed}");
        assert!(spectrum.min_band_separation > 0.0);
    }
}

#[test]
fn homogeneous_bands_are_degenerate() {
    let g = Graph::kings(3, 3, 0.25, 2).unwrap();
    let catalog = enumerate_independent_sets(&g, 20).unwrap();
    let profile = DetuningProfile::homogeneous(g.n(), DELTA0);
    let spectrum = final_band_spectrum(&catalog, &profile);
    for (k, band) in spectrum.bands.iter().enumerate() {
        for &(_, e) in band {
            assert!((e - -(DELTA0 / 2.0) * k as f64).abs() < 1e-12);
        }
    }
    assert!(spectrum.band_separated);
}

#[test]
fn trap_states_get_raised() {
    // P5 has three connected and three disconnected near-MIS sets; the local
    // profile must push the disconnected ones up on average.
    let g = fixtures::path(5);
    let catalog = enumerate_independent_sets(&g, 20).unwrap();
    let profile = engineer_detunings(&g, &ProfileFamily::Linear, DELTA0, 0.99).unwrap();
    let spectrum = final_band_spectrum(&catalog, &profile);
    let energies = spectrum.near_mis_energies();
    let (mut conn_sum, mut conn_n, mut disc_sum, mut disc_n) = (0.0, 0, 0.0, 0);
    for (e, &connected) in energies.iter().zip(&spectrum.connected) {
        if connected {
            conn_sum += e;
            conn_n += 1;
        } else {
            disc_sum += e;
            disc_n += 1;
        }
    }
    assert_eq!((conn_n, disc_n), (3, 3));
    assert!(disc_sum / disc_n as f64 > conn_sum / conn_n as f64);
}

#[test]
fn caps_are_enforced() {
    let g = Graph::kings(4, 4, 0.0, 0).unwrap();
    let model = model_of(&g);
    let schedule = trad_schedule(&g, 10.0);
    assert!(assemble_hamiltonian(&model, &schedule, 0.0).is_err());
    let config = IntegratorConfig {
        simulation_cap: 10,
        ..IntegratorConfig::default()
    };
    assert!(evolve(&model, &schedule, &config).is_err());
}

#[test]
fn positions_are_required() {
    let g = fixtures::complete(3);
    assert!(matches!(
        HamiltonianModel::new(g, C6),
        Err(crate::Error::MissingPositions)
    ));
}
