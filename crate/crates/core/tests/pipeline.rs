//! End-to-end checks through the public API only.

use qca_core::analysis::{verify_weyl_dispersion, weyl_dispersion};
use qca_core::automaton::{full_report, CONSTRAINT_TOL};
use qca_core::derivation::{all_solutions, classify_equivalence, default_probes};
use qca_core::dirac::build_dirac;
use qca_core::dynamics::{evolve_direct, evolve_momentum};
use qca_core::lattice::uniform_grid;
use qca_core::smallmat::c;
use qca_core::{ConstraintReport, Family, FieldState, IntVec3, PeriodicLattice, Sign, WaveVector, WeylSolution};

#[test]
fn every_automaton_satisfies_every_constraint() {
    for sol in all_solutions() {
        let report = full_report(&sol.transition_set(), CONSTRAINT_TOL);
        assert!(report.pass(), "{} fails: {:?}", sol.label(), report.max_residual());
    }
}

#[test]
fn each_automaton_follows_its_own_branch() {
    let grid = uniform_grid(7);
    for sol in all_solutions() {
        let r = verify_weyl_dispersion(&sol.transition_set(), sol.alpha_branch, &grid).unwrap();
        assert!(r.max_err < 1e-12, "{}", sol.label());
    }
}

#[test]
fn classes_split_by_alpha_branch() {
    let all = all_solutions();
    let sets: Vec<_> = all.iter().map(|s| s.transition_set()).collect();
    let classes = classify_equivalence(&sets, &default_probes()).unwrap();
    assert_eq!(classes.classes.len(), 2);
    assert!(classes.exchanged_by_adjoint_reflection);
    for cl in &classes.classes {
        let branch = all[cl.members[0]].alpha_branch;
        assert!(cl.members.iter().all(|&i| all[i].alpha_branch == branch));
    }
}

#[test]
fn report_serialises_as_entry_array() {
    let report = full_report(&WeylSolution::new(Family::Two, Sign::Plus, Sign::Minus).transition_set(), 1e-12);
    let json = serde_json::to_value(&report).unwrap();
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), report.entries.len());
    assert_eq!(arr[0]["constraint"], "C0");
    let back: ConstraintReport = serde_json::from_value(json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn family_and_sign_serialise_compactly() {
    assert_eq!(serde_json::to_string(&Family::Three).unwrap(), "3");
    assert_eq!(serde_json::to_string(&Sign::Minus).unwrap(), "\"-\"");
    assert!(serde_json::from_str::<Family>("0").is_err());
}

#[test]
fn plane_wave_picks_up_the_momentum_operator() {
    // ψ(x) = e^{ik·x}χ on a grid momentum evolves to e^{ik·x}A(k)χ.
    let lat = PeriodicLattice::new(8).unwrap();
    let ts = qca_core::derivation::canonical_solution().transition_set();
    let idx = lat.index(1, 7, 2);
    let k = lat.grid_momentum(idx);
    let chi = [c(0.6, 0.0), c(0.0, 0.8)];
    let mut s = FieldState::zeros(lat, 2);
    for i in 0..lat.num_sites() {
        let [x, y, z] = lat.coords(i);
        let phase = qca_core::C64::from_polar(1.0, IntVec3::new(x as i64, y as i64, z as i64).phase(&k));
        s.site_mut(i).copy_from_slice(&[chi[0] * phase, chi[1] * phase]);
    }
    let a = ts.momentum_operator(&k);
    let out = evolve_direct(&s, &ts).unwrap();
    for i in 0..lat.num_sites() {
        let [x, y, z] = lat.coords(i);
        let phase = qca_core::C64::from_polar(1.0, IntVec3::new(x as i64, y as i64, z as i64).phase(&k));
        let want0 = (a[(0, 0)] * chi[0] + a[(0, 1)] * chi[1]) * phase;
        let want1 = (a[(1, 0)] * chi[0] + a[(1, 1)] * chi[1]) * phase;
        assert!((out.site(i)[0] - want0).norm() < 1e-13 && (out.site(i)[1] - want1).norm() < 1e-13);
    }
    assert!(evolve_momentum(&s, &ts, 1).unwrap().max_deviation(&out) < 1e-12);
}

#[test]
fn dirac_spectrum_reduces_to_weyl_at_unit_coupling() {
    let d = build_dirac(1.0, Sign::Plus, qca_core::derivation::canonical_solution()).unwrap();
    let k = WaveVector::new(0.7, -0.2, 1.3);
    let w = weyl_dispersion(&k, Sign::Plus).0;
    let got = qca_core::dirac::dirac_closed_spectrum(&k, 1.0, Sign::Plus).unwrap();
    assert!((w - got).abs() < 1e-15);
    assert_eq!(d.mass(), 0.0);
}
