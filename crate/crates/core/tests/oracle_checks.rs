//! Symbolic code checked against dense matrices.

use std::path::PathBuf;

use cncsim::dynamics::{clifford_from_gates, gamma_times_s_point, omega_times_a, Gate};
use cncsim::oracle::{
    golden_suite, named_state, pauli_matrix, phase_point_matrix, projector, read_golden, signed_pauli_matrix,
    wrep_matrix, DenseOperator,
};
use cncsim::pauli::beta;
use cncsim::phase_space::{enumerate_catalog, make_cnc};
use cncsim::simulator::{born_probability, hvm_distribution, propagate_wrep, product_wrep};
use cncsim::{CncSet, PauliLabel, PhasePoint, SignedPauli};
use num_complex::Complex64;

const TOL: f64 = 1e-12;

fn l(s: &str) -> PauliLabel {
    s.parse().unwrap()
}

#[test]
fn beta_matches_matrix_products() {
    for n in 1..=3 {
        let labels: Vec<PauliLabel> = PauliLabel::all(n).collect();
        for a in &labels {
            let ta = pauli_matrix(a).unwrap();
            for b in labels.iter().filter(|b| !a.anticommutes(b)) {
                let lhs = ta.mul(&pauli_matrix(b).unwrap());
                let sign = if beta(a, b).unwrap() == 1 { -1.0 } else { 1.0 };
                let rhs = pauli_matrix(&(*a ^ *b)).unwrap().scale(sign);
                assert!(lhs.max_abs_diff(&rhs) < TOL, "T_{a} T_{b}");
            }
        }
    }
}

#[test]
fn labels_are_hermitian_involutions() {
    for a in PauliLabel::all(2) {
        let t = pauli_matrix(&a).unwrap();
        assert!(t.is_hermitian(TOL));
        assert!(t.mul(&t).max_abs_diff(&DenseOperator::identity(2).unwrap()) < TOL);
    }
}

#[test]
fn phase_points_have_unit_trace_and_dual_values() {
    for (n, m) in [(1, vec![0, 1]), (2, vec![0, 1, 2])] {
        let cat = enumerate_catalog(n, &m, false).unwrap();
        for p in cat.points() {
            let a = phase_point_matrix(p).unwrap();
            assert!(a.is_hermitian(TOL));
            assert!((a.trace() - Complex64::new(1.0, 0.0)).norm() < TOL);
            for b in PauliLabel::all(n) {
                let tr = a.mul(&pauli_matrix(&b).unwrap()).trace();
                assert!((tr.re - p.dual_value(&b) as f64).abs() < TOL && tr.im.abs() < TOL, "{p} on {b}");
            }
        }
    }
}

#[test]
fn isotropic_points_are_stabilizer_projectors() {
    let cat = enumerate_catalog(2, &[0], false).unwrap();
    for p in cat.points().iter().filter(|p| p.omega.isotropic_gens().len() == 2) {
        let a = phase_point_matrix(p).unwrap();
        assert!(a.mul(&a).max_abs_diff(&a) < TOL, "{p} is not a rank-one projector");
    }
}

#[test]
fn stabilizer_mix_reproduces_the_operator() {
    let cat = enumerate_catalog(2, &[1, 2], false).unwrap();
    for p in cat.points().iter().step_by(7) {
        let mut sum = DenseOperator::zeros(2).unwrap();
        for (q, c) in p.stabilizer_mix() {
            assert!(q.omega.is_isotropic());
            sum = sum.add(&phase_point_matrix(&q).unwrap().scale(c));
        }
        assert!(sum.max_abs_diff(&phase_point_matrix(p).unwrap()) < TOL, "{p}");
    }
}

#[test]
fn lifting_to_maximal_sets_averages_to_the_point() {
    let full = enumerate_catalog(2, &[0, 1, 2], false).unwrap();
    let maximal = enumerate_catalog(2, &[1, 2], false).unwrap();
    for p in full.points().iter().filter(|p| p.omega.is_isotropic()).step_by(3) {
        let lifts = maximal.lift_to_maximal(p).unwrap();
        assert!(!lifts.is_empty());
        let mut avg = DenseOperator::zeros(2).unwrap();
        for q in &lifts {
            avg = avg.add(&phase_point_matrix(q).unwrap().scale(1.0 / lifts.len() as f64));
        }
        assert!(avg.max_abs_diff(&phase_point_matrix(p).unwrap()) < TOL, "{p}");
    }
}

#[test]
fn omega_times_a_outside_the_set() {
    // Mermin-type set on two qubits; XI anticommutes with ZI and commutes with XX.
    let omega = make_cnc(2, &[l("ZZ")], &[l("ZI"), l("XX")]).unwrap();
    let a = l("XI");
    let next = omega_times_a(&omega, &a).unwrap();
    assert!(next.contains_label(&a));
    for b in next.elements() {
        assert!(b.is_identity() || next.contains_label(&b));
    }
    let p = PhasePoint::from_values(2, &[(l("ZZ"), 0)], &[(l("ZI"), 1), (l("XX"), 0)]).unwrap();
    for s in 0..2 {
        let q = gamma_times_s_point(&p, &a, s).unwrap();
        assert_eq!(q.try_gamma(&a), Some(s));
        // a ∉ Ω, so either outcome has weight ½.
        let lhs = phase_point_matrix(&p).unwrap().project(&a, s).unwrap();
        assert!((lhs.trace().re - 0.5).abs() < TOL);
    }
    assert!(gamma_times_s_point(&p, &l("ZZ"), 0).is_err());
}

#[test]
fn hvm_distribution_matches_born_rule_on_contexts() {
    let cat = enumerate_catalog(2, &[1, 2], false).unwrap();
    let context = CncSet::isotropic(2, &[l("XX"), l("ZZ")]).unwrap();
    for p in cat.points().iter().step_by(5) {
        let h = hvm_distribution(p, &context).unwrap();
        let total: f64 = h.values().sum();
        assert!((total - 1.0).abs() < TOL, "{p}: total {total}");
        // Marginals on each context element agree with Tr(A P_b(s)).
        for b in [l("XX"), l("ZZ"), l("YY")] {
            let a = phase_point_matrix(p).unwrap();
            for s in 0..2u8 {
                let dense = a.mul(&projector(&b, s).unwrap()).trace().re;
                let model: f64 = h.iter().filter(|(q, _)| q.try_gamma(&b) == Some(s)).map(|(_, w)| w).sum();
                assert!((dense - model).abs() < TOL, "{p}, {b}={s}: {dense} vs {model}");
            }
        }
    }
}

#[test]
fn born_and_propagate_match_dense_measurement() {
    let w = product_wrep(&[[0.3, -0.2, 0.4], [0.1, 0.2, -0.5]], None).unwrap();
    let rho = wrep_matrix(&w).unwrap();
    rho.check_state(1e-12).unwrap();
    for a in PauliLabel::all(2).filter(|a| !a.is_identity()) {
        for s in 0..2u8 {
            let post = rho.project(&a, s).unwrap();
            let p = post.trace().re;
            assert!((born_probability(&w, &a, s) - p).abs() < TOL);
            if p > 1e-9 {
                let (q, next) = propagate_wrep(&w, &a, s).unwrap();
                assert!((q - p).abs() < TOL);
                assert!(wrep_matrix(&next).unwrap().max_abs_diff(&post.scale(1.0 / p)) < 1e-10, "{a}={s}");
            }
        }
    }
}

#[test]
fn tableau_signs_match_unitary_conjugation() {
    let gates = vec![Gate::H(0), Gate::S(1), Gate::CX(0, 2), Gate::Y(1), Gate::CZ(1, 2), Gate::Swap(0, 1), Gate::S(2)];
    let h = clifford_from_gates(3, &gates).unwrap();
    let u = cncsim::oracle::circuit_unitary(3, &gates).unwrap();
    for a in PauliLabel::all(3) {
        let img: SignedPauli = h.conjugate(&a);
        let lhs = pauli_matrix(&a).unwrap().conjugate_by(&u);
        assert!(lhs.max_abs_diff(&signed_pauli_matrix(&img).unwrap()) < TOL, "{a} -> {img}");
    }
}

#[test]
fn named_states_are_states() {
    for name in ["H", "T", "H^2", "T^3", "hoggar", "mixed(n=2)", "zero", "rho(x=0.1,y=-0.05)", "bloch(0.1,0.2,0.3)", "stab:+XX,-ZZ"] {
        named_state(name).unwrap().check_state(1e-10).unwrap();
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn goldens_are_reproduced() {
    for g in golden_suite().unwrap() {
        let frozen = read_golden(&golden_dir().join(format!("{}.json", g.name))).unwrap();
        assert_eq!(frozen.n, g.n, "{}", g.name);
        let diff = frozen.to_operator().unwrap().max_abs_diff(&g.to_operator().unwrap());
        assert!(diff < 1e-14, "{} drifted by {diff:e}", g.name);
    }
}

#[test]
fn goldens_agree_with_hand_entries() {
    let y = read_golden(&golden_dir().join("pauli_Y.json")).unwrap().to_operator().unwrap();
    let want = [[0.0, 0.0], [0.0, -1.0], [0.0, 1.0], [0.0, 0.0]];
    for (i, [re, im]) in want.iter().enumerate() {
        let z = y.matrix()[(i / 2, i % 2)];
        assert!((z.re - re).abs() < TOL && (z.im - im).abs() < TOL);
    }
    // A = (I + X + Y + Z)/2 for γ = 0 on {0, x, y, z}.
    let a = read_golden(&golden_dir().join("phase_point_eight_state_000.json")).unwrap().to_operator().unwrap();
    let m = a.matrix();
    assert!((m[(0, 0)].re - 1.0).abs() < TOL && m[(1, 1)].re.abs() < TOL);
    assert!((m[(0, 1)] - Complex64::new(0.5, -0.5)).norm() < TOL);
    let cx = read_golden(&golden_dir().join("gate_CX_1_2.json")).unwrap().to_operator().unwrap();
    // Qubit 1 is the control; basis order |q1 q2⟩, so |10⟩ ↔ |11⟩.
    assert!((cx.matrix()[(2, 3)].re - 1.0).abs() < TOL && (cx.matrix()[(3, 3)].re).abs() < TOL);
}
