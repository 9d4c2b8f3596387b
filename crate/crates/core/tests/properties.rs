use std::sync::OnceLock;

use cncsim::dynamics::{clifford_act, clifford_from_gates, measure_update, Gate};
use cncsim::pauli::{beta, symplectic};
use cncsim::phase_space::{enumerate_catalog, Catalog};
use cncsim::simulator::{product_wrep, sample_trajectory, shot_seed, WRep};
use cncsim::{MeasurementProgram, PauliLabel, PhasePoint};
use proptest::prelude::*;

fn catalog3() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| enumerate_catalog(3, &[0, 1, 2, 3], false).unwrap())
}

fn label(n: usize) -> impl Strategy<Value = PauliLabel> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>()).prop_map(move |(x, z)| PauliLabel::new(n, x & mask, z & mask).unwrap())
}

fn gate(n: usize) -> impl Strategy<Value = Gate> {
    (0..8u8, 0..n, 0..n).prop_filter_map("two distinct qubits", move |(k, q, r)| {
        let two = q != r;
        Some(match k {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::X(q),
            3 => Gate::Y(q),
            4 => Gate::Z(q),
            5 if two => Gate::CX(q, r),
            6 if two => Gate::CZ(q, r),
            7 if two => Gate::Swap(q, r),
            _ => return None,
        })
    })
}

proptest! {
    #[test]
    fn label_text_roundtrip(a in (1usize..=12).prop_flat_map(label)) {
        let back: PauliLabel = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
        prop_assert_eq!(PauliLabel::from_index(a.n(), a.index()), a);
    }

    #[test]
    fn beta_symmetric_and_shift_invariant(
        (a, b) in (1usize..=8).prop_flat_map(|n| (label(n), label(n)))
    ) {
        prop_assume!(symplectic(&a, &b).unwrap() == 0);
        prop_assert_eq!(beta(&a, &b).unwrap(), beta(&b, &a).unwrap());
        prop_assert_eq!(beta(&a, &b).unwrap(), beta(&a, &(a ^ b)).unwrap());
        prop_assert_eq!(beta(&a, &a).unwrap(), 0);
    }

    #[test]
    fn cliffords_stay_symplectic_and_preserve_commutation(
        (gates, a, b) in (1usize..=6).prop_flat_map(|n| (prop::collection::vec(gate(n), 0..30), label(n), label(n)))
    ) {
        let n = a.n();
        let h = clifford_from_gates(n, &gates).unwrap();
        prop_assert!(h.is_symplectic());
        prop_assert_eq!(h.conjugate(&a).label.anticommutes(&h.conjugate(&b).label), a.anticommutes(&b));
    }

    #[test]
    fn clifford_action_keeps_points_in_the_catalog(
        idx in 0usize..71136, gates in prop::collection::vec(gate(3), 0..20)
    ) {
        let cat = catalog3();
        let p = &cat.points()[idx % cat.len()];
        let q = clifford_act(&clifford_from_gates(3, &gates).unwrap(), p).unwrap();
        prop_assert_eq!(q.omega.m(), p.omega.m());
        prop_assert_eq!(q.omega.xi(), p.omega.xi());
        prop_assert!(cat.position(&q).is_some(), "{} not in catalog", q);
    }

    #[test]
    fn measurement_branches_are_normalized(idx in 0usize..71136, a in label(3)) {
        prop_assume!(!a.is_identity());
        let p = &catalog3().points()[idx % catalog3().len()];
        let b0 = measure_update(p, &a, 0).unwrap();
        let b1 = measure_update(p, &a, 1).unwrap();
        prop_assert!((b0.probability + b1.probability - 1.0).abs() < 1e-12);
        for (s, br) in [(0u8, &b0), (1, &b1)] {
            if br.probability > 0.0 {
                let total: f64 = br.successors.iter().map(|(_, w)| w).sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                for (q, _) in &br.successors {
                    prop_assert_eq!(q.try_gamma(&a), Some(s));
                }
            }
        }
    }

    #[test]
    fn wrep_record_roundtrip(r in prop::array::uniform3(-0.5f64..0.5), s in prop::array::uniform3(-0.3f64..0.3)) {
        let w = product_wrep(&[r, s], None).unwrap();
        let back = WRep::from_record(&w.to_record()).unwrap();
        prop_assert_eq!(back.entries(), w.entries());
        prop_assert!((w.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_record_roundtrip(idx in 0usize..71136) {
        let p = &catalog3().points()[idx % catalog3().len()];
        prop_assert_eq!(&PhasePoint::from_record(3, &p.to_record()).unwrap(), p);
    }

    #[test]
    fn trajectories_are_seed_deterministic(seed in any::<u64>()) {
        let w = product_wrep(&[[0.5, 0.5, 0.5], [0.2, 0.0, 0.3]], None).unwrap();
        let prog = MeasurementProgram::fixed(&["XX", "ZI", "-YZ", "IX"]).unwrap();
        let a = sample_trajectory(&w, &prog, seed).unwrap();
        let b = sample_trajectory(&w, &prog, seed).unwrap();
        prop_assert_eq!(a.outcomes, b.outcomes);
        prop_assert_ne!(shot_seed(seed, 0), shot_seed(seed, 1));
    }
}

#[test]
fn catalog_cache_roundtrip() {
    let cat = enumerate_catalog(2, &[0, 1, 2], true).unwrap();
    let mut buf = Vec::new();
    cat.write_cache(&mut buf).unwrap();
    let back = Catalog::read_cache(buf.as_slice()).unwrap();
    assert_eq!(back.points(), cat.points());
    assert_eq!(back.count_row(), cat.count_row());
}

#[test]
fn n3_catalog_regression_counts() {
    assert_eq!(enumerate_catalog(3, &[0], false).unwrap().count_row().points, 1080);
    assert_eq!(enumerate_catalog(3, &[0], false).unwrap().count_row().sets, 135);
    let full = enumerate_catalog(3, &[1, 2, 3], false).unwrap().count_row();
    assert_eq!((full.sets, full.points), (981, 71136));
}
