use sideinfo_core::measures::{
    concurrence, eoa_asymptotic, eoa_single, eof, flag_extension, flag_splitting, puffed_lower,
    puffed_superadditivity_gap, puffed_superadditivity_witness, squashed_upper, squashed_upper_seeded,
    squashed_upper_with_formation,
    wootters_eof, SeparablePart, FLAG_LABEL,
};
use sideinfo_core::mcs::eof_via_mcs;
use sideinfo_core::qstate::{
    conditional_mutual_information, haar_unitary, random_density_on, state_family, tensor_product, BellKind,
};
use sideinfo_core::redistribution::{cost_pair, split_purification};
use sideinfo_core::{
    Bound, Certificate, DensityOperator, Error, OptimizerConfig, SplittingIsometry, StateFamily, SystemLayout,
};

fn cfg() -> OptimizerConfig {
    OptimizerConfig { restarts: 2, ..OptimizerConfig::default() }
}

fn phi_plus() -> DensityOperator {
    state_family(&StateFamily::Bell(BellKind::PhiPlus)).unwrap()
}

fn classical() -> DensityOperator {
    state_family(&StateFamily::ClassicallyCorrelated { d: 2 }).unwrap()
}

fn werner(p: f64) -> DensityOperator {
    state_family(&StateFamily::Werner { p }).unwrap()
}

fn random2(rank: usize, seed: u64) -> DensityOperator {
    random_density_on(SystemLayout::bipartite(2, 2).unwrap(), rank, seed).unwrap()
}

fn mixed_times_zero() -> DensityOperator {
    let a = DensityOperator::maximally_mixed(SystemLayout::new([("A", 2)]).unwrap());
    tensor_product(&a, &DensityOperator::basis("B", 2, 0).unwrap()).unwrap()
}

fn classical_parts() -> Vec<SeparablePart> {
    (0..2)
        .map(|i| SeparablePart {
            weight: 0.5,
            rho_a: DensityOperator::basis("A", 2, i).unwrap(),
            rho_b: DensityOperator::basis("B", 2, i).unwrap(),
        })
        .collect()
}

#[test]
fn wootters_closed_forms() {
    assert!((concurrence(&phi_plus()).unwrap() - 1.0).abs() < 1e-12);
    assert!((wootters_eof(&phi_plus()).unwrap() - 1.0).abs() < 1e-12);
    assert!(wootters_eof(&classical()).unwrap().abs() < 1e-12);
    for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.9] {
        let expected = ((3.0 * p - 1.0) / 2.0f64).max(0.0);
        assert!((concurrence(&werner(p)).unwrap() - expected).abs() < 1e-10, "p = {p}");
    }
    let qutrits = state_family(&StateFamily::ClassicallyCorrelated { d: 3 }).unwrap();
    assert!(matches!(concurrence(&qutrits), Err(Error::Shape(_))));
}

#[test]
fn formation_matches_closed_form() {
    let rho = werner(0.8);
    let oracle = wootters_eof(&rho).unwrap();
    let r = eof(&rho, 16, &cfg()).unwrap();
    assert_eq!(r.bound, Bound::Upper);
    assert!((r.value - oracle).abs() < 1e-3, "{} vs {oracle}", r.value);
    assert!(matches!(r.certificate, Certificate::Decomposition(ref d) if d.check_realizes(&rho).is_ok()));
    let m = eof_via_mcs(&rho, 16, &cfg()).unwrap();
    assert!((m.value - oracle).abs() < 1e-3);
    // the MCS optimum spends no ebits
    assert!(m.entanglement_at_optimum.abs() < 1e-8);
    assert!(eof(&mixed_times_zero(), 4, &cfg()).unwrap().value.abs() < 1e-9);
}

#[test]
fn formation_rejects_small_k() {
    assert!(matches!(eof(&werner(0.5), 3, &cfg()), Err(Error::Shape(_))));
}

#[test]
fn assistance_examples() {
    let r = eoa_single(&classical(), 4, &cfg()).unwrap();
    assert_eq!(r.bound, Bound::Lower);
    assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    assert!(eoa_single(&mixed_times_zero(), 4, &cfg()).unwrap().value.abs() < 1e-9);
    assert!((eoa_asymptotic(&phi_plus()).unwrap() - 1.0).abs() < 1e-12);
    assert!(eoa_asymptotic(&mixed_times_zero()).unwrap().abs() < 1e-12);
}

#[test]
fn flag_extension_of_classical_state() {
    let ext = flag_extension(&classical(), &classical_parts()).unwrap();
    let cmi = conditional_mutual_information(&ext, &["A"], &["B"], &[FLAG_LABEL]).unwrap();
    assert!(cmi.abs() < 1e-12);
    let bad = vec![classical_parts()[0].clone()];
    assert!(matches!(flag_extension(&classical(), &bad), Err(Error::Decomposition(_))));
}

#[test]
fn flag_needs_a_copy_on_each_side() {
    let rho = classical();
    let v = flag_splitting(&rho, &classical_parts(), 2, 2).unwrap();
    let q = cost_pair(&split_purification(&rho, &v).unwrap()).q;
    assert!(q.abs() < 1e-12);
    let upper = squashed_upper_seeded(&rho, 2, 2, &cfg(), &[v]).unwrap();
    assert!(upper.value < 1e-6);
    // with a trivial A' the flag sits at C alone: a GHZ state, Q = ½ I(A:B)
    let at_c = SplittingIsometry::all_at_receiver(2, 1, 2).unwrap();
    let q = cost_pair(&split_purification(&rho, &at_c).unwrap()).q;
    assert!((q - 0.5).abs() < 1e-12);
    assert!(puffed_lower(&rho, 1, 2, &cfg()).unwrap().value >= 0.5 - 1e-9);
}

#[test]
fn pure_states_are_exact() {
    let psi = random2(1, 11);
    let s_a = sideinfo_core::qstate::marginal_entropy(&psi, &["A"]).unwrap();
    for (da, dc) in [(1, 1), (2, 3)] {
        assert!((squashed_upper(&psi, da, dc, &cfg()).unwrap().value - s_a).abs() < 1e-9);
        assert!((puffed_lower(&psi, da, dc, &cfg()).unwrap().value - s_a).abs() < 1e-9);
    }
}

#[test]
fn too_small_side_systems_are_rejected() {
    assert!(matches!(squashed_upper(&werner(0.5), 1, 3, &cfg()), Err(Error::Shape(_))));
}

#[test]
fn reports_are_deterministic() {
    let rho = random2(3, 5);
    assert_eq!(squashed_upper(&rho, 3, 3, &cfg()).unwrap(), squashed_upper(&rho, 3, 3, &cfg()).unwrap());
    assert_eq!(eof(&rho, 9, &cfg()).unwrap(), eof(&rho, 9, &cfg()).unwrap());
}

#[test]
fn more_restarts_never_hurt() {
    let rho = random2(3, 21);
    let mut last_sq = f64::INFINITY;
    let mut last_f = f64::INFINITY;
    for restarts in 1..=4 {
        let c = OptimizerConfig { restarts, seed: 3, ..OptimizerConfig::default() };
        let sq = squashed_upper(&rho, 3, 3, &c).unwrap().value;
        let f = eof(&rho, 9, &c).unwrap().value;
        assert!(sq <= last_sq && f <= last_f, "restarts = {restarts}");
        last_sq = sq;
        last_f = f;
    }
}

#[test]
fn measures_ignore_local_unitaries() {
    let rho = random2(2, 8);
    let moved = rho.apply_local_unitaries(&[haar_unitary(2, 1).unwrap(), haar_unitary(2, 2).unwrap()]).unwrap();
    let a = eof(&rho, 4, &cfg()).unwrap().value;
    let b = eof(&moved, 4, &cfg()).unwrap().value;
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    let a = squashed_upper(&rho, 2, 2, &cfg()).unwrap().value;
    let b = squashed_upper(&moved, 2, 2, &cfg()).unwrap().value;
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn formation_is_convex_on_a_mixture() {
    let (r1, r2) = (random2(2, 31), random2(2, 32));
    let mix = DensityOperator::from_noisy((r1.matrix() + r2.matrix()) * sideinfo_core::qstate::C64::new(0.5, 0.0), r1.layout().clone())
        .unwrap();
    let lhs = wootters_eof(&mix).unwrap();
    let rhs = 0.5 * (wootters_eof(&r1).unwrap() + wootters_eof(&r2).unwrap());
    assert!(lhs <= rhs + 1e-9);
    let opt = eof(&mix, 16, &cfg()).unwrap().value;
    let opt_parts = 0.5 * (eof(&r1, 4, &cfg()).unwrap().value + eof(&r2, 4, &cfg()).unwrap().value);
    assert!(opt <= opt_parts + 1e-6, "{opt} vs {opt_parts}");
}

#[test]
fn superadditivity_gap_examples() {
    let psi = phi_plus();
    assert!(!puffed_superadditivity_witness(&psi, &psi).unwrap());
    assert!(puffed_superadditivity_gap(&psi, &psi).unwrap().abs() < 1e-12);
    // both minima on A: the gap vanishes
    let m = mixed_times_zero();
    let rho = tensor_product(
        &DensityOperator::basis("A", 2, 0).unwrap(),
        &DensityOperator::maximally_mixed(SystemLayout::new([("B", 2)]).unwrap()),
    )
    .unwrap();
    assert!(!puffed_superadditivity_witness(&m, &m).unwrap());
    // opposite sides: min{S(A1A2), S(B1B2)} = 1 against 0 + 0
    assert!((puffed_superadditivity_gap(&m, &rho).unwrap() - 1.0).abs() < 1e-12);
    assert!(puffed_superadditivity_witness(&m, &rho).unwrap());
}

#[test]
fn formation_seed_keeps_squashed_below_formation() {
    // separable rank-3 states need more than three product terms, which the
    // default (rank, rank) search cannot hold
    for seed in 0..6 {
        let rho = random2(3, 900 + seed);
        let formation = eof(&rho, 9, &cfg()).unwrap();
        let r = squashed_upper_with_formation(&rho, 3, 3, &formation, &cfg()).unwrap();
        assert!(r.value <= formation.value + 1e-10, "{} vs {}", r.value, formation.value);
        let Certificate::Splitting(v) = &r.certificate else { panic!("splitting certificate expected") };
        let q = cost_pair(&split_purification(&rho, v).unwrap()).q;
        assert!((q - r.value).abs() < 1e-9);
    }
    let plain = eof(&werner(0.5), 16, &cfg()).unwrap();
    let not_formation = squashed_upper(&werner(0.5), 4, 4, &cfg()).unwrap();
    assert!(squashed_upper_with_formation(&werner(0.5), 4, 4, &not_formation, &cfg()).is_err());
    assert!(squashed_upper_with_formation(&werner(0.5), 4, 4, &plain, &cfg()).is_ok());
}
