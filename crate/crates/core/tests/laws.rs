use spdkit::laws::{evaluate_witness, run_all, run_law, witness_checks, LawId, LawSpec, Witness};
use spdkit::pd::random_spd;
use spdkit::{Error, SpdMatrix};

const DIMS: [usize; 4] = [2, 3, 5, 10];

#[test]
fn sandwich_on_scalar_pair() {
    let mut w = Witness::new("sandwich", 1);
    w.put_spd("A", &SpdMatrix::from_diagonal(&[1.0]).unwrap())
        .put_spd("B", &SpdMatrix::from_diagonal(&[4.0]).unwrap());
    let checks = witness_checks(&w).unwrap();
    assert_eq!(checks.len(), 2);
    assert!((checks[0].lhs - 1.78515).abs() < 5e-6);
    assert!((checks[0].rhs - 1.92181).abs() < 5e-6);
    assert_eq!(checks[1].lhs, checks[0].rhs);
    assert!((checks[1].rhs - 2.54050).abs() < 5e-6);
    assert!(evaluate_witness(&w).unwrap().margin < 0.0);
}

#[test]
fn power_contraction_at_unit_exponent_is_tight() {
    for seed in 0..5 {
        let mut w = Witness::new("power_contraction", 4);
        w.put_spd("A", &random_spd(4, seed, 100.0).unwrap())
            .put_spd("B", &random_spd(4, seed + 10, 100.0).unwrap())
            .put_scalar("t", 1.0);
        assert_eq!(evaluate_witness(&w).unwrap().margin, 0.0);
    }
}

#[test]
fn witnesses_round_trip_through_json() {
    for &law in LawId::ALL {
        let report = run_law(&LawSpec::new(law, 40, 3, DIMS.to_vec())).unwrap();
        let witness = report.witness.expect("worst trial witness");
        let parsed = Witness::from_json(&witness.to_json()).unwrap();
        assert_eq!(parsed, witness, "{law}");
        let margin = evaluate_witness(&parsed).unwrap().margin;
        let worst = report.worst_margin.unwrap();
        assert!((margin - worst).abs() <= 1e-14, "{law}: {margin} vs {worst}");
    }
}

#[test]
fn reports_are_deterministic_across_pool_sizes() {
    let spec = LawSpec::new(LawId::Cancellation, 300, 42, DIMS.to_vec());
    let a = run_law(&spec).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| run_law(&spec).unwrap());
    assert_eq!(a, b);
    let c = run_law(&LawSpec { seed: 43, ..spec }).unwrap();
    assert_ne!(a.witness, c.witness);
}

#[test]
fn run_all_reports_every_law() {
    let reports = run_all(100, 0, &DIMS).unwrap();
    assert_eq!(reports.len(), 21);
    for (r, law) in reports.iter().zip(LawId::ALL) {
        assert_eq!(r.law, *law);
        assert_eq!(r.trials_run, 100);
        assert!(r.passed, "{law}: {r:?}");
        assert_eq!(r.errored, 0, "{law}");
    }
}

#[test]
fn triangle_inequality_holds_over_many_trials() {
    let r = run_law(&LawSpec::new(LawId::TriangleSdelta, 100_000, 42, vec![2, 5, 10])).unwrap();
    assert_eq!(r.violations, 0, "{r:?}");
    assert_eq!(r.errored, 0);
    assert!(r.worst_margin.unwrap() <= 0.0);
}

#[test]
fn violations_and_margin_agree() {
    let r = run_law(&LawSpec::new(LawId::Sandwich, 200, 1, vec![3])).unwrap();
    assert_eq!(r.passed, r.violations == 0);
    assert!(r.worst_margin.unwrap() <= 1e-10);
    let spec = LawSpec {
        slack: -1.0,
        ..LawSpec::new(LawId::Sandwich, 10, 1, vec![3])
    };
    assert!(run_law(&spec).is_err());
}

#[test]
fn unknown_law_is_rejected() {
    assert!(matches!("no_such_law".parse::<LawId>(), Err(Error::UnknownLaw(_))));
    let w = Witness::new("no_such_law", 2);
    assert!(matches!(evaluate_witness(&w), Err(Error::UnknownLaw(_))));
}

#[test]
fn witness_missing_inputs_name_the_field() {
    let w = Witness::new("sandwich", 2);
    match evaluate_witness(&w) {
        Err(Error::Parse { locus, .. }) => assert_eq!(locus, "matrices.A"),
        other => panic!("unexpected {other:?}"),
    }
}
