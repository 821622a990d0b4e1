use super::*;
use crate::orbits::orbit_status;

fn has_point(r: &VerificationReport, role: &str, coords: &[u64]) -> bool {
    let want: Vec<Vec<u64>> = coords.iter().map(|&c| vec![c]).collect();
    r.witnesses
        .iter()
        .any(|w| w.role == role && w.point.as_ref() == Some(&want))
}

fn shift_subject() -> Subject {
    Subject::new(
        "(y, 0)",
        IntMap::parse(&["y", "0"], &["x", "y"]).unwrap(),
        IntVariety::parse(&["0"], &["x", "y"]).unwrap(),
    )
}

#[test]
fn example1_is_geometrically_nilpotent_over_f5_and_f25() {
    let ex1 = Subject::from(&ExampleInstance::example1(1));
    let r = verify_geometric_nilpotence(&ex1, 5, 2, Budgets::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(r.claim, ClaimId::Thm2);
    assert_eq!(r.stats.points_scanned, 25 + 625);
    assert_eq!(r.moduli.len(), 2);
    r.validate().unwrap();
}

#[test]
fn example3_literal_is_falsified_by_its_fixed_point() {
    let ex3 = Subject::from(&ExampleInstance::named(ExampleName::Example3Literal));
    let r = verify_geometric_nilpotence(&ex3, 3, 1, Budgets::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Falsified);
    assert!(has_point(&r, "cycle", &[2, 2, 2]));
    r.validate().unwrap();
}

#[test]
fn non_uniformity_evidence() {
    let (p, a, m) = NON_UNIFORMITY_WITNESS;
    let ex1 = Subject::from(&ExampleInstance::example1(a));
    let r = verify_non_uniformity(&ex1, p, m, Budgets::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(r.stats.extra["max_depth_sequence"], json!([3, 6]));

    let single = verify_non_uniformity(&ex1, p, 1, Budgets::default()).unwrap();
    assert_eq!(single.verdict, Verdict::Inconclusive);

    let flat = verify_non_uniformity(&shift_subject(), 2, 3, Budgets::default()).unwrap();
    assert_eq!(flat.verdict, Verdict::Inconclusive);
    assert_eq!(flat.stats.extra["max_depth_sequence"], json!([2, 2, 2]));
}

#[test]
fn thm3_corrected_obeys_the_exact_law() {
    for p in [2, 3] {
        let r = verify_thm3(Variant::Corrected, p, 2, Budgets::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Verified, "p = {p}");
        assert_eq!(r.stats.max_depth, Some(p));
        assert_eq!(r.stats.extra["exact_law_holds"], json!(true));
    }
}

#[test]
fn thm3_literal_runs_to_a_verdict() {
    let r = verify_thm3(Variant::Literal, 3, 1, Budgets::default()).unwrap();
    r.validate().unwrap();
    let f3 = Field::prime(3).unwrap();
    let sys = ExampleInstance::named(ExampleName::Example2Literal).over(&f3);
    let start = Point::from(vec![f3.from_i64(0), f3.from_i64(1), f3.from_i64(1)]);
    assert_eq!(orbit_status(&sys.map_eval, &start, &sys.fixed_point, 100).depth(), Some(3));
}

#[test]
fn thm4_literal_is_falsified_at_p3() {
    let r = verify_thm4(Variant::Literal, 3, 1, Budgets::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Falsified);
    assert!(has_point(&r, "cycle", &[2, 2, 2]));
}

#[test]
fn thm4_corrected_cross_check_and_the_u_zero_line() {
    let r = verify_thm4(Variant::Corrected, 3, 2, Budgets::default()).unwrap();
    assert_eq!(r.stats.extra["cross_check_mismatches"], json!(0));
    // (0,0,z) lies on Y and never meets x = z
    assert_eq!(r.verdict, Verdict::Falsified);
    assert!(has_point(&r, "cycle", &[0, 0, 2]));
    assert!(r.witnesses.iter().all(|w| w.role == "cycle"));
}

#[test]
fn thm4_cross_check_spot_values() {
    for (p, hit, depth) in [(3, 2, 3), (5, 5, 6)] {
        let field = Field::prime(p).unwrap();
        let checks = thm4_cross_checks(&field, 1000).unwrap();
        let target = Point::from(vec![field.from_i64(2), field.from_i64(2), field.from_i64(1)]);
        let c = checks.iter().find(|c| c.point == target).unwrap();
        assert_eq!((c.hit_index, c.depth), (hit, Some(depth)));
        assert!(checks.iter().all(|c| c.agrees(THM4_DEPTH_OFFSET)));
    }
}

#[test]
fn thm1_patterns() {
    let b = Budgets::default();
    let shift = IntMap::parse(&["y", "0"], &["x", "y"]).unwrap();
    let r = verify_thm1("(y, 0)", &shift, 2, &[1, 2], 4, b).unwrap();
    assert_eq!((r.claim, r.verdict), (ClaimId::Thm1Forward, Verdict::Verified));
    assert_eq!(r.stats.extra["symbolic_constant_at"], json!(2));

    let id = IntMap::parse(&["x", "y"], &["x", "y"]).unwrap();
    let r = verify_thm1("identity", &id, 2, &[1, 2], 4, b).unwrap();
    assert_eq!((r.claim, r.verdict), (ClaimId::Thm1Converse, Verdict::Verified));

    let sq = IntMap::parse(&["x^2", "y^2"], &["x", "y"]).unwrap();
    let r = verify_thm1("(x^2, y^2)", &sq, 2, &[1], 4, b).unwrap();
    assert_eq!((r.claim, r.verdict), (ClaimId::Thm1Converse, Verdict::Verified));
    assert!(has_point(&r, "periodic", &[0, 0]) && has_point(&r, "periodic", &[0, 1]));
}

#[test]
fn lemma5_suite_up_to_50() {
    let r = verify_lemma5_suite(50, Budgets::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Verified);
    assert_eq!(r.stats.extra["checks"], json!(50 * 51 / 2));
    assert_eq!(r.stats.extra["z5_seed1"], json!({"hit_index": 4, "cycle_len": 20}));
}

#[test]
fn exhausted_budgets_downgrade_to_inconclusive() {
    let ex1 = Subject::from(&ExampleInstance::example1(1));
    let tight = Budgets {
        orbit_steps: 1,
        ..Budgets::default()
    };
    let r = verify_geometric_nilpotence(&ex1, 5, 1, tight).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.witnesses.iter().any(|w| w.role == "budget_exhausted"));
    r.validate().unwrap();
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let ex1 = Subject::from(&ExampleInstance::example1(2));
    let a = verify_geometric_nilpotence(&ex1, 7, 1, Budgets::default()).unwrap();
    let b = verify_geometric_nilpotence(&ex1, 7, 1, Budgets::default()).unwrap();
    assert_eq!(a.without_timing().to_json_line(), b.without_timing().to_json_line());
    let back: VerificationReport = serde_json::from_str(&a.to_json_line()).unwrap();
    assert_eq!(back, a);
    back.validate().unwrap();
}
