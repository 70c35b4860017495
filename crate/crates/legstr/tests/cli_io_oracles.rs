//! End-to-end checks of the document layer: solve records against the
//! documented classification rows, build/measure/verify round trips for both
//! curve families, dual documents, tamper detection, and plot determinism.

use legstr::cli_io::{
    build_closed_document, build_solenoid_document, invariants_report, render_plot,
    solve_from_modulus, solve_from_triple, verify_report, PlotView,
};

fn check_value(report: &legstr::cli_io::ReportDocument, name: &str) -> i64 {
    let check = report
        .checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("missing check {name}"));
    assert!(check.pass, "{name} failed: residual {}", check.residual);
    check.value.as_ref().and_then(|v| v.as_i64()).unwrap_or_else(|| panic!("{name} has no value"))
}

#[test]
fn solve_reproduces_the_documented_rows() {
    let record = solve_from_triple(7, 1, -5, None).unwrap();
    assert!((record.m - 0.894052).abs() < 1e-4, "m = {}", record.m);
    assert!((record.ell - 2.78109).abs() < 1e-4, "ell = {}", record.ell);
    assert!((record.omega - 1.83449).abs() < 1e-4, "omega = {}", record.omega);
    assert!((record.strain - 12.8414).abs() < 5e-3, "strain = {}", record.strain);
    assert_eq!((record.q2.as_str(), record.q3.as_str()), ("1/3", "4/21"));
    assert_eq!(record.maslov, -4);

    let record = solve_from_triple(21, 5, -15, None).unwrap();
    assert!((record.m - 0.36972).abs() < 1e-4, "m = {}", record.m);
    assert!((record.ell - 1.71141).abs() < 1e-4, "ell = {}", record.ell);
    assert!((record.omega - 2.05338).abs() < 1e-4, "omega = {}", record.omega);
    assert!((record.strain - 43.1209).abs() < 5e-3, "strain = {}", record.strain);
}

#[test]
fn solve_from_exact_modulus_matches_the_triple_route() {
    let by_modulus = solve_from_modulus("10/27", "4/27", None).unwrap();
    let by_triple = solve_from_triple(9, 2, -6, None).unwrap();
    assert_eq!(by_modulus.m, by_triple.m);
    assert_eq!(by_modulus.ell, by_triple.ell);
    assert_eq!(by_modulus.omega, by_triple.omega);
    assert_eq!(by_modulus.strain, by_triple.strain);
    assert_eq!(
        (by_modulus.n, by_modulus.l1, by_modulus.l2, by_modulus.maslov),
        (9, 2, -6, -4)
    );
    assert!(by_modulus.summary().starts_with("|9,2,-6>:"));
}

#[test]
fn closed_build_and_invariants_find_the_trefoil() {
    let doc = build_closed_document(9, 2, -6, 48, false).unwrap();
    let report = invariants_report(&doc).unwrap();
    assert_eq!(check_value(&report, "lk1_axis_winding"), 2);
    assert_eq!(check_value(&report, "lk1_axis_gauss"), 2);
    assert_eq!(check_value(&report, "lk2_dual_winding"), -6);
    assert_eq!(check_value(&report, "maslov_turning"), -4);
    assert_eq!(check_value(&report, "tb_pushoff"), -3);
    assert!(report.checks.iter().any(|c| c.name == "matches_prediction" && c.pass));
    assert!(report.verdict, "summary:\n{}", report.summary());
}

#[test]
fn the_dual_document_swaps_the_axis_linkings() {
    let doc = build_closed_document(7, 1, -5, 48, true).unwrap();
    let report = invariants_report(&doc).unwrap();
    assert_eq!(check_value(&report, "lk1_axis_winding"), -5);
    assert_eq!(check_value(&report, "lk2_dual_winding"), 1);
    // The axis exchange is a contactomorphism, so tb survives it.
    assert_eq!(check_value(&report, "tb_pushoff"), -5);
    assert!(report.checks.iter().all(|c| c.name != "matches_prediction"));
    assert!(report.verdict, "summary:\n{}", report.summary());
    assert!(report.subject.ends_with("dual"), "subject = {}", report.subject);
}

#[test]
fn verify_passes_for_both_families() {
    let doc = build_closed_document(9, 2, -6, 48, false).unwrap();
    let report = verify_report(&doc).unwrap();
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "null_cone",
            "legendrian",
            "sample_match",
            "closure",
            "monodromy",
            "fubini_a",
            "fubini_b",
            "stress",
            "momentum_drift",
            "momentum_spectrum",
        ]
    );
    assert!(report.verdict, "summary:\n{}", report.summary());

    let doc = build_solenoid_document("5/3", 160, false).unwrap();
    let report = verify_report(&doc).unwrap();
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(
        names,
        ["null_cone", "legendrian", "sample_match", "closure", "fubini_level", "stress"]
    );
    assert!(report.verdict, "summary:\n{}", report.summary());
}

#[test]
fn verify_passes_for_dual_documents() {
    let doc = build_closed_document(7, 1, -5, 32, true).unwrap();
    let report = verify_report(&doc).unwrap();
    assert!(report.verdict, "summary:\n{}", report.summary());
}

#[test]
fn verify_detects_a_tampered_document() {
    let mut doc = build_closed_document(9, 2, -6, 32, false).unwrap();
    // Perturb the second coordinate where its real part is largest, so both
    // the stored-sample comparison and the membership residual move.
    let target = (0..doc.samples.len())
        .max_by(|&i, &j| {
            let a = doc.samples[i].hom[1][0].abs();
            let b = doc.samples[j].hom[1][0].abs();
            a.partial_cmp(&b).unwrap()
        })
        .unwrap();
    doc.samples[target].hom[1][0] += 1e-4;
    let report = verify_report(&doc).unwrap();
    assert!(!report.verdict);
    let failing: Vec<&str> =
        report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert!(failing.contains(&"sample_match"), "failing = {failing:?}");
    assert!(failing.contains(&"null_cone"), "failing = {failing:?}");
}

#[test]
fn plots_cover_every_view_and_stay_identical() {
    let doc = build_closed_document(9, 2, -6, 12, false).unwrap();
    for view in [PlotView::Lagrangian, PlotView::Xy, PlotView::Xz, PlotView::Yz] {
        let svg = render_plot(&doc, view).unwrap();
        assert_eq!(svg, render_plot(&doc, view).unwrap());
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<path").count(), 1);
    }
    assert_eq!(
        render_plot(&doc, PlotView::Lagrangian).unwrap(),
        render_plot(&doc, PlotView::Xy).unwrap()
    );
}
