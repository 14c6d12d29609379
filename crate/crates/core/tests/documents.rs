use ncpmap_core::families::{bncp_example, cnot_intermediate_map, DephasingModel};
use ncpmap_core::{
    check_validity, classify, detect_fixed_lines, export_domain, scan_domain, superop_from_choi,
    BlochVector, Classification, InvariantSet, MapDocument, ProbeConfig, QubitMap, Representation,
    ScanMode, SuperOp, ValidityStatus,
};

#[test]
fn documents_survive_both_representations() {
    let map: QubitMap = superop_from_choi(&bncp_example()).into();
    for rep in [Representation::Choi, Representation::Superop] {
        let text = MapDocument::from_map(&map, rep).unwrap().to_json();
        let back = MapDocument::parse(&text).unwrap().to_map().unwrap();
        let diff = back
            .superop()
            .unwrap()
            .a
            .max_diff(&map.superop().unwrap().a);
        assert!(diff < 1e-15, "{rep:?}: {diff}");
    }
}

#[test]
fn ncp_example_end_to_end() {
    let choi = bncp_example();
    let verdict = classify(&choi).unwrap();
    assert_eq!(verdict.classification, Classification::Ncp);
    let map: QubitMap = superop_from_choi(&choi).into();
    let report = scan_domain(&map, "bncp", ScanMode::Grid { resolution: 24 }).unwrap();
    assert!(report.summary.fraction > 0.0 && report.summary.fraction < 1.0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.csv");
    export_domain(&report, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), report.points.len() + 1);
    let v = check_validity(&map, &ProbeConfig::default());
    assert_eq!(v.status, ValidityStatus::PartialDomain);
}

#[test]
fn singular_cnot_has_only_its_fixed_line() {
    let map = cnot_intermediate_map(std::f64::consts::FRAC_PI_4);
    assert!(map.is_singular());
    let lines = detect_fixed_lines(&map);
    assert_eq!(
        lines,
        vec![InvariantSet::Segment {
            direction: BlochVector::new(1.0, 0.0, 0.0)
        }]
    );
    let report = scan_domain(&map, "cnot", ScanMode::MonteCarlo { n: 2000, seed: 1 }).unwrap();
    assert_eq!(report.summary.in_domain, 0);
    let v = check_validity(&map, &ProbeConfig::default());
    assert_eq!(v.status, ValidityStatus::MeasureZeroDomain);
}

#[test]
fn identity_document_classifies_cp() {
    let doc = MapDocument::from_superop(&SuperOp::identity());
    let choi = MapDocument::parse(&doc.to_json())
        .unwrap()
        .to_choi()
        .unwrap();
    assert_eq!(classify(&choi).unwrap().classification, Classification::Cp);
}

#[test]
fn dephasing_model_rejects_bad_memory() {
    assert!(DephasingModel::new(0.0).is_err());
    assert!(DephasingModel::new(1.5).is_err());
    assert!(DephasingModel::new(f64::NAN).is_err());
}
