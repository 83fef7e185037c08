#[path = "common/oracle.rs"]
mod oracle;

#[test]
fn closed_forms_match_gaussian_assignments() {
    let cases = oracle::run_all(2024, 1000);
    for case in &cases {
        assert!(case.holds(), "{}: worst {:e} over {} points", case.name, case.worst, case.points);
    }
}
