#[path = "common/criteria.rs"]
mod criteria;

#[test]
fn acceptance_criteria() {
    let failed = criteria::run_all("core", &criteria::library_criteria());
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
