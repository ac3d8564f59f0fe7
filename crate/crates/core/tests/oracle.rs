//! Every Nahm sum appearing in the catalog, expanded by the engine, against a
//! naive bounded loop.

mod common;

#[test]
fn catalog_nahm_sums_match_naive_loop() {
    let checked = common::check_catalog_sums().unwrap();
    assert!(checked > 100, "only {checked} distinct sums");
}
