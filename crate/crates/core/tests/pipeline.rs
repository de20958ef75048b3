use hhbv_core::bv::{
    bv_iso_search, check_theta_iso, homotopy_reference_table, hh_bv_table, strict_reference_table,
    string_topology_model, table_bound, table_degrees, x, y, BvPipeline, BvTable, Entry, SphereLabels,
};
use hhbv_core::hip::catalog_hip;

const K: usize = 4;

fn table(name: &str) -> (BvTable, BvTable) {
    let c = catalog_hip(name).unwrap();
    let n = table_bound(K);
    let p = BvPipeline::new(c.base.clone(), &c.expand(n), n, table_degrees(K)).unwrap();
    let pd = p.pd_report();
    assert!(pd.is_pd_structure(), "{name}: {:?}", pd.witnesses);
    let labels = SphereLabels::new(c.base.clone());
    let from_b = hh_bv_table(&p, &labels, &p.delta_from_transfer().unwrap(), K).unwrap();
    let from_z = hh_bv_table(&p, &labels, &p.delta_from_z().unwrap(), K).unwrap();
    (from_b, from_z)
}

#[test]
fn strict_table_matches_reference() {
    let (b, z) = table("sphere-strict");
    assert!(b.diff(&z).is_empty());
    assert!(b.diff(&strict_reference_table(K)).is_empty(), "{:?}", b.diff(&strict_reference_table(K)));
    b.check_algebra().unwrap();
    b.check_delta_squared().unwrap();
}

#[test]
fn homotopy_table_matches_reference() {
    let (b, z) = table("sphere-tilde");
    assert!(b.diff(&z).is_empty());
    assert!(b.diff(&homotopy_reference_table(K)).is_empty());
    assert_eq!(b.delta[&x(1)], Entry::Value([x(2), y(4)].into_iter().collect()));
    assert_eq!(b.delta[&x(3)], Entry::OutOfRange);
    assert_eq!(b.delta[&y(3)], Entry::Value([x(2), y(4)].into_iter().collect()));
}

#[test]
fn only_the_homotopy_table_is_isomorphic_to_string_topology() {
    let st = string_topology_model(K);
    let (tilde, _) = table("sphere-tilde");
    let (strict, _) = table("sphere-strict");
    assert!(check_theta_iso(&tilde, &st).passes());
    let (cands, dims) = bv_iso_search(&strict, &st);
    assert_eq!(dims, (2, 1));
    assert_eq!(cands.len(), 3);
    assert!(cands.iter().all(|c| !c.check.passes()));
    let (cands, _) = bv_iso_search(&tilde, &st);
    assert_eq!(cands.iter().filter(|c| c.check.passes()).count(), 1);
}

#[test]
fn counterexample_is_not_a_pd_structure() {
    let c = catalog_hip("counterexample").unwrap();
    let p = BvPipeline::new(c.base.clone(), &c.expand(6), 6, -2..=3).unwrap();
    let pd = p.pd_report();
    assert!(pd.is_iso());
    assert!(!pd.transfer_equals_delta);
    assert!(!pd.mismatches.is_empty());
}
