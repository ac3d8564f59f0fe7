use super::*;

#[test]
fn builtin_catalog_loads_and_matches_manifest() {
    let cat = Catalog::builtin().unwrap();
    let ids: Vec<&str> = cat.records().iter().map(|r| r.id.as_str()).collect();
    let manifest: Vec<&str> = MANIFEST.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(ids, manifest);
}

#[test]
fn every_side_parses() {
    for r in Catalog::builtin().unwrap().records() {
        for side in [&r.lhs, &r.rhs] {
            expr::parse_expr(side).unwrap_or_else(|e| panic!("{}: {e}\n{side}", r.id));
        }
    }
}

#[test]
fn aliases_resolve_unique_labels() {
    let cat = Catalog::builtin().unwrap();
    assert_eq!(cat.resolve("table3.9.2").unwrap().id, "EX9.2");
    assert_eq!(cat.resolve("EX11.1").unwrap().id, "EX11.1");
    assert!(cat.resolve("thm-exam-4").is_err());
    assert!(matches!(cat.resolve("nope"), Err(Error::UnknownId(_))));
}

#[test]
fn duplicate_ids_are_rejected() {
    let r = Catalog::builtin().unwrap().records()[0].clone();
    assert!(Catalog::new(vec![r.clone(), r]).is_err());
}

#[test]
fn grid_assignments_enumerate_the_product() {
    let cat = Catalog::builtin().unwrap();
    let r = cat.get("AUX.78-sum-1").unwrap();
    let a = r.assignments();
    assert_eq!(a.len(), 121);
    assert_eq!(a[12], vec![("m".to_string(), 1), ("n".to_string(), 1)]);
}

#[test]
fn orders_default_by_arity() {
    let cat = Catalog::builtin().unwrap();
    assert_eq!(cat.get("RR.1").unwrap().order(), Exponent::from_integer(DEFAULT_ORDER));
    let t = cat.get("T1.3.1").unwrap();
    assert_eq!((t.order(), t.x_order()), (Exponent::from_integer(DEFAULT_BIVARIATE_ORDER), Some(DEFAULT_X_ORDER)));
}

#[test]
fn sign_flip_is_reported_at_the_leading_exponent() {
    let cat = Catalog::builtin().unwrap();
    let mut r = cat.get("RR.1").unwrap().clone();
    r.rhs = format!("-({})", r.rhs);
    let rep = verify_record(&r, &VerifyOptions::default());
    assert_eq!(rep.status, Status::Fail);
    assert_eq!(rep.discrepancy.unwrap().exponent(), Exponent::from_integer(0));
}

#[test]
fn q_system_small() {
    let checks = q_system_check(QSystem::index_122(), 5, Exponent::from_integer(20)).unwrap();
    assert_eq!(checks.len(), 13);
    for c in &checks {
        assert!(c.pass, "{}: {:?}", c.relation, c.discrepancy);
    }
}
