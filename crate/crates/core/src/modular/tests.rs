use super::*;

fn pol() -> EvalPolicy {
    EvalPolicy::default()
}

#[test]
fn tau_parsing() {
    assert_eq!(Tau::parse("i").unwrap().value(), Complex64::new(0.0, 1.0));
    assert_eq!(Tau::parse("2i").unwrap().value(), Complex64::new(0.0, 2.0));
    assert_eq!(Tau::parse("1/4+i").unwrap().value(), Complex64::new(0.25, 1.0));
    let t = Tau::parse("-1/3+3/2i").unwrap().value();
    assert!((t.re + 1.0 / 3.0).abs() < 1e-15 && t.im == 1.5);
    assert!(Tau::parse("1-i").is_err());
    assert!(Tau::parse("abc").is_err());
}

#[test]
fn euler_product_at_i_matches_direct_product() {
    let tau = Tau::new(0.0, 1.0).unwrap();
    let direct: f64 = (1..40).map(|k| 1.0 - (-2.0 * PI * k as f64).exp()).product();
    let got = pochhammer(tau.q_pow(1.0), tau.q_pow(1.0), None, &pol()).unwrap();
    assert!((got - direct).norm() < 1e-12);
}

#[test]
fn constant_evaluates_to_one() {
    let tau = Tau::new(0.0, 1.0).unwrap();
    assert_eq!(eval_expr(&parse_expr("1").unwrap(), tau, &pol()).unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn phi_series_and_product_agree() {
    let tau = Tau::new(0.0, 1.0).unwrap();
    let series = eval_series_expr(&parse_expr("sum{n in Z; floor=n^2: (-1)^n*q^(n^2)}").unwrap(), tau, &pol()).unwrap();
    let product = eval_expr(&parse_expr("J(1)^2/J(2)").unwrap(), tau, &pol()).unwrap();
    assert!((series - product).norm() < 1e-10);
}

#[test]
fn h01_is_phi() {
    let tau = Tau::new(0.0, 1.0).unwrap();
    let phi: f64 = 1.0 + 2.0 * (1..10).map(|k| (-2.0 * PI * (k * k) as f64).exp()).sum::<f64>();
    assert!((h_num(0.0, 1.0, tau, &pol()).unwrap() - phi).norm() < 1e-14);
}

#[test]
fn eta_inversion_at_2i() {
    let tau = Tau::new(0.0, 2.0).unwrap();
    let r = eta_weber_laws(tau, 1e-10, &pol()).unwrap();
    assert!(r.iter().all(Residual::passed), "{r:?}");
}

#[test]
fn s_matrix_is_half_an_involution() {
    assert!(s_squared_residual() < 1e-12);
}

#[test]
fn vectors_are_finite_and_nonzero_at_2i() {
    let tau = Tau::new(0.0, 2.0).unwrap();
    for v in [u_vec(tau, &pol()).unwrap(), v_vec(tau, &pol()).unwrap()] {
        assert!(v.iter().all(|z| z.is_finite() && z.norm() > 0.0));
    }
}

#[test]
fn dual_paths_agree_at_i() {
    let r = dual_path(Tau::new(0.0, 1.0).unwrap(), 1e-8, &pol()).unwrap();
    assert!(r.iter().all(Residual::passed), "{r:?}");
}

#[test]
fn v_components_live_on_their_shifted_integer_lattice() {
    for (c, s) in component_series(v_components(), Exponent::from_integer(30)).unwrap() {
        assert_eq!(lattice_defect(c, &s, Exponent::from_integer(1)), None);
    }
    let (c1, _) = &component_series(v_components(), Exponent::from_integer(2)).unwrap()[0];
    assert_eq!(*c1, exp(-7, 88));
}

#[test]
fn u_components_need_half_integer_steps() {
    let comps = component_series(u_components(), Exponent::from_integer(30)).unwrap();
    for (c, s) in &comps {
        assert_eq!(lattice_defect(*c, s, exp(1, 2)), None);
    }
    assert!(lattice_defect(comps[0].0, &comps[0].1, Exponent::from_integer(1)).is_some());
}

#[test]
fn tolerance_tightening_is_self_consistent() {
    let tau = Tau::new(0.25, 1.0).unwrap();
    let loose = EvalPolicy { tail_tolerance: 1e-10, ..pol() };
    let tight = EvalPolicy { tail_tolerance: 1e-11, ..pol() };
    let (a, b) = (v_vec(tau, &loose).unwrap(), v_vec(tau, &tight).unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < 1e-10);
    }
    let (a, b) = (eta(tau, &loose).unwrap(), eta(tau, &tight).unwrap());
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn theta_translation_at_half_i() {
    let tau = Tau::new(0.0, 0.5).unwrap();
    let r = theta_laws(tau, 22, 1e-8, &pol()).unwrap();
    assert!(r.iter().all(Residual::passed), "{r:?}");
}
