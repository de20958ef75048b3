use hhbv_core::dga::{
    algebra_cohomology, builtin_algebra, check_dga, check_morphism, format_algebra, is_quasi_isomorphism,
    make_quasi_iso_f, parse_algebra, BUILTIN_ALGEBRAS,
};

#[test]
fn builtins_satisfy_the_axioms() {
    for name in BUILTIN_ALGEBRAS {
        let alg = builtin_algebra(name).unwrap();
        let report = check_dga(&alg);
        assert!(report.all_pass(), "{name}: {report:?}");
    }
}

#[test]
fn text_format_round_trips() {
    for name in BUILTIN_ALGEBRAS {
        let alg = builtin_algebra(name).unwrap();
        let again = parse_algebra(&format_algebra(&alg)).unwrap();
        assert_eq!(format_algebra(&again), format_algebra(&alg), "{name}");
    }
}

#[test]
fn parse_reports_line_numbers() {
    let err = parse_algebra("generator e degree 0\nmul e q = e\nunit = e\n").unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
    assert!(parse_algebra("generator e degree 0\n").is_err());
}

#[test]
fn broken_leibniz_is_detected() {
    // x is idempotent but d(x) = y with x·y = y·x = 0
    let text = "generator e degree 0\ngenerator x degree 0\ngenerator y degree -1\n\
                mul e e = e\nmul e x = x\nmul x e = x\nmul e y = y\nmul y e = y\n\
                mul x x = x\nd x = y\nunit = e\n";
    let alg = parse_algebra(text).unwrap();
    let report = check_dga(&alg);
    assert!(!report.get("leibniz").unwrap().pass);
    assert!(report.get("associativity").unwrap().pass);
}

#[test]
fn tetrahedron_has_sphere_cohomology() {
    let alg = builtin_algebra("sphere-cochains").unwrap();
    let mut dims: Vec<(i32, usize)> = algebra_cohomology(&alg).iter().map(|p| (p.degree, p.dim())).filter(|p| p.1 > 0).collect();
    dims.sort();
    assert_eq!(dims, vec![(-2, 1), (0, 1)]);
}

#[test]
fn comparison_map_is_a_quasi_isomorphism() {
    let f = make_quasi_iso_f();
    assert!(check_morphism(&f).all_pass());
    assert!(is_quasi_isomorphism(&f));
}

#[test]
fn unknown_algebra_is_an_error() {
    assert!(builtin_algebra("torus").is_err());
}
