//! Seeded randomized property suites. Each suite runs a fixed number of
//! cases and returns the first failure, rendered, or the case count.

use std::sync::Arc;

use hhbv_core::dga::{builtin_algebra, make_quasi_iso_f, DgMorphism};
use hhbv_core::hip::{
    catalog_hip, ch_of_hip, pullback_hip, restrict_hip, restricted_modules, z_operator, HipKey, HipSpace,
    HomotopyInnerProduct,
};
use hhbv_core::hochschild::{
    ch_of_morphism, CochainComplex, HochschildCochain, Letter, ModuleKind, NormalizedAlgebra,
};
use hhbv_core::f2lin::F2Vector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASES: usize = 200;

pub type Outcome = Result<usize, String>;

fn base(name: &str) -> Arc<NormalizedAlgebra> {
    NormalizedAlgebra::new(&builtin_algebra(name).unwrap()).unwrap()
}

const SMALL: &[&str] = &["sphere-cohomology", "counterexample", "simplex1", "simplex2"];
const ALL: &[&str] = &["sphere-cohomology", "counterexample", "simplex1", "simplex2", "sphere-cochains"];

fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> Vec<Letter> {
    if letters == 0 {
        return Vec::new();
    }
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..letters) as Letter).collect()
}

/// A homogeneous cochain built from a handful of random basis components.
pub fn random_cochain(rng: &mut ChaCha8Rng, cx: &CochainComplex, max_arity: usize) -> HochschildCochain {
    let n = cx.letters();
    let k = cx.module.dim();
    let degree_of = |w: &[Letter], m: usize| cx.module.degrees[m] - cx.base.comp.word_degree(w);
    let w0 = random_word(rng, n, max_arity);
    let m0 = rng.gen_range(0..k);
    let degree = degree_of(&w0, m0);
    let mut phi = HochschildCochain::single(degree, w0, F2Vector::unit(k, m0));
    for _ in 0..40 {
        let w = random_word(rng, n, max_arity);
        let m = rng.gen_range(0..k);
        if degree_of(&w, m) == degree && rng.gen_bool(0.5) {
            phi.add_component(w, &F2Vector::unit(k, m));
        }
    }
    phi
}

/// A homogeneous, generally non-closed, inner product with p, q ≤ `max_pq`.
pub fn random_hip(rng: &mut ChaCha8Rng, space: &HipSpace, max_pq: usize) -> HomotopyInnerProduct {
    let b = space.base();
    let n = b.letters();
    let module = &space.cx.module;
    let k = module.dim();
    let degree_of = |l: &[Letter], m: usize, r: &[Letter], out: usize| {
        -module.degrees[out] - b.comp.word_degree(l) - module.degrees[m] - b.comp.word_degree(r)
    };
    let sample = |rng: &mut ChaCha8Rng| {
        (random_word(rng, n, max_pq), rng.gen_range(0..k), random_word(rng, n, max_pq), rng.gen_range(0..k))
    };
    let (l, m, r, out) = sample(rng);
    let degree = degree_of(&l, m, &r, out);
    let mut f = HomotopyInnerProduct::zero(degree, None);
    f.add_component(HipKey { left: l, m, right: r }, &F2Vector::unit(k, out));
    for _ in 0..40 {
        let (l, m, r, out) = sample(rng);
        if degree_of(&l, m, &r, out) == degree && rng.gen_bool(0.5) {
            f.add_component(HipKey { left: l, m, right: r }, &F2Vector::unit(k, out));
        }
    }
    f
}

fn complex(rng: &mut ChaCha8Rng, names: &[&str]) -> (String, CochainComplex) {
    let name = *names.choose(rng).unwrap();
    let b = base(name);
    let cx = if rng.gen_bool(0.5) { CochainComplex::regular(b) } else { CochainComplex::dual(b) };
    (name.to_string(), cx)
}

fn run(seed: u64, mut case: impl FnMut(&mut ChaCha8Rng, usize) -> Result<(), String>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..CASES {
        case(&mut rng, i).map_err(|e| format!("case {i}: {e}"))?;
    }
    Ok(CASES)
}

pub fn d_squared() -> Outcome {
    run(1, |rng, _| {
        let (name, cx) = complex(rng, ALL);
        let phi = random_cochain(rng, &cx, 3);
        let dd = cx.differential(&cx.differential(&phi));
        if dd.is_zero() {
            Ok(())
        } else {
            Err(format!("{name}: D(D({})) = {}", cx.show(&phi), cx.show(&dd)))
        }
    })
}

pub fn b_squared() -> Outcome {
    run(2, |rng, _| {
        let name = *ALL.choose(rng).unwrap();
        let cx = CochainComplex::dual(base(name));
        let phi = random_cochain(rng, &cx, 4);
        let bb = cx.connes_b(&cx.connes_b(&phi).unwrap()).unwrap();
        if bb.is_zero() {
            Ok(())
        } else {
            Err(format!("{name}: B(B({})) = {}", cx.show(&phi), cx.show(&bb)))
        }
    })
}

pub fn cup_leibniz() -> Outcome {
    run(3, |rng, _| {
        let name = *ALL.choose(rng).unwrap();
        let cx = CochainComplex::regular(base(name));
        let phi = random_cochain(rng, &cx, 2);
        let rho = random_cochain(rng, &cx, 2);
        let lhs = cx.differential(&cx.cup(&phi, &rho).unwrap());
        let mut rhs = cx.cup(&cx.differential(&phi), &rho).unwrap();
        rhs.add_assign(&cx.cup(&phi, &cx.differential(&rho)).unwrap());
        if lhs.comps == rhs.comps {
            Ok(())
        } else {
            Err(format!("{name}: φ = {}, ρ = {}", cx.show(&phi), cx.show(&rho)))
        }
    })
}

/// CH(DF)(φ) = D(CH(F)(φ)) + CH(F)(Dφ).
pub fn ch_compatibility() -> Outcome {
    run(4, |rng, _| {
        let name = *ALL.choose(rng).unwrap();
        let b = base(name);
        let space = HipSpace::regular(b.clone());
        let (cx_a, cx_d) = (CochainComplex::regular(b.clone()), CochainComplex::dual(b));
        let f = random_hip(rng, &space, 2);
        let phi = random_cochain(rng, &cx_a, 2);
        let lhs = ch_of_hip(&space.differential(&f), &phi);
        let mut rhs = cx_d.differential(&ch_of_hip(&f, &phi));
        rhs.add_assign(&ch_of_hip(&f, &cx_a.differential(&phi)));
        if lhs.comps == rhs.comps {
            Ok(())
        } else {
            Err(format!("{name}: F = {}, φ = {}", space.show(&f), cx_a.show(&phi)))
        }
    })
}

/// D(Z^F(φ)) = Z^F(Dφ) for closed catalog inner products.
pub fn z_chain_map() -> Outcome {
    let hips: Vec<_> = ["sphere-strict", "sphere-tilde", "counterexample", "simplex0"]
        .iter()
        .map(|n| {
            let c = catalog_hip(n).unwrap();
            let f = c.expand(c.default_bound);
            assert!(f.bound.is_none());
            (c, f)
        })
        .collect();
    run(5, |rng, _| {
        let (c, f) = hips.choose(rng).unwrap();
        let cx_a = CochainComplex::regular(c.base.clone());
        let cx_d = CochainComplex::dual(c.base.clone());
        let phi = random_cochain(rng, &cx_a, 3);
        let lhs = cx_d.differential(&z_operator(&c.base, f, &phi));
        let rhs = z_operator(&c.base, f, &cx_a.differential(&phi));
        if lhs.comps == rhs.comps {
            Ok(())
        } else {
            Err(format!("{}: φ = {}, DZ = {}, ZD = {}", c.name, cx_a.show(&phi), cx_d.show(&lhs), cx_d.show(&rhs)))
        }
    })
}

struct Square {
    f: DgMorphism,
    a: Arc<NormalizedAlgebra>,
    b: Arc<NormalizedAlgebra>,
}

fn identity_square(name: &str) -> Square {
    let alg = builtin_algebra(name).unwrap();
    let b = NormalizedAlgebra::new(&alg).unwrap();
    Square { f: DgMorphism::identity(&alg), a: b.clone(), b }
}

/// Both squares of the pullback diagram, on random cochains over A and over B.
pub fn pullback_square() -> Outcome {
    let qi = make_quasi_iso_f();
    let squares = [Square {
            a: NormalizedAlgebra::new(&qi.target).unwrap(),
            b: NormalizedAlgebra::new(&qi.source).unwrap(),
            f: qi,
        },
        identity_square("simplex2"),
        identity_square("counterexample")];
    let tetra = catalog_hip("sphere-cochain").unwrap().expand(3);
    run(6, |rng, i| {
        let sq = &squares[i % squares.len()];
        let space_a = HipSpace::regular(sq.a.clone());
        let f_a = if i % squares.len() == 0 && rng.gen_bool(0.5) { tetra.clone() } else { random_hip(rng, &space_a, 2) };
        let (res_m, res_md) = restricted_modules(&sq.f);
        let f_b = restrict_hip(&sq.f, &sq.a, &sq.b, &f_a);
        // right square: φ over A
        let cx_a = CochainComplex::regular(sq.a.clone());
        let cx_ad = CochainComplex::dual(sq.a.clone());
        let cx_bm = CochainComplex::new(sq.b.clone(), res_m, ModuleKind::Other);
        let cx_bmd = CochainComplex::new(sq.b.clone(), res_md, ModuleKind::Other);
        let phi = random_cochain(rng, &cx_a, 3);
        let down_then_across = ch_of_morphism(&sq.f, &cx_ad, &cx_bmd, &ch_of_hip(&f_a, &phi));
        let across_then_down = ch_of_hip(&f_b, &ch_of_morphism(&sq.f, &cx_a, &cx_bm, &phi));
        if down_then_across.comps != across_then_down.comps {
            return Err(format!("right square fails on φ = {}", cx_a.show(&phi)));
        }
        // left square: ψ over B
        let cx_b = CochainComplex::regular(sq.b.clone());
        let psi = random_cochain(rng, &cx_b, 3);
        let pushed = CochainComplex::postcompose(&psi, 0, |v| sq.f.apply(v));
        let around = CochainComplex::postcompose(&ch_of_hip(&f_b, &pushed), 0, |g| sq.f.apply_dual(g));
        let direct = ch_of_hip(&pullback_hip(&sq.f, &sq.a, &sq.b, &f_a), &psi);
        if around.comps != direct.comps {
            return Err(format!("left square fails on ψ = {}", cx_b.show(&psi)));
        }
        Ok(())
    })
}

/// DF from sparse components equals DF from evaluating the defining sums.
/// Brute-force evaluation grows like letters^(2·bound), so larger algebras use bound 1.
pub fn structural_vs_evaluated() -> Outcome {
    run(7, |rng, _| {
        let name = *SMALL.choose(rng).unwrap();
        let space = HipSpace::regular(base(name));
        let bound = if space.base().letters() <= 3 { 2 } else { 1 };
        let f = random_hip(rng, &space, 2);
        let a = space.differential(&f).truncated(bound);
        let b = space.differential_by_evaluation(&f, bound);
        if a.comps == b.comps {
            Ok(())
        } else {
            Err(format!("{name}: F = {}", space.show(&f)))
        }
    })
}

pub fn all_suites() -> Vec<(&'static str, Outcome)> {
    vec![
        ("D∘D = 0", d_squared()),
        ("B∘B = 0", b_squared()),
        ("cup Leibniz rule", cup_leibniz()),
        ("CH(DF) = D∘CH(F) + CH(F)∘D", ch_compatibility()),
        ("Z^F is a chain map", z_chain_map()),
        ("pullback squares commute", pullback_square()),
        ("structural DF = evaluated DF", structural_vs_evaluated()),
    ]
}
