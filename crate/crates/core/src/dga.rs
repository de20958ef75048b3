//! Finite-dimensional dg-algebras, dg-bimodules and dg-morphisms over GF(2).
//!
//! Grading is homological: differentials lower degree by one.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::f2lin::{F2Matrix, F2Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgaError {
    #[error("unknown basis element `{0}`")]
    UnknownName(String),
    #[error("simplex dimension {0} is not supported (expected 0, 1 or 2)")]
    BadSimplexDimension(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

/// Unital dg-algebra with dense structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    pub names: Vec<String>,
    pub degrees: Vec<i32>,
    /// `diff[i]` is d of the i-th basis element.
    pub diff: Vec<F2Vector>,
    /// `mult[i][j]` is the product of basis elements i and j.
    pub mult: Vec<Vec<F2Vector>>,
    pub unit: F2Vector,
}

impl DgAlgebra {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DgaError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| DgaError::UnknownName(name.to_string()))
    }

    pub fn basis(&self, i: usize) -> F2Vector {
        F2Vector::unit(self.dim(), i)
    }

    /// Parses a sum such as `e0 + e1`; `0` denotes the zero vector.
    pub fn vector(&self, expr: &str) -> Result<F2Vector, DgaError> {
        parse_sum(expr, &self.names)
    }

    pub fn mul(&self, a: &F2Vector, b: &F2Vector) -> F2Vector {
        bilinear(a, b, self.dim(), |i, j| &self.mult[i][j])
    }

    pub fn d(&self, a: &F2Vector) -> F2Vector {
        linear(a, self.dim(), |i| &self.diff[i])
    }

    /// True when the differential vanishes identically.
    pub fn has_zero_differential(&self) -> bool {
        self.diff.iter().all(F2Vector::is_zero)
    }

    /// Renders a vector as a sum of basis names.
    pub fn show(&self, v: &F2Vector) -> String {
        show_sum(v, &self.names)
    }

    pub fn as_bimodule(&self) -> DgBimodule {
        DgBimodule::regular(self)
    }
}

/// Graded dg-bimodule over a fixed algebra; action tables are indexed by
/// algebra basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgBimodule {
    pub names: Vec<String>,
    pub degrees: Vec<i32>,
    pub diff: Vec<F2Vector>,
    /// `left[a][m]` is a·m.
    pub left: Vec<Vec<F2Vector>>,
    /// `right[m][a]` is m·a.
    pub right: Vec<Vec<F2Vector>>,
}

impl DgBimodule {
    /// The algebra acting on itself by multiplication.
    pub fn regular(alg: &DgAlgebra) -> Self {
        let n = alg.dim();
        DgBimodule {
            names: alg.names.clone(),
            degrees: alg.degrees.clone(),
            diff: alg.diff.clone(),
            left: (0..n).map(|a| (0..n).map(|m| alg.mult[a][m].clone()).collect()).collect(),
            right: (0..n).map(|m| (0..n).map(|a| alg.mult[m][a].clone()).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DgaError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| DgaError::UnknownName(name.to_string()))
    }

    pub fn vector(&self, expr: &str) -> Result<F2Vector, DgaError> {
        parse_sum(expr, &self.names)
    }

    pub fn d(&self, m: &F2Vector) -> F2Vector {
        linear(m, self.dim(), |i| &self.diff[i])
    }

    pub fn act_left(&self, a: &F2Vector, m: &F2Vector) -> F2Vector {
        bilinear(a, m, self.dim(), |i, j| &self.left[i][j])
    }

    pub fn act_right(&self, m: &F2Vector, a: &F2Vector) -> F2Vector {
        bilinear(m, a, self.dim(), |i, j| &self.right[i][j])
    }

    pub fn show(&self, v: &F2Vector) -> String {
        show_sum(v, &self.names)
    }

    /// Dual bimodule: degree of x* is minus that of x, the differential is
    /// the transpose, (n·a)(m) = n(a·m) and (a·n)(m) = n(m·a).
    pub fn dual(&self, alg: &DgAlgebra) -> DgBimodule {
        let n = self.dim();
        let na = alg.dim();
        let mut diff = vec![F2Vector::zeros(n); n];
        for (j, dj) in self.diff.iter().enumerate() {
            for i in dj.ones() {
                diff[i].set(j, true);
            }
        }
        // (x_i* · a)(x_j) = [a·x_j]_i and (a · x_i*)(x_j) = [x_j·a]_i.
        let mut right = vec![vec![F2Vector::zeros(n); na]; n];
        let mut left = vec![vec![F2Vector::zeros(n); n]; na];
        for a in 0..na {
            for j in 0..n {
                for i in self.left[a][j].ones() {
                    right[i][a].flip(j);
                }
                for i in self.right[j][a].ones() {
                    left[a][i].flip(j);
                }
            }
        }
        DgBimodule {
            names: self.names.iter().map(|s| format!("{s}*")).collect(),
            degrees: self.degrees.iter().map(|d| -d).collect(),
            diff,
            left,
            right,
        }
    }
}

/// Degree-zero map f: B → A stored by images of the basis of B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgMorphism {
    pub source: DgAlgebra,
    pub target: DgAlgebra,
    pub images: Vec<F2Vector>,
}

impl DgMorphism {
    pub fn identity(alg: &DgAlgebra) -> Self {
        DgMorphism { source: alg.clone(), target: alg.clone(), images: (0..alg.dim()).map(|i| alg.basis(i)).collect() }
    }

    pub fn apply(&self, b: &F2Vector) -> F2Vector {
        linear(b, self.target.dim(), |i| &self.images[i])
    }

    /// Transpose f*: A* → B*.
    pub fn apply_dual(&self, n: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.source.dim());
        for (i, img) in self.images.iter().enumerate() {
            if img.dot(n) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn matrix(&self) -> F2Matrix {
        F2Matrix::from_columns(self.target.dim(), &self.images).expect("image lengths match target")
    }
}

fn linear<'a>(v: &F2Vector, out_len: usize, image: impl Fn(usize) -> &'a F2Vector) -> F2Vector {
    let mut out = F2Vector::zeros(out_len);
    for i in v.ones() {
        out.add_assign(image(i));
    }
    out
}

fn bilinear<'a>(a: &F2Vector, b: &F2Vector, out_len: usize, table: impl Fn(usize, usize) -> &'a F2Vector) -> F2Vector {
    let mut out = F2Vector::zeros(out_len);
    for i in a.ones() {
        for j in b.ones() {
            out.add_assign(table(i, j));
        }
    }
    out
}

fn parse_sum(expr: &str, names: &[String]) -> Result<F2Vector, DgaError> {
    let mut v = F2Vector::zeros(names.len());
    let expr = expr.trim();
    if expr == "0" {
        return Ok(v);
    }
    for term in expr.split('+') {
        let term = term.trim();
        let i = names.iter().position(|n| n == term).ok_or_else(|| DgaError::UnknownName(term.to_string()))?;
        v.flip(i);
    }
    Ok(v)
}

fn show_sum(v: &F2Vector, names: &[String]) -> String {
    let terms: Vec<&str> = v.ones().map(|i| names[i].as_str()).collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Degree of a homogeneous nonzero vector.
pub fn homogeneous_degree(v: &F2Vector, degrees: &[i32]) -> Option<i32> {
    let mut it = v.ones().map(|i| degrees[i]);
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}

// ---------------------------------------------------------------------------
// Axiom checks

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    /// First failing basis tuple, rendered with basis names.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, witness: Option<String>) {
        self.checks.push(AxiomCheck { name: name.to_string(), pass: witness.is_none(), witness });
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{}: {}", c.name, if c.pass { "pass" } else { "FAIL" })?;
            if let Some(w) = &c.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn first_failure<I, F>(items: I, test: F) -> Option<String>
where
    I: IntoIterator,
    F: FnMut(I::Item) -> Option<String>,
{
    items.into_iter().find_map(test)
}

fn triples(n: usize, m: usize, k: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |i| (0..m).flat_map(move |j| (0..k).map(move |l| (i, j, l))))
}

fn pairs(n: usize, m: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..m).map(move |j| (i, j)))
}

fn shape_problem(alg: &DgAlgebra) -> Option<String> {
    let n = alg.dim();
    if alg.degrees.len() != n || alg.diff.len() != n || alg.mult.len() != n || alg.unit.len() != n {
        return Some("table sizes disagree with the basis".into());
    }
    if alg.diff.iter().any(|v| v.len() != n) || alg.mult.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
        return Some("structure constant lengths disagree with the basis".into());
    }
    None
}

/// Exhaustive check of the dg-algebra axioms on basis tuples.
pub fn check_dga(alg: &DgAlgebra) -> AxiomReport {
    let mut report = AxiomReport::default();
    if let Some(problem) = shape_problem(alg) {
        report.push("well-formed", Some(problem));
        return report;
    }
    let n = alg.dim();
    let names = &alg.names;
    let e = |i: usize| alg.basis(i);

    report.push(
        "d^2 = 0",
        first_failure(0..n, |i| {
            let dd = alg.d(&alg.d(&e(i)));
            (!dd.is_zero()).then(|| format!("d(d({})) = {}", names[i], alg.show(&dd)))
        }),
    );
    report.push(
        "leibniz",
        first_failure(pairs(n, n), |(i, j)| {
            let lhs = alg.d(&alg.mul(&e(i), &e(j)));
            let rhs = alg.mul(&alg.d(&e(i)), &e(j)).add(&alg.mul(&e(i), &alg.d(&e(j))));
            (lhs != rhs).then(|| {
                format!("d({a}·{b}) = {} but d({a})·{b} + {a}·d({b}) = {}", alg.show(&lhs), alg.show(&rhs), a = names[i], b = names[j])
            })
        }),
    );
    report.push(
        "associativity",
        first_failure(triples(n, n, n), |(i, j, k)| {
            let lhs = alg.mul(&alg.mul(&e(i), &e(j)), &e(k));
            let rhs = alg.mul(&e(i), &alg.mul(&e(j), &e(k)));
            (lhs != rhs).then(|| format!("({}·{})·{} != {}·({}·{})", names[i], names[j], names[k], names[i], names[j], names[k]))
        }),
    );
    report.push(
        "unitality",
        first_failure(0..n, |i| {
            let l = alg.mul(&alg.unit, &e(i));
            let r = alg.mul(&e(i), &alg.unit);
            (l != e(i) || r != e(i)).then(|| format!("1·{0} = {1}, {0}·1 = {2}", names[i], alg.show(&l), alg.show(&r)))
        }),
    );
    report.push(
        "degree additivity",
        first_failure(pairs(n, n), |(i, j)| {
            let p = &alg.mult[i][j];
            let want = alg.degrees[i] + alg.degrees[j];
            p.ones()
                .find(|&k| alg.degrees[k] != want)
                .map(|k| format!("{}·{} contains {} of degree {}", names[i], names[j], names[k], alg.degrees[k]))
        })
        .or_else(|| {
            first_failure(0..n, |i| {
                alg.diff[i]
                    .ones()
                    .find(|&k| alg.degrees[k] != alg.degrees[i] - 1)
                    .map(|k| format!("d({}) contains {} of degree {}", names[i], names[k], alg.degrees[k]))
            })
        })
        .or_else(|| homogeneous_degree(&alg.unit, &alg.degrees).filter(|&d| d == 0).is_none().then(|| "unit is not of degree 0".to_string())),
    );
    report
}

/// Exhaustive check of the dg-bimodule axioms of `module` over `alg`.
pub fn check_bimodule(alg: &DgAlgebra, module: &DgBimodule) -> AxiomReport {
    let mut report = AxiomReport::default();
    let n = alg.dim();
    let k = module.dim();
    if module.left.len() != n || module.right.len() != k || module.left.iter().any(|r| r.len() != k) || module.right.iter().any(|r| r.len() != n) {
        report.push("well-formed", Some("action table sizes disagree with the bases".into()));
        return report;
    }
    let a = |i: usize| alg.basis(i);
    let m = |i: usize| F2Vector::unit(k, i);
    let an = &alg.names;
    let mn = &module.names;

    report.push(
        "d^2 = 0",
        first_failure(0..k, |i| (!module.d(&module.d(&m(i))).is_zero()).then(|| format!("d(d({}))", mn[i]))),
    );
    report.push(
        "left action",
        first_failure(triples(n, n, k), |(x, y, z)| {
            let lhs = module.act_left(&alg.mul(&a(x), &a(y)), &m(z));
            let rhs = module.act_left(&a(x), &module.act_left(&a(y), &m(z)));
            (lhs != rhs).then(|| format!("({}·{})·{}", an[x], an[y], mn[z]))
        }),
    );
    report.push(
        "right action",
        first_failure(triples(k, n, n), |(z, x, y)| {
            let lhs = module.act_right(&m(z), &alg.mul(&a(x), &a(y)));
            let rhs = module.act_right(&module.act_right(&m(z), &a(x)), &a(y));
            (lhs != rhs).then(|| format!("{}·({}·{})", mn[z], an[x], an[y]))
        }),
    );
    report.push(
        "bimodule compatibility",
        first_failure(triples(n, k, n), |(x, z, y)| {
            let lhs = module.act_right(&module.act_left(&a(x), &m(z)), &a(y));
            let rhs = module.act_left(&a(x), &module.act_right(&m(z), &a(y)));
            (lhs != rhs).then(|| format!("({}·{})·{}", an[x], mn[z], an[y]))
        }),
    );
    report.push(
        "unitality",
        first_failure(0..k, |z| {
            (module.act_left(&alg.unit, &m(z)) != m(z) || module.act_right(&m(z), &alg.unit) != m(z)).then(|| format!("1 acting on {}", mn[z]))
        }),
    );
    report.push(
        "leibniz",
        first_failure(pairs(n, k), |(x, z)| {
            let l1 = module.d(&module.act_left(&a(x), &m(z)));
            let r1 = module.act_left(&alg.d(&a(x)), &m(z)).add(&module.act_left(&a(x), &module.d(&m(z))));
            let l2 = module.d(&module.act_right(&m(z), &a(x)));
            let r2 = module.act_right(&module.d(&m(z)), &a(x)).add(&module.act_right(&m(z), &alg.d(&a(x))));
            (l1 != r1 || l2 != r2).then(|| format!("d of {} acting on {}", an[x], mn[z]))
        }),
    );
    report.push(
        "degree additivity",
        first_failure(pairs(n, k), |(x, z)| {
            let want = alg.degrees[x] + module.degrees[z];
            let bad = module.left[x][z].ones().chain(module.right[z][x].ones()).find(|&w| module.degrees[w] != want);
            bad.map(|w| format!("{} acting on {} hits {}", an[x], mn[z], mn[w]))
        })
        .or_else(|| {
            first_failure(0..k, |z| {
                module.diff[z].ones().find(|&w| module.degrees[w] != module.degrees[z] - 1).map(|w| format!("d({}) hits {}", mn[z], mn[w]))
            })
        }),
    );
    report
}

/// Checks unitality, multiplicativity, chain-map property and degree zero.
pub fn check_morphism(f: &DgMorphism) -> AxiomReport {
    let mut report = AxiomReport::default();
    let b = &f.source;
    let a = &f.target;
    let e = |i: usize| b.basis(i);
    report.push("unit", (f.apply(&b.unit) != a.unit).then(|| format!("f(1) = {}", a.show(&f.apply(&b.unit)))));
    report.push(
        "multiplicative",
        first_failure(pairs(b.dim(), b.dim()), |(i, j)| {
            let lhs = f.apply(&b.mul(&e(i), &e(j)));
            let rhs = a.mul(&f.apply(&e(i)), &f.apply(&e(j)));
            (lhs != rhs).then(|| format!("f({0}·{1}) != f({0})·f({1})", b.names[i], b.names[j]))
        }),
    );
    report.push(
        "chain map",
        first_failure(0..b.dim(), |i| (f.apply(&b.d(&e(i))) != a.d(&f.apply(&e(i)))).then(|| format!("f(d {0}) != d f({0})", b.names[i]))),
    );
    report.push(
        "degree zero",
        first_failure(0..b.dim(), |i| {
            f.images[i].ones().find(|&k| a.degrees[k] != b.degrees[i]).map(|k| format!("f({}) contains {}", b.names[i], a.names[k]))
        }),
    );
    report
}

// ---------------------------------------------------------------------------
// Restriction along a morphism

/// Bimodule over the source of `f` with actions precomposed by `f`.
pub fn restrict_bimodule(module: &DgBimodule, f: &DgMorphism) -> DgBimodule {
    let k = module.dim();
    let nb = f.source.dim();
    DgBimodule {
        names: module.names.clone(),
        degrees: module.degrees.clone(),
        diff: module.diff.clone(),
        left: (0..nb).map(|b| (0..k).map(|m| module.act_left(&f.images[b], &F2Vector::unit(k, m))).collect()).collect(),
        right: (0..k).map(|m| (0..nb).map(|b| module.act_right(&F2Vector::unit(k, m), &f.images[b])).collect()).collect(),
    }
}

// ---------------------------------------------------------------------------
// Cohomology of the underlying complex

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyPiece {
    pub degree: i32,
    /// Cocycle representatives, as vectors in the full basis.
    pub basis: Vec<F2Vector>,
    /// Boundaries of this degree, used to reduce classes.
    boundaries: Vec<F2Vector>,
}

impl CohomologyPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a cocycle modulo boundaries.
    pub fn coords(&self, z: &F2Vector) -> Option<F2Vector> {
        let mut cols = self.boundaries.clone();
        cols.extend(self.basis.iter().cloned());
        let m = F2Matrix::from_columns(z.len(), &cols).ok()?;
        let x = m.solve(z).ok()??;
        Some(x.slice(self.boundaries.len(), cols.len()))
    }
}

/// Per-degree basis of ker d / im d; degrees with zero cohomology are omitted.
pub fn algebra_cohomology(alg: &DgAlgebra) -> Vec<CohomologyPiece> {
    complex_cohomology(&alg.degrees, &alg.diff)
}

fn complex_cohomology(degrees: &[i32], diff: &[F2Vector]) -> Vec<CohomologyPiece> {
    let n = degrees.len();
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &d) in degrees.iter().enumerate() {
        by_degree.entry(d).or_default().push(i);
    }
    let mut out = Vec::new();
    for (&deg, idx) in by_degree.iter().rev() {
        let d_cols: Vec<F2Vector> = idx.iter().map(|&i| diff[i].clone()).collect();
        let d_mat = F2Matrix::from_columns(n, &d_cols).expect("lengths");
        let cycles: Vec<F2Vector> = d_mat
            .kernel_basis()
            .iter()
            .map(|k| {
                let mut v = F2Vector::zeros(n);
                for j in k.ones() {
                    v.flip(idx[j]);
                }
                v
            })
            .collect();
        let boundaries: Vec<F2Vector> = by_degree
            .get(&(deg + 1))
            .map(|up| up.iter().map(|&i| diff[i].clone()).filter(|v| !v.is_zero()).collect())
            .unwrap_or_default();
        let basis = extend_basis(&boundaries, &cycles);
        if !basis.is_empty() {
            out.push(CohomologyPiece { degree: deg, basis, boundaries });
        }
    }
    out
}

/// Greedily picks vectors from `candidates` that are independent modulo `span`.
pub(crate) fn extend_basis(span: &[F2Vector], candidates: &[F2Vector]) -> Vec<F2Vector> {
    let Some(len) = span.first().or(candidates.first()).map(F2Vector::len) else {
        return Vec::new();
    };
    let mut cols: Vec<F2Vector> = span.to_vec();
    let mut rank = F2Matrix::from_columns(len, &cols).expect("lengths").rank();
    let mut chosen = Vec::new();
    for c in candidates {
        cols.push(c.clone());
        let r = F2Matrix::from_columns(len, &cols).expect("lengths").rank();
        if r > rank {
            rank = r;
            chosen.push(c.clone());
        } else {
            cols.pop();
        }
    }
    chosen
}

/// Matrix of the map induced by `f` on cohomology in one degree, or `None`
/// when one side is missing from the computed pieces.
pub fn induced_cohomology_map(f: &DgMorphism, degree: i32) -> Option<F2Matrix> {
    let hb = algebra_cohomology(&f.source);
    let ha = algebra_cohomology(&f.target);
    let src = hb.iter().find(|p| p.degree == degree);
    let dst = ha.iter().find(|p| p.degree == degree);
    match (src, dst) {
        (None, None) => Some(F2Matrix::zeros(0, 0)),
        (Some(s), None) => Some(F2Matrix::zeros(0, s.dim())),
        (None, Some(t)) => Some(F2Matrix::zeros(t.dim(), 0)),
        (Some(s), Some(t)) => {
            let cols: Option<Vec<F2Vector>> = s.basis.iter().map(|z| t.coords(&f.apply(z))).collect();
            F2Matrix::from_columns(t.dim(), &cols?).ok()
        }
    }
}

/// True when `f` induces a bijection on cohomology in every degree.
pub fn is_quasi_isomorphism(f: &DgMorphism) -> bool {
    let mut degrees: Vec<i32> = f.source.degrees.iter().chain(&f.target.degrees).copied().collect();
    degrees.sort_unstable();
    degrees.dedup();
    degrees.iter().all(|&d| induced_cohomology_map(f, d).is_some_and(|m| m.rows() == m.cols() && m.rank() == m.rows()))
}

// ---------------------------------------------------------------------------
// Catalog

/// Builder used by the catalog and the file parser.
#[derive(Clone, Debug, Default)]
pub struct AlgebraBuilder {
    names: Vec<String>,
    degrees: Vec<i32>,
    diff: Vec<(String, String)>,
    mult: Vec<(String, String, String)>,
    unit: Option<String>,
}

impl AlgebraBuilder {
    pub fn generator(&mut self, name: &str, degree: i32) -> &mut Self {
        self.names.push(name.to_string());
        self.degrees.push(degree);
        self
    }

    pub fn d(&mut self, name: &str, sum: &str) -> &mut Self {
        self.diff.push((name.to_string(), sum.to_string()));
        self
    }

    pub fn mul(&mut self, a: &str, b: &str, sum: &str) -> &mut Self {
        self.mult.push((a.to_string(), b.to_string(), sum.to_string()));
        self
    }

    pub fn unit(&mut self, sum: &str) -> &mut Self {
        self.unit = Some(sum.to_string());
        self
    }

    pub fn build(&self) -> Result<DgAlgebra, DgaError> {
        let n = self.names.len();
        for (i, name) in self.names.iter().enumerate() {
            if self.names[..i].contains(name) {
                return Err(DgaError::Invalid(format!("duplicate generator `{name}`")));
            }
        }
        let idx = |s: &str| self.names.iter().position(|x| x == s).ok_or_else(|| DgaError::UnknownName(s.to_string()));
        let mut diff = vec![F2Vector::zeros(n); n];
        for (name, sum) in &self.diff {
            diff[idx(name)?].add_assign(&parse_sum(sum, &self.names)?);
        }
        let mut mult = vec![vec![F2Vector::zeros(n); n]; n];
        for (a, b, sum) in &self.mult {
            mult[idx(a)?][idx(b)?].add_assign(&parse_sum(sum, &self.names)?);
        }
        let unit = parse_sum(self.unit.as_deref().ok_or_else(|| DgaError::Invalid("missing unit".into()))?, &self.names)?;
        Ok(DgAlgebra { names: self.names.clone(), degrees: self.degrees.clone(), diff, mult, unit })
    }
}

/// Name of a simplex from its sorted vertex list: e for vertices, b for
/// edges, c for triangles.
pub fn simplex_name(vertices: &[usize]) -> String {
    let prefix = match vertices.len() {
        1 => "e",
        2 => "b",
        3 => "c",
        _ => "s",
    };
    let digits: String = vertices.iter().map(|v| v.to_string()).collect();
    format!("{prefix}{digits}")
}

/// Normalized simplicial cochains of a simplicial complex given by its
/// top-dimensional faces (sorted vertex lists, dimension at most 2), with the
/// Alexander-Whitney cup product.
pub fn simplicial_cochain_algebra(faces: &[Vec<usize>]) -> Result<DgAlgebra, DgaError> {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    for face in faces {
        if face.is_empty() || face.len() > 3 || face.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DgaError::Invalid(format!("bad face {face:?}")));
        }
        let k = face.len();
        for mask in 1u32..(1 << k) {
            let s: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| face[i]).collect();
            if !simplices.contains(&s) {
                simplices.push(s);
            }
        }
    }
    simplices.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let mut builder = AlgebraBuilder::default();
    for s in &simplices {
        builder.generator(&simplex_name(s), -(s.len() as i32 - 1));
    }
    for s in &simplices {
        let cofaces: Vec<String> = simplices
            .iter()
            .filter(|t| t.len() == s.len() + 1 && s.iter().all(|v| t.contains(v)))
            .map(|t| simplex_name(t))
            .collect();
        if !cofaces.is_empty() {
            builder.d(&simplex_name(s), &cofaces.join(" + "));
        }
    }
    // σ·τ = σ∪τ when the last vertex of σ is the first of τ and σ∪τ is a simplex.
    for s in &simplices {
        for t in &simplices {
            if s.last() != t.first() {
                continue;
            }
            let mut u = s.clone();
            u.extend_from_slice(&t[1..]);
            if simplices.contains(&u) {
                builder.mul(&simplex_name(s), &simplex_name(t), &simplex_name(&u));
            }
        }
    }
    let vertices: Vec<String> = simplices.iter().filter(|s| s.len() == 1).map(|s| simplex_name(s)).collect();
    builder.unit(&vertices.join(" + "));
    builder.build()
}

/// Cohomology of the 2-sphere: e in degree 0 (unit), s in degree -2, s·s = 0.
pub fn make_sphere_cohomology() -> DgAlgebra {
    AlgebraBuilder::default()
        .generator("e", 0)
        .generator("s", -2)
        .mul("e", "e", "e")
        .mul("e", "s", "s")
        .mul("s", "e", "s")
        .unit("e")
        .build()
        .expect("static definition")
}

/// Cochains of a single simplex of dimension `n` on the given vertex labels.
pub fn make_simplex_algebra(n: usize, labels: &[usize]) -> Result<DgAlgebra, DgaError> {
    if n > 2 {
        return Err(DgaError::BadSimplexDimension(n));
    }
    if labels.len() != n + 1 {
        return Err(DgaError::Invalid(format!("a {n}-simplex needs {} vertex labels", n + 1)));
    }
    let mut face = labels.to_vec();
    face.sort_unstable();
    simplicial_cochain_algebra(&[face])
}

/// Cochains of the boundary of the tetrahedron on vertices 0..3.
pub fn make_sphere_cochain_algebra() -> DgAlgebra {
    let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
    simplicial_cochain_algebra(&faces).expect("static definition")
}

/// e (degree 0, unit), b (degree -1), c (degree -2), b·b = c, zero differential.
pub fn make_counterexample_algebra() -> DgAlgebra {
    AlgebraBuilder::default()
        .generator("e", 0)
        .generator("b", -1)
        .generator("c", -2)
        .mul("e", "e", "e")
        .mul("e", "b", "b")
        .mul("b", "e", "b")
        .mul("e", "c", "c")
        .mul("c", "e", "c")
        .mul("b", "b", "c")
        .unit("e")
        .build()
        .expect("static definition")
}

/// The map from sphere cohomology to tetrahedral cochains sending e to the
/// unit and s to c012.
pub fn make_quasi_iso_f() -> DgMorphism {
    let source = make_sphere_cohomology();
    let target = make_sphere_cochain_algebra();
    let images = vec![target.unit.clone(), target.vector("c012").expect("c012 exists")];
    DgMorphism { source, target, images }
}

/// Built-in algebras by name.
pub fn builtin_algebra(name: &str) -> Result<DgAlgebra, DgaError> {
    match name {
        "sphere-cohomology" => Ok(make_sphere_cohomology()),
        "sphere-cochains" => Ok(make_sphere_cochain_algebra()),
        "counterexample" => Ok(make_counterexample_algebra()),
        "simplex0" => make_simplex_algebra(0, &[0]),
        "simplex1" => make_simplex_algebra(1, &[0, 1]),
        "simplex2" => make_simplex_algebra(2, &[0, 1, 2]),
        other => Err(DgaError::UnknownName(other.to_string())),
    }
}

pub const BUILTIN_ALGEBRAS: &[&str] = &["sphere-cohomology", "sphere-cochains", "counterexample", "simplex0", "simplex1", "simplex2"];

// ---------------------------------------------------------------------------
// Text format

/// Parses the line-oriented algebra format:
///
/// ```text
/// generator e degree 0
/// generator s degree -2
/// d e = 0
/// mul s e = s
/// unit = e
/// ```
///
/// `#` starts a comment. Unlisted products and differentials are zero.
pub fn parse_algebra(text: &str) -> Result<DgAlgebra, DgaError> {
    let mut builder = AlgebraBuilder::default();
    let mut names: Vec<String> = Vec::new();
    let mut unit_seen = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| DgaError::Parse { line: lineno + 1, msg };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let check_sum = |sum: &str| -> Result<(), DgaError> {
            parse_sum(sum, &names).map(|_| ()).map_err(|e| err(e.to_string()))
        };
        match tokens[0] {
            "generator" => {
                if tokens.len() != 4 || tokens[2] != "degree" {
                    return Err(err("expected `generator <name> degree <int>`".into()));
                }
                let degree: i32 = tokens[3].parse().map_err(|_| err(format!("bad degree `{}`", tokens[3])))?;
                if names.iter().any(|n| n == tokens[1]) {
                    return Err(err(format!("duplicate generator `{}`", tokens[1])));
                }
                if tokens[1].contains('+') || tokens[1] == "0" {
                    return Err(err(format!("invalid generator name `{}`", tokens[1])));
                }
                names.push(tokens[1].to_string());
                builder.generator(tokens[1], degree);
            }
            "d" => {
                let (lhs, rhs) = line[1..].split_once('=').ok_or_else(|| err("expected `d <name> = <sum>`".into()))?;
                let lhs = lhs.trim();
                if !names.iter().any(|n| n == lhs) {
                    return Err(err(format!("unknown basis element `{lhs}`")));
                }
                check_sum(rhs)?;
                builder.d(lhs, rhs.trim());
            }
            "mul" => {
                let (lhs, rhs) = line[3..].split_once('=').ok_or_else(|| err("expected `mul <a> <b> = <sum>`".into()))?;
                let factors: Vec<&str> = lhs.split_whitespace().collect();
                if factors.len() != 2 {
                    return Err(err("expected two factors".into()));
                }
                for f in &factors {
                    if !names.iter().any(|n| n == f) {
                        return Err(err(format!("unknown basis element `{f}`")));
                    }
                }
                check_sum(rhs)?;
                builder.mul(factors[0], factors[1], rhs.trim());
            }
            "unit" => {
                let (_, rhs) = line.split_once('=').ok_or_else(|| err("expected `unit = <sum>`".into()))?;
                check_sum(rhs)?;
                if unit_seen {
                    return Err(err("unit given twice".into()));
                }
                unit_seen = true;
                builder.unit(rhs.trim());
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if !unit_seen {
        return Err(DgaError::Parse { line: text.lines().count(), msg: "missing unit".into() });
    }
    builder.build()
}

/// Inverse of [`parse_algebra`].
pub fn format_algebra(alg: &DgAlgebra) -> String {
    let mut out = String::new();
    for (n, d) in alg.names.iter().zip(&alg.degrees) {
        out.push_str(&format!("generator {n} degree {d}\n"));
    }
    for (i, v) in alg.diff.iter().enumerate() {
        if !v.is_zero() {
            out.push_str(&format!("d {} = {}\n", alg.names[i], alg.show(v)));
        }
    }
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            if !alg.mult[i][j].is_zero() {
                out.push_str(&format!("mul {} {} = {}\n", alg.names[i], alg.names[j], alg.show(&alg.mult[i][j])));
            }
        }
    }
    out.push_str(&format!("unit = {}\n", alg.show(&alg.unit)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_passes_axioms() {
        for name in BUILTIN_ALGEBRAS {
            let a = builtin_algebra(name).unwrap();
            let r = check_dga(&a);
            assert!(r.all_pass(), "{name}: {r}");
            let m = a.as_bimodule();
            assert!(check_bimodule(&a, &m).all_pass(), "{name} regular");
            assert!(check_bimodule(&a, &m.dual(&a)).all_pass(), "{name} dual");
        }
    }

    #[test]
    fn sphere_cohomology_data() {
        let a = make_sphere_cohomology();
        let s = a.vector("s").unwrap();
        assert_eq!(a.degrees[a.index_of("s").unwrap()], -2);
        assert!(a.mul(&s, &s).is_zero());
    }

    #[test]
    fn simplex_algebras() {
        let a1 = make_simplex_algebra(1, &[0, 1]).unwrap();
        assert_eq!(a1.names, vec!["e0", "e1", "b01"]);
        assert_eq!(a1.unit, a1.vector("e0 + e1").unwrap());
        assert_eq!(a1.d(&a1.vector("e0").unwrap()), a1.vector("b01").unwrap());
        assert_eq!(a1.d(&a1.vector("e1").unwrap()), a1.vector("b01").unwrap());

        let a2 = make_simplex_algebra(2, &[0, 1, 2]).unwrap();
        assert_eq!(a2.names, vec!["e0", "e1", "e2", "b01", "b02", "b12", "c012"]);
        for b in ["b01", "b02", "b12"] {
            assert_eq!(a2.d(&a2.vector(b).unwrap()), a2.vector("c012").unwrap());
        }
        assert_eq!(a2.d(&a2.vector("e0").unwrap()), a2.vector("b01 + b02").unwrap());
        assert_eq!(a2.mul(&a2.vector("b01").unwrap(), &a2.vector("b12").unwrap()), a2.vector("c012").unwrap());
        assert!(a2.mul(&a2.vector("b12").unwrap(), &a2.vector("b01").unwrap()).is_zero());
        assert!(a2.mul(&a2.vector("b01").unwrap(), &a2.vector("b02").unwrap()).is_zero());

        let a0 = make_simplex_algebra(0, &[0]).unwrap();
        assert!(check_dga(&a0).all_pass());
        assert_eq!(make_simplex_algebra(3, &[0, 1, 2, 3]), Err(DgaError::BadSimplexDimension(3)));
    }

    #[test]
    fn tetrahedral_algebra() {
        let a = make_sphere_cochain_algebra();
        assert_eq!(a.dim(), 14);
        assert_eq!(a.d(&a.vector("b12").unwrap()), a.vector("c012 + c123").unwrap());
        assert_eq!(a.mul(&a.vector("c012").unwrap(), &a.vector("e2").unwrap()), a.vector("c012").unwrap());
        assert_eq!(a.unit, a.vector("e0 + e1 + e2 + e3").unwrap());
        assert_eq!(a.d(&a.vector("e3").unwrap()), a.vector("b03 + b13 + b23").unwrap());
    }

    #[test]
    fn counterexample_products() {
        let a = make_counterexample_algebra();
        let b = a.vector("b").unwrap();
        let c = a.vector("c").unwrap();
        assert_eq!(a.mul(&b, &b), c);
        assert!(a.mul(&b, &c).is_zero());
        assert!(a.mul(&c, &c).is_zero());
    }

    #[test]
    fn corrupted_leibniz_is_caught() {
        let mut a = make_simplex_algebra(1, &[0, 1]).unwrap();
        a.diff[0] = F2Vector::zeros(3);
        let r = check_dga(&a);
        assert!(!r.get("leibniz").unwrap().pass);
        assert!(r.get("leibniz").unwrap().witness.is_some());
    }

    #[test]
    fn dual_of_sphere_cohomology() {
        let a = make_sphere_cohomology();
        let m = a.as_bimodule();
        let d = m.dual(&a);
        assert_eq!(d.degrees, vec![0, 2]);
        let s = a.vector("s").unwrap();
        let s_star = d.vector("s*").unwrap();
        let e_star = d.vector("e*").unwrap();
        assert_eq!(d.act_left(&s, &s_star), e_star);
        assert_eq!(d.act_right(&s_star, &s), e_star);
        assert!(d.act_left(&s, &e_star).is_zero());
        for v in [&e_star, &s_star] {
            assert_eq!(&d.act_left(&a.unit, v), v);
            assert_eq!(&d.act_right(v, &a.unit), v);
        }
    }

    #[test]
    fn dual_right_action_on_edge_algebra() {
        // (b01*·e0)(x) = b01*(e0·x): e0·e0 = e0, e0·e1 = 0, e0·b01 = b01.
        let a = make_simplex_algebra(1, &[0, 1]).unwrap();
        let d = a.as_bimodule().dual(&a);
        let b_star = d.vector("b01*").unwrap();
        let e0 = a.vector("e0").unwrap();
        let mut oracle = F2Vector::zeros(3);
        for x in 0..3 {
            if a.mul(&e0, &a.basis(x)).get(2) {
                oracle.set(x, true);
            }
        }
        assert_eq!(d.act_right(&b_star, &e0), oracle);
        assert_eq!(oracle, b_star);
    }

    #[test]
    fn double_dual_is_original() {
        for name in BUILTIN_ALGEBRAS {
            let a = builtin_algebra(name).unwrap();
            let m = a.as_bimodule();
            let dd = m.dual(&a).dual(&a);
            assert_eq!(dd.degrees, m.degrees);
            assert_eq!(dd.diff, m.diff);
            assert_eq!(dd.left, m.left);
            assert_eq!(dd.right, m.right);
        }
    }

    #[test]
    fn quasi_iso() {
        let f = make_quasi_iso_f();
        assert!(check_morphism(&f).all_pass());
        let s = f.source.vector("s").unwrap();
        let fs = f.apply(&s);
        assert!(f.target.mul(&fs, &fs).is_zero());
        assert!(f.target.d(&fs).is_zero());

        let h = algebra_cohomology(&f.target);
        let dims: Vec<(i32, usize)> = h.iter().map(|p| (p.degree, p.dim())).collect();
        assert_eq!(dims, vec![(0, 1), (-2, 1)]);
        assert!(is_quasi_isomorphism(&f));
    }

    #[test]
    fn zero_differential_cohomology_is_itself() {
        for a in [make_sphere_cohomology(), make_counterexample_algebra()] {
            let total: usize = algebra_cohomology(&a).iter().map(|p| p.dim()).sum();
            assert_eq!(total, a.dim());
        }
    }

    #[test]
    fn restriction_along_f() {
        let f = make_quasi_iso_f();
        let m = restrict_bimodule(&f.target.as_bimodule(), &f);
        assert!(check_bimodule(&f.source, &m).all_pass());
        let s = f.source.vector("s").unwrap();
        assert!(m.act_left(&s, &m.vector("b02").unwrap()).is_zero());
        let e2 = m.vector("e2").unwrap();
        assert_eq!(m.act_left(&f.source.unit, &e2), e2);
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        for name in BUILTIN_ALGEBRAS {
            let a = builtin_algebra(name).unwrap();
            assert_eq!(parse_algebra(&format_algebra(&a)).unwrap(), a);
        }
        let bad = "generator e degree 0\nmul e x = e\nunit = e\n";
        assert!(matches!(parse_algebra(bad), Err(DgaError::Parse { line: 2, .. })));
        assert!(matches!(parse_algebra("generator e degree zero\n"), Err(DgaError::Parse { line: 1, .. })));
        assert!(matches!(parse_algebra("generator e degree 0\n"), Err(DgaError::Parse { .. })));
    }
}
