//! Normalized Hochschild cochains of a dg-algebra with bimodule coefficients.
//!
//! Normalized cochains are tables indexed by words in a complement of the
//! unit, so every operation here works on sparse word maps. Letters carry
//! the shifted degree deg(a) + 1.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::dga::{extend_basis, homogeneous_degree, DgAlgebra, DgBimodule, DgMorphism};
use crate::f2lin::{F2Matrix, F2Vector, LinError};

pub type Letter = u16;
pub type Word = Vec<Letter>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HochError {
    #[error("the unit is zero")]
    ZeroUnit,
    #[error("operation needs {0} coefficients")]
    ModuleMismatch(&'static str),
    #[error("cochain of degree {degree} is not closed")]
    NotClosed { degree: i32 },
    #[error("cochain is exact only up to arity {have}, need {need}")]
    BoundTooSmall { have: usize, need: usize },
    #[error("degree {0} is outside the computed range")]
    DegreeOutOfRange(i32),
    #[error("cochain class is not in the computed span (degree {0} is truncated)")]
    NotInSpan(i32),
    #[error("component at {word:?} has the wrong degree")]
    DegreeMismatch { word: Word },
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Minimum of two arity bounds, `None` meaning unbounded.
pub fn min_bound(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Bound of a result that needs one more input than it has.
pub fn dec_bound(b: Option<usize>) -> Option<usize> {
    b.map(|n| {
        assert!(n >= 1, "arity bound 0 cannot be lowered");
        n - 1
    })
}

/// Complement of span(unit): every standard basis element except the pivot,
/// the first coordinate where the unit is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementBasis {
    pub pivot: usize,
    /// Algebra basis index of each letter.
    pub letters: Vec<usize>,
    pub shifted_degrees: Vec<i32>,
    unit: F2Vector,
}

impl ComplementBasis {
    pub fn new(alg: &DgAlgebra) -> Result<Self, HochError> {
        let pivot = alg.unit.first_one().ok_or(HochError::ZeroUnit)?;
        let letters: Vec<usize> = (0..alg.dim()).filter(|&i| i != pivot).collect();
        let shifted_degrees = letters.iter().map(|&i| alg.degrees[i] + 1).collect();
        Ok(ComplementBasis { pivot, letters, shifted_degrees, unit: alg.unit.clone() })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Coordinates of a + λ·1 in the letters, with λ chosen to clear the pivot.
    pub fn project(&self, a: &F2Vector) -> F2Vector {
        let mut shifted = a.clone();
        if a.get(self.pivot) {
            shifted.add_assign(&self.unit);
        }
        let mut out = F2Vector::zeros(self.len());
        for (x, &i) in self.letters.iter().enumerate() {
            if shifted.get(i) {
                out.set(x, true);
            }
        }
        out
    }

    pub fn embed(&self, x: Letter) -> F2Vector {
        F2Vector::unit(self.unit.len(), self.letters[x as usize])
    }

    /// The functional a ↦ [P(a)]_x, as an element of A*.
    pub fn letter_dual(&self, x: Letter) -> F2Vector {
        let mut v = F2Vector::unit(self.unit.len(), self.letters[x as usize]);
        if self.unit.get(self.letters[x as usize]) {
            v.set(self.pivot, true);
        }
        v
    }

    pub fn letter_of(&self, basis_index: usize) -> Option<Letter> {
        self.letters.iter().position(|&i| i == basis_index).map(|x| x as Letter)
    }

    pub fn word_degree(&self, w: &[Letter]) -> i32 {
        w.iter().map(|&x| self.shifted_degrees[x as usize]).sum()
    }
}

/// An algebra together with its complement basis and letter-level tables for
/// the differential and product.
#[derive(Clone, Debug)]
pub struct NormalizedAlgebra {
    pub alg: DgAlgebra,
    pub comp: ComplementBasis,
    d_fwd: Vec<Vec<Letter>>,
    d_pre: Vec<Vec<Letter>>,
    prod_fwd: Vec<Vec<Vec<Letter>>>,
    prod_pre: Vec<Vec<(Letter, Letter)>>,
}

impl NormalizedAlgebra {
    pub fn new(alg: &DgAlgebra) -> Result<Arc<Self>, HochError> {
        let comp = ComplementBasis::new(alg)?;
        let n = comp.len();
        let letters = |v: &F2Vector| -> Vec<Letter> { comp.project(v).ones().map(|x| x as Letter).collect() };
        let d_fwd: Vec<Vec<Letter>> = (0..n).map(|y| letters(&alg.d(&comp.embed(y as Letter)))).collect();
        let mut d_pre = vec![Vec::new(); n];
        for (y, xs) in d_fwd.iter().enumerate() {
            for &x in xs {
                d_pre[x as usize].push(y as Letter);
            }
        }
        let prod_fwd: Vec<Vec<Vec<Letter>>> = (0..n)
            .map(|y1| (0..n).map(|y2| letters(&alg.mul(&comp.embed(y1 as Letter), &comp.embed(y2 as Letter)))).collect())
            .collect();
        let mut prod_pre = vec![Vec::new(); n];
        for (y1, row) in prod_fwd.iter().enumerate() {
            for (y2, xs) in row.iter().enumerate() {
                for &x in xs {
                    prod_pre[x as usize].push((y1 as Letter, y2 as Letter));
                }
            }
        }
        Ok(Arc::new(NormalizedAlgebra { alg: alg.clone(), comp, d_fwd, d_pre, prod_fwd, prod_pre }))
    }

    pub fn letters(&self) -> usize {
        self.comp.len()
    }

    pub fn letter_name(&self, x: Letter) -> &str {
        &self.alg.names[self.comp.letters[x as usize]]
    }

    /// Letters y whose projected differential contains x.
    pub fn d_preimage(&self, x: Letter) -> &[Letter] {
        &self.d_pre[x as usize]
    }

    pub fn d_letters(&self, y: Letter) -> &[Letter] {
        &self.d_fwd[y as usize]
    }

    /// Pairs (y1, y2) whose projected product contains x.
    pub fn product_preimage(&self, x: Letter) -> &[(Letter, Letter)] {
        &self.prod_pre[x as usize]
    }

    pub fn product_letters(&self, y1: Letter, y2: Letter) -> &[Letter] {
        &self.prod_fwd[y1 as usize][y2 as usize]
    }

    pub fn show_word(&self, w: &[Letter]) -> String {
        let names: Vec<&str> = w.iter().map(|&x| self.letter_name(x)).collect();
        format!("({})", names.join(","))
    }

    /// Parses a letter by algebra basis name; the pivot is not a letter.
    pub fn letter(&self, name: &str) -> Option<Letter> {
        let i = self.alg.index_of(name).ok()?;
        self.comp.letter_of(i)
    }
}

/// Which coefficient module a complex uses; some operations need a specific one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Regular,
    Dual,
    Other,
}

/// The normalized cochain complex of an algebra with coefficients in a bimodule.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    pub base: Arc<NormalizedAlgebra>,
    pub module: DgBimodule,
    pub kind: ModuleKind,
    /// `left[x][m]` is (letter x)·m.
    left: Vec<Vec<F2Vector>>,
    /// `right[m][x]` is m·(letter x).
    right: Vec<Vec<F2Vector>>,
}

impl CochainComplex {
    pub fn new(base: Arc<NormalizedAlgebra>, module: DgBimodule, kind: ModuleKind) -> Self {
        let k = module.dim();
        let n = base.letters();
        let left = (0..n)
            .map(|x| (0..k).map(|m| module.left[base.comp.letters[x]][m].clone()).collect())
            .collect();
        let right = (0..k)
            .map(|m| (0..n).map(|x| module.right[m][base.comp.letters[x]].clone()).collect())
            .collect();
        CochainComplex { base, module, kind, left, right }
    }

    pub fn regular(base: Arc<NormalizedAlgebra>) -> Self {
        let m = base.alg.as_bimodule();
        Self::new(base, m, ModuleKind::Regular)
    }

    pub fn dual(base: Arc<NormalizedAlgebra>) -> Self {
        let m = base.alg.as_bimodule().dual(&base.alg);
        Self::new(base, m, ModuleKind::Dual)
    }

    pub fn letters(&self) -> usize {
        self.base.letters()
    }

    pub fn act_left_letter(&self, x: Letter, v: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.module.dim());
        for m in v.ones() {
            out.add_assign(&self.left[x as usize][m]);
        }
        out
    }

    pub fn act_right_letter(&self, v: &F2Vector, x: Letter) -> F2Vector {
        let mut out = F2Vector::zeros(self.module.dim());
        for m in v.ones() {
            out.add_assign(&self.right[m][x as usize]);
        }
        out
    }

    pub fn is_bigraded(&self) -> bool {
        self.base.alg.has_zero_differential() && self.module.diff.iter().all(F2Vector::is_zero)
    }

    fn require(&self, kind: ModuleKind, what: &'static str) -> Result<(), HochError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(HochError::ModuleMismatch(what))
        }
    }

    /// Checks that every component has module degree |φ| + word degree.
    pub fn check_degrees(&self, phi: &HochschildCochain) -> Result<(), HochError> {
        for (w, v) in &phi.comps {
            let want = phi.degree + self.base.comp.word_degree(w);
            if homogeneous_degree(v, &self.module.degrees) != Some(want) {
                return Err(HochError::DegreeMismatch { word: w.clone() });
            }
        }
        Ok(())
    }

    pub fn show(&self, phi: &HochschildCochain) -> String {
        let parts: Vec<String> =
            phi.comps.iter().map(|(w, v)| format!("{} -> {}", self.base.show_word(w), self.module.show(v))).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("; ")
        }
    }

    // -----------------------------------------------------------------------
    // Operations

    /// Hochschild differential D = D0 + D1 with signs dropped.
    pub fn differential(&self, phi: &HochschildCochain) -> HochschildCochain {
        let mut out = HochschildCochain::zero(phi.degree - 1, phi.bound);
        let n = self.letters() as Letter;
        for (u, v) in &phi.comps {
            out.add_component(u.clone(), &self.module.d(v));
            for j in 0..u.len() {
                for &y in self.base.d_preimage(u[j]) {
                    let mut w = u.clone();
                    w[j] = y;
                    out.add_component(w, v);
                }
                for &(y1, y2) in self.base.product_preimage(u[j]) {
                    let mut w = Vec::with_capacity(u.len() + 1);
                    w.extend_from_slice(&u[..j]);
                    w.push(y1);
                    w.push(y2);
                    w.extend_from_slice(&u[j + 1..]);
                    out.add_component(w, v);
                }
            }
            for x in 0..n {
                let mut w = Vec::with_capacity(u.len() + 1);
                w.push(x);
                w.extend_from_slice(u);
                out.add_component(w, &self.act_left_letter(x, v));
                let mut w = u.clone();
                w.push(x);
                out.add_component(w, &self.act_right_letter(v, x));
            }
        }
        out.clip();
        out
    }

    /// Cup product φ(U)·ρ(V) on concatenated words.
    pub fn cup(&self, phi: &HochschildCochain, rho: &HochschildCochain) -> Result<HochschildCochain, HochError> {
        self.require(ModuleKind::Regular, "algebra")?;
        let alg = &self.base.alg;
        let mut out = HochschildCochain::zero(phi.degree + rho.degree, min_bound(phi.bound, rho.bound));
        for (u, v) in &phi.comps {
            for (w, z) in &rho.comps {
                let mut word = u.clone();
                word.extend_from_slice(w);
                out.add_component(word, &alg.mul(v, z));
            }
        }
        out.clip();
        Ok(out)
    }

    /// Brace insertion φ∘ρ: the sum over slots of φ with ρ's value inserted.
    pub fn brace(&self, phi: &HochschildCochain, rho: &HochschildCochain) -> Result<HochschildCochain, HochError> {
        self.require(ModuleKind::Regular, "algebra")?;
        let comp = &self.base.comp;
        let bound = min_bound(phi.bound.map(|n| n.saturating_sub(1)), rho.bound);
        let mut out = HochschildCochain::zero(phi.degree + rho.degree + 1, bound);
        let projected: Vec<(&Word, F2Vector)> = rho.comps.iter().map(|(w, z)| (w, comp.project(z))).collect();
        for (u, v) in &phi.comps {
            for i in 0..u.len() {
                for (w, p) in &projected {
                    if p.get(u[i] as usize) {
                        let mut word = Vec::with_capacity(u.len() + w.len());
                        word.extend_from_slice(&u[..i]);
                        word.extend_from_slice(w);
                        word.extend_from_slice(&u[i + 1..]);
                        out.add_component(word, v);
                    }
                }
            }
        }
        out.clip();
        Ok(out)
    }

    /// Gerstenhaber bracket [φ,ρ] = φ∘ρ + ρ∘φ.
    pub fn bracket(&self, phi: &HochschildCochain, rho: &HochschildCochain) -> Result<HochschildCochain, HochError> {
        let mut out = self.brace(phi, rho)?;
        out.add_assign(&self.brace(rho, phi)?);
        Ok(out)
    }

    /// Connes' operator on A*-valued cochains: the cyclic sum of φ evaluated
    /// at the unit, with the rotated-out input becoming the evaluation point.
    pub fn connes_b(&self, phi: &HochschildCochain) -> Result<HochschildCochain, HochError> {
        self.require(ModuleKind::Dual, "dual")?;
        let comp = &self.base.comp;
        let unit = &self.base.alg.unit;
        let mut out = HochschildCochain::zero(phi.degree + 1, dec_bound(phi.bound));
        for (u, g) in &phi.comps {
            if u.is_empty() || !g.dot(unit) {
                continue;
            }
            let r = u.len();
            for t in 0..r {
                let mut word = Vec::with_capacity(r - 1);
                word.extend_from_slice(&u[t + 1..]);
                word.extend_from_slice(&u[..t]);
                out.add_component(word, &comp.letter_dual(u[t]));
            }
        }
        out.clip();
        Ok(out)
    }

    /// Applies `g` to every value and shifts the degree.
    pub fn postcompose(
        phi: &HochschildCochain,
        degree_shift: i32,
        g: impl Fn(&F2Vector) -> F2Vector,
    ) -> HochschildCochain {
        let mut out = HochschildCochain::zero(phi.degree + degree_shift, phi.bound);
        for (w, v) in &phi.comps {
            out.add_component(w.clone(), &g(v));
        }
        out
    }
}

/// Precomposition with f: B → A on every letter. `src` is over A and `dst`
/// over B with the same module (restricted along f).
pub fn ch_of_morphism(
    f: &DgMorphism,
    src: &CochainComplex,
    dst: &CochainComplex,
    phi: &HochschildCochain,
) -> HochschildCochain {
    let pre = letter_preimages(f, &src.base, &dst.base);
    let mut out = HochschildCochain::zero(phi.degree, phi.bound);
    for (u, v) in &phi.comps {
        for_each_preimage_word(u, &pre, |w| out.add_component(w.to_vec(), v));
    }
    out
}

/// For each A-letter x, the B-letters y with x in P_A(f(y)).
pub fn letter_preimages(f: &DgMorphism, a: &NormalizedAlgebra, b: &NormalizedAlgebra) -> Vec<Vec<Letter>> {
    let mut pre = vec![Vec::new(); a.letters()];
    for y in 0..b.letters() {
        let img = a.comp.project(&f.apply(&b.comp.embed(y as Letter)));
        for x in img.ones() {
            pre[x].push(y as Letter);
        }
    }
    pre
}

/// Calls `visit` on every word whose i-th letter lies in `pre[u[i]]`.
pub fn for_each_preimage_word(u: &[Letter], pre: &[Vec<Letter>], mut visit: impl FnMut(&[Letter])) {
    fn go(u: &[Letter], pre: &[Vec<Letter>], acc: &mut Vec<Letter>, visit: &mut dyn FnMut(&[Letter])) {
        if acc.len() == u.len() {
            visit(acc);
            return;
        }
        for &y in &pre[u[acc.len()] as usize] {
            acc.push(y);
            go(u, pre, acc, visit);
            acc.pop();
        }
    }
    go(u, pre, &mut Vec::with_capacity(u.len()), &mut visit);
}

/// Sparse cochain: word → value in the coefficient module. Zero values are
/// never stored. `bound = Some(n)` means the data is exact only up to arity n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildCochain {
    pub degree: i32,
    pub bound: Option<usize>,
    pub comps: BTreeMap<Word, F2Vector>,
}

impl HochschildCochain {
    pub fn zero(degree: i32, bound: Option<usize>) -> Self {
        HochschildCochain { degree, bound, comps: BTreeMap::new() }
    }

    pub fn single(degree: i32, word: Word, value: F2Vector) -> Self {
        let mut c = Self::zero(degree, None);
        c.add_component(word, &value);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, w: &[Letter]) -> Option<&F2Vector> {
        self.comps.get(w)
    }

    pub fn add_component(&mut self, word: Word, value: &F2Vector) {
        if value.is_zero() {
            return;
        }
        match self.comps.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(value);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &HochschildCochain) {
        self.bound = min_bound(self.bound, other.bound);
        for (w, v) in &other.comps {
            self.add_component(w.clone(), v);
        }
        self.clip();
    }

    pub fn add(&self, other: &HochschildCochain) -> HochschildCochain {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.comps.keys().map(Vec::len).max()
    }

    /// Drops components above the bound.
    fn clip(&mut self) {
        if let Some(n) = self.bound {
            self.comps.retain(|w, _| w.len() <= n);
        }
    }

    /// Components of arity at most `n`, marked as exact up to `n`.
    pub fn truncated(&self, n: usize) -> HochschildCochain {
        let mut out = self.clone();
        out.bound = min_bound(self.bound, Some(n));
        out.clip();
        out
    }

    /// Equality of all components up to the smaller of the two bounds.
    pub fn agrees_with(&self, other: &HochschildCochain) -> bool {
        let b = min_bound(self.bound, other.bound);
        let keep = |w: &Word| b.is_none_or(|n| w.len() <= n);
        let a: Vec<_> = self.comps.iter().filter(|(w, _)| keep(w)).collect();
        let c: Vec<_> = other.comps.iter().filter(|(w, _)| keep(w)).collect();
        a == c
    }
}

// ---------------------------------------------------------------------------
// Cohomology

/// Largest arity of a nonzero cochain of this degree, when finite.
pub fn max_arity(cx: &CochainComplex, degree: i32) -> Option<usize> {
    let degs = &cx.base.comp.shifted_degrees;
    let mdeg = &cx.module.degrees;
    if degs.is_empty() {
        return Some(0);
    }
    // word degree = deg(m) - degree
    let lo = *mdeg.iter().min().unwrap_or(&0) - degree;
    let hi = *mdeg.iter().max().unwrap_or(&0) - degree;
    if degs.iter().all(|&d| d < 0) {
        // each letter contributes at most max(d) < 0
        let step = -degs.iter().max().copied().unwrap_or(-1);
        Some(if lo > 0 { 0 } else { ((-lo) / step) as usize })
    } else if degs.iter().all(|&d| d > 0) {
        let step = degs.iter().min().copied().unwrap_or(1);
        Some(if hi < 0 { 0 } else { (hi / step) as usize })
    } else {
        None
    }
}

/// All basis pairs (word, module index) spanning degree-`degree` cochains of
/// arity at most `max_arity`, ordered by arity, then word, then module index.
pub fn cochain_basis(cx: &CochainComplex, degree: i32, max_arity: usize) -> Vec<(Word, usize)> {
    let degs = &cx.base.comp.shifted_degrees;
    let n = degs.len() as Letter;
    let lo_letter = degs.iter().min().copied().unwrap_or(0);
    let hi_letter = degs.iter().max().copied().unwrap_or(0);
    let mut out = Vec::new();
    for r in 0..=max_arity {
        let mut words = Vec::new();
        let targets: BTreeSet<i32> = cx.module.degrees.iter().map(|d| d - degree).collect();
        fn go(
            r: usize,
            acc: &mut Word,
            sum: i32,
            targets: &BTreeSet<i32>,
            degs: &[i32],
            n: Letter,
            lo: i32,
            hi: i32,
            words: &mut Vec<Word>,
        ) {
            let left = (r - acc.len()) as i32;
            if !targets.iter().any(|&t| t >= sum + left * lo && t <= sum + left * hi) {
                return;
            }
            if left == 0 {
                words.push(acc.clone());
                return;
            }
            for x in 0..n {
                acc.push(x);
                go(r, acc, sum + degs[x as usize], targets, degs, n, lo, hi, words);
                acc.pop();
            }
        }
        go(r, &mut Vec::new(), 0, &targets, degs, n, lo_letter, hi_letter, &mut words);
        for w in words {
            let wd = cx.base.comp.word_degree(&w);
            for (m, &md) in cx.module.degrees.iter().enumerate() {
                if md == degree + wd {
                    out.push((w.clone(), m));
                }
            }
        }
    }
    out
}

/// Dimension of the space of degree-`degree` cochains of arity at most `max_arity`.
pub fn cochain_space_dim(cx: &CochainComplex, degree: i32, max_arity: usize) -> usize {
    cochain_basis(cx, degree, max_arity).len()
}

/// How much of HH in one degree the truncated computation captures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    /// The whole cohomology group.
    Complete,
    /// Exactly the classes of arity at most n (D raises arity by one).
    UpToArity(usize),
    /// Only an approximation; arity-mixing differentials cross the bound.
    Truncated,
}

#[derive(Clone, Debug)]
pub struct HHDegree {
    pub degree: i32,
    pub validity: Validity,
    pub reps: Vec<HochschildCochain>,
    basis: Vec<(Word, usize)>,
    index: BTreeMap<(Word, usize), usize>,
    boundaries: Vec<F2Vector>,
    rep_vectors: Vec<F2Vector>,
}

impl HHDegree {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn cochain_dim(&self) -> usize {
        self.basis.len()
    }
}

/// Per-degree cohomology bases of the arity-truncated normalized complex.
#[derive(Clone, Debug)]
pub struct HHBasis {
    pub bound: usize,
    pub degrees: BTreeMap<i32, HHDegree>,
    bigraded: bool,
}

fn to_vector(index: &BTreeMap<(Word, usize), usize>, len: usize, phi: &HochschildCochain) -> Option<F2Vector> {
    let mut v = F2Vector::zeros(len);
    for (w, val) in &phi.comps {
        for m in val.ones() {
            v.flip(*index.get(&(w.clone(), m))?);
        }
    }
    Some(v)
}

fn from_vector(basis: &[(Word, usize)], module_dim: usize, degree: i32, v: &F2Vector) -> HochschildCochain {
    let mut out = HochschildCochain::zero(degree, None);
    for i in v.ones() {
        let (w, m) = &basis[i];
        out.add_component(w.clone(), &F2Vector::unit(module_dim, *m));
    }
    out
}

/// Computes HH in each degree of `degrees` from cochains of arity at most `bound`.
pub fn hh_basis(cx: &CochainComplex, bound: usize, degrees: std::ops::RangeInclusive<i32>) -> HHBasis {
    let bigraded = cx.is_bigraded();
    let k = cx.module.dim();
    let mut out = BTreeMap::new();
    for d in degrees {
        let basis = cochain_basis(cx, d, bound);
        let index: BTreeMap<(Word, usize), usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        // cocycles: kernel of the full-output differential
        let mut rows: BTreeMap<(Word, usize), usize> = BTreeMap::new();
        let mut images = Vec::with_capacity(basis.len());
        for (w, m) in &basis {
            let dphi = cx.differential(&HochschildCochain::single(d, w.clone(), F2Vector::unit(k, *m)));
            let mut entries = Vec::new();
            for (ow, ov) in &dphi.comps {
                for om in ov.ones() {
                    let next = rows.len();
                    entries.push(*rows.entry((ow.clone(), om)).or_insert(next));
                }
            }
            images.push(entries);
        }
        let nrows = rows.len();
        let columns: Vec<F2Vector> = images.iter().map(|e| F2Vector::from_indices(nrows, e)).collect();
        let cycles = F2Matrix::from_columns(nrows, &columns).expect("lengths").kernel_basis();
        // boundaries from one degree up, one arity lower
        let upper = cochain_basis(cx, d + 1, bound.saturating_sub(1));
        let boundaries: Vec<F2Vector> = if bound == 0 {
            Vec::new()
        } else {
            upper
                .iter()
                .map(|(w, m)| {
                    let img = cx.differential(&HochschildCochain::single(d + 1, w.clone(), F2Vector::unit(k, *m)));
                    to_vector(&index, basis.len(), &img).expect("boundary lies in the truncated cochain space")
                })
                .filter(|v| !v.is_zero())
                .collect()
        };
        let rep_vectors = extend_basis(&boundaries, &cycles);
        let reps = rep_vectors.iter().map(|v| from_vector(&basis, k, d, v)).collect();
        let validity = match (bigraded, max_arity(cx, d), max_arity(cx, d + 1)) {
            (true, Some(a), _) if a <= bound => Validity::Complete,
            (true, _, _) => Validity::UpToArity(bound),
            (false, Some(a), Some(b)) if a <= bound && b < bound => Validity::Complete,
            (false, _, _) => Validity::Truncated,
        };
        out.insert(d, HHDegree { degree: d, validity, reps, basis, index, boundaries, rep_vectors });
    }
    HHBasis { bound, degrees: out, bigraded }
}

impl HHBasis {
    pub fn degree(&self, d: i32) -> Result<&HHDegree, HochError> {
        self.degrees.get(&d).ok_or(HochError::DegreeOutOfRange(d))
    }

    pub fn dim(&self, d: i32) -> usize {
        self.degrees.get(&d).map_or(0, HHDegree::dim)
    }

    /// Coordinates of the class of a closed cochain in the representative basis.
    pub fn coords(&self, cx: &CochainComplex, phi: &HochschildCochain) -> Result<F2Vector, HochError> {
        let piece = self.degree(phi.degree)?;
        if let Some(b) = phi.bound {
            if b < self.bound {
                return Err(HochError::BoundTooSmall { have: b, need: self.bound });
            }
        }
        let low = phi.truncated(self.bound);
        let dphi = cx.differential(&HochschildCochain { bound: None, ..low.clone() });
        let closed = if self.bigraded {
            dphi.is_zero()
        } else {
            dphi.comps.keys().all(|w| w.len() > self.bound)
        };
        if !closed {
            return Err(HochError::NotClosed { degree: phi.degree });
        }
        let v = to_vector(&piece.index, piece.basis.len(), &low).ok_or(HochError::NotInSpan(phi.degree))?;
        let mut cols = piece.boundaries.clone();
        cols.extend(piece.rep_vectors.iter().cloned());
        let m = F2Matrix::from_columns(piece.basis.len(), &cols)?;
        let x = m.solve(&v)?.ok_or(HochError::NotInSpan(phi.degree))?;
        Ok(x.slice(piece.boundaries.len(), cols.len()))
    }

    /// The cochain Σ c_i · rep_i.
    pub fn combination(&self, degree: i32, c: &F2Vector) -> Result<HochschildCochain, HochError> {
        let piece = self.degree(degree)?;
        let mut out = HochschildCochain::zero(degree, None);
        for i in c.ones() {
            out.add_assign(&piece.reps[i]);
        }
        Ok(out)
    }

    /// True when `phi` is D-exact within the computed range.
    pub fn is_exact(&self, cx: &CochainComplex, phi: &HochschildCochain) -> Result<bool, HochError> {
        Ok(self.coords(cx, phi)?.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{make_counterexample_algebra, make_simplex_algebra, make_sphere_cohomology};

    fn sphere() -> (CochainComplex, CochainComplex) {
        let base = NormalizedAlgebra::new(&make_sphere_cohomology()).unwrap();
        (CochainComplex::regular(base.clone()), CochainComplex::dual(base))
    }

    fn s_word(k: usize) -> Word {
        vec![0; k]
    }

    fn phi(cx: &CochainComplex, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32, s_word(k), cx.module.vector("e").unwrap())
    }

    fn psi(cx: &CochainComplex, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32 - 2, s_word(k), cx.module.vector("s").unwrap())
    }

    fn theta(cx: &CochainComplex, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32 + 2, s_word(k), cx.module.vector("s*").unwrap())
    }

    fn chi(cx: &CochainComplex, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32, s_word(k), cx.module.vector("e*").unwrap())
    }

    #[test]
    fn complement_drops_first_vertex() {
        let a = make_simplex_algebra(2, &[0, 1, 2]).unwrap();
        let c = ComplementBasis::new(&a).unwrap();
        assert_eq!(c.pivot, 0);
        assert_eq!(c.letters, vec![1, 2, 3, 4, 5, 6]);
        // P(e0) = e0 + (e0+e1+e2) restricted = e1 + e2
        let p = c.project(&a.vector("e0").unwrap());
        assert_eq!(p.ones().collect::<Vec<_>>(), vec![0, 1]);
        assert!(c.project(&a.unit).is_zero());
    }

    #[test]
    fn sphere_generators_are_closed() {
        let (a, d) = sphere();
        for k in 0..=8 {
            assert!(a.differential(&phi(&a, k)).is_zero());
            assert!(a.differential(&psi(&a, k)).is_zero());
            assert!(d.differential(&theta(&d, k)).is_zero());
            assert!(d.differential(&chi(&d, k)).is_zero());
            a.check_degrees(&phi(&a, k)).unwrap();
            a.check_degrees(&psi(&a, k)).unwrap();
            d.check_degrees(&theta(&d, k)).unwrap();
            d.check_degrees(&chi(&d, k)).unwrap();
        }
    }

    #[test]
    fn sphere_cup_table() {
        let (a, _) = sphere();
        for k in 0..5 {
            for l in 0..5 {
                assert_eq!(a.cup(&phi(&a, k), &phi(&a, l)).unwrap(), phi(&a, k + l));
                assert!(a.cup(&psi(&a, k), &psi(&a, l)).unwrap().is_zero());
                assert_eq!(a.cup(&phi(&a, k), &psi(&a, l)).unwrap(), psi(&a, k + l));
                assert_eq!(a.cup(&psi(&a, l), &phi(&a, k)).unwrap(), psi(&a, k + l));
            }
        }
    }

    #[test]
    fn connes_b_on_sphere() {
        let (_, d) = sphere();
        for r in 0..=8 {
            assert!(d.connes_b(&theta(&d, r)).unwrap().is_zero());
            let b = d.connes_b(&chi(&d, r)).unwrap();
            if r % 2 == 1 {
                assert_eq!(b, theta(&d, r - 1));
            } else {
                assert!(b.is_zero());
            }
        }
    }

    #[test]
    fn connes_b_needs_dual() {
        let (a, _) = sphere();
        assert_eq!(a.connes_b(&phi(&a, 1)), Err(HochError::ModuleMismatch("dual")));
        let (_, d) = sphere();
        assert!(d.cup(&chi(&d, 1), &chi(&d, 1)).is_err());
    }

    #[test]
    fn bracket_basics() {
        let (a, _) = sphere();
        let p = psi(&a, 3);
        assert!(a.bracket(&p, &p).unwrap().is_zero());
        assert!(a.bracket(&phi(&a, 0), &psi(&a, 0)).unwrap().is_zero());
    }

    #[test]
    fn sphere_hh_bases() {
        let (a, d) = sphere();
        let h = hh_basis(&a, 8, -2..=4);
        assert_eq!(h.dim(1), 2);
        assert_eq!(h.degree(1).unwrap().validity, Validity::Complete);
        let c1 = h.coords(&a, &phi(&a, 1)).unwrap();
        let c2 = h.coords(&a, &psi(&a, 3)).unwrap();
        assert!(!c1.is_zero() && !c2.is_zero() && c1 != c2);

        let hd = hh_basis(&d, 8, 0..=4);
        assert_eq!(hd.dim(2), 2);
        let t = hd.coords(&d, &theta(&d, 0)).unwrap();
        let x = hd.coords(&d, &chi(&d, 2)).unwrap();
        assert_eq!(F2Matrix::from_columns(2, &[t.clone(), x.clone()]).unwrap().rank(), 2);
        let sum = hd.coords(&d, &theta(&d, 0).add(&chi(&d, 2))).unwrap();
        assert_eq!(sum, t.add(&x));
    }

    #[test]
    fn counterexample_dimension_certificate() {
        let base = NormalizedAlgebra::new(&make_counterexample_algebra()).unwrap();
        let d = CochainComplex::dual(base);
        assert_eq!(cochain_space_dim(&d, 4, 1), 0);
        assert!(cochain_space_dim(&d, 3, 1) > 0);
    }

    #[test]
    fn counterexample_unit_cochain_closed() {
        let base = NormalizedAlgebra::new(&make_counterexample_algebra()).unwrap();
        let a = CochainComplex::regular(base);
        let phi = HochschildCochain::single(0, vec![], a.module.vector("e").unwrap());
        assert!(a.differential(&phi).is_zero());
    }

    #[test]
    fn coords_rejects_open_cochains() {
        let base = NormalizedAlgebra::new(&make_counterexample_algebra()).unwrap();
        let a = CochainComplex::regular(base);
        let h = hh_basis(&a, 3, -2..=1);
        let c = a.base.letter("c").unwrap();
        let open = HochschildCochain::single(1, vec![c], a.module.vector("e").unwrap());
        assert!(!a.differential(&open).is_zero());
        assert_eq!(h.coords(&a, &open), Err(HochError::NotClosed { degree: 1 }));
        let exact = a.differential(&HochschildCochain::single(-1, vec![], a.module.vector("b").unwrap()));
        assert_eq!(exact.degree, -2);
        assert!(h.coords(&a, &exact).unwrap().is_zero());
    }
}
