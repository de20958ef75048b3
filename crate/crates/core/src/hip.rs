//! Homotopy inner products F = {F_{p,q}}: sparse components, the differential
//! DF, the induced cochain maps CH(F) and Z^F, pullbacks, and star patterns.
//!
//! A component is keyed by (left letters; module basis index; right letters)
//! and its value is a functional on the module, stored in the dual basis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dga::{
    homogeneous_degree, make_counterexample_algebra, make_simplex_algebra, make_sphere_cochain_algebra,
    make_sphere_cohomology, restrict_bimodule, DgAlgebra, DgBimodule, DgMorphism,
};
use crate::f2lin::F2Vector;
use crate::hochschild::{
    for_each_preimage_word, letter_preimages, min_bound, CochainComplex, HochError, HochschildCochain, Letter,
    ModuleKind, NormalizedAlgebra, Word,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HipError {
    #[error("unknown inner product {0:?}")]
    UnknownName(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("pattern entries have inconsistent degrees ({0} vs {1})")]
    InconsistentDegree(i32, i32),
    #[error("star letter {0} must have shifted degree 0")]
    StarDegree(String),
    #[error(transparent)]
    Hoch(#[from] HochError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HipKey {
    pub left: Word,
    pub m: usize,
    pub right: Word,
}

/// Sparse homotopy inner product. `bound = Some(n)` means components are
/// exact for p ≤ n and q ≤ n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyInnerProduct {
    pub degree: i32,
    pub bound: Option<usize>,
    pub comps: BTreeMap<HipKey, F2Vector>,
}

impl HomotopyInnerProduct {
    pub fn zero(degree: i32, bound: Option<usize>) -> Self {
        HomotopyInnerProduct { degree, bound, comps: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn fits(&self, key: &HipKey) -> bool {
        self.bound.is_none_or(|n| key.left.len() <= n && key.right.len() <= n)
    }

    pub fn add_component(&mut self, key: HipKey, value: &F2Vector) {
        if value.is_zero() || !self.fits(&key) {
            return;
        }
        match self.comps.entry(key) {
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

    pub fn add_assign(&mut self, other: &HomotopyInnerProduct) {
        self.bound = min_bound(self.bound, other.bound);
        let keep = self.bound;
        self.comps.retain(|k, _| keep.is_none_or(|n| k.left.len() <= n && k.right.len() <= n));
        for (k, v) in &other.comps {
            self.add_component(k.clone(), v);
        }
    }

    pub fn add(&self, other: &HomotopyInnerProduct) -> HomotopyInnerProduct {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// Components with p, q ≤ n.
    pub fn truncated(&self, n: usize) -> HomotopyInnerProduct {
        let mut out = HomotopyInnerProduct::zero(self.degree, min_bound(self.bound, Some(n)));
        for (k, v) in &self.comps {
            out.add_component(k.clone(), v);
        }
        out
    }

    /// Equality of all components within both bounds.
    pub fn agrees_with(&self, other: &HomotopyInnerProduct) -> bool {
        let b = min_bound(self.bound, other.bound);
        self.truncated_opt(b).comps == other.truncated_opt(b).comps
    }

    fn truncated_opt(&self, b: Option<usize>) -> HomotopyInnerProduct {
        match b {
            Some(n) => self.truncated(n),
            None => self.clone(),
        }
    }

    /// F(a_1..a_p; m; b_1..b_q)(n) for arbitrary algebra and module vectors.
    pub fn eval(
        &self,
        base: &NormalizedAlgebra,
        left: &[F2Vector],
        m: &F2Vector,
        right: &[F2Vector],
        n: &F2Vector,
    ) -> bool {
        let lp: Vec<Vec<Letter>> = left.iter().map(|a| base.comp.project(a).ones().map(|x| x as Letter).collect()).collect();
        let rp: Vec<Vec<Letter>> =
            right.iter().map(|a| base.comp.project(a).ones().map(|x| x as Letter).collect()).collect();
        let mut acc = false;
        for_each_choice(&lp, |l| {
            for_each_choice(&rp, |r| {
                for mi in m.ones() {
                    let key = HipKey { left: l.to_vec(), m: mi, right: r.to_vec() };
                    if let Some(g) = self.comps.get(&key) {
                        acc ^= g.dot(n);
                    }
                }
            })
        });
        acc
    }
}

/// Calls `visit` on every word picking one letter from each list.
fn for_each_choice(lists: &[Vec<Letter>], mut visit: impl FnMut(&[Letter])) {
    let pre: Vec<Vec<Letter>> = lists.to_vec();
    let idx: Vec<Letter> = (0..lists.len() as Letter).collect();
    for_each_preimage_word(&idx, &pre, |w| visit(w));
}

/// A witness that DF does not vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HipViolation {
    pub key: HipKey,
    pub value: F2Vector,
    pub description: String,
}

/// An algebra with a bimodule and the preimage tables DF needs.
#[derive(Clone, Debug)]
pub struct HipSpace {
    pub cx: CochainComplex,
    /// m' with [d m']_m.
    dm_pre: Vec<Vec<usize>>,
    /// (x, m') with [x·m']_m.
    left_pre: Vec<Vec<(Letter, usize)>>,
    /// (m', x) with [m'·x]_m.
    right_pre: Vec<Vec<(usize, Letter)>>,
}

impl HipSpace {
    pub fn new(base: Arc<NormalizedAlgebra>, module: DgBimodule) -> Self {
        let cx = CochainComplex::new(base, module, ModuleKind::Other);
        let k = cx.module.dim();
        let n = cx.letters();
        let mut dm_pre = vec![Vec::new(); k];
        let mut left_pre = vec![Vec::new(); k];
        let mut right_pre = vec![Vec::new(); k];
        for mp in 0..k {
            let e = F2Vector::unit(k, mp);
            for m in cx.module.d(&e).ones() {
                dm_pre[m].push(mp);
            }
            for x in 0..n as Letter {
                for m in cx.act_left_letter(x, &e).ones() {
                    left_pre[m].push((x, mp));
                }
                for m in cx.act_right_letter(&e, x).ones() {
                    right_pre[m].push((mp, x));
                }
            }
        }
        HipSpace { cx, dm_pre, left_pre, right_pre }
    }

    pub fn regular(base: Arc<NormalizedAlgebra>) -> Self {
        let m = base.alg.as_bimodule();
        Self::new(base, m)
    }

    pub fn base(&self) -> &NormalizedAlgebra {
        &self.cx.base
    }

    fn module_dim(&self) -> usize {
        self.cx.module.dim()
    }

    /// The functional n ↦ g(n·x).
    fn dual_right(&self, g: &F2Vector, x: Letter) -> F2Vector {
        let k = self.module_dim();
        let mut out = F2Vector::zeros(k);
        for i in 0..k {
            if g.dot(&self.cx.act_right_letter(&F2Vector::unit(k, i), x)) {
                out.set(i, true);
            }
        }
        out
    }

    /// The functional n ↦ g(x·n).
    fn dual_left(&self, g: &F2Vector, x: Letter) -> F2Vector {
        let k = self.module_dim();
        let mut out = F2Vector::zeros(k);
        for i in 0..k {
            if g.dot(&self.cx.act_left_letter(x, &F2Vector::unit(k, i))) {
                out.set(i, true);
            }
        }
        out
    }

    /// The functional n ↦ g(dn).
    fn dual_d(&self, g: &F2Vector) -> F2Vector {
        let k = self.module_dim();
        let mut out = F2Vector::zeros(k);
        for i in 0..k {
            if g.dot(&self.cx.module.d(&F2Vector::unit(k, i))) {
                out.set(i, true);
            }
        }
        out
    }

    /// Checks that each value has degree |F| + left + deg(m) + right, with
    /// the dual basis element n* in degree -deg(n).
    pub fn check_degrees(&self, f: &HomotopyInnerProduct) -> Result<(), HipKey> {
        let dual: Vec<i32> = self.cx.module.degrees.iter().map(|d| -d).collect();
        let comp = &self.base().comp;
        for (k, g) in &f.comps {
            let want = f.degree + comp.word_degree(&k.left) + self.cx.module.degrees[k.m] + comp.word_degree(&k.right);
            if homogeneous_degree(g, &dual) != Some(want) {
                return Err(k.clone());
            }
        }
        Ok(())
    }

    /// DF computed on sparse components, one contribution per term of D0 + D1.
    pub fn differential(&self, f: &HomotopyInnerProduct) -> HomotopyInnerProduct {
        let base = self.base();
        let n = base.letters() as Letter;
        let mut out = HomotopyInnerProduct::zero(f.degree - 1, f.bound);
        for (key, g) in &f.comps {
            let HipKey { left, m, right } = key;
            // D0
            for j in 0..left.len() {
                for &y in base.d_preimage(left[j]) {
                    let mut l = left.clone();
                    l[j] = y;
                    out.add_component(HipKey { left: l, m: *m, right: right.clone() }, g);
                }
            }
            for &mp in &self.dm_pre[*m] {
                out.add_component(HipKey { left: left.clone(), m: mp, right: right.clone() }, g);
            }
            for j in 0..right.len() {
                for &y in base.d_preimage(right[j]) {
                    let mut r = right.clone();
                    r[j] = y;
                    out.add_component(HipKey { left: left.clone(), m: *m, right: r }, g);
                }
            }
            out.add_component(key.clone(), &self.dual_d(g));
            // D1, left side
            for x in 0..n {
                let mut l = Vec::with_capacity(left.len() + 1);
                l.push(x);
                l.extend_from_slice(left);
                out.add_component(HipKey { left: l, m: *m, right: right.clone() }, &self.dual_right(g, x));
            }
            for j in 0..left.len() {
                for &(y1, y2) in base.product_preimage(left[j]) {
                    let mut l = Vec::with_capacity(left.len() + 1);
                    l.extend_from_slice(&left[..j]);
                    l.push(y1);
                    l.push(y2);
                    l.extend_from_slice(&left[j + 1..]);
                    out.add_component(HipKey { left: l, m: *m, right: right.clone() }, g);
                }
            }
            for &(x, mp) in &self.left_pre[*m] {
                let mut l = left.clone();
                l.push(x);
                out.add_component(HipKey { left: l, m: mp, right: right.clone() }, g);
            }
            // D1, right side
            for &(mp, y) in &self.right_pre[*m] {
                let mut r = Vec::with_capacity(right.len() + 1);
                r.push(y);
                r.extend_from_slice(right);
                out.add_component(HipKey { left: left.clone(), m: mp, right: r }, g);
            }
            for j in 0..right.len() {
                for &(y1, y2) in base.product_preimage(right[j]) {
                    let mut r = Vec::with_capacity(right.len() + 1);
                    r.extend_from_slice(&right[..j]);
                    r.push(y1);
                    r.push(y2);
                    r.extend_from_slice(&right[j + 1..]);
                    out.add_component(HipKey { left: left.clone(), m: *m, right: r }, g);
                }
            }
            for y in 0..n {
                let mut r = right.clone();
                r.push(y);
                out.add_component(HipKey { left: left.clone(), m: *m, right: r }, &self.dual_left(g, y));
            }
        }
        out
    }

    /// DF by evaluating the defining formulas on every tuple of letters with
    /// p, q ≤ `bound`. Exhaustive; meant for cross-checking small cases.
    pub fn differential_by_evaluation(&self, f: &HomotopyInnerProduct, bound: usize) -> HomotopyInnerProduct {
        let base = self.base();
        let alg = &base.alg;
        let module = &self.cx.module;
        let k = module.dim();
        let nl = base.letters() as Letter;
        let bound = f.bound.map_or(bound, |b| b.min(bound));
        let mut out = HomotopyInnerProduct::zero(f.degree - 1, Some(bound));
        let embed = |w: &[Letter]| -> Vec<F2Vector> { w.iter().map(|&x| base.comp.embed(x)).collect() };
        let words = |len: usize| -> Vec<Word> {
            let all: Vec<Vec<Letter>> = vec![(0..nl).collect(); len];
            let mut v = Vec::new();
            for_each_choice(&all, |w| v.push(w.to_vec()));
            v
        };
        for p in 0..=bound {
            for q in 0..=bound {
                for lw in words(p) {
                    for rw in words(q) {
                        let a = embed(&lw);
                        let b = embed(&rw);
                        for mi in 0..k {
                            let m = F2Vector::unit(k, mi);
                            let mut value = F2Vector::zeros(k);
                            for ni in 0..k {
                                let nv = F2Vector::unit(k, ni);
                                let mut s = false;
                                for j in 0..p {
                                    let mut a2 = a.clone();
                                    a2[j] = alg.d(&a[j]);
                                    s ^= f.eval(base, &a2, &m, &b, &nv);
                                }
                                s ^= f.eval(base, &a, &module.d(&m), &b, &nv);
                                for j in 0..q {
                                    let mut b2 = b.clone();
                                    b2[j] = alg.d(&b[j]);
                                    s ^= f.eval(base, &a, &m, &b2, &nv);
                                }
                                s ^= f.eval(base, &a, &m, &b, &module.d(&nv));
                                if p > 0 {
                                    s ^= f.eval(base, &a[1..], &m, &b, &module.act_right(&nv, &a[0]));
                                    for j in 0..p - 1 {
                                        let mut a2 = a[..j].to_vec();
                                        a2.push(alg.mul(&a[j], &a[j + 1]));
                                        a2.extend_from_slice(&a[j + 2..]);
                                        s ^= f.eval(base, &a2, &m, &b, &nv);
                                    }
                                    s ^= f.eval(base, &a[..p - 1], &module.act_left(&a[p - 1], &m), &b, &nv);
                                }
                                if q > 0 {
                                    s ^= f.eval(base, &a, &module.act_right(&m, &b[0]), &b[1..], &nv);
                                    for j in 0..q - 1 {
                                        let mut b2 = b[..j].to_vec();
                                        b2.push(alg.mul(&b[j], &b[j + 1]));
                                        b2.extend_from_slice(&b[j + 2..]);
                                        s ^= f.eval(base, &a, &m, &b2, &nv);
                                    }
                                    s ^= f.eval(base, &a, &m, &b[..q - 1], &module.act_left(&b[q - 1], &nv));
                                }
                                if s {
                                    value.set(ni, true);
                                }
                            }
                            out.add_component(HipKey { left: lw.clone(), m: mi, right: rw.clone() }, &value);
                        }
                    }
                }
            }
        }
        out
    }

    /// Ok when every component of DF within the bound vanishes; otherwise the
    /// first nonzero component.
    pub fn is_homotopy_inner_product(&self, f: &HomotopyInnerProduct) -> Result<(), HipViolation> {
        let df = self.differential(f);
        match df.comps.iter().next() {
            None => Ok(()),
            Some((key, value)) => Err(HipViolation {
                key: key.clone(),
                value: value.clone(),
                description: self.show_component(key, value),
            }),
        }
    }

    /// Componentwise DF = rhs within the common bound.
    pub fn verify_boundary_identity(
        &self,
        f: &HomotopyInnerProduct,
        rhs: &HomotopyInnerProduct,
    ) -> Result<(), HipViolation> {
        let mut diff = self.differential(f);
        diff.add_assign(rhs);
        match diff.comps.iter().next() {
            None => Ok(()),
            Some((key, value)) => Err(HipViolation {
                key: key.clone(),
                value: value.clone(),
                description: self.show_component(key, value),
            }),
        }
    }

    pub fn show_component(&self, key: &HipKey, value: &F2Vector) -> String {
        let base = self.base();
        let names = |w: &Word| w.iter().map(|&x| base.letter_name(x).to_string()).collect::<Vec<_>>().join(",");
        let outs: Vec<String> = value.ones().map(|i| format!("{}*", self.cx.module.names[i])).collect();
        format!(
            "F_{{{},{}}}({}; {}; {}) = {}",
            key.left.len(),
            key.right.len(),
            names(&key.left),
            self.cx.module.names[key.m],
            names(&key.right),
            outs.join(" + ")
        )
    }

    pub fn show(&self, f: &HomotopyInnerProduct) -> String {
        f.comps.iter().map(|(k, v)| self.show_component(k, v)).collect::<Vec<_>>().join("\n")
    }
}

/// CH(F)(φ)(L, U, R) = F(L; φ(U); R), summed over all splittings.
pub fn ch_of_hip(f: &HomotopyInnerProduct, phi: &HochschildCochain) -> HochschildCochain {
    let mut by_m: BTreeMap<usize, Vec<(&HipKey, &F2Vector)>> = BTreeMap::new();
    for (k, g) in &f.comps {
        by_m.entry(k.m).or_default().push((k, g));
    }
    let bound = min_bound(f.bound, phi.bound);
    let mut out = HochschildCochain::zero(f.degree + phi.degree, bound);
    for (u, v) in &phi.comps {
        for m in v.ones() {
            for (k, g) in by_m.get(&m).into_iter().flatten() {
                let mut w = Vec::with_capacity(k.left.len() + u.len() + k.right.len());
                w.extend_from_slice(&k.left);
                w.extend_from_slice(u);
                w.extend_from_slice(&k.right);
                out.add_component(w, g);
            }
        }
    }
    clipped(out)
}

fn clipped(c: HochschildCochain) -> HochschildCochain {
    match c.bound {
        Some(n) => c.truncated(n),
        None => c,
    }
}

/// The operator Z^F on A-valued cochains, with the unit in the module slot.
pub fn z_operator(
    base: &NormalizedAlgebra,
    f: &HomotopyInnerProduct,
    phi: &HochschildCochain,
) -> HochschildCochain {
    let comp = &base.comp;
    let unit = &base.alg.unit;
    // F(L; 1; R), summed over the unit's support
    let mut f1: BTreeMap<(Word, Word), F2Vector> = BTreeMap::new();
    for (k, g) in &f.comps {
        if unit.get(k.m) {
            let e = f1.entry((k.left.clone(), k.right.clone())).or_insert_with(|| F2Vector::zeros(g.len()));
            e.add_assign(g);
        }
    }
    f1.retain(|_, g| !g.is_zero());
    let bound = min_bound(f.bound, phi.bound).map(|n| {
        assert!(n >= 1, "arity bound 0 cannot be lowered");
        n - 1
    });
    let projected: Vec<(&Word, F2Vector, &F2Vector)> = phi.comps.iter().map(|(u, v)| (u, comp.project(v), v)).collect();
    let mut out = HochschildCochain::zero(f.degree + phi.degree + 1, bound);
    let splice = |prefix: &[Letter], slots: &[Letter], i: usize, u: &[Letter], suffix: &[Letter]| -> Word {
        let mut w = Vec::with_capacity(prefix.len() + slots.len() + u.len() + suffix.len());
        w.extend_from_slice(prefix);
        w.extend_from_slice(&slots[..i]);
        w.extend_from_slice(u);
        w.extend_from_slice(&slots[i + 1..]);
        w.extend_from_slice(suffix);
        w
    };
    for ((l, r), g) in &f1 {
        for (u, pu, v) in &projected {
            // φ's value in a right slot
            for i in 0..r.len() {
                if pu.get(r[i] as usize) {
                    out.add_component(splice(l, r, i, u, &[]), g);
                }
            }
            // φ's value in a left slot
            for i in 0..l.len() {
                if pu.get(l[i] as usize) {
                    out.add_component(splice(&[], l, i, u, r), g);
                }
            }
            // φ evaluated on the wrap-around inputs, including the evaluation point
            if !u.is_empty() && g.dot(v) {
                for t in 0..u.len() {
                    let mut w = Vec::with_capacity(u.len() - 1 + l.len() + r.len());
                    w.extend_from_slice(&u[t + 1..]);
                    w.extend_from_slice(l);
                    w.extend_from_slice(r);
                    w.extend_from_slice(&u[..t]);
                    out.add_component(w, &comp.letter_dual(u[t]));
                }
            }
        }
    }
    clipped(out)
}

/// F over A restricted to B along f: letters are precomposed, the module is kept.
pub fn restrict_hip(
    f: &DgMorphism,
    a: &NormalizedAlgebra,
    b: &NormalizedAlgebra,
    hip: &HomotopyInnerProduct,
) -> HomotopyInnerProduct {
    let pre = letter_preimages(f, a, b);
    let mut out = HomotopyInnerProduct::zero(hip.degree, hip.bound);
    for (k, g) in &hip.comps {
        for_each_preimage_word(&k.left, &pre, |l| {
            for_each_preimage_word(&k.right, &pre, |r| {
                out.add_component(HipKey { left: l.to_vec(), m: k.m, right: r.to_vec() }, g);
            })
        });
    }
    out
}

/// The transferred inner product f*∘F∘f on B for F on A with regular coefficients.
pub fn pullback_hip(
    f: &DgMorphism,
    a: &NormalizedAlgebra,
    b: &NormalizedAlgebra,
    hip: &HomotopyInnerProduct,
) -> HomotopyInnerProduct {
    let restricted = restrict_hip(f, a, b, hip);
    let kb = b.alg.dim();
    let mut m_pre: Vec<Vec<usize>> = vec![Vec::new(); a.alg.dim()];
    for mb in 0..kb {
        for ma in f.apply(&F2Vector::unit(kb, mb)).ones() {
            m_pre[ma].push(mb);
        }
    }
    let mut out = HomotopyInnerProduct::zero(hip.degree, hip.bound);
    for (k, g) in &restricted.comps {
        let gb = f.apply_dual(g);
        for &mb in &m_pre[k.m] {
            out.add_component(HipKey { left: k.left.clone(), m: mb, right: k.right.clone() }, &gb);
        }
    }
    out
}

/// Restriction of a bimodule and its dual along f, for the pullback square.
pub fn restricted_modules(f: &DgMorphism) -> (DgBimodule, DgBimodule) {
    let m = f.target.as_bimodule();
    let md = m.dual(&f.target);
    (restrict_bimodule(&m, f), restrict_bimodule(&md, f))
}

// ---------------------------------------------------------------------------
// Patterns

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Fixed(Letter),
    /// Any number (including zero) of repeats.
    Star(Letter),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternEntry {
    pub left: Vec<Slot>,
    pub m: usize,
    pub right: Vec<Slot>,
    pub out: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternHip {
    pub degree: i32,
    pub entries: Vec<PatternEntry>,
}

fn expand_slots(slots: &[Slot], bound: usize) -> Vec<Word> {
    fn go(slots: &[Slot], bound: usize, acc: &mut Word, out: &mut Vec<Word>) {
        let Some((first, rest)) = slots.split_first() else {
            out.push(acc.clone());
            return;
        };
        let fixed_after = rest.iter().filter(|s| matches!(s, Slot::Fixed(_))).count();
        match *first {
            Slot::Fixed(x) => {
                if acc.len() + 1 + fixed_after <= bound {
                    acc.push(x);
                    go(rest, bound, acc, out);
                    acc.pop();
                }
            }
            Slot::Star(x) => {
                let room = bound.saturating_sub(acc.len() + fixed_after);
                if acc.len() + fixed_after > bound {
                    return;
                }
                for c in 0..=room {
                    let len = acc.len();
                    acc.extend(std::iter::repeat_n(x, c));
                    go(rest, bound, acc, out);
                    acc.truncate(len);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(slots, bound, &mut Vec::new(), &mut out);
    out
}

impl PatternHip {
    /// All components with p, q ≤ bound; each matched word contributes its
    /// output functional once per entry.
    pub fn expand(&self, module_dim: usize, bound: usize) -> HomotopyInnerProduct {
        let mut out = HomotopyInnerProduct::zero(self.degree, Some(bound));
        for e in &self.entries {
            let value = F2Vector::unit(module_dim, e.out);
            let rights = expand_slots(&e.right, bound);
            for l in expand_slots(&e.left, bound) {
                for r in &rights {
                    out.add_component(HipKey { left: l.clone(), m: e.m, right: r.clone() }, &value);
                }
            }
        }
        out
    }

    /// True when no entry has a star, so the expansion is complete.
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|e| e.left.iter().chain(&e.right).all(|s| matches!(s, Slot::Fixed(_))))
    }

    /// Expansion as a complete inner product; only for finite patterns.
    pub fn expand_complete(&self, module_dim: usize) -> Option<HomotopyInnerProduct> {
        if !self.is_finite() {
            return None;
        }
        let longest = self.entries.iter().map(|e| e.left.len().max(e.right.len())).max().unwrap_or(0);
        let mut f = self.expand(module_dim, longest);
        f.bound = None;
        Some(f)
    }
}

/// Parses one pattern per line: `left: [b01* c012 b02*] m: e1 right: [] out: b12`.
/// Letters name complement basis elements; a trailing `*` marks a star slot.
/// The `out` name may carry a `*` as well. `#` starts a comment.
pub fn parse_pattern(base: &NormalizedAlgebra, module: &DgBimodule, text: &str) -> Result<PatternHip, HipError> {
    let mut entries = Vec::new();
    let mut degree: Option<i32> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| HipError::Parse { line: line_no, msg };
        let rest = line.strip_prefix("left:").ok_or_else(|| err("expected `left:`".into()))?;
        let (left_s, rest) = bracketed(rest).ok_or_else(|| err("expected `[...]` after `left:`".into()))?;
        let rest = rest.trim_start().strip_prefix("m:").ok_or_else(|| err("expected `m:`".into()))?;
        let mut it = rest.trim_start().splitn(2, char::is_whitespace);
        let m_name = it.next().unwrap_or("");
        let rest = it.next().unwrap_or("").trim_start();
        let rest = rest.strip_prefix("right:").ok_or_else(|| err("expected `right:`".into()))?;
        let (right_s, rest) = bracketed(rest).ok_or_else(|| err("expected `[...]` after `right:`".into()))?;
        let rest = rest.trim_start().strip_prefix("out:").ok_or_else(|| err("expected `out:`".into()))?;
        let out_name = rest.trim().trim_end_matches('*');
        if out_name.is_empty() || out_name.contains(char::is_whitespace) {
            return Err(err("expected one name after `out:`".into()));
        }
        let slots = |s: &str| -> Result<Vec<Slot>, HipError> {
            s.split_whitespace()
                .map(|tok| {
                    let (name, star) = match tok.strip_suffix('*') {
                        Some(n) => (n, true),
                        None => (tok, false),
                    };
                    let x = base.letter(name).ok_or_else(|| err(format!("{name:?} is not a complement letter")))?;
                    if star {
                        if base.comp.shifted_degrees[x as usize] != 0 {
                            return Err(HipError::StarDegree(name.to_string()));
                        }
                        Ok(Slot::Star(x))
                    } else {
                        Ok(Slot::Fixed(x))
                    }
                })
                .collect()
        };
        let left = slots(left_s)?;
        let right = slots(right_s)?;
        let m = module.index_of(m_name).map_err(|e| err(e.to_string()))?;
        let out = module.index_of(out_name).map_err(|e| err(e.to_string()))?;
        let fixed_deg = |ss: &[Slot]| -> i32 {
            ss.iter().map(|s| if let Slot::Fixed(x) = s { base.comp.shifted_degrees[*x as usize] } else { 0 }).sum()
        };
        let d = -module.degrees[out] - fixed_deg(&left) - module.degrees[m] - fixed_deg(&right);
        match degree {
            None => degree = Some(d),
            Some(d0) if d0 != d => return Err(HipError::InconsistentDegree(d0, d)),
            _ => {}
        }
        entries.push(PatternEntry { left, m, right, out });
    }
    Ok(PatternHip { degree: degree.unwrap_or(0), entries })
}

fn bracketed(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start().strip_prefix('[')?;
    let end = s.find(']')?;
    Some((&s[..end], &s[end + 1..]))
}

pub fn format_pattern(base: &NormalizedAlgebra, module: &DgBimodule, p: &PatternHip) -> String {
    let slots = |ss: &[Slot]| -> String {
        ss.iter()
            .map(|s| match *s {
                Slot::Fixed(x) => base.letter_name(x).to_string(),
                Slot::Star(x) => format!("{}*", base.letter_name(x)),
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    for e in &p.entries {
        out.push_str(&format!(
            "left: [{}] m: {} right: [{}] out: {}\n",
            slots(&e.left),
            module.names[e.m],
            slots(&e.right),
            module.names[e.out]
        ));
    }
    out
}

impl fmt::Display for HipViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D F nonzero: {}", self.description)
    }
}

// ---------------------------------------------------------------------------
// Catalog

const POINT: &str = "left: [] m: e0 right: [] out: e0\n";

const EDGE: &str = "\
left: [b01*] m: e0 right: [] out: b01
left: [b01*] m: b01 right: [] out: e1
";

const TRIANGLE: &str = "\
left: [b02*] m: c012 right: [] out: e2
left: [b02*] m: e0 right: [] out: c012
left: [b02*] m: b01 right: [] out: b12
left: [b01* c012 b02*] m: e0 right: [] out: b01
left: [b01* c012 b02*] m: b01 right: [] out: e1
left: [b02* c012 b12*] m: e1 right: [] out: b12
left: [b02* c012 b12*] m: b12 right: [] out: e2
left: [b01* c012 b02* c012 b12*] m: e1 right: [] out: e1
";

const SPHERE_STRICT: &str = "\
left: [] m: s right: [] out: e
left: [] m: e right: [] out: s
";

const SPHERE_TILDE: &str = "\
left: [] m: s right: [] out: e
left: [] m: e right: [] out: s
left: [s s] m: e right: [] out: e
";

const COUNTEREXAMPLE: &str = "\
left: [] m: c right: [] out: e
left: [] m: b right: [] out: b
left: [] m: e right: [] out: c
left: [c b c] m: e right: [] out: e
left: [b b b] m: c right: [] out: e
left: [b b b] m: e right: [] out: c
left: [b b b] m: b right: [] out: b
";

pub const CATALOG: &[&str] =
    &["sphere-strict", "sphere-tilde", "simplex0", "simplex01", "simplex012", "sphere-cochain", "counterexample"];

/// Renames vertex digits in simplex generator names (`e0`, `b01`, `c012`) by `map`.
pub fn relabel_name(name: &str, map: &[usize]) -> String {
    let mut chars = name.chars();
    let mut out = String::new();
    if let Some(c) = chars.next() {
        out.push(c);
    }
    for c in chars {
        match c.to_digit(10) {
            Some(d) if (d as usize) < map.len() => out.push_str(&map[d as usize].to_string()),
            _ => out.push(c),
        }
    }
    out
}

/// Rewrites every simplex name in pattern text through `map`.
pub fn relabel_pattern_text(text: &str, map: &[usize]) -> String {
    text.lines()
        .map(|line| {
            line.split(' ')
                .map(|tok| {
                    let (core, star) = match tok.strip_suffix('*') {
                        Some(c) => (c, "*"),
                        None => (tok, ""),
                    };
                    let (open, core) = match core.strip_prefix('[') {
                        Some(c) => ("[", c),
                        None => ("", core),
                    };
                    let (core, close) = match core.strip_suffix(']') {
                        Some(c) => (c, "]"),
                        None => (core, ""),
                    };
                    let (core, star) = match core.strip_suffix('*') {
                        Some(c) => (c, "*"),
                        None => (core, star),
                    };
                    let is_simplex = core.len() > 1
                        && core.starts_with(['e', 'b', 'c'])
                        && core[1..].chars().all(|c| c.is_ascii_digit());
                    let core = if is_simplex { relabel_name(core, map) } else { core.to_string() };
                    format!("{open}{core}{star}{close}")
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Pattern text of the local inner product on the simplex spanned by `vertices`
/// (one, two, or three increasing vertex labels).
pub fn simplex_pattern_text(vertices: &[usize]) -> Option<String> {
    let template = match vertices.len() {
        1 => POINT,
        2 => EDGE,
        3 => TRIANGLE,
        _ => return None,
    };
    Some(relabel_pattern_text(template, vertices))
}

/// A catalog entry: its algebra, pattern, and the default p, q bound for expansion.
#[derive(Clone, Debug)]
pub struct CatalogHip {
    pub name: String,
    pub base: Arc<NormalizedAlgebra>,
    pub pattern: PatternHip,
    pub default_bound: usize,
}

impl CatalogHip {
    pub fn space(&self) -> HipSpace {
        HipSpace::regular(self.base.clone())
    }

    /// Expansion at `bound`, complete (unbounded) when the pattern has no stars.
    pub fn expand(&self, bound: usize) -> HomotopyInnerProduct {
        let k = self.base.alg.dim();
        self.pattern.expand_complete(k).unwrap_or_else(|| self.pattern.expand(k, bound))
    }
}

fn entry(name: &str, alg: DgAlgebra, text: &str, default_bound: usize) -> Result<CatalogHip, HipError> {
    let base = NormalizedAlgebra::new(&alg)?;
    let pattern = parse_pattern(&base, &alg.as_bimodule(), text)?;
    Ok(CatalogHip { name: name.to_string(), base, pattern, default_bound })
}

/// The tetrahedral inner product: the sum of the triangle pattern over all four faces.
pub fn sphere_cochain_pattern_text() -> String {
    [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .iter()
        .map(|f| simplex_pattern_text(f).expect("three vertices"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn catalog_hip(name: &str) -> Result<CatalogHip, HipError> {
    let simplex = |n: usize| make_simplex_algebra(n, &(0..=n).collect::<Vec<_>>()).expect("static definition");
    match name {
        "sphere-strict" => entry(name, make_sphere_cohomology(), SPHERE_STRICT, 8),
        "sphere-tilde" => entry(name, make_sphere_cohomology(), SPHERE_TILDE, 8),
        "simplex0" => entry(name, simplex(0), POINT, 8),
        "simplex01" => entry(name, simplex(1), EDGE, 8),
        "simplex012" => entry(name, simplex(2), TRIANGLE, 5),
        "sphere-cochain" => entry(name, make_sphere_cochain_algebra(), &sphere_cochain_pattern_text(), 5),
        "counterexample" => entry(name, make_counterexample_algebra(), COUNTEREXAMPLE, 8),
        other => Err(HipError::UnknownName(other.to_string())),
    }
}

/// The face inner product on `vertices`, viewed on a larger algebra.
pub fn face_hip(base: &NormalizedAlgebra, vertices: &[usize], bound: usize) -> Result<HomotopyInnerProduct, HipError> {
    let text = simplex_pattern_text(vertices).ok_or_else(|| HipError::UnknownName(format!("{vertices:?}")))?;
    let p = parse_pattern(base, &base.alg.as_bimodule(), &text)?;
    Ok(p.expand(base.alg.dim(), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::make_quasi_iso_f;

    fn key(base: &NormalizedAlgebra, left: &[&str], m: &str, right: &[&str]) -> HipKey {
        HipKey {
            left: left.iter().map(|n| base.letter(n).unwrap()).collect(),
            m: base.alg.index_of(m).unwrap(),
            right: right.iter().map(|n| base.letter(n).unwrap()).collect(),
        }
    }

    #[test]
    fn edge_pattern_components() {
        let c = catalog_hip("simplex01").unwrap();
        let f = c.expand(8);
        let k = key(&c.base, &["b01", "b01"], "e0", &[]);
        assert_eq!(f.comps[&k], c.base.alg.vector("b01").unwrap());
        // two families, p = 0..=8
        assert_eq!(f.comps.len(), 18);
        assert_eq!(f.degree, 1);
    }

    #[test]
    fn all_stars_empty_gives_lowest_component() {
        let c = catalog_hip("simplex012").unwrap();
        let f0 = c.pattern.expand(c.base.alg.dim(), 0);
        assert_eq!(f0.comps.len(), 3);
        assert!(f0.comps.keys().all(|k| k.left.is_empty() && k.right.is_empty()));
    }

    #[test]
    fn double_insertion_family_count() {
        let c = catalog_hip("simplex012").unwrap();
        let f = c.expand(4);
        let e1 = c.base.alg.index_of("e1").unwrap();
        let n = f.comps.iter().filter(|(k, v)| k.left.len() == 4 && k.m == e1 && v.get(e1)).count();
        assert_eq!(n, 6);
    }

    #[test]
    fn expansion_is_stable_under_larger_bounds() {
        let c = catalog_hip("simplex012").unwrap();
        assert_eq!(c.expand(5).truncated(4), c.expand(4));
    }

    #[test]
    fn worked_edge_evaluation() {
        let c = catalog_hip("simplex01").unwrap();
        let s = c.space();
        let df = s.differential(&c.expand(8));
        let alg = &c.base.alg;
        let e0 = alg.vector("e0").unwrap();
        let b01 = alg.vector("b01").unwrap();
        assert!(!df.eval(&c.base, std::slice::from_ref(&e0), &e0, &[], &b01));
        assert!(df.eval(&c.base, &[], &e0, &[], &e0));
    }

    #[test]
    fn strict_capping_on_edge_fails() {
        let c = catalog_hip("simplex01").unwrap();
        let s = c.space();
        let strict = c.pattern.expand(c.base.alg.dim(), 0);
        let mut rhs = face_hip(&c.base, &[0], 1).unwrap();
        rhs.add_assign(&face_hip(&c.base, &[1], 1).unwrap());
        let v = s.verify_boundary_identity(&HomotopyInnerProduct { bound: Some(1), ..strict }, &rhs);
        let v = v.unwrap_err();
        assert_eq!(v.key.left.len(), 1);
    }

    #[test]
    fn small_catalog_entries_are_closed() {
        for name in ["sphere-strict", "sphere-tilde", "counterexample", "simplex0"] {
            let c = catalog_hip(name).unwrap();
            let f = c.expand(c.default_bound);
            assert!(c.space().is_homotopy_inner_product(&f).is_ok(), "{name}");
            c.space().check_degrees(&f).unwrap();
        }
    }

    #[test]
    fn edge_identity() {
        let c = catalog_hip("simplex01").unwrap();
        let f = c.expand(8);
        let mut rhs = face_hip(&c.base, &[0], 8).unwrap();
        rhs.add_assign(&face_hip(&c.base, &[1], 8).unwrap());
        c.space().verify_boundary_identity(&f, &rhs).unwrap();
    }

    #[test]
    fn structural_matches_evaluation() {
        for name in ["simplex01", "sphere-tilde", "counterexample"] {
            let c = catalog_hip(name).unwrap();
            let s = c.space();
            let f = c.expand(3);
            let a = s.differential(&f).truncated(2);
            let b = s.differential_by_evaluation(&f, 2);
            assert_eq!(a.comps, b.comps, "{name}");
        }
    }

    #[test]
    fn pullback_of_tetrahedral_is_tilde() {
        let f = make_quasi_iso_f();
        let a = catalog_hip("sphere-cochain").unwrap();
        let t = catalog_hip("sphere-tilde").unwrap();
        let pulled = pullback_hip(&f, &a.base, &t.base, &a.expand(4));
        assert!(pulled.agrees_with(&t.expand(0)));
        assert_eq!(pulled.comps.len(), 3);
    }

    #[test]
    fn pattern_round_trip() {
        let c = catalog_hip("simplex012").unwrap();
        let m = c.base.alg.as_bimodule();
        let text = format_pattern(&c.base, &m, &c.pattern);
        assert_eq!(parse_pattern(&c.base, &m, &text).unwrap(), c.pattern);
        assert_eq!(text, TRIANGLE);
    }

    #[test]
    fn pattern_errors() {
        let c = catalog_hip("simplex012").unwrap();
        let m = c.base.alg.as_bimodule();
        let e = parse_pattern(&c.base, &m, "# ok\nleft: [e0] m: e0 right: [] out: e0").unwrap_err();
        assert!(matches!(e, HipError::Parse { line: 2, .. }));
        assert!(matches!(
            parse_pattern(&c.base, &m, "left: [c012*] m: e0 right: [] out: e0"),
            Err(HipError::StarDegree(_))
        ));
        assert!(matches!(
            parse_pattern(&c.base, &m, "left: [] m: e0 right: [] out: e0\nleft: [] m: e0 right: [] out: b01"),
            Err(HipError::InconsistentDegree(0, 1))
        ));
        assert!(matches!(catalog_hip("nope"), Err(HipError::UnknownName(_))));
    }

    #[test]
    fn relabeling() {
        assert_eq!(relabel_name("c012", &[1, 2, 3]), "c123");
        let t = simplex_pattern_text(&[0, 2]).unwrap();
        assert_eq!(t, "left: [b02*] m: e0 right: [] out: b02\nleft: [b02*] m: b02 right: [] out: e2");
    }
}
