//! BV structure on Hochschild cohomology: induced maps between truncated HH
//! bases, the two Δ operators, the Poincaré duality checks, and symbolic
//! tables over the two-family basis {X_k, Y_k} used for the 2-sphere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use thiserror::Error;

use crate::f2lin::{F2Matrix, F2Vector, LinError};
use crate::hip::{ch_of_hip, z_operator, HomotopyInnerProduct};
use crate::hochschild::{cochain_space_dim, hh_basis, CochainComplex, HHBasis, HochError, HochschildCochain, NormalizedAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BvError {
    #[error("induced map is not invertible in degree {0}")]
    NotInvertible(i32),
    #[error("degree {0} is missing from an operator")]
    MissingDegree(i32),
    #[error("labels do not form a basis in degree {0}")]
    BadLabels(i32),
    #[error(transparent)]
    Hoch(#[from] HochError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// A linear map between truncated HH groups, one matrix per source degree.
/// Columns are images of the source representatives in target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HHOperator {
    pub shift: i32,
    pub matrices: BTreeMap<i32, F2Matrix>,
}

impl HHOperator {
    pub fn get(&self, degree: i32) -> Result<&F2Matrix, BvError> {
        self.matrices.get(&degree).ok_or(BvError::MissingDegree(degree))
    }

    pub fn apply(&self, degree: i32, v: &F2Vector) -> Result<F2Vector, BvError> {
        Ok(self.get(degree)?.mul_vec(v)?)
    }

    /// `after ∘ self` on every degree where both are defined.
    pub fn then(&self, after: &HHOperator) -> Result<HHOperator, BvError> {
        let mut matrices = BTreeMap::new();
        for (&d, m) in &self.matrices {
            if let Some(n) = after.matrices.get(&(d + self.shift)) {
                matrices.insert(d, n.mul(m)?);
            }
        }
        Ok(HHOperator { shift: self.shift + after.shift, matrices })
    }

    /// Per-degree inverse; the first singular degree is an error.
    pub fn inverse(&self) -> Result<HHOperator, BvError> {
        let mut matrices = BTreeMap::new();
        for (&d, m) in &self.matrices {
            if m.rows() != m.cols() || !m.is_invertible() {
                return Err(BvError::NotInvertible(d));
            }
            matrices.insert(d + self.shift, m.inverse()?);
        }
        Ok(HHOperator { shift: -self.shift, matrices })
    }
}

/// [φ] ↦ [op(φ)] on representatives, read off in the target basis.
pub fn induced_hh_map(
    src: &HHBasis,
    dst_cx: &CochainComplex,
    dst: &HHBasis,
    shift: i32,
    op: impl Fn(&HochschildCochain) -> HochschildCochain,
) -> Result<HHOperator, BvError> {
    let mut matrices = BTreeMap::new();
    for (&d, piece) in &src.degrees {
        let Ok(target) = dst.degree(d + shift) else { continue };
        let cols = piece.reps.iter().map(|r| dst.coords(dst_cx, &op(r))).collect::<Result<Vec<_>, _>>()?;
        matrices.insert(d, F2Matrix::from_columns(target.dim(), &cols)?);
    }
    Ok(HHOperator { shift, matrices })
}

/// Everything needed to compare F⁻¹∘B∘F with F⁻¹∘Z^F for one inner product.
///
/// Operators that lower arity (B and Z^F) map HH at bound N to HH at bound
/// N-1, so both groups are computed at both bounds.
#[derive(Clone, Debug)]
pub struct BvPipeline {
    pub bound: usize,
    pub cx_a: CochainComplex,
    pub cx_d: CochainComplex,
    pub a_hi: HHBasis,
    pub a_lo: HHBasis,
    pub d_hi: HHBasis,
    pub d_lo: HHBasis,
    pub f_hi: HHOperator,
    pub f_lo: HHOperator,
    pub b: HHOperator,
    pub z: HHOperator,
    pub hip: HomotopyInnerProduct,
}

impl BvPipeline {
    pub fn new(
        base: Arc<NormalizedAlgebra>,
        hip: &HomotopyInnerProduct,
        bound: usize,
        degrees: RangeInclusive<i32>,
    ) -> Result<Self, BvError> {
        assert!(bound >= 1, "bound must be positive");
        let cx_a = CochainComplex::regular(base.clone());
        let cx_d = CochainComplex::dual(base.clone());
        let (lo, hi) = (*degrees.start(), *degrees.end());
        let s = hip.degree;
        let a_hi = hh_basis(&cx_a, bound, lo..=hi);
        let a_lo = hh_basis(&cx_a, bound - 1, lo + 1..=hi + 1);
        let d_hi = hh_basis(&cx_d, bound, lo + s..=hi + s);
        let d_lo = hh_basis(&cx_d, bound - 1, lo + s + 1..=hi + s + 1);
        let f_hi = induced_hh_map(&a_hi, &cx_d, &d_hi, s, |phi| ch_of_hip(hip, phi))?;
        let f_lo = induced_hh_map(&a_lo, &cx_d, &d_lo, s, |phi| ch_of_hip(hip, phi))?;
        let b = induced_hh_map(&d_hi, &cx_d, &d_lo, 1, |phi| cx_d.connes_b(phi).expect("dual coefficients"))?;
        let z = induced_hh_map(&a_hi, &cx_d, &d_lo, s + 1, |phi| z_operator(&base, hip, phi))?;
        Ok(BvPipeline { bound, cx_a, cx_d, a_hi, a_lo, d_hi, d_lo, f_hi, f_lo, b, z, hip: hip.clone() })
    }

    /// F⁻¹∘B∘F, from HH at bound N to HH at bound N-1.
    pub fn delta_from_transfer(&self) -> Result<HHOperator, BvError> {
        self.f_hi.then(&self.b)?.then(&self.f_lo.inverse()?)
    }

    /// F⁻¹∘Z^F.
    pub fn delta_from_z(&self) -> Result<HHOperator, BvError> {
        self.z.then(&self.f_lo.inverse()?)
    }

    /// Both conditions of a Poincaré duality structure on the computed range.
    pub fn pd_report(&self) -> PdReport {
        let mut iso_per_degree = Vec::new();
        let mut witnesses = Vec::new();
        for (&d, m) in &self.f_hi.matrices {
            let ok = m.rows() == m.cols() && m.is_invertible();
            if !ok {
                witnesses.push(format!("F is not invertible on HH in degree {d} ({}x{})", m.rows(), m.cols()));
            }
            iso_per_degree.push((d, ok));
        }
        let mut mismatches = Vec::new();
        let bf = self.f_hi.then(&self.b).expect("dimensions agree");
        for (&d, m) in &bf.matrices {
            let Some(z) = self.z.matrices.get(&d) else { continue };
            for j in 0..m.cols() {
                let (x, y) = (m.column(j), z.column(j));
                if x != y {
                    let rep = &self.a_hi.degrees[&d].reps[j];
                    witnesses.push(format!(
                        "degree {d} class {}: B(F) has coordinates {:?}, Z^F has {:?}",
                        self.cx_a.show(rep),
                        x.to_bits(),
                        y.to_bits()
                    ));
                    mismatches.push((d, F2Vector::unit(m.cols(), j)));
                }
            }
        }
        PdReport { iso_per_degree, transfer_equals_delta: mismatches.is_empty(), mismatches, witnesses }
    }

    /// Δ(a⌣b) + Δ(a)⌣b + a⌣Δ(b) compared with [a,b], in coordinates at bound N-1.
    pub fn seven_term(
        &self,
        delta: &HHOperator,
        a: &HochschildCochain,
        b: &HochschildCochain,
    ) -> Result<(F2Vector, F2Vector), BvError> {
        let cx = &self.cx_a;
        let ab = cx.cup(a, b)?;
        let lhs_ab = delta.apply(ab.degree, &self.a_hi.coords(cx, &ab)?)?;
        let da = self.a_lo.combination(a.degree + 1, &delta.apply(a.degree, &self.a_hi.coords(cx, a)?)?)?;
        let db = self.a_lo.combination(b.degree + 1, &delta.apply(b.degree, &self.a_hi.coords(cx, b)?)?)?;
        let mut lhs = lhs_ab;
        lhs.add_assign(&self.a_lo.coords(cx, &cx.cup(&da, b)?)?);
        lhs.add_assign(&self.a_lo.coords(cx, &cx.cup(a, &db)?)?);
        let rhs = self.a_lo.coords(cx, &cx.bracket(a, b)?)?;
        Ok((lhs, rhs))
    }
}

/// Builds the pipeline for `hip` and evaluates both duality conditions.
pub fn check_pd_structure(
    base: Arc<NormalizedAlgebra>,
    hip: &HomotopyInnerProduct,
    bound: usize,
    degrees: RangeInclusive<i32>,
) -> Result<PdReport, BvError> {
    Ok(BvPipeline::new(base, hip, bound, degrees)?.pd_report())
}

/// True when the seven-term identity holds for the classes of `a` and `b`.
pub fn bv_seven_term_check(
    pipeline: &BvPipeline,
    delta: &HHOperator,
    a: &HochschildCochain,
    b: &HochschildCochain,
) -> Result<bool, BvError> {
    let (lhs, rhs) = pipeline.seven_term(delta, a, b)?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdReport {
    /// Condition (1): F invertible on HH, per degree.
    pub iso_per_degree: Vec<(i32, bool)>,
    /// Condition (2): B∘F = Z^F on HH.
    pub transfer_equals_delta: bool,
    /// (degree, source class) where condition (2) fails.
    pub mismatches: Vec<(i32, F2Vector)>,
    pub witnesses: Vec<String>,
}

impl PdReport {
    pub fn is_iso(&self) -> bool {
        self.iso_per_degree.iter().all(|&(_, ok)| ok)
    }

    pub fn is_pd_structure(&self) -> bool {
        self.is_iso() && self.transfer_equals_delta
    }
}

/// Evidence that a closed cochain is not exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonexactnessCertificate {
    /// Coordinates of the class in the computed HH basis.
    pub coords: F2Vector,
    /// Dimension of the cochain space of degree |ψ|+1 and arity below the
    /// lowest arity of ψ. When D raises arity by exactly one and this is
    /// zero, no primitive can exist at all.
    pub primitive_space_dim: Option<usize>,
}

impl NonexactnessCertificate {
    pub fn nonexact(&self) -> bool {
        !self.coords.is_zero() || self.primitive_space_dim == Some(0)
    }
}

pub fn nonexactness_certificate(
    hh: &HHBasis,
    cx: &CochainComplex,
    psi: &HochschildCochain,
) -> Result<NonexactnessCertificate, BvError> {
    let coords = hh.coords(cx, psi)?;
    let lowest = psi.comps.keys().map(Vec::len).min();
    let primitive_space_dim = match lowest {
        Some(a) if cx.is_bigraded() && a >= 1 => {
            Some(cochain_space_dim(cx, psi.degree + 1, a - 1))
        }
        _ => None,
    };
    Ok(NonexactnessCertificate { coords, primitive_space_dim })
}

// ---------------------------------------------------------------------------
// Two-family tables

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Degree k.
    X,
    /// Degree k - 2.
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub family: Family,
    pub index: usize,
}

pub fn x(k: usize) -> Gen {
    Gen { family: Family::X, index: k }
}

pub fn y(k: usize) -> Gen {
    Gen { family: Family::Y, index: k }
}

impl Gen {
    pub fn degree(&self) -> i32 {
        match self.family {
            Family::X => self.index as i32,
            Family::Y => self.index as i32 - 2,
        }
    }
}

/// A sum of generators.
pub type Elem = BTreeSet<Gen>;

pub fn elem(gens: &[Gen]) -> Elem {
    let mut e = Elem::new();
    for g in gens {
        toggle(&mut e, *g);
    }
    e
}

fn toggle(e: &mut Elem, g: Gen) {
    if !e.remove(&g) {
        e.insert(g);
    }
}

fn add_elem(a: &mut Elem, b: &Elem) {
    for g in b {
        toggle(a, *g);
    }
}

/// A table value, or a marker that it involves indices above the table's range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Value(Elem),
    OutOfRange,
}

impl Entry {
    fn checked(e: Elem, k_max: usize) -> Entry {
        if e.iter().any(|g| g.index > k_max) {
            Entry::OutOfRange
        } else {
            Entry::Value(e)
        }
    }

    pub fn value(&self) -> Option<&Elem> {
        match self {
            Entry::Value(e) => Some(e),
            Entry::OutOfRange => None,
        }
    }
}

/// Product and Δ on the generators {X_k, Y_k : k ≤ K}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvTable {
    pub k_max: usize,
    pub names: (String, String),
    pub product: BTreeMap<(Gen, Gen), Entry>,
    pub delta: BTreeMap<Gen, Entry>,
}

impl BvTable {
    pub fn gens(k_max: usize) -> Vec<Gen> {
        (0..=k_max).map(x).chain((0..=k_max).map(y)).collect()
    }

    /// Generators of one degree, X first.
    pub fn gens_in_degree(k_max: usize, d: i32) -> Vec<Gen> {
        let mut out = Vec::new();
        if d >= 0 && d as usize <= k_max {
            out.push(x(d as usize));
        }
        if d + 2 >= 0 && (d + 2) as usize <= k_max {
            out.push(y((d + 2) as usize));
        }
        out
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Entry {
        let mut out = Elem::new();
        for g in a {
            for h in b {
                match &self.product[&(*g, *h)] {
                    Entry::Value(v) => add_elem(&mut out, v),
                    Entry::OutOfRange => return Entry::OutOfRange,
                }
            }
        }
        Entry::Value(out)
    }

    pub fn delta_of(&self, a: &Elem) -> Entry {
        let mut out = Elem::new();
        for g in a {
            match &self.delta[g] {
                Entry::Value(v) => add_elem(&mut out, v),
                Entry::OutOfRange => return Entry::OutOfRange,
            }
        }
        Entry::Value(out)
    }

    /// [a,b] = Δ(ab) + Δ(a)b + aΔ(b), out of range if any term is.
    pub fn derived_bracket(&self, a: Gen, b: Gen) -> Entry {
        let (ea, eb) = (elem(&[a]), elem(&[b]));
        let terms = [
            self.mul(&ea, &eb).value().cloned().map(|ab| self.delta_of(&ab)),
            self.delta_of(&ea).value().cloned().map(|da| self.mul(&da, &eb)),
            self.delta_of(&eb).value().cloned().map(|db| self.mul(&ea, &db)),
        ];
        let mut out = Elem::new();
        for t in terms {
            match t {
                Some(Entry::Value(v)) => add_elem(&mut out, &v),
                _ => return Entry::OutOfRange,
            }
        }
        Entry::Value(out)
    }

    pub fn show_gen(&self, g: Gen) -> String {
        let n = match g.family {
            Family::X => &self.names.0,
            Family::Y => &self.names.1,
        };
        format!("{n}_{}", g.index)
    }

    pub fn show_elem(&self, e: &Elem) -> String {
        if e.is_empty() {
            "0".into()
        } else {
            e.iter().map(|g| self.show_gen(*g)).collect::<Vec<_>>().join(" + ")
        }
    }

    pub fn show_entry(&self, e: &Entry) -> String {
        match e {
            Entry::Value(v) => self.show_elem(v),
            Entry::OutOfRange => "(out of range)".into(),
        }
    }

    /// Entries that differ from `other`, rendered with this table's names.
    pub fn diff(&self, other: &BvTable) -> Vec<String> {
        let mut out = Vec::new();
        for (k, v) in &self.product {
            let w = other.product.get(k);
            if w != Some(v) {
                out.push(format!(
                    "{}·{}: {} vs {}",
                    self.show_gen(k.0),
                    self.show_gen(k.1),
                    self.show_entry(v),
                    w.map_or("missing".into(), |w| self.show_entry(w))
                ));
            }
        }
        for (g, v) in &self.delta {
            let w = other.delta.get(g);
            if w != Some(v) {
                out.push(format!(
                    "Δ({}): {} vs {}",
                    self.show_gen(*g),
                    self.show_entry(v),
                    w.map_or("missing".into(), |w| self.show_entry(w))
                ));
            }
        }
        if self.product.len() != other.product.len() || self.delta.len() != other.delta.len() {
            out.push("tables have different sizes".into());
        }
        out
    }

    /// Δ∘Δ = 0 wherever both steps stay in range.
    pub fn check_delta_squared(&self) -> Result<(), String> {
        for (g, e) in &self.delta {
            if let Entry::Value(v) = e {
                if let Entry::Value(w) = self.delta_of(v) {
                    if !w.is_empty() {
                        return Err(format!("Δ(Δ({})) = {}", self.show_gen(*g), self.show_elem(&w)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Associativity and unitality (X_0 is the unit) wherever defined.
    pub fn check_algebra(&self) -> Result<(), String> {
        let gens = Self::gens(self.k_max);
        for &a in &gens {
            let ea = elem(&[a]);
            let unit = elem(&[x(0)]);
            if self.mul(&unit, &ea) != Entry::Value(ea.clone()) || self.mul(&ea, &unit) != Entry::Value(ea.clone()) {
                return Err(format!("{} is not fixed by the unit", self.show_gen(a)));
            }
            for &b in &gens {
                for &c in &gens {
                    let (eb, ec) = (elem(&[b]), elem(&[c]));
                    let l = self.mul(&ea, &eb).value().cloned().map(|ab| self.mul(&ab, &ec));
                    let r = self.mul(&eb, &ec).value().cloned().map(|bc| self.mul(&ea, &bc));
                    if let (Some(Entry::Value(l)), Some(Entry::Value(r))) = (l, r) {
                        if l != r {
                            return Err(format!(
                                "({}·{})·{} ≠ {}·({}·{})",
                                self.show_gen(a),
                                self.show_gen(b),
                                self.show_gen(c),
                                self.show_gen(a),
                                self.show_gen(b),
                                self.show_gen(c)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for BvTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, e) in &self.delta {
            writeln!(f, "Δ({}) = {}", self.show_gen(*g), self.show_entry(e))?;
        }
        for ((a, b), e) in &self.product {
            writeln!(f, "{}·{} = {}", self.show_gen(*a), self.show_gen(*b), self.show_entry(e))?;
        }
        Ok(())
    }
}

/// Table with X_kX_l = X_{k+l}, Y_kY_l = 0, X_kY_l = Y_lX_k = Y_{k+l} and the given Δ.
pub fn free_table(k_max: usize, names: (&str, &str), delta: impl Fn(Gen) -> Elem) -> BvTable {
    let gens = BvTable::gens(k_max);
    let mut product = BTreeMap::new();
    for &a in &gens {
        for &b in &gens {
            let v = match (a.family, b.family) {
                (Family::X, Family::X) => elem(&[x(a.index + b.index)]),
                (Family::Y, Family::Y) => Elem::new(),
                _ => elem(&[y(a.index + b.index)]),
            };
            product.insert((a, b), Entry::checked(v, k_max));
        }
    }
    let delta = gens.iter().map(|&g| (g, Entry::checked(delta(g), k_max))).collect();
    BvTable { k_max, names: (names.0.into(), names.1.into()), product, delta }
}

fn odd(k: usize) -> bool {
    k % 2 == 1
}

/// The loop homology model: Δ(α_k) = 0, Δ(β_k) = k(α_{k-1} + β_{k+1}).
pub fn string_topology_model(k_max: usize) -> BvTable {
    free_table(k_max, ("α", "β"), |g| match g.family {
        Family::Y if odd(g.index) => elem(&[x(g.index - 1), y(g.index + 1)]),
        _ => Elem::new(),
    })
}

/// Reference for the strict inner product: Δ(φ_k) = 0, Δ(ψ_k) = kφ_{k-1}.
pub fn strict_reference_table(k_max: usize) -> BvTable {
    free_table(k_max, ("φ", "ψ"), |g| match g.family {
        Family::Y if odd(g.index) => elem(&[x(g.index - 1)]),
        _ => Elem::new(),
    })
}

/// Reference for the inner product with one homotopy:
/// Δ(ψ_k) = k(φ_{k-1} + ψ_{k+1}), Δ(φ_k) = k(φ_{k+1} + ψ_{k+3}).
pub fn homotopy_reference_table(k_max: usize) -> BvTable {
    free_table(k_max, ("φ", "ψ"), |g| match g.family {
        Family::Y if odd(g.index) => elem(&[x(g.index - 1), y(g.index + 1)]),
        Family::X if odd(g.index) => elem(&[x(g.index + 1), y(g.index + 3)]),
        _ => Elem::new(),
    })
}

// ---------------------------------------------------------------------------
// The 2-sphere cohomology model

/// Labeled cochains on H•(S²): φ_k, ψ_k with algebra values and θ_k, χ_k with
/// dual values, all on the word s̄^k.
#[derive(Clone, Debug)]
pub struct SphereLabels {
    pub cx_a: CochainComplex,
    pub cx_d: CochainComplex,
}

impl SphereLabels {
    pub fn new(base: Arc<NormalizedAlgebra>) -> Self {
        SphereLabels { cx_a: CochainComplex::regular(base.clone()), cx_d: CochainComplex::dual(base) }
    }

    fn word(&self, k: usize) -> Vec<u16> {
        let s = self.cx_a.base.letter("s").expect("sphere letter s");
        vec![s; k]
    }

    pub fn phi(&self, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32, self.word(k), self.cx_a.module.vector("e").expect("e"))
    }

    pub fn psi(&self, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32 - 2, self.word(k), self.cx_a.module.vector("s").expect("s"))
    }

    pub fn theta(&self, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32 + 2, self.word(k), self.cx_d.module.vector("s*").expect("s*"))
    }

    pub fn chi(&self, k: usize) -> HochschildCochain {
        HochschildCochain::single(k as i32, self.word(k), self.cx_d.module.vector("e*").expect("e*"))
    }

    /// φ/ψ for the algebra side.
    pub fn a_label(&self, g: Gen) -> HochschildCochain {
        match g.family {
            Family::X => self.phi(g.index),
            Family::Y => self.psi(g.index),
        }
    }

    /// θ_k plays the part of X_k (degree k+2) and χ_k of Y_k (degree k) on the dual side.
    pub fn d_label(&self, g: Gen) -> HochschildCochain {
        match g.family {
            Family::X => self.theta(g.index),
            Family::Y => self.chi(g.index),
        }
    }
}

/// Change of basis between HH representatives and labels in one degree.
#[derive(Clone, Debug)]
pub struct LabelBasis {
    pub gens: Vec<Gen>,
    to_coords: F2Matrix,
    to_labels: F2Matrix,
}

impl LabelBasis {
    /// `gens` must give a basis of HH in `degree`, each label via `cochain`.
    pub fn new(
        hh: &HHBasis,
        cx: &CochainComplex,
        degree: i32,
        gens: Vec<Gen>,
        cochain: impl Fn(Gen) -> HochschildCochain,
    ) -> Result<Self, BvError> {
        let dim = hh.degree(degree)?.dim();
        let cols = gens.iter().map(|&g| hh.coords(cx, &cochain(g))).collect::<Result<Vec<_>, _>>()?;
        let to_coords = F2Matrix::from_columns(dim, &cols)?;
        if to_coords.rows() != to_coords.cols() || !to_coords.is_invertible() {
            return Err(BvError::BadLabels(degree));
        }
        let to_labels = to_coords.inverse()?;
        Ok(LabelBasis { gens, to_coords, to_labels })
    }

    pub fn elem_of(&self, coords: &F2Vector) -> Result<Elem, BvError> {
        let v = self.to_labels.mul_vec(coords)?;
        Ok(v.ones().map(|i| self.gens[i]).collect())
    }

    pub fn coords_of(&self, e: &Elem) -> Result<F2Vector, BvError> {
        let mut v = F2Vector::zeros(self.gens.len());
        for g in e {
            let i = self.gens.iter().position(|h| h == g).ok_or(BvError::BadLabels(g.degree()))?;
            v.set(i, true);
        }
        Ok(self.to_coords.mul_vec(&v)?)
    }
}

/// Label basis φ_d, ψ_{d+2} of HH(A, A) in one degree.
fn a_labels(
    labels: &SphereLabels,
    hh: &HHBasis,
    degree: i32,
    label_max: usize,
) -> Result<LabelBasis, BvError> {
    LabelBasis::new(hh, &labels.cx_a, degree, BvTable::gens_in_degree(label_max, degree), |g| labels.a_label(g))
}

impl SphereLabels {
    pub fn a_basis(&self, hh: &HHBasis, degree: i32, label_max: usize) -> Result<LabelBasis, BvError> {
        a_labels(self, hh, degree, label_max)
    }

    /// Label basis θ_{d-2}, χ_d of HH(A, A*) in degree d.
    pub fn d_basis(&self, hh: &HHBasis, degree: i32, label_max: usize) -> Result<LabelBasis, BvError> {
        let mut gens = Vec::new();
        if degree >= 2 && (degree - 2) as usize <= label_max {
            gens.push(x((degree - 2) as usize));
        }
        if degree >= 0 && degree as usize <= label_max {
            gens.push(y(degree as usize));
        }
        LabelBasis::new(hh, &self.cx_d, degree, gens, |g| self.d_label(g))
    }
}

/// The bound used for a table over indices ≤ K: products and Δ of labels up
/// to K then stay exact, with room for the arity-raising part of F.
pub fn table_bound(k_max: usize) -> usize {
    2 * k_max + 4
}

/// Degrees computed for a table over indices ≤ K.
pub fn table_degrees(k_max: usize) -> RangeInclusive<i32> {
    -2..=2 * k_max as i32
}

/// Builds the labeled product and Δ tables over {φ_k, ψ_k : k ≤ K} from a pipeline on H•(S²).
pub fn hh_bv_table(
    pipeline: &BvPipeline,
    labels: &SphereLabels,
    delta: &HHOperator,
    k_max: usize,
) -> Result<BvTable, BvError> {
    let label_max = pipeline.bound;
    let gens = BvTable::gens(k_max);
    let mut hi_cache: BTreeMap<i32, LabelBasis> = BTreeMap::new();
    let mut lo_cache: BTreeMap<i32, LabelBasis> = BTreeMap::new();
    let mut hi = |d: i32| -> Result<LabelBasis, BvError> {
        if let Some(b) = hi_cache.get(&d) {
            return Ok(b.clone());
        }
        let b = a_labels(labels, &pipeline.a_hi, d, label_max)?;
        hi_cache.insert(d, b.clone());
        Ok(b)
    };
    let mut product = BTreeMap::new();
    for &a in &gens {
        for &b in &gens {
            let c = pipeline.cx_a.cup(&labels.a_label(a), &labels.a_label(b))?;
            if c.is_zero() {
                product.insert((a, b), Entry::Value(Elem::new()));
                continue;
            }
            let e = hi(c.degree)?.elem_of(&pipeline.a_hi.coords(&pipeline.cx_a, &c)?)?;
            product.insert((a, b), Entry::checked(e, k_max));
        }
    }
    let mut delta_t = BTreeMap::new();
    for &g in &gens {
        let d = g.degree();
        let v = hi(d)?.coords_of(&elem(&[g]))?;
        let w = delta.apply(d, &v)?;
        let lo = match lo_cache.get(&(d + 1)) {
            Some(b) => b.clone(),
            None => {
                let b = a_labels(labels, &pipeline.a_lo, d + 1, pipeline.bound - 1)?;
                lo_cache.insert(d + 1, b.clone());
                b
            }
        };
        delta_t.insert(g, Entry::checked(lo.elem_of(&w)?, k_max));
    }
    Ok(BvTable { k_max, names: ("φ".into(), "ψ".into()), product, delta: delta_t })
}

// ---------------------------------------------------------------------------
// Isomorphisms between tables

/// A unital algebra map given on generators, with images of every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMap {
    pub images: BTreeMap<Gen, Entry>,
}

impl TableMap {
    /// Extends X_1 ↦ u, Y_0 ↦ v multiplicatively: X_k ↦ u^k, Y_k ↦ v·u^k.
    pub fn from_generators(dst: &BvTable, u: &Elem, v: &Elem) -> TableMap {
        let mut images = BTreeMap::new();
        let mut power = Entry::Value(elem(&[x(0)]));
        for k in 0..=dst.k_max {
            images.insert(x(k), power.clone());
            let yk = match &power {
                Entry::Value(p) => dst.mul(v, p),
                Entry::OutOfRange => Entry::OutOfRange,
            };
            images.insert(y(k), yk);
            power = match &power {
                Entry::Value(p) => dst.mul(p, u),
                Entry::OutOfRange => Entry::OutOfRange,
            };
        }
        TableMap { images }
    }

    pub fn apply(&self, e: &Elem) -> Entry {
        let mut out = Elem::new();
        for g in e {
            match &self.images[g] {
                Entry::Value(v) => add_elem(&mut out, v),
                Entry::OutOfRange => return Entry::OutOfRange,
            }
        }
        Entry::Value(out)
    }
}

/// Outcome of checking one candidate map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapCheck {
    pub multiplicative: Result<(), String>,
    pub bijective: Result<(), String>,
    pub intertwines: Result<(), String>,
}

impl MapCheck {
    pub fn passes(&self) -> bool {
        self.multiplicative.is_ok() && self.bijective.is_ok() && self.intertwines.is_ok()
    }
}

/// Checks a map src → dst on all generators whose images stay in range.
pub fn check_table_map(src: &BvTable, dst: &BvTable, map: &TableMap) -> MapCheck {
    let gens = BvTable::gens(src.k_max);
    let show = |e: &Entry| dst.show_entry(e);
    let mut multiplicative = Ok(());
    'outer: for &a in &gens {
        for &b in &gens {
            let Entry::Value(ab) = &src.product[&(a, b)] else { continue };
            let lhs = map.apply(ab);
            let (Entry::Value(fa), Entry::Value(fb)) = (&map.images[&a], &map.images[&b]) else { continue };
            let rhs = dst.mul(fa, fb);
            if lhs != Entry::OutOfRange && rhs != Entry::OutOfRange && lhs != rhs {
                multiplicative = Err(format!(
                    "image of {}·{} is {} but the product of images is {}",
                    src.show_gen(a),
                    src.show_gen(b),
                    show(&lhs),
                    show(&rhs)
                ));
                break 'outer;
            }
        }
    }
    let mut bijective = Ok(());
    let degrees: BTreeSet<i32> = gens.iter().map(Gen::degree).collect();
    for d in degrees {
        let sg = BvTable::gens_in_degree(src.k_max, d);
        let dg = BvTable::gens_in_degree(dst.k_max, d);
        // a degree is checked when it is complete on both sides and all images are in range
        if sg.len() != 2 - usize::from(d < 0) || dg.len() != sg.len() {
            continue;
        }
        let cols: Option<Vec<F2Vector>> = sg
            .iter()
            .map(|g| match &map.images[g] {
                Entry::Value(v) => {
                    let mut c = F2Vector::zeros(dg.len());
                    for h in v {
                        let i = dg.iter().position(|k| k == h)?;
                        c.set(i, true);
                    }
                    Some(c)
                }
                Entry::OutOfRange => None,
            })
            .collect();
        let Some(cols) = cols else { continue };
        let m = F2Matrix::from_columns(dg.len(), &cols).expect("lengths agree");
        if !m.is_invertible() {
            bijective = Err(format!("not bijective in degree {d}"));
            break;
        }
    }
    let mut intertwines = Ok(());
    for &g in &gens {
        let Entry::Value(fg) = &map.images[&g] else { continue };
        let lhs = dst.delta_of(fg);
        let rhs = match &src.delta[&g] {
            Entry::Value(dg) => map.apply(dg),
            Entry::OutOfRange => Entry::OutOfRange,
        };
        if lhs != Entry::OutOfRange && rhs != Entry::OutOfRange && lhs != rhs {
            intertwines = Err(format!(
                "Δ of the image of {} is {} but the image of Δ is {}",
                src.show_gen(g),
                show(&lhs),
                show(&rhs)
            ));
            break;
        }
    }
    MapCheck { multiplicative, bijective, intertwines }
}

/// The map Θ(φ_k) = α_k + kβ_{k+2}, Θ(ψ_k) = β_k.
pub fn theta_map(k_max: usize) -> TableMap {
    let mut images = BTreeMap::new();
    for k in 0..=k_max {
        let xk = if odd(k) { elem(&[x(k), y(k + 2)]) } else { elem(&[x(k)]) };
        images.insert(x(k), Entry::checked(xk, k_max));
        images.insert(y(k), Entry::Value(elem(&[y(k)])));
    }
    TableMap { images }
}

pub fn check_theta_iso(src: &BvTable, dst: &BvTable) -> MapCheck {
    check_table_map(src, dst, &theta_map(src.k_max))
}

/// One candidate of the search, by the images of X_1 and Y_0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub x1: Elem,
    pub y0: Elem,
    pub map: TableMap,
    pub check: MapCheck,
}

/// All nonzero elements of the span of `gens`, in a fixed order.
fn nonzero_elements(gens: &[Gen]) -> Vec<Elem> {
    (1u32..(1 << gens.len()))
        .map(|mask| gens.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, g)| *g).collect())
        .collect()
}

/// Every unital algebra map determined by X_1 ↦ (nonzero element of degree 1)
/// and Y_0 ↦ (nonzero element of degree -2), each checked against the tables.
/// Returns the candidate list and the graded dimensions it was built from.
pub fn bv_iso_search(src: &BvTable, dst: &BvTable) -> (Vec<Candidate>, (usize, usize)) {
    let deg1 = BvTable::gens_in_degree(dst.k_max, 1);
    let deg_m2 = BvTable::gens_in_degree(dst.k_max, -2);
    let mut out = Vec::new();
    for u in nonzero_elements(&deg1) {
        for v in nonzero_elements(&deg_m2) {
            let map = TableMap::from_generators(dst, &u, &v);
            let check = check_table_map(src, dst, &map);
            out.push(Candidate { x1: u.clone(), y0: v, map, check });
        }
    }
    (out, (deg1.len(), deg_m2.len()))
}
