//! Command implementations for the `hhbv` binary. Every command returns a
//! [`Report`]: a list of named checks with witnesses plus rendered tables.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use hhbv_core::bv::{
    self, bv_iso_search, check_theta_iso, hh_bv_table, homotopy_reference_table,
    nonexactness_certificate, strict_reference_table, string_topology_model, table_bound, table_degrees, theta_map,
    BvPipeline, BvTable, Entry, SphereLabels,
};
use hhbv_core::dga::{self, builtin_algebra, check_dga, parse_algebra, DgAlgebra};
use hhbv_core::hip::{self, catalog_hip, ch_of_hip, face_hip, format_pattern, z_operator, HipViolation};
use hhbv_core::hochschild::{hh_basis, CochainComplex, HochschildCochain, NormalizedAlgebra, Validity};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const COMMANDS: &[&str] =
    &["check-dga", "verify-hip", "local-identities", "hh-basis", "bv-table", "compare-bv", "counterexample", "report-all"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub command: String,
    /// Builtin name, or `file:<path>`.
    pub algebra: Option<String>,
    pub hip: Option<String>,
    pub bound: Option<usize>,
    pub k_max: usize,
    pub degree_min: Option<i32>,
    pub degree_max: Option<i32>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig { command: command.to_string(), k_max: 8, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !COMMANDS.contains(&self.command.as_str()) {
            bail!("unknown command {}", self.command);
        }
        if self.bound == Some(0) {
            bail!("--bound must be positive");
        }
        if self.k_max < 4 {
            bail!("--k-max must be at least 4");
        }
        if let (Some(a), Some(b)) = (self.degree_min, self.degree_max) {
            if a > b {
                bail!("--degree-min exceeds --degree-max");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witnesses: Vec<String>,
    pub expected_ref: String,
}

impl Check {
    /// A failing outcome always carries at least one witness.
    pub fn new(name: impl Into<String>, expected: impl Into<String>, outcome: Result<(), Vec<String>>) -> Check {
        let (pass, witnesses) = match outcome {
            Ok(()) => (true, Vec::new()),
            Err(w) if w.is_empty() => (false, vec!["no witness recorded".into()]),
            Err(w) => (false, w),
        };
        Check { name: name.into(), pass, witnesses, expected_ref: expected.into() }
    }

    fn ensure(name: impl Into<String>, expected: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) -> Check {
        Check::new(name, expected, if ok { Ok(()) } else { Err(vec![witness()]) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub lines: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub output: Vec<Section>,
    pub timing_ms: Option<u64>,
    pub version: String,
}

impl Report {
    fn new(cfg: &RunConfig) -> Report {
        Report {
            command: cfg.command.clone(),
            config: cfg.clone(),
            checks: Vec::new(),
            output: Vec::new(),
            timing_ms: None,
            version: VERSION.to_string(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn section(&mut self, title: impl Into<String>, lines: Vec<String>) {
        self.output.push(Section { title: title.into(), lines });
    }

    fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}: {}", c.name);
            self.checks.push(c);
        }
        for mut s in other.output {
            s.title = format!("{prefix}: {}", s.title);
            self.output.push(s);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "hhbv {} {}", self.version, self.command);
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
            if !c.pass {
                let _ = writeln!(s, "    expected: {}", c.expected_ref);
            }
            for w in &c.witnesses {
                let _ = writeln!(s, "    witness: {w}");
            }
        }
        for sec in &self.output {
            let _ = writeln!(s, "\n== {} ==", sec.title);
            for l in &sec.lines {
                let _ = writeln!(s, "{l}");
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "\n{passed}/{} checks passed", self.checks.len());
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(s, "time: {ms} ms");
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match cfg.command.as_str() {
        "check-dga" => cmd_check_dga(cfg),
        "verify-hip" => cmd_verify_hip(cfg),
        "local-identities" => cmd_local_identities(cfg),
        "hh-basis" => cmd_hh_basis(cfg),
        "bv-table" => cmd_bv_table(cfg),
        "compare-bv" => cmd_compare_bv(cfg),
        "counterexample" => cmd_counterexample(cfg),
        "report-all" => cmd_report_all(cfg),
        other => Err(anyhow!("unknown command {other}")),
    }?;
    if cfg.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

pub fn resolve_algebra(selector: &str) -> Result<DgAlgebra> {
    match selector.strip_prefix("file:") {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            parse_algebra(&text).with_context(|| format!("parsing {path}"))
        }
        None => builtin_algebra(selector).map_err(|e| {
            anyhow!("{e}; builtin algebras are {}", dga::BUILTIN_ALGEBRAS.join(", "))
        }),
    }
}

/// A catalog name, or `file:<path>` holding patterns over `--algebra`.
pub fn resolve_hip(selector: &str, algebra: Option<&str>) -> Result<hip::CatalogHip> {
    let Some(path) = selector.strip_prefix("file:") else {
        return catalog_hip(selector).map_err(|e| anyhow!("{e}; catalog: {}", hip::CATALOG.join(", ")));
    };
    let sel = algebra.ok_or_else(|| anyhow!("a pattern file needs --algebra"))?;
    let alg = resolve_algebra(sel)?;
    let base = NormalizedAlgebra::new(&alg)?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let pattern = hip::parse_pattern(&base, &alg.as_bimodule(), &text).with_context(|| format!("parsing {path}"))?;
    let default_bound = if base.letters() <= 2 { 8 } else { 5 };
    Ok(hip::CatalogHip { name: selector.to_string(), base, pattern, default_bound })
}

fn violation(v: HipViolation) -> Vec<String> {
    vec![v.description]
}

// ---------------------------------------------------------------------------

pub fn cmd_check_dga(cfg: &RunConfig) -> Result<Report> {
    let sel = cfg.algebra.as_deref().unwrap_or("sphere-cochains");
    let alg = resolve_algebra(sel)?;
    let mut r = Report::new(cfg);
    for c in check_dga(&alg).checks {
        let outcome = if c.pass { Ok(()) } else { Err(c.witness.into_iter().collect()) };
        r.checks.push(Check::new(c.name.clone(), format!("{} holds on all basis tuples", c.name), outcome));
    }
    r.section(format!("algebra {sel}"), dga::format_algebra(&alg).lines().map(String::from).collect());
    Ok(r)
}

pub fn cmd_verify_hip(cfg: &RunConfig) -> Result<Report> {
    let name = cfg.hip.as_deref().unwrap_or("sphere-tilde");
    let c = resolve_hip(name, cfg.algebra.as_deref())?;
    let bound = cfg.bound.unwrap_or(c.default_bound);
    let f = c.expand(bound);
    let space = c.space();
    let mut r = Report::new(cfg);
    r.checks.push(Check::new(
        "component degrees agree",
        format!("every component has degree {}", f.degree),
        space.check_degrees(&f).map_err(|k| vec![format!("{k:?}")]),
    ));
    let scope = match f.bound {
        None => "all p, q".to_string(),
        Some(n) => format!("p, q <= {n}"),
    };
    match boundary_faces(name, bound)? {
        Some((label, rhs)) => r.checks.push(Check::new(
            format!("DF = {label} ({scope})"),
            format!("DF = {label}"),
            space.verify_boundary_identity(&f, &rhs).map_err(violation),
        )),
        None => r.checks.push(Check::new(
            format!("DF = 0 ({scope})"),
            "DF = 0",
            space.is_homotopy_inner_product(&f).map_err(violation),
        )),
    }
    // direct evaluation enumerates every basis tuple, so keep it small on big algebras
    let small = bound.min(if c.base.alg.dim() > 6 { 1 } else { 2 });
    let structural = space.differential(&f).truncated(small);
    let evaluated = space.differential_by_evaluation(&f, small);
    r.checks.push(Check::ensure(
        format!("structural DF = evaluated DF (p, q <= {small})"),
        "both DF computations agree",
        structural.comps == evaluated.comps,
        || format!("{} structural vs {} evaluated components", structural.comps.len(), evaluated.comps.len()),
    ));
    let mut lines = vec![format!("degree {}, {} components", f.degree, f.comps.len())];
    lines.extend(format_pattern(&c.base, &c.base.alg.as_bimodule(), &c.pattern).lines().map(String::from));
    r.section(format!("inner product {name}"), lines);
    Ok(r)
}

/// For the simplex entries, the sum of codimension-one faces that DF must equal.
fn boundary_faces(name: &str, bound: usize) -> Result<Option<(&'static str, hip::HomotopyInnerProduct)>> {
    let (label, faces): (&str, &[&[usize]]) = match name {
        "simplex01" => ("F^[0] + F^[1]", &[&[0], &[1]]),
        "simplex012" => ("F^[01] + F^[02] + F^[12]", &[&[0, 1], &[0, 2], &[1, 2]]),
        _ => return Ok(None),
    };
    let c = catalog_hip(name)?;
    let mut rhs = face_hip(&c.base, faces[0], bound)?;
    for face in &faces[1..] {
        rhs.add_assign(&face_hip(&c.base, face, bound)?);
    }
    Ok(Some((label, rhs)))
}

pub fn cmd_local_identities(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new(cfg);
    let point = catalog_hip("simplex0")?;
    let n0 = cfg.bound.unwrap_or(point.default_bound);
    r.checks.push(Check::new(
        "DF^[0] = 0",
        "the vertex inner product is closed",
        point.space().is_homotopy_inner_product(&point.expand(n0)).map_err(violation),
    ));

    for (name, vertices) in [("simplex01", "01"), ("simplex012", "012")] {
        let c = catalog_hip(name)?;
        let n = cfg.bound.unwrap_or(c.default_bound);
        let (label, rhs) = boundary_faces(name, n)?.expect("simplex entries have faces");
        r.checks.push(Check::new(
            format!("DF^[{vertices}] = {label} (p, q <= {n})"),
            format!("DF^[{vertices}] = {label} componentwise"),
            c.space().verify_boundary_identity(&c.expand(n), &rhs).map_err(violation),
        ));
    }
    Ok(r)
}

fn validity_text(v: Validity) -> String {
    match v {
        Validity::Complete => "complete".into(),
        Validity::UpToArity(n) => format!("classes of arity <= {n}"),
        Validity::Truncated => "truncated".into(),
    }
}

pub fn cmd_hh_basis(cfg: &RunConfig) -> Result<Report> {
    let sel = cfg.algebra.as_deref().unwrap_or("sphere-cohomology");
    let alg = resolve_algebra(sel)?;
    let base = NormalizedAlgebra::new(&alg)?;
    // Brute-force cohomology is letters^bound; large alphabets get a small default.
    let bound = cfg.bound.unwrap_or(if base.letters() <= 2 { 8 } else { 2 });
    let range = cfg.degree_min.unwrap_or(-2)..=cfg.degree_max.unwrap_or(6);
    let mut r = Report::new(cfg);
    for (label, cx) in [("HH(A, A)", CochainComplex::regular(base.clone())), ("HH(A, A*)", CochainComplex::dual(base))] {
        let hh = hh_basis(&cx, bound, range.clone());
        let mut lines = Vec::new();
        let mut bad = Vec::new();
        for (d, piece) in &hh.degrees {
            lines.push(format!("degree {d}: dim {} ({})", piece.dim(), validity_text(piece.validity)));
            for (i, rep) in piece.reps.iter().enumerate() {
                lines.push(format!("  {}", cx.show(rep)));
                match hh.coords(&cx, rep) {
                    Ok(v) if v.first_one() == Some(i) && v.weight() == 1 => {}
                    Ok(v) => bad.push(format!("degree {d} representative {i} has coordinates {:?}", v.to_bits())),
                    Err(e) => bad.push(format!("degree {d} representative {i}: {e}")),
                }
            }
        }
        r.checks.push(Check::new(
            format!("{label} representatives are independent classes"),
            "each representative has its own unit coordinate vector",
            if bad.is_empty() { Ok(()) } else { Err(bad) },
        ));
        r.section(format!("{label} for {sel}, arity <= {bound}"), lines);
    }
    Ok(r)
}

fn table_lines(t: &BvTable) -> Vec<String> {
    t.to_string().lines().map(String::from).collect()
}

fn table_checks(r: &mut Report, t: &BvTable, expected: &BvTable, expected_text: &str) {
    let diff = t.diff(expected);
    r.checks.push(Check::new(
        format!("table matches the expected table for k <= {}", t.k_max),
        expected_text,
        if diff.is_empty() { Ok(()) } else { Err(diff) },
    ));
    r.checks.push(Check::new("Δ∘Δ = 0 in range", "Δ squares to zero", t.check_delta_squared().map_err(|w| vec![w])));
    r.checks.push(Check::new(
        "product is associative and unital in range",
        "associative unital product",
        t.check_algebra().map_err(|w| vec![w]),
    ));
}

const STRICT_EXPECTED: &str = "Δ(φ_k) = 0, Δ(ψ_k) = kφ_{k-1}, φ_kφ_l = φ_{k+l}, φ_kψ_l = ψ_{k+l}, ψ_kψ_l = 0";
const TILDE_EXPECTED: &str = "Δ(ψ_k) = k(φ_{k-1} + ψ_{k+1}), Δ(φ_k) = k(φ_{k+1} + ψ_{k+3}), same product as the strict table";
const STRING_EXPECTED: &str = "Δ(α_k) = 0, Δ(β_k) = k(α_{k-1} + β_{k+1}), α_kα_l = α_{k+l}, α_kβ_l = β_{k+l}, β_kβ_l = 0";

/// The labeled HH table of a sphere inner product, with its pipeline checks.
pub fn sphere_table(name: &str, k_max: usize, bound: Option<usize>) -> Result<(BvTable, Vec<Check>)> {
    let c = catalog_hip(name)?;
    let n = bound.unwrap_or_else(|| table_bound(k_max));
    let p = BvPipeline::new(c.base.clone(), &c.expand(n), n, table_degrees(k_max))?;
    let labels = SphereLabels::new(c.base.clone());
    let pd = p.pd_report();
    let mut checks = vec![
        Check::new(
            "F induces an isomorphism on HH in every computed degree",
            "F is invertible on HH",
            if pd.is_iso() { Ok(()) } else { Err(pd.witnesses.clone()) },
        ),
        Check::new(
            "B∘F = Z^F on HH",
            "F^{-1}∘B∘F = F^{-1}∘Z^F",
            if pd.transfer_equals_delta { Ok(()) } else { Err(pd.witnesses.clone()) },
        ),
    ];
    let from_b = hh_bv_table(&p, &labels, &p.delta_from_transfer()?, k_max)?;
    let from_z = hh_bv_table(&p, &labels, &p.delta_from_z()?, k_max)?;
    let diff = from_b.diff(&from_z);
    checks.push(Check::new(
        "tables from F^{-1}∘B∘F and F^{-1}∘Z^F agree",
        "both Δ operators agree",
        if diff.is_empty() { Ok(()) } else { Err(diff) },
    ));
    Ok((from_b, checks))
}

pub fn cmd_bv_table(cfg: &RunConfig) -> Result<Report> {
    let name = cfg.hip.as_deref().unwrap_or("sphere-tilde");
    let k = cfg.k_max;
    let mut r = Report::new(cfg);
    let (table, expected, text) = match name {
        "string-topology" => (string_topology_model(k), string_topology_model(k), STRING_EXPECTED),
        "sphere-strict" | "sphere-tilde" => {
            let (t, checks) = sphere_table(name, k, cfg.bound)?;
            r.checks.extend(checks);
            if name == "sphere-strict" {
                (t, strict_reference_table(k), STRICT_EXPECTED)
            } else {
                (t, homotopy_reference_table(k), TILDE_EXPECTED)
            }
        }
        other => bail!("bv-table supports sphere-strict, sphere-tilde and string-topology, not {other}"),
    };
    table_checks(&mut r, &table, &expected, text);
    r.section(format!("{name} table, k <= {k}"), table_lines(&table));
    Ok(r)
}

fn survivors_text(t: &BvTable, found: &[&bv::Candidate]) -> String {
    let list: Vec<String> = found
        .iter()
        .map(|c| format!("X_1 ↦ {}, Y_0 ↦ {}", t.show_elem(&c.x1), t.show_elem(&c.y0)))
        .collect();
    if list.is_empty() {
        "no survivors".into()
    } else {
        list.join("; ")
    }
}

pub fn cmd_compare_bv(cfg: &RunConfig) -> Result<Report> {
    let k = cfg.k_max;
    let mut r = Report::new(cfg);
    let (strict, mut checks) = sphere_table("sphere-strict", k, cfg.bound)?;
    let (tilde, more) = sphere_table("sphere-tilde", k, cfg.bound)?;
    checks.extend(more);
    r.checks.extend(checks);
    let st = string_topology_model(k);

    let (cands, dims) = bv_iso_search(&strict, &st);
    r.checks.push(Check::ensure(
        "candidate set is exhaustive",
        "degree 1 has dimension 2 and degree -2 has dimension 1, so 3 candidates",
        dims == (2, 1) && cands.len() == (1 << dims.0) - 1,
        || format!("dimensions {dims:?}, {} candidates", cands.len()),
    ));
    let found: Vec<_> = cands.iter().filter(|c| c.check.passes()).collect();
    r.checks.push(Check::ensure(
        "no BV isomorphism from the strict table to the string topology table",
        "zero survivors",
        found.is_empty(),
        || survivors_text(&st, &found),
    ));
    let mut lines = vec![format!("strict → string topology: {}", survivors_text(&st, &found))];

    let (cands, _) = bv_iso_search(&tilde, &st);
    let found: Vec<_> = cands.iter().filter(|c| c.check.passes()).collect();
    let theta = theta_map(k);
    r.checks.push(Check::ensure(
        "the only BV isomorphism from the homotopy table to the string topology table is Θ",
        "exactly one survivor, Θ(φ_k) = α_k + kβ_{k+2}, Θ(ψ_k) = β_k",
        found.len() == 1 && found[0].map.images.iter().all(|(g, e)| *e == Entry::OutOfRange || theta.images[g] == *e),
        || survivors_text(&st, &found),
    ));
    lines.push(format!("homotopy → string topology: {}", survivors_text(&st, &found)));

    let th = check_theta_iso(&tilde, &st);
    r.checks.push(Check::new("Θ is multiplicative", "Θ(ab) = Θ(a)Θ(b)", th.multiplicative.map_err(|w| vec![w])));
    r.checks.push(Check::new("Θ is bijective in each degree", "Θ bijective", th.bijective.map_err(|w| vec![w])));
    r.checks.push(Check::new("Δ_ST∘Θ = Θ∘Δ̃", "Θ intertwines the operators", th.intertwines.map_err(|w| vec![w])));

    let (cands, _) = bv_iso_search(&st, &st);
    let found: Vec<_> = cands.iter().filter(|c| c.check.passes()).collect();
    r.checks.push(Check::ensure(
        "self-comparison finds the identity",
        "the identity is the only survivor",
        found.len() == 1 && found[0].x1 == bv::elem(&[bv::x(1)]),
        || survivors_text(&st, &found),
    ));
    let product_diff: Vec<String> = strict
        .product
        .iter()
        .filter(|(k, v)| tilde.product.get(k) != Some(v))
        .map(|((a, b), _)| format!("{}·{}", strict.show_gen(*a), strict.show_gen(*b)))
        .collect();
    r.checks.push(Check::new(
        "strict and homotopy tables share the cup product",
        "identical product tables",
        if product_diff.is_empty() { Ok(()) } else { Err(product_diff) },
    ));
    let mut bracket_diff = Vec::new();
    for a in BvTable::gens(k) {
        for b in BvTable::gens(k) {
            if a.index + b.index + 3 <= k && strict.derived_bracket(a, b) != tilde.derived_bracket(a, b) {
                bracket_diff.push(format!("[{}, {}]", strict.show_gen(a), strict.show_gen(b)));
            }
        }
    }
    r.checks.push(Check::new(
        format!("brackets derived from both operators agree for index sums <= {}", k - 3),
        "identical Gerstenhaber brackets",
        if bracket_diff.is_empty() { Ok(()) } else { Err(bracket_diff) },
    ));
    r.section("isomorphism search", lines);
    Ok(r)
}

/// Evaluations of B(F(φ)) expected for φ(1) = e.
const BF_EXPECTED: &[(&[&str], &str)] = &[(&["b", "c"], "c*"), (&["c", "b"], "c*"), (&["c", "c"], "b*")];

pub fn cmd_counterexample(cfg: &RunConfig) -> Result<Report> {
    let c = catalog_hip("counterexample")?;
    let bound = cfg.bound.unwrap_or(6).max(3);
    let f = c.expand(bound);
    let mut r = Report::new(cfg);
    r.checks.push(Check::new("DF = 0", "DF = 0", c.space().is_homotopy_inner_product(&f).map_err(violation)));

    let range = cfg.degree_min.unwrap_or(-2)..=cfg.degree_max.unwrap_or(3);
    if !range.contains(&0) {
        bail!("the degree range must contain 0");
    }
    let p = BvPipeline::new(c.base.clone(), &f, bound, range)?;
    let pd = p.pd_report();
    r.checks.push(Check::new(
        "condition (1): F is invertible on HH",
        "F induces an isomorphism",
        if pd.is_iso() { Ok(()) } else { Err(pd.witnesses.clone()) },
    ));

    let phi = HochschildCochain::single(0, vec![], p.cx_a.module.vector("e")?);
    let z = z_operator(&c.base, &f, &phi);
    r.checks.push(Check::ensure("Z^F(φ) = 0", "Z^F(φ) = 0", z.is_zero(), || p.cx_d.show(&z)));

    let bf = p.cx_d.connes_b(&ch_of_hip(&f, &phi))?;
    let expected = expected_bf(&c.base, &p.cx_d)?;
    r.checks.push(Check::ensure(
        "B(F(φ)) has exactly the three listed evaluations",
        "(c,b)(c) = (b,c)(c) = (c,c)(b) = 1 and nothing else",
        bf.comps == expected.comps,
        || p.cx_d.show(&bf),
    ));

    let cert = nonexactness_certificate(&p.d_lo, &p.cx_d, &bf)?;
    r.checks.push(Check::ensure(
        "B(F(φ)) is not exact",
        "nonzero class; no cochain of degree 4 and arity <= 1 exists",
        !cert.coords.is_zero() && cert.primitive_space_dim == Some(0),
        || format!("coordinates {:?}, primitive space dimension {:?}", cert.coords.to_bits(), cert.primitive_space_dim),
    ));

    let phi_coords = p.a_hi.coords(&p.cx_a, &phi)?;
    let bf_class = p.f_hi.then(&p.b)?.apply(0, &phi_coords)?;
    let z_class = p.z.apply(0, &phi_coords)?;
    let fails_at_phi = bf_class != z_class;
    r.checks.push(Check::ensure(
        "condition (2) fails, witnessed by [φ]",
        "B∘F(φ) ≠ 0 = Z^F(φ) in HH",
        fails_at_phi && !pd.transfer_equals_delta,
        || "B∘F and Z^F agree on [φ]".into(),
    ));
    let mut lines = vec![format!("B(F(φ)) = {}", p.cx_d.show(&bf))];
    lines.push(format!("class of B(F(φ)): {:?}, class of Z^F(φ): {:?}", bf_class.to_bits(), z_class.to_bits()));
    lines.extend(pd.witnesses.iter().map(|w| format!("mismatch: {w}")));
    r.section("counterexample", lines);
    Ok(r)
}

fn expected_bf(base: &Arc<NormalizedAlgebra>, cx: &CochainComplex) -> Result<HochschildCochain> {
    let mut out = HochschildCochain::zero(3, None);
    for (word, value) in BF_EXPECTED {
        let w = word.iter().map(|n| base.letter(n).ok_or_else(|| anyhow!("no letter {n}"))).collect::<Result<Vec<_>>>()?;
        out.add_component(w, &cx.module.vector(value)?);
    }
    Ok(out)
}

pub fn cmd_report_all(cfg: &RunConfig) -> Result<Report> {
    let mut r = Report::new(cfg);
    let sub = |command: &str, algebra: Option<&str>, hip: Option<&str>| RunConfig {
        command: command.to_string(),
        algebra: algebra.map(String::from),
        hip: hip.map(String::from),
        k_max: cfg.k_max,
        format: cfg.format,
        ..Default::default()
    };
    for a in dga::BUILTIN_ALGEBRAS {
        r.absorb(&format!("check-dga {a}"), cmd_check_dga(&sub("check-dga", Some(a), None))?);
    }
    for h in hip::CATALOG {
        r.absorb(&format!("verify-hip {h}"), cmd_verify_hip(&sub("verify-hip", None, Some(h)))?);
    }
    r.absorb("local-identities", cmd_local_identities(&sub("local-identities", None, None))?);
    r.absorb("hh-basis", cmd_hh_basis(&sub("hh-basis", None, None))?);
    for h in ["sphere-strict", "sphere-tilde", "string-topology"] {
        r.absorb(&format!("bv-table {h}"), cmd_bv_table(&sub("bv-table", None, Some(h)))?);
    }
    r.absorb("compare-bv", cmd_compare_bv(&sub("compare-bv", None, None))?);
    r.absorb("counterexample", cmd_counterexample(&sub("counterexample", None, None))?);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_checks_carry_witnesses() {
        let c = Check::new("x", "y", Err(vec![]));
        assert!(!c.pass);
        assert_eq!(c.witnesses.len(), 1);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new("bv-table").validate().is_ok());
        assert!(RunConfig::new("nope").validate().is_err());
        assert!(RunConfig { bound: Some(0), ..RunConfig::new("hh-basis") }.validate().is_err());
    }

    #[test]
    fn unknown_algebra_lists_builtins() {
        let e = resolve_algebra("torus").unwrap_err().to_string();
        assert!(e.contains("sphere-cohomology"));
    }
}
