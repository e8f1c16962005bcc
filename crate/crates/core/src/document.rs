//! Input documents (TOML) and the text/machine renderings of reports.
//!
//! ```toml
//! [field]
//! kind = "padic"          # or "laurent"
//! p = 5
//! f = 1                   # laurent only
//! residue_modulus = [2, 2, 1]   # optional, low degree first
//! ext_d = "-601/576"      # optional split quadratic extension s^2 = ext_d
//! ext_root = 2            # residue of the chosen square root
//! precision = 20
//!
//! [matrices]
//! A = [["0", "-1"], ["1", "0"]]
//! B = [["0", "-1/5"], ["5", "-1"]]
//!
//! [options]
//! radius = 4
//! cap = 61
//! ```
//!
//! The machine rendering is one `key=value` per line followed by a single `json=` line
//! holding the whole report; [`Report::parse_machine`] reads the latter back.

use serde::{Deserialize, Serialize};

use crate::btree::{self, Displacement, FixShape, Intersection, TreeVertex};
use crate::decide::{Case, Isomorphism, Step, Verdict};
use crate::error::{Error, Result};
use crate::examples::Example;
use crate::exec::Exec;
use crate::localfield::{Field, FieldConfig, FieldKind, DEFAULT_PRECISION};
use crate::psl2::{self, Mat2, Order, Tag};

pub type MatrixText = [[String; 2]; 2];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDocument {
    pub field: FieldConfig,
    pub a: MatrixText,
    pub b: Option<MatrixText>,
    pub radius: Option<u32>,
    pub cap: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    field: RawField,
    matrices: RawMatrices,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    options: Option<RawOptions>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    kind: FieldKind,
    p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residue_modulus: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ext_d: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ext_root: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrices {
    #[serde(rename = "A")]
    a: MatrixText,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<MatrixText>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap: Option<usize>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map(|i| before.len() - i).unwrap_or(before.len() + 1);
    (line, col)
}

/// Matrices and field of a loaded document.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub field: Field,
    pub a: Mat2,
    pub b: Option<Mat2>,
}

impl Loaded {
    pub fn pair(&self) -> Result<(&Mat2, &Mat2)> {
        let b = self.b.as_ref().ok_or_else(|| Error::Document("matrix B is required".into()))?;
        Ok((&self.a, b))
    }
}

fn parse_matrix(k: &Field, name: &str, m: &MatrixText) -> Result<Mat2> {
    let rows = [[m[0][0].as_str(), m[0][1].as_str()], [m[1][0].as_str(), m[1][1].as_str()]];
    Mat2::parse(k, rows).map_err(|e| match e {
        Error::Parse { column, message } => {
            let at = (0..4)
                .find(|&i| k.parse_scalar(rows[i / 2][i % 2]).is_err())
                .map(|i| format!("{name}[{}][{}]", i / 2, i % 2))
                .unwrap_or_else(|| name.to_string());
            Error::Parse { column, message: format!("{at}: {message}") }
        }
        Error::DeterminantNotOne => Error::Document(format!("matrix {name}: determinant is not one")),
        other => other,
    })
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDoc = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            Error::Parse { column, message: format!("line {line}: {}", e.message()) }
        })?;
        let rf = raw.field;
        let mut cfg = match rf.kind {
            FieldKind::Padic => {
                if rf.f.is_some_and(|f| f != 1) {
                    return Err(Error::InvalidField("a p-adic field has f = 1".into()));
                }
                FieldConfig::padic(rf.p)
            }
            FieldKind::Laurent => FieldConfig::laurent(rf.p, rf.f.unwrap_or(1)),
        };
        cfg.residue_modulus = rf.residue_modulus;
        cfg.hensel_precision = rf.precision.unwrap_or(DEFAULT_PRECISION);
        match (rf.ext_d, rf.ext_root) {
            (None, None) => {}
            (Some(d), Some(r)) => {
                let base = Field::new(cfg.clone())?;
                let d = base.parse_scalar(&d).map_err(|e| match e {
                    Error::Parse { column, message } => {
                        Error::Parse { column, message: format!("ext_d: {message}") }
                    }
                    other => other,
                })?;
                cfg = cfg.with_ext(d.x, r);
            }
            _ => return Err(Error::Document("ext_d and ext_root must be given together".into())),
        }
        let options = raw.options.unwrap_or_default();
        Ok(InputDocument {
            field: cfg,
            a: raw.matrices.a,
            b: raw.matrices.b,
            radius: options.radius,
            cap: options.cap,
        })
    }

    pub fn to_toml(&self) -> String {
        let cfg = &self.field;
        let base = Field::new(FieldConfig { ext: None, ..cfg.clone() }).ok();
        let ext_d = match (&cfg.ext, &base) {
            (Some(e), Some(k)) => Some(k.format_base(&e.d)),
            _ => None,
        };
        let raw = RawDoc {
            field: RawField {
                kind: cfg.kind,
                p: cfg.p,
                f: (cfg.kind == FieldKind::Laurent).then_some(cfg.f),
                residue_modulus: cfg.residue_modulus.clone(),
                ext_d,
                ext_root: cfg.ext.as_ref().map(|e| e.chosen_root_residue),
                precision: (cfg.hensel_precision != DEFAULT_PRECISION).then_some(cfg.hensel_precision),
            },
            matrices: RawMatrices { a: self.a.clone(), b: self.b.clone() },
            options: (self.radius.is_some() || self.cap.is_some())
                .then_some(RawOptions { radius: self.radius, cap: self.cap }),
        };
        toml::to_string(&raw).expect("document serialises")
    }

    /// Builds the field and parses both matrices, checking `det = 1`.
    pub fn load(&self) -> Result<Loaded> {
        let field = Field::new(self.field.clone())?;
        let a = parse_matrix(&field, "A", &self.a)?;
        let b = self.b.as_ref().map(|b| parse_matrix(&field, "B", b)).transpose()?;
        Ok(Loaded { field, a, b })
    }

    pub fn from_example(ex: &Example) -> Self {
        InputDocument {
            field: ex.field.config().clone(),
            a: ex.a.to_strings(&ex.field),
            b: Some(ex.b.to_strings(&ex.field)),
            radius: None,
            cap: None,
        }
    }
}

/// Flattened verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub verdict: String,
    pub field: String,
    pub discrete: bool,
    pub case: Option<Case>,
    pub isomorphism: Option<String>,
    pub final_step: u8,
    pub reduced_x: MatrixText,
    pub reduced_y: MatrixText,
    pub step_trace: Vec<Step>,
    pub caveats: Vec<String>,
}

fn step_line(s: &Step) -> String {
    let mut line = s.decision.clone();
    for (k, v) in &s.scalars {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

impl Report {
    pub fn from_verdict(k: &Field, v: &Verdict) -> Self {
        Report {
            verdict: v.verdict_string(),
            field: k.config().label(),
            discrete: v.discrete,
            case: v.case,
            isomorphism: v.isomorphism.map(|i| i.to_string()),
            final_step: v.final_step(),
            reduced_x: v.reduced_pair.0.to_strings(k),
            reduced_y: v.reduced_pair.1.to_strings(k),
            step_trace: v.step_trace.clone(),
            caveats: v.caveats.clone(),
        }
    }

    /// Rebuilds the verdict; matrices are re-parsed in `k`.
    pub fn to_verdict(&self, k: &Field) -> Result<Verdict> {
        let m = |t: &MatrixText| parse_matrix(k, "reduced", t);
        Ok(Verdict {
            discrete: self.discrete,
            case: self.case,
            isomorphism: self.isomorphism.as_deref().map(str::parse::<Isomorphism>).transpose()?,
            reduced_pair: (m(&self.reduced_x)?, m(&self.reduced_y)?),
            step_trace: self.step_trace.clone(),
            caveats: self.caveats.clone(),
        })
    }

    /// The verdict string on the first line, then labelled details.
    pub fn render_text(&self) -> String {
        let fm = |m: &MatrixText| format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1]);
        let mut out = format!("{}\n", self.verdict);
        out += &format!("field: {}\n", self.field);
        if let Some(iso) = &self.isomorphism {
            out += &format!("isomorphism: {iso}\n");
        }
        out += &format!("decided at step {}\n", self.final_step);
        out += &format!("reduced X: {}\n", fm(&self.reduced_x));
        out += &format!("reduced Y: {}\n", fm(&self.reduced_y));
        for s in &self.step_trace {
            out += &format!("  ({:>2}) {}\n", s.step, step_line(s));
        }
        for c in &self.caveats {
            out += &format!("caveat: {c}\n");
        }
        out
    }

    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        out += &format!("verdict={}\n", self.verdict);
        out += &format!("field={}\n", self.field);
        out += &format!("discrete={}\n", self.discrete);
        out += &format!("case={}\n", self.case.map(|c| c.to_string()).unwrap_or_default());
        out += &format!("isomorphism={}\n", self.isomorphism.clone().unwrap_or_default());
        out += &format!("final_step={}\n", self.final_step);
        for (i, s) in self.step_trace.iter().enumerate() {
            out += &format!("trace.{i}.step{}={}\n", s.step, step_line(s));
        }
        for c in &self.caveats {
            out += &format!("caveat={c}\n");
        }
        out += &format!("json={}\n", serde_json::to_string(self).expect("report serialises"));
        out
    }

    pub fn parse_machine(text: &str) -> Result<Self> {
        let json = text
            .lines()
            .find_map(|l| l.strip_prefix("json="))
            .ok_or_else(|| Error::Document("missing json= line".into()))?;
        let report: Report =
            serde_json::from_str(json).map_err(|e| Error::Document(format!("report json: {e}")))?;
        let verdict = text.lines().find_map(|l| l.strip_prefix("verdict="));
        if verdict != Some(report.verdict.as_str()) {
            return Err(Error::Document("verdict line disagrees with json block".into()));
        }
        Ok(report)
    }
}

/// Per-element data for `analyze`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementReport {
    pub name: String,
    pub matrix: String,
    pub trace: String,
    /// `None` when the trace is zero.
    pub trace_valuation: Option<i64>,
    pub class: Tag,
    pub length: u64,
    pub order: String,
}

pub fn analyze(loaded: &Loaded) -> Vec<ElementReport> {
    let k = &loaded.field;
    let mut items = vec![("A".to_string(), loaded.a.clone())];
    if let Some(b) = &loaded.b {
        let a = &loaded.a;
        items.push(("B".into(), b.clone()));
        items.push(("AB".into(), a.mul(k, b)));
        items.push(("A^-1B".into(), a.inv(k).mul(k, b)));
        items.push(("[A,B]".into(), a.commutator(k, b)));
    }
    items
        .into_iter()
        .map(|(name, m)| {
            let tr = m.trace(k);
            let class = psl2::classify(k, &m);
            ElementReport {
                name,
                matrix: m.format(k),
                trace: k.format_scalar(&tr),
                trace_valuation: k.valuation(&tr),
                class: class.tag,
                length: class.length,
                order: psl2::element_order(k, &m).to_string(),
            }
        })
        .collect()
}

pub fn render_analyze_text(items: &[ElementReport]) -> String {
    let mut out = String::new();
    for e in items {
        let v = e.trace_valuation.map(|v| v.to_string()).unwrap_or_else(|| "inf".into());
        out += &format!(
            "{}: {} trace={} v(trace)={} {} length={} order={}\n",
            e.name, e.matrix, e.trace, v, e.class, e.length, e.order
        );
    }
    out
}

pub fn render_analyze_machine(items: &[ElementReport]) -> String {
    let mut out = String::new();
    for e in items {
        out += &format!("{}.length={}\n{}.class={}\n{}.order={}\n", e.name, e.length, e.name, e.class, e.name, e.order);
    }
    out += &format!("json={}\n", serde_json::to_string(items).expect("report serialises"));
    out
}

/// Tree-probe data for one element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleElement {
    pub name: String,
    pub length: u64,
    pub displacement: Displacement,
    /// Fixed-vertex counts at distance `0..=radius` from a fixed vertex (finite order only).
    pub fixed_counts: Option<Vec<usize>>,
    pub fix_shape: Option<FixShape>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub radius: u32,
    pub elements: Vec<OracleElement>,
    /// `Fix(A) ∩ Ax(B)` when `A` has finite order and `B` is hyperbolic.
    pub intersection: Option<Intersection>,
}

pub fn oracle(loaded: &Loaded, radius: u32, exec: Exec) -> OracleReport {
    let k = &loaded.field;
    let mut list = vec![("A", &loaded.a)];
    if let Some(b) = &loaded.b {
        list.push(("B", b));
    }
    let elements = list
        .iter()
        .map(|(name, m)| {
            let finite = psl2::classify(k, m).tag == Tag::Elliptic
                && matches!(psl2::element_order(k, m), Order::Finite(n) if n > 1);
            let fixed_counts = finite
                .then(|| {
                    (0..=radius as usize)
                        .map(|d| btree::fixed_vertices_at_distance(k, m, d).map(|c| if d == 0 { 1 } else { c }))
                        .collect::<Result<Vec<_>>>()
                        .ok()
                })
                .flatten();
            OracleElement {
                name: name.to_string(),
                length: psl2::translation_length(k, m),
                displacement: btree::displacement_oracle(k, m, radius, exec),
                fixed_counts,
                fix_shape: if finite { btree::fix_shape(k, m).ok() } else { None },
            }
        })
        .collect();
    let intersection = loaded
        .b
        .as_ref()
        .and_then(|b| btree::fix_ax_intersection(k, &loaded.a, b, radius, exec).ok());
    OracleReport { radius, elements, intersection }
}

pub fn render_oracle_text(r: &OracleReport) -> String {
    let mut out = format!("radius: {}\n", r.radius);
    for e in &r.elements {
        let d = &e.displacement;
        out += &format!(
            "{}: length={} displacement={} at radius {} ({})\n",
            e.name,
            e.length,
            d.min,
            d.radius,
            if d.stable { "stable" } else { "lower radius bound only" }
        );
        if let Some(c) = &e.fixed_counts {
            let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            out += &format!("{}: fixed vertices by distance = {}\n", e.name, c.join(" "));
        }
        if let Some(s) = e.fix_shape {
            out += &format!("{}: fix shape = {s}\n", e.name);
        }
    }
    if let Some(i) = r.intersection {
        out += &format!("Fix(A) & Ax(B): {i}\n");
    }
    out
}

pub fn render_oracle_machine(r: &OracleReport) -> String {
    let mut out = format!("radius={}\n", r.radius);
    for e in &r.elements {
        out += &format!("{}.displacement={}\n{}.stable={}\n", e.name, e.displacement.min, e.name, e.displacement.stable);
    }
    if let Some(i) = r.intersection {
        out += &format!("intersection={i}\n");
    }
    out += &format!("json={}\n", serde_json::to_string(r).expect("report serialises"));
    out
}

/// DOT dump around the probe centre of the pair (or a fixed vertex of `A`).
pub fn oracle_dot(loaded: &Loaded, radius: u32, exec: Exec) -> String {
    let k = &loaded.field;
    let center = match &loaded.b {
        Some(b) => btree::probe_center(k, &loaded.a, b),
        None => btree::descend(k, &loaded.a, &TreeVertex::base()),
    };
    btree::dot_dump(k, Some(&loaded.a), loaded.b.as_ref(), &center, radius, exec)
}
