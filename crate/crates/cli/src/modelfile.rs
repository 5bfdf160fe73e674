//! Line-based model files.
//!
//! ```text
//! [model]
//! name = regdirac
//! m = -1
//! eps_reg = 0.1
//!
//! [boundary]
//! family = a
//! a = 2
//!
//! [numerics]
//! k_window = 20
//!
//! [task]
//! energy = 0
//! ```
//!
//! Matrices are written row by row, rows separated by `;`, entries as complex literals
//! such as `1`, `-0.5i` or `1+2i`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bec_core::extension::{BoundaryCondition, BoundaryTriple, Klm, TripleKind};
use bec_core::models::{builtin, Geometry, ModelDescriptor, ModelKind, Params};
use bec_core::numerics::CMatrix;
use bec_core::symbol::{GapWindow, Symbol};
use bec_core::{BecError, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Builtin { name: String, params: Params },
    /// Symbol given term by term; `terms[(a, b)]` multiplies `k1^a k2^b`.
    Inline { n: usize, terms: BTreeMap<(u32, u32), CMatrix> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleSpec {
    pub kind: TripleKind,
    pub order: usize,
    pub g1: Vec<CMatrix>,
    pub g2: Vec<CMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Family { name: String, params: Params },
    Klm(Klm),
    /// Polynomial coefficients of `A(k)` and `B(k)`, lowest degree first.
    Ab { a: Vec<CMatrix>, b: Vec<CMatrix> },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumericsSpec {
    pub k_window: Option<f64>,
    pub k_resolution: Option<usize>,
    pub lambda_resolution: Option<usize>,
    pub far: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaskSpec {
    pub energy: Option<f64>,
    pub gap: Option<(f64, f64)>,
    pub geometry: Option<Geometry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: ModelSpec,
    pub triple: Option<TripleSpec>,
    pub boundary: Option<BoundarySpec>,
    pub reference: Option<BoundarySpec>,
    pub numerics: NumericsSpec,
    pub task: TaskSpec,
}

fn input<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(BecError::Input(format!("line {line}: {msg}")))
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some(body) = s.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (body[..i].parse::<f64>().ok()?, &body[i..]),
            None => (0.0, body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().ok()?,
        };
        if !(re.is_finite() && im.is_finite()) {
            return None;
        }
        Some(Complex64::new(re, im))
    } else {
        let re = s.parse::<f64>().ok()?;
        re.is_finite().then(|| Complex64::new(re, 0.0))
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn parse_matrix(s: &str) -> Option<CMatrix> {
    let rows: Vec<Vec<Complex64>> = s
        .split(';')
        .map(|r| r.split_whitespace().map(parse_complex).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    CMatrix::from_rows(&rows).ok()
}

pub fn format_matrix(m: &CMatrix) -> String {
    (0..m.rows())
        .map(|i| m.row(i).into_iter().map(format_complex).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn parse_real(line: usize, key: &str, v: &str) -> Result<f64> {
    match v.trim().parse::<f64>() {
        Ok(x) if !x.is_nan() => Ok(x),
        _ => input(line, format!("`{key}` expects a real number, got `{v}`")),
    }
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize> {
    v.trim().parse::<usize>().or_else(|_| input(line, format!("`{key}` expects a nonnegative integer, got `{v}`")))
}

fn matrix_value(line: usize, key: &str, v: &str) -> Result<CMatrix> {
    parse_matrix(v).map_or_else(|| input(line, format!("`{key}` is not a valid matrix: `{v}`")), Ok)
}

/// `A0`, `A1`, … or `G1_0`, … → index.
fn indexed(key: &str, prefix: &str) -> Option<usize> {
    key.strip_prefix(prefix)?.parse().ok()
}

fn collect_poly(entries: BTreeMap<usize, CMatrix>, name: &str) -> Result<Vec<CMatrix>> {
    let n = entries.len();
    if entries.keys().copied().ne(0..n) {
        return Err(BecError::Input(format!("coefficients of {name} must be numbered 0, 1, ... without gaps")));
    }
    Ok(entries.into_values().collect())
}

#[derive(Default)]
struct Section {
    line: usize,
    entries: Vec<(usize, String, String)>,
}

fn parse_boundary(sec: &Section, name: &str) -> Result<BoundarySpec> {
    let has_family = sec.entries.iter().any(|(_, k, _)| k == "family");
    let mut family = None;
    let mut params = Params::new();
    let (mut k, mut l, mut m) = (None, None, None);
    let (mut a, mut b) = (BTreeMap::new(), BTreeMap::new());
    for (line, key, v) in &sec.entries {
        let line = *line;
        if has_family && key != "family" {
            params.insert(key.clone(), parse_real(line, key, v)?);
            continue;
        }
        match key.as_str() {
            "family" => family = Some(v.trim().to_string()),
            "K" => k = Some(matrix_value(line, key, v)?),
            "L" => l = Some(matrix_value(line, key, v)?),
            "M" => m = Some(matrix_value(line, key, v)?),
            _ => {
                if let Some(i) = indexed(key, "A") {
                    a.insert(i, matrix_value(line, key, v)?);
                } else if let Some(i) = indexed(key, "B") {
                    b.insert(i, matrix_value(line, key, v)?);
                } else {
                    return input(line, format!("unknown key `{key}` in [{name}]"));
                }
            }
        }
    }
    let explicit_klm = k.is_some() || l.is_some() || m.is_some();
    let explicit_ab = !a.is_empty() || !b.is_empty();
    match (family, explicit_klm, explicit_ab) {
        (Some(name), false, false) => Ok(BoundarySpec::Family { name, params }),
        (None, true, false) if params.is_empty() => {
            let d = k.as_ref().or(l.as_ref()).or(m.as_ref()).map(|x| x.rows()).unwrap_or(1);
            let z = || CMatrix::zeros(d, d);
            Ok(BoundarySpec::Klm(Klm { k: k.unwrap_or_else(z), l: l.unwrap_or_else(z), m: m.unwrap_or_else(z) }))
        }
        (None, false, true) if params.is_empty() => {
            Ok(BoundarySpec::Ab { a: collect_poly(a, "A")?, b: collect_poly(b, "B")? })
        }
        (None, false, false) => input(sec.line, format!("[{name}] needs `family`, K/L/M or A/B entries")),
        _ => input(sec.line, format!("[{name}] mixes a family, K/L/M and A/B forms")),
    }
}

impl ModelFile {
    pub fn builtin(name: &str, params: Params) -> Self {
        ModelFile {
            model: ModelSpec::Builtin { name: name.to_string(), params },
            triple: None,
            boundary: None,
            reference: None,
            numerics: NumericsSpec::default(),
            task: TaskSpec::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim().to_string();
                if !["model", "symbol", "triple", "boundary", "reference", "numerics", "task"].contains(&name.as_str()) {
                    return input(line, format!("unknown section [{name}]"));
                }
                if sections.contains_key(&name) {
                    return input(line, format!("section [{name}] appears twice"));
                }
                sections.insert(name.clone(), Section { line, entries: Vec::new() });
                current = Some(name);
                continue;
            }
            let Some(sec) = current.as_ref() else {
                return input(line, "entry outside of any section");
            };
            let Some((key, value)) = content.split_once('=') else {
                return input(line, format!("expected `key = value`, got `{content}`"));
            };
            let key = key.trim().to_string();
            let entries = &mut sections.get_mut(sec).unwrap().entries;
            if entries.iter().any(|(_, k, _)| *k == key) {
                return input(line, format!("duplicate key `{key}` in [{sec}]"));
            }
            entries.push((line, key, value.trim().to_string()));
        }

        let model_sec = sections.remove("model").ok_or_else(|| BecError::Input("missing [model] section".into()))?;
        let mut name = None;
        let mut params = Params::new();
        for (line, key, v) in &model_sec.entries {
            if key == "name" {
                name = Some(v.clone());
            } else {
                params.insert(key.clone(), parse_real(*line, key, v)?);
            }
        }
        let name = name.ok_or_else(|| BecError::Input(format!("line {}: [model] needs `name`", model_sec.line)))?;
        let symbol_sec = sections.remove("symbol");
        let model = if name == "inline" {
            if !params.is_empty() {
                return input(model_sec.line, "an inline model takes its data from [symbol]");
            }
            let sec = symbol_sec.ok_or_else(|| BecError::Input("inline model needs a [symbol] section".into()))?;
            let mut n = None;
            let mut terms = BTreeMap::new();
            for (line, key, v) in &sec.entries {
                if key == "n" {
                    n = Some(parse_count(*line, key, v)?);
                } else if let Some(rest) = key.strip_prefix("term") {
                    let deg: Vec<u32> = rest.split_whitespace().filter_map(|x| x.parse().ok()).collect();
                    if deg.len() != 2 || rest.split_whitespace().count() != 2 {
                        return input(*line, format!("term key must be `term a b`, got `{key}`"));
                    }
                    terms.insert((deg[0], deg[1]), matrix_value(*line, key, v)?);
                } else {
                    return input(*line, format!("unknown key `{key}` in [symbol]"));
                }
            }
            let n = n.ok_or_else(|| BecError::Input("[symbol] needs `n`".into()))?;
            ModelSpec::Inline { n, terms }
        } else {
            if let Some(sec) = symbol_sec {
                return input(sec.line, "[symbol] is only allowed with `name = inline`");
            }
            ModelSpec::Builtin { name, params }
        };

        let triple = match sections.remove("triple") {
            None => None,
            Some(sec) => {
                let mut kind = None;
                let mut order = None;
                let (mut g1, mut g2) = (BTreeMap::new(), BTreeMap::new());
                for (line, key, v) in &sec.entries {
                    let line = *line;
                    match key.as_str() {
                        "kind" => {
                            kind = Some(match v.as_str() {
                                "halfline" => TripleKind::Halfline,
                                "interface" => TripleKind::Interface,
                                _ => return input(line, format!("triple kind must be halfline or interface, got `{v}`")),
                            })
                        }
                        "order" => order = Some(parse_count(line, key, v)?),
                        _ => {
                            if let Some(i) = indexed(key, "G1_") {
                                g1.insert(i, matrix_value(line, key, v)?);
                            } else if let Some(i) = indexed(key, "G2_") {
                                g2.insert(i, matrix_value(line, key, v)?);
                            } else {
                                return input(line, format!("unknown key `{key}` in [triple]"));
                            }
                        }
                    }
                }
                Some(TripleSpec {
                    kind: kind.ok_or_else(|| BecError::Input("[triple] needs `kind`".into()))?,
                    order: order.ok_or_else(|| BecError::Input("[triple] needs `order`".into()))?,
                    g1: collect_poly(g1, "G1")?,
                    g2: collect_poly(g2, "G2")?,
                })
            }
        };

        let boundary = sections.remove("boundary").map(|s| parse_boundary(&s, "boundary")).transpose()?;
        let reference = sections.remove("reference").map(|s| parse_boundary(&s, "reference")).transpose()?;

        let mut numerics = NumericsSpec::default();
        if let Some(sec) = sections.remove("numerics") {
            for (line, key, v) in &sec.entries {
                let line = *line;
                match key.as_str() {
                    "k_window" => numerics.k_window = Some(parse_real(line, key, v)?),
                    "k_resolution" => numerics.k_resolution = Some(parse_count(line, key, v)?),
                    "lambda_resolution" => numerics.lambda_resolution = Some(parse_count(line, key, v)?),
                    "far" => numerics.far = Some(parse_real(line, key, v)?),
                    "tol" => numerics.tol = Some(parse_real(line, key, v)?),
                    _ => return input(line, format!("unknown key `{key}` in [numerics]")),
                }
            }
        }
        let mut task = TaskSpec::default();
        if let Some(sec) = sections.remove("task") {
            for (line, key, v) in &sec.entries {
                let line = *line;
                match key.as_str() {
                    "energy" => task.energy = Some(parse_real(line, key, v)?),
                    "gap" => {
                        let xs: Vec<&str> = v.split_whitespace().collect();
                        if xs.len() != 2 {
                            return input(line, "`gap` expects two numbers `lo hi`");
                        }
                        task.gap = Some((parse_real(line, key, xs[0])?, parse_real(line, key, xs[1])?));
                    }
                    "geometry" => {
                        task.geometry = Some(match v.as_str() {
                            "halfline" => Geometry::Halfline,
                            "interface" => Geometry::Interface,
                            _ => return input(line, format!("geometry must be halfline or interface, got `{v}`")),
                        })
                    }
                    _ => return input(line, format!("unknown key `{key}` in [task]")),
                }
            }
        }
        Ok(ModelFile { model, triple, boundary, reference, numerics, task })
    }

    /// Normalized text form; `parse(emit(f)) == f`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("[model]\n");
        match &self.model {
            ModelSpec::Builtin { name, params } => {
                let _ = writeln!(out, "name = {name}");
                for (k, v) in params {
                    let _ = writeln!(out, "{k} = {v}");
                }
            }
            ModelSpec::Inline { n, terms } => {
                out.push_str("name = inline\n\n[symbol]\n");
                let _ = writeln!(out, "n = {n}");
                for ((a, b), m) in terms {
                    let _ = writeln!(out, "term {a} {b} = {}", format_matrix(m));
                }
            }
        }
        if let Some(t) = &self.triple {
            out.push_str("\n[triple]\n");
            let kind = match t.kind {
                TripleKind::Halfline => "halfline",
                TripleKind::Interface => "interface",
            };
            let _ = writeln!(out, "kind = {kind}\norder = {}", t.order);
            for (i, g) in t.g1.iter().enumerate() {
                let _ = writeln!(out, "G1_{i} = {}", format_matrix(g));
            }
            for (i, g) in t.g2.iter().enumerate() {
                let _ = writeln!(out, "G2_{i} = {}", format_matrix(g));
            }
        }
        for (name, spec) in [("boundary", &self.boundary), ("reference", &self.reference)] {
            let Some(spec) = spec else { continue };
            let _ = writeln!(out, "\n[{name}]");
            match spec {
                BoundarySpec::Family { name, params } => {
                    let _ = writeln!(out, "family = {name}");
                    for (k, v) in params {
                        let _ = writeln!(out, "{k} = {v}");
                    }
                }
                BoundarySpec::Klm(klm) => {
                    let _ = writeln!(out, "K = {}", format_matrix(&klm.k));
                    let _ = writeln!(out, "L = {}", format_matrix(&klm.l));
                    let _ = writeln!(out, "M = {}", format_matrix(&klm.m));
                }
                BoundarySpec::Ab { a, b } => {
                    for (i, m) in a.iter().enumerate() {
                        let _ = writeln!(out, "A{i} = {}", format_matrix(m));
                    }
                    for (i, m) in b.iter().enumerate() {
                        let _ = writeln!(out, "B{i} = {}", format_matrix(m));
                    }
                }
            }
        }
        let n = &self.numerics;
        if *n != NumericsSpec::default() {
            out.push_str("\n[numerics]\n");
            if let Some(v) = n.k_window {
                let _ = writeln!(out, "k_window = {v}");
            }
            if let Some(v) = n.k_resolution {
                let _ = writeln!(out, "k_resolution = {v}");
            }
            if let Some(v) = n.lambda_resolution {
                let _ = writeln!(out, "lambda_resolution = {v}");
            }
            if let Some(v) = n.far {
                let _ = writeln!(out, "far = {v}");
            }
            if let Some(v) = n.tol {
                let _ = writeln!(out, "tol = {v}");
            }
        }
        let t = &self.task;
        if *t != TaskSpec::default() {
            out.push_str("\n[task]\n");
            if let Some(v) = t.energy {
                let _ = writeln!(out, "energy = {v}");
            }
            if let Some((lo, hi)) = t.gap {
                let _ = writeln!(out, "gap = {lo} {hi}");
            }
            if let Some(g) = t.geometry {
                let _ = writeln!(out, "geometry = {}", if g == Geometry::Halfline { "halfline" } else { "interface" });
            }
        }
        out
    }

    /// Builds the model, applying an inline symbol, a user triple and a declared gap.
    pub fn descriptor(&self) -> Result<ModelDescriptor> {
        let mut d = match &self.model {
            ModelSpec::Builtin { name, params } => builtin(name, params)?,
            ModelSpec::Inline { n, terms } => {
                let mut s = Symbol::new(*n);
                for (&(a, b), m) in terms {
                    s.add_term(a, b, m.clone())?;
                }
                ModelDescriptor {
                    name: "inline".into(),
                    kind: ModelKind::Custom,
                    gap_scale: s.scale().max(1e-12),
                    symbol: s,
                    halfline: None,
                    interface: None,
                    converter: None,
                    bc_families: Vec::new(),
                    declared_gap: None,
                    fiducial_e: 0.0,
                }
            }
        };
        if let Some(t) = &self.triple {
            let triple = BoundaryTriple::new(t.kind, d.symbol.dim(), t.order, t.g1.clone(), t.g2.clone())?;
            match t.kind {
                TripleKind::Halfline => d.halfline = Some(triple),
                TripleKind::Interface => {
                    return Err(BecError::Input("user-supplied interface triples are not supported".into()))
                }
            }
        }
        if let Some((lo, hi)) = self.task.gap {
            d.declared_gap = Some(GapWindow::declared(lo, hi)?);
        }
        if let Some(e) = self.task.energy {
            d.fiducial_e = e;
        }
        Ok(d)
    }
}

/// Instantiates a boundary specification for a model; returns the condition and its geometry.
pub fn boundary_condition(
    model: &ModelDescriptor,
    spec: &BoundarySpec,
    geometry: Option<Geometry>,
) -> Result<(BoundaryCondition, Geometry)> {
    let default_geometry = || {
        geometry.unwrap_or(if model.halfline.is_some() { Geometry::Halfline } else { Geometry::Interface })
    };
    match spec {
        BoundarySpec::Family { name, params } => {
            let g = model.geometry_of(name)?;
            if geometry.is_some_and(|x| x != g) {
                return Err(BecError::Input(format!("family `{name}` does not match the requested geometry")));
            }
            Ok((model.boundary_condition(name, params)?, g))
        }
        BoundarySpec::Klm(klm) => Ok((model.klm_condition("klm", klm.clone())?, default_geometry())),
        BoundarySpec::Ab { a, b } => Ok((BoundaryCondition::direct("explicit", a.clone(), b.clone())?, default_geometry())),
    }
}
