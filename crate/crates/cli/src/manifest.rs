//! Manifests: a field, an optional tower of extensions, and named modules,
//! subgroups, Ore matrices, points and polynomials.
//!
//! The text form is a list of `[kind name]` sections holding `key = value`
//! lines, where a value is an expression or a bracketed list of values.
//! The JSON form carries the same data with expressions as strings.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use tmodule::ore::{OreMatrix, OrePoly};
use tmodule::subgroups::KernelSubgroup;
use tmodule::tmodule::{self as tm, TModule};
use tmodule::{Field, FieldError, FiniteField, FunctionField, Poly, PolyRing, Tower, TowerElem};

use crate::expr::{self, Algebra, Expr, Parser, Span, SyntaxError, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn at(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            line: span.line,
            column: span.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

impl From<SyntaxError> for Diagnostic {
    fn from(e: SyntaxError) -> Self {
        Diagnostic {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Expr(Expr),
    List(Vec<Value>, Span),
}

impl Value {
    fn span(&self) -> Span {
        match self {
            Value::Expr(e) => e.span,
            Value::List(_, s) => *s,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Expr(e) => write!(f, "{e}"),
            Value::List(items, _) => {
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
        }
    }
}

fn parse_value(p: &mut Parser<'_>) -> Result<Value, SyntaxError> {
    if p.peek() != Some(&Tok::LBracket) {
        return p.expr().map(Value::Expr);
    }
    let span = p.bump().unwrap().1;
    let mut items = Vec::new();
    if p.peek() == Some(&Tok::RBracket) {
        p.bump();
        return Ok(Value::List(items, span));
    }
    loop {
        items.push(parse_value(p)?);
        match p.peek() {
            Some(Tok::Comma) => {
                p.bump();
            }
            Some(Tok::RBracket) => {
                p.bump();
                return Ok(Value::List(items, span));
            }
            _ => return Err(p.unexpected("`,` or `]`")),
        }
    }
}

/// Parses one value; `line`/`column` locate the first character of `text`.
pub fn parse_value_at(text: &str, line: usize, column: usize) -> Result<Value, SyntaxError> {
    let toks = expr::tokenize(text, line, column)?;
    let mut p = Parser::new(
        &toks,
        Span {
            line,
            column: column + text.chars().count(),
        },
    );
    let v = parse_value(&mut p)?;
    if !p.at_end() {
        return Err(p.unexpected("end of value"));
    }
    Ok(v)
}

/// Coefficients of `τ^0, τ^1, ..` for every entry of every row.
pub type OreRows = Vec<Vec<Vec<Expr>>>;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldBlock {
    pub p: u32,
    pub e: u32,
    /// Defining polynomial of `F_q` over `F_p`, in the generator.
    pub modulus: Option<Expr>,
    pub generator: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerStep {
    pub name: String,
    /// Monic in `name`, coefficients in the previous level.
    pub poly: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModuleBody {
    /// `a_0, a_1, ..` as row-major matrices.
    Matrices(Vec<Vec<Vec<Expr>>>),
    /// Dimension one: the coefficients of `Φ(T)`.
    Scalars(Vec<Expr>),
    Product(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleDecl {
    pub name: String,
    pub body: ModuleBody,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupDecl {
    pub name: String,
    pub module: String,
    pub rows: OreRows,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OreDecl {
    pub name: String,
    pub rows: OreRows,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointDecl {
    pub name: String,
    pub coords: Vec<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyDecl {
    pub name: String,
    pub expr: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub field: FieldBlock,
    /// Field order the contents are written for.
    pub requires_q: Option<(u64, Span)>,
    pub tower: Vec<TowerStep>,
    pub modules: Vec<ModuleDecl>,
    pub subgroups: Vec<SubgroupDecl>,
    pub ores: Vec<OreDecl>,
    pub points: Vec<PointDecl>,
    pub polys: Vec<PolyDecl>,
}

struct Entry {
    key: String,
    value: Value,
    span: Span,
}

struct Section {
    kind: String,
    name: Option<String>,
    span: Span,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(i))
    }

    fn required(&mut self, key: &str) -> Result<Entry, Diagnostic> {
        self.take(key)
            .ok_or_else(|| Diagnostic::at(self.span, format!("[{}] needs a `{key}` entry", self.kind)))
    }

    fn finish(self) -> Result<(), Diagnostic> {
        match self.entries.first() {
            Some(e) => Err(Diagnostic::at(
                e.span,
                format!("unexpected or repeated key `{}` in [{}]", e.key, self.kind),
            )),
            None => Ok(()),
        }
    }

    fn name(&self) -> Result<String, Diagnostic> {
        self.name
            .clone()
            .ok_or_else(|| Diagnostic::at(self.span, format!("[{}] needs a name", self.kind)))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn split_sections(text: &str) -> Result<Vec<Section>, Diagnostic> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.chars().take_while(|c| c.is_whitespace()).count();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let span = Span {
            line,
            column: indent + 1,
        };
        if let Some(inner) = trimmed.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| Diagnostic::at(span, "section header must end with `]`"))?;
            let words: Vec<&str> = inner.split_whitespace().collect();
            let (kind, name) = match words.as_slice() {
                [kind] => (kind.to_string(), None),
                [kind, name] => (kind.to_string(), Some(name.to_string())),
                _ => return Err(Diagnostic::at(span, "section header must be `[kind]` or `[kind name]`")),
            };
            if let Some(n) = &name {
                if !is_identifier(n) {
                    return Err(Diagnostic::at(span, format!("`{n}` is not a valid name")));
                }
            }
            sections.push(Section {
                kind,
                name,
                span,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Diagnostic::at(span, "expected `key = value` or a section header"))?;
        let key = key.trim();
        if !is_identifier(key) {
            return Err(Diagnostic::at(span, format!("`{key}` is not a valid key")));
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| Diagnostic::at(span, "entry outside of any section"))?;
        let column = content[..content.len() - value.len()].chars().count() + 1;
        let value = parse_value_at(value, line, column)?;
        section.entries.push(Entry {
            key: key.to_string(),
            value,
            span,
        });
    }
    Ok(sections)
}

fn as_expr(v: Value, what: &str) -> Result<Expr, Diagnostic> {
    match v {
        Value::Expr(e) => Ok(e),
        Value::List(_, s) => Err(Diagnostic::at(s, format!("{what} must be an expression, not a list"))),
    }
}

fn as_list(v: Value, what: &str) -> Result<Vec<Value>, Diagnostic> {
    match v {
        Value::List(items, _) => Ok(items),
        Value::Expr(e) => Err(Diagnostic::at(e.span, format!("{what} must be a bracketed list"))),
    }
}

fn as_exprs(v: Value, what: &str) -> Result<Vec<Expr>, Diagnostic> {
    as_list(v, what)?.into_iter().map(|x| as_expr(x, what)).collect()
}

fn as_name(v: Value, what: &str) -> Result<String, Diagnostic> {
    let e = as_expr(v, what)?;
    match e.kind {
        expr::ExprKind::Name(n) => Ok(n),
        _ => Err(Diagnostic::at(e.span, format!("{what} must be a name"))),
    }
}

fn as_uint(v: Value, what: &str) -> Result<(u64, Span), Diagnostic> {
    let e = as_expr(v, what)?;
    match e.kind {
        expr::ExprKind::Int(n) => Ok((n, e.span)),
        _ => Err(Diagnostic::at(e.span, format!("{what} must be an unsigned integer"))),
    }
}

fn as_matrix(v: Value, what: &str) -> Result<Vec<Vec<Expr>>, Diagnostic> {
    let span = v.span();
    let rows: Vec<Vec<Expr>> = as_list(v, what)?
        .into_iter()
        .map(|r| as_exprs(r, what))
        .collect::<Result<_, _>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Diagnostic::at(
            span,
            format!("{what} must be a nonempty rectangular matrix"),
        ));
    }
    Ok(rows)
}

fn as_ore_row(v: Value) -> Result<Vec<Vec<Expr>>, Diagnostic> {
    as_list(v, "an Ore row")?
        .into_iter()
        .map(|entry| as_exprs(entry, "an Ore entry"))
        .collect()
}

fn check_rows(rows: &OreRows, span: Span) -> Result<(), Diagnostic> {
    if rows.is_empty() {
        return Err(Diagnostic::at(span, "at least one `row` is required"));
    }
    if rows.iter().any(|r| r.len() != rows[0].len() || r.is_empty()) {
        return Err(Diagnostic::at(span, "rows must be nonempty and of equal length"));
    }
    Ok(())
}

fn module_body(section: &mut Section) -> Result<ModuleBody, Diagnostic> {
    if let Some(e) = section.take("product") {
        let names = as_list(e.value, "a product")?
            .into_iter()
            .map(|v| as_name(v, "a product factor"))
            .collect::<Result<Vec<_>, _>>()?;
        if names.is_empty() {
            return Err(Diagnostic::at(e.span, "a product needs at least one factor"));
        }
        return Ok(ModuleBody::Product(names));
    }
    if let Some(e) = section.take("phi") {
        return Ok(ModuleBody::Scalars(as_exprs(e.value, "phi")?));
    }
    let mut matrices = Vec::new();
    while let Some(e) = section.take(&format!("a{}", matrices.len())) {
        matrices.push(as_matrix(e.value, "a coefficient matrix")?);
    }
    if matrices.is_empty() {
        return Err(Diagnostic::at(
            section.span,
            "a module needs `a0 = ..`, `phi = ..` or `product = ..`",
        ));
    }
    Ok(ModuleBody::Matrices(matrices))
}

fn check_unique<'a>(names: impl Iterator<Item = (&'a str, Span)>) -> Result<(), Diagnostic> {
    let mut seen = HashMap::new();
    for (n, s) in names {
        if seen.insert(n, s).is_some() {
            return Err(Diagnostic::at(s, format!("`{n}` is declared twice")));
        }
    }
    Ok(())
}

impl Manifest {
    /// Parses either form; JSON is recognized by a leading `{`.
    pub fn parse(text: &str) -> Result<Manifest, Diagnostic> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    pub fn parse_text(text: &str) -> Result<Manifest, Diagnostic> {
        let mut field = None;
        let mut requires_q = None;
        let mut tower = Vec::new();
        let mut modules = Vec::new();
        let mut subgroups = Vec::new();
        let mut ores = Vec::new();
        let mut points = Vec::new();
        let mut polys = Vec::new();
        for mut s in split_sections(text)? {
            match s.kind.as_str() {
                "field" => {
                    if field.is_some() {
                        return Err(Diagnostic::at(s.span, "[field] appears twice"));
                    }
                    let (p, ps) = as_uint(s.required("p")?.value, "p")?;
                    let e = match s.take("e") {
                        Some(e) => as_uint(e.value, "e")?,
                        None => (1, s.span),
                    };
                    let p = u32::try_from(p).map_err(|_| Diagnostic::at(ps, "p is too large"))?;
                    let e_val = u32::try_from(e.0).map_err(|_| Diagnostic::at(e.1, "e is too large"))?;
                    let modulus = s.take("modulus").map(|m| as_expr(m.value, "modulus")).transpose()?;
                    let generator = s.take("generator").map(|g| as_name(g.value, "generator")).transpose()?;
                    let span = s.span;
                    s.finish()?;
                    field = Some(FieldBlock {
                        p,
                        e: e_val,
                        modulus,
                        generator,
                        span,
                    });
                }
                "requires" => {
                    let q = as_uint(s.required("q")?.value, "q")?;
                    s.finish()?;
                    requires_q = Some(q);
                }
                "tower" => {
                    for entry in std::mem::take(&mut s.entries) {
                        let poly = as_expr(entry.value, "a defining polynomial")?;
                        tower.push(TowerStep {
                            name: entry.key,
                            poly,
                            span: entry.span,
                        });
                    }
                }
                "module" => {
                    let name = s.name()?;
                    let body = module_body(&mut s)?;
                    let span = s.span;
                    s.finish()?;
                    modules.push(ModuleDecl { name, body, span });
                }
                "subgroup" | "ore" => {
                    let name = s.name()?;
                    let module = if s.kind == "subgroup" {
                        Some(as_name(s.required("module")?.value, "module")?)
                    } else {
                        None
                    };
                    let mut rows = Vec::new();
                    while let Some(e) = s.take("row") {
                        rows.push(as_ore_row(e.value)?);
                    }
                    check_rows(&rows, s.span)?;
                    let span = s.span;
                    let kind = s.kind.clone();
                    s.finish()?;
                    if kind == "subgroup" {
                        subgroups.push(SubgroupDecl {
                            name,
                            module: module.unwrap(),
                            rows,
                            span,
                        });
                    } else {
                        ores.push(OreDecl { name, rows, span });
                    }
                }
                "point" => {
                    let name = s.name()?;
                    let coords = as_exprs(s.required("coords")?.value, "coords")?;
                    let span = s.span;
                    s.finish()?;
                    points.push(PointDecl { name, coords, span });
                }
                "poly" => {
                    let name = s.name()?;
                    let expr = as_expr(s.required("expr")?.value, "expr")?;
                    let span = s.span;
                    s.finish()?;
                    polys.push(PolyDecl { name, expr, span });
                }
                other => return Err(Diagnostic::at(s.span, format!("unknown section kind `{other}`"))),
            }
        }
        let field = field.ok_or_else(|| Diagnostic {
            line: 1,
            column: 1,
            message: "missing [field] section".into(),
        })?;
        let m = Manifest {
            field,
            requires_q,
            tower,
            modules,
            subgroups,
            ores,
            points,
            polys,
        };
        m.check_names()?;
        Ok(m)
    }

    fn check_names(&self) -> Result<(), Diagnostic> {
        check_unique(
            self.tower
                .iter()
                .map(|s| (s.name.as_str(), s.span))
                .chain(self.field.generator.iter().map(|g| (g.as_str(), self.field.span)))
                .chain(std::iter::once(("T", self.field.span))),
        )?;
        check_unique(
            self.modules
                .iter()
                .map(|m| (m.name.as_str(), m.span))
                .chain(self.subgroups.iter().map(|m| (m.name.as_str(), m.span)))
                .chain(self.ores.iter().map(|m| (m.name.as_str(), m.span)))
                .chain(self.points.iter().map(|m| (m.name.as_str(), m.span)))
                .chain(self.polys.iter().map(|m| (m.name.as_str(), m.span))),
        )
    }

    /// The canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let f = &self.field;
        out.push_str(&format!("[field]\np = {}\ne = {}\n", f.p, f.e));
        if let Some(m) = &f.modulus {
            out.push_str(&format!("modulus = {m}\n"));
        }
        if let Some(g) = &f.generator {
            out.push_str(&format!("generator = {g}\n"));
        }
        if let Some((q, _)) = self.requires_q {
            out.push_str(&format!("\n[requires]\nq = {q}\n"));
        }
        if !self.tower.is_empty() {
            out.push_str("\n[tower]\n");
            for s in &self.tower {
                out.push_str(&format!("{} = {}\n", s.name, s.poly));
            }
        }
        for m in &self.modules {
            out.push_str(&format!("\n[module {}]\n", m.name));
            match &m.body {
                ModuleBody::Matrices(ms) => {
                    for (i, a) in ms.iter().enumerate() {
                        out.push_str(&format!("a{i} = {}\n", show_nested(a)));
                    }
                }
                ModuleBody::Scalars(c) => out.push_str(&format!("phi = {}\n", show_list(c))),
                ModuleBody::Product(names) => out.push_str(&format!("product = [{}]\n", names.join(", "))),
            }
        }
        for s in &self.subgroups {
            out.push_str(&format!("\n[subgroup {}]\nmodule = {}\n", s.name, s.module));
            for r in &s.rows {
                out.push_str(&format!("row = {}\n", show_nested(r)));
            }
        }
        for o in &self.ores {
            out.push_str(&format!("\n[ore {}]\n", o.name));
            for r in &o.rows {
                out.push_str(&format!("row = {}\n", show_nested(r)));
            }
        }
        for p in &self.points {
            out.push_str(&format!("\n[point {}]\ncoords = {}\n", p.name, show_list(&p.coords)));
        }
        for p in &self.polys {
            out.push_str(&format!("\n[poly {}]\nexpr = {}\n", p.name, p.expr));
        }
        out
    }
}

fn show_list(items: &[Expr]) -> String {
    let parts: Vec<String> = items.iter().map(|e| e.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn show_nested(rows: &[Vec<Expr>]) -> String {
    let parts: Vec<String> = rows.iter().map(|r| show_list(r)).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonField {
    p: u32,
    #[serde(default = "one")]
    e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<String>,
}

fn one() -> u32 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRequires {
    q: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonStep {
    name: String,
    poly: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModule {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    product: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSubgroup {
    name: String,
    module: String,
    rows: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonOre {
    name: String,
    rows: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPoint {
    name: String,
    coords: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPoly {
    name: String,
    expr: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonManifest {
    field: JsonField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    requires: Option<JsonRequires>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tower: Vec<JsonStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    modules: Vec<JsonModule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    subgroups: Vec<JsonSubgroup>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ores: Vec<JsonOre>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    points: Vec<JsonPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    polys: Vec<JsonPoly>,
}

/// Expressions inside JSON strings are located by finding the quoted
/// string in the source; the first occurrence is used.
struct JsonSource<'a> {
    text: &'a str,
}

impl JsonSource<'_> {
    fn locate(&self, s: &str) -> Span {
        let quoted = serde_json::to_string(s).unwrap_or_default();
        match self.text.find(&quoted) {
            Some(offset) => {
                let before = &self.text[..offset];
                let line = before.matches('\n').count() + 1;
                let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 2;
                Span { line, column }
            }
            None => Span { line: 1, column: 1 },
        }
    }

    fn expr(&self, s: &str) -> Result<Expr, Diagnostic> {
        let at = self.locate(s);
        Ok(expr::parse_at(s, at.line, at.column)?)
    }

    fn exprs(&self, items: &[String]) -> Result<Vec<Expr>, Diagnostic> {
        items.iter().map(|s| self.expr(s)).collect()
    }

    fn rows(&self, rows: &[Vec<Vec<String>>]) -> Result<OreRows, Diagnostic> {
        rows.iter().map(|r| r.iter().map(|e| self.exprs(e)).collect()).collect()
    }

    fn name(&self, s: &str) -> Span {
        self.locate(s)
    }
}

fn strings(items: &[Expr]) -> Vec<String> {
    items.iter().map(|e| e.to_string()).collect()
}

fn string_rows(rows: &OreRows) -> Vec<Vec<Vec<String>>> {
    rows.iter().map(|r| r.iter().map(|e| strings(e)).collect()).collect()
}

impl Manifest {
    pub fn parse_json(text: &str) -> Result<Manifest, Diagnostic> {
        let j: JsonManifest = serde_json::from_str(text).map_err(|e| Diagnostic {
            line: e.line(),
            column: e.column(),
            message: format!("invalid JSON manifest: {e}"),
        })?;
        let src = JsonSource { text };
        let field_span = src.locate("field");
        let field = FieldBlock {
            p: j.field.p,
            e: j.field.e,
            modulus: j.field.modulus.as_deref().map(|m| src.expr(m)).transpose()?,
            generator: j.field.generator.clone(),
            span: field_span,
        };
        let requires_q = j.requires.map(|r| (r.q, src.locate("requires")));
        let tower = j
            .tower
            .iter()
            .map(|s| {
                Ok(TowerStep {
                    name: s.name.clone(),
                    poly: src.expr(&s.poly)?,
                    span: src.name(&s.name),
                })
            })
            .collect::<Result<_, Diagnostic>>()?;
        let mut modules = Vec::new();
        for m in &j.modules {
            let span = src.name(&m.name);
            let body = match (&m.coeffs, &m.phi, &m.product) {
                (Some(c), None, None) if !c.is_empty() => {
                    let ms = c
                        .iter()
                        .map(|a| a.iter().map(|r| src.exprs(r)).collect())
                        .collect::<Result<Vec<_>, _>>()?;
                    if ms
                        .iter()
                        .any(|a: &Vec<Vec<Expr>>| a.is_empty() || a.iter().any(|r| r.len() != a[0].len()))
                    {
                        return Err(Diagnostic::at(
                            span,
                            "coefficient matrices must be nonempty and rectangular",
                        ));
                    }
                    ModuleBody::Matrices(ms)
                }
                (None, Some(p), None) => ModuleBody::Scalars(src.exprs(p)?),
                (None, None, Some(names)) if !names.is_empty() => ModuleBody::Product(names.clone()),
                _ => {
                    return Err(Diagnostic::at(
                        span,
                        "a module needs exactly one of `coeffs`, `phi`, `product`",
                    ))
                }
            };
            modules.push(ModuleDecl {
                name: m.name.clone(),
                body,
                span,
            });
        }
        let mut subgroups = Vec::new();
        for s in &j.subgroups {
            let span = src.name(&s.name);
            let rows = src.rows(&s.rows)?;
            check_rows(&rows, span)?;
            subgroups.push(SubgroupDecl {
                name: s.name.clone(),
                module: s.module.clone(),
                rows,
                span,
            });
        }
        let mut ores = Vec::new();
        for o in &j.ores {
            let span = src.name(&o.name);
            let rows = src.rows(&o.rows)?;
            check_rows(&rows, span)?;
            ores.push(OreDecl {
                name: o.name.clone(),
                rows,
                span,
            });
        }
        let points = j
            .points
            .iter()
            .map(|p| {
                Ok(PointDecl {
                    name: p.name.clone(),
                    coords: src.exprs(&p.coords)?,
                    span: src.name(&p.name),
                })
            })
            .collect::<Result<_, Diagnostic>>()?;
        let polys = j
            .polys
            .iter()
            .map(|p| {
                Ok(PolyDecl {
                    name: p.name.clone(),
                    expr: src.expr(&p.expr)?,
                    span: src.name(&p.name),
                })
            })
            .collect::<Result<_, Diagnostic>>()?;
        let m = Manifest {
            field,
            requires_q,
            tower,
            modules,
            subgroups,
            ores,
            points,
            polys,
        };
        for n in m.tower.iter().map(|s| &s.name).chain(m.modules.iter().map(|s| &s.name)) {
            if !is_identifier(n) {
                return Err(Diagnostic::at(src.name(n), format!("`{n}` is not a valid name")));
            }
        }
        m.check_names()?;
        Ok(m)
    }

    /// The JSON form, pretty-printed with a fixed key order.
    pub fn to_json(&self) -> String {
        let j = JsonManifest {
            field: JsonField {
                p: self.field.p,
                e: self.field.e,
                modulus: self.field.modulus.as_ref().map(|m| m.to_string()),
                generator: self.field.generator.clone(),
            },
            requires: self.requires_q.map(|(q, _)| JsonRequires { q }),
            tower: self
                .tower
                .iter()
                .map(|s| JsonStep {
                    name: s.name.clone(),
                    poly: s.poly.to_string(),
                })
                .collect(),
            modules: self
                .modules
                .iter()
                .map(|m| {
                    let mut j = JsonModule {
                        name: m.name.clone(),
                        coeffs: None,
                        phi: None,
                        product: None,
                    };
                    match &m.body {
                        ModuleBody::Matrices(ms) => {
                            j.coeffs = Some(ms.iter().map(|a| a.iter().map(|r| strings(r)).collect()).collect())
                        }
                        ModuleBody::Scalars(c) => j.phi = Some(strings(c)),
                        ModuleBody::Product(n) => j.product = Some(n.clone()),
                    }
                    j
                })
                .collect(),
            subgroups: self
                .subgroups
                .iter()
                .map(|s| JsonSubgroup {
                    name: s.name.clone(),
                    module: s.module.clone(),
                    rows: string_rows(&s.rows),
                })
                .collect(),
            ores: self
                .ores
                .iter()
                .map(|o| JsonOre {
                    name: o.name.clone(),
                    rows: string_rows(&o.rows),
                })
                .collect(),
            points: self
                .points
                .iter()
                .map(|p| JsonPoint {
                    name: p.name.clone(),
                    coords: strings(&p.coords),
                })
                .collect(),
            polys: self
                .polys
                .iter()
                .map(|p| JsonPoly {
                    name: p.name.clone(),
                    expr: p.expr.to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("manifest serializes")
    }
}

/// Polynomials in one variable over `F_q`, with exact division only.
pub struct PolyAlgebra<'a> {
    pub ring: &'a PolyRing,
    pub names: &'a HashMap<String, Poly>,
}

impl Algebra for PolyAlgebra<'_> {
    type Value = Poly;
    type Error = Diagnostic;

    fn name(&self, name: &str, span: Span) -> Result<Poly, Diagnostic> {
        self.names
            .get(name)
            .cloned()
            .ok_or_else(|| Diagnostic::at(span, format!("unknown name `{name}`")))
    }
    fn int(&self, n: u64) -> Poly {
        let p = self.ring.fq().p() as u64;
        Poly::constant(self.ring.fq().from_int((n % p) as i64))
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.ring.add(a, b)
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.ring.sub(a, b)
    }
    fn neg(&self, a: &Poly) -> Poly {
        self.ring.neg(a)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.ring.mul(a, b)
    }
    fn div(&self, a: &Poly, b: &Poly, span: Span) -> Result<Poly, Diagnostic> {
        if b.is_zero() {
            return Err(Diagnostic::at(span, "division by zero"));
        }
        let (q, r) = self.ring.div_rem(a, b);
        if !r.is_zero() {
            return Err(Diagnostic::at(span, "the quotient is not a polynomial"));
        }
        Ok(q)
    }
}

/// Elements of a tower, with names bound to tower elements.
pub struct TowerAlgebra<'a> {
    pub tower: &'a Tower,
    pub names: &'a HashMap<String, TowerElem>,
}

impl Algebra for TowerAlgebra<'_> {
    type Value = TowerElem;
    type Error = Diagnostic;

    fn name(&self, name: &str, span: Span) -> Result<TowerElem, Diagnostic> {
        self.names
            .get(name)
            .cloned()
            .ok_or_else(|| Diagnostic::at(span, format!("unknown name `{name}`")))
    }
    fn int(&self, n: u64) -> TowerElem {
        let p = self.tower.fq().p() as u64;
        self.tower.from_int((n % p) as i64)
    }
    fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.tower.add(a, b)
    }
    fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.tower.sub(a, b)
    }
    fn neg(&self, a: &TowerElem) -> TowerElem {
        self.tower.neg(a)
    }
    fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.tower.mul(a, b)
    }
    fn div(&self, a: &TowerElem, b: &TowerElem, span: Span) -> Result<TowerElem, Diagnostic> {
        self.tower.div(a, b).map_err(|e| match e {
            FieldError::ZeroDivisor { element, .. } => Diagnostic::at(
                span,
                format!("division by the zero divisor {element}; a defining polynomial of the tower is reducible"),
            ),
            other => Diagnostic::at(span, other.to_string()),
        })
    }
}

/// Polynomials in a new variable over a tower, used for defining polynomials.
struct StepAlgebra<'a> {
    tower: &'a Tower,
    var: &'a str,
    names: &'a HashMap<String, TowerElem>,
}

impl StepAlgebra<'_> {
    fn trim(&self, mut c: Vec<TowerElem>) -> Vec<TowerElem> {
        while c.last().is_some_and(|x| self.tower.is_zero(x)) {
            c.pop();
        }
        c
    }

    fn zip(
        &self,
        a: &[TowerElem],
        b: &[TowerElem],
        op: impl Fn(&TowerElem, &TowerElem) -> TowerElem,
    ) -> Vec<TowerElem> {
        let n = a.len().max(b.len());
        let z = self.tower.zero();
        self.trim(
            (0..n)
                .map(|i| op(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
                .collect(),
        )
    }
}

impl Algebra for StepAlgebra<'_> {
    type Value = Vec<TowerElem>;
    type Error = Diagnostic;

    fn name(&self, name: &str, span: Span) -> Result<Vec<TowerElem>, Diagnostic> {
        if name == self.var {
            return Ok(vec![self.tower.zero(), self.tower.one()]);
        }
        let x = self
            .names
            .get(name)
            .ok_or_else(|| Diagnostic::at(span, format!("unknown name `{name}`")))?;
        Ok(self.trim(vec![x.clone()]))
    }
    fn int(&self, n: u64) -> Vec<TowerElem> {
        let p = self.tower.fq().p() as u64;
        self.trim(vec![self.tower.from_int((n % p) as i64)])
    }
    fn add(&self, a: &Vec<TowerElem>, b: &Vec<TowerElem>) -> Vec<TowerElem> {
        self.zip(a, b, |x, y| self.tower.add(x, y))
    }
    fn sub(&self, a: &Vec<TowerElem>, b: &Vec<TowerElem>) -> Vec<TowerElem> {
        self.zip(a, b, |x, y| self.tower.sub(x, y))
    }
    fn neg(&self, a: &Vec<TowerElem>) -> Vec<TowerElem> {
        a.iter().map(|x| self.tower.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<TowerElem>, b: &Vec<TowerElem>) -> Vec<TowerElem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.tower.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.tower.add(&out[i + j], &self.tower.mul(x, y));
            }
        }
        self.trim(out)
    }
    fn div(&self, a: &Vec<TowerElem>, b: &Vec<TowerElem>, span: Span) -> Result<Vec<TowerElem>, Diagnostic> {
        if b.len() != 1 {
            return Err(Diagnostic::at(
                span,
                format!(
                    "a defining polynomial may only be divided by constants, not by {}",
                    self.var
                ),
            ));
        }
        let inv = self.tower.inv(&b[0]).map_err(|e| Diagnostic::at(span, e.to_string()))?;
        Ok(a.iter().map(|x| self.tower.mul(x, &inv)).collect())
    }
}

/// A manifest with every name resolved to a library value.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub tower: Tower,
    pub modules: Vec<(String, TModule<Tower>)>,
    pub subgroups: Vec<(String, KernelSubgroup<Tower>)>,
    pub ores: Vec<(String, OreMatrix<TowerElem>)>,
    pub points: Vec<(String, Vec<TowerElem>)>,
    pub polys: Vec<(String, Poly)>,
    elem_names: HashMap<String, TowerElem>,
    poly_names: HashMap<String, Poly>,
}

fn lookup<'a, V>(items: &'a [(String, V)], name: &str) -> Option<&'a V> {
    items.iter().find(|(n, _)| n == name).map(|(_, v)| v)
}

impl Manifest {
    pub fn resolve(&self) -> Result<Resolved, Diagnostic> {
        let f = &self.field;
        let generator = f.generator.clone().unwrap_or_else(|| "g".to_string());
        let fq = match &f.modulus {
            Some(m) => {
                let prime = FiniteField::prime(f.p).map_err(|e| Diagnostic::at(f.span, e.to_string()))?;
                let ring = PolyRing::new(prime);
                let names = HashMap::from([(generator.clone(), Poly::t())]);
                let poly = expr::eval(
                    &PolyAlgebra {
                        ring: &ring,
                        names: &names,
                    },
                    m,
                )?;
                if poly.degree() != Some(f.e as usize) {
                    return Err(Diagnostic::at(
                        m.span,
                        format!("the modulus must have degree e = {}", f.e),
                    ));
                }
                let coeffs = poly.coeffs().iter().map(|c| c.index()).collect();
                FiniteField::with_modulus(f.p, coeffs, &generator)
            }
            None => FiniteField::with_limits(f.p, f.e, None, &generator, Default::default()),
        }
        .map_err(|e| Diagnostic::at(f.span, e.to_string()))?;
        if let Some((q, span)) = self.requires_q {
            if q != fq.order() as u64 {
                return Err(Diagnostic::at(
                    span,
                    format!(
                        "field mismatch: the manifest requires q = {q} but the field has q = {}",
                        fq.order()
                    ),
                ));
            }
        }
        let mut tower = Tower::over(fq.clone());
        for step in &self.tower {
            let names = element_names(&tower, &generator);
            let alg = StepAlgebra {
                tower: &tower,
                var: &step.name,
                names: &names,
            };
            let coeffs = expr::eval(&alg, &step.poly)?;
            tower = tower
                .extend(&step.name, &coeffs)
                .map_err(|e| Diagnostic::at(step.span, e.to_string()))?;
        }
        let elem_names = element_names(&tower, &generator);
        let alg = TowerAlgebra {
            tower: &tower,
            names: &elem_names,
        };
        let elem = |e: &Expr| expr::eval(&alg, e);

        let mut modules: Vec<(String, TModule<Tower>)> = Vec::new();
        for m in &self.modules {
            let module = match &m.body {
                ModuleBody::Matrices(ms) => {
                    let n = ms[0].len();
                    let mut coeffs = Vec::new();
                    for a in ms {
                        if a.len() != n || a[0].len() != n {
                            return Err(Diagnostic::at(
                                a[0][0].span,
                                format!("module {}: every coefficient matrix must be {n}x{n}", m.name),
                            ));
                        }
                        let rows = a
                            .iter()
                            .map(|r| r.iter().map(&elem).collect())
                            .collect::<Result<Vec<Vec<_>>, _>>()?;
                        coeffs.push(tmodule::Matrix::from_rows(rows).expect("rectangular"));
                    }
                    TModule::new(tower.clone(), coeffs)
                }
                ModuleBody::Scalars(c) => {
                    let c = c.iter().map(&elem).collect::<Result<Vec<_>, _>>()?;
                    TModule::new(
                        tower.clone(),
                        c.into_iter()
                            .map(|x| tmodule::Matrix::from_rows(vec![vec![x]]).unwrap())
                            .collect(),
                    )
                }
                ModuleBody::Product(names) => {
                    let factors = names
                        .iter()
                        .map(|n| {
                            lookup(&modules, n).cloned().ok_or_else(|| {
                                Diagnostic::at(m.span, format!("module {}: unknown module `{n}`", m.name))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    tm::product(&factors)
                }
            }
            .map_err(|e| Diagnostic::at(m.span, format!("module {}: {e}", m.name)))?;
            modules.push((m.name.clone(), module));
        }

        let ore_rows = |rows: &OreRows| -> Result<OreMatrix<TowerElem>, Diagnostic> {
            let entries = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|e| {
                            Ok(OrePoly::from_coeffs(
                                &tower,
                                e.iter().map(&elem).collect::<Result<Vec<_>, _>>()?,
                            ))
                        })
                        .collect::<Result<Vec<_>, Diagnostic>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(OreMatrix::from_entries(&tower, &entries).expect("rows checked"))
        };

        let mut subgroups = Vec::new();
        for s in &self.subgroups {
            let module = lookup(&modules, &s.module)
                .ok_or_else(|| Diagnostic::at(s.span, format!("subgroup {}: unknown module `{}`", s.name, s.module)))?;
            let p = ore_rows(&s.rows)?;
            let b = KernelSubgroup::new(module.clone(), p)
                .map_err(|e| Diagnostic::at(s.span, format!("subgroup {}: {e}", s.name)))?;
            subgroups.push((s.name.clone(), b));
        }
        let ores = self
            .ores
            .iter()
            .map(|o| Ok((o.name.clone(), ore_rows(&o.rows)?)))
            .collect::<Result<_, Diagnostic>>()?;
        let points = self
            .points
            .iter()
            .map(|p| {
                Ok((
                    p.name.clone(),
                    p.coords.iter().map(&elem).collect::<Result<Vec<_>, _>>()?,
                ))
            })
            .collect::<Result<_, Diagnostic>>()?;

        let ring = PolyRing::new(fq.clone());
        let mut poly_names = HashMap::from([("T".to_string(), Poly::t())]);
        if fq.e() > 1 {
            poly_names.insert(generator.clone(), Poly::constant(fq.generator()));
        }
        let mut polys = Vec::new();
        for p in &self.polys {
            let value = expr::eval(
                &PolyAlgebra {
                    ring: &ring,
                    names: &poly_names,
                },
                &p.expr,
            )?;
            poly_names.insert(p.name.clone(), value.clone());
            polys.push((p.name.clone(), value));
        }
        Ok(Resolved {
            tower,
            modules,
            subgroups,
            ores,
            points,
            polys,
            elem_names,
            poly_names,
        })
    }
}

fn element_names(tower: &Tower, generator: &str) -> HashMap<String, TowerElem> {
    let mut names: HashMap<String, TowerElem> = tower
        .variable_names()
        .map(|n| (n.to_string(), tower.variable(n).expect("declared")))
        .collect();
    names.insert("T".into(), tower.t());
    if tower.fq().e() > 1 {
        names.insert(generator.to_string(), tower.from_fq(tower.fq().generator()));
    }
    names
}

impl Resolved {
    pub fn module(&self, name: &str) -> Option<&TModule<Tower>> {
        lookup(&self.modules, name)
    }

    pub fn subgroup(&self, name: &str) -> Option<&KernelSubgroup<Tower>> {
        lookup(&self.subgroups, name)
    }

    pub fn ore(&self, name: &str) -> Option<&OreMatrix<TowerElem>> {
        lookup(&self.ores, name)
    }

    pub fn point(&self, name: &str) -> Option<&Vec<TowerElem>> {
        lookup(&self.points, name)
    }

    /// Evaluates a polynomial in `T`; declared `[poly]` names may be used.
    pub fn poly(&self, text: &str) -> Result<Poly, Diagnostic> {
        let e = expr::parse(text)?;
        let ring = PolyRing::new(self.tower.fq().clone());
        expr::eval(
            &PolyAlgebra {
                ring: &ring,
                names: &self.poly_names,
            },
            &e,
        )
    }

    /// Evaluates a tower element.
    pub fn element(&self, text: &str) -> Result<TowerElem, Diagnostic> {
        let e = expr::parse(text)?;
        expr::eval(
            &TowerAlgebra {
                tower: &self.tower,
                names: &self.elem_names,
            },
            &e,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# the tensor square over F_2
[field]
p = 2

[module Cten2]
a0 = [[T, 1], [0, T]]
a1 = [[0, 0], [1, 0]]

[subgroup Axis]
module = Cten2
row = [[1], []]

[point P]
coords = [0, T^2 + 1]

[poly sq]
expr = T^2
";

    #[test]
    fn text_round_trip() {
        let m = Manifest::parse(SAMPLE).unwrap();
        let printed = m.to_text();
        assert_eq!(Manifest::parse(&printed).unwrap(), m);
        assert_eq!(Manifest::parse(&printed).unwrap().to_text(), printed);
        let r = m.resolve().unwrap();
        assert_eq!(r.module("Cten2").unwrap().nilpotency_order(), 2);
        assert!(r.subgroup("Axis").unwrap().contains(r.point("P").unwrap()).unwrap());
        assert_eq!(
            r.poly("sq + 1").unwrap(),
            Poly::from_coeffs(vec![r.tower.fq().one(), r.tower.fq().zero(), r.tower.fq().one()])
        );
    }

    #[test]
    fn json_round_trip() {
        let m = Manifest::parse(SAMPLE).unwrap();
        let json = m.to_json();
        let back = Manifest::parse(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn empty_module_list_is_valid() {
        let m = Manifest::parse("[field]\np = 3\n").unwrap();
        assert!(m.modules.is_empty());
        let r = m.resolve().unwrap();
        assert!(r.modules.is_empty());
    }

    #[test]
    fn syntax_error_location() {
        let err = Manifest::parse("[field]\np = 2\n[poly a]\nexpr = T^\n").unwrap_err();
        assert_eq!((err.line, err.column), (4, 9));
        let json = "{\"field\": {\"p\": 2},\n \"polys\": [{\"name\": \"a\", \"expr\": \"T^\"}]}";
        let err = Manifest::parse(json).unwrap_err();
        assert_eq!((err.line, err.column), (2, 36));
    }

    #[test]
    fn unresolved_names_are_located() {
        let err = Manifest::parse("[field]\np = 2\n[module M]\nphi = [T, V]\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!((err.line, err.column), (4, 11));
        let err = Manifest::parse("[field]\np = 2\n[subgroup B]\nmodule = M\nrow = [[1]]\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("unknown module"));
    }

    #[test]
    fn required_order_is_checked() {
        let err = Manifest::parse("[field]\np = 3\n[requires]\nq = 2\n")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.starts_with("field mismatch"));
    }

    #[test]
    fn towers_and_extension_fields() {
        let m = Manifest::parse("[field]\np = 2\ne = 2\nmodulus = a^2 + a + 1\ngenerator = a\n[tower]\nU = U^2 - T\n[point X]\ncoords = [a*U]\n").unwrap();
        let r = m.resolve().unwrap();
        let x = &r.point("X").unwrap()[0];
        let sq = r.tower.mul(x, x);
        assert_eq!(sq, r.element("(a + 1)*T").unwrap());
    }

    #[test]
    fn structural_errors() {
        assert!(Manifest::parse("p = 2").unwrap_err().message.contains("outside"));
        assert!(Manifest::parse("[field]\np = 2\n[module M]\n")
            .unwrap_err()
            .message
            .contains("a0"));
        assert!(Manifest::parse("[field]\np = 2\n[wat]\n")
            .unwrap_err()
            .message
            .contains("unknown section"));
        let dup = Manifest::parse("[field]\np = 2\n[poly a]\nexpr = T\n[poly a]\nexpr = T\n").unwrap_err();
        assert_eq!(dup.line, 5);
        let bad =
            Manifest::parse("[field]\np = 2\n[module M]\na0 = [[T, 0], [0, T + 1]]\na1 = [[1, 0], [0, 1]]\n").unwrap();
        assert!(bad.resolve().unwrap_err().message.contains("nilpotent"));
    }
}
