//! Command implementations. Each returns a report or an error; errors
//! exit with status 2, refuted or undecided reports with status 1.

use tmodule::exponential::{ExpSeries, RestrictionCheck};
use tmodule::ore::{self, OreMatrix};
use tmodule::structure::{abelian_scan, rank_report, AbelianVerdict};
use tmodule::subgroups::{KernelSubgroup, MinimalJ, Stability};
use tmodule::tmodule::TModule;
use tmodule::torsion::{self, OrderSearch, TorsionVerdict};
use tmodule::{linalg, Field, FunctionField, Poly, PolyRing, Tower, TowerElem};

use crate::manifest::{Diagnostic, Resolved};
use crate::report::{Report, Section, Status};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("manifest error at {0}")]
    Manifest(#[from] Diagnostic),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("error: {0}")]
    Compute(String),
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub module: Option<String>,
    pub subgroup: Option<String>,
    pub point: Option<String>,
    pub poly: Option<String>,
    pub max_j: Option<usize>,
    pub max_i: Option<usize>,
    pub order: Option<usize>,
    pub bound: Option<usize>,
}

pub const DEFAULT_MAX_J: usize = 6;
pub const DEFAULT_MAX_I: usize = 8;
pub const DEFAULT_ORDER: usize = 5;
pub const DEFAULT_CAP: usize = 16;
pub const DEFAULT_TORSION_DEGREE: usize = 4;

pub fn poly_text(tower: &Tower, a: &Poly) -> String {
    PolyRing::new(tower.fq().clone()).format(a)
}

pub fn point_text(tower: &Tower, v: &[TowerElem]) -> String {
    let parts: Vec<String> = v.iter().map(|x| tower.format(x)).collect();
    format!("({})", parts.join(", "))
}

struct Ctx<'a> {
    r: &'a Resolved,
    o: &'a Options,
}

impl<'a> Ctx<'a> {
    fn tower(&self) -> &'a Tower {
        &self.r.tower
    }

    fn module_named(&self, name: &str) -> Result<&'a TModule<Tower>, CliError> {
        self.r
            .module(name)
            .ok_or_else(|| CliError::Usage(format!("the manifest declares no module `{name}`")))
    }

    fn module(&self) -> Result<(&'a str, &'a TModule<Tower>), CliError> {
        let name = self
            .o
            .module
            .as_deref()
            .ok_or_else(|| CliError::Usage("--module is required".into()))?;
        Ok((name, self.module_named(name)?))
    }

    fn subgroup(&self) -> Result<(&'a str, &'a KernelSubgroup<Tower>), CliError> {
        let name = self
            .o
            .subgroup
            .as_deref()
            .ok_or_else(|| CliError::Usage("--subgroup is required".into()))?;
        let b = self
            .r
            .subgroup(name)
            .ok_or_else(|| CliError::Usage(format!("the manifest declares no subgroup `{name}`")))?;
        if let Some(m) = &self.o.module {
            if self.module_named(m)? != b.module() {
                return Err(CliError::Usage(format!(
                    "subgroup `{name}` does not live in module `{m}`"
                )));
            }
        }
        Ok((name, b))
    }

    fn point(&self) -> Result<(&'a str, &'a [TowerElem]), CliError> {
        let name = self
            .o
            .point
            .as_deref()
            .ok_or_else(|| CliError::Usage("--point is required".into()))?;
        let v = self
            .r
            .point(name)
            .ok_or_else(|| CliError::Usage(format!("the manifest declares no point `{name}`")))?;
        Ok((name, v))
    }

    fn poly(&self) -> Result<Option<Poly>, CliError> {
        self.o
            .poly
            .as_deref()
            .map(|text| {
                self.r
                    .poly(text)
                    .map_err(|d| CliError::Usage(format!("--poly: column {}: {}", d.column, d.message)))
            })
            .transpose()
    }

    fn required_poly(&self) -> Result<Poly, CliError> {
        self.poly()?.ok_or_else(|| CliError::Usage("--poly is required".into()))
    }

    /// The module, viewed over `F_q[a]` when `--poly a` is given.
    fn module_over_poly(&self, module: &TModule<Tower>) -> Result<(TModule<Tower>, String), CliError> {
        match self.poly()? {
            Some(a) => {
                let over = module.restrict(&a).map_err(|e| CliError::Compute(e.to_string()))?;
                Ok((over, poly_text(self.tower(), &a)))
            }
            None => Ok((module.clone(), "T".into())),
        }
    }
}

pub fn validate(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let t = &r.tower;
    let mut sections = vec![Section::new("field", Status::Info)
        .entry("q", t.fq().order().to_string())
        .entry("tower", tower_text(t))];
    let modules: Vec<(&str, &TModule<Tower>)> = match &o.module {
        Some(_) => vec![c.module()?],
        None => r.modules.iter().map(|(n, m)| (n.as_str(), m)).collect(),
    };
    for (name, m) in modules {
        let v = m.validate();
        sections.push(
            Section::new(format!("module {name}"), Status::Pass)
                .entry("dimension", v.dimension.to_string())
                .entry("degree", v.degree.to_string())
                .entry("nilpotency order", v.nilpotency_order.to_string()),
        );
    }
    if o.module.is_none() {
        for (name, b) in &r.subgroups {
            sections.push(
                Section::new(format!("subgroup {name}"), Status::Pass)
                    .entry("presentation", ore::format(t, b.presentation())),
            );
        }
        for (name, v) in &r.points {
            sections.push(Section::new(format!("point {name}"), Status::Info).entry("coordinates", point_text(t, v)));
        }
        for (name, a) in &r.polys {
            sections.push(Section::new(format!("polynomial {name}"), Status::Info).entry("value", poly_text(t, a)));
        }
    }
    Ok(Report::new("validate", sections))
}

fn tower_text(t: &Tower) -> String {
    let names: Vec<&str> = t.variable_names().collect();
    if names.is_empty() {
        "F_q(T)".into()
    } else {
        format!("F_q(T)({}) of degree {}", names.join(", "), t.degree())
    }
}

pub fn act(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let t = &r.tower;
    let (name, m) = c.module()?;
    let a = c.required_poly()?;
    let phi = m.act(&a);
    let mut s = Section::new(format!("action of {} in module {name}", poly_text(t, &a)), Status::Info)
        .entry("map", ore::format(t, &phi))
        .entry("differential", linalg::format(t, &m.differential(&a)));
    if o.point.is_some() {
        let (pname, v) = c.point()?;
        let value = torsion::apply(m, &a, v).map_err(|e| CliError::Compute(e.to_string()))?;
        s.push(format!("value at {pname}"), point_text(t, &value));
    }
    Ok(Report::new("act", vec![s]))
}

fn stability_section(
    t: &Tower,
    title: String,
    b: &KernelSubgroup<Tower>,
    verdict: &Stability<TowerElem>,
    image: &OreMatrix<TowerElem>,
    bound: usize,
) -> Section {
    let mut s = Section::new(title, Status::Pass)
        .entry("presentation", ore::format(t, b.presentation()))
        .entry("composed map", ore::format(t, image))
        .entry("witness bound", bound.to_string());
    match verdict {
        Stability::Stable(q) => {
            let back = ore::compose(t, q, b.presentation()).expect("shapes agree");
            s.push("verdict", "stable");
            s.push("witness", ore::format(t, q));
            s.push(
                "witness re-expansion",
                if &back == image { "matches" } else { "MISMATCH" },
            );
            s.require(&back == image);
        }
        Stability::NoWitnessUpTo(d) => {
            s.status = Status::Undecided;
            s.push("verdict", format!("no witness up to degree {d}"));
        }
        Stability::ProvablyUnstable(reason) => {
            s.status = Status::Fail;
            s.push("verdict", "unstable");
            s.push("reason", reason.clone());
        }
    }
    s
}

pub fn stability(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let t = &r.tower;
    let (name, b) = c.subgroup()?;
    let a = c.required_poly()?;
    let check = b.stability(&a, o.bound).map_err(|e| CliError::Compute(e.to_string()))?;
    let mut s = stability_section(
        t,
        format!("stability of {name} under {}", poly_text(t, &a)),
        b,
        &check.verdict,
        &check.image,
        check.bound,
    );
    if let Ok(tangent) = b.tangent_stability(&a) {
        s.push("tangent space preserved", tangent.to_string());
    }
    Ok(Report::new("stability", vec![s]))
}

pub fn minimal_j(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let (name, b) = c.subgroup()?;
    let max_j = o.max_j.unwrap_or(DEFAULT_MAX_J);
    if max_j == 0 {
        return Err(CliError::Usage("--max-j must be at least 1".into()));
    }
    let scan = b.minimal_j_scan(max_j, o.bound);
    let mut s = Section::new(format!("smallest j with {name} stable under T^j"), Status::Pass);
    for (j, v) in &scan.verdicts {
        let text = match v {
            Stability::Stable(_) => "stable".to_string(),
            Stability::NoWitnessUpTo(d) => format!("no witness up to degree {d}"),
            Stability::ProvablyUnstable(_) => "unstable".to_string(),
        };
        s.push(format!("j = {j}"), text);
    }
    match scan.result {
        MinimalJ::Found { j, witness } => {
            s.push("result", j.to_string());
            s.push("witness", ore::format(&r.tower, &witness));
        }
        MinimalJ::NoneUpTo(j) => {
            s.status = Status::Undecided;
            s.push("result", format!("none up to {j}"));
        }
    }
    Ok(Report::new("minimal-j", vec![s]))
}

pub fn j_bound(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let t = &r.tower;
    let (name, m) = c.module()?;
    let jb = m.j_bound();
    let tj = Poly::monomial(t.fq().one(), jb.j as usize);
    let mut s = Section::new(format!("j-bound of module {name}"), Status::Pass)
        .entry("nilpotency order", jb.nilpotency_order.to_string())
        .entry("p", jb.p.to_string())
        .entry("r", jb.r.to_string())
        .entry("j", jb.j.to_string())
        .entry("differential at T^j", linalg::format(t, &m.differential(&tj)))
        .entry("differential is scalar", jb.differential_is_scalar.to_string());
    if jb.log_formula_j != jb.j {
        s.push(
            "note",
            format!(
                "p^(floor(log_p n) + 1) = {} differs from the smallest p-power >= n; the smallest p-power is reported",
                jb.log_formula_j
            ),
        );
    }
    s.require(jb.differential_is_scalar);
    Ok(Report::new("j-bound", vec![s]))
}

pub fn abelian(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let (name, m) = c.module()?;
    let (m, over) = c.module_over_poly(m)?;
    let max_i = o.max_i.unwrap_or(DEFAULT_MAX_I);
    let cap = o.bound.unwrap_or(DEFAULT_CAP);
    if max_i == 0 || cap == 0 {
        return Err(CliError::Usage("--max-i and --bound must be at least 1".into()));
    }
    let report = abelian_scan(&m, max_i, cap);
    let mut s = Section::new(format!("abelian scan of module {name} over F_q[{over}]"), Status::Pass);
    for step in &report.steps {
        s.push(
            format!("i = {}", step.i),
            format!(
                "degree {}, leading coefficient {}",
                step.degree,
                if step.leading_invertible {
                    "invertible"
                } else {
                    "singular"
                }
            ),
        );
    }
    match report.verdict {
        AbelianVerdict::Abelian { i, generators } => {
            s.push("verdict", "abelian");
            s.push("generator count", format!("{generators} over F_q[t^{i}], t = {over}"));
        }
        AbelianVerdict::Nonabelian(p) => {
            s.push("verdict", "nonabelian");
            s.push("closed support pattern", p.to_string());
        }
        AbelianVerdict::Inconclusive { max_i, cap } => {
            s.status = Status::Undecided;
            s.push(
                "verdict",
                format!("inconclusive up to i = {max_i} with pattern degree cap {cap}"),
            );
        }
    }
    Ok(Report::new("abelian-scan", vec![s]))
}

pub fn rank(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let max_i = o.max_i.unwrap_or(DEFAULT_MAX_I);
    let (title, m, over) = if o.subgroup.is_some() {
        let (name, b) = c.subgroup()?;
        let (ambient, over) = c.module_over_poly(b.module())?;
        let sub =
            KernelSubgroup::new(ambient, b.presentation().clone()).map_err(|e| CliError::Compute(e.to_string()))?;
        let induced = sub
            .induced_module()
            .map_err(|e| CliError::Compute(format!("subgroup {name}: {e}")))?;
        (format!("subgroup {name}"), induced, over)
    } else {
        let (name, m) = c.module()?;
        let (m, over) = c.module_over_poly(m)?;
        (format!("module {name}"), m, over)
    };
    let i = abelian_scan(&m, max_i, 1)
        .steps
        .iter()
        .find(|s| s.leading_invertible)
        .map(|s| s.i)
        .ok_or_else(|| {
            CliError::Compute(format!(
                "no iterate up to i = {max_i} has an invertible leading coefficient"
            ))
        })?;
    let rr = rank_report(&m, i).map_err(|e| CliError::Compute(e.to_string()))?;
    let s = Section::new(format!("generator count of {title} over F_q[{over}]"), Status::Pass)
        .entry("iterate", rr.i.to_string())
        .entry("dimension", rr.dimension.to_string())
        .entry("degree", rr.degree.to_string())
        .entry("generator count", rr.generators.to_string());
    Ok(Report::new("rank", vec![s]))
}

pub fn exp(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let t = &r.tower;
    let (name, m) = match (&o.module, &o.subgroup) {
        (None, Some(_)) => {
            let (_, b) = c.subgroup()?;
            let name = r
                .modules
                .iter()
                .find(|(_, m)| m == b.module())
                .map(|(n, _)| n.as_str())
                .unwrap_or("?");
            (name, b.module())
        }
        _ => c.module()?,
    };
    let order = o.order.unwrap_or(DEFAULT_ORDER);
    let series = ExpSeries::compute(m, order).map_err(|e| CliError::Compute(e.to_string()))?;
    let mut s = Section::new(format!("exponential of module {name} to order {order}"), Status::Pass);
    for (i, e) in series.coeffs().iter().enumerate() {
        s.push(format!("E_{i}"), linalg::format(t, e));
    }
    let ok = series.verify_functional_equation();
    s.push("functional equation", if ok { "holds" } else { "fails" });
    s.require(ok);
    let mut sections = vec![s];
    if o.subgroup.is_some() {
        let (bname, b) = c.subgroup()?;
        let a = c.required_poly()?;
        let mut rs = Section::new(
            format!("exponential maps the tangent space of {bname} into {bname}"),
            Status::Pass,
        );
        match series.restriction_check(b, &a) {
            RestrictionCheck::Holds { fixed, free } => {
                rs.push(
                    "vanishing block",
                    format!("rows {} x columns {} of every E_i", one_based(&fixed), one_based(&free)),
                );
            }
            RestrictionCheck::Fails { i, row, col } => {
                rs.status = Status::Fail;
                rs.push(
                    "counterexample",
                    format!("entry ({}, {}) of E_{i} is nonzero", row + 1, col + 1),
                );
            }
            RestrictionCheck::Unchecked(why) => {
                rs.status = Status::Undecided;
                rs.push("unchecked", why);
            }
        }
        sections.push(rs);
    }
    Ok(Report::new("exp", sections))
}

fn one_based(ix: &[usize]) -> String {
    let parts: Vec<String> = ix.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

pub fn torsion_cmd(r: &Resolved, o: &Options) -> Result<Report, CliError> {
    let c = Ctx { r, o };
    let t = &r.tower;
    let (name, m) = c.module()?;
    let (pname, v) = c.point()?;
    let mut sections = Vec::new();
    let mut s = Section::new(format!("torsion of point {pname} in module {name}"), Status::Pass)
        .entry("point", point_text(t, v));
    let transcript = |s: &mut Section, cert: &torsion::TorsionCertificate<TowerElem>| {
        for (k, line) in cert.transcript.iter().enumerate() {
            s.push(format!("T^{k} applied to the point"), line.clone());
        }
        let ok = torsion::verify_transcript(m, cert);
        s.push("transcript re-verified", ok.to_string());
        s.require(ok);
    };
    match c.poly()? {
        Some(a) => match torsion::is_torsion(m, v, &a).map_err(|e| CliError::Compute(e.to_string()))? {
            TorsionVerdict::Certified(cert) => {
                s.push("annihilator", poly_text(t, &a));
                transcript(&mut s, &cert);
            }
            TorsionVerdict::Refuted(value) => {
                s.status = Status::Fail;
                s.push("image under the action", point_text(t, &value));
            }
        },
        None => {
            let d = o.bound.unwrap_or(DEFAULT_TORSION_DEGREE);
            match torsion::torsion_order_search(m, v, d).map_err(|e| CliError::Compute(e.to_string()))? {
                OrderSearch::Found(cert) => {
                    s.push("minimal annihilator", poly_text(t, &cert.annihilator));
                    transcript(&mut s, &cert);
                }
                OrderSearch::NoneUpTo(d) => {
                    s.status = Status::Undecided;
                    s.push("minimal annihilator", format!("none of degree at most {d}"));
                }
            }
        }
    }
    sections.push(s);
    if o.subgroup.is_some() {
        let (bname, b) = c.subgroup()?;
        let inside = b.contains(v).map_err(|e| CliError::Compute(e.to_string()))?;
        let mut ms =
            Section::new(format!("point {pname} lies in {bname}"), Status::Pass).entry("member", inside.to_string());
        ms.require(inside);
        sections.push(ms);
    }
    Ok(Report::new("torsion", sections))
}
