//! The embedded verification corpus behind `tml paper-corpus`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tmodule::exponential::{ExpSeries, RestrictionCheck};
use tmodule::ore::{self, OreMatrix};
use tmodule::sample::RandomElement;
use tmodule::structure::{abelian_scan, degree_sequence, rank_report, AbelianVerdict};
use tmodule::subgroups::{KernelSubgroup, MinimalJ, Stability};
use tmodule::tmodule::TModule;
use tmodule::torsion::{self, OrderSearch};
use tmodule::{linalg, Field, FunctionField, Poly, Tower, TowerElem};

use crate::commands::{point_text, poly_text, CliError};
use crate::manifest::{Manifest, Resolved};
use crate::report::{Report, Section, Status};

pub const SUB_MODULE: &str = include_str!("../manifests/sub_module.tml");
pub const TENSOR_SQUARE: &str = include_str!("../manifests/tensor_square.tml");
pub const ROOT_CURVE: &str = include_str!("../manifests/root_curve.tml");
pub const LOWER_LEFT: &str = include_str!("../manifests/lower_left.tml");
pub const CARLITZ: &str = include_str!("../manifests/carlitz.tml");

pub const SQUARE_SAMPLES: usize = 100;
pub const SQUARE_SEED: u64 = 0x5eed;
pub const CURVE_MAX_J: usize = 6;
pub const DEGREE_RUN: usize = 20;
pub const EXP_ORDER: usize = 5;

/// The corpus manifests; tests replace individual texts to mutate the corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifests {
    pub sub_module: String,
    pub tensor_square: String,
    pub root_curve: String,
    pub lower_left: String,
    pub carlitz: String,
}

impl Default for Manifests {
    fn default() -> Self {
        Manifests {
            sub_module: SUB_MODULE.into(),
            tensor_square: TENSOR_SQUARE.into(),
            root_curve: ROOT_CURVE.into(),
            lower_left: LOWER_LEFT.into(),
            carlitz: CARLITZ.into(),
        }
    }
}

impl Manifests {
    pub fn named(&self) -> [(&'static str, &str); 5] {
        [
            ("sub_module.tml", &self.sub_module),
            ("tensor_square.tml", &self.tensor_square),
            ("root_curve.tml", &self.root_curve),
            ("lower_left.tml", &self.lower_left),
            ("carlitz.tml", &self.carlitz),
        ]
    }
}

fn load(name: &str, text: &str) -> Result<Resolved, CliError> {
    let located = |d: crate::manifest::Diagnostic| {
        CliError::Compute(format!("{name}: line {}, column {}: {}", d.line, d.column, d.message))
    };
    Manifest::parse(text).and_then(|m| m.resolve()).map_err(located)
}

fn need<'a, T>(found: Option<&'a T>, file: &str, what: &str) -> Result<&'a T, CliError> {
    found.ok_or_else(|| CliError::Compute(format!("{file}: missing {what}")))
}

fn t_power(t: &Tower, n: usize) -> Poly {
    Poly::monomial(t.fq().one(), n)
}

/// Records `expected` and `found` and fails the section when they differ.
fn compare(s: &mut Section, what: &str, expected: String, found: String) {
    let ok = expected == found;
    if ok {
        s.push(what, found);
    } else {
        s.push(format!("{what} expected"), expected);
        s.push(format!("{what} found"), found);
    }
    s.require(ok);
}

fn verdict_text(t: &Tower, v: &Stability<TowerElem>) -> String {
    match v {
        Stability::Stable(q) => format!("stable, witness {}", ore::format(t, q)),
        Stability::NoWitnessUpTo(d) => format!("no witness up to degree {d}"),
        Stability::ProvablyUnstable(why) => format!("unstable: {why}"),
    }
}

fn stable_item(
    t: &Tower,
    title: &str,
    b: &KernelSubgroup<Tower>,
    a: &Poly,
    expected_witness: Option<&OreMatrix<TowerElem>>,
) -> Section {
    let mut s = Section::new(title, Status::Pass).entry("presentation", ore::format(t, b.presentation()));
    let check = match b.stability(a, None) {
        Ok(c) => c,
        Err(e) => {
            s.push("error", e.to_string());
            s.require(false);
            return s;
        }
    };
    match &check.verdict {
        Stability::Stable(q) => {
            let back = ore::compose(t, q, b.presentation()).ok();
            s.push("witness", ore::format(t, q));
            compare(
                &mut s,
                "witness re-expansion",
                ore::format(t, &check.image),
                back.map_or("shape mismatch".into(), |m| ore::format(t, &m)),
            );
            if let Some(w) = expected_witness {
                compare(&mut s, "witness value", ore::format(t, w), ore::format(t, q));
            }
        }
        other => compare(&mut s, "verdict", "stable".into(), verdict_text(t, other)),
    }
    s
}

fn sub_module_items(m: &Manifests, out: &mut Vec<Section>) -> Result<(), CliError> {
    let file = "sub_module.tml";
    let r = load(file, &m.sub_module)?;
    let t = &r.tower;
    let b = need(r.subgroup("B"), file, "subgroup B")?;
    let phi2 = need(r.module("Phi2"), file, "module Phi2")?;
    out.push(stable_item(
        t,
        "sub-module of Phi1 x Phi2 stable under T",
        b,
        &t_power(t, 1),
        Some(phi2.phi()),
    ));
    Ok(())
}

fn tensor_items(m: &Manifests, out: &mut Vec<Section>) -> Result<Resolved, CliError> {
    let file = "tensor_square.tml";
    let r = load(file, &m.tensor_square)?;
    let t = &r.tower;
    let cten2 = need(r.module("Cten2"), file, "module Cten2")?;
    let axis = need(r.subgroup("Axis"), file, "subgroup Axis")?;
    let t2 = t_power(t, 2);

    let mut s = Section::new("action of T^2 on the tensor square", Status::Pass);
    let expected = need(r.ore("PhiT2"), file, "ore PhiT2")?;
    compare(&mut s, "map", ore::format(t, expected), ore::format(t, &cten2.act(&t2)));
    out.push(s);

    let mut s = Section::new("axis 0 x G_a unstable under T", Status::Pass)
        .entry("presentation", ore::format(t, axis.presentation()));
    match axis.stability(&t_power(t, 1), None) {
        Ok(c) => {
            let found = verdict_text(t, &c.verdict);
            let ok = matches!(c.verdict, Stability::ProvablyUnstable(_));
            s.push("verdict", found);
            s.require(ok);
        }
        Err(e) => compare(&mut s, "verdict", "unstable".into(), e.to_string()),
    }
    out.push(s);

    out.push(stable_item(t, "axis 0 x G_a stable under T^2", axis, &t2, None));

    let mut s = Section::new("j-bound of the tensor square", Status::Pass);
    let jb = cten2.j_bound();
    compare(&mut s, "j", "2".into(), jb.j.to_string());
    let scalar = linalg::scalar(t, cten2.dimension(), &t.from_poly(&t2));
    compare(
        &mut s,
        "differential at T^2",
        linalg::format(t, &scalar),
        linalg::format(t, &cten2.differential(&t2)),
    );
    out.push(s);
    Ok(r)
}

fn root_curve_items(m: &Manifests, out: &mut Vec<Section>) -> Result<(), CliError> {
    let file = "root_curve.tml";
    let r = load(file, &m.root_curve)?;
    let t = &r.tower;
    let c = need(r.module("C"), file, "module C")?;
    let c2 = need(r.module("C2"), file, "module C2")?;
    let curve = need(r.subgroup("Curve"), file, "subgroup Curve")?;
    let p = need(r.point("P"), file, "point P")?;
    let t2 = t_power(t, 2);

    let mut s = Section::new("C2(T)(sqrt z) = sqrt(C(T^2)(z))", Status::Pass);
    let tau =
        OreMatrix::from_coeffs(t, 1, 1, vec![linalg::zeros(t, 1, 1), linalg::identity(t, 1)]).expect("one by one");
    let lhs = ore::compose(t, &tau, c2.phi()).map(|x| ore::format(t, &x));
    let rhs = ore::compose(t, &c.act(&t2), &tau).map(|x| ore::format(t, &x));
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => compare(&mut s, "tau o C2(T) against C(T^2) o tau", l, r),
        _ => compare(
            &mut s,
            "tau o C2(T) against C(T^2) o tau",
            "1 x 1 maps".into(),
            "shape mismatch".into(),
        ),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SQUARE_SEED);
    let mut failures = Vec::new();
    for k in 0..SQUARE_SAMPLES {
        let w = t.random(&mut rng, 2);
        let z = t.mul(&w, &w);
        let holds = (|| {
            let root = t.pth_root(&z)?;
            let lhs = ore::eval(t, c2.phi(), &[root]).ok()?;
            let inner = ore::eval(t, &c.act(&t2), std::slice::from_ref(&z)).ok()?;
            Some(lhs[0] == t.pth_root(&inner[0])?)
        })();
        if holds != Some(true) {
            failures.push(format!("sample {k}: z = {}", t.format(&z)));
        }
    }
    s.push(
        "random squares",
        format!("{} checked with seed {SQUARE_SEED:#x}", SQUARE_SAMPLES),
    );
    compare(
        &mut s,
        "failing squares",
        "none".into(),
        if failures.is_empty() {
            "none".into()
        } else {
            failures.join("; ")
        },
    );
    out.push(s);

    let mut s = Section::new("torsion point on the curve x = y^2", Status::Pass).entry("point", point_text(t, p));
    compare(
        &mut s,
        "on the curve",
        "true".into(),
        curve.contains(p).map_or_else(|e| e.to_string(), |b| b.to_string()),
    );
    match torsion::torsion_order_search(curve.module(), p, 4) {
        Ok(OrderSearch::Found(cert)) => {
            compare(
                &mut s,
                "minimal annihilator",
                "T".into(),
                poly_text(t, &cert.annihilator),
            );
            compare(
                &mut s,
                "transcript re-verified",
                "true".into(),
                torsion::verify_transcript(curve.module(), &cert).to_string(),
            );
        }
        Ok(OrderSearch::NoneUpTo(d)) => compare(
            &mut s,
            "minimal annihilator",
            "T".into(),
            format!("none up to degree {d}"),
        ),
        Err(e) => compare(&mut s, "minimal annihilator", "T".into(), e.to_string()),
    }
    out.push(s);

    let mut s = Section::new("curve x = y^2 has no witness for T^j", Status::Pass);
    let scan = curve.minimal_j_scan(CURVE_MAX_J, None);
    for (j, v) in &scan.verdicts {
        s.push(format!("j = {j}"), verdict_text(t, v));
    }
    let found = match scan.result {
        MinimalJ::Found { j, .. } => format!("witness at j = {j}"),
        MinimalJ::NoneUpTo(j) => format!("none up to {j}"),
    };
    compare(&mut s, "result", format!("none up to {CURVE_MAX_J}"), found);
    out.push(s);
    Ok(())
}

fn generators(m: &TModule<Tower>) -> String {
    let i = abelian_scan(m, 8, 1)
        .steps
        .iter()
        .find(|s| s.leading_invertible)
        .map(|s| s.i);
    match i.map(|i| rank_report(m, i)) {
        Some(Ok(r)) => r.generators.to_string(),
        Some(Err(e)) => e.to_string(),
        None => "no invertible leading coefficient".into(),
    }
}

fn generator_items(r: &Resolved, out: &mut Vec<Section>) -> Result<(), CliError> {
    let file = "tensor_square.tml";
    let t = &r.tower;
    let cten2 = need(r.module("Cten2"), file, "module Cten2")?;
    let axis = need(r.subgroup("Axis"), file, "subgroup Axis")?;
    let t2 = t_power(t, 2);
    let mut s = Section::new("generator counts over F_q[T^2]", Status::Pass);
    let over = cten2.restrict(&t2).map_err(|e| CliError::Compute(e.to_string()))?;
    compare(&mut s, "tensor square", "2".into(), generators(&over));
    let induced = KernelSubgroup::new(over, axis.presentation().clone())
        .and_then(|b| b.induced_module())
        .map(|m| generators(&m));
    compare(&mut s, "axis", "1".into(), induced.unwrap_or_else(|e| e.to_string()));
    out.push(s);
    Ok(())
}

fn abelian_text(v: &AbelianVerdict) -> String {
    match v {
        AbelianVerdict::Abelian { i, generators } => format!("abelian at i = {i}, generator count {generators}"),
        AbelianVerdict::Nonabelian(p) => format!("nonabelian, closed pattern {p}"),
        AbelianVerdict::Inconclusive { max_i, cap } => format!("inconclusive up to i = {max_i}, cap {cap}"),
    }
}

fn lower_left_items(m: &Manifests, out: &mut Vec<Section>) -> Result<(), CliError> {
    let file = "lower_left.tml";
    let r = load(file, &m.lower_left)?;
    let t = &r.tower;
    let l = need(r.module("L"), file, "module L")?;
    let mut s = Section::new("lower-left module is nonabelian", Status::Pass);
    let expected = need(r.ore("PhiT2"), file, "ore PhiT2")?;
    compare(
        &mut s,
        "action of T^2",
        ore::format(t, expected),
        ore::format(t, &l.act(&t_power(t, 2))),
    );
    let ones = vec!["1"; DEGREE_RUN].join(", ");
    let found: Vec<String> = degree_sequence(l, DEGREE_RUN).iter().map(usize::to_string).collect();
    compare(&mut s, "tau-degrees of T^1 .. T^20", ones, found.join(", "));
    let verdict = abelian_scan(l, 8, 16).verdict;
    let ok = matches!(verdict, AbelianVerdict::Nonabelian(_));
    s.push("certificate", abelian_text(&verdict));
    s.require(ok);
    out.push(s);
    Ok(())
}

fn abelian_items(carlitz: &Resolved, tensor: &Resolved, out: &mut Vec<Section>) -> Result<(), CliError> {
    let c = need(carlitz.module("C"), "carlitz.tml", "module C")?;
    let cten2 = need(tensor.module("Cten2"), "tensor_square.tml", "module Cten2")?;
    let over = cten2
        .restrict(&t_power(&tensor.tower, 2))
        .map_err(|e| CliError::Compute(e.to_string()))?;
    let mut s = Section::new("abelian certificates", Status::Pass);
    for (name, m) in [("Carlitz module", c), ("tensor square over F_q[T^2]", &over)] {
        let verdict = abelian_scan(m, 8, 16).verdict;
        let ok = matches!(verdict, AbelianVerdict::Abelian { .. });
        s.push(name, abelian_text(&verdict));
        s.require(ok);
    }
    out.push(s);
    Ok(())
}

fn exp_entry(
    s: &mut Section,
    name: &str,
    m: &TModule<Tower>,
    e1: Option<&OreMatrix<TowerElem>>,
) -> Option<ExpSeries<Tower>> {
    let t = m.field();
    match ExpSeries::compute(m, EXP_ORDER) {
        Ok(series) => {
            let ok = series.verify_functional_equation();
            compare(
                s,
                &format!("{name}: functional equation mod tau^{}", EXP_ORDER + 1),
                "holds".into(),
                if ok { "holds" } else { "fails" }.into(),
            );
            if let Some(e1) = e1 {
                let found = series
                    .coeffs()
                    .get(1)
                    .map_or("missing".into(), |x| linalg::format(t, x));
                compare(s, &format!("{name}: E_1"), linalg::format(t, &e1.coeff(t, 0)), found);
            }
            Some(series)
        }
        Err(e) => {
            compare(s, &format!("{name}: series"), "computed".into(), e.to_string());
            None
        }
    }
}

fn exponential_items(
    m: &Manifests,
    carlitz: &Resolved,
    tensor: &Resolved,
    out: &mut Vec<Section>,
) -> Result<(), CliError> {
    let sub = load("sub_module.tml", &m.sub_module)?;
    let c = need(carlitz.module("C"), "carlitz.tml", "module C")?;
    let cten2 = need(tensor.module("Cten2"), "tensor_square.tml", "module Cten2")?;
    let pair = need(sub.module("Pair"), "sub_module.tml", "module Pair")?;
    let axis = need(tensor.subgroup("Axis"), "tensor_square.tml", "subgroup Axis")?;
    let mut s = Section::new(format!("exponential to order {EXP_ORDER}"), Status::Pass);
    exp_entry(
        &mut s,
        "Carlitz module",
        c,
        Some(need(carlitz.ore("E1"), "carlitz.tml", "ore E1")?),
    );
    let series = exp_entry(
        &mut s,
        "tensor square",
        cten2,
        Some(need(tensor.ore("E1"), "tensor_square.tml", "ore E1")?),
    );
    exp_entry(&mut s, "Phi1 x Phi2", pair, None);
    out.push(s);

    let mut s = Section::new("exponential of the tensor square preserves the axis", Status::Pass);
    if let Some(series) = series {
        let found = match series.restriction_check(axis, &t_power(&tensor.tower, 2)) {
            RestrictionCheck::Holds { fixed, free } => format!("rows {fixed:?} x columns {free:?} vanish"),
            RestrictionCheck::Fails { i, row, col } => format!("entry ({row}, {col}) of E_{i} is nonzero"),
            RestrictionCheck::Unchecked(why) => format!("unchecked: {why}"),
        };
        compare(
            &mut s,
            "E_i block for i <= 5",
            "rows [0] x columns [1] vanish".into(),
            found,
        );
    } else {
        compare(&mut s, "E_i block for i <= 5", "series".into(), "not computed".into());
    }
    out.push(s);
    Ok(())
}

pub fn run(m: &Manifests) -> Result<Report, CliError> {
    let mut out = Vec::new();
    sub_module_items(m, &mut out)?;
    let tensor = tensor_items(m, &mut out)?;
    root_curve_items(m, &mut out)?;
    generator_items(&tensor, &mut out)?;
    lower_left_items(m, &mut out)?;
    let carlitz = load("carlitz.tml", &m.carlitz)?;
    abelian_items(&carlitz, &tensor, &mut out)?;
    exponential_items(m, &carlitz, &tensor, &mut out)?;
    Ok(Report::new("paper-corpus", out))
}
