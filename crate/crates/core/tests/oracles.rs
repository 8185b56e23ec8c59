//! Fixed input/output pairs with frozen expected values.

mod common;

use common::{atoms, pair};
use dpa_core::catalog::Catalog;
use dpa_core::decompile::{decompile, reference_structure, sem};
use dpa_core::logic::{minimize, parse_expr, parse_formula, Formula};
use dpa_core::poly::{parse_equation, parse_polynomial, reference_transform, FKind, WeightMap};
use dpa_core::prefstruct::{
    count_structures, from_marks, implication_form, is_nontrivial, pref_entails, pref_equivalent, Mark, MarkTable,
    PreferenceStructure,
};
use dpa_core::semantics::{compile_equation, fuzzy_eval, fuzzy_loss, loss_ratio, wmc};
use dpa_core::Error;

fn f(text: &str) -> Formula {
    parse_formula(text, &pair()).unwrap()
}

fn w2(w: f64, l: f64) -> WeightMap {
    WeightMap::from_pairs([("theta:yw".parse().unwrap(), w), ("theta:yl".parse().unwrap(), l)]).unwrap()
}

fn rows(formula: &Formula) -> Vec<String> {
    formula
        .bits()
        .ones()
        .map(|r| dpa_core::logic::TruthTable::row_label(r, 2))
        .collect()
}

fn cat() -> Catalog {
    Catalog::builtin().unwrap()
}

#[test]
fn formula_models() {
    assert_eq!(rows(&f("(implies theta:yl theta:yw)")), ["FF", "TF", "TT"]);
    assert!(f("true").is_tautology());
    assert_eq!(rows(&f("(xor theta:yl theta:yw)")), ["FT", "TF"]);
    assert_eq!(rows(&f("(and theta:yw (not theta:yl))")), ["TF"]);
    assert!(f("false").bits().none());
}

#[test]
fn formula_equivalence_and_entailment() {
    let raw = f("(implies (and theta:yl (not theta:yw)) (and theta:yw (not theta:yl)))");
    assert!(raw.equivalent(&f("(implies theta:yl theta:yw)")).unwrap());
    assert!(!f("theta:yw").equivalent(&f("theta:yl")).unwrap());
    let wide = parse_formula("theta:yw", &atoms(&["theta:yw", "theta:yl", "ref:yw"])).unwrap();
    assert!(f("theta:yw").equivalent(&wide).unwrap());
    assert!(f("(and theta:yw (not theta:yl))")
        .entails(&f("(implies theta:yl theta:yw)"))
        .unwrap());
    assert!(!f("true").entails(&f("theta:yw")).unwrap());
    assert!(f("false").entails(&f("theta:yl")).unwrap());
}

#[test]
fn minimized_forms() {
    let m = |t: &str| minimize(&f(t)).unwrap().to_string();
    assert_eq!(
        m("(or (and theta:yw (not theta:yl)) (and theta:yw theta:yl))"),
        "theta:yw"
    );
    assert_eq!(
        m("(implies (and theta:yl (not theta:yw)) (and theta:yw (not theta:yl)))"),
        "(or (not theta:yl) theta:yw)"
    );
    let xor = minimize(&f("(xor theta:yw theta:yl)")).unwrap();
    assert!(xor.equivalent(&f("(xor theta:yw theta:yl)")).unwrap());
    assert_eq!(xor.to_string().matches("(and").count(), 2);
}

#[test]
fn equations_and_disjointness() {
    let cpo = parse_equation("p(theta,yw) / p(theta,yl)").unwrap();
    assert_eq!(cpo.log_ratio(&w2(0.6, 0.3)).unwrap(), 2f64.ln());
    let orpo = parse_equation("p(theta,yw)*(1 - p(theta,yl)) / (p(theta,yl)*(1 - p(theta,yw)))").unwrap();
    assert!((orpo.log_ratio(&w2(0.6, 0.3)).unwrap() - (0.42f64 / 0.12).ln()).abs() < 1e-12);
    let bad = parse_equation("p(theta,yw) + p(theta,yl) / p(theta,yl)");
    assert!(matches!(bad, Err(Error::NonDisjoint { .. })));
    assert!(parse_polynomial("p(theta,yw) * (1 - p(theta,yl)) + p(theta,yl) * (1 - p(theta,yw))").is_ok());
    let v = parse_polynomial("p(theta,yw) + p(theta,yl)")
        .unwrap()
        .check_disjoint()
        .unwrap_err();
    assert_eq!(v.witness, "theta:yw=T, theta:yl=T");
}

#[test]
fn multilinear_copies() {
    let sq = parse_polynomial("p(theta,yw)^2").unwrap();
    assert_eq!(sq.to_string(), "p(theta,yw) * p(theta,yw,copy 2)");
    let dpop = parse_equation("p(ref,yl) * p(theta,yw)^2 / (p(ref,yw)^2 * p(theta,yl))").unwrap();
    let names: Vec<String> = dpop.atoms().iter().map(|a| a.to_string()).collect();
    assert!(names.contains(&"theta:yw:2".to_string()) && names.contains(&"ref:yw:2".to_string()));
}

#[test]
fn reference_transforms() {
    let w = WeightMap::from_pairs(
        atoms(&["theta:yw", "theta:yl", "ref:yw", "ref:yl"])
            .into_iter()
            .zip([0.6, 0.3, 0.2, 0.5]),
    )
    .unwrap();
    let cpo = reference_transform(&parse_equation("p(theta,yw) / p(theta,yl)").unwrap()).unwrap();
    assert!((cpo.log_ratio(&w).unwrap() - (0.6f64 * 0.5 / (0.2 * 0.3)).ln()).abs() < 1e-12);
    let ce = reference_transform(&parse_equation("p(theta,yw) / (1 - p(theta,yw))").unwrap()).unwrap();
    assert!((ce.log_ratio(&w).unwrap() - (0.6f64 * 0.5 / (0.4 * 0.2)).ln()).abs() < 1e-12);
}

#[test]
fn polynomial_values() {
    let orpo_top = parse_polynomial("p(theta,yw) * (1 - p(theta,yl))").unwrap();
    assert_eq!(orpo_top.eval(&w2(0.5, 0.5)).unwrap(), 0.25);
    assert_eq!(
        parse_polynomial("p(theta,yw)").unwrap().eval(&w2(0.3, 0.9)).unwrap(),
        0.3
    );
}

#[test]
fn structures_and_marks() {
    let c = cat();
    let cpo = c.get("CPO").unwrap().structure.clone();
    let marks = cpo.to_marks();
    let got: Vec<Mark> = ["FF", "FT", "TF", "TT"].iter().map(|r| marks.get(r).unwrap()).collect();
    assert_eq!(got, [Mark::Blank, Mark::Cross, Mark::Check, Mark::Both]);
    let orpo = &c.get("ORPO").unwrap().structure;
    assert_eq!(orpo.check(), f("(and theta:yw (not theta:yl))").bits().clone());
    assert_eq!(orpo.cross(), f("(and theta:yl (not theta:yw))").bits().clone());
    assert!(pref_equivalent(&implication_form(&f("theta:yw"), &f("theta:yl")).unwrap(), &cpo).unwrap());
    let ce = implication_form(&f("theta:yw"), &f("(not theta:yw)")).unwrap();
    let plain = PreferenceStructure::plain(f("theta:yw")).unwrap();
    assert!(pref_equivalent(&ce, &plain).unwrap());

    let uncpo = MarkTable::from_labels(
        pair(),
        &[
            ("TT", Mark::Check),
            ("TF", Mark::Check),
            ("FT", Mark::Cross),
            ("FF", Mark::Check),
        ],
    )
    .unwrap();
    let s = from_marks(&uncpo).unwrap();
    assert_eq!(s.p().to_string(), "(implies theta:yl theta:yw)");
    assert!(s.pc().is_tautology() && s.pa().is_unsatisfiable());
}

#[test]
fn entailment_and_counts() {
    let c = cat();
    let s = |n: &str| c.get(n).unwrap().structure.clone();
    assert!(pref_entails(&s("CPO"), &s("unCPO")).unwrap());
    assert!(!pref_entails(&s("unCPO"), &s("CPO")).unwrap());
    assert!(!pref_entails(&s("CPO"), &s("ORPO")).unwrap());
    assert!(pref_entails(&s("ORPO"), &s("ORPO")).unwrap());
    assert!(is_nontrivial(&s("CPO")));
    let same = implication_form(&f("theta:yw"), &f("theta:yw")).unwrap();
    assert!(!is_nontrivial(&same));
    assert_eq!(count_structures(4).unwrap().to_string(), "4294967296");
    assert_eq!(count_structures(1).unwrap().to_string(), "16");
    assert_eq!(count_structures(2).unwrap().to_string(), "256");
}

#[test]
fn decompilation() {
    let c = cat();
    let s = sem(&parse_polynomial("p(theta,yw) * (1 - p(theta,yl))").unwrap()).unwrap();
    assert_eq!(s.to_string(), "(and theta:yw (not theta:yl))");
    let s = sem(&parse_polynomial("p(theta,yl) * p(theta,yw) + (1 - p(theta,yl))").unwrap()).unwrap();
    assert!(s
        .extend_to(&pair())
        .unwrap()
        .equivalent(&f("(implies theta:yl theta:yw)"))
        .unwrap());
    let d = decompile(&c.get("CPO").unwrap().equation).unwrap();
    assert_eq!(d.structure.p().to_string(), "(implies theta:yl theta:yw)");
    assert_eq!(d.structure.pc().to_string(), "(or theta:yl theta:yw)");
    assert_eq!(d.structure.pa().to_string(), "(and theta:yw theta:yl)");
    let dpo = decompile(&c.get("DPO").unwrap().equation).unwrap();
    assert_eq!(
        dpo.structure.p().to_string(),
        "(implies (and theta:yl ref:yw) (and theta:yw ref:yl))"
    );
    let r = reference_structure(&decompile(&c.get("ORPO").unwrap().equation).unwrap()).unwrap();
    assert_eq!(r.structure.atoms().len(), 4);
}

#[test]
fn semantic_values() {
    let c = cat();
    assert!((wmc(&f("true"), &w2(0.1, 0.2)).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(wmc(&f("theta:yw"), &w2(0.3, 0.2)).unwrap(), 0.3);
    assert_eq!(wmc(&f("(implies theta:yl theta:yw)"), &w2(0.5, 0.5)).unwrap(), 0.75);
    let ratio = |n: &str, w: f64, l: f64| loss_ratio(&c.get(n).unwrap().structure, &w2(w, l)).unwrap();
    assert!((ratio("CPO", 0.6, 0.3) - 2f64.ln()).abs() < 1e-12);
    assert!(ratio("CPO", 0.4, 0.4).abs() < 1e-12);
    assert!((ratio("unCPO", 0.5, 0.5) - 3f64.ln()).abs() < 1e-12);
    assert!((FKind::Log.apply(0.0, 1.0) - 0.5f64.ln().abs()).abs() < 1e-12);
    assert_eq!(FKind::Squared.apply(0.5, 1.0), 0.0);
    assert_eq!(FKind::Margin.apply(2.0, 1.0), 0.0);
}

#[test]
fn compiled_equations() {
    let c = cat();
    let text = |n: &str| compile_equation(&c.get(n).unwrap().structure).unwrap().to_string();
    assert_eq!(
        text("unCPO"),
        "((1 - p(theta,yl)) + p(theta,yw) * p(theta,yl)) / ((1 - p(theta,yw)) * p(theta,yl))"
    );
    let w = w2(0.7, 0.2);
    let value = |n: &str| {
        compile_equation(&c.get(n).unwrap().structure)
            .unwrap()
            .log_ratio(&w)
            .unwrap()
    };
    assert!((value("cCPO") - (0.7f64 / (0.3 * 0.2)).ln()).abs() < 1e-12);
    assert!((value("qfUNL") - (0.8f64 / 0.3).ln()).abs() < 1e-12);
}

#[test]
fn fuzzy_values() {
    let imp = parse_expr("(implies theta:yl theta:yw)").unwrap();
    assert!((fuzzy_eval(&imp, &w2(0.2, 0.4)).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(fuzzy_eval(&imp, &w2(0.6, 0.4)).unwrap(), 1.0);
    assert_eq!(
        fuzzy_eval(&parse_expr("(and theta:yw theta:yl)").unwrap(), &w2(0.5, 0.5)).unwrap(),
        0.25
    );
    let cpo = cat().get("CPO").unwrap().structure.clone();
    assert!((fuzzy_loss(cpo.p(), &w2(0.2, 0.4), false).unwrap() - 2f64.ln()).abs() < 1e-9);
}
