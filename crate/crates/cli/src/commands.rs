use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dpa_core::catalog::Catalog;
use dpa_core::decompile::{decompile, decompile_fuzzy, reference_structure};
use dpa_core::lattice::{enumerate_between, export_dot, hasse, label, node_key, reference_forms, LatticeSpec};
use dpa_core::poly::{check_beta, FKind, LossEquation, WeightMap};
use dpa_core::prefstruct::{count_structures, pref_entails, PreferenceStructure};
use dpa_core::semantics::{compile_equation, fuzzy_expr, fuzzy_loss, fuzzy_text, fuzzy_value, loss_ratio};
use dpa_core::{Error, Result};

use crate::{input, CatalogAction, Cli, Command, Format};

/// Nine significant digits.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn json_num(x: f64) -> Value {
    num(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn structure_text(s: &PreferenceStructure) -> String {
    format!("P  := {}\nPC := {}\nPA := {}\n", s.p(), s.pc(), s.pa())
}

fn structure_value(s: &PreferenceStructure) -> Value {
    serde_json::to_value(s.to_json_value()).expect("structures serialize")
}

fn ratio_text(eq: &LossEquation) -> String {
    format!("log({eq})")
}

pub fn run(cli: &Cli, catalog: &Catalog) -> Result<String> {
    match &cli.command {
        Command::Decompile {
            loss,
            reference,
            fuzzy,
            simplify,
        } => cmd_decompile(cli, catalog, loss, *reference, *fuzzy, *simplify),
        Command::Compile {
            structure,
            f_kind,
            beta,
            fuzzy,
            simplify,
        } => {
            let arg = input::structure(catalog, structure)?;
            let f = f_kind
                .map(FKind::from)
                .or(arg.resolved.and_then(|r| r.f_kind()))
                .unwrap_or_default();
            let fuzzy = *fuzzy || arg.resolved.is_some_and(|r| r.fuzzy());
            cmd_compile(cli, &arg.structure, f, *beta, fuzzy, *simplify)
        }
        Command::Eval {
            structure,
            weights,
            f_kind,
            beta,
            gamma,
            max_gate,
            fuzzy,
            simplify,
        } => {
            let arg = input::structure(catalog, structure)?;
            let mut w = input::weights(weights)?;
            if let Some(entry) = arg.entry() {
                w = entry.prepare_weights(w, *gamma, *max_gate)?;
            }
            let f = f_kind
                .map(FKind::from)
                .or(arg.resolved.and_then(|r| r.f_kind()))
                .unwrap_or_default();
            let fuzzy = *fuzzy || arg.resolved.is_some_and(|r| r.fuzzy());
            cmd_eval(cli, &arg.structure, &w, f, *beta, fuzzy, *simplify)
        }
        Command::Entail { a, b } => {
            let sa = input::structure(catalog, a)?;
            let sb = input::structure(catalog, b)?;
            cmd_entail(cli, (&sa.label, &sa.structure), (&sb.label, &sb.structure))
        }
        Command::Lattice {
            lower,
            upper,
            dot,
            all,
            reference,
        } => {
            let lo = input::structure(catalog, lower)?.structure;
            let hi = input::structure(catalog, upper)?.structure;
            let format = if *dot { Format::Dot } else { cli.format };
            cmd_lattice(catalog, lo, hi, format, !*all, *reference)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => cmd_catalog_list(cli, catalog),
            CatalogAction::Show { name } => cmd_catalog_show(cli, catalog, name),
        },
        Command::Count { n } => {
            let count = count_structures(*n)?;
            Ok(match cli.format {
                Format::Json => pretty(&json!({"atoms": n, "count": count.to_string()})),
                _ => format!("{count}\n"),
            })
        }
        Command::Selfcheck { samples } => cmd_selfcheck(cli, catalog, *samples),
    }
}

fn cmd_decompile(
    cli: &Cli,
    catalog: &Catalog,
    loss: &str,
    reference: bool,
    fuzzy: bool,
    simplify: bool,
) -> Result<String> {
    let (eq, name) = input::equation(catalog, loss)?;
    if fuzzy {
        let s = decompile_fuzzy(&eq, simplify)?;
        return Ok(match cli.format {
            Format::Json => pretty(&json!({"structure": structure_value(&s), "fuzzy": fuzzy_text(s.p().expr())})),
            _ => format!("{}fuzzy: {}\n", structure_text(&s), fuzzy_text(s.p().expr())),
        });
    }
    let d = decompile(&eq)?;
    let mut s = d.structure.clone();
    s.name = name;
    let reference = if reference {
        Some(reference_structure(&d)?.structure)
    } else {
        None
    };
    Ok(match cli.format {
        Format::Json => {
            let mut v = json!({
                "equation": eq.to_string(),
                "structure": structure_value(&s),
                "top_sem": d.top_sem.to_string(),
                "bottom_sem": d.bottom_sem.to_string(),
            });
            if let Some(r) = &reference {
                v["reference"] = structure_value(r);
            }
            pretty(&v)
        }
        _ => {
            let mut out = String::new();
            if let Some(n) = &s.name {
                let _ = writeln!(out, "{n}");
            }
            out.push_str(&structure_text(&s));
            if let Some(r) = &reference {
                out.push_str("reference form:\n");
                out.push_str(&structure_text(r));
            }
            let _ = writeln!(out, "{}", serde_json::to_string(&structure_value(&s)).unwrap());
            out
        }
    })
}

fn cmd_compile(cli: &Cli, s: &PreferenceStructure, f: FKind, beta: f64, fuzzy: bool, simplify: bool) -> Result<String> {
    check_beta(beta)?;
    if fuzzy {
        let expr = fuzzy_expr(s.p(), simplify);
        let loss = format!("-log {}", fuzzy_text(&expr));
        return Ok(match cli.format {
            Format::Json => pretty(&json!({"formula": expr.to_string(), "loss": loss})),
            _ => format!("formula: {expr}\nloss: {loss}\n"),
        });
    }
    let eq = compile_equation(s)?;
    let loss = f.render(&ratio_text(&eq), beta);
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "equation": eq.to_string(),
            "top": eq.top.to_string(),
            "bottom": eq.bottom.to_string(),
            "f": f.name(),
            "beta": beta,
            "loss": loss,
        })),
        _ => format!("equation: {eq}\nloss: {loss}\n"),
    })
}

fn cmd_eval(
    cli: &Cli,
    s: &PreferenceStructure,
    w: &WeightMap,
    f: FKind,
    beta: f64,
    fuzzy: bool,
    simplify: bool,
) -> Result<String> {
    check_beta(beta)?;
    if fuzzy {
        let value = fuzzy_value(s.p(), w, simplify)?;
        let loss = fuzzy_loss(s.p(), w, simplify)?;
        return Ok(match cli.format {
            Format::Json => pretty(&json!({"fuzzy_value": json_num(value), "loss": json_num(loss)})),
            _ => format!("fuzzy value: {}\nloss: {}\n", num(value), num(loss)),
        });
    }
    let rho = loss_ratio(s, w)?;
    let loss = f.apply(rho, beta);
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "rho": json_num(rho),
            "loss": json_num(loss),
            "f": f.name(),
            "beta": beta,
        })),
        _ => format!("rho: {}\nloss: {}\n", num(rho), num(loss)),
    })
}

fn cmd_entail(cli: &Cli, a: (&str, &PreferenceStructure), b: (&str, &PreferenceStructure)) -> Result<String> {
    let forward = pref_entails(a.1, b.1)?;
    let backward = pref_entails(b.1, a.1)?;
    let (relation, line) = match (forward, backward) {
        (true, true) => ("equivalent", format!("{} is equivalent to {}", a.0, b.0)),
        (true, false) => ("entails-strictly", format!("{} strictly entails {}", a.0, b.0)),
        (false, true) => ("entailed-strictly", format!("{} strictly entails {}", b.0, a.0)),
        (false, false) => ("incomparable", format!("{} and {} are incomparable", a.0, b.0)),
    };
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "a": a.0,
            "b": b.0,
            "a_entails_b": forward,
            "b_entails_a": backward,
            "relation": relation,
        })),
        _ => format!("{line}\n"),
    })
}

fn cmd_lattice(
    catalog: &Catalog,
    lower: PreferenceStructure,
    upper: PreferenceStructure,
    format: Format,
    nontrivial: bool,
    reference: bool,
) -> Result<String> {
    let mut spec = LatticeSpec::new(lower, upper);
    spec.nontrivial_only = nontrivial;
    let mut nodes = enumerate_between(&spec)?;
    if reference {
        nodes = reference_forms(&nodes)?;
    }
    let edges = hasse(&nodes)?;
    let labels: Vec<String> = nodes.iter().map(|s| label(s, Some(catalog))).collect();
    Ok(match format {
        Format::Dot => export_dot(&nodes, &edges, Some(catalog))?,
        Format::Json => pretty(&json!({
            "nodes": nodes
                .iter()
                .zip(&labels)
                .map(|(s, l)| json!({"label": l, "key": node_key(s), "structure": structure_value(s)}))
                .collect::<Vec<_>>(),
            "edges": edges.iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "{} structures, {} covering edges", nodes.len(), edges.len());
            for (s, l) in nodes.iter().zip(&labels) {
                let _ = writeln!(out, "{l}\t{}\t{}", node_key(s), s.p());
            }
            for (i, j) in &edges {
                let _ = writeln!(out, "{} -> {}", labels[*i], labels[*j]);
            }
            out
        }
    })
}

fn cmd_catalog_list(cli: &Cli, catalog: &Catalog) -> Result<String> {
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "entries": catalog.entries().iter().map(|e| json!({
                "name": e.name,
                "description": e.description,
                "atoms": e.structure.atoms().len(),
            })).collect::<Vec<_>>(),
            "aliases": catalog.aliases().iter().map(|a| json!({
                "name": a.name,
                "target": a.target,
                "f": a.f_kind.map(FKind::name),
                "fuzzy": a.fuzzy,
            })).collect::<Vec<_>>(),
        })),
        _ => {
            let mut out = String::new();
            for e in catalog.entries() {
                let _ = writeln!(out, "{:<8} {}", e.name, e.description);
            }
            for a in catalog.aliases() {
                let how = match (a.f_kind, a.fuzzy) {
                    (_, true) => "fuzzy".to_string(),
                    (Some(f), false) => f.name().to_string(),
                    (None, false) => "alias".to_string(),
                };
                let _ = writeln!(out, "{:<8} {} with {}", a.name, a.target, how);
            }
            out
        }
    })
}

fn cmd_catalog_show(cli: &Cli, catalog: &Catalog, name: &str) -> Result<String> {
    let resolved = catalog.resolve(name)?;
    let e = resolved.entry;
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "name": e.name,
            "description": e.description,
            "provenance": e.provenance,
            "equation": e.equation.to_string(),
            "equation_given": e.equation_given,
            "structure": structure_value(&e.structure),
            "marks": serde_json::to_value(&e.mark_table).expect("marks serialize"),
            "alias": resolved.alias.map(|a| a.name.clone()),
            "f": resolved.f_kind().map(FKind::name),
            "fuzzy": resolved.fuzzy(),
        })),
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "{}: {}", e.name, e.description);
            if let Some(a) = resolved.alias {
                let _ = writeln!(out, "alias {} of {}", a.name, e.name);
            }
            let _ = writeln!(out, "source: {}", e.provenance);
            let _ = writeln!(out, "equation: {}", e.equation);
            out.push_str(&structure_text(&e.structure));
            let _ = writeln!(out, "{}", e.mark_table);
            out
        }
    })
}

fn cmd_selfcheck(cli: &Cli, catalog: &Catalog, samples: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for entry in catalog.entries() {
        let compiled = compile_equation(&entry.structure)?;
        for _ in 0..samples {
            let w = WeightMap::from_pairs(
                entry
                    .structure
                    .atoms()
                    .iter()
                    .map(|a| (a.clone(), rng.gen_range(0.01..0.99))),
            )?;
            let semantic = loss_ratio(&entry.structure, &w)?;
            for eq in [&entry.equation, &compiled] {
                worst = worst.max((eq.log_ratio(&w)? - semantic).abs());
            }
            checked += 1;
        }
    }
    if worst > 1e-9 {
        return Err(Error::CatalogInvariant {
            name: "selfcheck".into(),
            reason: format!("log-ratio deviation {worst:e} exceeds 1e-9"),
        });
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "entries": catalog.entries().len(),
            "samples": checked,
            "max_deviation": worst,
            "seed": cli.seed,
        })),
        _ => format!(
            "ok: {} entries, {checked} samples, max deviation {worst:e}\n",
            catalog.entries().len()
        ),
    })
}
