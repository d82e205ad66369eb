//! Versioned JSON reports and plain-text tables. Vertices and mutation
//! sequences are 1-based here, as in documents.

use crate::document::{GramDocument, QuiverDocument, SCHEMA_VERSION};
use crate::explore::{ClassReport, NormalForm, Rank3Classification, Witness};
use crate::quiver::Quiver;
use crate::realization::{Realization, RealizationReport};
use crate::series::{ClosureReport, StandardForm};
use serde_json::{json, Value};
use std::fmt::Write;

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

pub fn quiver_value(q: &Quiver) -> Value {
    serde_json::to_value(QuiverDocument::from_quiver(q)).expect("serializable")
}

pub fn witness_value(w: &Witness) -> Value {
    json!({
        "rule": w.rule.as_str(),
        "path": one_based(&w.path),
        "vertices": one_based(&w.vertices),
        "quiver": quiver_value(&w.quiver),
    })
}

fn class_body(r: &ClassReport) -> Value {
    json!({
        "verdict": r.verdict.as_str(),
        "mod_opposite": r.mod_opposite,
        "size": r.size,
        "highest_denominator": r.highest_denominator,
        "acyclic_members": r.acyclic_members().count(),
        "acyclic_orbit_sizes": r.acyclic_orbits.iter().map(Vec::len).collect::<Vec<_>>(),
        "representatives": r.representatives.iter().map(quiver_value).collect::<Vec<_>>(),
        "infiniteness_witness": r.infiniteness_witness.as_ref().map(witness_value),
        "components": r.components.iter().map(class_body).collect::<Vec<_>>(),
    })
}

pub fn class_report_value(r: &ClassReport) -> Value {
    let mut v = class_body(r);
    v["schema_version"] = json!(SCHEMA_VERSION);
    v
}

pub fn class_report_text(r: &ClassReport) -> String {
    let mut s = String::new();
    writeln!(s, "verdict: {}", r.verdict.as_str()).unwrap();
    writeln!(s, "size: {}", r.size).unwrap();
    if let Some(d) = r.highest_denominator {
        writeln!(s, "highest denominator: {d}").unwrap();
    }
    if !r.acyclic_orbits.is_empty() {
        let sizes: Vec<String> = r.acyclic_orbits.iter().map(|o| o.len().to_string()).collect();
        writeln!(s, "acyclic orbits: {} ({})", r.acyclic_orbits.len(), sizes.join(", ")).unwrap();
    }
    if let Some(w) = &r.infiniteness_witness {
        writeln!(s, "witness: rule {} on vertices {:?} after mutations {:?}", w.rule.as_str(), one_based(&w.vertices), one_based(&w.path))
            .unwrap();
    }
    for (t, c) in r.components.iter().enumerate() {
        writeln!(s, "component {}: {} of size {}", t + 1, c.verdict.as_str(), c.size).unwrap();
    }
    s
}

pub fn rank3_value(c: &Rank3Classification) -> Value {
    let body = match c {
        Rank3Classification::Finite { normal_form, path } => {
            let nf = match normal_form {
                NormalForm::Disconnected => json!({"kind": "disconnected"}),
                NormalForm::Markov => json!({"kind": "markov"}),
                NormalForm::DoubleArrow { d } => json!({"kind": "double_arrow", "d": d}),
                NormalForm::Path { labels } => json!({"kind": "path", "labels": labels.iter().map(|l| l.to_string()).collect::<Vec<_>>()}),
            };
            json!({"verdict": "finite", "normal_form": nf, "path": one_based(path)})
        }
        Rank3Classification::Infinite(w) => json!({"verdict": "infinite", "witness": witness_value(w)}),
    };
    let mut v = body;
    v["schema_version"] = json!(SCHEMA_VERSION);
    v
}

pub fn standard_form_value(sf: &StandardForm) -> Value {
    json!({
        "family": sf.family.as_str(),
        "n": sf.n,
        "d": sf.d(),
        "k": sf.k, "q": sf.q, "m": sf.m, "s": sf.s,
        "primitive": sf.is_primitive(),
    })
}

pub fn closure_value(r: &ClosureReport) -> Value {
    let pairs = |v: &[(StandardForm, usize)]| -> Vec<Value> {
        v.iter().map(|(sf, k)| json!({"tuple": standard_form_value(sf), "vertex": k + 1})).collect()
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "family": r.family.as_str(),
        "n": r.n,
        "tuples": r.tuples,
        "non_primitive": r.non_primitive,
        "invalid_images": pairs(&r.invalid_images),
        "mismatches": pairs(&r.mismatches),
        "matrix_checked": r.matrix_checked,
        "class_size": r.class_size,
        "realized_forms": r.realized_forms,
        "holds": r.holds(),
    })
}

pub fn realization_value(r: &RealizationReport, gram: &Realization) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "holds": r.holds(),
        "class_size": r.class_size,
        "pairs": r.pairs,
        "corank": r.corank,
        "corank_constant": r.corank_constant,
        "exhausted": r.exhausted,
        "start": quiver_value(&r.start),
        "start_path": one_based(&r.start_path),
        "start_gram": serde_json::to_value(GramDocument::from_realization(gram, r.start.ambient())).expect("serializable"),
        "violations": r.violations.iter().map(|v| json!({
            "path": one_based(&v.path),
            "compatible": v.compatible,
            "admissible": v.admissible,
        })).collect::<Vec<_>>(),
    })
}

/// One line per arrow: tail, head, label (or approximate weight).
pub fn label_table(q: &Quiver) -> String {
    let mut s = String::from("from  to  label      weight\n");
    for (i, j) in q.arrows() {
        let w = q.entry(i, j);
        let label = w.to_label().map_or_else(|| "-".to_string(), |l| l.to_string());
        writeln!(s, "{:>4}  {:>2}  {:<9}  {:.6}", i + 1, j + 1, label, w.approx()).unwrap();
    }
    s
}
