//! The subcommands. Each returns the result section of a report as JSON.

use anyhow::{Context, Result};
use koszul_core::duality::{
    double_dual_check, double_dual_check_coring, double_dual_pair_check, dual_pair, graded_left_dual_of_coring,
    graded_left_dual_of_ring, graded_right_dual_of_coring, graded_right_dual_of_ring,
};
use koszul_core::graded::{shriek_of_coring, shriek_of_ring};
use koszul_core::homology::{ext_table, tor_table};
use koszul_core::koszul::{make_pair_shriek_ring, pair_exactness, KoszulSide};
use koszul_core::poset::zeta_relations;
use koszul_core::{
    decide_koszul_coring, decide_koszul_ring, enumerate_corpus, incidence_coring, incidence_duality_check,
    incidence_ring, zeta_ring, Error, FieldSpec, GradedPoset, Label,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Side {
    Ring,
    Coring,
}

fn warnings(field: FieldSpec) -> Vec<String> {
    match field {
        FieldSpec::Rationals => Vec::new(),
        FieldSpec::PrimeField(p) => vec![format!(
            "computed over F_{p}: Koszulity of posets can depend on the characteristic"
        )],
    }
}

fn disagreement(what: String) -> anyhow::Error {
    Error::CriteriaDisagreement(what).into()
}

/// Both decisions, the duality checks, and their agreement.
pub fn check(p: &GradedPoset, cfg: &RunConfig) -> Result<Value> {
    let field = cfg.field.0;
    let a = incidence_ring(p, field)?;
    let c = incidence_coring(p, field)?;
    let (ring, coring) = rayon::join(|| decide_koszul_ring(&a), || decide_koszul_coring(&c));
    let (ring, coring) = (ring.context("deciding the incidence ring")?, coring.context("deciding the incidence coring")?);
    if ring.verdict != coring.verdict {
        return Err(disagreement(format!(
            "incidence ring verdict {} but incidence coring verdict {}",
            ring.verdict, coring.verdict
        )));
    }
    let pair = make_pair_shriek_ring(&a)?;
    let dual = dual_pair(&pair)?;
    let dual_koszul = pair_exactness(&dual, KoszulSide::Left)?.koszul;
    if dual_koszul != ring.verdict {
        return Err(disagreement(format!(
            "pair verdict {} but dual pair verdict {dual_koszul}",
            ring.verdict
        )));
    }
    Ok(json!({
        "verdict": ring.verdict,
        "witness_weight": ring.witness_weight,
        "m_bound_used": ring.m_bound_used,
        "sound": ring.sound && coring.sound,
        "ring": ring,
        "coring": coring,
        "duality": {
            "chi_isomorphism": incidence_duality_check(p, field)?,
            "double_dual_ring": double_dual_check(&a)?,
            "double_dual_coring": double_dual_check_coring(&c)?,
            "dual_pair_almost_koszul": true,
            "dual_pair_koszul": dual_koszul,
            "double_dual_pair": double_dual_pair_check(&pair)?,
        },
        "warnings": warnings(field),
    }))
}

/// The Betti table of one side up to the chosen weight.
pub fn betti(p: &GradedPoset, side: Side, cfg: &RunConfig) -> Result<Value> {
    let field = cfg.field.0;
    let m_max = cfg.max_weight.resolve(2 * p.max_length());
    let table = match side {
        Side::Ring => tor_table(&incidence_ring(p, field)?, m_max, m_max)?,
        Side::Coring => ext_table(&incidence_coring(p, field)?, m_max, m_max)?,
    };
    Ok(json!({
        "side": match side { Side::Ring => "ring", Side::Coring => "coring" },
        "m_max": m_max,
        "diagonal": table.diagonal(),
        "diagonal_only": table.is_diagonal(),
        "table": table,
        "warnings": warnings(field),
    }))
}

fn render_combination(terms: &[(Label, Label)]) -> String {
    terms.iter().map(|(a, b)| format!("{a}⊗{b}")).collect::<Vec<_>>().join(" + ")
}

/// The ζ-presentation of the shriek ring and the dimensions of both shriek structures.
pub fn shriek(p: &GradedPoset, cfg: &RunConfig) -> Result<Value> {
    let field = cfg.field.0;
    let generators: Vec<String> = p.intervals(1).into_iter().map(|(x, y)| p.interval_label(x, y).to_string()).collect();
    let relations: Vec<Value> = zeta_relations(p)
        .into_iter()
        .map(|((x, y), terms)| {
            json!({
                "interval": [p.elements()[x], p.elements()[y]],
                "name": format!("ζ[{},{}]", p.elements()[x], p.elements()[y]),
                "relation": render_combination(&terms),
            })
        })
        .collect();
    let zeta = zeta_ring(p, field)?;
    Ok(json!({
        "generators": generators,
        "relations": relations,
        "zeta_ring_dims": zeta.dims(),
        "shriek_ring_of_coring_dims": shriek_of_coring(&incidence_coring(p, field)?)?.dims(),
        "shriek_coring_of_ring_dims": shriek_of_ring(&incidence_ring(p, field)?)?.dims(),
        "warnings": warnings(field),
    }))
}

/// Graded duals of the incidence structures compared with their counterparts.
pub fn dual(p: &GradedPoset, cfg: &RunConfig) -> Result<Value> {
    let field = cfg.field.0;
    let a = incidence_ring(p, field)?;
    let c = incidence_coring(p, field)?;
    Ok(json!({
        "left_dual_of_ring_is_incidence_coring": c.same_structure(&graded_left_dual_of_ring(&a)?, Label::dual),
        "right_dual_of_ring_is_incidence_coring": c.same_structure(&graded_right_dual_of_ring(&a)?, Label::dual),
        "left_dual_of_coring_is_incidence_ring": a.same_structure(&graded_left_dual_of_coring(&c)?, Label::dual),
        "right_dual_of_coring_is_incidence_ring": a.same_structure(&graded_right_dual_of_coring(&c)?, Label::dual),
        "chi_isomorphism": incidence_duality_check(p, field)?,
        "double_dual_ring": double_dual_check(&a)?,
        "double_dual_coring": double_dual_check_coring(&c)?,
        "dims": a.dims(),
        "warnings": warnings(field),
    }))
}

/// Verdicts on both sides for every poset in the bounds.
pub fn corpus(max_elements: usize, max_length: Option<usize>, cfg: &RunConfig) -> Result<Value> {
    let field = cfg.field.0;
    let posets = enumerate_corpus(max_elements, max_length);
    let rows: Vec<Value> = posets
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<Value> {
            let ring = decide_koszul_ring(&incidence_ring(p, field)?)?;
            let coring = decide_koszul_coring(&incidence_coring(p, field)?)?;
            Ok(json!({
                "index": i,
                "elements": p.len(),
                "covers": p.covers().len(),
                "length": p.max_length(),
                "ring_verdict": ring.verdict,
                "coring_verdict": coring.verdict,
                "witness_weight": ring.witness_weight,
                "agree": ring.verdict == coring.verdict,
                "poset": p.to_document(),
            }))
        })
        .collect::<Result<_>>()?;
    let agreeing = rows.iter().filter(|r| r["agree"] == true).count();
    let koszul = rows.iter().filter(|r| r["ring_verdict"] == true).count();
    if agreeing != rows.len() {
        return Err(disagreement(format!(
            "ring and coring verdicts differ on {} of {} posets",
            rows.len() - agreeing,
            rows.len()
        )));
    }
    Ok(json!({
        "max_elements": max_elements,
        "max_length": max_length,
        "posets": rows.len(),
        "koszul": koszul,
        "agreement_percent": if rows.is_empty() { 100.0 } else { 100.0 * agreeing as f64 / rows.len() as f64 },
        "rows": rows,
        "warnings": warnings(field),
    }))
}
