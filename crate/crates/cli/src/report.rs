//! Report assembly and rendering. JSON is the source; CSV and text are
//! rendered from the JSON value and never recomputed.

use serde_json::{json, Value};

use crate::config::Format;

/// Version of the report layout; bump on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

/// Key of the section excluded from reproducibility comparisons.
pub const RUNTIME_KEY: &str = "runtime";

/// Everything in a report except the runtime section.
pub fn body(command: &str, input: Value, config: Value, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "input": input,
        "config": config,
        "result": result,
    })
}

pub fn with_runtime(mut body: Value, runtime: Value) -> Value {
    body.as_object_mut().expect("report body is an object").insert(RUNTIME_KEY.into(), runtime);
    body
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("JSON value serializes") + "\n",
        Format::Csv => csv(report),
        Format::Text => text(report),
    }
}

fn command(report: &Value) -> &str {
    report["command"].as_str().unwrap_or_default()
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_table(rows: &[Vec<Value>]) -> String {
    let mut out = "n\\m".to_string();
    let width = rows.first().map_or(0, Vec::len);
    for m in 0..width {
        out += &format!(",{m}");
    }
    out.push('\n');
    for (n, row) in rows.iter().enumerate() {
        out += &n.to_string();
        for x in row {
            out += &format!(",{}", scalar(x));
        }
        out.push('\n');
    }
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn table_rows(result: &Value) -> Vec<Vec<Value>> {
    result["table"]["rows"]
        .as_array()
        .map(|rows| rows.iter().map(|r| r.as_array().cloned().unwrap_or_default()).collect())
        .unwrap_or_default()
}

fn criteria_rows(side: &str, criteria: &Value) -> Vec<String> {
    criteria
        .as_array()
        .map(|cs| {
            cs.iter()
                .map(|c| format!("{side},{},{}", scalar(&c["id"]), scalar(&c["pass"])))
                .collect()
        })
        .unwrap_or_default()
}

fn csv(report: &Value) -> String {
    let r = &report["result"];
    match command(report) {
        "betti" => csv_table(&table_rows(r)),
        "check" => {
            let mut lines = vec!["side,criterion,pass".to_string()];
            for side in ["ring", "coring"] {
                lines.extend(criteria_rows(side, &r[side]["criteria"]));
                lines.extend(criteria_rows(&format!("{side}-consistency"), &r[side]["consistency"]));
            }
            if let Value::Object(d) = &r["duality"] {
                lines.extend(d.iter().map(|(k, v)| format!("duality,{k},{}", scalar(v))));
            }
            lines.join("\n") + "\n"
        }
        "shriek" => {
            let mut lines = vec!["name,relation".to_string()];
            for rel in r["relations"].as_array().into_iter().flatten() {
                lines.push(format!("{},{}", csv_field(&scalar(&rel["name"])), csv_field(&scalar(&rel["relation"]))));
            }
            lines.join("\n") + "\n"
        }
        "corpus" => {
            let cols = ["index", "elements", "covers", "length", "ring_verdict", "coring_verdict", "witness_weight", "agree"];
            let mut lines = vec![cols.join(",")];
            for row in r["rows"].as_array().into_iter().flatten() {
                lines.push(cols.iter().map(|c| scalar(&row[*c])).collect::<Vec<_>>().join(","));
            }
            lines.join("\n") + "\n"
        }
        _ => {
            let mut pairs = Vec::new();
            flatten("", r, &mut pairs);
            let mut out = "key,value\n".to_string();
            for (k, v) in pairs {
                out += &format!("{},{}\n", csv_field(&k), csv_field(&v));
            }
            out
        }
    }
}

fn passes(criteria: &Value) -> String {
    criteria
        .as_array()
        .map(|cs| {
            cs.iter()
                .map(|c| format!("{} {}", scalar(&c["id"]), if c["pass"] == true { "pass" } else { "fail" }))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .unwrap_or_default()
}

fn text_table(rows: &[Vec<Value>]) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(scalar).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(2);
    let mut out = format!("{:>4}", "n\\m");
    for m in 0..cells.first().map_or(0, Vec::len) {
        out += &format!(" {m:>width$}");
    }
    out.push('\n');
    for (n, row) in cells.iter().enumerate() {
        out += &format!("{n:>4}");
        for x in row {
            out += &format!(" {x:>width$}");
        }
        out.push('\n');
    }
    out
}

fn text(report: &Value) -> String {
    let r = &report["result"];
    let mut out = String::new();
    if let Some(d) = report["input"]["digest"].as_str() {
        out += &format!("input: {}\n", &d[..12.min(d.len())]);
    }
    match command(report) {
        "check" => {
            out += &match (r["verdict"].as_bool(), &r["witness_weight"]) {
                (Some(true), _) => "verdict: Koszul\n".to_string(),
                (_, w) => format!("verdict: not Koszul (witness weight {})\n", scalar(w)),
            };
            out += &format!(
                "weights checked: 1..={}{}\n",
                scalar(&r["m_bound_used"]),
                if r["sound"] == true { " (sound)" } else { " (truncated)" }
            );
            for side in ["ring", "coring"] {
                out += &format!("{side} criteria: {}\n", passes(&r[side]["criteria"]));
                out += &format!("{side} consistency: {}\n", passes(&r[side]["consistency"]));
            }
            if let Value::Object(d) = &r["duality"] {
                for (k, v) in d {
                    out += &format!("duality {k}: {}\n", scalar(v));
                }
            }
            let diag: Vec<String> = r["ring"]["betti"]["rows"]
                .as_array()
                .into_iter()
                .flatten()
                .enumerate()
                .map(|(n, row)| scalar(&row[n]))
                .collect();
            out += &format!("Tor diagonal: {}\n", diag.join(", "));
        }
        "betti" => {
            out += &format!("{} Betti table up to weight {}\n", scalar(&r["side"]), scalar(&r["m_max"]));
            out += &text_table(&table_rows(r));
        }
        "shriek" => {
            out += &format!("generators: {}\n", r["generators"].as_array().map_or(0, Vec::len));
            for rel in r["relations"].as_array().into_iter().flatten() {
                out += &format!("{} = {}\n", scalar(&rel["name"]), scalar(&rel["relation"]));
            }
            out += &format!("T(V)/I_P dims: {}\n", r["zeta_ring_dims"]);
        }
        "dual" => {
            out += &format!(
                "dual ≅ incidence coring: {}\n",
                r["left_dual_of_ring_is_incidence_coring"] == true && r["right_dual_of_ring_is_incidence_coring"] == true
            );
            out += &format!(
                "dual ≅ incidence ring: {}\n",
                r["left_dual_of_coring_is_incidence_ring"] == true && r["right_dual_of_coring_is_incidence_ring"] == true
            );
            out += &format!("χ isomorphism: {}\n", scalar(&r["chi_isomorphism"]));
            out += &format!(
                "double duals: ring {}, coring {}\n",
                scalar(&r["double_dual_ring"]),
                scalar(&r["double_dual_coring"])
            );
        }
        "corpus" => {
            for row in r["rows"].as_array().into_iter().flatten() {
                out += &format!(
                    "#{:<4} elements {} length {} koszul {} agree {}\n",
                    scalar(&row["index"]),
                    scalar(&row["elements"]),
                    scalar(&row["length"]),
                    scalar(&row["ring_verdict"]),
                    scalar(&row["agree"])
                );
            }
            out += &format!(
                "posets: {}, Koszul: {}, agreement = {}%\n",
                scalar(&r["posets"]),
                scalar(&r["koszul"]),
                scalar(&r["agreement_percent"])
            );
        }
        _ => {}
    }
    for w in r["warnings"].as_array().into_iter().flatten() {
        out += &format!("warning: {}\n", scalar(w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

/// The report without its runtime section, for reproducibility comparisons.
fn without_runtime(report: &Value) -> Value {
    let mut map: serde_json::Map<String, Value> = report.as_object().cloned().unwrap_or_default();
    map.remove(RUNTIME_KEY);
    Value::Object(map)
}

    #[test]
    fn csv_quoting_and_tables() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
        let rows = vec![vec![json!(2), json!(0)], vec![json!(0), json!(1)]];
        assert_eq!(csv_table(&rows), "n\\m,0,1\n0,2,0\n1,0,1\n");
    }

    #[test]
    fn runtime_is_segregated() {
        let b = body("dual", json!({}), json!({}), json!({ "dims": [1] }));
        let full = with_runtime(b.clone(), json!({ "total_ms": 3 }));
        assert_eq!(without_runtime(&full), b);
    }
}
