use std::fs;

use serde_json::{json, Value};

use latkit::qid::{evaluate, join_semidistributivity, parse_qid, theta, QuasiIdentity};

use crate::report::RunReport;
use crate::{input_names, source, LatticeSource};

fn load_qid(spec: &str) -> Result<QuasiIdentity, (String, String)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return match name {
            "theta" => Ok(theta()),
            "sd" | "jsd" => Ok(join_semidistributivity()),
            other => Err(("UnknownBuiltin".into(), format!("no built-in quasi-identity `{other}`"))),
        };
    }
    let text = match spec.strip_prefix("file:") {
        Some(path) => fs::read_to_string(path).map_err(|e| ("Io".to_string(), format!("{path}: {e}")))?,
        None => spec.to_string(),
    };
    parse_qid(text.trim()).map_err(|e| {
        let kind = match e {
            latkit::qid::QidError::Syntax { .. } => "SyntaxError",
            latkit::qid::QidError::UndeclaredVariable { .. } => "UndeclaredVariable",
            latkit::qid::QidError::DuplicateVariable(_) => "DuplicateVariable",
        };
        (kind.to_string(), e.to_string())
    })
}

pub fn run(src: &LatticeSource, qid: &str) -> (RunReport, u8) {
    let mut inputs_named = input_names(src);
    inputs_named.push(format!("qid:{qid}"));
    let mut rep = RunReport::new("eval", inputs_named);
    let q = match load_qid(qid) {
        Ok(q) => q,
        Err((kind, message)) => {
            eprintln!("error: {message}");
            return (rep.failed(&kind, message), 2);
        }
    };
    let inputs = match source::load(src.file(), src.gen()) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return (rep.failed("InvalidInput", format!("{e:#}")), 2);
        }
    };
    let mut all_hold = true;
    let mut results = Vec::new();
    for input in &inputs {
        let v = evaluate(&input.lattice, &q);
        all_hold &= v.holds;
        let shown = v.to_json(&input.lattice, &q);
        match &shown.counterexample {
            None => eprintln!("{}: holds ({} assignments)", input.name, v.assignments_checked),
            Some(c) => {
                let parts: Vec<String> = q.variables.iter().map(|x| format!("{x}={}", c[x])).collect();
                eprintln!("{}: fails at {}", input.name, parts.join(" "));
            }
        }
        results.push(json!({"source": input.name, "verdict": shown}));
    }
    rep.verdicts = json!({
        "qid": q.to_string(),
        "holds": all_hold,
        "results": Value::Array(results),
    });
    (rep, if all_hold { 0 } else { 1 })
}
