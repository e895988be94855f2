use std::fs;
use std::sync::Arc;

use clap::ValueEnum;
use serde_json::{json, Value};

use latkit::analysis::{
    biatomicity_problems, find_solution, is_atomistic, is_biatomic, is_join_semidistributive,
    is_lower_bounded,
};
use latkit::extend::{
    atom_restriction, biatomic_completion, jsd_extension_criteria, make_extension_pair,
    one_atom_extension, partial_biatomization, trace_jsonl, ExtendError,
};
use latkit::{FiniteLattice, LatticeError, Preserved};

use crate::report::RunReport;
use crate::{input_names, source, LatticeSource};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Op {
    BiatomicCompletion,
    OneAtom,
    Biatomize,
    AtomRestriction,
}

pub struct Params {
    pub op: Op,
    pub apex: Option<String>,
    pub subsemilattice: Option<String>,
    pub element: Option<String>,
    pub out: Option<String>,
    pub trace: Option<String>,
}

enum Failure {
    Usage(String, String),
    Construction(ExtendError),
}

impl From<ExtendError> for Failure {
    fn from(e: ExtendError) -> Self {
        Failure::Construction(e)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::Usage("LatticeError".into(), e.to_string())
    }
}

fn flags(p: Preserved) -> Value {
    json!({"join": p.join, "meet": p.meet, "zero": p.zero, "one": p.one, "atoms": p.atoms})
}

fn lookup(l: &FiniteLattice, label: &str) -> Result<usize, Failure> {
    l.index_of(label)
        .ok_or_else(|| Failure::Usage("UnknownLabel".into(), format!("no element labelled `{label}`")))
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| Failure::Usage("MissingArgument".into(), format!("{flag} is required")))
}

pub fn run(src: &LatticeSource, params: Params) -> (RunReport, u8) {
    let mut rep = RunReport::new("build", input_names(src));
    let input = match source::load_one(src.file(), src.gen()) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return (rep.failed("InvalidInput", format!("{e:#}")), 2);
        }
    };
    let base = Arc::new(input.lattice);
    match construct(&base, &params) {
        Ok((result, mut verdicts, trace)) => {
            eprintln!(
                "{}: {} elements -> {} elements",
                input.name,
                base.len(),
                result.len()
            );
            if let Err(e) = write_outputs(&params, &result, trace.as_deref(), &mut verdicts) {
                eprintln!("error: {e}");
                return (rep.failed("Io", e), 2);
            }
            rep.verdicts = verdicts;
            (rep, 0)
        }
        Err(Failure::Usage(kind, message)) => {
            eprintln!("error: {message}");
            (rep.failed(&kind, message), 2)
        }
        Err(Failure::Construction(e)) => {
            eprintln!("{}: {e}", e.name());
            let code = if e.is_precondition() { 3 } else { 4 };
            (rep.failed(e.name(), e.to_string()), code)
        }
    }
}

fn write_outputs(
    params: &Params,
    result: &FiniteLattice,
    trace: Option<&str>,
    verdicts: &mut Value,
) -> Result<(), String> {
    match &params.out {
        Some(path) => {
            fs::write(path, result.to_json_string() + "\n").map_err(|e| format!("{path}: {e}"))?;
            verdicts["output"] = json!(path);
        }
        None => verdicts["lattice"] = serde_json::to_value(result.to_json()).expect("serializable"),
    }
    if let (Some(path), Some(text)) = (&params.trace, trace) {
        fs::write(path, text).map_err(|e| format!("{path}: {e}"))?;
        verdicts["trace_file"] = json!(path);
    }
    Ok(())
}

/// Splits on commas at bracket depth zero, so `{},{1,2}` is two labels.
fn split_labels(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in list.chars() {
        match c {
            '{' | '[' | '(' => depth += 1,
            '}' | ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(current.trim().to_string());
                current.clear();
                continue;
            }
            _ => {}
        }
        current.push(c);
    }
    out.push(current.trim().to_string());
    out
}

type Built = (Arc<FiniteLattice>, Value, Option<String>);

fn construct(base: &Arc<FiniteLattice>, params: &Params) -> Result<Built, Failure> {
    match params.op {
        Op::BiatomicCompletion => {
            let (m, f) = biatomic_completion(base);
            let verdicts = json!({
                "op": "biatomic-completion",
                "size": m.len(),
                "atomistic": is_atomistic(&m),
                "biatomic": is_biatomic(&m),
                "embedding": flags(f.preserved()),
            });
            Ok((m, verdicts, None))
        }
        Op::OneAtom => {
            let apex = lookup(base, required(&params.apex, "--apex")?)?;
            let labels = split_labels(required(&params.subsemilattice, "--subsemilattice")?);
            let members = labels
                .iter()
                .map(|s| lookup(base, s))
                .collect::<Result<Vec<_>, _>>()?;
            let pair = make_extension_pair(base, apex, &members)?;
            let ext = one_atom_extension(&pair)?;
            let r = &ext.result;
            let criteria = if is_join_semidistributive(base) {
                json!(jsd_extension_criteria(&pair)?.0)
            } else {
                Value::Null
            };
            let verdicts = json!({
                "op": "one-atom",
                "size": r.len(),
                "new_atom": r.label(ext.new_atom),
                "checks": ext.checks,
                "embedding": flags(ext.embedding.preserved()),
                "jsd": is_join_semidistributive(r),
                "jsd_criteria": criteria,
            });
            Ok((ext.result.clone(), verdicts, None))
        }
        Op::Biatomize => {
            let out = partial_biatomization(base)?;
            let r = &out.lattice;
            let problems = biatomicity_problems(base);
            let solved = problems
                .iter()
                .filter(|p| find_solution(r, p.atom, p.a, p.b).is_some())
                .count();
            let mut verdicts = json!({
                "op": "biatomize",
                "size": r.len(),
                "steps": out.trace.len(),
                "problems": problems.len(),
                "problems_solved": solved,
                "atomistic": is_atomistic(r),
                "jsd": is_join_semidistributive(r),
                "biatomic": is_biatomic(r),
                "lower_bounded": is_lower_bounded(r),
                "base_lower_bounded": out.base_lower_bounded,
                "embedding": flags(out.embedding.preserved()),
            });
            if params.trace.is_none() {
                verdicts["trace"] = serde_json::to_value(&out.trace).expect("serializable");
            }
            let text = trace_jsonl(&out.trace);
            Ok((out.lattice.clone(), verdicts, Some(text)))
        }
        Op::AtomRestriction => {
            let a = lookup(base, required(&params.element, "--element")?)?;
            let (t, members) = atom_restriction(base, a);
            let verdicts = json!({
                "op": "atom-restriction",
                "size": t.len(),
                "members": base.labels_of(&members),
                "atoms": t.labels_of(&t.atoms()),
                "atomistic": is_atomistic(&t),
                "biatomic": is_biatomic(&t),
                "jsd": is_join_semidistributive(&t),
            });
            Ok((Arc::new(t), verdicts, None))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::split_labels;

    #[test]
    fn splits_outside_brackets() {
        assert_eq!(split_labels("0, a,1"), vec!["0", "a", "1"]);
        assert_eq!(split_labels("{},{1,2},[1,3]"), vec!["{}", "{1,2}", "[1,3]"]);
    }
}
