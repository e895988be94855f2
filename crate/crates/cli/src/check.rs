use serde_json::{json, Value};

use latkit::analysis::{biatomicity_problems, report, Property};

use crate::report::RunReport;
use crate::{input_names, source, LatticeSource};

enum Request {
    Property(Property),
    Problems,
}

pub fn run(src: &LatticeSource, props: &[String]) -> (RunReport, u8) {
    let rep = RunReport::new("check", input_names(src));
    let mut requests = Vec::new();
    for p in props {
        match p.trim() {
            "problems" => requests.push(Request::Problems),
            name => match name.parse::<Property>() {
                Ok(prop) => requests.push(Request::Property(prop)),
                Err(e) => {
                    eprintln!("error: {e}");
                    return (rep.failed("UnknownProperty", e), 2);
                }
            },
        }
    }
    let inputs = match source::load(src.file(), src.gen()) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return (rep.failed("InvalidInput", format!("{e:#}")), 2);
        }
    };
    let mut results = Vec::new();
    for input in &inputs {
        let l = &input.lattice;
        let mut verdicts = Vec::new();
        let mut summary = Vec::new();
        let mut problems = Value::Null;
        for r in &requests {
            match r {
                Request::Property(p) => {
                    let v = report(l, *p);
                    summary.push(format!("{}={}", v.predicate, v.verdict));
                    verdicts.push(serde_json::to_value(&v).expect("serializable"));
                }
                Request::Problems => {
                    let list = biatomicity_problems(l);
                    let unsolved = list.iter().filter(|p| !p.is_solved()).count();
                    summary.push(format!("problems={} ({unsolved} unsolved)", list.len()));
                    problems = Value::Array(
                        list.iter()
                            .map(|p| {
                                json!({
                                    "problem": [l.label(p.atom), l.label(p.a), l.label(p.b)],
                                    "solution": p.solution.map(|(x, y)| [l.label(x), l.label(y)]),
                                })
                            })
                            .collect(),
                    );
                }
            }
        }
        eprintln!("{} ({} elements): {}", input.name, l.len(), summary.join(" "));
        let mut entry = json!({
            "source": input.name,
            "size": l.len(),
            "verdicts": verdicts,
        });
        if !problems.is_null() {
            entry["problems"] = problems;
        }
        results.push(entry);
    }
    let mut rep = rep;
    rep.verdicts = Value::Array(results);
    (rep, 0)
}
