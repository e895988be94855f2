//! End-to-end acceptance checks A1-A9. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion; exits non-zero on any failure.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use latkit::analysis::{
    biatomicity_problems, find_solution, is_atomistic, is_biatomic, is_biatomic_one_sided,
    is_join_semidistributive, is_lower_bounded, join_dependency, minimal_decomposition,
    DependencyDomain,
};
use latkit::extend::{
    atom_restriction, biatomic_completion, jsd_extension_criteria, make_extension_pair,
    one_atom_extension, partial_biatomization, separating_reembedding, solve_one_problem,
    ExtendError,
};
use latkit::generators::co_chain;
use latkit::geometry::{co_points, PointConfiguration};
use latkit::lattice::verify_embedding;
use latkit::qid::{check_assignment, evaluate, join_semidistributivity, theta};
use latkit::{EmbeddingMap, FiniteLattice};

use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn a1() -> Outcome {
    let mut count = 0;
    for l in all_up_to(6) {
        let l = Arc::new(l);
        let (m, f) = biatomic_completion(&l);
        let non_atoms = l
            .elements()
            .filter(|&x| x != l.bottom() && !l.is_atom(x))
            .count();
        ensure!(m.len() == l.len() + 2 * non_atoms, "size of completion of {l:?}");
        ensure!(is_atomistic(&m) && is_biatomic(&m), "completion of {l:?} not atomistic biatomic");
        let fresh = EmbeddingMap::new(l.clone(), m.clone(), f.map().to_vec())
            .map_err(|e| e.to_string())?;
        let checked = verify_embedding(fresh).map_err(|e| e.to_string())?;
        ensure!(checked.preserved().all(), "embedding flags {:?} for {l:?}", checked.preserved());
        count += 1;
    }
    ensure!(count == 1 + 1 + 1 + 2 + 5 + 15, "expected 25 lattices, saw {count}");
    Ok(format!("{count} lattices of size <= 6"))
}

fn a2() -> Outcome {
    let corpus = biatomic_corpus();
    let mut largest = 0;
    for (name, l) in &corpus {
        ensure!(is_bi_jsd(l), "{name} is not atomistic biatomic JSD");
        let v = evaluate(l, &theta());
        ensure!(v.holds, "theta fails on {name}: {:?}", v.to_json(l, &theta()));
        largest = largest.max(l.len());
    }
    Ok(format!("{} lattices, largest {largest} elements", corpus.len()))
}

fn a3() -> Outcome {
    let config = PointConfiguration::paper5();
    let l = co_points(&config).map_err(|e| e.to_string())?;
    ensure!(is_join_semidistributive(&l), "not JSD");
    ensure!(is_atomistic(&l), "not atomistic");
    ensure!(!is_biatomic(&l), "unexpectedly biatomic");
    let q = theta();
    let v = evaluate(&l, &q);
    ensure!(!v.holds, "theta holds");
    let found = v.counterexample.clone().expect("failing verdict has a counterexample");
    ensure!(check_assignment(&l, &q, &found) == (true, false), "counterexample does not re-check");
    let named: Vec<usize> = ["{a}", "{b}", "{c}", "{u}", "{v}"]
        .iter()
        .map(|s| l.index_of(s).expect("singleton traces are elements"))
        .collect();
    ensure!(check_assignment(&l, &q, &named) == (true, false), "named assignment is not a counterexample");
    ensure!(!l.leq(named[3], named[0]), "u <= a");
    let same = found == named;
    Ok(format!(
        "{} elements; first counterexample {}; named points {}",
        l.len(),
        serde_json::to_string(&v.to_json(&l, &q).counterexample).unwrap(),
        if same { "coincide with it" } else { "also refute theta" }
    ))
}

fn a4() -> Outcome {
    let enumerated = atomistic_jsd_up_to(8);
    let (small, s_jsd) = extension_pairs_agree(&enumerated)?;
    let witness: Vec<FiniteLattice> = non_biatomic_witnesses().into_iter().take(1).map(|(_, l)| l).collect();
    let (extra, e_jsd) = extension_pairs_agree(&witness)?;
    Ok(format!(
        "{small} pairs over lattices of size <= 8 ({s_jsd} JSD); {extra} pairs over a 15-element convex geometry ({e_jsd} JSD); 0 disagreements"
    ))
}

fn extension_pairs_agree(lattices: &[FiniteLattice]) -> Result<(usize, usize), String> {
    let mut pairs = 0;
    let mut jsd = 0;
    for l in lattices {
        let l = arc(l);
        for apex in l.elements().filter(|&x| x != l.bottom() && !l.is_atom(x)) {
            for m in extension_sets(&l, apex) {
                let pair = make_extension_pair(&l, apex, &m).map_err(|e| e.to_string())?;
                let (predicted, _) = jsd_extension_criteria(&pair).map_err(|e| e.to_string())?;
                let ext = one_atom_extension(&pair).map_err(|e| e.to_string())?;
                let actual = is_join_semidistributive(&ext.result);
                ensure!(
                    predicted == actual,
                    "disagreement on {l:?} apex {} M {:?}",
                    l.label(apex),
                    l.labels_of(&m)
                );
                ensure!(ext.result.len() == l.complement_filter(apex).len() + m.len(), "size");
                pairs += 1;
                jsd += actual as usize;
            }
        }
    }
    Ok((pairs, jsd))
}

// Valid triples only exist in non-biatomic lattices, and every atomistic
// JSD lattice with at most 8 elements is biatomic, so the enumerated part is
// checked but contributes nothing; the convex geometries carry the weight.
fn a5() -> Outcome {
    let (small, _) = special_problems_checked(&atomistic_jsd_up_to(8))?;
    let mut witnesses: Vec<FiniteLattice> =
        non_biatomic_witnesses().into_iter().map(|(_, l)| l).collect();
    witnesses.push(co_points(&PointConfiguration::paper5()).unwrap());
    let (triples, lower_bounded) = special_problems_checked(&witnesses)?;
    ensure!(triples > 0, "no valid triples found");
    Ok(format!(
        "{small} triples in lattices of size <= 8; {triples} triples in {} convex geometries ({lower_bounded} with lower bounded base)",
        witnesses.len()
    ))
}

fn special_problems_checked(lattices: &[FiniteLattice]) -> Result<(usize, usize), String> {
    let mut triples = 0;
    let mut lower_bounded_bases = 0;
    for l in lattices {
        let l = arc(l);
        let atoms = l.atoms();
        for &p in &atoms {
            for &q in atoms.iter().filter(|&&q| q != p) {
                for a in l.elements().filter(|&a| a != l.bottom() && !l.is_atom(a)) {
                    let minimal = l.leq(p, l.join(a, q))
                        && !l.down_set(a).ones().any(|x| x != a && l.leq(p, l.join(x, q)));
                    if !minimal {
                        continue;
                    }
                    let solved = solve_one_problem(&l, p, q, a).map_err(|e| {
                        format!("({}, {}, {}) in {l:?}: {e}", l.label(p), l.label(q), l.label(a))
                    })?;
                    let r = &solved.extension.result;
                    let star = solved.extension.new_atom;
                    ensure!(is_join_semidistributive(r), "L[p*] not JSD");
                    ensure!(r.lt(p, r.join(star, q)) && r.lt(star, a), "p* does not solve");
                    let before = join_dependency(&l, DependencyDomain::Atoms);
                    let after = join_dependency(r, DependencyDomain::Atoms);
                    for &x in &atoms {
                        for &y in &atoms {
                            ensure!(
                                before.below_or_equal(x, y) == after.below_or_equal(x, y),
                                "dependency order changed on original atoms"
                            );
                        }
                    }
                    let boundary = minimal_decomposition(&l, a).map_err(|e| e.to_string())?;
                    ensure!(
                        boundary.iter().all(|&u| before.depends(p, u) && after.depends(star, u)),
                        "join dependency on the decomposition of the apex"
                    );
                    let cycle = boundary.iter().any(|&u| before.strictly_below(u, p));
                    ensure!(after.strictly_below(star, star) == cycle, "p* cycle equivalence");
                    if is_lower_bounded(&l) {
                        lower_bounded_bases += 1;
                        ensure!(is_lower_bounded(r), "lower boundedness lost");
                    }
                    triples += 1;
                }
            }
        }
    }
    Ok((triples, lower_bounded_bases))
}

fn a6() -> Outcome {
    let mut inputs: Vec<FiniteLattice> = atomistic_jsd_up_to(7);
    inputs.push(co_chain(4).unwrap());
    let required = inputs.len();
    inputs.extend(non_biatomic_witnesses().into_iter().map(|(_, l)| l));
    let mut largest = 0;
    let mut extended = 0;
    let mut steps = 0;
    for l in &inputs {
        let l = arc(l);
        let out = partial_biatomization(&l).map_err(|e| format!("{l:?}: {e}"))?;
        let r = &out.lattice;
        ensure!(is_atomistic(r) && is_join_semidistributive(r), "output not atomistic JSD");
        for prob in biatomicity_problems(&l) {
            ensure!(
                find_solution(r, prob.atom, prob.a, prob.b).is_some(),
                "{} unsolved",
                prob.describe(&l)
            );
        }
        let f = verify_embedding(
            EmbeddingMap::new(l.clone(), r.clone(), out.embedding.map().to_vec())
                .map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        ensure!(f.preserved().all(), "embedding flags {:?}", f.preserved());
        let before = join_dependency(&l, DependencyDomain::Atoms);
        let after = join_dependency(r, DependencyDomain::Atoms);
        for &x in &l.atoms() {
            for &y in &l.atoms() {
                ensure!(
                    before.below_or_equal(x, y) == after.below_or_equal(f.apply(x), f.apply(y)),
                    "dependency order changed"
                );
            }
        }
        if is_lower_bounded(&l) {
            ensure!(is_lower_bounded(r), "lower boundedness lost");
        }
        largest = largest.max(r.len());
        if !out.trace.is_empty() {
            extended += 1;
            steps += out.trace.len();
        }
    }
    Ok(format!(
        "{required} required inputs plus {} convex geometries; {extended} needed extensions ({steps} steps, largest result {largest})",
        inputs.len() - required
    ))
}

fn a7() -> Outcome {
    let l = co_chain(4).unwrap();
    let verdicts = (
        is_atomistic(&l),
        is_biatomic(&l),
        is_join_semidistributive(&l),
        is_lower_bounded(&l),
    );
    ensure!(verdicts == (true, true, true, false), "verdicts {verdicts:?}");
    let convex = (0u32..16)
        .filter(|&s| s == 0 || (s >> s.trailing_zeros()).count_ones() == 32 - (s >> s.trailing_zeros()).leading_zeros())
        .count();
    ensure!(l.len() == 11 && l.len() == convex, "size {}", l.len());
    Ok("11 elements; atomistic, biatomic, JSD, not lower bounded".into())
}

fn a8() -> Outcome {
    let mut corpus: Vec<FiniteLattice> = biatomic_corpus().into_iter().map(|(_, l)| l).collect();
    corpus.extend(all_up_to(8).into_iter().filter(is_bi_jsd));
    let mut restrictions = 0;
    let mut reembedded = 0;
    let mut refused = 0;
    for m in &corpus {
        for a in m.elements() {
            let (t, members) = atom_restriction(m, a);
            ensure!(is_bi_jsd(&t), "restriction of {m:?} at {} fails", m.label(a));
            let mut at_t: Vec<usize> = t.atoms().iter().map(|&i| members[i]).collect();
            at_t.sort_unstable();
            ensure!(at_t == m.atoms_below(a), "At T differs from the atoms below a");
            restrictions += 1;
        }
        for sub in sublattices(m) {
            let separated = sub.iter().all(|&x| {
                sub.iter().all(|&y| {
                    m.leq(x, y) || m.atoms().iter().any(|&p| m.leq(p, x) && !m.leq(p, y))
                })
            });
            match separating_reembedding(m, &sub) {
                Ok(r) => {
                    ensure!(separated, "re-embedded an unseparated sublattice");
                    ensure!(r.embedding.preserved().lattice(), "not a lattice embedding");
                    reembedded += 1;
                }
                Err(ExtendError::SeparationFailed(..)) => {
                    ensure!(!separated, "refused a separated sublattice");
                    refused += 1;
                }
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(format!(
        "{} lattices, {restrictions} restrictions, {reembedded} re-embeddings, {refused} unseparated",
        corpus.len()
    ))
}

// All sublattices for small lattices; intervals and two-element chains
// otherwise.
fn sublattices(m: &FiniteLattice) -> Vec<Vec<usize>> {
    let n = m.len();
    if n <= 10 {
        return (1u32..1 << n)
            .map(|s| (0..n).filter(|&i| s & (1 << i) != 0).collect::<Vec<_>>())
            .filter(|s| m.is_sublattice(s))
            .collect();
    }
    let mut out = Vec::new();
    for a in m.elements() {
        for b in m.elements().filter(|&b| m.leq(a, b)) {
            out.push(m.interval(a, b).unwrap());
            out.push(if a == b { vec![a] } else { vec![a, b] });
        }
    }
    out
}

fn a9() -> Outcome {
    let mut corpus: Vec<FiniteLattice> = all_up_to(8);
    corpus.extend(generated().into_iter().map(|(_, l)| l));
    let sd = join_semidistributivity();
    for l in &corpus {
        ensure!(is_biatomic(l) == is_biatomic_one_sided(l), "biatomic routes disagree on {l:?}");
        ensure!(
            evaluate(l, &sd).holds == is_join_semidistributive(l),
            "SD quasi-identity disagrees on {l:?}"
        );
    }
    let jsd: Vec<&FiniteLattice> = corpus.iter().filter(|l| is_join_semidistributive(l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut premise_true = 0;
    const SAMPLES: usize = 10_000;
    for _ in 0..SAMPLES {
        let l = jsd[rng.gen_range(0..jsd.len())];
        let atoms = l.atoms();
        let a = rng.gen_range(0..l.len());
        let x: Vec<usize> = atoms.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let y: Vec<usize> = atoms.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let both: Vec<usize> = x.iter().copied().filter(|p| y.contains(p)).collect();
        let ax = l.join(a, l.join_all(x.iter().copied()));
        let ay = l.join(a, l.join_all(y.iter().copied()));
        if ax == ay {
            premise_true += 1;
            ensure!(ax == l.join(a, l.join_all(both)), "atom-set semidistributivity fails in {l:?}");
        }
    }
    Ok(format!(
        "{} lattices; {SAMPLES} samples, {premise_true} with equal joins, 0 violations",
        corpus.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("A1 biatomic completion of every lattice of size <= 6", a1),
        ("A2 theta holds on the atomistic biatomic JSD corpus", a2),
        ("A3 the five-point convex geometry refutes theta", a3),
        ("A4 extension criteria match direct JSD checks", a4),
        ("A5 special problems solved by one-atom extensions", a5),
        ("A6 partial biatomization solves original problems", a6),
        ("A7 order-convex subsets of a 4-chain", a7),
        ("A8 atom restrictions and separating re-embeddings", a8),
        ("A9 oracle cross-checks", a9),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let r = std::panic::catch_unwind(f).unwrap_or_else(|e| {
                        Err(e
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_else(|| "panicked".into()))
                    });
                    (r, start.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for ((name, _), (r, t)) in criteria.iter().zip(&results) {
        match r {
            Ok(detail) => println!("PASS {name}: {detail} [{:.1}s]", t.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{:.1}s]", t.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
