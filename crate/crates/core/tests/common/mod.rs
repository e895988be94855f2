#![allow(dead_code)]

use std::sync::Arc;

use latkit::analysis::{is_atomistic, is_biatomic, is_join_semidistributive};
use latkit::enumerate::{enumerate_lattices, meet_semilattices};
use latkit::generators::{boolean, co_chain, sub_meet_semilattice};
use latkit::geometry::{co_points, PointConfiguration, RationalPoint};
use latkit::FiniteLattice;

pub fn all_up_to(n: usize) -> Vec<FiniteLattice> {
    (1..=n).flat_map(|k| enumerate_lattices(k).unwrap()).collect()
}

pub fn atomistic_jsd_up_to(n: usize) -> Vec<FiniteLattice> {
    all_up_to(n)
        .into_iter()
        .filter(|l| is_atomistic(l) && is_join_semidistributive(l))
        .collect()
}

/// Named generator outputs used beside the enumerated lattices.
pub fn generated() -> Vec<(String, FiniteLattice)> {
    let mut out = Vec::new();
    for n in 0..=3 {
        out.push((format!("boolean({n})"), boolean(n).unwrap()));
    }
    for n in 1..=5 {
        out.push((format!("co_chain({n})"), co_chain(n).unwrap()));
    }
    for k in 1..=4 {
        for (i, p) in meet_semilattices(k).unwrap().iter().enumerate() {
            out.push((format!("sub_meet({k}#{i})"), sub_meet_semilattice(p).unwrap()));
        }
    }
    out.push((
        "co_points(paper5)".into(),
        co_points(&PointConfiguration::paper5()).unwrap(),
    ));
    out
}

/// The corpus of finite atomistic biatomic JSD witnesses.
pub fn biatomic_corpus() -> Vec<(String, FiniteLattice)> {
    generated()
        .into_iter()
        .filter(|(name, _)| !name.starts_with("co_points"))
        .collect()
}

pub fn is_bi_jsd(l: &FiniteLattice) -> bool {
    is_atomistic(l) && is_biatomic(l) && is_join_semidistributive(l)
}

pub fn arc(l: &FiniteLattice) -> Arc<FiniteLattice> {
    Arc::new(l.clone())
}

/// Every meet-closed set containing `0` and the filter of `apex`.
pub fn extension_sets(l: &FiniteLattice, apex: usize) -> Vec<Vec<usize>> {
    let required: Vec<usize> = std::iter::once(l.bottom()).chain(l.filter(apex)).collect();
    let free: Vec<usize> = l.elements().filter(|x| !required.contains(x)).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << free.len() {
        let mut set = required.clone();
        set.extend(
            free.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x),
        );
        set.sort_unstable();
        if l.is_meet_subsemilattice(&set) {
            out.push(set);
        }
    }
    out
}

fn configuration(points: &[(i64, i64)]) -> PointConfiguration {
    PointConfiguration::new(
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                (char::from(b'a' + i as u8).to_string(), RationalPoint::from_ints(x, y))
            })
            .collect(),
    )
    .unwrap()
}

/// Small non-biatomic atomistic JSD lattices (all lower bounded) whose
/// partial biatomization stays small.
pub fn non_biatomic_witnesses() -> Vec<(String, FiniteLattice)> {
    [
        ("triangle+interior", vec![(0, 0), (4, 0), (0, 4), (1, 1)]),
        ("triangle+midpoint+interior", vec![(0, 0), (4, 0), (0, 4), (2, 0), (1, 1)]),
        ("quadrilateral+interior", vec![(0, 0), (4, 0), (0, 4), (3, 3), (1, 1)]),
    ]
    .into_iter()
    .map(|(name, pts)| (name.to_string(), co_points(&configuration(&pts)).unwrap()))
    .collect()
}
