//! Structural predicates on finite lattices: atomisticity, biatomicity,
//! join-semidistributivity, the join-dependency relation and lower
//! boundedness, minimal decompositions and atom lengths.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::FiniteLattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no least decomposition of {0}: extreme-atom and join-prime characterizations disagree")]
    NoLeastDecomposition(String),
}

/// Finite lattices are always atomic; kept for symmetry with the other
/// predicates and for the singleton case.
pub fn is_atomic(l: &FiniteLattice) -> bool {
    l.elements()
        .filter(|&x| x != l.bottom())
        .all(|x| !l.atoms_below(x).is_empty())
}

/// First element that is not the join of the atoms below it.
pub fn atomistic_violation(l: &FiniteLattice) -> Option<usize> {
    l.elements().find(|&x| l.join_all(l.atoms_below(x)) != x)
}

pub fn is_atomistic(l: &FiniteLattice) -> bool {
    atomistic_violation(l).is_none()
}

/// Atoms `x <= a`, `y <= b` with `p <= x v y`, if any.
pub fn find_solution(l: &FiniteLattice, p: usize, a: usize, b: usize) -> Option<(usize, usize)> {
    let below_b = l.atoms_below(b);
    l.atoms_below(a).into_iter().find_map(|x| {
        below_b
            .iter()
            .find(|&&y| l.leq(p, l.join(x, y)))
            .map(|&y| (x, y))
    })
}

/// Instance `p <= a v b` (p an atom, a and b nonzero) without an atomic
/// solution, checked straight from the definition.
pub fn biatomic_violation(l: &FiniteLattice) -> Option<(usize, usize, usize)> {
    let zero = l.bottom();
    for p in l.atoms() {
        for a in l.elements().filter(|&a| a != zero) {
            for b in l.elements().filter(|&b| b != zero) {
                if l.leq(p, l.join(a, b)) && find_solution(l, p, a, b).is_none() {
                    return Some((p, a, b));
                }
            }
        }
    }
    None
}

/// Biatomicity by definition: atomic, and every `p <= a v b` has atoms
/// `x <= a`, `y <= b` with `p <= x v y`.
pub fn is_biatomic(l: &FiniteLattice) -> bool {
    is_atomic(l) && biatomic_violation(l).is_none()
}

/// Biatomicity via the one-sided criterion: for `p <= a v b` with `p` below
/// neither, some atom `q <= a` has `p <= q v b`.
pub fn is_biatomic_one_sided(l: &FiniteLattice) -> bool {
    if !is_atomic(l) {
        return false;
    }
    let zero = l.bottom();
    l.atoms().into_iter().all(|p| {
        l.elements().filter(|&a| a != zero && !l.leq(p, a)).all(|a| {
            l.elements()
                .filter(|&b| b != zero && !l.leq(p, b) && l.leq(p, l.join(a, b)))
                .all(|b| l.atoms_below(a).into_iter().any(|q| l.leq(p, l.join(q, b))))
        })
    })
}

/// A triple with `x v y = x v z` but `x v y != x v (y ^ z)`.
pub fn jsd_violation(l: &FiniteLattice) -> Option<(usize, usize, usize)> {
    for x in l.elements() {
        for y in l.elements() {
            let xy = l.join(x, y);
            for z in (y + 1)..l.len() {
                if xy == l.join(x, z) && xy != l.join(x, l.meet(y, z)) {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

pub fn is_join_semidistributive(l: &FiniteLattice) -> bool {
    jsd_violation(l).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DependencyDomain {
    Atoms,
    JoinIrreducibles,
}

/// The join-dependency relation `D` on atoms or join-irreducibles, with its
/// reflexive variant and both transitive closures.
///
/// `x D y` iff `x != y` and some `u` has `x <= y v u` while `x` is not below
/// `y_* v u`, where `y_*` is the unique lower cover of `y` (the bottom, for
/// atoms).
#[derive(Debug, Clone)]
pub struct DependencyRelation {
    domain: DependencyDomain,
    elements: Vec<usize>,
    position: Vec<Option<usize>>,
    d: Vec<FixedBitSet>,
    witness: HashMap<(usize, usize), usize>,
    d_bar: Vec<FixedBitSet>,
    strict_tc: Vec<FixedBitSet>,
    refl_tc: Vec<FixedBitSet>,
}

fn compose(r: &[FixedBitSet], s: &[FixedBitSet]) -> Vec<FixedBitSet> {
    r.iter()
        .map(|row| {
            let mut out = FixedBitSet::with_capacity(row.len());
            for j in row.ones() {
                out.union_with(&s[j]);
            }
            out
        })
        .collect()
}

/// Transitive closure by repeated squaring `R <- R u R.R`.
fn transitive_closure(rel: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let mut r = rel.to_vec();
    loop {
        let sq = compose(&r, &r);
        let mut changed = false;
        for (row, extra) in r.iter_mut().zip(sq) {
            if !extra.is_subset(row) {
                row.union_with(&extra);
                changed = true;
            }
        }
        if !changed {
            return r;
        }
    }
}

fn with_diagonal(rel: &[FixedBitSet]) -> Vec<FixedBitSet> {
    rel.iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.insert(i);
            row
        })
        .collect()
}

impl DependencyRelation {
    pub fn domain(&self) -> DependencyDomain {
        self.domain
    }

    /// Lattice elements the relation lives on, in index order.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    fn pos(&self, x: usize) -> Option<usize> {
        self.position.get(x).copied().flatten()
    }

    fn get(&self, m: &[FixedBitSet], x: usize, y: usize) -> bool {
        match (self.pos(x), self.pos(y)) {
            (Some(i), Some(j)) => m[i].contains(j),
            _ => false,
        }
    }

    /// `x D y`.
    pub fn depends(&self, x: usize, y: usize) -> bool {
        self.get(&self.d, x, y)
    }

    /// `x D y` or `x = y` (both in the domain).
    pub fn depends_or_equal(&self, x: usize, y: usize) -> bool {
        self.get(&self.d_bar, x, y)
    }

    /// Transitive closure of `D`.
    pub fn strictly_below(&self, x: usize, y: usize) -> bool {
        self.get(&self.strict_tc, x, y)
    }

    /// Reflexive-transitive closure of `D`.
    pub fn below_or_equal(&self, x: usize, y: usize) -> bool {
        self.get(&self.refl_tc, x, y)
    }

    /// The element `u` recorded for `x D y`.
    pub fn witness(&self, x: usize, y: usize) -> Option<usize> {
        let (i, j) = (self.pos(x)?, self.pos(y)?);
        self.witness.get(&(i, j)).copied()
    }

    /// An element `x` with `x D ... D x`, if the relation has a cycle.
    pub fn cycle_element(&self) -> Option<usize> {
        (0..self.elements.len())
            .find(|&i| self.strict_tc[i].contains(i))
            .map(|i| self.elements[i])
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.d.iter().enumerate() {
            for j in row.ones() {
                out.push((self.elements[i], self.elements[j]));
            }
        }
        out
    }
}

pub fn join_dependency(l: &FiniteLattice, domain: DependencyDomain) -> DependencyRelation {
    let elements = match domain {
        DependencyDomain::Atoms => l.atoms(),
        DependencyDomain::JoinIrreducibles => l.join_irreducibles(),
    };
    let mut position = vec![None; l.len()];
    for (i, &e) in elements.iter().enumerate() {
        position[e] = Some(i);
    }
    let k = elements.len();
    let lower_cover: Vec<usize> = elements
        .iter()
        .map(|&y| match domain {
            DependencyDomain::Atoms => l.bottom(),
            DependencyDomain::JoinIrreducibles => l.lower_covers(y)[0],
        })
        .collect();
    let mut d = vec![FixedBitSet::with_capacity(k); k];
    let mut witness = HashMap::new();
    for (i, &x) in elements.iter().enumerate() {
        for (j, &y) in elements.iter().enumerate() {
            if i == j {
                continue;
            }
            let ys = lower_cover[j];
            if let Some(u) = l
                .elements()
                .find(|&u| l.leq(x, l.join(y, u)) && !l.leq(x, l.join(ys, u)))
            {
                d[i].insert(j);
                witness.insert((i, j), u);
            }
        }
    }
    let d_bar = with_diagonal(&d);
    let strict_tc = transitive_closure(&d);
    let refl_tc = with_diagonal(&strict_tc);
    DependencyRelation {
        domain,
        elements,
        position,
        d,
        witness,
        d_bar,
        strict_tc,
        refl_tc,
    }
}

/// A join-irreducible lying on a `D`-cycle.
pub fn dependency_cycle(l: &FiniteLattice) -> Option<usize> {
    join_dependency(l, DependencyDomain::JoinIrreducibles).cycle_element()
}

/// Finite lattices are lower bounded iff `D` on join-irreducibles is acyclic.
pub fn is_lower_bounded(l: &FiniteLattice) -> bool {
    dependency_cycle(l).is_none()
}

fn require_atomistic_jsd(l: &FiniteLattice) -> Result<(), AnalysisError> {
    if let Some(x) = atomistic_violation(l) {
        return Err(AnalysisError::PreconditionFailed(format!(
            "lattice is not atomistic ({} is not a join of atoms)",
            l.label(x)
        )));
    }
    if let Some((x, y, z)) = jsd_violation(l) {
        return Err(AnalysisError::PreconditionFailed(format!(
            "lattice is not join-semidistributive (witness {}, {}, {})",
            l.label(x),
            l.label(y),
            l.label(z)
        )));
    }
    Ok(())
}

/// Join-prime elements of `[0, a]`.
fn join_primes_below(l: &FiniteLattice, a: usize) -> Vec<usize> {
    let below: Vec<usize> = l.down_set(a).ones().collect();
    below
        .iter()
        .copied()
        .filter(|&p| p != l.bottom())
        .filter(|&p| {
            below.iter().all(|&x| {
                below
                    .iter()
                    .all(|&y| !l.leq(p, l.join(x, y)) || l.leq(p, x) || l.leq(p, y))
            })
        })
        .collect()
}

/// Minimal decomposition without rechecking the lattice-wide precondition.
/// Callers must know the lattice is atomistic and join-semidistributive.
pub(crate) fn decompose(l: &FiniteLattice, a: usize) -> Result<Vec<usize>, AnalysisError> {
    let below = l.atoms_below(a);
    // An atom belongs to the least decomposition iff the other atoms below
    // `a` fail to generate `a`.
    let extreme: Vec<usize> = below
        .iter()
        .copied()
        .filter(|&p| l.join_all(below.iter().copied().filter(|&q| q != p)) != a)
        .collect();
    if l.join_all(extreme.iter().copied()) != a || join_primes_below(l, a) != extreme {
        return Err(AnalysisError::NoLeastDecomposition(l.label(a).to_string()));
    }
    Ok(extreme)
}

/// The containment-least set of atoms joining to `a`.
pub fn minimal_decomposition(l: &FiniteLattice, a: usize) -> Result<Vec<usize>, AnalysisError> {
    require_atomistic_jsd(l)?;
    decompose(l, a)
}

/// Atom lengths of every element: the fewest atoms joining to it, found by
/// breadth-first search from the bottom along `x -> x v p`.
pub fn atom_lengths(l: &FiniteLattice) -> Result<Vec<usize>, AnalysisError> {
    if let Some(x) = atomistic_violation(l) {
        return Err(AnalysisError::PreconditionFailed(format!(
            "lattice is not atomistic ({} is not a join of atoms)",
            l.label(x)
        )));
    }
    let atoms = l.atoms();
    let mut dist = vec![usize::MAX; l.len()];
    dist[l.bottom()] = 0;
    let mut queue = VecDeque::from([l.bottom()]);
    while let Some(x) = queue.pop_front() {
        for &p in &atoms {
            let y = l.join(x, p);
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    Ok(dist)
}

/// Minimal number of atoms whose join is `x`.
pub fn ell(l: &FiniteLattice, x: usize) -> Result<usize, AnalysisError> {
    Ok(atom_lengths(l)?[x])
}

/// Whether `p_set` separates the elements of `q_set`: for `x !<= y` in
/// `q_set` some `p` in `p_set` lies below `x` but not `y`.
pub fn separates(l: &FiniteLattice, p_set: &[usize], q_set: &[usize]) -> bool {
    q_set.iter().all(|&x| {
        q_set.iter().all(|&y| {
            l.leq(x, y) || p_set.iter().any(|&p| l.leq(p, x) && !l.leq(p, y))
        })
    })
}

/// Formal inequality `atom <= a v b` with `atom` below neither side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BiatomicityProblem {
    pub atom: usize,
    pub a: usize,
    pub b: usize,
    /// Atoms `x <= a`, `y <= b` with `atom <= x v y`, when present.
    pub solution: Option<(usize, usize)>,
}

impl BiatomicityProblem {
    pub fn is_solved(&self) -> bool {
        self.solution.is_some()
    }

    pub fn describe(&self, l: &FiniteLattice) -> String {
        format!("{} <= {} v {}", l.label(self.atom), l.label(self.a), l.label(self.b))
    }
}

/// All biatomicity problems, one per unordered pair `{a, b}` (kept with
/// `a < b` by index), sorted by `(atom, a, b)`.
pub fn biatomicity_problems(l: &FiniteLattice) -> Vec<BiatomicityProblem> {
    let zero = l.bottom();
    let mut out = Vec::new();
    for p in l.atoms() {
        for a in l.elements().filter(|&a| a != zero && !l.leq(p, a)) {
            for b in (a + 1..l.len()).filter(|&b| b != zero && !l.leq(p, b)) {
                if l.leq(p, l.join(a, b)) {
                    out.push(BiatomicityProblem {
                        atom: p,
                        a,
                        b,
                        solution: find_solution(l, p, a, b),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Atomistic,
    Biatomic,
    Jsd,
    LowerBounded,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::Atomistic,
        Property::Biatomic,
        Property::Jsd,
        Property::LowerBounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Atomistic => "atomistic",
            Property::Biatomic => "biatomic",
            Property::Jsd => "jsd",
            Property::LowerBounded => "lower-bounded",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

/// Verdict of one predicate with the labels needed to re-check it by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub predicate: String,
    pub verdict: bool,
    /// Counterexample labels when the verdict is false.
    pub witness: Vec<String>,
}

pub fn report(l: &FiniteLattice, property: Property) -> PropertyReport {
    let witness: Option<Vec<usize>> = match property {
        Property::Atomistic => atomistic_violation(l).map(|x| vec![x]),
        Property::Biatomic => biatomic_violation(l).map(|(p, a, b)| vec![p, a, b]),
        Property::Jsd => jsd_violation(l).map(|(x, y, z)| vec![x, y, z]),
        Property::LowerBounded => dependency_cycle(l).map(|x| vec![x]),
    };
    PropertyReport {
        predicate: property.name().to_string(),
        verdict: witness.is_none(),
        witness: witness.map(|w| l.labels_of(&w)).unwrap_or_default(),
    }
}
