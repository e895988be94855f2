//! Finite bounded lattices stored as a dense order relation with precomputed
//! join and meet tables.
//!
//! Elements are plain indices `0..n`. Every [`FiniteLattice`] is validated on
//! construction and immutable afterwards, so it can be shared freely (the
//! constructions in [`crate::extend`] hand lattices around behind [`Arc`]).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("not a partial order: {0}")]
    NotAPoset(String),
    #[error("not a lattice: {a} and {b} have no {kind}")]
    NotALattice {
        a: String,
        b: String,
        kind: &'static str,
    },
    #[error("not bounded: {0}")]
    NotBounded(String),
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("empty interval: {lower} is not below {upper}")]
    EmptyInterval { lower: String, upper: String },
    #[error("map is not injective: {0} and {1} have the same image")]
    NotInjective(String, String),
    #[error("map is not total: {0}")]
    NotTotal(String),
    #[error("invalid lattice JSON: {0}")]
    Json(String),
}

/// A finite bounded lattice.
#[derive(Clone)]
pub struct FiniteLattice {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    join: Vec<u32>,
    meet: Vec<u32>,
    bottom: usize,
    top: usize,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<(&str, &str)> = self
            .covers()
            .into_iter()
            .map(|(a, b)| (self.label(a), self.label(b)))
            .collect();
        f.debug_struct("FiniteLattice")
            .field("elements", &self.labels)
            .field("covers", &covers)
            .finish()
    }
}

impl PartialEq for FiniteLattice {
    /// Equality of labelled structures: same labels in the same order and the
    /// same order relation.
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.up == other.up
    }
}

impl Eq for FiniteLattice {}

/// Serialized form: `{ "elements": [...], "covers": [[lower, upper], ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
}

fn check_labels(labels: &[String]) -> Result<HashMap<String, usize>, LatticeError> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(LatticeError::DuplicateLabel(l.clone()));
        }
    }
    Ok(index)
}

impl FiniteLattice {
    /// Builds a lattice from labels and a cover (or any generating) relation.
    /// The order is the reflexive-transitive closure of `covers`.
    pub fn from_covers<S: AsRef<str>>(
        labels: &[S],
        covers: &[(S, S)],
    ) -> Result<Self, LatticeError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let index = check_labels(&labels)?;
        let n = labels.len();
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| LatticeError::UnknownLabel(s.as_ref().to_string()))
        };
        let mut succ = vec![Vec::new(); n];
        for (lo, hi) in covers {
            let (lo, hi) = (lookup(lo)?, lookup(hi)?);
            if lo == hi {
                return Err(LatticeError::NotAPoset(format!(
                    "self-cover on {:?}",
                    labels[lo]
                )));
            }
            succ[lo].push(hi);
        }
        // Kahn's algorithm; leftover vertices lie on a cycle.
        let mut indeg = vec![0usize; n];
        for s in &succ {
            for &t in s {
                indeg[t] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            topo.push(v);
            for &t in &succ[v] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push(t);
                }
            }
        }
        if topo.len() < n {
            let on_cycle = (0..n).find(|&v| indeg[v] > 0).unwrap();
            return Err(LatticeError::NotAPoset(format!(
                "cover relation has a cycle through {:?}",
                labels[on_cycle]
            )));
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for &v in topo.iter().rev() {
            up[v].insert(v);
            for &t in &succ[v] {
                let above = up[t].clone();
                up[v].union_with(&above);
            }
        }
        Self::from_up_sets(labels, index, up)
    }

    /// Builds a lattice on `labels.len()` elements from an order predicate.
    pub fn from_order<F>(labels: Vec<String>, leq: F) -> Result<Self, LatticeError>
    where
        F: Fn(usize, usize) -> bool,
    {
        let index = check_labels(&labels)?;
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (x, row) in up.iter_mut().enumerate() {
            for y in 0..n {
                if leq(x, y) {
                    row.insert(y);
                }
            }
        }
        for x in 0..n {
            if !up[x].contains(x) {
                return Err(LatticeError::NotAPoset(format!(
                    "{:?} is not below itself",
                    labels[x]
                )));
            }
            for y in up[x].ones() {
                if y != x && up[y].contains(x) {
                    return Err(LatticeError::NotAPoset(format!(
                        "{:?} and {:?} violate antisymmetry",
                        labels[x], labels[y]
                    )));
                }
                if !up[y].is_subset(&up[x]) {
                    return Err(LatticeError::NotAPoset(format!(
                        "transitivity fails above {:?} <= {:?}",
                        labels[x], labels[y]
                    )));
                }
            }
        }
        Self::from_up_sets(labels, index, up)
    }

    /// Expects a valid partial order given by up-sets.
    fn from_up_sets(
        labels: Vec<String>,
        index: HashMap<String, usize>,
        up: Vec<FixedBitSet>,
    ) -> Result<Self, LatticeError> {
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::NotBounded("empty poset".into()));
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (x, row) in up.iter().enumerate() {
            for y in row.ones() {
                down[y].insert(x);
            }
        }
        let mins: Vec<usize> = (0..n).filter(|&x| down[x].count_ones(..) == 1).collect();
        let maxs: Vec<usize> = (0..n).filter(|&x| up[x].count_ones(..) == 1).collect();
        let bottom = match mins.as_slice() {
            [b] if up[*b].count_ones(..) == n => *b,
            _ => {
                return Err(LatticeError::NotBounded(format!(
                    "minimal elements {:?}",
                    mins.iter().map(|&m| &labels[m]).collect::<Vec<_>>()
                )))
            }
        };
        let top = match maxs.as_slice() {
            [t] if down[*t].count_ones(..) == n => *t,
            _ => {
                return Err(LatticeError::NotBounded(format!(
                    "maximal elements {:?}",
                    maxs.iter().map(|&m| &labels[m]).collect::<Vec<_>>()
                )))
            }
        };
        let up_count: Vec<usize> = up.iter().map(|s| s.count_ones(..)).collect();
        let down_count: Vec<usize> = down.iter().map(|s| s.count_ones(..)).collect();
        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        let mut common = FixedBitSet::with_capacity(n);
        for x in 0..n {
            for y in x..n {
                common.clone_from(&up[x]);
                common.intersect_with(&up[y]);
                let size = common.count_ones(..);
                let lub = common.ones().find(|&z| up_count[z] == size).ok_or_else(|| {
                    LatticeError::NotALattice {
                        a: labels[x].clone(),
                        b: labels[y].clone(),
                        kind: "least upper bound",
                    }
                })?;
                common.clone_from(&down[x]);
                common.intersect_with(&down[y]);
                let size = common.count_ones(..);
                let glb = common.ones().find(|&z| down_count[z] == size).ok_or_else(|| {
                    LatticeError::NotALattice {
                        a: labels[x].clone(),
                        b: labels[y].clone(),
                        kind: "greatest lower bound",
                    }
                })?;
                join[x * n + y] = lub as u32;
                join[y * n + x] = lub as u32;
                meet[x * n + y] = glb as u32;
                meet[y * n + x] = glb as u32;
            }
        }
        Ok(FiniteLattice {
            labels,
            index,
            up,
            down,
            join,
            meet,
            bottom,
            top,
        })
    }

    /// Restricts the order of `self` to `elements` (in the given order) and
    /// validates that the result is a lattice in its own right.
    pub fn induced(&self, elements: &[usize]) -> Result<Self, LatticeError> {
        let labels = elements.iter().map(|&e| self.labels[e].clone()).collect();
        Self::from_order(labels, |i, j| self.leq(elements[i], elements[j]))
    }

    pub fn from_json(json: &LatticeJson) -> Result<Self, LatticeError> {
        let covers: Vec<(&str, &str)> = json
            .covers
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let labels: Vec<&str> = json.elements.iter().map(String::as_str).collect();
        Self::from_covers(&labels, &covers)
    }

    pub fn from_json_str(text: &str) -> Result<Self, LatticeError> {
        let json: LatticeJson =
            serde_json::from_str(text).map_err(|e| LatticeError::Json(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            elements: self.labels.clone(),
            covers: self
                .covers()
                .into_iter()
                .map(|(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("lattice JSON is serializable")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: lattices have at least one element.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels_of(&self, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&x| self.labels[x].clone()).collect()
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y] as usize
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y] as usize
    }

    /// Join of a set; the empty join is the bottom element.
    pub fn join_all<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Meet of a set; the empty meet is the top element.
    pub fn meet_all<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// `{y : x <= y}` as a bit set.
    pub fn up_set(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// `{y : y <= x}` as a bit set.
    pub fn down_set(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn is_atom(&self, x: usize) -> bool {
        x != self.bottom && self.down[x].count_ones(..) == 2
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.is_atom(x)).collect()
    }

    /// Atoms below `x`.
    pub fn atoms_below(&self, x: usize) -> Vec<usize> {
        self.down[x].ones().filter(|&p| self.is_atom(p)).collect()
    }

    pub fn covers_pair(&self, x: usize, y: usize) -> bool {
        self.lt(x, y)
            && self.up[x]
                .intersection(&self.down[y])
                .take(3)
                .count()
                == 2
    }

    /// The cover relation, sorted by (lower, upper).
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in self.elements() {
            for y in self.up[x].ones() {
                if self.covers_pair(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        self.down[x]
            .ones()
            .filter(|&y| self.covers_pair(y, x))
            .collect()
    }

    /// Nonzero elements with exactly one lower cover.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        self.elements()
            .filter(|&x| x != self.bottom && self.lower_covers(x).len() == 1)
            .collect()
    }

    /// `[a, b]`.
    pub fn interval(&self, a: usize, b: usize) -> Result<Vec<usize>, LatticeError> {
        if !self.leq(a, b) {
            return Err(LatticeError::EmptyInterval {
                lower: self.labels[a].clone(),
                upper: self.labels[b].clone(),
            });
        }
        Ok(self.up[a].intersection(&self.down[b]).collect())
    }

    /// `[a, 1]`.
    pub fn filter(&self, a: usize) -> Vec<usize> {
        self.up[a].ones().collect()
    }

    /// `L_a = L \ [a, 1]`.
    pub fn complement_filter(&self, a: usize) -> Vec<usize> {
        self.elements().filter(|&x| !self.leq(a, x)).collect()
    }

    pub fn is_meet_subsemilattice(&self, set: &[usize]) -> bool {
        let mut member = FixedBitSet::with_capacity(self.len());
        set.iter().for_each(|&x| member.insert(x));
        set.iter()
            .all(|&x| set.iter().all(|&y| member.contains(self.meet(x, y))))
    }

    pub fn is_join_subsemilattice(&self, set: &[usize]) -> bool {
        let mut member = FixedBitSet::with_capacity(self.len());
        set.iter().for_each(|&x| member.insert(x));
        set.iter()
            .all(|&x| set.iter().all(|&y| member.contains(self.join(x, y))))
    }

    pub fn is_sublattice(&self, set: &[usize]) -> bool {
        self.is_meet_subsemilattice(set) && self.is_join_subsemilattice(set)
    }

    /// Returns `base` if it is unused, otherwise `base` with the smallest
    /// numeric suffix that is.
    pub fn fresh_label(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|l| self.index_of(l).is_none())
            .unwrap()
    }
}

/// Which structure an embedding has been verified to preserve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preserved {
    pub join: bool,
    pub meet: bool,
    pub zero: bool,
    pub one: bool,
    pub atoms: bool,
}

impl Preserved {
    /// `<join, meet, 0, 1, at>`-embedding.
    pub fn all(&self) -> bool {
        self.join && self.meet && self.zero && self.one && self.atoms
    }

    pub fn lattice(&self) -> bool {
        self.join && self.meet
    }
}

/// An injective map between two lattices together with its verified
/// preservation flags.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    source: Arc<FiniteLattice>,
    target: Arc<FiniteLattice>,
    map: Vec<usize>,
    preserved: Preserved,
}

impl EmbeddingMap {
    /// Unverified map; all flags start false. See [`verify_embedding`].
    pub fn new(
        source: Arc<FiniteLattice>,
        target: Arc<FiniteLattice>,
        map: Vec<usize>,
    ) -> Result<Self, LatticeError> {
        if map.len() != source.len() {
            return Err(LatticeError::NotTotal(format!(
                "{} images for {} source elements",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.len()) {
            return Err(LatticeError::NotTotal(format!(
                "image index {bad} outside target of size {}",
                target.len()
            )));
        }
        Ok(EmbeddingMap {
            source,
            target,
            map,
            preserved: Preserved::default(),
        })
    }

    /// Builds and verifies in one step.
    pub fn verified(
        source: Arc<FiniteLattice>,
        target: Arc<FiniteLattice>,
        map: Vec<usize>,
    ) -> Result<Self, LatticeError> {
        verify_embedding(Self::new(source, target, map)?)
    }

    pub fn identity(lattice: Arc<FiniteLattice>) -> Self {
        let map = lattice.elements().collect();
        verify_embedding(EmbeddingMap {
            source: lattice.clone(),
            target: lattice,
            map,
            preserved: Preserved::default(),
        })
        .expect("identity is injective")
    }

    pub fn source(&self) -> &Arc<FiniteLattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteLattice> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn preserved(&self) -> Preserved {
        self.preserved
    }

    /// `other ∘ self`, verified.
    pub fn then(&self, other: &EmbeddingMap) -> Result<EmbeddingMap, LatticeError> {
        if other.source.len() != self.target.len() {
            return Err(LatticeError::NotTotal(
                "composed maps do not line up".into(),
            ));
        }
        let map = self.map.iter().map(|&x| other.map[x]).collect();
        Self::verified(self.source.clone(), other.target.clone(), map)
    }
}

/// Recomputes every preservation flag of `f` by exhaustive check.
pub fn verify_embedding(mut f: EmbeddingMap) -> Result<EmbeddingMap, LatticeError> {
    let (src, dst, m) = (&f.source, &f.target, &f.map);
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (x, &y) in m.iter().enumerate() {
        if let Some(&x0) = seen.get(&y) {
            return Err(LatticeError::NotInjective(
                src.label(x0).to_string(),
                src.label(x).to_string(),
            ));
        }
        seen.insert(y, x);
    }
    let mut join = true;
    let mut meet = true;
    'pairs: for x in src.elements() {
        for y in src.elements() {
            join &= m[src.join(x, y)] == dst.join(m[x], m[y]);
            meet &= m[src.meet(x, y)] == dst.meet(m[x], m[y]);
            if !join && !meet {
                break 'pairs;
            }
        }
    }
    f.preserved = Preserved {
        join,
        meet,
        zero: m[src.bottom()] == dst.bottom(),
        one: m[src.top()] == dst.top(),
        atoms: src.elements().all(|x| src.is_atom(x) == dst.is_atom(m[x])),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> FiniteLattice {
        FiniteLattice::from_covers(
            &["0", "x", "y", "z", "1"],
            &[
                ("0", "x"),
                ("0", "y"),
                ("0", "z"),
                ("x", "1"),
                ("y", "1"),
                ("z", "1"),
            ],
        )
        .unwrap()
    }

    fn square() -> FiniteLattice {
        FiniteLattice::from_covers(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
        .unwrap()
    }

    fn idx(l: &FiniteLattice, s: &str) -> usize {
        l.index_of(s).unwrap()
    }

    /// Least upper bound by scanning all upper bounds, independent of the
    /// table construction.
    fn lub_by_scan(l: &FiniteLattice, x: usize, y: usize) -> usize {
        let ubs: Vec<usize> = l
            .elements()
            .filter(|&z| l.leq(x, z) && l.leq(y, z))
            .collect();
        *ubs.iter()
            .find(|&&z| ubs.iter().all(|&w| l.leq(z, w)))
            .unwrap()
    }

    #[test]
    fn two_chain() {
        let l = FiniteLattice::from_covers(&["0", "1"], &[("0", "1")]).unwrap();
        assert_eq!(l.bottom(), 0);
        assert_eq!(l.top(), 1);
        assert_eq!(l.join(0, 1), 1);
        assert_eq!(l.atoms(), vec![1]);
    }

    #[test]
    fn square_join_meet() {
        let l = square();
        let (a, b) = (idx(&l, "a"), idx(&l, "b"));
        assert_eq!(l.join(a, b), idx(&l, "1"));
        assert_eq!(l.meet(a, b), idx(&l, "0"));
    }

    #[test]
    fn m3_tables_match_scan() {
        let l = m3();
        let (x, y, z) = (idx(&l, "x"), idx(&l, "y"), idx(&l, "z"));
        assert_eq!(l.join(x, y), idx(&l, "1"));
        assert_eq!(l.meet(x, y), idx(&l, "0"));
        assert_eq!(l.join(x, z), lub_by_scan(&l, x, z));
        assert_eq!(l.join(x, z), idx(&l, "1"));
        for a in l.elements() {
            for b in l.elements() {
                assert_eq!(l.join(a, b), lub_by_scan(&l, a, b));
            }
        }
    }

    #[test]
    fn rejects_cycles() {
        let err = FiniteLattice::from_covers(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(matches!(err, Err(LatticeError::NotAPoset(_))));
    }

    #[test]
    fn rejects_non_lattice() {
        // Two maximal elements above two minimal ones, with 0 and 1 added:
        // a, b both below c and d, so a v b is not unique.
        let err = FiniteLattice::from_covers(
            &["0", "a", "b", "c", "d", "1"],
            &[
                ("0", "a"),
                ("0", "b"),
                ("a", "c"),
                ("a", "d"),
                ("b", "c"),
                ("b", "d"),
                ("c", "1"),
                ("d", "1"),
            ],
        );
        assert!(matches!(err, Err(LatticeError::NotALattice { .. })));
    }

    #[test]
    fn rejects_unbounded() {
        let err = FiniteLattice::from_covers(&["a", "b"], &[]);
        assert!(matches!(err, Err(LatticeError::NotBounded(_))));
        let err = FiniteLattice::from_covers::<&str>(&[], &[]);
        assert!(matches!(err, Err(LatticeError::NotBounded(_))));
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        assert!(matches!(
            FiniteLattice::from_covers(&["a", "a"], &[]),
            Err(LatticeError::DuplicateLabel(_))
        ));
        assert!(matches!(
            FiniteLattice::from_covers(&["a"], &[("a", "b")]),
            Err(LatticeError::UnknownLabel(_))
        ));
    }

    #[test]
    fn singleton_lattice() {
        let l = FiniteLattice::from_covers(&["0"], &[]).unwrap();
        assert_eq!(l.bottom(), l.top());
        assert!(l.atoms().is_empty());
    }

    #[test]
    fn filters_and_intervals() {
        let l = square();
        let (zero, a, b) = (idx(&l, "0"), idx(&l, "a"), idx(&l, "b"));
        assert_eq!(l.filter(zero).len(), 4);
        assert_eq!(l.complement_filter(a), vec![zero, b]);
        let chain = FiniteLattice::from_covers(&["0", "m", "1"], &[("0", "m"), ("m", "1")])
            .unwrap();
        assert_eq!(chain.interval(1, 2).unwrap(), vec![1, 2]);
        assert!(matches!(
            chain.interval(2, 1),
            Err(LatticeError::EmptyInterval { .. })
        ));
    }

    #[test]
    fn meet_subsemilattices() {
        let l = square();
        let all: Vec<usize> = l.elements().collect();
        assert!(l.is_meet_subsemilattice(&all));
        let (a, b, top) = (idx(&l, "a"), idx(&l, "b"), idx(&l, "1"));
        assert!(!l.is_meet_subsemilattice(&[a, b, top]));
        for x in l.elements() {
            let mut m = l.filter(x);
            m.push(l.bottom());
            assert!(l.is_meet_subsemilattice(&m));
        }
    }

    #[test]
    fn embeddings() {
        let sq = Arc::new(square());
        let id = EmbeddingMap::identity(sq.clone());
        assert!(id.preserved().all());

        let chain = Arc::new(FiniteLattice::from_covers(&["0", "1"], &[("0", "1")]).unwrap());
        let f = EmbeddingMap::verified(chain, sq.clone(), vec![0, idx(&sq, "a")]).unwrap();
        let p = f.preserved();
        assert!(p.join && p.meet && p.zero && p.atoms);
        assert!(!p.one);

        let bad = EmbeddingMap::new(sq.clone(), sq.clone(), vec![0, 0, 1, 2]).unwrap();
        assert!(matches!(
            verify_embedding(bad),
            Err(LatticeError::NotInjective(_, _))
        ));
    }

    #[test]
    fn json_round_trip() {
        let l = m3();
        let text = l.to_json_string();
        let back = FiniteLattice::from_json_str(&text).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn covers_regenerate_lattice() {
        let l = m3();
        let covers: Vec<(&str, &str)> = l
            .covers()
            .into_iter()
            .map(|(a, b)| (l.label(a), l.label(b)))
            .collect();
        let labels: Vec<&str> = l.labels().iter().map(String::as_str).collect();
        assert_eq!(FiniteLattice::from_covers(&labels, &covers).unwrap(), l);
    }
}
