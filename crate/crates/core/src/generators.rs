//! Witness and corpus lattices: Boolean lattices, chains, order-convex
//! subsets of a chain, subsemilattice lattices, and convex-trace lattices
//! (see [`crate::geometry`]).

use thiserror::Error;

use crate::geometry::subset_label;
use crate::lattice::{FiniteLattice, LatticeError};

pub const MAX_BOOLEAN_RANK: usize = 16;
pub const MAX_SEMILATTICE_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("not a meet-semilattice: {0}")]
    NotAMeetSemilattice(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Subsets of `{1..n}` ordered by inclusion; element `i` is the subset with
/// bit mask `i`.
pub fn boolean(n: usize) -> Result<FiniteLattice, GeneratorError> {
    if n > MAX_BOOLEAN_RANK {
        return Err(GeneratorError::TooLarge(format!(
            "boolean({n}) exceeds rank {MAX_BOOLEAN_RANK}"
        )));
    }
    let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let labels = (0..1u32 << n).map(|m| subset_label(&names, m)).collect();
    Ok(FiniteLattice::from_order(labels, |x, y| x & !y == 0)?)
}

/// `0 < 1 < ... < n-1`, labelled by position.
pub fn chain(n: usize) -> Result<FiniteLattice, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidSize("chain(0) is empty".into()));
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    Ok(FiniteLattice::from_order(labels, |x, y| x <= y)?)
}

/// Order-convex subsets of an `n`-element chain: the empty set and the
/// intervals `[i, j]`, ordered by inclusion. Intervals are sorted by length
/// then start, so the atoms follow the empty set.
pub fn co_chain(n: usize) -> Result<FiniteLattice, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidSize("co_chain(0)".into()));
    }
    let mut intervals: Vec<Option<(usize, usize)>> = vec![None];
    for len in 1..=n {
        for start in 1..=n + 1 - len {
            intervals.push(Some((start, start + len - 1)));
        }
    }
    let labels = intervals
        .iter()
        .map(|iv| match iv {
            None => "{}".to_string(),
            Some((i, j)) => format!("[{i},{j}]"),
        })
        .collect();
    Ok(FiniteLattice::from_order(labels, |x, y| {
        match (intervals[x], intervals[y]) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((i, j)), Some((k, l))) => k <= i && j <= l,
        }
    })?)
}

/// A finite meet-semilattice, stored as the lattice obtained by adjoining a
/// new top. Its own elements are `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetSemilattice {
    with_top: FiniteLattice,
}

impl MeetSemilattice {
    pub fn from_covers<S: AsRef<str>>(
        labels: &[S],
        covers: &[(S, S)],
    ) -> Result<Self, GeneratorError> {
        let mut all: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        if all.is_empty() {
            return Err(GeneratorError::InvalidSize("empty meet-semilattice".into()));
        }
        let mut top = "⊤".to_string();
        while all.contains(&top) {
            top.push('\'');
        }
        let mut edges: Vec<(String, String)> = covers
            .iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        for l in &all {
            edges.push((l.clone(), top.clone()));
        }
        all.push(top);
        let lattice = FiniteLattice::from_covers(&all, &edges).map_err(|e| match e {
            LatticeError::NotALattice { .. } | LatticeError::NotBounded(_) => {
                GeneratorError::NotAMeetSemilattice(e.to_string())
            }
            other => GeneratorError::Lattice(other),
        })?;
        Ok(MeetSemilattice { with_top: lattice })
    }

    pub fn from_json_str(text: &str) -> Result<Self, GeneratorError> {
        let json: crate::lattice::LatticeJson = serde_json::from_str(text)
            .map_err(|e| GeneratorError::Lattice(LatticeError::Json(e.to_string())))?;
        let covers: Vec<(&str, &str)> = json
            .covers
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let labels: Vec<&str> = json.elements.iter().map(String::as_str).collect();
        Self::from_covers(&labels, &covers)
    }

    /// Removes the top of a lattice with at least two elements.
    pub fn from_lattice_without_top(l: &FiniteLattice) -> Result<Self, GeneratorError> {
        if l.len() < 2 {
            return Err(GeneratorError::InvalidSize(
                "need at least two elements".into(),
            ));
        }
        let keep: Vec<usize> = l.elements().filter(|&x| x != l.top()).collect();
        let labels: Vec<&str> = keep.iter().map(|&x| l.label(x)).collect();
        let covers: Vec<(&str, &str)> = l
            .covers()
            .into_iter()
            .filter(|&(_, b)| b != l.top())
            .map(|(a, b)| (l.label(a), l.label(b)))
            .collect();
        Self::from_covers(&labels, &covers)
    }

    pub fn len(&self) -> usize {
        self.with_top.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self, x: usize) -> &str {
        self.with_top.label(self.element(x))
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|x| self.label(x).to_string()).collect()
    }

    // Own index -> index in `with_top` (the adjoined top is the last label).
    fn element(&self, x: usize) -> usize {
        x
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.with_top.leq(x, y)
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.with_top.meet(x, y)
    }
}

/// All meet-closed subsets of `p` (the empty set included), ordered by
/// inclusion; joins are meet-closures of unions.
pub fn sub_meet_semilattice(p: &MeetSemilattice) -> Result<FiniteLattice, GeneratorError> {
    let k = p.len();
    if k > MAX_SEMILATTICE_SIZE {
        return Err(GeneratorError::TooLarge(format!(
            "subsemilattices of {k} elements (at most {MAX_SEMILATTICE_SIZE})"
        )));
    }
    let closed: Vec<u32> = (0..1u32 << k)
        .filter(|&s| {
            (0..k).filter(|i| s & (1 << i) != 0).all(|i| {
                (0..k)
                    .filter(|j| s & (1 << j) != 0)
                    .all(|j| s & (1 << p.meet(i, j)) != 0)
            })
        })
        .collect();
    let names = p.labels();
    let labels = closed.iter().map(|&s| subset_label(&names, s)).collect();
    Ok(FiniteLattice::from_order(labels, |i, j| {
        closed[i] & !closed[j] == 0
    })?)
}
