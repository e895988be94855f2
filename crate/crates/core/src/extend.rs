//! Embedding constructions.
//!
//! * [`biatomic_completion`]: doubles every non-atom into two fresh atoms.
//! * [`atom_restriction`] and [`separating_reembedding`]: pass to the
//!   join-closure of the atoms below an element.
//! * [`ExtensionPair`] and [`one_atom_extension`]: adjoin exactly one atom.
//! * [`solve_one_problem`] and [`partial_biatomization`]: solve every
//!   biatomicity problem of a finite atomistic join-semidistributive lattice
//!   inside a larger one of the same kind.
//!
//! Every construction keeps the indices of the input lattice: the embedding
//! of the input sends element `i` to element `i` unless stated otherwise, and
//! fresh elements come after the original ones in creation order.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    self, atom_lengths, decompose, find_solution, is_atomistic, is_join_semidistributive,
    is_lower_bounded, join_dependency, AnalysisError, DependencyDomain, DependencyRelation,
};
use crate::lattice::{EmbeddingMap, FiniteLattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("bad apex {0}: must be neither zero nor an atom")]
    BadApex(String),
    #[error("set is not closed under meets: {0} ^ {1} is missing")]
    NotMeetClosed(String, String),
    #[error("set does not contain zero and the filter above the apex: {0} is missing")]
    MissingFilter(String),
    #[error("atoms do not separate the sublattice: {0} !<= {1} is not witnessed")]
    SeparationFailed(String, String),
    #[error("base lattice is not join-semidistributive (witness {0})")]
    NotJsdBase(String),
    #[error("bad triple: {0}")]
    BadTriple(String),
    #[error("apex is not minimal: {0}")]
    MinimalityFailed(String),
    #[error("postcondition failed: {0}")]
    PostconditionFailed(String),
    #[error("re-validation failed: {0}")]
    ReValidationFailed(String),
}

impl ExtendError {
    pub fn name(&self) -> &'static str {
        match self {
            ExtendError::Lattice(_) => "LatticeError",
            ExtendError::Analysis(AnalysisError::PreconditionFailed(_)) => "PreconditionFailed",
            ExtendError::Analysis(AnalysisError::NoLeastDecomposition(_)) => "NoLeastDecomposition",
            ExtendError::PreconditionFailed(_) => "PreconditionFailed",
            ExtendError::BadApex(_) => "BadApex",
            ExtendError::NotMeetClosed(..) => "NotMeetClosed",
            ExtendError::MissingFilter(_) => "MissingFilter",
            ExtendError::SeparationFailed(..) => "SeparationFailed",
            ExtendError::NotJsdBase(_) => "NotJsdBase",
            ExtendError::BadTriple(_) => "BadTriple",
            ExtendError::MinimalityFailed(_) => "MinimalityFailed",
            ExtendError::PostconditionFailed(_) => "PostconditionFailed",
            ExtendError::ReValidationFailed(_) => "ReValidationFailed",
        }
    }

    /// Whether the input, rather than the construction, is at fault.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            ExtendError::PostconditionFailed(_)
                | ExtendError::ReValidationFailed(_)
                | ExtendError::Analysis(AnalysisError::NoLeastDecomposition(_))
        )
    }
}

type Result<T> = std::result::Result<T, ExtendError>;

fn atomistic_only(l: &FiniteLattice) -> Result<()> {
    match analysis::atomistic_violation(l) {
        Some(x) => Err(ExtendError::PreconditionFailed(format!(
            "lattice is not atomistic ({} is not a join of atoms)",
            l.label(x)
        ))),
        None => Ok(()),
    }
}

fn jsd_only(l: &FiniteLattice) -> Result<()> {
    match analysis::jsd_violation(l) {
        Some((x, y, z)) => Err(ExtendError::NotJsdBase(format!(
            "{}, {}, {}",
            l.label(x),
            l.label(y),
            l.label(z)
        ))),
        None => Ok(()),
    }
}

/// Biatomic completion: for every element `a` that is neither zero nor an
/// atom, two fresh incomparable atoms `p(a)` and `q(a)` are added, each lying
/// exactly below the elements above `a`.
pub fn biatomic_completion(l: &Arc<FiniteLattice>) -> (Arc<FiniteLattice>, EmbeddingMap) {
    let zero = l.bottom();
    let apexes: Vec<usize> = l
        .elements()
        .filter(|&a| a != zero && !l.is_atom(a))
        .collect();
    let n = l.len();
    let mut labels = l.labels().to_vec();
    let mut apex_of = Vec::with_capacity(2 * apexes.len());
    for &a in &apexes {
        for prefix in ["p", "q"] {
            let base = format!("{prefix}({})", l.label(a));
            let mut label = base.clone();
            let mut k = 1;
            while labels.contains(&label) {
                label = format!("{base}{k}");
                k += 1;
            }
            labels.push(label);
            apex_of.push(a);
        }
    }
    let m = FiniteLattice::from_order(labels, |x, y| match (x < n, y < n) {
        (true, true) => l.leq(x, y),
        (true, false) => x == zero,
        (false, true) => l.leq(apex_of[x - n], y),
        (false, false) => x == y,
    })
    .expect("doubling atoms yields a lattice");
    let m = Arc::new(m);
    let embedding = EmbeddingMap::verified(l.clone(), m.clone(), l.elements().collect())
        .expect("inclusion is injective");
    (m, embedding)
}

/// `T = ({0} u S)^v` for `S` the atoms below `a`, as a lattice in its own
/// right (meets recomputed inside `T`), together with the inclusion of its
/// elements into `l`.
pub fn atom_restriction(l: &FiniteLattice, a: usize) -> (FiniteLattice, Vec<usize>) {
    let mut member = FixedBitSet::with_capacity(l.len());
    member.insert(l.bottom());
    let generators = l.atoms_below(a);
    let mut members = vec![l.bottom()];
    // Closing under joins with a generator is enough: every element of the
    // closure is a join of generators.
    let mut frontier = vec![l.bottom()];
    while let Some(x) = frontier.pop() {
        for &p in &generators {
            let y = l.join(x, p);
            if !member.contains(y) {
                member.insert(y);
                members.push(y);
                frontier.push(y);
            }
        }
    }
    members.sort_unstable();
    let t = l
        .induced(&members)
        .expect("join-closure with zero of a finite lattice is a lattice");
    (t, members)
}

/// Result of [`separating_reembedding`].
#[derive(Debug, Clone)]
pub struct Reembedding {
    /// The sublattice as a lattice of its own, elements sorted by index.
    pub sublattice: Arc<FiniteLattice>,
    /// `atom_restriction(M, 1_L)`.
    pub restriction: Arc<FiniteLattice>,
    /// Elements of `M` corresponding to the restriction's elements.
    pub restriction_in_ambient: Vec<usize>,
    /// `x -> join of the atoms of M below x`, verified.
    pub embedding: EmbeddingMap,
}

/// Re-embeds a sublattice `sub` of `m` into the join-closure of the atoms of
/// `m` below the top of `sub`, via `x -> V{p atom : p <= x}`.
pub fn separating_reembedding(m: &FiniteLattice, sub: &[usize]) -> Result<Reembedding> {
    if sub.is_empty() || !m.is_sublattice(sub) {
        return Err(ExtendError::PreconditionFailed(
            "element set is not a sublattice".into(),
        ));
    }
    jsd_only(m)?;
    if let Some((p, a, b)) = analysis::biatomic_violation(m) {
        return Err(ExtendError::PreconditionFailed(format!(
            "ambient lattice is not biatomic ({} <= {} v {})",
            m.label(p),
            m.label(a),
            m.label(b)
        )));
    }
    let atoms = m.atoms();
    for &x in sub {
        for &y in sub {
            if !m.leq(x, y) && !atoms.iter().any(|&p| m.leq(p, x) && !m.leq(p, y)) {
                return Err(ExtendError::SeparationFailed(
                    m.label(x).to_string(),
                    m.label(y).to_string(),
                ));
            }
        }
    }
    let mut sub_sorted = sub.to_vec();
    sub_sorted.sort_unstable();
    sub_sorted.dedup();
    let sublattice = Arc::new(m.induced(&sub_sorted)?);
    let top = m.join_all(sub_sorted.iter().copied());
    let (t, t_members) = atom_restriction(m, top);
    let map = sub_sorted
        .iter()
        .map(|&x| {
            let image = m.join_all(m.atoms_below(x));
            t_members
                .binary_search(&image)
                .expect("joins of atoms below the top lie in the restriction")
        })
        .collect();
    let t = Arc::new(t);
    let embedding = EmbeddingMap::verified(sublattice.clone(), t.clone(), map)?;
    Ok(Reembedding {
        sublattice,
        restriction: t,
        restriction_in_ambient: t_members,
        embedding,
    })
}

/// A closure operator given by its image: `f(x)` is the least image element
/// above `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureOperator {
    image: Vec<usize>,
    map: Vec<usize>,
}

impl ClosureOperator {
    /// `image` must be meet-closed and contain the top.
    pub fn from_image(l: &FiniteLattice, image: &[usize]) -> Self {
        let map = l
            .elements()
            .map(|x| {
                l.meet_all(image.iter().copied().filter(|&m| l.leq(x, m)))
            })
            .collect();
        let mut image = image.to_vec();
        image.sort_unstable();
        image.dedup();
        ClosureOperator { image, map }
    }

    /// Wraps an arbitrary self-map; use [`ClosureOperator::is_closure`] to
    /// check it.
    pub fn from_map(map: Vec<usize>) -> Self {
        let mut image = map.clone();
        image.sort_unstable();
        image.dedup();
        ClosureOperator { image, map }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Idempotent, extensive and monotone.
    pub fn is_closure(&self, l: &FiniteLattice) -> bool {
        let f = &self.map;
        l.elements().all(|x| {
            f[f[x]] == f[x]
                && l.leq(x, f[x])
                && l.elements().all(|y| !l.leq(x, y) || l.leq(f[x], f[y]))
        })
    }
}

/// A validated pair `(a; M)`: `a` neither zero nor an atom, `M` a
/// meet-subsemilattice containing zero and `[a, 1]`.
#[derive(Debug, Clone)]
pub struct ExtensionPair {
    lattice: Arc<FiniteLattice>,
    apex: usize,
    members: Vec<usize>,
}

impl ExtensionPair {
    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn apex(&self) -> usize {
        self.apex
    }

    /// Sorted elements of `M`.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn closure(&self) -> ClosureOperator {
        ClosureOperator::from_image(&self.lattice, &self.members)
    }
}

pub fn make_extension_pair(
    l: &Arc<FiniteLattice>,
    apex: usize,
    members: &[usize],
) -> Result<ExtensionPair> {
    atomistic_only(l)?;
    if apex == l.bottom() || l.is_atom(apex) {
        return Err(ExtendError::BadApex(l.label(apex).to_string()));
    }
    let mut m = members.to_vec();
    m.sort_unstable();
    m.dedup();
    let required = std::iter::once(l.bottom()).chain(l.filter(apex));
    for x in required {
        if m.binary_search(&x).is_err() {
            return Err(ExtendError::MissingFilter(l.label(x).to_string()));
        }
    }
    for &x in &m {
        for &y in &m {
            if m.binary_search(&l.meet(x, y)).is_err() {
                return Err(ExtendError::NotMeetClosed(
                    l.label(x).to_string(),
                    l.label(y).to_string(),
                ));
            }
        }
    }
    Ok(ExtensionPair {
        lattice: l.clone(),
        apex,
        members: m,
    })
}

/// Elementwise verdicts for the describing equations of a one-atom extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtensionChecks {
    /// Every element is an old one or `p* v x` for some `x` in `M`.
    pub generated: bool,
    /// `p* <= x` iff `a <= x`.
    pub new_atom_below: bool,
    /// `x <= p* v y` iff `x <= f(y)`.
    pub join_with_new_atom: bool,
    /// The atoms are the old atoms plus `p*`.
    pub atoms: bool,
}

impl ExtensionChecks {
    pub fn all(&self) -> bool {
        self.generated && self.new_atom_below && self.join_with_new_atom && self.atoms
    }
}

/// `L(a; M) = (L_a x {0}) u (M x {1})` with the componentwise order.
///
/// Element `i < |L|` of the result is the image `j(i)` of base element `i`;
/// the elements `(m, 1)` with `m` in `M` but not above `a` follow in index
/// order, the first of them being the new atom `p* = (0, 1)`.
#[derive(Debug, Clone)]
pub struct OneAtomExtension {
    pub base: Arc<FiniteLattice>,
    pub result: Arc<FiniteLattice>,
    pub embedding: EmbeddingMap,
    pub new_atom: usize,
    pub pair: ExtensionPair,
    pub closure: ClosureOperator,
    pub checks: ExtensionChecks,
}

impl OneAtomExtension {
    /// Index in the result of `(m, 1)`, for `m` in `M`.
    pub fn lifted(&self, m: usize) -> usize {
        self.result.join(self.new_atom, m)
    }
}

pub fn one_atom_extension(pair: &ExtensionPair) -> Result<OneAtomExtension> {
    one_atom_extension_labeled(pair, "p*")
}

/// Like [`one_atom_extension`], naming the new atom after `atom_label` (made
/// fresh if taken). `(m, 1)` for nonzero `m` is labelled `"<atom> v <m>"`.
pub fn one_atom_extension_labeled(
    pair: &ExtensionPair,
    atom_label: &str,
) -> Result<OneAtomExtension> {
    let l = &pair.lattice;
    let a = pair.apex;
    let n = l.len();
    // (element of L, second coordinate)
    let mut coords: Vec<(usize, bool)> = l.elements().map(|x| (x, l.leq(a, x))).collect();
    let fresh: Vec<usize> = pair
        .members
        .iter()
        .copied()
        .filter(|&m| !l.leq(a, m))
        .collect();
    coords.extend(fresh.iter().map(|&m| (m, true)));
    let star = l.fresh_label(atom_label);
    let mut labels = l.labels().to_vec();
    for &m in &fresh {
        let mut label = if m == l.bottom() {
            star.clone()
        } else {
            format!("{star} v {}", l.label(m))
        };
        while labels.contains(&label) {
            label.push('\'');
        }
        labels.push(label);
    }
    let result = FiniteLattice::from_order(labels, |i, j| {
        let ((x, e), (y, f)) = (coords[i], coords[j]);
        l.leq(x, y) && (!e || f)
    })?;
    let result = Arc::new(result);
    // (0, 1); zero is never above a nonzero apex, so it is among `fresh`
    let new_atom = n + fresh
        .iter()
        .position(|&m| m == l.bottom())
        .expect("M contains zero");
    let embedding = EmbeddingMap::verified(l.clone(), result.clone(), l.elements().collect())?;
    let closure = pair.closure();
    let checks = extension_checks(l, &result, new_atom, a, &closure, &pair.members);
    let ext = OneAtomExtension {
        base: l.clone(),
        result,
        embedding,
        new_atom,
        pair: pair.clone(),
        closure,
        checks,
    };
    if !ext.embedding.preserved().all() {
        return Err(ExtendError::PostconditionFailed(format!(
            "canonical map is not a <v,^,0,1,at>-embedding: {:?}",
            ext.embedding.preserved()
        )));
    }
    if !checks.all() {
        return Err(ExtendError::PostconditionFailed(format!(
            "one-atom extension equations fail: {checks:?}"
        )));
    }
    Ok(ext)
}

fn extension_checks(
    l: &FiniteLattice,
    r: &FiniteLattice,
    star: usize,
    apex: usize,
    f: &ClosureOperator,
    members: &[usize],
) -> ExtensionChecks {
    let n = l.len();
    let generated = r.elements().all(|e| {
        e < n || members.iter().any(|&m| r.join(star, m) == e)
    });
    let new_atom_below = l.elements().all(|x| r.leq(star, x) == l.leq(apex, x));
    let join_with_new_atom = l.elements().all(|x| {
        l.elements()
            .all(|y| r.leq(x, r.join(star, y)) == l.leq(x, f.apply(y)))
    });
    let mut expected: Vec<usize> = l.atoms();
    expected.push(star);
    let atoms = r.atoms() == expected;
    ExtensionChecks {
        generated,
        new_atom_below,
        join_with_new_atom,
        atoms,
    }
}

/// Obstruction to join-semidistributivity of `L(a; M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriteriaWitness {
    /// A maximal element of `L_a` outside `M`.
    MaximalOutside(usize),
    /// `f(x v u) = f(x v v)` with `u` not below `f(x)`.
    Collapse { x: usize, u: usize, v: usize },
}

/// Decides join-semidistributivity of `L(a; M)` from the base alone:
/// `Max L_a` must lie in `M`, and `f(x v u) = f(x v v)` for distinct atoms
/// must force `u <= f(x)`.
pub fn jsd_extension_criteria(pair: &ExtensionPair) -> Result<(bool, Option<CriteriaWitness>)> {
    let l = &pair.lattice;
    atomistic_only(l)?;
    if analysis::jsd_violation(l).is_some() {
        return Err(ExtendError::PreconditionFailed(
            "base lattice is not join-semidistributive".into(),
        ));
    }
    Ok(match criteria_witness(pair) {
        Some(w) => (false, Some(w)),
        None => (true, None),
    })
}

fn criteria_witness(pair: &ExtensionPair) -> Option<CriteriaWitness> {
    let l = &pair.lattice;
    let outside = l.complement_filter(pair.apex);
    for &x in &outside {
        let maximal = !outside.iter().any(|&y| l.lt(x, y));
        if maximal && !pair.contains(x) {
            return Some(CriteriaWitness::MaximalOutside(x));
        }
    }
    let f = pair.closure();
    let atoms = l.atoms();
    for x in l.elements() {
        for &u in &atoms {
            for &v in &atoms {
                if u != v
                    && f.apply(l.join(x, u)) == f.apply(l.join(x, v))
                    && !l.leq(u, f.apply(x))
                {
                    return Some(CriteriaWitness::Collapse { x, u, v });
                }
            }
        }
    }
    None
}

/// Post-check verdicts for one solved special problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolveChecks {
    pub closure: bool,
    pub jsd: bool,
    /// `p < p* v q` and `p* < a`.
    pub solves: bool,
    /// `p D u` in the base and `p* D u` in the extension for `u` in `∂(a)`.
    pub dependency_on_boundary: bool,
    /// The strict closure of `D` on old atoms is unchanged.
    pub strict_dependency_preserved: bool,
    /// `p* ◁ p*` iff some `u` in `∂(a)` has `u ◁ p` in the base.
    pub new_atom_cycle: bool,
    /// Lower boundedness carried over (vacuous when the base is not).
    pub lower_bounded: bool,
}

impl SolveChecks {
    pub fn all(&self) -> bool {
        self.closure
            && self.jsd
            && self.solves
            && self.dependency_on_boundary
            && self.strict_dependency_preserved
            && self.new_atom_cycle
            && self.lower_bounded
    }
}

/// An extension solving `p <= a v q` by a new atom `p* < a` with `p < p* v q`.
#[derive(Debug, Clone)]
pub struct SolvedProblem {
    pub extension: OneAtomExtension,
    pub checks: SolveChecks,
}

/// The closure operator `x -> p v x` if `q <= p v x`, else `x`.
pub fn special_closure(l: &FiniteLattice, p: usize, q: usize) -> ClosureOperator {
    ClosureOperator::from_map(
        l.elements()
            .map(|x| {
                let px = l.join(p, x);
                if l.leq(q, px) {
                    px
                } else {
                    x
                }
            })
            .collect(),
    )
}

/// Solves the special problem `p <= a v q` where `a` is minimal with that
/// property, by a one-atom extension along [`special_closure`].
pub fn solve_one_problem(
    l: &Arc<FiniteLattice>,
    p: usize,
    q: usize,
    a: usize,
) -> Result<SolvedProblem> {
    solve_one_problem_labeled(l, p, q, a, "p*")
}

pub fn solve_one_problem_labeled(
    l: &Arc<FiniteLattice>,
    p: usize,
    q: usize,
    a: usize,
    atom_label: &str,
) -> Result<SolvedProblem> {
    atomistic_only(l)?;
    jsd_only(l)?;
    if !l.is_atom(p) || !l.is_atom(q) || p == q {
        return Err(ExtendError::BadTriple(format!(
            "{} and {} must be distinct atoms",
            l.label(p),
            l.label(q)
        )));
    }
    if a == l.bottom() || l.is_atom(a) {
        return Err(ExtendError::BadTriple(format!(
            "apex {} must be neither zero nor an atom",
            l.label(a)
        )));
    }
    if !l.leq(p, l.join(a, q)) {
        return Err(ExtendError::BadTriple(format!(
            "{} is not below {} v {}",
            l.label(p),
            l.label(a),
            l.label(q)
        )));
    }
    if let Some(x) = l
        .down_set(a)
        .ones()
        .find(|&x| x != a && l.leq(p, l.join(x, q)))
    {
        return Err(ExtendError::MinimalityFailed(format!(
            "{} < {} already has {} <= {} v {}",
            l.label(x),
            l.label(a),
            l.label(p),
            l.label(x),
            l.label(q)
        )));
    }
    let f = special_closure(l, p, q);
    let closure_ok = f.is_closure(l);
    if !closure_ok {
        return Err(ExtendError::PostconditionFailed(
            "special map is not a closure operator".into(),
        ));
    }
    let pair = make_extension_pair(l, a, f.image())?;
    let ext = one_atom_extension_labeled(&pair, atom_label)?;
    let r = &ext.result;
    let star = ext.new_atom;

    let jsd = is_join_semidistributive(r);
    let solves = r.lt(p, r.join(star, q)) && r.lt(star, a);

    let boundary = decompose(l, a)?;
    let d_base = join_dependency(l, DependencyDomain::Atoms);
    let d_ext = join_dependency(r, DependencyDomain::Atoms);
    let dependency_on_boundary = boundary
        .iter()
        .all(|&u| d_base.depends(p, u) && d_ext.depends(star, u));
    let strict_dependency_preserved = same_strict_closure(&d_base, &d_ext, &l.atoms());
    let new_atom_cycle = d_ext.strictly_below(star, star)
        == boundary.iter().any(|&u| d_base.strictly_below(u, p));
    let lower_bounded = !is_lower_bounded(l) || is_lower_bounded(r);

    let checks = SolveChecks {
        closure: closure_ok,
        jsd,
        solves,
        dependency_on_boundary,
        strict_dependency_preserved,
        new_atom_cycle,
        lower_bounded,
    };
    if !checks.all() {
        return Err(ExtendError::PostconditionFailed(format!(
            "solving {} <= {} v {}: {checks:?}",
            l.label(p),
            l.label(a),
            l.label(q)
        )));
    }
    Ok(SolvedProblem {
        extension: ext,
        checks,
    })
}

fn same_strict_closure(
    before: &DependencyRelation,
    after: &DependencyRelation,
    atoms: &[usize],
) -> bool {
    atoms.iter().all(|&x| {
        atoms
            .iter()
            .all(|&y| before.strictly_below(x, y) == after.strictly_below(x, y))
    })
}

fn same_reflexive_closure(
    before: &DependencyRelation,
    after: &DependencyRelation,
    atoms: &[usize],
) -> bool {
    atoms.iter().all(|&x| {
        atoms
            .iter()
            .all(|&y| before.below_or_equal(x, y) == after.below_or_equal(x, y))
    })
}

/// A minimal `x <= bound` with `p <= x v q`; ties go to the least index.
pub fn minimal_apex(l: &FiniteLattice, p: usize, q: usize, bound: usize) -> Result<usize> {
    if !l.leq(p, l.join(bound, q)) {
        return Err(ExtendError::PreconditionFailed(format!(
            "{} is not below {} v {}",
            l.label(p),
            l.label(bound),
            l.label(q)
        )));
    }
    let candidates: Vec<usize> = l
        .down_set(bound)
        .ones()
        .filter(|&x| l.leq(p, l.join(x, q)))
        .collect();
    Ok(candidates
        .iter()
        .copied()
        .find(|&x| !candidates.iter().any(|&y| l.lt(y, x)))
        .expect("a nonempty finite set has minimal elements"))
}

/// One call of [`solve_one_problem`] made by the biatomization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// Original problem being worked on, as labels `[p, a, b]`.
    pub original: [String; 3],
    /// Subproblem `[p, a, b]` whose decomposition triggered this step.
    pub problem: [String; 3],
    /// `b = c v q` (labels `[c, q]`); absent for the closing step.
    pub decomposition: Option<[String; 2]>,
    /// Atom playing the role of `q` in the special problem.
    pub partner: String,
    pub apex: String,
    pub new_atom: String,
    pub size_after: usize,
    pub checks: SolveChecks,
}

/// Output of [`partial_biatomization`].
#[derive(Debug, Clone)]
pub struct Biatomization {
    pub lattice: Arc<FiniteLattice>,
    /// Composite embedding; the identity on the original indices.
    pub embedding: EmbeddingMap,
    pub trace: Vec<TraceStep>,
    pub base_lower_bounded: bool,
}

struct Biatomizer {
    current: Arc<FiniteLattice>,
    trace: Vec<TraceStep>,
    original: [String; 3],
}

const MAX_DEPTH: usize = 256;

impl Biatomizer {
    fn revalidate<T>(&self, what: impl FnOnce() -> String) -> Result<T> {
        Err(ExtendError::ReValidationFailed(what()))
    }

    fn labels3(&self, p: usize, a: usize, b: usize) -> [String; 3] {
        let k = &self.current;
        [k.label(p).into(), k.label(a).into(), k.label(b).into()]
    }

    /// Finds an atom `y <= bound` with `p <= partner v y`, adjoining one if
    /// necessary.
    fn atom_below(
        &mut self,
        p: usize,
        partner: usize,
        bound: usize,
        problem: [String; 3],
        decomposition: Option<[String; 2]>,
    ) -> Result<usize> {
        let k = self.current.clone();
        if let Some(y) = k
            .atoms_below(bound)
            .into_iter()
            .find(|&y| k.leq(p, k.join(partner, y)))
        {
            return Ok(y);
        }
        let apex = minimal_apex(&k, p, partner, bound)?;
        if apex == k.bottom() || k.is_atom(apex) {
            // An atom apex would have been found above.
            return self.revalidate(|| {
                format!(
                    "minimal apex {} for {} <= {} v {} is degenerate",
                    k.label(apex),
                    k.label(p),
                    k.label(bound),
                    k.label(partner)
                )
            });
        }
        let label = format!("p*{}", self.trace.len() + 1);
        let solved = solve_one_problem_labeled(&k, p, partner, apex, &label).map_err(|e| {
            ExtendError::ReValidationFailed(format!(
                "{} <= {} v {}: {e}",
                k.label(p),
                k.label(apex),
                k.label(partner)
            ))
        })?;
        let ext = solved.extension;
        let star = ext.new_atom;
        self.current = ext.result.clone();
        self.trace.push(TraceStep {
            original: self.original.clone(),
            problem,
            decomposition,
            partner: k.label(partner).into(),
            apex: k.label(apex).into(),
            new_atom: ext.result.label(star).into(),
            size_after: ext.result.len(),
            checks: solved.checks,
        });
        Ok(star)
    }

    /// Atoms `x <= a`, `y <= b` of the (possibly extended) current lattice
    /// with `p <= x v y`.
    fn solve(&mut self, p: usize, a: usize, b: usize, depth: usize) -> Result<(usize, usize)> {
        let k = self.current.clone();
        if depth > MAX_DEPTH {
            return self.revalidate(|| "recursion too deep".into());
        }
        if !k.leq(p, k.join(a, b)) || a == k.bottom() || b == k.bottom() {
            return self.revalidate(|| {
                format!("{} <= {} v {} does not hold", k.label(p), k.label(a), k.label(b))
            });
        }
        if let Some(sol) = find_solution(&k, p, a, b) {
            return Ok(sol);
        }
        let lengths = atom_lengths(&k)?;
        let (a, b, swapped) = if lengths[b] >= 2 {
            (a, b, false)
        } else if lengths[a] >= 2 {
            (b, a, true)
        } else {
            return self.revalidate(|| {
                format!(
                    "{} <= {} v {} between atoms has no solution",
                    k.label(p),
                    k.label(a),
                    k.label(b)
                )
            });
        };
        let boundary = decompose(&k, b)?;
        let q = boundary[0];
        let c = k.join_all(boundary[1..].iter().copied());
        let problem = self.labels3(p, a, b);
        let decomposition = Some([k.label(c).to_string(), k.label(q).to_string()]);

        // p' <= a v c with p <= p' v q
        let bound = k.join(a, c);
        let p1 = self.atom_below(p, q, bound, problem.clone(), decomposition.clone())?;
        // x <= a, v <= c with p' <= x v v
        let (x, v) = self.solve(p1, a, c, depth + 1)?;
        // y <= v v q with p <= x v y
        let k2 = self.current.clone();
        if x == p {
            return self.revalidate(|| format!("{} lies below {}", k2.label(p), k2.label(a)));
        }
        let vq = k2.join(v, q);
        let y = self.atom_below(p, x, vq, problem, None)?;

        let k3 = &self.current;
        if !(k3.leq(x, a) && k3.is_atom(x) && k3.is_atom(y) && k3.leq(y, b) && k3.leq(p, k3.join(x, y))) {
            return self.revalidate(|| "assembled solution does not solve the problem".into());
        }
        Ok(if swapped { (y, x) } else { (x, y) })
    }
}

/// Extends a finite atomistic join-semidistributive lattice so that every
/// biatomicity problem of the original has an atomic solution, keeping the
/// result atomistic and join-semidistributive and the embedding a
/// `<v,^,0,1,at>`-embedding that preserves the dependency order on atoms.
///
/// Problems are taken in `(p, a, b)` order; problems created by the
/// extensions themselves are not queued.
pub fn partial_biatomization(l: &Arc<FiniteLattice>) -> Result<Biatomization> {
    if !is_atomistic(l) {
        return Err(ExtendError::PreconditionFailed("lattice is not atomistic".into()));
    }
    if !is_join_semidistributive(l) {
        return Err(ExtendError::PreconditionFailed(
            "lattice is not join-semidistributive".into(),
        ));
    }
    let base_lower_bounded = is_lower_bounded(l);
    let problems = analysis::biatomicity_problems(l);
    let mut state = Biatomizer {
        current: l.clone(),
        trace: Vec::new(),
        original: Default::default(),
    };
    for problem in problems.iter().filter(|pr| !pr.is_solved()) {
        state.original = state.labels3(problem.atom, problem.a, problem.b);
        state.solve(problem.atom, problem.a, problem.b, 0)?;
    }
    let result = state.current;
    let embedding = EmbeddingMap::verified(l.clone(), result.clone(), l.elements().collect())?;

    if !embedding.preserved().all() {
        return Err(ExtendError::PostconditionFailed(format!(
            "composite map is not a <v,^,0,1,at>-embedding: {:?}",
            embedding.preserved()
        )));
    }
    if !is_atomistic(&result) || !is_join_semidistributive(&result) {
        return Err(ExtendError::PostconditionFailed(
            "result is not atomistic and join-semidistributive".into(),
        ));
    }
    if let Some(pr) = problems
        .iter()
        .find(|pr| find_solution(&result, pr.atom, pr.a, pr.b).is_none())
    {
        return Err(ExtendError::PostconditionFailed(format!(
            "problem {} is unsolved",
            pr.describe(l)
        )));
    }
    let atoms = l.atoms();
    let d_before = join_dependency(l, DependencyDomain::Atoms);
    let d_after = join_dependency(&result, DependencyDomain::Atoms);
    if !same_reflexive_closure(&d_before, &d_after, &atoms) {
        return Err(ExtendError::PostconditionFailed(
            "dependency order on original atoms changed".into(),
        ));
    }
    if base_lower_bounded && !is_lower_bounded(&result) {
        return Err(ExtendError::PostconditionFailed(
            "lower boundedness was lost".into(),
        ));
    }
    Ok(Biatomization {
        lattice: result,
        embedding,
        trace: state.trace,
        base_lower_bounded,
    })
}

/// Trace as JSON lines, one record per extension step.
pub fn trace_jsonl(trace: &[TraceStep]) -> String {
    trace
        .iter()
        .map(|s| serde_json::to_string(s).expect("trace steps serialize") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{biatomicity_problems, is_biatomic};

    fn arc(labels: &[&str], covers: &[(&str, &str)]) -> Arc<FiniteLattice> {
        Arc::new(FiniteLattice::from_covers(labels, covers).unwrap())
    }

    fn square() -> Arc<FiniteLattice> {
        arc(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
    }

    fn chain(n: usize) -> Arc<FiniteLattice> {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Arc::new(FiniteLattice::from_order(labels, |x, y| x <= y).unwrap())
    }

    fn boolean(k: usize) -> Arc<FiniteLattice> {
        let labels: Vec<String> = (0..1usize << k).map(|m| format!("s{m}")).collect();
        Arc::new(FiniteLattice::from_order(labels, |x, y| x & !y == 0).unwrap())
    }

    #[test]
    fn completion_of_two_chain_is_identity() {
        let l = chain(2);
        let (m, e) = biatomic_completion(&l);
        assert_eq!(*m, *l);
        assert!(e.preserved().all());
    }

    #[test]
    fn completion_of_three_chain() {
        let l = chain(3);
        let (m, e) = biatomic_completion(&l);
        assert_eq!(m.len(), 5);
        assert!(is_atomistic(&m) && is_biatomic(&m));
        assert!(e.preserved().all());
        let top = l.top();
        let p = m.index_of("p(2)").unwrap();
        let q = m.index_of("q(2)").unwrap();
        assert_eq!(m.join(p, q), top);
    }

    #[test]
    fn restriction_examples() {
        let l = chain(3);
        let (t, members) = atom_restriction(&l, 2);
        assert_eq!(members, vec![0, 1]);
        assert_eq!(t.len(), 2);

        let cube = boolean(3);
        let coatom = 0b011;
        let (t, members) = atom_restriction(&cube, coatom);
        assert_eq!(members, vec![0, 1, 2, 3]);
        assert_eq!(t.atoms().len(), 2);
        let (t, _) = atom_restriction(&cube, cube.top());
        assert_eq!(t, *cube);
    }

    #[test]
    fn reembedding_chain_in_square() {
        let sq = square();
        let top = sq.top();
        let r = separating_reembedding(&sq, &[0, top]).unwrap();
        assert_eq!(r.restriction.len(), 4);
        assert_eq!(r.embedding.apply(1), r.restriction.top());
        assert!(r.embedding.preserved().lattice());
    }

    #[test]
    fn reembedding_requires_separation() {
        // A three-chain is biatomic and JSD, but its single atom cannot
        // separate the middle element from the top.
        let c = chain(3);
        assert!(matches!(
            separating_reembedding(&c, &[0, 1, 2]),
            Err(ExtendError::SeparationFailed(_, _))
        ));
    }

    #[test]
    fn extension_pair_validation() {
        let sq = square();
        let top = sq.top();
        assert!(make_extension_pair(&sq, top, &[0, top]).is_ok());
        assert!(matches!(
            make_extension_pair(&sq, 1, &[0, 1, top]),
            Err(ExtendError::BadApex(_))
        ));
        assert!(matches!(
            make_extension_pair(&sq, top, &[top]),
            Err(ExtendError::MissingFilter(_))
        ));
        let cube = boolean(3);
        // {0, 011, 101, 111}: 011 ^ 101 = 001 missing
        assert!(matches!(
            make_extension_pair(&cube, 7, &[0, 3, 5, 7]),
            Err(ExtendError::NotMeetClosed(_, _))
        ));
    }

    #[test]
    fn extension_of_square() {
        let sq = square();
        let top = sq.top();
        let pair = make_extension_pair(&sq, top, &[0, top]).unwrap();
        let ext = one_atom_extension(&pair).unwrap();
        assert_eq!(ext.result.len(), 5);
        assert_eq!(ext.new_atom, 4);
        assert_eq!(ext.result.label(4), "p*");
        assert!(ext.result.is_atom(ext.new_atom));
        assert!(ext.checks.all());
        for p in sq.atoms() {
            assert!(ext.result.is_atom(ext.embedding.apply(p)));
        }
        // M3 arises: not JSD, and the criteria agree.
        let (ok, witness) = jsd_extension_criteria(&pair).unwrap();
        assert!(!ok && witness.is_some());
        assert!(!is_join_semidistributive(&ext.result));
    }

    #[test]
    fn criteria_catch_missing_maximal() {
        let cube = boolean(3);
        let top = cube.top();
        // Max L_top are the coatoms; leave them out.
        let pair = make_extension_pair(&cube, top, &[0, top]).unwrap();
        let (ok, w) = jsd_extension_criteria(&pair).unwrap();
        assert!(!ok);
        assert!(matches!(w, Some(CriteriaWitness::MaximalOutside(_))));
        let ext = one_atom_extension(&pair).unwrap();
        assert!(!is_join_semidistributive(&ext.result));
    }

    #[test]
    fn special_problem_in_square_plus() {
        // Find any valid (p, q, a) in the cube and solve it.
        let cube = boolean(3);
        let mut solved_any = false;
        for p in cube.atoms() {
            for q in cube.atoms() {
                for a in cube.elements() {
                    if p == q || a == 0 || cube.is_atom(a) || !cube.leq(p, cube.join(a, q)) {
                        continue;
                    }
                    let minimal = cube
                        .down_set(a)
                        .ones()
                        .all(|x| x == a || !cube.leq(p, cube.join(x, q)));
                    if !minimal {
                        continue;
                    }
                    solved_any = true;
                    let s = solve_one_problem(&cube, p, q, a).unwrap();
                    let f = special_closure(&cube, p, q);
                    assert_eq!(f.apply(q), cube.join(p, q));
                    for x in cube.filter(a) {
                        assert_eq!(f.apply(x), x);
                    }
                    let r = &s.extension.result;
                    let star = s.extension.new_atom;
                    assert!(r.leq(p, r.join(star, q)) && r.leq(star, a));
                }
            }
        }
        // In a Boolean lattice p <= a v q forces p <= a or p = q.
        assert!(!solved_any);
    }

    #[test]
    fn solve_one_problem_errors() {
        let cube = boolean(3);
        assert!(matches!(
            solve_one_problem(&cube, 1, 1, 6),
            Err(ExtendError::BadTriple(_))
        ));
        assert!(matches!(
            solve_one_problem(&cube, 1, 2, 2),
            Err(ExtendError::BadTriple(_))
        ));
        let m3 = arc(
            &["0", "x", "y", "z", "1"],
            &[("0", "x"), ("0", "y"), ("0", "z"), ("x", "1"), ("y", "1"), ("z", "1")],
        );
        assert!(matches!(
            solve_one_problem(&m3, 1, 2, 4),
            Err(ExtendError::NotJsdBase(_))
        ));
    }

    #[test]
    fn minimal_apex_cases() {
        let cube = boolean(3);
        // p <= q: apex is zero.
        assert_eq!(minimal_apex(&cube, 1, 1, 7).unwrap(), 0);
        // Chain: least x with p <= x v q.
        let c = chain(4);
        assert_eq!(minimal_apex(&c, 2, 1, 3).unwrap(), 2);
        assert!(minimal_apex(&c, 3, 1, 2).is_err());
    }

    #[test]
    fn biatomization_of_biatomic_is_identity() {
        for l in [boolean(2), boolean(3), chain(2)] {
            let out = partial_biatomization(&l).unwrap();
            assert_eq!(*out.lattice, *l);
            assert!(out.trace.is_empty());
        }
        assert!(partial_biatomization(&chain(3)).is_err());
    }

    #[test]
    fn problems_of_square_all_solved() {
        assert!(biatomicity_problems(&square()).iter().all(|p| p.is_solved()));
    }
}
