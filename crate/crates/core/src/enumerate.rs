//! Lattices of a given size up to isomorphism.
//!
//! Every lattice with at least three elements arises from a smaller one by
//! adjoining an atom: removing an atom keeps the set closed under joins. The
//! search therefore grows lattices one atom at a time, trying every up-set
//! of `L - {0}` as the set of strict upper bounds of the new atom, and
//! rejects isomorphic copies with a canonical cover-matrix code.

use std::collections::BTreeMap;

use crate::generators::{GeneratorError, MeetSemilattice};
use crate::lattice::FiniteLattice;

pub const MAX_ENUMERATION_SIZE: usize = 10;

/// Order relation as a dense boolean matrix, `leq[x][y]`.
type Order = Vec<Vec<bool>>;

/// All lattices with `n` elements, one per isomorphism class, sorted by
/// canonical code. Elements are in canonical order and labelled `0`, `a`,
/// `b`, ..., `1`.
pub fn enumerate_lattices(n: usize) -> Result<Vec<FiniteLattice>, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidSize("lattices have at least one element".into()));
    }
    if n > MAX_ENUMERATION_SIZE {
        return Err(GeneratorError::TooLarge(format!(
            "enumeration of {n}-element lattices (at most {MAX_ENUMERATION_SIZE})"
        )));
    }
    let orders = orders_of_size(n);
    Ok(orders.into_values().map(|o| to_lattice(&o)).collect())
}

/// Every lattice with at most `n` elements, smallest first.
pub fn lattices_up_to(n: usize) -> Result<Vec<FiniteLattice>, GeneratorError> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(enumerate_lattices(k)?);
    }
    Ok(out)
}

/// Meet-semilattices with `k` elements up to isomorphism, obtained by
/// deleting the top of each `(k + 1)`-element lattice.
pub fn meet_semilattices(k: usize) -> Result<Vec<MeetSemilattice>, GeneratorError> {
    enumerate_lattices(k + 1)?
        .iter()
        .map(MeetSemilattice::from_lattice_without_top)
        .collect()
}

fn orders_of_size(n: usize) -> BTreeMap<u64, Order> {
    let mut level: BTreeMap<u64, Order> = BTreeMap::new();
    let one = vec![vec![true]];
    level.insert(canonical(&one).0, one);
    if n == 1 {
        return level;
    }
    let two = vec![vec![true, true], vec![false, true]];
    level.clear();
    level.insert(canonical(&two).0, two);
    for _ in 3..=n {
        let mut next = BTreeMap::new();
        for order in level.values() {
            for grown in add_atom(order) {
                let (code, canon) = canonical(&grown);
                next.entry(code).or_insert(canon);
            }
        }
        level = next;
    }
    level
}

// Candidates with the new atom appended as the last index; element 0 of
// `order` is assumed to be the bottom.
fn add_atom(order: &Order) -> Vec<Order> {
    let n = order.len();
    let rest: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << rest.len() {
        let upper: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &x)| x)
            .collect();
        if upper.is_empty() {
            continue;
        }
        // up-set test
        let closed = upper
            .iter()
            .all(|&x| (1..n).all(|y| !order[x][y] || upper.contains(&y)));
        if !closed {
            continue;
        }
        let mut grown: Order = order
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(false);
                r
            })
            .collect();
        let mut last = vec![false; n + 1];
        last[n] = true;
        for &x in &upper {
            last[x] = true;
        }
        grown[0][n] = true;
        grown.push(last);
        if is_lattice(&grown) {
            out.push(grown);
        }
    }
    out
}

fn is_lattice(order: &Order) -> bool {
    let n = order.len();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let ub: Vec<usize> = (0..n).filter(|&z| order[x][z] && order[y][z]).collect();
            ub.iter().any(|&z| ub.iter().all(|&w| order[z][w]))
        })
    })
}

fn covers_of(order: &Order) -> Vec<Vec<bool>> {
    let n = order.len();
    let mut c = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            if x != y && order[x][y] {
                c[x][y] = !(0..n).any(|z| z != x && z != y && order[x][z] && order[z][y]);
            }
        }
    }
    c
}

/// Minimum cover-matrix code over all relabellings that respect the
/// invariant cells, together with the relabelled order.
fn canonical(order: &Order) -> (u64, Order) {
    let n = order.len();
    let covers = covers_of(order);
    let mut height = vec![0usize; n];
    // heights by longest chain from below, in a linear extension
    let mut by_down: Vec<usize> = (0..n).collect();
    by_down.sort_by_key(|&x| (0..n).filter(|&y| order[y][x]).count());
    for &x in &by_down {
        height[x] = (0..n)
            .filter(|&y| covers[y][x])
            .map(|y| height[y] + 1)
            .max()
            .unwrap_or(0);
    }
    let key = |x: usize| {
        (
            height[x],
            (0..n).filter(|&y| order[y][x]).count(),
            (0..n).filter(|&y| order[x][y]).count(),
            (0..n).filter(|&y| covers[y][x]).count(),
            (0..n).filter(|&y| covers[x][y]).count(),
        )
    };
    let mut cells: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        cells.entry(key(x)).or_default().push(x);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();

    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    search(&cells, 0, &mut perm, &covers, &mut best);
    let (code, perm) = best.expect("at least one relabelling");
    let relabelled = (0..n)
        .map(|i| (0..n).map(|j| order[perm[i]][perm[j]]).collect())
        .collect();
    (code, relabelled)
}

fn search(
    cells: &[Vec<usize>],
    cell: usize,
    perm: &mut Vec<usize>,
    covers: &[Vec<bool>],
    best: &mut Option<(u64, Vec<usize>)>,
) {
    if cell == cells.len() {
        let code = encode(perm, covers);
        if best.as_ref().map_or(true, |(b, _)| code < *b) {
            *best = Some((code, perm.clone()));
        }
        return;
    }
    let mut items = cells[cell].clone();
    permute(&mut items, 0, &mut |order| {
        let base = perm.len();
        perm.extend_from_slice(order);
        search(cells, cell + 1, perm, covers, best);
        perm.truncate(base);
    });
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

// Cells are sorted by height first, so the relabelled order is a linear
// extension and only pairs i < j can be covers. The first pair is the most
// significant bit.
fn encode(perm: &[usize], covers: &[Vec<bool>]) -> u64 {
    let n = perm.len();
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            code = (code << 1) | covers[perm[i]][perm[j]] as u64;
        }
    }
    code
}

fn to_lattice(order: &Order) -> FiniteLattice {
    let n = order.len();
    let labels = (0..n)
        .map(|i| {
            if i == 0 {
                "0".to_string()
            } else if i == n - 1 {
                "1".to_string()
            } else {
                char::from(b'a' + (i - 1) as u8).to_string()
            }
        })
        .collect();
    FiniteLattice::from_order(labels, |x, y| order[x][y]).expect("enumerated order is a lattice")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sizes() {
        assert_eq!(enumerate_lattices(1).unwrap().len(), 1);
        assert_eq!(enumerate_lattices(2).unwrap().len(), 1);
        assert_eq!(enumerate_lattices(3).unwrap().len(), 1);
        assert_eq!(enumerate_lattices(4).unwrap().len(), 2);
        assert!(enumerate_lattices(0).is_err());
        assert!(matches!(enumerate_lattices(11), Err(GeneratorError::TooLarge(_))));
    }

    #[test]
    fn labels_and_bounds() {
        for l in enumerate_lattices(5).unwrap() {
            assert_eq!(l.label(l.bottom()), "0");
            assert_eq!(l.label(l.top()), "1");
            assert_eq!(l.bottom(), 0);
            assert_eq!(l.top(), 4);
        }
    }

    #[test]
    fn deterministic_order() {
        let a = enumerate_lattices(6).unwrap();
        let b = enumerate_lattices(6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn meet_semilattice_counts() {
        assert_eq!(meet_semilattices(1).unwrap().len(), 1);
        assert_eq!(meet_semilattices(3).unwrap().len(), 2);
        assert_eq!(meet_semilattices(4).unwrap().len(), 5);
    }
}
