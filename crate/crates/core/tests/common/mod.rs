//! Oracles shared by the integration tests.  They deliberately avoid the
//! library's own shortcuts (index tables, restricted generators).
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::OnceLock;

use rmlt::catalog::Catalog;
use rmlt::fpmat::Matrix;
use rmlt::lingroup::LinearGroup;

pub fn catalog() -> &'static Catalog {
    static C: OnceLock<Catalog> = OnceLock::new();
    C.get_or_init(Catalog::new)
}

/// Spread-set criterion: `q^d - 1` members, pairwise differences invertible.
/// Together with the identity this is exactly sharp transitivity on the
/// nonzero vectors.
pub fn is_spread_set(ms: &[Matrix]) -> bool {
    let Some(m0) = ms.first() else { return false };
    let n = (m0.p() as usize).pow(m0.dim() as u32) - 1;
    if ms.len() != n || ms.iter().any(|m| m.det() == 0) {
        return false;
    }
    for (i, a) in ms.iter().enumerate() {
        for b in &ms[i + 1..] {
            match a.try_sub(b) {
                Ok(d) if d.det() != 0 => {}
                _ => return false,
            }
        }
    }
    true
}

type SetKey = BTreeSet<Matrix>;

fn key(ms: impl IntoIterator<Item = Matrix>) -> SetKey {
    ms.into_iter().collect()
}

/// Orbit of a set of matrices under right multiplication by `g`,
/// conjugation by `n` and elementwise inversion, over all sets (identity-
/// containing or not).
pub fn full_orbit(start: &[Matrix], g: &LinearGroup, n: &LinearGroup) -> HashSet<SetKey> {
    let first = key(start.iter().copied());
    let mut seen = HashSet::from([first.clone()]);
    let mut queue = VecDeque::from([first]);
    while let Some(s) = queue.pop_front() {
        let mut next = Vec::new();
        for u in g.generators() {
            next.push(key(s.iter().map(|x| *x * *u)));
        }
        for t in n.generators() {
            let ti = t.inv().unwrap();
            next.push(key(s.iter().map(|x| ti * *x * *t)));
        }
        next.push(key(s.iter().map(|x| x.inv().unwrap())));
        for k in next {
            if seen.insert(k.clone()) {
                queue.push_back(k);
            }
        }
    }
    seen
}

/// Partition of `sets` into full-action orbits, as sorted index lists.
pub fn brute_force_classes(sets: &[Vec<Matrix>], g: &LinearGroup, n: &LinearGroup) -> Vec<Vec<usize>> {
    let mut class_of = vec![usize::MAX; sets.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..sets.len() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let orbit = full_orbit(&sets[i], g, n);
        let c = classes.len();
        let mut members = Vec::new();
        for (j, s) in sets.iter().enumerate() {
            if class_of[j] == usize::MAX && orbit.contains(&key(s.iter().copied())) {
                class_of[j] = c;
                members.push(j);
            }
        }
        classes.push(members);
    }
    classes
}
