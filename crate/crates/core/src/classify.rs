//! Parastrophy classes, Conway–Charnes fingerprints, autotopism groups and
//! quasifield reconstruction for enumerated spread sets.
//!
//! Spread sets are handled as sorted vectors of element indices of the
//! ambient group `G` (always containing the identity).  Two spread sets
//! with `<S> = <S'> = G` are parastrophic iff they are joined by the moves
//! `S -> S s^-1` (`s` in `S`), `S -> T^-1 S T` (`T` in `N_GL(G)`) and
//! `S -> S^-1`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::catalog::CaseId;
use crate::error::{Error, Result};
use crate::fpmat::{Matrix, VectorSpace};
use crate::lingroup::{close_default, LinearGroup};
use crate::stset::SpreadSet;

/// Element indices of `s` in `g`, sorted.
pub fn spread_indices(s: &SpreadSet, g: &LinearGroup) -> Result<Vec<u32>> {
    let mut idx = s
        .matrices
        .iter()
        .map(|m| g.index_of(m).ok_or(Error::NotContained))
        .collect::<Result<Vec<u32>>>()?;
    idx.sort_unstable();
    Ok(idx)
}

fn spread_from_indices(idx: &[u32], g: &LinearGroup, case: Option<CaseId>) -> SpreadSet {
    SpreadSet {
        matrices: idx.iter().map(|&i| g.element(i)).collect(),
        source_case: case,
    }
}

/// True iff the members of `s` generate all of `g`.
pub fn generates_full_group(s: &SpreadSet, g: &LinearGroup) -> bool {
    match spread_indices(s, g) {
        Ok(idx) => g.closure_indices(&idx).len() == g.order(),
        Err(_) => false,
    }
}

// ---------------------------------------------------------------------------
// parastrophy

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub t: Matrix,
    pub u: Matrix,
    pub inverted: bool,
}

#[derive(Clone, Debug)]
pub struct ParastrophyClass {
    pub representative: SpreadSet,
    /// Positions of the members in the input list, ascending.
    pub members: Vec<usize>,
    pub member_count: usize,
    /// `witnesses[i]` maps the representative onto member `members[i]`.
    pub witnesses: Vec<Witness>,
    /// Input position of the representative.
    pub representative_index: usize,
}

/// Element-index maps `x -> T^-1 x T` for the generators of `n`.
fn conjugation_maps(g: &LinearGroup, n: &LinearGroup) -> Result<Vec<(Matrix, Vec<u32>)>> {
    n.generators()
        .iter()
        .map(|t| {
            let ti = t.inv()?;
            let map = g
                .elements()
                .iter()
                .map(|x| g.index_of(&(ti * *x * *t)).ok_or(Error::NotContained))
                .collect::<Result<Vec<u32>>>()?;
            Ok((*t, map))
        })
        .collect()
}

pub fn parastrophy_classes(
    cliques: &[SpreadSet],
    g: &LinearGroup,
    n: &LinearGroup,
) -> Result<Vec<ParastrophyClass>> {
    let sets = cliques
        .iter()
        .map(|s| spread_indices(s, g))
        .collect::<Result<Vec<_>>>()?;
    parastrophy_classes_idx(&sets, g, n, cliques.first().and_then(|s| s.source_case))
}

/// Edge label: the move carries `X` to `T^-1 X U` (or to its inverse set
/// for the inversion move, where `T = U = I`).
#[derive(Clone, Copy)]
enum Move {
    Translate(u32),
    Conjugate(usize),
    Invert,
}

pub(crate) fn parastrophy_classes_idx(
    sets: &[Vec<u32>],
    g: &LinearGroup,
    n: &LinearGroup,
    case: Option<CaseId>,
) -> Result<Vec<ParastrophyClass>> {
    let lookup: FxHashMap<&[u32], usize> =
        sets.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let conj = conjugation_maps(g, n)?;
    let find = |img: &mut Vec<u32>| -> Result<usize> {
        img.sort_unstable();
        lookup.get(img.as_slice()).copied().ok_or(Error::Integrity)
    };
    // adjacency lists over the three move families
    let edges: Vec<Vec<(usize, Move)>> = sets
        .par_iter()
        .map(|s| {
            let mut out = Vec::with_capacity(s.len() + conj.len() + 1);
            let mut img = Vec::with_capacity(s.len());
            for &t in s {
                let ti = g.inv_idx(t);
                img.clear();
                img.extend(s.iter().map(|&x| g.mul_idx(x, ti)));
                out.push((find(&mut img)?, Move::Translate(t)));
            }
            for (k, (_, map)) in conj.iter().enumerate() {
                img.clear();
                img.extend(s.iter().map(|&x| map[x as usize]));
                out.push((find(&mut img)?, Move::Conjugate(k)));
            }
            img.clear();
            img.extend(s.iter().map(|&x| g.inv_idx(x)));
            out.push((find(&mut img)?, Move::Invert));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let p = g.p();
    let d = g.dim();
    let id = Matrix::identity(p, d);
    let mut seen = vec![false; sets.len()];
    let mut classes = Vec::new();
    // sets are compared lexicographically by sorted element index, which is
    // lex order on the sorted matrices; the first unseen in that order is
    // the least member of its class
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| sets[a].cmp(&sets[b]));
    for &root in &order {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut wit: BTreeMap<usize, Witness> = BTreeMap::new();
        wit.insert(
            root,
            Witness {
                t: id,
                u: id,
                inverted: false,
            },
        );
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let w = wit[&x].clone();
            for &(y, mv) in &edges[x] {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                let next = match mv {
                    Move::Invert => Witness {
                        t: w.t,
                        u: w.u,
                        inverted: !w.inverted,
                    },
                    Move::Translate(s) => compose(&w, &id, &g.element(g.inv_idx(s))),
                    Move::Conjugate(k) => compose(&w, &conj[k].0, &conj[k].0),
                };
                wit.insert(y, next);
                queue.push_back(y);
            }
        }
        let members: Vec<usize> = wit.keys().copied().collect();
        classes.push(ParastrophyClass {
            representative: spread_from_indices(&sets[root], g, case),
            member_count: members.len(),
            witnesses: wit.into_values().collect(),
            members,
            representative_index: root,
        });
    }
    Ok(classes)
}

/// Follows `w` (representative -> X) by the isotopy `X -> T2^-1 X U2`.
fn compose(w: &Witness, t2: &Matrix, u2: &Matrix) -> Witness {
    if w.inverted {
        Witness {
            t: w.t * *u2,
            u: w.u * *t2,
            inverted: true,
        }
    } else {
        Witness {
            t: w.t * *t2,
            u: w.u * *u2,
            inverted: false,
        }
    }
}

/// Checks `T^-1 S1 U = S2` (or `= S2^-1`), `T^-1 U` in the target set, and
/// that conjugation by `T` and by `U` carries `<S1>` onto `<S2>`.
pub fn isotopy_witness_verify(
    s1: &SpreadSet,
    s2: &SpreadSet,
    t: &Matrix,
    u: &Matrix,
    inverted: bool,
) -> bool {
    let Ok(ti) = t.inv() else { return false };
    if u.inv().is_err() {
        return false;
    }
    let target: FxHashSet<Matrix> = if inverted {
        s2.inverse().matrices.into_iter().collect()
    } else {
        s2.matrices.iter().copied().collect()
    };
    if target.len() != s1.matrices.len() {
        return false;
    }
    let image: FxHashSet<Matrix> = s1.matrices.iter().map(|x| ti * *x * *u).collect();
    if image != target || !target.contains(&(ti * *u)) {
        return false;
    }
    let (Ok(g1), Ok(g2)) = (close_default(&s1.matrices), close_default(&s2.matrices)) else {
        return false;
    };
    let ui = u.inv().expect("checked");
    g1.order() == g2.order()
        && g1.generators().iter().all(|x| g2.contains(&(ti * *x * *t)))
        && g1.generators().iter().all(|x| g2.contains(&(ui * *x * *u)))
}

// ---------------------------------------------------------------------------
// fingerprint

/// Sorted `(value, multiplicity)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint(pub Vec<(u64, u64)>);

impl Fingerprint {
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&(_, m)| m).sum()
    }
}

/// Conway–Charnes fingerprint of a spread set, in the given member order
/// (the result does not depend on the order).
pub fn fingerprint(s: &SpreadSet) -> Fingerprint {
    let m = &s.matrices;
    let n = m.len() + 1;
    let words = n.div_ceil(64);
    let field = m[0].field();
    let squares = field.square_table();
    // bordered sign matrix as (positive, negative) bit rows
    let mut pos = vec![0u64; n * words];
    let mut neg = vec![0u64; n * words];
    let set = |rows: &mut Vec<u64>, i: usize, j: usize| rows[i * words + j / 64] |= 1 << (j % 64);
    for j in 1..n {
        set(&mut pos, 0, j);
        set(&mut pos, j, 0);
    }
    for i in 0..m.len() {
        for j in 0..m.len() {
            if i == j {
                continue;
            }
            let det = m[i].try_sub(&m[j]).expect("same shape").det();
            if det == 0 {
                continue;
            }
            if squares[det as usize] {
                set(&mut pos, i + 1, j + 1);
            } else {
                set(&mut neg, i + 1, j + 1);
            }
        }
    }
    let mut counts: FxHashMap<u64, u64> = FxHashMap::default();
    for i in 0..n {
        for j in i..n {
            let (pi, ni) = (&pos[i * words..(i + 1) * words], &neg[i * words..(i + 1) * words]);
            let (pj, nj) = (&pos[j * words..(j + 1) * words], &neg[j * words..(j + 1) * words]);
            let mut v: i64 = 0;
            for w in 0..words {
                v += (pi[w] & pj[w]).count_ones() as i64 + (ni[w] & nj[w]).count_ones() as i64;
                v -= (pi[w] & nj[w]).count_ones() as i64 + (ni[w] & pj[w]).count_ones() as i64;
            }
            *counts.entry(v.unsigned_abs()).or_default() += if i == j { 1 } else { 2 };
        }
    }
    let mut out: Vec<(u64, u64)> = counts.into_iter().collect();
    out.sort_unstable();
    Fingerprint(out)
}

// ---------------------------------------------------------------------------
// finite groups given by a multiplication table

/// A small abstract group: elements `0..n`, `0` the identity.
#[derive(Clone, Debug)]
pub struct TableGroup {
    n: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl TableGroup {
    /// Builds the group from a closed element list and a multiplication.
    pub fn from_closed<T, F>(elements: &[T], identity: &T, mul: F) -> Result<Self>
    where
        T: Eq + std::hash::Hash + Clone + Sync,
        F: Fn(&T, &T) -> T + Sync,
    {
        let mut elems: Vec<T> = Vec::with_capacity(elements.len());
        elems.push(identity.clone());
        elems.extend(elements.iter().filter(|e| *e != identity).cloned());
        let index: FxHashMap<&T, u32> =
            elems.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
        let n = elems.len();
        let rows: Vec<Vec<u32>> = elems
            .par_iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| index.get(&mul(a, b)).copied().ok_or(Error::NotContained))
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mul: Vec<u32> = rows.concat();
        let mut inv = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        Ok(TableGroup { n, mul, inv })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.n + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut out = vec![0u32];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            head += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn derived_order(&self) -> usize {
        let comms: FxHashSet<u32> = (0..self.n as u32)
            .flat_map(|a| (0..self.n as u32).map(move |b| (a, b)))
            .map(|(a, b)| self.commutator(a, b))
            .collect();
        let gens: Vec<u32> = comms.into_iter().collect();
        self.closure(&gens).len()
    }

    pub fn center_order(&self) -> usize {
        (0..self.n as u32)
            .filter(|&z| (0..self.n as u32).all(|x| self.mul(z, x) == self.mul(x, z)))
            .count()
    }

    /// Conjugacy class sizes, sorted.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for x in 0..self.n as u32 {
            if seen[x as usize] {
                continue;
            }
            let mut size = 0;
            for g in 0..self.n as u32 {
                let y = self.mul(self.mul(self.inv(g), x), g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    size += 1;
                }
            }
            out.push(size);
        }
        out.sort_unstable();
        out
    }

    /// `(element order, count)` pairs.
    pub fn order_statistics(&self) -> Vec<(usize, usize)> {
        let mut m: BTreeMap<usize, usize> = BTreeMap::new();
        for x in 0..self.n as u32 {
            *m.entry(self.element_order(x)).or_default() += 1;
        }
        m.into_iter().collect()
    }

    pub fn battery(&self) -> InvariantBattery {
        InvariantBattery {
            order: self.order(),
            derived_order: self.derived_order(),
            center_order: self.center_order(),
            class_sizes: self.class_sizes(),
            order_statistics: self.order_statistics(),
        }
    }

    /// Generators `a`, `b` with `a^2 = b^3 = (ab)^7 = [a,b]^4 = 1`
    /// generating the whole group, which then is `PSL(2,7)` when the order
    /// is 168 (these relations present `PSL(2,7)`).
    pub fn psl27_witness(&self) -> Option<(u32, u32)> {
        if self.n != 168 {
            return None;
        }
        let of_order = |k: usize| -> Vec<u32> {
            (0..self.n as u32).filter(|&x| self.element_order(x) == k).collect()
        };
        let twos = of_order(2);
        let threes = of_order(3);
        for &a in &twos {
            for &b in &threes {
                if self.element_order(self.mul(a, b)) == 7
                    && self.element_order(self.commutator(a, b)) == 4
                    && self.closure(&[a, b]).len() == 168
                {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantBattery {
    pub order: usize,
    pub derived_order: usize,
    pub center_order: usize,
    pub class_sizes: Vec<usize>,
    pub order_statistics: Vec<(usize, usize)>,
}

impl InvariantBattery {
    /// Name of the first invariant on which the two differ.
    pub fn separating(&self, other: &Self) -> Option<&'static str> {
        if self.order != other.order {
            Some("order")
        } else if self.derived_order != other.derived_order {
            Some("abelianization")
        } else if self.center_order != other.center_order {
            Some("center")
        } else if self.class_sizes != other.class_sizes {
            Some("conjugacy class sizes")
        } else if self.order_statistics != other.order_statistics {
            Some("element orders")
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsoVerdict {
    NonIsomorphic { separating: String },
    Isomorphic { to: String },
    Undecided,
}

impl fmt::Display for IsoVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoVerdict::NonIsomorphic { separating } => {
                write!(f, "nonisomorphic (separated by {separating})")
            }
            IsoVerdict::Isomorphic { to } => write!(f, "isomorphic to {to}"),
            IsoVerdict::Undecided => f.write_str("undecided"),
        }
    }
}

/// Compares two groups by the invariant battery.
pub fn compare_groups(a: &TableGroup, b: &TableGroup) -> IsoVerdict {
    match a.battery().separating(&b.battery()) {
        Some(s) => IsoVerdict::NonIsomorphic {
            separating: s.to_string(),
        },
        None => {
            if a.psl27_witness().is_some() && b.psl27_witness().is_some() {
                IsoVerdict::Isomorphic {
                    to: "PSL(2,7)".to_string(),
                }
            } else {
                IsoVerdict::Undecided
            }
        }
    }
}

// ---------------------------------------------------------------------------
// autotopism groups

#[derive(Clone, Debug)]
pub struct AutotopismGroup {
    pub pairs: Vec<(Matrix, Matrix)>,
    pub order: usize,
    /// Orbit lengths on the `q + 1` infinite points, sorted.
    pub orbit_profile: Vec<usize>,
    /// Orbit lengths on the `q^2 - 1` nonzero affine points, sorted.
    pub affine_profile: Vec<usize>,
    /// The pairs as an abstract group (pair `i` is element `i` after the
    /// identity is moved to the front).
    pub table: TableGroup,
}

pub fn autotopism_group(s: &SpreadSet, g: &LinearGroup, n: &LinearGroup) -> Result<AutotopismGroup> {
    let idx = spread_indices(s, g)?;
    if g.closure_indices(&idx).len() != g.order() {
        return Err(Error::NotGenerating);
    }
    let members: FxHashSet<Matrix> = s.matrices.iter().copied().collect();
    // U = T s' with s' in S, since T^-1 I U must lie in S
    let pairs: Vec<(u32, u32)> = (0..n.order() as u32)
        .into_par_iter()
        .flat_map_iter(|t| {
            let tm = n.element(t);
            let ti = tm.inv().expect("group element");
            let members = &members;
            s.matrices.iter().filter_map(move |sp| {
                let u = tm * *sp;
                s.matrices
                    .iter()
                    .all(|x| members.contains(&(ti * *x * u)))
                    .then(|| (t, n.index_of(&u).expect("T and S lie in N")))
            })
        })
        .collect();
    let id = n.identity_index();
    let table = TableGroup::from_closed(&pairs, &(id, id), |a, b| {
        (n.mul_idx(a.0, b.0), n.mul_idx(a.1, b.1))
    })?;
    let mut ordered = vec![(id, id)];
    ordered.extend(pairs.iter().copied().filter(|&p| p != (id, id)));
    let mats: Vec<(Matrix, Matrix)> = ordered
        .iter()
        .map(|&(t, u)| (n.element(t), n.element(u)))
        .collect();
    let orbit_profile = infinite_profile(s, &mats);
    let affine_profile = affine_profile(g.space(), &mats);
    Ok(AutotopismGroup {
        order: mats.len(),
        pairs: mats,
        orbit_profile,
        affine_profile,
        table,
    })
}

fn orbit_lengths(n: usize, mut link: impl FnMut(&mut dyn FnMut(usize, usize))) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    link(&mut |a, b| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    });
    let mut sizes: FxHashMap<usize, usize> = FxHashMap::default();
    for x in 0..n {
        *sizes.entry(find(&mut parent, x)).or_default() += 1;
    }
    let mut out: Vec<usize> = sizes.into_values().collect();
    out.sort_unstable();
    out
}

/// Orbits on the infinite points: the two axes (fixed) and one point per
/// member `u` of `S`, moved to `T^-1 u U`.
fn infinite_profile(s: &SpreadSet, pairs: &[(Matrix, Matrix)]) -> Vec<usize> {
    let pos: FxHashMap<Matrix, usize> = s
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i + 2))
        .collect();
    orbit_lengths(s.matrices.len() + 2, |union| {
        for (t, u) in pairs {
            let ti = t.inv().expect("invertible");
            for (i, x) in s.matrices.iter().enumerate() {
                union(i + 2, pos[&(ti * *x * *u)]);
            }
        }
    })
}

/// Orbits of `(x, y) -> (x T, y U)` on nonzero vectors of `V + V`.
fn affine_profile(space: VectorSpace, pairs: &[(Matrix, Matrix)]) -> Vec<usize> {
    let q = space.size() as usize;
    // point (x, y) with x, y in 0..q where 0 is the zero vector
    let act = |m: &Matrix, v: usize| if v == 0 { 0 } else { m.act(v as u32 - 1) as usize + 1 };
    let lens = orbit_lengths(q * q, |union| {
        for (t, u) in pairs {
            let tx: Vec<usize> = (0..q).map(|v| act(t, v)).collect();
            let uy: Vec<usize> = (0..q).map(|v| act(u, v)).collect();
            for x in 0..q {
                for y in 0..q {
                    union(x * q + y, tx[x] * q + uy[y]);
                }
            }
        }
    });
    // drop the fixed origin
    let mut lens = lens;
    let one = lens.iter().position(|&l| l == 1).expect("origin is fixed");
    lens.remove(one);
    lens
}

// ---------------------------------------------------------------------------
// quasifields

/// Multiplication table on `q` elements; index 0 is zero, index `i > 0` is
/// the nonzero vector with index `i - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quasifield {
    pub p: u32,
    pub d: usize,
    q: usize,
    mul: Vec<u32>,
    add: Vec<u32>,
}

pub fn spread_to_quasifield(s: &SpreadSet) -> Result<Quasifield> {
    let first = s
        .matrices
        .first()
        .ok_or_else(|| Error::InvalidSpreadSet("empty".into()))?;
    let (p, d) = (first.p(), first.dim());
    let space = VectorSpace::new(p, d)?;
    let q = space.size() as usize;
    if s.matrices.len() != q - 1 {
        return Err(Error::InvalidSpreadSet("wrong size".into()));
    }
    // a(u) = e u with e the vector of index 0
    let mut by_label: Vec<Option<&Matrix>> = vec![None; q];
    for m in &s.matrices {
        let a = m.act(0) as usize + 1;
        if by_label[a].replace(m).is_some() {
            return Err(Error::InvalidSpreadSet("labels are not distinct".into()));
        }
    }
    let mut mul = vec![0u32; q * q];
    for (a, m) in by_label.iter().enumerate().skip(1) {
        let m = m.ok_or_else(|| Error::InvalidSpreadSet("label missing".into()))?;
        for x in 1..q {
            mul[x * q + a] = m.act(x as u32 - 1) + 1;
        }
    }
    let mut add = vec![0u32; q * q];
    for x in 0..q {
        for y in 0..q {
            let vx = (x > 0).then(|| x as u32 - 1);
            let vy = (y > 0).then(|| y as u32 - 1);
            add[x * q + y] = space.add(vx, vy).map_or(0, |v| v + 1);
        }
    }
    Ok(Quasifield { p, d, q, mul, add })
}

/// Outcome of the exhaustive axiom check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub q1_abelian_group: bool,
    pub q2_loop: bool,
    pub q3_right_distributive: bool,
    pub q4_zero: bool,
    pub identity_is_anchor: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.q1_abelian_group
            && self.q2_loop
            && self.q3_right_distributive
            && self.q4_zero
            && self.identity_is_anchor
    }
}

impl Quasifield {
    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.mul[x as usize * self.q + y as usize]
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.add[x as usize * self.q + y as usize]
    }

    fn is_latin(&self, table: &[u32], lo: usize) -> bool {
        let q = self.q;
        let n = q - lo;
        let mut seen = vec![0usize; q];
        let mut stamp = 0;
        for r in lo..q {
            stamp += 1;
            for c in lo..q {
                let v = table[r * q + c] as usize;
                if v < lo || seen[v] == stamp {
                    return false;
                }
                seen[v] = stamp;
            }
        }
        for c in lo..q {
            stamp += 1;
            for r in lo..q {
                let v = table[r * q + c] as usize;
                if seen[v] == stamp {
                    return false;
                }
                seen[v] = stamp;
            }
        }
        n > 0
    }

    /// Exhaustive check of the quasifield axioms.
    pub fn check_axioms(&self) -> AxiomReport {
        let q = self.q as u32;
        let range = 0..q;
        let q1 = self.is_latin(&self.add, 0)
            && range.clone().all(|x| self.add(0, x) == x)
            && range
                .clone()
                .all(|x| range.clone().all(|y| self.add(x, y) == self.add(y, x)))
            && range.clone().into_par_iter().all(|x| {
                (0..q).all(|y| (0..q).all(|z| self.add(self.add(x, y), z) == self.add(x, self.add(y, z))))
            });
        let q2 = self.is_latin(&self.mul, 1);
        let q3 = (0..q).into_par_iter().all(|x| {
            (0..q).all(|y| {
                let s = self.add(x, y);
                (0..q).all(|z| self.mul(s, z) == self.add(self.mul(x, z), self.mul(y, z)))
            })
        });
        let q4 = range.clone().all(|x| self.mul(x, 0) == 0 && self.mul(0, x) == 0);
        let e = 1;
        let anchor = (1..q).all(|x| self.mul(e, x) == x && self.mul(x, e) == x);
        AxiomReport {
            q1_abelian_group: q1,
            q2_loop: q2,
            q3_right_distributive: q3,
            q4_zero: q4,
            identity_is_anchor: anchor,
        }
    }
}

// ---------------------------------------------------------------------------
// case summaries

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub case_id: String,
    pub cliques: usize,
    pub parastrophy_classes: usize,
    pub proper_g_classes: usize,
    pub distinct_fingerprints: usize,
}

/// Everything derived from the complete clique list of one case.
#[derive(Clone, Debug)]
pub struct Classification {
    pub classes: Vec<ParastrophyClass>,
    /// Per class: whether the representative generates `G`.
    pub generating: Vec<bool>,
    /// Per class: fingerprint of the representative.
    pub fingerprints: Vec<Fingerprint>,
}

impl Classification {
    pub fn record(&self, case_id: &str, cliques: usize) -> ClassificationRecord {
        let distinct: FxHashSet<&Fingerprint> = self
            .fingerprints
            .iter()
            .zip(&self.generating)
            .filter(|(_, &g)| g)
            .map(|(f, _)| f)
            .collect();
        ClassificationRecord {
            case_id: case_id.to_string(),
            cliques,
            parastrophy_classes: self.classes.len(),
            proper_g_classes: self.generating.iter().filter(|&&g| g).count(),
            distinct_fingerprints: distinct.len(),
        }
    }

    /// Pairs of generating classes sharing a fingerprint.
    pub fn fingerprint_collisions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.classes.len() {
            for j in i + 1..self.classes.len() {
                if self.generating[i] && self.generating[j] && self.fingerprints[i] == self.fingerprints[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn classify(cliques: &[SpreadSet], g: &LinearGroup, n: &LinearGroup) -> Result<Classification> {
    let classes = parastrophy_classes(cliques, g, n)?;
    let generating = classes
        .par_iter()
        .map(|c| generates_full_group(&c.representative, g))
        .collect();
    let fingerprints = classes
        .par_iter()
        .map(|c| fingerprint(&c.representative))
        .collect();
    Ok(Classification {
        classes,
        generating,
        fingerprints,
    })
}

pub fn write_classification_csv(path: &std::path::Path, rows: &[ClassificationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutotopismReport {
    pub case_id: String,
    pub class_rep_id: usize,
    pub order: usize,
    pub orbit_profile: Vec<usize>,
    pub affine_profile: Vec<usize>,
    pub iso_verdict: Option<IsoVerdict>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lingroup::close;
    use crate::stset::{build_graph, enumerate_cliques};
    use std::sync::Arc;

    fn singer() -> Arc<LinearGroup> {
        let m = Matrix::from_rows(3, &[&[0, 1], &[1, 2]]).unwrap();
        Arc::new(close(&[m], 100).unwrap())
    }

    #[test]
    fn field_spread_set_is_a_field() {
        let g = singer();
        let graph = build_graph(g.clone());
        let c = enumerate_cliques(&graph, 7).remove(0);
        let s = SpreadSet::from_clique(&graph, &c, None);
        assert!(generates_full_group(&s, &g));
        let qf = spread_to_quasifield(&s).unwrap();
        assert!(qf.check_axioms().all());
        // commutative, since the spread set is GF(9)*
        assert!((1..9).all(|x| (1..9).all(|y| qf.mul(x, y) == qf.mul(y, x))));
        let f = fingerprint(&s);
        assert_eq!(f.total(), 81);
    }

    #[test]
    fn trivial_witness_verifies() {
        let g = singer();
        let s = SpreadSet {
            matrices: g.elements().to_vec(),
            source_case: None,
        };
        let i = Matrix::identity(3, 2);
        assert!(isotopy_witness_verify(&s, &s, &i, &i, false));
        assert!(isotopy_witness_verify(&s, &s, &i, &i, true));
    }

    #[test]
    fn table_group_invariants_of_cyclic_group() {
        let g = singer();
        let t = TableGroup::from_closed(g.elements(), &Matrix::identity(3, 2), |a, b| *a * *b).unwrap();
        assert_eq!(t.order(), 8);
        assert_eq!(t.derived_order(), 1);
        assert_eq!(t.center_order(), 8);
        assert_eq!(t.class_sizes(), vec![1; 8]);
        assert_eq!(t.order_statistics(), vec![(1, 1), (2, 1), (4, 2), (8, 4)]);
        assert!(t.psl27_witness().is_none());
    }
}
