//! Finite matrix groups with full element enumeration.
//!
//! Every group handled here is small enough (a few thousand elements) to
//! keep its complete element list, a hash index, and optionally a Cayley
//! table and the permutation action on nonzero vectors.

use std::collections::VecDeque;
use std::sync::OnceLock;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpmat::{Matrix, VectorSpace, MAX_DIM};

/// Default bound on the order of a group produced by [`close`].
pub const DEFAULT_ORDER_BUDGET: usize = 100_000;
/// Default bound on `|GL(d,p)|` for [`normalizer_in_gl`].
pub const DEFAULT_SCAN_BUDGET: u64 = 30_000_000;
/// Groups up to this order get a full Cayley table.
const TABLE_LIMIT: usize = 8192;

/// Lookup tables derived from the element list.
#[derive(Debug)]
struct Tables {
    /// `mul[a * n + b]` is the index of `a * b`; empty above [`TABLE_LIMIT`].
    mul: Vec<u32>,
    inv: Vec<u32>,
    /// `action[g * points + v]` is the index of `v * g`.
    action: Vec<u32>,
    fpf: Vec<bool>,
}

/// A fully enumerated subgroup of `GL(d, p)`.
#[derive(Debug)]
pub struct LinearGroup {
    space: VectorSpace,
    generators: Vec<Matrix>,
    elements: Vec<Matrix>,
    index: FxHashMap<Matrix, u32>,
    identity: u32,
    tables: OnceLock<Tables>,
}

impl Clone for LinearGroup {
    fn clone(&self) -> Self {
        Self {
            space: self.space,
            generators: self.generators.clone(),
            elements: self.elements.clone(),
            index: self.index.clone(),
            identity: self.identity,
            tables: OnceLock::new(),
        }
    }
}

impl PartialEq for LinearGroup {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.elements == other.elements
    }
}

impl Eq for LinearGroup {}

/// Closes a generating set under multiplication, failing once more than
/// `budget` elements have been produced.
pub fn close(generators: &[Matrix], budget: usize) -> Result<LinearGroup> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Mismatch("empty generator list".into()))?;
    let (p, d) = (first.p(), first.dim());
    for g in generators {
        if g.p() != p || g.dim() != d {
            return Err(Error::Mismatch("generators over different spaces".into()));
        }
        if !g.is_invertible() {
            return Err(Error::Singular);
        }
    }
    let id = Matrix::identity(p, d);
    let mut seen: FxHashSet<Matrix> = FxHashSet::default();
    seen.insert(id);
    // generators already in the partial closure are dropped; a new one only
    // needs to be applied to the old elements, everything it produces is
    // then closed under all kept generators
    let mut kept: Vec<Matrix> = Vec::new();
    let mut all: Vec<Matrix> = vec![id];
    for g in generators {
        if seen.contains(g) {
            continue;
        }
        kept.push(*g);
        let mut queue = VecDeque::new();
        for x in &all {
            let y = *x * *g;
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
        while let Some(x) = queue.pop_front() {
            if seen.len() > budget {
                return Err(Error::OrderBudget(budget));
            }
            all.push(x);
            for h in &kept {
                let y = x * *h;
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    if kept.is_empty() {
        kept.push(generators[0]);
    }
    all.sort_unstable();
    Ok(LinearGroup::assemble(VectorSpace::new(p, d)?, kept, all))
}

/// [`close`] with the default order budget.
pub fn close_default(generators: &[Matrix]) -> Result<LinearGroup> {
    close(generators, DEFAULT_ORDER_BUDGET)
}

impl LinearGroup {
    fn assemble(space: VectorSpace, generators: Vec<Matrix>, elements: Vec<Matrix>) -> Self {
        let index: FxHashMap<Matrix, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i as u32))
            .collect();
        let identity = index[&Matrix::identity(space.p(), space.dim())];
        Self {
            space,
            generators,
            elements,
            index,
            identity,
            tables: OnceLock::new(),
        }
    }

    /// The trivial group of `GL(d, p)`.
    pub fn trivial(p: u32, d: usize) -> Result<Self> {
        close(&[Matrix::identity(p, d)], 1)
    }

    /// Builds a group from a complete element set, choosing a small
    /// generating set greedily in lex order and verifying closure.
    pub fn from_element_set(p: u32, d: usize, mut elements: Vec<Matrix>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        let target: FxHashSet<Matrix> = elements.iter().copied().collect();
        let mut gens: Vec<Matrix> = Vec::new();
        let mut current: FxHashSet<Matrix> = FxHashSet::default();
        current.insert(Matrix::identity(p, d));
        for m in &elements {
            if current.contains(m) {
                continue;
            }
            gens.push(*m);
            let g = close(&gens, elements.len())?;
            current = g.elements.iter().copied().collect();
        }
        if gens.is_empty() {
            gens.push(Matrix::identity(p, d));
        }
        if current != target {
            return Err(Error::Mismatch("element set is not a group".into()));
        }
        Ok(Self::assemble(VectorSpace::new(p, d)?, gens, elements))
    }

    pub fn p(&self) -> u32 {
        self.space.p()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> VectorSpace {
        self.space
    }

    /// Number of nonzero vectors the group acts on.
    pub fn degree(&self) -> usize {
        self.space.nonzero_count() as usize
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    /// Elements in ascending lex order of their entry tuples.
    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> Matrix {
        self.elements[i as usize]
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.index.contains_key(m)
    }

    pub fn index_of(&self, m: &Matrix) -> Option<u32> {
        self.index.get(m).copied()
    }

    pub fn identity_index(&self) -> u32 {
        self.identity
    }

    fn tables(&self) -> &Tables {
        self.tables.get_or_init(|| {
            let n = self.order();
            let pts = self.degree();
            let mut action = vec![0u32; n * pts];
            let mut fpf = vec![true; n];
            for (g, m) in self.elements.iter().enumerate() {
                for v in 0..pts {
                    let w = m.act(v as u32);
                    action[g * pts + v] = w;
                    if w as usize == v {
                        fpf[g] = false;
                    }
                }
            }
            let inv: Vec<u32> = self
                .elements
                .iter()
                .map(|m| self.index[&m.inv().expect("group elements are invertible")])
                .collect();
            let mul = if n <= TABLE_LIMIT {
                let rows: Vec<Vec<u32>> = self
                    .elements
                    .par_iter()
                    .map(|a| {
                        self.elements
                            .iter()
                            .map(|b| self.index[&(*a * *b)])
                            .collect()
                    })
                    .collect();
                rows.concat()
            } else {
                Vec::new()
            };
            Tables {
                mul,
                inv,
                action,
                fpf,
            }
        })
    }

    /// Index of `a * b`.
    #[inline]
    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        let t = self.tables();
        if t.mul.is_empty() {
            self.index[&(self.elements[a as usize] * self.elements[b as usize])]
        } else {
            t.mul[a as usize * self.order() + b as usize]
        }
    }

    #[inline]
    pub fn inv_idx(&self, a: u32) -> u32 {
        self.tables().inv[a as usize]
    }

    /// Index of `v * g` for the element with index `g`.
    #[inline]
    pub fn act_idx(&self, g: u32, v: u32) -> u32 {
        self.tables().action[g as usize * self.degree() + v as usize]
    }

    /// The image row of `g` on all nonzero vectors.
    pub fn action_row(&self, g: u32) -> &[u32] {
        let pts = self.degree();
        &self.tables().action[g as usize * pts..(g as usize + 1) * pts]
    }

    #[inline]
    pub fn is_fpf_idx(&self, g: u32) -> bool {
        self.tables().fpf[g as usize]
    }

    pub fn element_order_idx(&self, g: u32) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.mul_idx(x, g);
            n += 1;
        }
        n
    }

    /// Closure inside this group of a set of element indices; sorted.
    pub fn closure_indices(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        seen[self.identity as usize] = true;
        let mut out = vec![self.identity];
        let mut head = 0;
        let gens: Vec<u32> = {
            let mut g = gens.to_vec();
            g.sort_unstable();
            g.dedup();
            g
        };
        while head < out.len() {
            let x = out[head];
            head += 1;
            for &g in &gens {
                let y = self.mul_idx(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The subgroup generated by the given element indices.
    pub fn subgroup(&self, gens: &[u32]) -> LinearGroup {
        let idx = self.closure_indices(gens);
        let elements: Vec<Matrix> = idx.iter().map(|&i| self.elements[i as usize]).collect();
        // keep only the generators not already in the span of earlier ones
        let mut sorted = gens.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut kept: Vec<u32> = Vec::new();
        let mut span = vec![false; self.order()];
        span[self.identity as usize] = true;
        for &g in &sorted {
            if span[g as usize] {
                continue;
            }
            kept.push(g);
            for x in self.closure_indices(&kept) {
                span[x as usize] = true;
            }
        }
        let generators: Vec<Matrix> = if kept.is_empty() {
            vec![self.element(self.identity)]
        } else {
            kept.iter().map(|&i| self.elements[i as usize]).collect()
        };
        Self::assemble(self.space, generators, elements)
    }

    /// Element indices (in this group) of the elements of `h`.
    pub fn indices_of(&self, h: &LinearGroup) -> Result<Vec<u32>> {
        h.elements
            .iter()
            .map(|m| self.index_of(m).ok_or(Error::NotContained))
            .collect()
    }

    pub fn is_subgroup_of(&self, other: &LinearGroup) -> bool {
        self.space == other.space && self.elements.iter().all(|m| other.contains(m))
    }

    pub fn is_transitive(&self) -> bool {
        orbit_of(self.space, &self.generators, 0).len() == self.degree()
    }

    /// True iff `h` is normalized by every generator of `self`.
    pub fn normalizes(&self, h: &LinearGroup) -> bool {
        self.generators.iter().all(|t| {
            let ti = t.inv().expect("invertible");
            h.generators.iter().all(|x| h.contains(&(ti * *x * *t)))
        })
    }

    /// Derived subgroup, generated by commutators of all element pairs
    /// drawn from the generators' closure.
    pub fn derived_subgroup(&self) -> LinearGroup {
        let n = self.order() as u32;
        let mut comms: FxHashSet<u32> = FxHashSet::default();
        for a in 0..n {
            for &gb in &self.generators {
                let b = self.index[&gb];
                let c = self.mul_idx(
                    self.mul_idx(self.inv_idx(a), self.inv_idx(b)),
                    self.mul_idx(a, b),
                );
                comms.insert(c);
            }
        }
        // normal closure of generator commutators
        let mut gens: Vec<u32> = comms.into_iter().collect();
        gens.sort_unstable();
        let mut sub = self.closure_indices(&gens);
        loop {
            let set: FxHashSet<u32> = sub.iter().copied().collect();
            let mut extra = Vec::new();
            for &x in &sub {
                for &g in &self.generators {
                    let gi = self.index[&g];
                    let y = self.mul_idx(self.mul_idx(self.inv_idx(gi), x), gi);
                    if !set.contains(&y) {
                        extra.push(y);
                    }
                }
            }
            if extra.is_empty() {
                break;
            }
            gens.extend(extra);
            sub = self.closure_indices(&gens);
        }
        self.subgroup(&gens)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            p: self.p(),
            d: self.dim(),
            order: self.order(),
            generators: self
                .generators
                .iter()
                .map(|m| m.to_json_entries())
                .collect(),
        }
    }
}

/// Persisted form of a group: generators plus declared order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupFile {
    pub p: u32,
    pub d: usize,
    pub order: usize,
    pub generators: Vec<Vec<u32>>,
}

impl GroupFile {
    /// Re-closes the generators and checks the declared order.
    pub fn load(&self) -> Result<LinearGroup> {
        let gens: Vec<Matrix> = self
            .generators
            .iter()
            .map(|e| Matrix::new(self.p, self.d, e))
            .collect::<Result<_>>()?;
        let g = close(&gens, self.order.max(1))?;
        if g.order() != self.order {
            return Err(Error::DeclaredOrder {
                declared: self.order,
                actual: g.order(),
            });
        }
        Ok(g)
    }
}

/// True iff no nonzero vector is fixed, decided by `det(m - I) != 0`.
pub fn is_fixed_point_free(m: &Matrix) -> bool {
    m.minus_identity().det() != 0
}

fn orbit_of(space: VectorSpace, gens: &[Matrix], start: u32) -> Vec<u32> {
    let n = space.nonzero_count() as usize;
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let v = out[head];
        head += 1;
        for g in gens {
            let w = g.act(v);
            if !seen[w as usize] {
                seen[w as usize] = true;
                out.push(w);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Orbits of `h` on the nonzero vectors, each sorted, ordered by their
/// minimal element.
pub fn subgroup_orbits(h: &LinearGroup) -> Vec<Vec<u32>> {
    orbits_of_generators(h.space, &h.generators)
}

pub fn orbits_of_generators(space: VectorSpace, gens: &[Matrix]) -> Vec<Vec<u32>> {
    let n = space.nonzero_count() as usize;
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if done[v] {
            continue;
        }
        let orb = orbit_of(space, gens, v as u32);
        for &w in &orb {
            done[w as usize] = true;
        }
        out.push(orb);
    }
    out
}

/// `|GL(d, p)|`.
pub fn gl_order(p: u32, d: usize) -> u64 {
    let q = (p as u64).pow(d as u32);
    (0..d).map(|i| q - (p as u64).pow(i as u32)).product()
}

/// Calls `f` on every element of `GL(d, p)` whose first row has an index
/// in `first_rows`, building rows in lex order and skipping rows that lie
/// in the span of the previous ones.
pub fn for_each_gl<F: FnMut(&Matrix)>(
    p: u32,
    d: usize,
    first_rows: std::ops::Range<u32>,
    mut f: F,
) {
    let space = VectorSpace::new(p, d).expect("valid space");
    let size = space.size() as usize;
    let mut entries = [0u32; MAX_DIM * MAX_DIM];
    // span[k] marks vector codes (0 = zero vector) in the span of rows < k
    let mut span: Vec<Vec<bool>> = vec![vec![false; size]; d + 1];
    span[0][0] = true;

    fn code_of(v: &[u8], p: u32) -> usize {
        v.iter()
            .fold(0usize, |acc, &c| acc * p as usize + c as usize)
    }

    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(&Matrix)>(
        row: usize,
        p: u32,
        d: usize,
        space: VectorSpace,
        first_rows: &std::ops::Range<u32>,
        entries: &mut [u32; MAX_DIM * MAX_DIM],
        span: &mut Vec<Vec<bool>>,
        f: &mut F,
    ) {
        if row == d {
            let m = Matrix::new(p, d, &entries[..d * d]).expect("valid matrix");
            f(&m);
            return;
        }
        let range = if row == 0 {
            first_rows.clone()
        } else {
            0..space.nonzero_count()
        };
        for v in range {
            let vec = space.vector(v);
            let code = code_of(&vec[..d], p);
            if span[row][code] {
                continue;
            }
            for j in 0..d {
                entries[row * d + j] = vec[j] as u32;
            }
            if row + 1 < d {
                // span of rows 0..=row
                let size = span[row].len();
                let mut next = vec![false; size];
                for c in 0..size {
                    if !span[row][c] {
                        continue;
                    }
                    let mut base = [0u8; MAX_DIM];
                    let mut x = c;
                    for slot in base[..d].iter_mut().rev() {
                        *slot = (x % p as usize) as u8;
                        x /= p as usize;
                    }
                    for s in 0..p {
                        let mut w = [0u8; MAX_DIM];
                        for k in 0..d {
                            w[k] = ((base[k] as u32 + s * vec[k] as u32) % p) as u8;
                        }
                        next[code_of(&w[..d], p)] = true;
                    }
                }
                span[row + 1] = next;
            }
            rec(row + 1, p, d, space, first_rows, entries, span, f);
        }
    }

    rec(0, p, d, space, &first_rows, &mut entries, &mut span, &mut f);
}

/// Normalizer of `g` in `GL(d, p)` by a streaming scan of the full
/// general linear group.
pub fn normalizer_in_gl(g: &LinearGroup, scan_budget: u64) -> Result<LinearGroup> {
    let (p, d) = (g.p(), g.dim());
    if gl_order(p, d) > scan_budget {
        return Err(Error::ScanBudget(scan_budget));
    }
    let gens = g.generators().to_vec();
    let rows = g.space().nonzero_count();
    let found: Vec<Vec<Matrix>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let mut local = Vec::new();
            for_each_gl(p, d, r..r + 1, |t| {
                let ti = t.inv().expect("GL element");
                if gens.iter().all(|x| g.contains(&(ti * *x * *t))) {
                    local.push(*t);
                }
            });
            local
        })
        .collect();
    LinearGroup::from_element_set(p, d, found.concat())
}

/// `{x in g : x^-1 h x = h}`.
pub fn normalizer_in_group(g: &LinearGroup, h: &LinearGroup) -> Result<LinearGroup> {
    if !h.is_subgroup_of(g) {
        return Err(Error::NotContained);
    }
    let hgens: Vec<u32> = g.indices_of(h)?;
    let hset: FxHashSet<u32> = hgens.iter().copied().collect();
    let hgen_idx: Vec<u32> = h
        .generators()
        .iter()
        .map(|m| g.index_of(m).expect("contained"))
        .collect();
    let keep: Vec<u32> = (0..g.order() as u32)
        .filter(|&x| {
            let xi = g.inv_idx(x);
            hgen_idx
                .iter()
                .all(|&y| hset.contains(&g.mul_idx(g.mul_idx(xi, y), x)))
        })
        .collect();
    Ok(g.subgroup(&keep))
}

fn prime_power_part(n: usize, q: usize) -> usize {
    let mut m = n;
    let mut out = 1;
    while m % q == 0 {
        m /= q;
        out *= q;
    }
    out
}

fn is_power_of(mut n: usize, q: usize) -> bool {
    while n % q == 0 {
        n /= q;
    }
    n == 1
}

/// A Sylow `q`-subgroup, grown from the lex-least `q`-element by
/// repeatedly adjoining the lex-least `q`-power element of the current
/// normalizer that lies outside the current subgroup.
pub fn sylow_subgroup(g: &LinearGroup, q: u32) -> Result<LinearGroup> {
    let q = q as usize;
    if q < 2 || g.order() % q != 0 {
        return Err(Error::NotADivisor(q as u32));
    }
    let target = prime_power_part(g.order(), q);
    let orders: Vec<usize> = (0..g.order() as u32)
        .map(|x| g.element_order_idx(x))
        .collect();
    let qpower: Vec<u32> = (0..g.order() as u32)
        .filter(|&x| orders[x as usize] > 1 && is_power_of(orders[x as usize], q))
        .collect();
    let mut gens = vec![qpower[0]];
    let mut current = g.subgroup(&gens);
    while current.order() < target {
        let n = normalizer_in_group(g, &current)?;
        let inside: FxHashSet<Matrix> = current.elements().iter().copied().collect();
        let next = qpower
            .iter()
            .copied()
            .find(|&x| {
                let m = g.element(x);
                n.contains(&m) && !inside.contains(&m)
            })
            .ok_or_else(|| Error::Mismatch("Sylow extension stalled".into()))?;
        gens.push(next);
        current = g.subgroup(&gens);
    }
    Ok(current)
}

/// A system of imprimitivity: equal-size blocks partitioning `V*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSystem {
    pub block_size: usize,
    /// Blocks sorted internally and ordered by minimal element.
    pub blocks: Vec<Vec<u32>>,
}

impl BlockSystem {
    /// The index of the block holding each point.
    pub fn block_of(&self) -> Vec<usize> {
        let n: usize = self.blocks.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (b, blk) in self.blocks.iter().enumerate() {
            for &v in blk {
                out[v as usize] = b;
            }
        }
        out
    }

    /// True iff every element of `g` maps blocks onto blocks.
    pub fn is_preserved_by(&self, g: &LinearGroup) -> bool {
        let owner = self.block_of();
        g.elements().iter().all(|m| {
            self.blocks.iter().all(|blk| {
                let target = owner[m.act(blk[0]) as usize];
                blk.iter().all(|&v| owner[m.act(v) as usize] == target)
            })
        })
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

/// The finest block system in which `alpha` and `beta` share a block.
pub fn finest_block_system(g: &LinearGroup, alpha: u32, beta: u32) -> BlockSystem {
    let n = g.degree();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut queue = VecDeque::new();
    let (a, b) = (find(&mut parent, alpha), find(&mut parent, beta));
    if a != b {
        parent[a.max(b) as usize] = a.min(b);
        queue.push_back((alpha, beta));
    }
    while let Some((x, y)) = queue.pop_front() {
        for gen in g.generators() {
            let (xg, yg) = (gen.act(x), gen.act(y));
            let (rx, ry) = (find(&mut parent, xg), find(&mut parent, yg));
            if rx != ry {
                parent[rx.max(ry) as usize] = rx.min(ry);
                queue.push_back((xg, yg));
            }
        }
    }
    let mut groups: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for v in 0..n as u32 {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut blocks: Vec<Vec<u32>> = groups.into_values().collect();
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    BlockSystem {
        block_size: blocks[0].len(),
        blocks,
    }
}

/// All nontrivial block systems generated by a single pair `(0, beta)`,
/// deduplicated and ordered by block size.
pub fn minimal_blocks(g: &LinearGroup) -> Vec<BlockSystem> {
    let n = g.degree() as u32;
    let mut out: Vec<BlockSystem> = Vec::new();
    for beta in 1..n {
        let sys = finest_block_system(g, 0, beta);
        if sys.block_size == n as usize {
            continue;
        }
        if !out.iter().any(|s| s.blocks == sys.blocks) {
            out.push(sys);
        }
    }
    out.sort_by(|a, b| {
        a.block_size
            .cmp(&b.block_size)
            .then(a.blocks.cmp(&b.blocks))
    });
    out
}

/// Subgroups `H` with `g0 <= H <= n`, one per `n`-conjugacy class, for a
/// normal subgroup `g0` of `n`. Ordered by order, then by the lex-least
/// element set.
pub fn intermediate_subgroups(n: &LinearGroup, g0: &LinearGroup) -> Result<Vec<LinearGroup>> {
    if !g0.is_subgroup_of(n) {
        return Err(Error::NotContained);
    }
    let q = Quotient::new(n, g0)?;
    let subs = q.subgroup_classes();
    let g0_gens: Vec<u32> = g0
        .generators()
        .iter()
        .map(|m| n.index_of(m).expect("contained"))
        .collect();
    let mut out: Vec<LinearGroup> = subs
        .iter()
        .map(|members| {
            let mut gens = g0_gens.clone();
            gens.extend(q.small_generating_set(members).iter().map(|&c| q.reps[c]));
            n.subgroup(&gens)
        })
        .collect();
    out.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then(a.elements().cmp(b.elements()))
    });
    Ok(out)
}

/// The quotient `n / g0` by coset labels.
struct Quotient {
    m: usize,
    /// coset representatives (lex-least element index of each coset)
    reps: Vec<u32>,
    table: Vec<usize>,
    identity: usize,
}

impl Quotient {
    fn new(n: &LinearGroup, g0: &LinearGroup) -> Result<Self> {
        let g0_idx = n.indices_of(g0)?;
        let mut coset = vec![usize::MAX; n.order()];
        let mut reps = Vec::new();
        for x in 0..n.order() as u32 {
            if coset[x as usize] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(x);
            for &h in &g0_idx {
                coset[n.mul_idx(h, x) as usize] = c;
            }
        }
        let m = reps.len();
        let mut table = vec![0usize; m * m];
        for a in 0..m {
            for b in 0..m {
                table[a * m + b] = coset[n.mul_idx(reps[a], reps[b]) as usize];
            }
        }
        let identity = coset[n.identity_index() as usize];
        Ok(Self {
            m,
            reps,
            table,
            identity,
        })
    }

    fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.m];
        seen[self.identity] = true;
        let mut list = vec![self.identity];
        let mut head = 0;
        while head < list.len() {
            let x = list[head];
            head += 1;
            for &g in gens {
                let y = self.table[x * self.m + g];
                if !seen[y] {
                    seen[y] = true;
                    list.push(y);
                }
            }
        }
        seen
    }

    fn small_generating_set(&self, members: &[bool]) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = self.closure(&gens);
        for x in 0..self.m {
            if members[x] && !current[x] {
                gens.push(x);
                current = self.closure(&gens);
            }
        }
        gens
    }

    fn inverse(&self, x: usize) -> usize {
        (0..self.m)
            .find(|&y| self.table[x * self.m + y] == self.identity)
            .expect("group element has an inverse")
    }

    // All subgroups by cyclic extension, reduced to conjugacy classes.
    fn subgroup_classes(&self) -> Vec<Vec<bool>> {
        let mut all: Vec<Vec<bool>> = vec![self.closure(&[])];
        let mut known: FxHashSet<Vec<bool>> = all.iter().cloned().collect();
        let mut head = 0;
        while head < all.len() {
            let h = all[head].clone();
            head += 1;
            let hgens: Vec<usize> = (0..self.m).filter(|&x| h[x]).collect();
            for x in 0..self.m {
                if h[x] {
                    continue;
                }
                let mut gens = hgens.clone();
                gens.push(x);
                let k = self.closure(&gens);
                if known.insert(k.clone()) {
                    all.push(k);
                }
            }
        }
        let invs: Vec<usize> = (0..self.m).map(|x| self.inverse(x)).collect();
        let mut classes: Vec<Vec<bool>> = Vec::new();
        let mut assigned: FxHashSet<Vec<bool>> = FxHashSet::default();
        for h in &all {
            if assigned.contains(h) {
                continue;
            }
            let mut conj: Vec<Vec<bool>> = Vec::new();
            for x in 0..self.m {
                let mut k = vec![false; self.m];
                for y in 0..self.m {
                    if h[y] {
                        let z = self.table[self.table[invs[x] * self.m + y] * self.m + x];
                        k[z] = true;
                    }
                }
                conj.push(k);
            }
            for k in conj {
                assigned.insert(k);
            }
            classes.push(h.clone());
        }
        classes
    }
}

/// An `n`-conjugate of `h` contained in `k`, if one exists.
pub fn conjugate_into(n: &LinearGroup, h: &LinearGroup, k: &LinearGroup) -> Option<LinearGroup> {
    n.elements().iter().find_map(|x| {
        let xi = x.inv().ok()?;
        let gens: Vec<Matrix> = h.generators().iter().map(|g| xi * *g * *x).collect();
        if gens.iter().all(|g| k.contains(g)) {
            close(&gens, h.order()).ok()
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl22() -> LinearGroup {
        let mut all = Vec::new();
        for_each_gl(2, 2, 0..3, |m| all.push(*m));
        close_default(&all).unwrap()
    }

    #[test]
    fn trivial_closure() {
        let g = close_default(&[Matrix::identity(5, 2)]).unwrap();
        assert_eq!(g.order(), 1);
        assert!(!g.is_transitive());
    }

    #[test]
    fn gl_2_2_has_order_six() {
        let g = gl22();
        assert_eq!(g.order(), 6);
        assert!(g.is_transitive());
        assert_eq!(gl_order(2, 2), 6);
    }

    #[test]
    fn enumeration_of_gl_counts_match() {
        for (p, d) in [(2u32, 2usize), (3, 2), (2, 3), (5, 2)] {
            let mut n = 0u64;
            let rows = VectorSpace::new(p, d).unwrap().nonzero_count();
            for_each_gl(p, d, 0..rows, |m| {
                assert!(m.is_invertible());
                n += 1;
            });
            assert_eq!(n, gl_order(p, d));
        }
    }

    #[test]
    fn order_budget_is_enforced() {
        let mut all = Vec::new();
        for_each_gl(3, 2, 0..8, |m| all.push(*m));
        assert!(matches!(close(&all, 10), Err(Error::OrderBudget(10))));
    }

    #[test]
    fn fixed_point_freeness() {
        assert!(!is_fixed_point_free(&Matrix::identity(3, 4)));
        assert!(is_fixed_point_free(&Matrix::scalar(3, 4, 2)));
        assert!(is_fixed_point_free(&Matrix::scalar(7, 2, 6)));
    }

    #[test]
    fn orbits_of_trivial_group() {
        let g = LinearGroup::trivial(3, 2).unwrap();
        let orbs = subgroup_orbits(&g);
        assert_eq!(orbs.len(), 8);
        assert!(orbs.iter().all(|o| o.len() == 1));
    }

    #[test]
    fn scalar_pairs_form_blocks() {
        let mut all = Vec::new();
        for_each_gl(3, 2, 0..8, |m| all.push(*m));
        let g = close_default(&all).unwrap();
        let minus = Matrix::scalar(3, 2, 2);
        let sys = finest_block_system(&g, 0, minus.act(0));
        assert_eq!(sys.block_size, 2);
        assert_eq!(sys.blocks.len(), 4);
        assert!(sys.is_preserved_by(&g));
        assert!(sys.blocks.iter().all(|b| b[1] == minus.act(b[0])));
        assert_eq!(minimal_blocks(&g), vec![sys]);
    }

    #[test]
    fn normalizer_in_group_edge_cases() {
        let g = gl22();
        assert_eq!(normalizer_in_group(&g, &g).unwrap(), g);
        let triv = LinearGroup::trivial(2, 2).unwrap();
        assert_eq!(normalizer_in_group(&g, &triv).unwrap(), g);
        let other = close_default(&[Matrix::scalar(3, 2, 2)]).unwrap();
        assert!(matches!(
            normalizer_in_group(&g, &other),
            Err(Error::NotContained)
        ));
    }

    #[test]
    fn group_file_round_trip() {
        let g = gl22();
        let f = g.to_file();
        let json = serde_json::to_string(&f).unwrap();
        let back: GroupFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.load().unwrap(), g);
        let mut bad = f.clone();
        bad.order = 5;
        assert!(bad.load().is_err());
    }
}
