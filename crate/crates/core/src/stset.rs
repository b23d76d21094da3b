//! Permutation graphs and sharply transitive sets.
//!
//! A set `S ∋ 1` of a transitive linear group is sharply transitive on the
//! nonzero vectors iff `S \ {1}` is a clique of size `q - 2` in the graph
//! whose vertices are the fixed point free elements, `u ~ v` iff `u v^-1`
//! is fixed point free.
//!
//! Two searches are provided.  Cliques that must cover a point set
//! exactly (full spread sets, block subcliques) are found by exact-cover
//! branching: every ordered pair `(x, y)` of distinct points needs exactly
//! one member mapping `x` to `y`, and the search always branches on the
//! open pair with the fewest remaining candidates.  Other clique sizes go
//! through a greedy-coloring branch and bound.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::CaseId;
use crate::error::{Error, Result};
use crate::fpmat::Matrix;
use crate::lingroup::LinearGroup;

/// Number of rows of the pair table scanned when choosing a branching pair.
const BRANCH_ROWS: usize = 16;

#[derive(Clone, Debug)]
pub struct PermGraph {
    group: Arc<LinearGroup>,
    vertices: Vec<u32>,
    vertex_of: Vec<u32>,
    adjacency: Vec<FixedBitSet>,
    edges: usize,
}

pub fn build_graph(g: Arc<LinearGroup>) -> PermGraph {
    let vertices: Vec<u32> = (0..g.order() as u32).filter(|&x| g.is_fpf_idx(x)).collect();
    let mut vertex_of = vec![u32::MAX; g.order()];
    for (i, &x) in vertices.iter().enumerate() {
        vertex_of[x as usize] = i as u32;
    }
    let n = vertices.len();
    let adjacency: Vec<FixedBitSet> = vertices
        .par_iter()
        .map(|&u| {
            let mut row = FixedBitSet::with_capacity(n);
            for (j, &v) in vertices.iter().enumerate() {
                if u != v && g.is_fpf_idx(g.mul_idx(u, g.inv_idx(v))) {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let edges = adjacency.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2;
    PermGraph {
        group: g,
        vertices,
        vertex_of,
        adjacency,
        edges,
    }
}

impl PermGraph {
    pub fn group(&self) -> &Arc<LinearGroup> {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Group element index of vertex `v`.
    pub fn element_index(&self, v: u32) -> u32 {
        self.vertices[v as usize]
    }

    pub fn matrix(&self, v: u32) -> Matrix {
        self.group.element(self.vertices[v as usize])
    }

    /// Vertex of a group element index, if that element is fixed point free.
    pub fn vertex_of_element(&self, x: u32) -> Option<u32> {
        match self.vertex_of.get(x as usize) {
            Some(&v) if v != u32::MAX => Some(v),
            _ => None,
        }
    }

    pub fn vertex_of_matrix(&self, m: &Matrix) -> Option<u32> {
        self.vertex_of_element(self.group.index_of(m)?)
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].contains(v as usize)
    }

    pub fn neighbors(&self, v: u32) -> &FixedBitSet {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].count_ones(..)
    }

    /// Target clique size for a full sharply transitive set.
    pub fn full_clique_size(&self) -> usize {
        self.group.degree() - 1
    }

    pub fn is_clique(&self, vs: &[u32]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| self.adjacent(u, v)))
    }

    /// The matrices of a clique, in vertex order.
    pub fn clique_matrices(&self, c: &Clique) -> Vec<Matrix> {
        c.vertices().iter().map(|&v| self.matrix(v)).collect()
    }

    /// Re-expresses a clique of another graph (over a subgroup or an
    /// overgroup) in this graph.
    pub fn translate(&self, other: &PermGraph, c: &Clique) -> Option<Clique> {
        let vs = c
            .vertices()
            .iter()
            .map(|&v| self.vertex_of_matrix(&other.matrix(v)))
            .collect::<Option<Vec<_>>>()?;
        Some(Clique::new(vs))
    }
}

/// Sorted vertex indices into a [`PermGraph`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clique(Vec<u32>);

impl Clique {
    pub fn new(mut vs: Vec<u32>) -> Self {
        vs.sort_unstable();
        vs.dedup();
        Clique(vs)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Counters reported by a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub cliques: u64,
}

/// Search configuration.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Abort with [`Error::NodeBudget`] after this many nodes.
    pub node_budget: Option<u64>,
}

/// All cliques of size exactly `k`, sorted canonically.
pub fn enumerate_cliques(graph: &PermGraph, k: usize) -> Vec<Clique> {
    enumerate_cliques_with(graph, k, SearchOptions::default())
        .expect("no budget")
        .0
}

pub fn enumerate_cliques_with(
    graph: &PermGraph,
    k: usize,
    opts: SearchOptions,
) -> Result<(Vec<Clique>, SearchStats)> {
    extend_with(graph, &Clique::default(), k, opts)
}

/// All size-`k` cliques containing `seed`.
pub fn extend_to_size(graph: &PermGraph, seed: &Clique, k: usize) -> Vec<Clique> {
    extend_with(graph, seed, k, SearchOptions::default())
        .expect("no budget")
        .0
}

pub fn extend_with(
    graph: &PermGraph,
    seed: &Clique,
    k: usize,
    opts: SearchOptions,
) -> Result<(Vec<Clique>, SearchStats)> {
    if !graph.is_clique(seed.vertices()) || seed.len() > k {
        return Ok((Vec::new(), SearchStats::default()));
    }
    if seed.len() == k {
        let stats = SearchStats {
            nodes: 1,
            cliques: 1,
        };
        return Ok((vec![seed.clone()], stats));
    }
    if k == graph.full_clique_size() {
        let domain: Vec<u32> = (0..graph.group.degree() as u32).collect();
        cover_search(graph, &domain, seed, opts)
    } else {
        coloring_search(graph, seed, k, opts)
    }
}

/// All cliques that together with the identity are sharply transitive on
/// `block` (a block of imprimitivity, or any point set stabilized by
/// enough vertices), containing `seed`.  Only vertices stabilizing the
/// block take part.  The clique size is `|block| - 1`.
pub fn block_cliques(
    graph: &PermGraph,
    block: &[u32],
    seed: &Clique,
    opts: SearchOptions,
) -> Result<(Vec<Clique>, SearchStats)> {
    let mut domain = block.to_vec();
    domain.sort_unstable();
    domain.dedup();
    if !graph.is_clique(seed.vertices()) {
        return Ok((Vec::new(), SearchStats::default()));
    }
    cover_search(graph, &domain, seed, opts)
}

/// Elements of `clique` mapping `block` onto itself.
pub fn block_subclique(graph: &PermGraph, clique: &Clique, block: &[u32]) -> Clique {
    let g = &graph.group;
    let mut inside = vec![false; g.degree()];
    for &x in block {
        inside[x as usize] = true;
    }
    Clique::new(
        clique
            .vertices()
            .iter()
            .copied()
            .filter(|&v| {
                let e = graph.element_index(v);
                block.iter().all(|&x| inside[g.act_idx(e, x) as usize])
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// exact cover

struct Cover<'a> {
    graph: &'a PermGraph,
    /// domain size
    m: usize,
    /// local ids of the branching rows
    rows: Vec<usize>,
    /// img[r * nv + v]: local image of row point r under vertex v
    img: Vec<u16>,
    /// img_all[v * m + x]: local image of every domain point (for marking)
    nv: usize,
    k: usize,
    budget: Option<u64>,
    nodes: &'a AtomicU64,
}

struct CoverState {
    covered: Vec<bool>,
    counts: Vec<u32>,
    chosen: Vec<u32>,
    bufs: Vec<FixedBitSet>,
    found: Vec<Clique>,
}

fn cover_search(
    graph: &PermGraph,
    domain: &[u32],
    seed: &Clique,
    opts: SearchOptions,
) -> Result<(Vec<Clique>, SearchStats)> {
    let g = &graph.group;
    let m = domain.len();
    let nv = graph.vertex_count();
    let mut local = vec![u16::MAX; g.degree()];
    for (i, &x) in domain.iter().enumerate() {
        local[x as usize] = i as u16;
    }
    // vertices stabilizing the domain
    let mut cand = FixedBitSet::with_capacity(nv);
    for v in 0..nv {
        let e = graph.element_index(v as u32);
        if domain
            .iter()
            .all(|&x| local[g.act_idx(e, x) as usize] != u16::MAX)
        {
            cand.insert(v);
        }
    }
    let k = m.saturating_sub(1);
    if seed.vertices().iter().any(|&v| !cand.contains(v as usize)) || seed.len() > k {
        return Ok((Vec::new(), SearchStats::default()));
    }
    let nrows = m.min(BRANCH_ROWS);
    // spread the branching rows over the domain
    let rows: Vec<usize> = (0..nrows).map(|i| i * m / nrows).collect();
    let mut img = vec![0u16; nrows * nv];
    for (r, &x) in rows.iter().enumerate() {
        for v in cand.ones() {
            let e = graph.element_index(v as u32);
            img[r * nv + v] = local[g.act_idx(e, domain[x]) as usize];
        }
    }
    let nodes = AtomicU64::new(0);
    let cover = Cover {
        graph,
        m,
        rows,
        img,
        nv,
        k,
        budget: opts.node_budget,
        nodes: &nodes,
    };
    let mut state = cover.fresh_state();
    for &v in seed.vertices() {
        cand.intersect_with(&graph.adjacency[v as usize]);
        cover.mark(&mut state, v, true);
        state.chosen.push(v);
    }
    if state.chosen.len() == k {
        state.found.push(Clique::new(state.chosen.clone()));
        return Ok((
            state.found,
            SearchStats {
                nodes: 1,
                cliques: 1,
            },
        ));
    }
    // root split
    let Some(branch) = cover.choose(&mut state, &cand)? else {
        let n = nodes.load(Ordering::Relaxed);
        return Ok((
            Vec::new(),
            SearchStats {
                nodes: n,
                cliques: 0,
            },
        ));
    };
    let chosen0 = state.chosen.clone();
    let results: Vec<Result<Vec<Clique>>> = branch
        .par_iter()
        .map(|&v| {
            let mut st = cover.fresh_state();
            for &u in &chosen0 {
                cover.mark(&mut st, u, true);
                st.chosen.push(u);
            }
            let mut next = cand.clone();
            next.intersect_with(&graph.adjacency[v as usize]);
            cover.mark(&mut st, v, true);
            st.chosen.push(v);
            cover.rec(&mut st, next)?;
            Ok(st.found)
        })
        .collect();
    let mut found = Vec::new();
    for r in results {
        found.extend(r?);
    }
    found.sort_unstable();
    let stats = SearchStats {
        nodes: nodes.load(Ordering::Relaxed),
        cliques: found.len() as u64,
    };
    Ok((found, stats))
}

impl Cover<'_> {
    fn fresh_state(&self) -> CoverState {
        let mut covered = vec![false; self.rows.len() * self.m];
        for (r, &x) in self.rows.iter().enumerate() {
            covered[r * self.m + x] = true;
        }
        CoverState {
            covered,
            counts: vec![0; self.m],
            chosen: Vec::with_capacity(self.k),
            bufs: Vec::new(),
            found: Vec::new(),
        }
    }

    fn mark(&self, st: &mut CoverState, v: u32, on: bool) {
        for r in 0..self.rows.len() {
            let y = self.img[r * self.nv + v as usize] as usize;
            st.covered[r * self.m + y] = on;
        }
    }

    /// Candidates for the open pair with fewest candidates; `None` when
    /// some open pair has none.
    fn choose(&self, st: &mut CoverState, cand: &FixedBitSet) -> Result<Option<Vec<u32>>> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(b) = self.budget {
            if n > b {
                return Err(Error::NodeBudget(b));
            }
        }
        let need = self.k - st.chosen.len();
        if cand.count_ones(..) < need {
            return Ok(None);
        }
        let mut best = (u32::MAX, 0usize, 0usize);
        for r in 0..self.rows.len() {
            st.counts.iter_mut().for_each(|c| *c = 0);
            let row = &self.img[r * self.nv..(r + 1) * self.nv];
            for v in cand.ones() {
                st.counts[row[v] as usize] += 1;
            }
            let cov = &st.covered[r * self.m..(r + 1) * self.m];
            for y in 0..self.m {
                if cov[y] {
                    continue;
                }
                let c = st.counts[y];
                if c == 0 {
                    return Ok(None);
                }
                if c < best.0 {
                    best = (c, r, y);
                }
            }
        }
        let (_, r, y) = best;
        let row = &self.img[r * self.nv..(r + 1) * self.nv];
        Ok(Some(
            cand.ones()
                .filter(|&v| row[v] as usize == y)
                .map(|v| v as u32)
                .collect(),
        ))
    }

    fn rec(&self, st: &mut CoverState, cand: FixedBitSet) -> Result<()> {
        if st.chosen.len() == self.k {
            st.found.push(Clique::new(st.chosen.clone()));
            return Ok(());
        }
        let Some(branch) = self.choose(st, &cand)? else {
            return Ok(());
        };
        let depth = st.chosen.len();
        for v in branch {
            let mut next = st.bufs.get(depth).cloned().unwrap_or_default();
            next.clone_from(&cand);
            next.intersect_with(&self.graph.adjacency[v as usize]);
            self.mark(st, v, true);
            st.chosen.push(v);
            self.rec(st, next)?;
            st.chosen.pop();
            self.mark(st, v, false);
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// greedy-coloring branch and bound

struct Coloring<'a> {
    graph: &'a PermGraph,
    /// rank[v]: position in the order of descending degree, ties by index
    rank: Vec<u32>,
    by_rank: Vec<u32>,
    k: usize,
    budget: Option<u64>,
    nodes: &'a AtomicU64,
}

fn coloring_search(
    graph: &PermGraph,
    seed: &Clique,
    k: usize,
    opts: SearchOptions,
) -> Result<(Vec<Clique>, SearchStats)> {
    let nv = graph.vertex_count();
    let mut by_rank: Vec<u32> = (0..nv as u32).collect();
    by_rank.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let mut rank = vec![0u32; nv];
    for (i, &v) in by_rank.iter().enumerate() {
        rank[v as usize] = i as u32;
    }
    let nodes = AtomicU64::new(0);
    let search = Coloring {
        graph,
        rank,
        by_rank,
        k,
        budget: opts.node_budget,
        nodes: &nodes,
    };
    let mut p = FixedBitSet::with_capacity(nv);
    p.insert_range(..);
    for &v in seed.vertices() {
        p.intersect_with(&graph.adjacency[v as usize]);
    }
    let mut r = seed.vertices().to_vec();
    let mut found = Vec::new();
    search.expand(&mut r, p, &mut found)?;
    found.sort_unstable();
    let stats = SearchStats {
        nodes: nodes.load(Ordering::Relaxed),
        cliques: found.len() as u64,
    };
    Ok((found, stats))
}

impl Coloring<'_> {
    /// Greedy sequential coloring of `p` in rank order; returns vertices
    /// sorted by color with their color numbers (1-based).
    fn color(&self, p: &FixedBitSet) -> Vec<(u32, u32)> {
        let mut verts: Vec<u32> = p.ones().map(|v| self.rank[v]).collect();
        verts.sort_unstable();
        let mut uncolored: Vec<u32> = verts.iter().map(|&r| self.by_rank[r as usize]).collect();
        let mut out = Vec::with_capacity(uncolored.len());
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut class: Vec<u32> = Vec::new();
            let mut rest = Vec::new();
            for &v in &uncolored {
                if class.iter().all(|&u| !self.graph.adjacent(u, v)) {
                    class.push(v);
                } else {
                    rest.push(v);
                }
            }
            out.extend(class.into_iter().map(|v| (v, color)));
            uncolored = rest;
        }
        out
    }

    fn expand(&self, r: &mut Vec<u32>, mut p: FixedBitSet, found: &mut Vec<Clique>) -> Result<()> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(b) = self.budget {
            if n > b {
                return Err(Error::NodeBudget(b));
            }
        }
        let colored = self.color(&p);
        for &(v, c) in colored.iter().rev() {
            if r.len() + (c as usize) < self.k {
                return Ok(());
            }
            r.push(v);
            if r.len() == self.k {
                found.push(Clique::new(r.clone()));
            } else {
                let mut next = p.clone();
                next.intersect_with(&self.graph.adjacency[v as usize]);
                self.expand(r, next, found)?;
            }
            r.pop();
            p.set(v as usize, false);
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// spread sets

/// A sharply transitive set of matrices containing the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadSet {
    pub matrices: Vec<Matrix>,
    pub source_case: Option<CaseId>,
}

impl SpreadSet {
    /// The identity together with the clique members, sorted.
    pub fn from_clique(graph: &PermGraph, c: &Clique, source_case: Option<CaseId>) -> Self {
        let g = graph.group();
        let mut matrices = graph.clique_matrices(c);
        matrices.push(Matrix::identity(g.p(), g.dim()));
        matrices.sort_unstable();
        SpreadSet {
            matrices,
            source_case,
        }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn inverse(&self) -> SpreadSet {
        let mut matrices: Vec<Matrix> = self
            .matrices
            .iter()
            .map(|m| m.inv().expect("spread set members are invertible"))
            .collect();
        matrices.sort_unstable();
        SpreadSet {
            matrices,
            source_case: self.source_case,
        }
    }
}

/// Direct check that every pair of nonzero vectors `(x, y)` has exactly
/// one member mapping `x` to `y`.
pub fn verify_sharply_transitive(s: &SpreadSet) -> bool {
    let Some(first) = s.matrices.first() else {
        return false;
    };
    let (p, d) = (first.p(), first.dim());
    let n = (p as usize).pow(d as u32) - 1;
    if s.matrices.len() != n || s.matrices.iter().any(|m| m.p() != p || m.dim() != d) {
        return false;
    }
    let mut hits = vec![0u8; n * n];
    for m in &s.matrices {
        for x in 0..n {
            let y = m.act(x as u32);
            if y as usize >= n {
                return false;
            }
            let h = &mut hits[x * n + y as usize];
            *h += 1;
            if *h > 1 {
                return false;
            }
        }
    }
    hits.iter().all(|&h| h == 1)
}

// ---------------------------------------------------------------------------
// clique store

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueRecord {
    pub case_id: String,
    pub vertex_keys: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueSummary {
    pub case_id: String,
    pub graph_vertices: usize,
    pub clique_count: usize,
}

pub fn write_clique_store(
    path: &Path,
    case_id: &str,
    graph: &PermGraph,
    cliques: &[Clique],
) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for c in cliques {
        let rec = CliqueRecord {
            case_id: case_id.to_string(),
            vertex_keys: graph
                .clique_matrices(c)
                .iter()
                .map(|m| m.to_json_entries())
                .collect(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a clique store back into cliques of `graph`.
pub fn read_clique_store(path: &Path, graph: &PermGraph) -> Result<Vec<Clique>> {
    let g = graph.group();
    let r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CliqueRecord = serde_json::from_str(&line)?;
        let vs = rec
            .vertex_keys
            .iter()
            .map(|e| {
                let m = Matrix::new(g.p(), g.dim(), e)?;
                graph.vertex_of_matrix(&m).ok_or(Error::Integrity)
            })
            .collect::<Result<Vec<u32>>>()?;
        out.push(Clique::new(vs));
    }
    Ok(out)
}

pub fn write_summary_csv(path: &Path, rows: &[CliqueSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
