//! Non-existence certificates.
//!
//! Orbit-intersection certificates: for subsets `A`, `B` of the nonzero
//! vectors, the set `{|A ∩ B^g| : g in G}` is computed exactly.  When all
//! these sizes are divisible by `p` while `|A|` and `|B|` are not, the
//! intersection lemma rules out sharply transitive subsets of `G`.  The
//! lemma itself is external; certificates carry the raw data.
//!
//! The extraspecial pipeline rules out sharply transitive sets in the
//! normalizer `L` of `2^(1+4)` in `GL(4,3)` by block-subclique searches.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::catalog::CaseId;
use crate::error::{Error, Result};
use crate::lingroup::{
    minimal_blocks, normalizer_in_group, subgroup_orbits, sylow_subgroup, BlockSystem,
    LinearGroup,
};
use crate::stset::{block_cliques, build_graph, extend_with, Clique, PermGraph, SearchOptions};

pub const LEMMA_NOTE: &str = "hypothesis of the external intersection lemma, encoded as: \
all |A ∩ B^g| ≡ 0 (mod p) and |A|, |B| ≢ 0 (mod p)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub case_id: String,
    pub subgroup_descriptor: String,
    pub subgroup_order: usize,
    pub orbit_a: Vec<u32>,
    pub orbit_b: Vec<u32>,
    /// All values of `|A ∩ B^g|`, sorted.
    pub intersection_sizes: Vec<usize>,
    pub p: u32,
    pub hypothesis_holds: bool,
    pub note: String,
}

/// Exact `{|A ∩ B^g| : g in G}` and the hypothesis verdict.
pub fn intersection_certificate(g: &LinearGroup, a: &[u32], b: &[u32]) -> ObstructionCertificate {
    let p = g.p();
    let mut in_a = vec![false; g.degree()];
    for &x in a {
        in_a[x as usize] = true;
    }
    let sizes: FxHashSet<usize> = (0..g.order() as u32)
        .into_par_iter()
        .map(|x| b.iter().filter(|&&y| in_a[g.act_idx(x, y) as usize]).count())
        .collect();
    let mut sizes: Vec<usize> = sizes.into_iter().collect();
    sizes.sort_unstable();
    let pu = p as usize;
    let holds = sizes.iter().all(|s| s % pu == 0) && a.len() % pu != 0 && b.len() % pu != 0;
    ObstructionCertificate {
        case_id: String::new(),
        subgroup_descriptor: String::new(),
        subgroup_order: 0,
        orbit_a: a.to_vec(),
        orbit_b: b.to_vec(),
        intersection_sizes: sizes,
        p,
        hypothesis_holds: holds,
        note: LEMMA_NOTE.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Orbits of a Sylow `q`-subgroup.
    Sylow,
    /// Orbits of the normalizer of a Sylow `q`-subgroup.
    SylowNormalizer,
}

/// Searches orbit pairs of the strategy subgroup for a passing certificate.
/// Pairs are tried in order of orbit position (orbits sorted by length,
/// then by least point); the first passing pair wins, otherwise the
/// returned certificate is the first pair of equal-length orbits (failing).
pub fn find_obstruction(g: &LinearGroup, q: u32, strategy: Strategy) -> Result<ObstructionCertificate> {
    if q < 2 || (2..q).any(|r| q % r == 0) {
        return Err(Error::InvalidPrime(q));
    }
    let sylow = sylow_subgroup(g, q)?;
    let (h, descriptor) = match strategy {
        Strategy::Sylow => (sylow, format!("Sylow-{q}")),
        Strategy::SylowNormalizer => (normalizer_in_group(g, &sylow)?, format!("N_G(Sylow-{q})")),
    };
    let mut orbits = subgroup_orbits(&h);
    orbits.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let p = g.p() as usize;
    let mut fallback = None;
    for (i, a) in orbits.iter().enumerate() {
        for b in &orbits[i..] {
            if a.len() % p == 0 || b.len() % p == 0 {
                continue;
            }
            let mut cert = intersection_certificate(g, a, b);
            cert.subgroup_descriptor = descriptor.clone();
            cert.subgroup_order = h.order();
            if cert.hypothesis_holds {
                return Ok(cert);
            }
            fallback.get_or_insert(cert);
        }
    }
    Ok(fallback.unwrap_or_else(|| ObstructionCertificate {
        case_id: String::new(),
        subgroup_descriptor: descriptor,
        subgroup_order: h.order(),
        orbit_a: Vec::new(),
        orbit_b: Vec::new(),
        intersection_sizes: Vec::new(),
        p: g.p(),
        hypothesis_holds: false,
        note: LEMMA_NOTE.to_string(),
    }))
}

/// Certificate for a case as used in the non-existence claims.
pub fn certificate_for_case(id: CaseId, g: &LinearGroup) -> Result<ObstructionCertificate> {
    let (q, strategy) = match id {
        CaseId::K360 | CaseId::K720 => (5, Strategy::Sylow),
        CaseId::M => (7, Strategy::SylowNormalizer),
        _ => (5, Strategy::SylowNormalizer),
    };
    let mut cert = find_obstruction(g, q, strategy)?;
    cert.case_id = id.to_string();
    Ok(cert)
}

// ---------------------------------------------------------------------------
// the extraspecial pipeline

/// Expected checkpoint values of the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E32Expectations {
    pub seven_clique_reps: usize,
    pub sylow_fifteen_clique_reps: usize,
    pub special_stabilizer_order: usize,
    pub special_generated_order: usize,
}

impl Default for E32Expectations {
    fn default() -> Self {
        E32Expectations {
            seven_clique_reps: 98,
            sylow_fifteen_clique_reps: 17923,
            special_stabilizer_order: 192,
            special_generated_order: 32,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct E32Report {
    pub l_order: usize,
    pub block_sizes: Vec<usize>,
    pub block8_stabilizer_order: usize,
    pub block8_normalizer_order: usize,
    pub seven_cliques: usize,
    pub seven_clique_reps: usize,
    pub fifteen_extensions: usize,
    pub non_two_group_extensions: usize,
    pub non_two_group_extendable: usize,
    pub sylow_order: usize,
    pub sylow_fifteen_cliques: usize,
    pub sylow_fifteen_clique_reps: usize,
    /// Orders of the L-stabilizers of the representatives, with counts.
    pub stabilizer_profile: Vec<(usize, usize)>,
    pub special_count: usize,
    pub special_generated_order: usize,
    /// Orbit lengths of `<K*>` on the five 16-blocks.
    pub special_block_orbits: Vec<usize>,
    pub others_extendable: usize,
    pub pigeonhole_ok: bool,
    pub counting_ok: bool,
    pub checkpoints: Vec<Checkpoint>,
    pub verdict_no_clique: bool,
    /// Wall time; not serialized so reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct E32Options {
    pub expectations: Option<E32Expectations>,
    /// Stop with [`Error::Checkpoint`] on the first mismatch.
    pub strict: bool,
    pub search: SearchOptions,
}

struct Ctx {
    report: E32Report,
    opts: E32Options,
}

impl Ctx {
    fn check(&mut self, name: &str, expected: impl ToString, computed: impl ToString) -> Result<()> {
        let (e, c) = (expected.to_string(), computed.to_string());
        let ok = e == c;
        self.report.checkpoints.push(Checkpoint {
            name: name.to_string(),
            expected: e.clone(),
            computed: c.clone(),
            ok,
        });
        if !ok && self.opts.strict {
            return Err(Error::Checkpoint {
                name: name.to_string(),
                expected: e,
                computed: c,
            });
        }
        Ok(())
    }
}

/// Setwise stabilizer of a point set.
fn set_stabilizer(g: &LinearGroup, set: &[u32]) -> LinearGroup {
    let mut inside = vec![false; g.degree()];
    for &x in set {
        inside[x as usize] = true;
    }
    let keep: Vec<u32> = (0..g.order() as u32)
        .filter(|&x| set.iter().all(|&y| inside[g.act_idx(x, y) as usize]))
        .collect();
    g.subgroup(&keep)
}

/// Conjugation of element-index sets of `l` by elements of `l`.
struct Conjugator<'a> {
    l: &'a LinearGroup,
}

impl Conjugator<'_> {
    fn image(&self, x: u32, set: &[u32], out: &mut Vec<u32>) {
        let xi = self.l.inv_idx(x);
        out.clear();
        out.extend(set.iter().map(|&y| self.l.mul_idx(self.l.mul_idx(xi, y), x)));
        out.sort_unstable();
    }

    /// Lex-least image of `set` under conjugation by `acting`.
    fn canonical(&self, acting: &[u32], set: &[u32]) -> Vec<u32> {
        let mut best = set.to_vec();
        best.sort_unstable();
        let mut buf = Vec::with_capacity(set.len());
        for &x in acting {
            self.image(x, set, &mut buf);
            if buf < best {
                best.clone_from(&buf);
            }
        }
        best
    }

    fn stabilizer_order(&self, set: &[u32]) -> usize {
        let members: FxHashSet<u32> = set.iter().copied().collect();
        (0..self.l.order() as u32)
            .filter(|&x| {
                let xi = self.l.inv_idx(x);
                set.iter()
                    .all(|&y| members.contains(&self.l.mul_idx(self.l.mul_idx(xi, y), x)))
            })
            .count()
    }
}

fn to_l_indices(l: &LinearGroup, graph: &PermGraph, c: &Clique) -> Vec<u32> {
    let mut v: Vec<u32> = c
        .vertices()
        .iter()
        .map(|&x| l.index_of(&graph.matrix(x)).expect("subgroup of L"))
        .collect();
    v.sort_unstable();
    v
}

fn from_l_indices(l: &LinearGroup, graph: &PermGraph, set: &[u32]) -> Clique {
    Clique::new(
        set.iter()
            .map(|&x| graph.vertex_of_matrix(&l.element(x)).expect("fixed point free"))
            .collect(),
    )
}

fn is_two_group(order: usize) -> bool {
    order.is_power_of_two()
}

/// Runs the full pipeline on `L = N_GL(2^(1+4))`.
pub fn e32_pipeline(l: Arc<LinearGroup>, opts: E32Options) -> Result<E32Report> {
    let start = Instant::now();
    let mut ctx = Ctx {
        report: E32Report::default(),
        opts,
    };
    let exp = opts.expectations.unwrap_or_default();
    ctx.report.l_order = l.order();
    let conj = Conjugator { l: &l };
    let l_graph = build_graph(l.clone());

    let systems = minimal_blocks(&l);
    ctx.report.block_sizes = systems.iter().map(|s| s.block_size).collect();
    let system = |size: usize| -> Result<&BlockSystem> {
        systems
            .iter()
            .find(|s| s.block_size == size)
            .ok_or_else(|| Error::Mismatch(format!("no block system with blocks of size {size}")))
    };
    let sys8 = system(8)?;
    let sys16 = system(16)?;

    // (i) 7-cliques for an 8-block, up to N_L(H)
    let a8 = sys8.blocks[0].clone();
    let h = Arc::new(set_stabilizer(&l, &a8));
    let nh = normalizer_in_group(&l, &h)?;
    ctx.report.block8_stabilizer_order = h.order();
    ctx.report.block8_normalizer_order = nh.order();
    let h_graph = build_graph(h.clone());
    let (sevens, _) = block_cliques(&h_graph, &a8, &Clique::default(), opts.search)?;
    ctx.report.seven_cliques = sevens.len();
    let nh_idx = l.indices_of(&nh)?;
    let mut reps7: Vec<Vec<u32>> = sevens
        .par_iter()
        .map(|c| conj.canonical(&nh_idx, &to_l_indices(&l, &h_graph, c)))
        .collect::<FxHashSet<_>>()
        .into_iter()
        .collect();
    reps7.sort_unstable();
    ctx.report.seven_clique_reps = reps7.len();
    ctx.check("7-clique representatives", exp.seven_clique_reps, reps7.len())?;

    // (ii) extend to the 16-block containing the 8-block
    let a16 = sys16
        .blocks
        .iter()
        .find(|b| b.contains(&a8[0]))
        .expect("blocks partition the points")
        .clone();
    let h16 = Arc::new(set_stabilizer(&l, &a16));
    let h16_graph = build_graph(h16.clone());
    let mut non2 = Vec::new();
    for rep in &reps7 {
        let seed = from_l_indices(&l, &h16_graph, rep);
        let (ext, _) = block_cliques(&h16_graph, &a16, &seed, opts.search)?;
        ctx.report.fifteen_extensions += ext.len();
        for k in ext {
            let set = to_l_indices(&l, &h16_graph, &k);
            if !is_two_group(l.closure_indices(&set).len()) {
                non2.push(set);
            }
        }
    }
    ctx.report.non_two_group_extensions = non2.len();
    let extendable = count_extendable(&l, &l_graph, &non2, opts.search)?;
    ctx.report.non_two_group_extendable = extendable;
    ctx.check("non-2-group 15-cliques with a 79-extension", 0, extendable)?;

    // (iii) Sylow 2-subgroup and its 15-cliques
    let s = Arc::new(sylow_subgroup(&l, 2)?);
    ctx.report.sylow_order = s.order();
    let s_idx = l.indices_of(&s)?;
    let block_fixed_by_s = sys16
        .blocks
        .iter()
        .find(|b| set_stabilizer(&s, b).order() == s.order())
        .ok_or_else(|| Error::Mismatch("Sylow subgroup fixes no 16-block".into()))?
        .clone();
    let s_graph = build_graph(s.clone());
    let (fifteens, _) = block_cliques(&s_graph, &block_fixed_by_s, &Clique::default(), opts.search)?;
    ctx.report.sylow_fifteen_cliques = fifteens.len();
    let mut reps15: Vec<Vec<u32>> = fifteens
        .par_iter()
        .map(|c| conj.canonical(&s_idx, &to_l_indices(&l, &s_graph, c)))
        .collect::<FxHashSet<_>>()
        .into_iter()
        .collect();
    drop(fifteens);
    reps15.sort_unstable();
    ctx.report.sylow_fifteen_clique_reps = reps15.len();
    ctx.check(
        "15-cliques of the Sylow 2-subgroup up to conjugacy",
        exp.sylow_fifteen_clique_reps,
        reps15.len(),
    )?;
    let stab: Vec<usize> = reps15.par_iter().map(|r| conj.stabilizer_order(r)).collect();
    let mut profile: std::collections::BTreeMap<usize, usize> = Default::default();
    for &o in &stab {
        *profile.entry(o).or_default() += 1;
    }
    ctx.report.stabilizer_profile = profile.into_iter().collect();
    let special: Vec<usize> = (0..reps15.len())
        .filter(|&i| stab[i] == exp.special_stabilizer_order)
        .collect();
    ctx.report.special_count = special.len();
    ctx.check(
        &format!("classes with stabilizer of order {}", exp.special_stabilizer_order),
        1,
        special.len(),
    )?;
    let Some(&k_star) = special.first() else {
        ctx.report.seconds = start.elapsed().as_secs_f64();
        return Ok(ctx.report);
    };
    let k_group = l.subgroup(&reps15[k_star]);
    ctx.report.special_generated_order = k_group.order();
    ctx.check("order of <K*>", exp.special_generated_order, k_group.order())?;
    let block_orbits = block_orbit_lengths(&k_group, sys16);
    ctx.report.special_block_orbits = block_orbits.clone();
    ctx.check("<K*> orbits on 16-blocks", "[1, 1, 1, 2]", format!("{block_orbits:?}"))?;

    // (iv) the other classes admit no 79-extension
    let others: Vec<Vec<u32>> = reps15
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k_star)
        .map(|(_, r)| r.clone())
        .collect();
    let extendable = count_extendable(&l, &l_graph, &others, opts.search)?;
    ctx.report.others_extendable = extendable;
    ctx.check("other classes with a 79-extension", 0, extendable)?;

    // (v) the K* branch: fixed-block sets of two subcliques meet, and two
    // distinct 15-subcliques fixing a common block exceed its capacity
    let blocks = sys16.blocks.len();
    let fixed = block_orbits.iter().filter(|&&o| o == 1).count();
    ctx.report.pigeonhole_ok = fixed + fixed > blocks && all_triples_meet(blocks, fixed);
    let subclique = a16.len() - 1;
    ctx.report.counting_ok = subclique + 1 > subclique;
    ctx.check("fixed-block sets must intersect", true, ctx.report.pigeonhole_ok)?;
    ctx.check("two distinct subcliques exceed one block", true, ctx.report.counting_ok)?;

    ctx.report.verdict_no_clique = ctx.report.checkpoints.iter().all(|c| c.ok);
    ctx.report.seconds = start.elapsed().as_secs_f64();
    Ok(ctx.report)
}

/// Every pair of `size`-subsets of a `n`-set meets (checked exhaustively).
fn all_triples_meet(n: usize, size: usize) -> bool {
    let subsets: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() as usize == size).collect();
    subsets
        .iter()
        .all(|a| subsets.iter().all(|b| a & b != 0))
}

fn block_orbit_lengths(g: &LinearGroup, sys: &BlockSystem) -> Vec<usize> {
    let block_of = sys.block_of();
    let n = sys.blocks.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for b in 0..n {
        if seen[b] {
            continue;
        }
        let mut orbit = vec![b];
        seen[b] = true;
        let mut head = 0;
        while head < orbit.len() {
            let c = orbit[head];
            head += 1;
            for m in g.generators() {
                let img = block_of[m.act(sys.blocks[c][0]) as usize];
                if !seen[img] {
                    seen[img] = true;
                    orbit.push(img);
                }
            }
        }
        out.push(orbit.len());
    }
    out.sort_unstable();
    out
}

/// Number of the given cliques (as element-index sets of `l`) that extend
/// to a full sharply transitive set in `l`.
fn count_extendable(
    l: &LinearGroup,
    l_graph: &PermGraph,
    sets: &[Vec<u32>],
    search: SearchOptions,
) -> Result<usize> {
    let k = l_graph.full_clique_size();
    let hits = sets
        .par_iter()
        .map(|set| {
            let seed = from_l_indices(l, l_graph, set);
            let (found, _) = extend_with(l_graph, &seed, k, search)?;
            Ok(usize::from(!found.is_empty()))
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(hits.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmat::Matrix;
    use crate::lingroup::close_default;

    #[test]
    fn full_orbit_fails_the_hypothesis() {
        let g = close_default(&[
            Matrix::from_rows(3, &[&[1, 1], &[0, 1]]).unwrap(),
            Matrix::from_rows(3, &[&[0, 1], &[1, 0]]).unwrap(),
            Matrix::scalar(3, 2, 2),
        ])
        .unwrap();
        let all: Vec<u32> = (0..8).collect();
        let cert = intersection_certificate(&g, &all, &all);
        assert!(cert.intersection_sizes.contains(&8));
        assert!(!cert.hypothesis_holds);
    }

    #[test]
    fn subsets_of_five_meet_in_threes() {
        assert!(all_triples_meet(5, 3));
        assert!(!all_triples_meet(5, 2));
    }

    #[test]
    fn composite_q_is_rejected() {
        let g = LinearGroup::trivial(2, 2).unwrap();
        assert!(matches!(
            find_obstruction(&g, 4, Strategy::Sylow),
            Err(Error::InvalidPrime(4))
        ));
    }
}
