//! Construction catalog for the exceptional transitive linear groups.
//!
//! Every group is built from scratch by deterministic lex-ordered scans:
//! a characteristic subgroup `G0` is realized first, its normalizer in
//! `GL(d, p)` is computed, and the target group is picked among the
//! transitive subgroups between the two.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpmat::{blowup, ExtField, ExtMatrix, Matrix, VectorSpace};
use crate::lingroup::{
    close, close_default, for_each_gl, gl_order, intermediate_subgroups, normalizer_in_gl,
    normalizer_in_group, LinearGroup, DEFAULT_SCAN_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "4.a-48")]
    A48,
    #[serde(rename = "4.a-96")]
    A96,
    #[serde(rename = "4.b")]
    B,
    #[serde(rename = "4.c")]
    C,
    #[serde(rename = "4.e-240")]
    E240,
    #[serde(rename = "4.e-480")]
    E480,
    #[serde(rename = "4.e-960")]
    E960,
    #[serde(rename = "4.f")]
    F,
    #[serde(rename = "4.g")]
    G,
    #[serde(rename = "4.h")]
    H,
    #[serde(rename = "4.j-160")]
    J160,
    #[serde(rename = "4.j-320")]
    J320,
    #[serde(rename = "4.j-640")]
    J640,
    #[serde(rename = "4.j-1920")]
    J1920,
    #[serde(rename = "4.j-3840")]
    J3840,
    #[serde(rename = "4.k-360")]
    K360,
    #[serde(rename = "4.k-720")]
    K720,
    #[serde(rename = "4.l")]
    L,
    #[serde(rename = "4.m")]
    M,
}

impl CaseId {
    pub const ALL: [CaseId; 19] = [
        CaseId::A48,
        CaseId::A96,
        CaseId::B,
        CaseId::C,
        CaseId::E240,
        CaseId::E480,
        CaseId::E960,
        CaseId::F,
        CaseId::G,
        CaseId::H,
        CaseId::J160,
        CaseId::J320,
        CaseId::J640,
        CaseId::J1920,
        CaseId::J3840,
        CaseId::K360,
        CaseId::K720,
        CaseId::L,
        CaseId::M,
    ];

    /// The cases whose groups occur as right multiplication groups.
    pub const TABLE: [CaseId; 9] = [
        CaseId::A48,
        CaseId::A96,
        CaseId::B,
        CaseId::C,
        CaseId::E960,
        CaseId::F,
        CaseId::G,
        CaseId::H,
        CaseId::L,
    ];

    pub const J_TOWER: [CaseId; 5] = [
        CaseId::J160,
        CaseId::J320,
        CaseId::J640,
        CaseId::J1920,
        CaseId::J3840,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::A48 => "4.a-48",
            CaseId::A96 => "4.a-96",
            CaseId::B => "4.b",
            CaseId::C => "4.c",
            CaseId::E240 => "4.e-240",
            CaseId::E480 => "4.e-480",
            CaseId::E960 => "4.e-960",
            CaseId::F => "4.f",
            CaseId::G => "4.g",
            CaseId::H => "4.h",
            CaseId::J160 => "4.j-160",
            CaseId::J320 => "4.j-320",
            CaseId::J640 => "4.j-640",
            CaseId::J1920 => "4.j-1920",
            CaseId::J3840 => "4.j-3840",
            CaseId::K360 => "4.k-360",
            CaseId::K720 => "4.k-720",
            CaseId::L => "4.l",
            CaseId::M => "4.m",
        }
    }

    pub fn descriptor(&self) -> CaseDescriptor {
        let (p, d, order, g0_name, g0_order) = match self {
            CaseId::A48 => (5, 2, 48, "SL(2,3)", 24),
            CaseId::A96 => (5, 2, 96, "SL(2,3)", 24),
            CaseId::B => (7, 2, 144, "SL(2,3)", 24),
            CaseId::C => (11, 2, 240, "SL(2,3)", 24),
            CaseId::E240 => (3, 4, 240, "SL(2,5)", 120),
            CaseId::E480 => (3, 4, 480, "SL(2,5)", 120),
            CaseId::E960 => (3, 4, 960, "SL(2,5)", 120),
            CaseId::F => (11, 2, 600, "SL(2,5)", 120),
            CaseId::G => (19, 2, 1080, "SL(2,5)", 120),
            CaseId::H => (29, 2, 1680, "SL(2,5)", 120),
            CaseId::J160 => (3, 4, 160, "2^(1+4)", 32),
            CaseId::J320 => (3, 4, 320, "2^(1+4)", 32),
            CaseId::J640 => (3, 4, 640, "2^(1+4)", 32),
            CaseId::J1920 => (3, 4, 1920, "2^(1+4)", 32),
            CaseId::J3840 => (3, 4, 3840, "2^(1+4)", 32),
            CaseId::K360 => (2, 4, 360, "A6", 360),
            CaseId::K720 => (2, 4, 720, "A6", 360),
            CaseId::L => (2, 4, 2520, "A7", 2520),
            CaseId::M => (3, 6, 2184, "SL(2,13)", 2184),
        };
        CaseDescriptor {
            id: *self,
            p,
            d,
            expected_order: order,
            g0_name,
            g0_order,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseDescriptor {
    pub id: CaseId,
    pub p: u32,
    pub d: usize,
    pub expected_order: usize,
    pub g0_name: &'static str,
    pub g0_order: usize,
}

/// All supported descriptors in a stable order.
pub fn list_cases() -> Vec<CaseDescriptor> {
    CaseId::ALL.iter().map(|c| c.descriptor()).collect()
}

/// A built group together with its characteristic subgroup.
#[derive(Clone, Debug)]
pub struct BuiltCase {
    pub descriptor: CaseDescriptor,
    pub group: Arc<LinearGroup>,
    pub g0: Arc<LinearGroup>,
}

/// Outcome of [`verify_case`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case_id: CaseId,
    pub order: usize,
    pub order_ok: bool,
    pub transitive: bool,
    pub g0_order: usize,
    pub g0_order_ok: bool,
    pub g0_normal: bool,
    /// Order of the derived subgroup of `G0` (8 for `SL(2,3)`, 120 for
    /// the perfect group `SL(2,5)`), when `G0` is one of those.
    pub g0_derived_order: Option<usize>,
    pub g0_derived_ok: bool,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.order_ok && self.transitive && self.g0_order_ok && self.g0_normal && self.g0_derived_ok
    }
}

pub fn verify_case(built: &BuiltCase, c: &CaseDescriptor) -> CaseReport {
    let g = &built.group;
    let g0 = &built.g0;
    let g0_derived_order = match c.g0_name {
        "SL(2,3)" | "SL(2,5)" => Some(g0.derived_subgroup().order()),
        _ => None,
    };
    let g0_derived_ok = match (c.g0_name, g0_derived_order) {
        ("SL(2,3)", Some(n)) => n == 8,
        ("SL(2,5)", Some(n)) => n == 120,
        _ => true,
    };
    CaseReport {
        case_id: c.id,
        order: g.order(),
        order_ok: g.order() == c.expected_order,
        transitive: g.is_transitive(),
        g0_order: g0.order(),
        g0_order_ok: g0.order() == c.g0_order,
        g0_normal: g0.is_subgroup_of(g) && g.normalizes(g0),
        g0_derived_order,
        g0_derived_ok,
    }
}

/// Builds a single case with a fresh catalog.
pub fn build_case(c: &CaseDescriptor) -> Result<BuiltCase> {
    Catalog::new().build(c.id)
}

fn fail(case: CaseId, stage: &str) -> Error {
    Error::Construction {
        case: case.to_string(),
        stage: stage.to_string(),
    }
}

/// Builds cases and shares intermediate results (characteristic
/// subgroups and their normalizers) between them.
#[derive(Default)]
pub struct Catalog {
    asset_dir: Option<PathBuf>,
    sl23: [OnceLock<Arc<LinearGroup>>; 3],
    sl25: [OnceLock<Arc<LinearGroup>>; 3],
    e_family: OnceLock<Arc<Family>>,
    j_family: OnceLock<Arc<Family>>,
    gl42: OnceLock<Arc<Vec<Matrix>>>,
    a6: OnceLock<Arc<LinearGroup>>,
    built: [OnceLock<BuiltCase>; 19],
    normalizers: [OnceLock<Arc<LinearGroup>>; 19],
}

/// A characteristic subgroup, its normalizer, and all transitive groups
/// between them (one per conjugacy class).
#[derive(Debug)]
pub struct Family {
    pub g0: Arc<LinearGroup>,
    pub normalizer: Arc<LinearGroup>,
    pub transitive: Vec<Arc<LinearGroup>>,
    /// Further classes sharing an order with a member of `transitive`.
    pub extra: Vec<Arc<LinearGroup>>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// A catalog that looks for pinned generator files (`<case>.json`
    /// in the group-file format) in `dir`.
    pub fn with_asset_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            asset_dir: Some(dir.into()),
            ..Self::default()
        }
    }

    /// `N_GL(G)` for the group of a case.  For the `GL(4,3)` families the
    /// characteristic subgroup `G0` forces `N_GL(G) <= N_GL(G0)`, so the
    /// normalizer is computed inside the already known `N_GL(G0)`.
    pub fn normalizer(&self, id: CaseId) -> Result<Arc<LinearGroup>> {
        let slot = &self.normalizers[slot_of(id)];
        if let Some(n) = slot.get() {
            return Ok(n.clone());
        }
        let g = self.build(id)?.group;
        let n = match id {
            CaseId::E240 | CaseId::E480 | CaseId::E960 => {
                normalizer_in_group(&self.e_family()?.normalizer, &g)?
            }
            CaseId::J160 | CaseId::J320 | CaseId::J640 | CaseId::J1920 | CaseId::J3840 => {
                normalizer_in_group(&self.j_family()?.normalizer, &g)?
            }
            _ => normalizer_in_gl(&g, DEFAULT_SCAN_BUDGET)?,
        };
        Ok(slot.get_or_init(|| Arc::new(n)).clone())
    }

    pub fn build(&self, id: CaseId) -> Result<BuiltCase> {
        let slot = &self.built[slot_of(id)];
        if let Some(b) = slot.get() {
            return Ok(b.clone());
        }
        let (group, g0) = self.construct(id)?;
        let built = BuiltCase {
            descriptor: id.descriptor(),
            group,
            g0,
        };
        let report = verify_case(&built, &built.descriptor);
        if !report.order_ok || !report.transitive {
            return Err(fail(id, "verification of order and transitivity"));
        }
        Ok(slot.get_or_init(|| built).clone())
    }

    /// Seeds the catalog with a previously built case (e.g. loaded from a
    /// cache).  The case is re-verified; returns `false` if a build was
    /// already present.
    pub fn insert_built(&self, built: BuiltCase) -> Result<bool> {
        let id = built.descriptor.id;
        if !verify_case(&built, &id.descriptor()).passed() {
            return Err(fail(id, "verification of cached group"));
        }
        Ok(self.built[slot_of(id)].set(built).is_ok())
    }

    /// Seeds the normalizer of a case; it must normalize the case group.
    pub fn insert_normalizer(&self, id: CaseId, n: Arc<LinearGroup>) -> Result<bool> {
        let g = self.build(id)?.group;
        if !g.is_subgroup_of(&n) || !n.normalizes(&g) {
            return Err(fail(id, "verification of cached normalizer"));
        }
        Ok(self.normalizers[slot_of(id)].set(n).is_ok())
    }

    fn construct(&self, id: CaseId) -> Result<(Arc<LinearGroup>, Arc<LinearGroup>)> {
        let desc = id.descriptor();
        match id {
            CaseId::A48 | CaseId::A96 | CaseId::B | CaseId::C => {
                let g0 = self.sl23(id, desc.p)?;
                Ok((self.extend_planar(id, &g0)?, g0))
            }
            CaseId::F | CaseId::G | CaseId::H => {
                let g0 = self.sl25(id, desc.p)?;
                Ok((self.extend_planar(id, &g0)?, g0))
            }
            CaseId::E240 | CaseId::E480 | CaseId::E960 => {
                let fam = self.e_family()?;
                let g = pick_by_order(&fam.transitive, desc.expected_order)
                    .ok_or_else(|| fail(id, "transitive subgroup of the SL(2,5) normalizer"))?;
                Ok((g, fam.g0.clone()))
            }
            CaseId::J160 | CaseId::J320 | CaseId::J640 | CaseId::J1920 | CaseId::J3840 => {
                let fam = self.j_family()?;
                let g = pick_by_order(&fam.transitive, desc.expected_order).ok_or_else(|| {
                    fail(id, "transitive subgroup of the extraspecial normalizer")
                })?;
                Ok((g, fam.g0.clone()))
            }
            CaseId::K360 => {
                let a6 = self.a6()?;
                Ok((a6.clone(), a6))
            }
            CaseId::K720 => {
                let a6 = self.a6()?;
                let n = Arc::new(normalizer_in_gl(&a6, DEFAULT_SCAN_BUDGET)?);
                let g = intermediate_subgroups(&n, &a6)?
                    .into_iter()
                    .find(|h| h.order() == 720 && h.is_transitive())
                    .ok_or_else(|| fail(id, "order-720 overgroup of A6"))?;
                Ok((Arc::new(g), a6))
            }
            CaseId::L => {
                let g = Arc::new(self.scan_gl42(id, 7, 2520)?);
                Ok((g.clone(), g))
            }
            CaseId::M => {
                let dir = self
                    .asset_dir
                    .as_ref()
                    .ok_or_else(|| fail(id, "no construction"))?;
                let path = dir.join(format!("{}.json", id.as_str()));
                if !path.exists() {
                    return Err(fail(id, "no construction"));
                }
                let file: crate::lingroup::GroupFile =
                    serde_json::from_str(&std::fs::read_to_string(path)?)?;
                let g = Arc::new(file.load()?);
                Ok((g.clone(), g))
            }
        }
    }

    /// `SL(2,3)` inside `GL(2,p)`: a quaternion pair and an order-3
    /// element of determinant 1 normalizing it.
    pub fn sl23(&self, id: CaseId, p: u32) -> Result<Arc<LinearGroup>> {
        let slot = match p {
            5 => &self.sl23[0],
            7 => &self.sl23[1],
            11 => &self.sl23[2],
            _ => return Err(fail(id, "SL(2,3) prime")),
        };
        if let Some(g) = slot.get() {
            return Ok(g.clone());
        }
        let pi = p as i64;
        let i = Matrix::from_rows(p, &[&[0, -1], &[1, 0]])?;
        let (a, b) = (0..pi)
            .flat_map(|a| (0..pi).map(move |b| (a, b)))
            .find(|&(a, b)| (a * a + b * b + 1) % pi == 0)
            .ok_or_else(|| fail(id, "a^2 + b^2 = -1"))?;
        let j = Matrix::from_rows(p, &[&[a, b], &[b, -a]])?;
        let q8 = close(&[i, j], 8).map_err(|_| fail(id, "Q8"))?;
        if q8.order() != 8 {
            return Err(fail(id, "Q8"));
        }
        let mut third = None;
        for_each_gl(p, 2, 0..p * p - 1, |c| {
            if third.is_some() || c.det() != 1 || c.order(3) != Some(3) {
                return;
            }
            let ci = c.inv().expect("invertible");
            if q8.contains(&(ci * i * *c)) && q8.contains(&(ci * j * *c)) {
                third = Some(*c);
            }
        });
        let c = third.ok_or_else(|| fail(id, "order-3 normalizing element"))?;
        let g0 = close(&[i, j, c], 24).map_err(|_| fail(id, "SL(2,3)"))?;
        if g0.order() != 24 {
            return Err(fail(id, "SL(2,3)"));
        }
        Ok(slot.get_or_init(|| Arc::new(g0)).clone())
    }

    /// `SL(2,5)` inside `SL(2,p)`: lex-least order-5 element and the first
    /// order-4 partner generating a group of order 120 with a unique
    /// involution.
    pub fn sl25(&self, id: CaseId, p: u32) -> Result<Arc<LinearGroup>> {
        let slot = match p {
            11 => &self.sl25[0],
            19 => &self.sl25[1],
            29 => &self.sl25[2],
            _ => return Err(fail(id, "SL(2,5) prime")),
        };
        if let Some(g) = slot.get() {
            return Ok(g.clone());
        }
        let mut sl = Vec::new();
        for_each_gl(p, 2, 0..p * p - 1, |m| {
            if m.det() == 1 {
                sl.push(*m);
            }
        });
        let g0 = binary_icosahedral(&sl, |m| *m).ok_or_else(|| fail(id, "SL(2,5) pair scan"))?;
        Ok(slot.get_or_init(|| Arc::new(g0)).clone())
    }

    fn extend_planar(&self, id: CaseId, g0: &Arc<LinearGroup>) -> Result<Arc<LinearGroup>> {
        let n = normalizer_in_gl(g0, DEFAULT_SCAN_BUDGET)?;
        let order = id.descriptor().expected_order;
        let candidates: Vec<LinearGroup> = intermediate_subgroups(&n, g0)?
            .into_iter()
            .filter(|h| h.order() == order && h.is_transitive())
            .collect();
        // Prefer the overgroup containing the full scalar subgroup.
        let p = g0.p();
        let scalars: Vec<Matrix> = (1..p).map(|s| Matrix::scalar(p, 2, s)).collect();
        let chosen = candidates
            .iter()
            .find(|h| scalars.iter().all(|s| h.contains(s)))
            .or(candidates.first())
            .ok_or_else(|| fail(id, "overgroup of the requested order"))?;
        Ok(Arc::new(chosen.clone()))
    }

    /// The `SL(2,5)` family in `GL(4,3)`, realized through `GL(2,9)`.
    pub fn e_family(&self) -> Result<Arc<Family>> {
        if let Some(f) = self.e_family.get() {
            return Ok(f.clone());
        }
        let gf9 = ExtField::gf9();
        let mut sl29: Vec<ExtMatrix> = Vec::new();
        for a in 0..9 {
            for b in 0..9 {
                for c in 0..9 {
                    for d in 0..9 {
                        let m = ExtMatrix::new(2, vec![a, b, c, d]);
                        if m.det(&gf9) == 1 {
                            sl29.push(m);
                        }
                    }
                }
            }
        }
        let g0 = binary_icosahedral(&sl29, |m| blowup(m, &gf9))
            .ok_or_else(|| fail(CaseId::E960, "SL(2,5) inside SL(2,9)"))?;
        // (1 + x) generates GF(9)*; its scalar matrix picks the 480.
        let gen = ExtMatrix::new(2, vec![4, 0, 0, 4]);
        let scalar = blowup(&gen, &gf9);
        let fam = family(Arc::new(g0), Some(scalar))?;
        Ok(self.e_family.get_or_init(|| Arc::new(fam)).clone())
    }

    /// The extraspecial family: `2^(1+4)` as the central product of a
    /// dihedral and a quaternion group of order 8 over `GF(3)`.
    pub fn j_family(&self) -> Result<Arc<Family>> {
        if let Some(f) = self.j_family.get() {
            return Ok(f.clone());
        }
        let l0 = extraspecial_32()?;
        let fam = family(Arc::new(l0), None)?;
        Ok(self.j_family.get_or_init(|| Arc::new(fam)).clone())
    }

    fn gl42(&self) -> Arc<Vec<Matrix>> {
        self.gl42
            .get_or_init(|| {
                let mut all = Vec::with_capacity(gl_order(2, 4) as usize);
                for_each_gl(2, 4, 0..15, |m| all.push(*m));
                all.sort_unstable();
                Arc::new(all)
            })
            .clone()
    }

    fn a6(&self) -> Result<Arc<LinearGroup>> {
        if let Some(g) = self.a6.get() {
            return Ok(g.clone());
        }
        let g = self.scan_gl42(CaseId::K360, 5, 360)?;
        Ok(self.a6.get_or_init(|| Arc::new(g)).clone())
    }

    /// Lex-least element of order `first_order` paired with the first
    /// partner generating a transitive group of order `target`.
    fn scan_gl42(&self, id: CaseId, first_order: usize, target: usize) -> Result<LinearGroup> {
        let all = self.gl42();
        let a = all
            .iter()
            .find(|m| m.order(first_order) == Some(first_order))
            .copied()
            .ok_or_else(|| fail(id, "first generator"))?;
        for b in all.iter() {
            if let Ok(g) = close(&[a, *b], target) {
                if g.order() == target && g.is_transitive() {
                    return Ok(g);
                }
            }
        }
        Err(fail(id, "two-generator scan of GL(4,2)"))
    }
}

fn slot_of(id: CaseId) -> usize {
    CaseId::ALL.iter().position(|c| *c == id).expect("listed")
}

fn pick_by_order(groups: &[Arc<LinearGroup>], order: usize) -> Option<Arc<LinearGroup>> {
    groups.iter().find(|g| g.order() == order).cloned()
}

/// Computes the transitive intermediate groups and arranges them so that
/// each one contains the largest smaller member whose order divides its
/// own.  When several classes share an order, the first that can contain
/// that member is kept (ties broken by containing `prefer`); the others
/// go to `extra`.
fn family(g0: Arc<LinearGroup>, prefer: Option<Matrix>) -> Result<Family> {
    let normalizer = Arc::new(normalizer_in_gl(&g0, DEFAULT_SCAN_BUDGET)?);
    let reps: Vec<LinearGroup> = intermediate_subgroups(&normalizer, &g0)?
        .into_iter()
        .filter(|h| h.is_transitive())
        .collect();
    let mut transitive: Vec<Arc<LinearGroup>> = Vec::new();
    let mut extra = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        let order = reps[i].order();
        let same: Vec<&LinearGroup> = reps[i..]
            .iter()
            .take_while(|h| h.order() == order)
            .collect();
        i += same.len();
        let below = transitive
            .iter()
            .rev()
            .find(|t| order % t.order() == 0)
            .cloned();
        // (candidate, conjugate containing `below`)
        let mut options: Vec<(usize, Option<LinearGroup>)> = same
            .iter()
            .enumerate()
            .map(|(k, h)| {
                let over = below.as_ref().and_then(|t| {
                    let x = conjugating_element(&normalizer, t, h)?;
                    let xi = x.inv().ok()?;
                    let gens: Vec<Matrix> = h.generators().iter().map(|g| x * *g * xi).collect();
                    close(&gens, order).ok()
                });
                (k, over)
            })
            .collect();
        options.sort_by_key(|(k, over)| {
            (
                over.is_none(),
                !prefer.is_some_and(|m| same[*k].contains(&m)),
                *k,
            )
        });
        let (kept, over) = options.remove(0);
        let chosen = over.unwrap_or_else(|| same[kept].clone());
        transitive.push(Arc::new(chosen));
        extra.extend(options.into_iter().map(|(k, _)| Arc::new(same[k].clone())));
    }
    Ok(Family {
        g0,
        normalizer,
        transitive,
        extra,
    })
}

/// Some `x` in `n` with `x^-1 t x` contained in `h`.
fn conjugating_element(n: &LinearGroup, t: &LinearGroup, h: &LinearGroup) -> Option<Matrix> {
    n.elements().iter().copied().find(|x| {
        let Ok(xi) = x.inv() else { return false };
        t.generators().iter().all(|g| h.contains(&(xi * *g * *x)))
    })
}

/// Scans `sl` (lex ordered) for an element of order 5 and an element of
/// order 4 generating a group of order 120 with a unique involution.
fn binary_icosahedral<T, F>(sl: &[T], to_matrix: F) -> Option<LinearGroup>
where
    F: Fn(&T) -> Matrix,
{
    let mats: Vec<Matrix> = sl.iter().map(&to_matrix).collect();
    let a = *mats.iter().find(|m| m.order(5) == Some(5))?;
    for b in mats.iter().filter(|m| m.order(4) == Some(4)) {
        let Ok(g) = close(&[a, *b], 120) else {
            continue;
        };
        if g.order() != 120 {
            continue;
        }
        let involutions = g
            .elements()
            .iter()
            .filter(|m| !m.is_identity() && (**m * **m).is_identity())
            .count();
        if involutions == 1 {
            return Some(g);
        }
    }
    None
}

/// `2^(1+4)` in `GL(4,3)` as `D8 (x) Q8`.
pub fn extraspecial_32() -> Result<LinearGroup> {
    let i2 = Matrix::identity(3, 2);
    let swap = Matrix::from_rows(3, &[&[0, 1], &[1, 0]])?;
    let refl = Matrix::from_rows(3, &[&[1, 0], &[0, -1]])?;
    let qi = Matrix::from_rows(3, &[&[0, -1], &[1, 0]])?;
    let qj = Matrix::from_rows(3, &[&[1, 1], &[1, -1]])?;
    let gens = [
        swap.kron(&i2)?,
        refl.kron(&i2)?,
        i2.kron(&qi)?,
        i2.kron(&qj)?,
    ];
    let g = close_default(&gens)?;
    Ok(g)
}

/// True iff the center of `g` is `{I, -I}`.
pub fn center_is_plus_minus_one(g: &LinearGroup) -> bool {
    let center: Vec<&Matrix> = g
        .elements()
        .iter()
        .filter(|z| g.generators().iter().all(|x| **z * *x == *x * **z))
        .collect();
    let p = g.p();
    let d = g.dim();
    center.len() == 2
        && center.contains(&&Matrix::identity(p, d))
        && center.contains(&&Matrix::scalar(p, d, p - 1))
}

/// Vector space of a case, for convenience.
pub fn case_space(id: CaseId) -> VectorSpace {
    let d = id.descriptor();
    VectorSpace::new(d.p, d.d).expect("catalog spaces are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_divide_gl_order() {
        for c in list_cases() {
            assert_eq!(gl_order(c.p, c.d) % c.expected_order as u64, 0, "{}", c.id);
        }
    }

    #[test]
    fn descriptor_census() {
        let cases = list_cases();
        assert_eq!(cases.iter().filter(|c| c.p == 5 && c.d == 2).count(), 2);
        assert_eq!(
            cases
                .iter()
                .filter(|c| c.id.as_str().starts_with("4.j"))
                .count(),
            5
        );
    }

    #[test]
    fn case_ids_round_trip() {
        for c in CaseId::ALL {
            assert_eq!(c.as_str().parse::<CaseId>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.as_str()));
        }
        assert!("4.z".parse::<CaseId>().is_err());
    }

    #[test]
    fn extraspecial_group_structure() {
        let g = extraspecial_32().unwrap();
        assert_eq!(g.order(), 32);
        assert!(center_is_plus_minus_one(&g));
        // exponent 4
        assert!(g.elements().iter().all(|m| m.pow(4).is_identity()));
    }

    #[test]
    fn missing_asset_is_reported() {
        let err = Catalog::new().build(CaseId::M).unwrap_err();
        assert!(err.to_string().contains("no construction"));
    }
}
