//! The catalog engine: states over a single dualized 0-handle, the seven
//! state-transition operations, strict complexity descent, and the
//! deduplicating worklist that produces the finite catalog.

pub mod catalog;
pub mod enumerate;
pub mod extract;

use crate::complexity::{
    compare_complexity, compare_extended, measures_from_components, Complexity, ExtendedComplexity,
};
use crate::surface::canonical::LabelMode;
use std::sync::Arc;
use crate::surface::split::split_along;
use crate::surface::curves::CurveSystem;
use crate::surface::{CellId, EdgeKind, Orient, SphereComplex, SurfaceError};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("surface error: {0}")]
    Surface(#[from] SurfaceError),
    #[error("descent violated by {op:?} at stage {stage}")]
    DescentViolation { op: OpTag, stage: u32 },
}

/// Resource caps. The calculus guarantees the worklist terminates, but gives
/// no bound in advance, so runs are capped and the unexplored frontier is
/// reported honestly. `max_curve_crossings` bounds the total crossing count
/// of a decomposing curve system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineCaps {
    pub max_stages: u32,
    pub max_curve_crossings: u32,
    pub max_children_per_node: usize,
    pub max_catalog_size: usize,
}

impl Default for EngineCaps {
    fn default() -> Self {
        EngineCaps {
            max_stages: 4,
            max_curve_crossings: 8,
            max_children_per_node: 512,
            max_catalog_size: 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OpTag {
    Base,
    BallRemoved,
    HandlesRemoved,
    BandToSuture,
    ProductDiscRemoved,
    ValenceTwoMerged,
    Decomposed,
    AmalgamPushoff,
}

impl OpTag {
    pub fn token(&self) -> &'static str {
        match self {
            OpTag::Base => "base",
            OpTag::BallRemoved => "remove-ball",
            OpTag::HandlesRemoved => "remove-handles",
            OpTag::BandToSuture => "band-to-suture",
            OpTag::ProductDiscRemoved => "remove-product-disc",
            OpTag::ValenceTwoMerged => "merge-valence-two",
            OpTag::Decomposed => "decompose",
            OpTag::AmalgamPushoff => "amalgam-pushoff",
        }
    }
}

/// One engine state: a set of balls with labeled boundary spheres.
#[derive(Clone, Debug)]
pub struct StageConfig {
    pub balls: Vec<Arc<SphereComplex>>,
    pub stage: u32,
    pub parent: Option<Vec<u8>>,
    pub op: OpTag,
}

impl StageConfig {
    /// A fixed-size digest of the canonical serialization.
    pub fn key(&self) -> Vec<u8> {
        let balls: Vec<&SphereComplex> = self.balls.iter().map(|b| b.as_ref()).collect();
        let bytes =
            crate::surface::canonical::canonical_key_multi_cached_refs(&balls, LabelMode::Anchored);
        crate::util::sha256(&bytes).to_vec()
    }

    pub fn measures(&self) -> (Complexity, ExtendedComplexity) {
        let mut parts = Vec::new();
        for (bi, ball) in self.balls.iter().enumerate() {
            for &(band_cells, index, circles) in ball_counts_cached(ball.as_ref()).iter() {
                parts.push(crate::complexity::ComponentCounts {
                    band_cells,
                    index,
                    boundary_circles: circles,
                    zero_handle: bi,
                });
            }
        }
        measures_from_components(&parts)
    }

    fn child(&self, balls: Vec<Arc<SphereComplex>>, op: OpTag, parent_key: &[u8]) -> StageConfig {
        StageConfig {
            balls,
            stage: self.stage + 1,
            parent: Some(parent_key.to_vec()),
            op,
        }
    }
}

/// Per-ball component counts, cached by exact serialization (children share
/// ball objects heavily).
fn ball_counts_cached(ball: &SphereComplex) -> std::sync::Arc<Vec<(u64, i64, u64)>> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Vec<(u64, i64, u64)>>>>> = OnceLock::new();
    let key = ball.serialize();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let counts: Vec<(u64, i64, u64)> = ball
        .f_components()
        .iter()
        .map(|f| (f.bands.len() as u64, f.index, f.boundary_circles as u64))
        .collect();
    let value = Arc::new(counts);
    cache.lock().unwrap().insert(key, value.clone());
    value
}

/// Strict descent: the child is smaller in complexity, or equal with smaller
/// extended complexity.
pub fn strictly_descends(parent: &StageConfig, child: &StageConfig) -> bool {
    let (pc, pe) = parent.measures();
    let (cc, ce) = child.measures();
    match compare_complexity(&cc, &pc) {
        Ordering::Less => true,
        Ordering::Equal => compare_extended(&ce, &pe) == Ordering::Less,
        Ordering::Greater => false,
    }
}

/// One state per orientation assignment of the pattern's complementary
/// regions.
pub fn base_configs(pattern: &SphereComplex) -> Vec<StageConfig> {
    let regions = pattern.regions();
    let k = regions.len();
    let mut out = Vec::new();
    for mask in 0..(1u64 << k) {
        let mut sc = pattern.clone();
        for (i, &r) in regions.iter().enumerate() {
            sc.set_region_orient(r, if mask >> i & 1 == 1 { Orient::Out } else { Orient::In });
        }
        out.push(StageConfig { balls: vec![Arc::new(sc)], stage: 1, parent: None, op: OpTag::Base });
    }
    out
}

// ---------------------------------------------------------------------------
// Operations 1-5 and 7 (operation 6 lives in `enumerate`).
// ---------------------------------------------------------------------------

fn balls_without(cfg: &StageConfig, i: usize) -> Vec<Arc<SphereComplex>> {
    cfg.balls
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, b)| b.clone())
        .collect()
}

fn replace_ball(cfg: &StageConfig, i: usize, with: Vec<Arc<SphereComplex>>) -> Vec<Arc<SphereComplex>> {
    let mut out = Vec::new();
    for (j, b) in cfg.balls.iter().enumerate() {
        if j == i {
            out.extend(with.iter().cloned());
        } else {
            out.push(b.clone());
        }
    }
    out
}

/// Removal of a ball, with the surface cells and sutures it carries. Only
/// balls carrying part of the attachment surface qualify (removing a bare
/// ball would leave every measure unchanged).
pub fn op1_remove_component(cfg: &StageConfig, parent_key: &[u8]) -> Vec<StageConfig> {
    let mut out = Vec::new();
    for (i, ball) in cfg.balls.iter().enumerate() {
        if ball.f_components().is_empty() {
            continue;
        }
        out.push(cfg.child(balls_without(cfg, i), OpTag::BallRemoved, parent_key));
    }
    out
}

/// Admissible handle-removal subsets of one ball: closed under the drag rule
/// (a removed disc drags its bands), all removed handles disjoint from the
/// sutures, and every complementary region touching a removed handle agrees
/// in orientation.
fn removal_subsets(ball: &SphereComplex) -> Vec<(Vec<CellId>, Vec<CellId>)> {
    let discs: Vec<CellId> = ball
        .live_cells()
        .filter(|&c| ball.cell_tag(c).is_disc())
        .collect();
    let bands: Vec<CellId> = ball
        .live_cells()
        .filter(|&c| ball.cell_tag(c).is_band())
        .collect();
    if discs.len() + bands.len() > 14 {
        // Subset enumeration is only used at per-tetrahedron scale.
        return Vec::new();
    }
    // Suture contact per cell.
    let mut touched: BTreeSet<CellId> = BTreeSet::new();
    for (_, f) in ball.suture_endpoints() {
        touched.insert(f);
    }
    let band_neighbors = |d: CellId| -> Vec<CellId> {
        ball.map()
            .darts()
            .filter(|&x| ball.cell_of(x) == d && ball.kind(x) == EdgeKind::Attach)
            .map(|x| ball.other_cell(x))
            .collect()
    };
    let mut out = Vec::new();
    for dmask in 0..(1u64 << discs.len()) {
        let rm_discs: Vec<CellId> = discs
            .iter()
            .enumerate()
            .filter(|&(k, _)| dmask >> k & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        if rm_discs.iter().any(|c| touched.contains(c)) {
            continue;
        }
        // Bands dragged by the removed discs.
        let mut forced: BTreeSet<CellId> = BTreeSet::new();
        for &d in &rm_discs {
            forced.extend(band_neighbors(d));
        }
        let free_bands: Vec<CellId> = bands.iter().copied().filter(|b| !forced.contains(b)).collect();
        for bmask in 0..(1u64 << free_bands.len()) {
            let mut rm_bands: Vec<CellId> = forced.iter().copied().collect();
            rm_bands.extend(
                free_bands
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| bmask >> k & 1 == 1)
                    .map(|(_, &c)| c),
            );
            if rm_discs.is_empty() && rm_bands.is_empty() {
                continue;
            }
            if rm_bands.iter().any(|c| touched.contains(c)) {
                continue;
            }
            // Orientation agreement across every region touching a removed
            // handle.
            let mut orients: BTreeSet<(Orient, bool)> = BTreeSet::new();
            for d in ball.map().darts() {
                let c = ball.cell_of(d);
                let removed = rm_discs.contains(&c) || rm_bands.contains(&c);
                if !removed {
                    continue;
                }
                let o = ball.other_cell(d);
                if let crate::surface::CellTag::Region { orient, h3 } = ball.cell_tag(o) {
                    orients.insert((orient, h3));
                }
            }
            if orients.len() > 1 {
                continue;
            }
            out.push((rm_discs.clone(), rm_bands));
        }
    }
    out
}

pub fn op2_remove_handles(cfg: &StageConfig, parent_key: &[u8]) -> Vec<StageConfig> {
    let mut out = Vec::new();
    for (i, ball) in cfg.balls.iter().enumerate() {
        for (rm_discs, rm_bands) in removal_subsets(ball) {
            let mut b = ball.as_ref().clone();
            let mut ok = true;
            for &band in &rm_bands {
                if b.remove_band(band).is_err() {
                    ok = false;
                    break;
                }
            }
            if ok {
                for &disc in &rm_discs {
                    if b.remove_disc_with_bands(disc).is_err() {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            b.normalize();
            if b.well_formed().is_err() {
                continue;
            }
            out.push(cfg.child(replace_ball(cfg, i, vec![Arc::new(b)]), OpTag::HandlesRemoved, parent_key));
        }
    }
    out
}

/// Band replacement by a suture arc: a band whose flanking regions disagree,
/// or a valence-one 0-handle with a single suture hit dragged with its band.
pub fn op3_replace_with_suture(cfg: &StageConfig, parent_key: &[u8]) -> Vec<StageConfig> {
    let mut out = Vec::new();
    for (i, ball) in cfg.balls.iter().enumerate() {
        for band in ball.live_cells().filter(|&c| ball.cell_tag(c).is_band()) {
            let mut b = ball.as_ref().clone();
            if b.band_to_suture(band).is_ok() {
                out.push(cfg.child(replace_ball(cfg, i, vec![Arc::new(b)]), OpTag::BandToSuture, parent_key));
            }
        }
        // Valence-one disc meeting the sutures once: replace it and its band
        // by a suture sub-arc (band conversion followed by product-disc
        // removal of the freed disc).
        for disc in ball.live_cells().filter(|&c| ball.cell_tag(c).is_disc()) {
            if ball.disc_valence(disc) != 1 || ball.disc_gamma_hits(disc) != 1 {
                continue;
            }
            let band = ball
                .map()
                .darts()
                .find(|&d| ball.cell_of(d) == disc && ball.kind(d) == EdgeKind::Attach)
                .map(|d| ball.other_cell(d))
                .expect("valence-one disc has a band");
            let mut b = ball.as_ref().clone();
            if b.band_to_suture(band).is_err() {
                continue;
            }
            if b.remove_product_disc_component(&[disc]).is_err() {
                continue;
            }
            out.push(cfg.child(replace_ball(cfg, i, vec![Arc::new(b)]), OpTag::BandToSuture, parent_key));
        }
    }
    out
}

/// Removal of a product-disc component: a disc component of the surface
/// meeting the sutures exactly twice.
pub fn op4_remove_product_disc(cfg: &StageConfig, parent_key: &[u8]) -> Vec<StageConfig> {
    let mut out = Vec::new();
    for (i, ball) in cfg.balls.iter().enumerate() {
        for comp in ball.f_components() {
            if comp.euler != 1 || comp.gamma_touches != 2 {
                continue;
            }
            let cells: Vec<CellId> = comp.discs.iter().chain(comp.bands.iter()).copied().collect();
            let mut b = ball.as_ref().clone();
            if b.remove_product_disc_component(&cells).is_err() {
                continue;
            }
            out.push(cfg.child(replace_ball(cfg, i, vec![Arc::new(b)]), OpTag::ProductDiscRemoved, parent_key));
        }
    }
    out
}

pub fn op5_merge_valence_two(cfg: &StageConfig, parent_key: &[u8]) -> Vec<StageConfig> {
    let mut out = Vec::new();
    for (i, ball) in cfg.balls.iter().enumerate() {
        for disc in ball.live_cells().filter(|&c| ball.cell_tag(c).is_disc()) {
            let mut b = ball.as_ref().clone();
            if b.merge_valence_two_disc(disc).is_ok() {
                out.push(cfg.child(replace_ball(cfg, i, vec![Arc::new(b)]), OpTag::ValenceTwoMerged, parent_key));
            }
        }
    }
    out
}

/// A chain of bands and valence-two suture-free discs forming a disc of the
/// attachment surface, with both flanking regions of the same orientation:
/// the amalgam material for operation 7.
#[derive(Clone, Debug)]
pub struct AmalgamDisc {
    pub bands: Vec<CellId>,
    pub discs: Vec<CellId>,
    /// The attach darts (band side) at the two chain ends.
    pub end_attach: [crate::surface::map::Dart; 2],
    pub flank_orient: Orient,
}

/// All amalgam discs in one ball.
pub fn find_amalgam_discs(ball: &SphereComplex) -> Vec<AmalgamDisc> {
    let mut suture_touched: BTreeSet<CellId> = BTreeSet::new();
    for (_, f) in ball.suture_endpoints() {
        suture_touched.insert(f);
    }
    let chain_disc = |c: CellId| {
        ball.cell_tag(c).is_disc()
            && ball.disc_valence(c) == 2
            && ball.disc_gamma_hits(c) == 0
            && !suture_touched.contains(&c)
    };
    let bands: Vec<CellId> = ball
        .live_cells()
        .filter(|&c| ball.cell_tag(c).is_band() && !suture_touched.contains(&c))
        .collect();
    let mut out = Vec::new();
    // Grow chains from each start band: alternate band, chain disc, band...
    // A chain is recorded once per unordered orientation (start < end tie).
    for &start in &bands {
        let mut chain_bands = vec![start];
        let mut chain_discs: Vec<CellId> = Vec::new();
        loop {
            // Record the current chain (with its two end attach darts).
            let ends = chain_ends(ball, &chain_bands, &chain_discs);
            if let Some((e1, e2)) = ends {
                if chain_bands.first() <= chain_bands.last() {
                    if let Some(or) = chain_flank(ball, &chain_bands, &chain_discs) {
                        out.push(AmalgamDisc {
                            bands: chain_bands.clone(),
                            discs: chain_discs.clone(),
                            end_attach: [e1, e2],
                            flank_orient: or,
                        });
                    }
                }
            } else {
                break;
            }
            // Try to extend through a chain disc at the far end.
            let last = *chain_bands.last().unwrap();
            let next = ball
                .map()
                .darts()
                .filter(|&d| ball.cell_of(d) == last && ball.kind(d) == EdgeKind::Attach)
                .map(|d| ball.other_cell(d))
                .find(|&disc| {
                    chain_disc(disc)
                        && !chain_discs.contains(&disc)
                        && !chain_bands.iter().take(chain_bands.len() - 1).any(|&b| {
                            ball.map().darts().any(|d| {
                                ball.cell_of(d) == b
                                    && ball.kind(d) == EdgeKind::Attach
                                    && ball.other_cell(d) == disc
                            })
                        })
                });
            let Some(disc) = next else { break };
            let far_band = ball
                .map()
                .darts()
                .filter(|&d| ball.cell_of(d) == disc && ball.kind(d) == EdgeKind::Attach)
                .map(|d| ball.other_cell(d))
                .find(|&b| b != *chain_bands.last().unwrap());
            let Some(far) = far_band else { break };
            if chain_bands.contains(&far) || suture_touched.contains(&far) {
                break;
            }
            chain_discs.push(disc);
            chain_bands.push(far);
        }
    }
    out
}

/// The two end attach darts (band side) of a chain: the attachments to discs
/// outside the chain. None if the chain closes up or ends badly.
fn chain_ends(
    ball: &SphereComplex,
    chain_bands: &[CellId],
    chain_discs: &[CellId],
) -> Option<(crate::surface::map::Dart, crate::surface::map::Dart)> {
    let in_discs: BTreeSet<CellId> = chain_discs.iter().copied().collect();
    let in_bands: BTreeSet<CellId> = chain_bands.iter().copied().collect();
    let mut ends = Vec::new();
    for d in ball.map().darts() {
        if in_bands.contains(&ball.cell_of(d))
            && ball.kind(d) == EdgeKind::Attach
            && !in_discs.contains(&ball.other_cell(d))
        {
            ends.push(d);
        }
    }
    if ends.len() == 2 && ends[0] != ends[1] {
        Some((ends[0], ends[1]))
    } else {
        None
    }
}

/// The common orientation of the chain's flanking regions, if they agree.
fn chain_flank(ball: &SphereComplex, bands: &[CellId], discs: &[CellId]) -> Option<Orient> {
    let mut orients = BTreeSet::new();
    for d in ball.map().darts() {
        let c = ball.cell_of(d);
        if bands.contains(&c) || discs.contains(&c) {
            if let crate::surface::CellTag::Region { orient, h3 } = ball.cell_tag(ball.other_cell(d)) {
                if h3 {
                    return None;
                }
                orients.insert(orient);
            }
        }
    }
    if orients.len() == 1 {
        orients.into_iter().next()
    } else {
        None
    }
}

/// Operation 7: split along one or two push-offs of an amalgam disc's
/// boundary. Gate: every surface component has positive index, and every
/// non-positive 0-handle has valence two and is suture-free.
pub fn op7_amalgam_removal(cfg: &StageConfig, parent_key: &[u8]) -> Vec<StageConfig> {
    let gate = cfg.balls.iter().all(|ball| {
        ball.f_components().iter().all(|f| f.index > 0)
            && ball
                .live_cells()
                .filter(|&c| ball.cell_tag(c).is_disc())
                .all(|c| {
                    ball.disc_index(c) > 0
                        || (ball.disc_valence(c) == 2 && ball.disc_gamma_hits(c) == 0)
                })
    });
    if !gate {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, ball) in cfg.balls.iter().enumerate() {
        for amalgam in find_amalgam_discs(ball) {
            for child in enumerate::amalgam_children(cfg, i, ball, &amalgam, parent_key) {
                out.push(child);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Worklist
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default)]
pub struct EngineStats {
    pub nodes_expanded: usize,
    pub dedup_hits: usize,
    pub children_emitted: usize,
    pub cap_events: Vec<String>,
    /// Keys whose expansion was cut short by a cap.
    pub frontier: Vec<Vec<u8>>,
}

#[derive(Clone, Debug)]
pub struct ConfigRecord {
    pub key: Vec<u8>,
    pub config: StageConfig,
}

#[derive(Clone, Debug)]
pub struct CatalogRun {
    pub configs: BTreeMap<Vec<u8>, ConfigRecord>,
    pub stats: EngineStats,
    pub caps: EngineCaps,
}

/// Breadth-first closure of the base states under the seven operations, with
/// mechanical descent checking and canonical deduplication. Every state ever
/// reached is retained. Expansion runs stage by stage; the per-stage batch
/// parallelizes over nodes and the merge is performed in canonical key
/// order, so output is identical across thread counts. When the catalog-size
/// cap binds the run stops and reports the unexplored frontier.
pub fn run_engine(bases: Vec<StageConfig>, caps: EngineCaps) -> Result<CatalogRun, EngineError> {
    use rayon::prelude::*;
    let mut configs: BTreeMap<Vec<u8>, ConfigRecord> = BTreeMap::new();
    let mut stats = EngineStats::default();
    let mut current: Vec<Vec<u8>> = Vec::new();
    for cfg in bases {
        let key = cfg.key();
        if configs.contains_key(&key) {
            stats.dedup_hits += 1;
            continue;
        }
        current.push(key.clone());
        configs.insert(key.clone(), ConfigRecord { key, config: cfg });
    }
    current.sort();

    'stages: while !current.is_empty() {
        let batch: Vec<(Vec<u8>, StageConfig)> = current
            .iter()
            .map(|k| (k.clone(), configs[k].config.clone()))
            .filter(|(_, c)| c.stage < caps.max_stages)
            .collect();
        if batch.is_empty() {
            break;
        }
        stats.nodes_expanded += batch.len();
        let expanded: Vec<(Vec<u8>, Result<(Vec<StageConfig>, bool), EngineError>)> = batch
            .par_iter()
            .map(|(key, cfg)| (key.clone(), expand_node(cfg, key, &caps)))
            .collect();
        let mut next: Vec<Vec<u8>> = Vec::new();
        for (key, result) in expanded {
            let (children, capped) = result?;
            if capped {
                stats.cap_events.push(format!("expansion cap at {}", hex(&key)));
                stats.frontier.push(key.clone());
            }
            let cfg = configs[&key].config.clone();
            for child in children {
                if !strictly_descends(&cfg, &child) {
                    return Err(EngineError::DescentViolation { op: child.op, stage: child.stage });
                }
                let ckey = child.key();
                if configs.contains_key(&ckey) {
                    stats.dedup_hits += 1;
                    continue;
                }
                if configs.len() >= caps.max_catalog_size {
                    stats.cap_events.push("catalog size cap".to_string());
                    stats.frontier.push(key.clone());
                    stats.frontier.extend(next.iter().cloned());
                    stats.frontier.sort();
                    stats.frontier.dedup();
                    break 'stages;
                }
                stats.children_emitted += 1;
                next.push(ckey.clone());
                configs.insert(ckey.clone(), ConfigRecord { key: ckey, config: child });
            }
        }
        next.sort();
        next.dedup();
        current = next;
    }
    stats.frontier.sort();
    stats.frontier.dedup();
    Ok(CatalogRun { configs, stats, caps })
}

/// All children of one node, with a flag for caps hit during enumeration.
pub fn expand_node(
    cfg: &StageConfig,
    key: &[u8],
    caps: &EngineCaps,
) -> Result<(Vec<StageConfig>, bool), EngineError> {
    let mut children: Vec<StageConfig> = Vec::new();
    children.extend(op1_remove_component(cfg, key));
    children.extend(op2_remove_handles(cfg, key));
    children.extend(op3_replace_with_suture(cfg, key));
    children.extend(op4_remove_product_disc(cfg, key));
    children.extend(op5_merge_valence_two(cfg, key));
    let (mut kids, mut capped) = enumerate::op6_decompose(cfg, caps, key)?;
    children.append(&mut kids);
    children.extend(op7_amalgam_removal(cfg, key));
    if children.len() > caps.max_children_per_node {
        capped = true;
        children.truncate(caps.max_children_per_node);
    }
    Ok((children, capped))
}

pub fn hex(key: &[u8]) -> String {
    let mut s = String::with_capacity(key.len() * 2);
    for b in key {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn unhex(s: &str) -> Option<Vec<u8>> {
    if s.len() % 2 != 0 {
        return None;
    }
    (0..s.len() / 2)
        .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok())
        .collect()
}

/// Verification helper shared with tests: children of a split, as
/// (config, placements) for the trivial-modification predicate.
pub fn split_ball(
    cfg: &StageConfig,
    ball: usize,
    cs: &CurveSystem,
) -> Result<crate::surface::split::SplitOutcome, SurfaceError> {
    split_along(&cfg.balls[ball], cs)
}
