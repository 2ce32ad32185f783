//! Extracting catalog graphs from engine states.
//!
//! A state yields one graph skeleton: a vertex per ball, an edge ("leg") per
//! disc of the attachment surface running out to its anchored tetrahedron
//! face, the bands as 2-handle attaching data (tau), and the suture arcs as
//! the tangle (gamma). Emission expands the gamma arcs over all subsets
//! (each subtangle is its own catalog record); the face signature of a face
//! is the multiset of its legs' boundary words.

use super::StageConfig;
use crate::surface::canonical::{canonicalize_multi, LabelMode};
use crate::surface::map::Dart;
use crate::surface::{CellId, EdgeKind, SphereComplex};
use std::collections::BTreeMap;

/// One mark on a disc's boundary circle, in walk order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotMark {
    /// A band end: a 2-handle crossing into the neighboring tetrahedron.
    Tau(u32),
    /// A suture endpoint: the tangle crosses the face here.
    Gamma(u32),
    /// A surviving fragment of the original disc circle at this corner.
    Corner(u8),
    /// A decomposition scar; equal ids pair across the cut.
    Cut(u32),
}

/// A leg: one disc of the attachment surface, pressed against a face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub ball: usize,
    /// Anchored tetrahedron face, when known.
    pub face: Option<u8>,
    /// Boundary word in canonical rotation.
    pub word: Vec<SlotMark>,
}

/// A band: 2-handle attaching data between two leg slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TauArc {
    pub id: u32,
    pub ends: [(usize, usize); 2],
}

/// A suture arc of the tangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaArc {
    pub id: u32,
    /// Endpoints as (leg index, word position); None for a closed loop.
    pub ends: Option<[(usize, usize); 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogGraph {
    pub vertices: usize,
    pub legs: Vec<Leg>,
    pub taus: Vec<TauArc>,
    pub gammas: Vec<GammaArc>,
    /// Whether every gamma endpoint lies on a leg circle (arcs ending on
    /// band sides cannot pair across faces, so the record cannot tile).
    pub assemblable: bool,
}

impl CatalogGraph {
    pub fn legs_at(&self, face: u8) -> Vec<usize> {
        self.legs
            .iter()
            .enumerate()
            .filter(|(_, l)| l.face == Some(face))
            .map(|(i, _)| i)
            .collect()
    }

    /// The face signature: the sorted multiset of leg words at the face.
    pub fn face_signature(&self, face: u8) -> Vec<Vec<SlotMark>> {
        let mut sig: Vec<Vec<SlotMark>> = self
            .legs_at(face)
            .into_iter()
            .map(|i| self.legs[i].word.clone())
            .collect();
        sig.sort();
        sig
    }
}

/// The canonical presentation of a config for extraction and serialization.
pub fn canonical_balls(cfg: &StageConfig) -> Vec<SphereComplex> {
    let refs: Vec<&SphereComplex> = cfg.balls.iter().map(|b| b.as_ref()).collect();
    canonicalize_multi(&refs, LabelMode::Anchored)
}

/// Extracts the graph skeleton of a canonical ball list, with all gamma arcs
/// present.
pub fn extract_skeleton(balls: &[SphereComplex]) -> CatalogGraph {
    let mut legs = Vec::new();
    let mut taus: Vec<TauArc> = Vec::new();
    let mut gammas: Vec<GammaArc> = Vec::new();
    let mut assemblable = true;

    for (bi, ball) in balls.iter().enumerate() {
        let arcs = ball.suture_arcs();
        let mut arc_of_vertex: BTreeMap<Dart, u32> = BTreeMap::new();
        for (ai, arc) in arcs.iter().enumerate() {
            if arc.closed {
                gammas.push(GammaArc { id: gid(bi, ai), ends: None });
                continue;
            }
            let first = arc.darts[0];
            let last = ball.map().alpha(*arc.darts.last().unwrap());
            for d in [first, last] {
                for v in ball.map().vertex_darts(d) {
                    arc_of_vertex.insert(v, gid(bi, ai));
                }
            }
        }
        let band_ordinal: BTreeMap<CellId, u32> = ball
            .live_cells()
            .filter(|&c| ball.cell_tag(c).is_band())
            .enumerate()
            .map(|(i, c)| (c, gid(bi, i)))
            .collect();

        for disc in ball.live_cells().filter(|&c| ball.cell_tag(c).is_disc()) {
            let anchor = match ball.cell_tag(disc) {
                crate::surface::CellTag::Disc { anchor } => anchor,
                _ => unreachable!(),
            };
            let word = disc_word(ball, disc, &band_ordinal, &arc_of_vertex);
            legs.push(Leg { ball: bi, face: anchor, word });
        }
        for (_, f) in ball.suture_endpoints() {
            if !ball.cell_tag(f).is_disc() {
                assemblable = false;
            }
        }
    }
    let mut tau_ends: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    let mut gamma_ends: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (li, leg) in legs.iter().enumerate() {
        for (pos, mark) in leg.word.iter().enumerate() {
            match mark {
                SlotMark::Tau(id) => tau_ends.entry(*id).or_default().push((li, pos)),
                SlotMark::Gamma(id) => gamma_ends.entry(*id).or_default().push((li, pos)),
                _ => {}
            }
        }
    }
    for (id, ends) in tau_ends {
        if ends.len() == 2 {
            taus.push(TauArc { id, ends: [ends[0], ends[1]] });
        } else {
            assemblable = false;
        }
    }
    for (id, ends) in gamma_ends {
        if ends.len() == 2 {
            gammas.push(GammaArc { id, ends: Some([ends[0], ends[1]]) });
        } else {
            assemblable = false;
        }
    }
    gammas.sort_by_key(|g| g.id);
    taus.sort_by_key(|t| t.id);
    CatalogGraph { vertices: balls.len(), legs, taus, gammas, assemblable }
}

fn gid(ball: usize, ordinal: usize) -> u32 {
    (ball as u32) * 1000 + ordinal as u32
}

/// The boundary word of one disc.
fn disc_word(
    ball: &SphereComplex,
    disc: CellId,
    band_ordinal: &BTreeMap<CellId, u32>,
    arc_of_vertex: &BTreeMap<Dart, u32>,
) -> Vec<SlotMark> {
    let rep = ball
        .map()
        .darts()
        .find(|&d| ball.cell_of(d) == disc)
        .expect("disc has darts");
    let walk = ball.map().face_darts(rep);
    let mut marks: Vec<SlotMark> = Vec::new();
    for &d in &walk {
        match ball.kind(d) {
            EdgeKind::Attach => marks.push(SlotMark::Tau(band_ordinal[&ball.other_cell(d)])),
            EdgeKind::FaceArc { corner } => {
                if marks.last() != Some(&SlotMark::Corner(corner)) {
                    marks.push(SlotMark::Corner(corner));
                }
            }
            EdgeKind::Scar { id } => marks.push(SlotMark::Cut(id)),
            EdgeKind::FaceGap => {}
            k => panic!("unexpected kind {k:?} on disc boundary"),
        }
        let head = ball.map().alpha(d);
        if let Some(&arc) = arc_of_vertex.get(&head) {
            marks.push(SlotMark::Gamma(arc));
        }
    }
    if marks.len() > 1 && marks.first() == marks.last() {
        if let Some(SlotMark::Corner(_)) = marks.first() {
            marks.pop();
        }
    }
    rotate_min(&marks)
}

pub fn rotate_min(word: &[SlotMark]) -> Vec<SlotMark> {
    if word.is_empty() {
        return Vec::new();
    }
    let n = word.len();
    let mut best: Option<Vec<SlotMark>> = None;
    for r in 0..n {
        let rot: Vec<SlotMark> = (0..n).map(|i| word[(r + i) % n]).collect();
        if best.as_ref().is_none_or(|b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap()
}

/// One record per gamma subtangle: the graph restricted to the chosen arcs.
pub fn subtangle_variants(
    skeleton: &CatalogGraph,
    max_records: usize,
) -> (Vec<(u64, CatalogGraph)>, bool) {
    let n = skeleton.gammas.len().min(20);
    let total = 1u64 << n;
    let mut out = Vec::new();
    let mut capped = skeleton.gammas.len() > 20;
    for mask in 0..total {
        if out.len() >= max_records {
            capped = true;
            break;
        }
        let kept_ids: std::collections::BTreeSet<u32> = skeleton
            .gammas
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, g)| g.id)
            .collect();
        let mut g = skeleton.clone();
        g.gammas.retain(|a| kept_ids.contains(&a.id));
        for leg in g.legs.iter_mut() {
            leg.word.retain(|m| match m {
                SlotMark::Gamma(id) => kept_ids.contains(id),
                _ => true,
            });
            leg.word = rotate_min(&leg.word);
        }
        let mut tau_ends: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        let mut gamma_ends: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (li, leg) in g.legs.iter().enumerate() {
            for (pos, mark) in leg.word.iter().enumerate() {
                match mark {
                    SlotMark::Tau(id) => tau_ends.entry(*id).or_default().push((li, pos)),
                    SlotMark::Gamma(id) => gamma_ends.entry(*id).or_default().push((li, pos)),
                    _ => {}
                }
            }
        }
        for t in g.taus.iter_mut() {
            if let Some(e) = tau_ends.get(&t.id) {
                if e.len() == 2 {
                    t.ends = [e[0], e[1]];
                }
            }
        }
        for a in g.gammas.iter_mut() {
            if a.ends.is_some() {
                if let Some(e) = gamma_ends.get(&a.id) {
                    if e.len() == 2 {
                        a.ends = Some([e[0], e[1]]);
                    }
                }
            }
        }
        out.push((mask, g));
    }
    (out, capped)
}

/// All records of one config: (subset mask, graph) pairs.
pub fn extract_graphs(cfg: &StageConfig, max_records: usize) -> (Vec<(u64, CatalogGraph)>, bool) {
    let balls = canonical_balls(cfg);
    let skeleton = extract_skeleton(&balls);
    subtangle_variants(&skeleton, max_records)
}

/// The skeleton with every arc retained.
pub fn extract_full(cfg: &StageConfig) -> CatalogGraph {
    extract_skeleton(&canonical_balls(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::base_configs;
    use crate::surface::pattern::tetra_pattern;

    #[test]
    fn base_graph_shape() {
        let base = base_configs(&tetra_pattern()).into_iter().next().unwrap();
        let g = extract_full(&base);
        assert_eq!(g.vertices, 1);
        assert_eq!(g.legs.len(), 4);
        assert_eq!(g.taus.len(), 6);
        assert!(g.gammas.is_empty());
        assert!(g.assemblable);
        // Each face signature has one disc with three tau slots and three
        // corner marks.
        for f in 0..4u8 {
            let sig = g.face_signature(f);
            assert_eq!(sig.len(), 1);
            let taus = sig[0].iter().filter(|m| matches!(m, SlotMark::Tau(_))).count();
            let corners = sig[0].iter().filter(|m| matches!(m, SlotMark::Corner(_))).count();
            assert_eq!(taus, 3);
            assert_eq!(corners, 3);
        }
        // Only one subtangle variant when there are no arcs.
        let (variants, capped) = subtangle_variants(&g, 1000);
        assert_eq!(variants.len(), 1);
        assert!(!capped);
    }

    #[test]
    fn empty_config_graph() {
        use crate::surface::{Orient, SphereComplex};
        let base = crate::engine::StageConfig {
            balls: vec![std::sync::Arc::new(SphereComplex::empty(Orient::In))],
            stage: 1,
            parent: None,
            op: crate::engine::OpTag::Base,
        };
        let g = extract_full(&base);
        assert_eq!(g.vertices, 1);
        assert!(g.legs.is_empty());
        assert!(g.gammas.is_empty());
    }

    #[test]
    fn subtangle_counts() {
        // A config with two gamma arcs yields four variants.
        let pattern = tetra_pattern();
        let base = base_configs(&pattern).into_iter().next().unwrap();
        let caps = crate::engine::EngineCaps { max_stages: 2, max_curve_crossings: 4, ..Default::default() };
        let run = crate::engine::run_engine(vec![base], caps).unwrap();
        let with_arcs = run
            .configs
            .values()
            .find(|r| {
                let g = extract_full(&r.config);
                g.gammas.len() == 2
            })
            .expect("a config with two arcs");
        let (variants, _) = extract_graphs(&with_arcs.config, 1000);
        assert_eq!(variants.len(), 4);
    }
}
