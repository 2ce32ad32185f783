//! The boundary 2-sphere of a 0-handle as a labeled cell complex.
//!
//! The embedded graph is a rotation system (`map`); every dart knows the cell
//! on its left. Cells are discs (where 1-handles attach), bands (where
//! 2-handles run over the sphere) and oriented complementary regions. Suture
//! arcs are not stored separately: they are exactly the edges with regions of
//! opposite orientation on their two sides, and region orientations are the
//! primary data. A region cell may span several faces of the embedded graph
//! and may stitch together multiple graph components (nested islands on the
//! sphere); a realizability check keeps that stitching tree-like.

pub mod canonical;
pub mod curves;
pub mod map;
pub mod pattern;
pub mod relate;
pub mod split;
pub mod surgery;

use map::{CombMap, Dart};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type CellId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("broken map: {0}")]
    BrokenMap(String),
    #[error("bad cell structure: {0}")]
    BadCell(String),
    #[error("unrealizable split: {0}")]
    UnrealizableSplit(String),
    #[error("bad curve system: {0}")]
    BadCurve(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orient {
    In,
    Out,
}

impl Orient {
    pub fn flip(self) -> Orient {
        match self {
            Orient::In => Orient::Out,
            Orient::Out => Orient::In,
        }
    }
}

/// What a cell of the sphere complex is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellTag {
    /// A 0-handle of the attachment surface (1-handle footprint). The anchor
    /// records which tetrahedron face the disc descends from, when known.
    Disc { anchor: Option<u8> },
    /// A 1-handle of the attachment surface (2-handle footprint).
    Band,
    /// A complementary region, oriented in or out; `h3` marks regions that
    /// press against a 3-handle rather than the manifold boundary.
    Region { orient: Orient, h3: bool },
}

impl CellTag {
    pub fn is_disc(&self) -> bool {
        matches!(self, CellTag::Disc { .. })
    }
    pub fn is_band(&self) -> bool {
        matches!(self, CellTag::Band)
    }
    pub fn is_region(&self) -> bool {
        matches!(self, CellTag::Region { .. })
    }
    pub fn is_f_cell(&self) -> bool {
        self.is_disc() || self.is_band()
    }
    pub fn orient(&self) -> Option<Orient> {
        match self {
            CellTag::Region { orient, .. } => Some(*orient),
            _ => None,
        }
    }
}

/// Edge classification, also carrying face-anchoring provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Disc|band junction (a band end).
    Attach,
    /// Band|region junction (a band's free side).
    BandSide,
    /// Disc|region junction on the original disc circle, anchored at a
    /// tetrahedron-face corner.
    FaceArc { corner: u8 },
    /// Disc|region junction where a band used to attach (no anchor).
    FaceGap,
    /// Disc|region junction created by a decomposition; scars come in pairs
    /// sharing an id, one on each side of the cut.
    Scar { id: u32 },
    /// Region|region junction: either a suture arc (opposite orientations)
    /// or a transient seam to be normalized away.
    Plain,
}

impl EdgeKind {
    pub fn is_disc_boundary(&self) -> bool {
        matches!(self, EdgeKind::FaceArc { .. } | EdgeKind::FaceGap | EdgeKind::Scar { .. })
    }
}

#[derive(Clone, Debug)]
struct CellData {
    tag: CellTag,
    alive: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SphereComplex {
    map: CombMap,
    cell_of: Vec<CellId>,
    kind: Vec<EdgeKind>,
    cells: Vec<CellData>,
}

impl SphereComplex {
    /// The sphere with no structure at all: one region, no darts.
    pub fn empty(orient: Orient) -> Self {
        SphereComplex {
            map: CombMap::new(),
            cell_of: Vec::new(),
            kind: Vec::new(),
            cells: vec![CellData { tag: CellTag::Region { orient, h3: false }, alive: true }],
        }
    }

    pub(crate) fn replace_parts(&mut self, map: CombMap, cell_of: Vec<CellId>, kind: Vec<EdgeKind>) {
        self.map = map;
        self.cell_of = cell_of;
        self.kind = kind;
        self.cells.clear();
    }

    pub fn map(&self) -> &CombMap {
        &self.map
    }

    pub fn map_mut(&mut self) -> &mut CombMap {
        &mut self.map
    }

    pub fn new_cell(&mut self, tag: CellTag) -> CellId {
        self.cells.push(CellData { tag, alive: true });
        self.cells.len() - 1
    }

    pub fn kill_cell(&mut self, c: CellId) {
        self.cells[c].alive = false;
    }

    pub fn live(&self, c: CellId) -> bool {
        c < self.cells.len() && self.cells[c].alive
    }

    pub fn cell_tag(&self, c: CellId) -> CellTag {
        debug_assert!(self.cells[c].alive);
        self.cells[c].tag
    }

    pub fn set_cell_tag(&mut self, c: CellId, tag: CellTag) {
        self.cells[c].tag = tag;
    }

    pub fn cell_of(&self, d: Dart) -> CellId {
        self.cell_of[d]
    }

    pub fn set_cell_of(&mut self, d: Dart, c: CellId) {
        self.cell_of[d] = c;
    }

    pub fn other_cell(&self, d: Dart) -> CellId {
        self.cell_of[self.map.alpha(d)]
    }

    pub fn kind(&self, d: Dart) -> EdgeKind {
        self.kind[d]
    }

    pub fn set_kind(&mut self, d: Dart, k: EdgeKind) {
        let a = self.map.alpha(d);
        self.kind[d] = k;
        self.kind[a] = k;
    }

    pub fn live_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cells.len()).filter(move |&c| self.cells[c].alive)
    }

    /// Allocates a new edge with bookkeeping arrays extended.
    pub fn new_edge(&mut self, kind: EdgeKind, left: CellId, right: CellId) -> (Dart, Dart) {
        let (d, e) = self.map.new_edge();
        if self.cell_of.len() < self.map.dart_limit() {
            self.cell_of.resize(self.map.dart_limit(), usize::MAX);
            self.kind.resize(self.map.dart_limit(), EdgeKind::Plain);
        }
        self.cell_of[d] = left;
        self.cell_of[e] = right;
        self.kind[d] = kind;
        self.kind[e] = kind;
        (d, e)
    }

    /// Rewrites every dart of cell `from` to cell `to` and kills `from`.
    pub fn merge_cell_into(&mut self, from: CellId, to: CellId) {
        if from == to {
            return;
        }
        for d in 0..self.cell_of.len() {
            if self.map.is_alive(d) && self.cell_of[d] == from {
                self.cell_of[d] = to;
            }
        }
        self.cells[from].alive = false;
    }

    // -- structure queries ---------------------------------------------------

    pub fn num_components(&self) -> usize {
        self.map.components().0
    }

    /// (face representative dart, cell id) for every face orbit.
    pub fn phi_faces(&self) -> Vec<(Dart, CellId)> {
        let (reps, _) = self.map.face_orbits();
        reps.iter().map(|&r| (r, self.cell_of[r])).collect()
    }

    /// All darts with an F cell on the left and a region on the right: the
    /// boundary of the attachment surface, seen from the F side.
    pub fn f_boundary_darts(&self) -> Vec<Dart> {
        self.map
            .darts()
            .filter(|&d| {
                self.cell_tag(self.cell_of[d]).is_f_cell()
                    && self.cell_tag(self.other_cell(d)).is_region()
            })
            .collect()
    }

    /// Next dart along the boundary circle of the attachment surface,
    /// crossing band-end junctions.
    pub fn next_f_boundary(&self, d: Dart) -> Dart {
        let mut e = self.map.next_in_face(d);
        loop {
            let left = self.cell_tag(self.cell_of[e]);
            let right = self.cell_tag(self.other_cell(e));
            if left.is_f_cell() && right.is_f_cell() {
                e = self.map.sigma(e);
                continue;
            }
            debug_assert!(left.is_f_cell() && right.is_region());
            return e;
        }
    }

    /// Suture arcs: maximal chains of region|region edges. Each arc is a list
    /// of darts (one per edge, oriented consistently along the arc).
    pub fn suture_arcs(&self) -> Vec<SutureArc> {
        let mut used: BTreeSet<Dart> = BTreeSet::new();
        let mut arcs = Vec::new();
        let plains: Vec<Dart> = self
            .map
            .darts()
            .filter(|&d| self.kind[d] == EdgeKind::Plain)
            .collect();
        let is_plain = |s: &Self, d: Dart| s.kind[d] == EdgeKind::Plain;
        // Continuation of a suture through a vertex: the unique other plain
        // dart at the head vertex, if the vertex is a plain-degree-2 point.
        let next_along = |s: &Self, d: Dart| -> Option<Dart> {
            let head = s.map.alpha(d);
            let mut cand = Vec::new();
            for x in s.map.vertex_darts(head) {
                if x != head && is_plain(s, x) {
                    cand.push(x);
                }
            }
            match cand.len() {
                1 => Some(cand[0]),
                _ => None,
            }
        };
        for &start in &plains {
            if used.contains(&start) || used.contains(&self.map.alpha(start)) {
                continue;
            }
            // Walk backwards to an endpoint (or detect a loop).
            let mut first = start;
            let mut closed = false;
            loop {
                let back = next_along(self, self.map.alpha(first));
                match back {
                    Some(prev) => {
                        let prev = self.map.alpha(prev);
                        if prev == start {
                            closed = true;
                            break;
                        }
                        first = prev;
                    }
                    None => break,
                }
            }
            let mut darts = vec![first];
            used.insert(first);
            used.insert(self.map.alpha(first));
            let mut cur = first;
            while let Some(next) = next_along(self, cur) {
                if used.contains(&next) || used.contains(&self.map.alpha(next)) {
                    break;
                }
                darts.push(next);
                used.insert(next);
                used.insert(self.map.alpha(next));
                cur = next;
            }
            arcs.push(SutureArc { darts, closed });
        }
        arcs
    }

    /// Vertices where a suture arc ends on the attachment-surface boundary,
    /// as (vertex representative dart, F cell touched).
    pub fn suture_endpoints(&self) -> Vec<(Dart, CellId)> {
        let mut out = Vec::new();
        let (vreps, _) = self.map.vertex_orbits();
        for &v in &vreps {
            let darts = self.map.vertex_darts(v);
            let plain: Vec<Dart> = darts
                .iter()
                .copied()
                .filter(|&d| self.kind[d] == EdgeKind::Plain)
                .collect();
            if plain.len() != 1 {
                continue;
            }
            // The F cell at this vertex: any incident dart with an F cell side.
            let fcell = darts.iter().find_map(|&d| {
                let c = self.cell_of[d];
                if self.cell_tag(c).is_f_cell() {
                    Some(c)
                } else {
                    let o = self.other_cell(d);
                    if self.cell_tag(o).is_f_cell() {
                        Some(o)
                    } else {
                        None
                    }
                }
            });
            if let Some(f) = fcell {
                out.push((v, f));
            }
        }
        out
    }

    // -- attachment surface decomposition ------------------------------------

    /// Components of the attachment surface with the counts the complexity
    /// measures need.
    pub fn f_components(&self) -> Vec<FComponent> {
        let f_cells: Vec<CellId> = self
            .live_cells()
            .filter(|&c| self.cell_tag(c).is_f_cell())
            .collect();
        if f_cells.is_empty() {
            return Vec::new();
        }
        let mut comp_of: BTreeMap<CellId, usize> = BTreeMap::new();
        let mut parent: BTreeMap<CellId, CellId> = f_cells.iter().map(|&c| (c, c)).collect();
        fn find(p: &mut BTreeMap<CellId, CellId>, x: CellId) -> CellId {
            let px = p[&x];
            if px == x {
                return x;
            }
            let r = find(p, px);
            p.insert(x, r);
            r
        }
        for d in self.map.darts() {
            if self.kind[d] == EdgeKind::Attach {
                let a = self.cell_of[d];
                let b = self.other_cell(d);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent.insert(ra, rb);
                }
            }
        }
        let mut comps: Vec<FComponent> = Vec::new();
        for &c in &f_cells {
            let r = find(&mut parent, c);
            let idx = *comp_of.entry(r).or_insert_with(|| {
                comps.push(FComponent::default());
                comps.len() - 1
            });
            if self.cell_tag(c).is_disc() {
                comps[idx].discs.push(c);
            } else {
                comps[idx].bands.push(c);
            }
        }
        // Boundary circles: trace next_f_boundary circuits.
        let mut seen: BTreeSet<Dart> = BTreeSet::new();
        for d in self.f_boundary_darts() {
            if seen.contains(&d) {
                continue;
            }
            let root = find(&mut parent, self.cell_of[d]);
            let idx = comp_of[&root];
            comps[idx].boundary_circles += 1;
            let mut x = d;
            loop {
                seen.insert(x);
                x = self.next_f_boundary(x);
                if x == d {
                    break;
                }
            }
        }
        // Suture touches.
        for (_, fcell) in self.suture_endpoints() {
            let root = find(&mut parent, fcell);
            comps[comp_of[&root]].gamma_touches += 1;
        }
        for comp in &mut comps {
            comp.euler = comp.discs.len() as i64 - comp.bands.len() as i64;
            comp.index = -2 * comp.euler + comp.gamma_touches as i64;
            comp.discs.sort_unstable();
            comp.bands.sort_unstable();
        }
        comps.sort_by(|a, b| a.discs.cmp(&b.discs).then(a.bands.cmp(&b.bands)));
        comps
    }

    /// Band valence of a disc: the number of band ends attached to it.
    pub fn disc_valence(&self, disc: CellId) -> u64 {
        self.map
            .darts()
            .filter(|&d| self.cell_of[d] == disc && self.kind[d] == EdgeKind::Attach)
            .count() as u64
    }

    /// Suture endpoints landing on this disc's boundary.
    pub fn disc_gamma_hits(&self, disc: CellId) -> u64 {
        self.suture_endpoints().iter().filter(|&&(_, f)| f == disc).count() as u64
    }

    pub fn disc_index(&self, disc: CellId) -> i64 {
        crate::complexity::index_of_0handle(self.disc_valence(disc), self.disc_gamma_hits(disc))
    }

    // -- validation -----------------------------------------------------------

    pub fn well_formed(&self) -> Result<(), SurfaceError> {
        if self.map.num_darts() == 0 {
            let regions: Vec<CellId> = self.live_cells().collect();
            if regions.len() != 1 || !self.cell_tag(regions[0]).is_region() {
                return Err(SurfaceError::BadCell(
                    "empty sphere must be a single region".into(),
                ));
            }
            return Ok(());
        }
        self.map.check().map_err(SurfaceError::BrokenMap)?;
        for d in self.map.darts() {
            if self.kind[d] != self.kind[self.map.alpha(d)] {
                return Err(SurfaceError::BadCell(format!("kind mismatch on dart {d}")));
            }
            let c = self.cell_of[d];
            if c >= self.cells.len() || !self.cells[c].alive {
                return Err(SurfaceError::BadCell(format!("dart {d} in dead cell")));
            }
            let left = self.cell_tag(c);
            let right = self.cell_tag(self.other_cell(d));
            let ok = match self.kind[d] {
                EdgeKind::Attach => {
                    (left.is_disc() && right.is_band()) || (left.is_band() && right.is_disc())
                }
                EdgeKind::BandSide => {
                    (left.is_band() && right.is_region()) || (left.is_region() && right.is_band())
                }
                EdgeKind::FaceArc { .. } | EdgeKind::FaceGap | EdgeKind::Scar { .. } => {
                    (left.is_disc() && right.is_region()) || (left.is_region() && right.is_disc())
                }
                EdgeKind::Plain => left.is_region() && right.is_region(),
            };
            if !ok {
                return Err(SurfaceError::BadCell(format!(
                    "dart {d} kind {:?} between {:?} and {:?}",
                    self.kind[d], left, right
                )));
            }
            // Sutures separate opposite orientations.
            if self.kind[d] == EdgeKind::Plain {
                let (lo, ro) = (left.orient().unwrap(), right.orient().unwrap());
                if lo == ro && self.cell_of[d] != self.other_cell(d) {
                    return Err(SurfaceError::BadCell(format!(
                        "plain edge {d} between regions of equal orientation"
                    )));
                }
                if self.cell_of[d] == self.other_cell(d) {
                    return Err(SurfaceError::BadCell(format!(
                        "plain edge {d} has the same region on both sides"
                    )));
                }
            }
        }
        // F cells must consist of exactly one face orbit each.
        let mut face_count: BTreeMap<CellId, usize> = BTreeMap::new();
        for (_, c) in self.phi_faces() {
            *face_count.entry(c).or_insert(0) += 1;
        }
        for c in self.live_cells() {
            let n = face_count.get(&c).copied().unwrap_or(0);
            if self.cell_tag(c).is_f_cell() && n != 1 {
                return Err(SurfaceError::BadCell(format!(
                    "F cell {c} spans {n} faces"
                )));
            }
            if n == 0 && !self.cell_tag(c).is_region() {
                return Err(SurfaceError::BadCell(format!("cell {c} has no faces")));
            }
        }
        // Band shape: exactly two attach edges, separated by runs of sides.
        for c in self.live_cells() {
            if !self.cell_tag(c).is_band() {
                continue;
            }
            let rep = self
                .map
                .darts()
                .find(|&d| self.cell_of[d] == c)
                .expect("band has darts");
            let walk = self.map.face_darts(rep);
            let attaches = walk.iter().filter(|&&d| self.kind[d] == EdgeKind::Attach).count();
            let sides = walk.iter().filter(|&&d| self.kind[d] == EdgeKind::BandSide).count();
            if attaches != 2 || sides == 0 || attaches + sides != walk.len() {
                return Err(SurfaceError::BadCell(format!(
                    "band {c} malformed: {attaches} ends, {sides} side edges"
                )));
            }
        }
        self.check_region_tree()?;
        Ok(())
    }

    /// The component/region incidence structure must be a tree for the whole
    /// complex to embed in one sphere.
    fn check_region_tree(&self) -> Result<(), SurfaceError> {
        let (ncomp, comp) = self.map.components();
        let mut region_ids: Vec<CellId> = self
            .live_cells()
            .filter(|&c| self.cell_tag(c).is_region())
            .collect();
        region_ids.sort_unstable();
        let ridx: BTreeMap<CellId, usize> = region_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let nodes = ncomp + region_ids.len();
        let mut edges = Vec::new();
        for (rep, c) in self.phi_faces() {
            if let Some(&ri) = ridx.get(&c) {
                edges.push((comp[rep], ncomp + ri));
            }
        }
        if edges.len() + 1 != nodes {
            return Err(SurfaceError::BadCell(format!(
                "region nesting not tree-like: {} incidences, {} nodes",
                edges.len(),
                nodes
            )));
        }
        let mut parent: Vec<usize> = (0..nodes).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(SurfaceError::BadCell("region nesting has a cycle".into()));
            }
            parent[ra] = rb;
        }
        Ok(())
    }

    // -- normalization ---------------------------------------------------------

    /// Erases seams between same-orientation regions and smooths degree-two
    /// vertices between same-kind edges. Deterministic fixpoint.
    pub fn normalize(&mut self) {
        loop {
            let mut changed = false;
            // Seam erasure.
            let darts: Vec<Dart> = self.map.darts().collect();
            for d in darts {
                if !self.map.is_alive(d) || self.kind[d] != EdgeKind::Plain {
                    continue;
                }
                let (a, b) = (self.cell_of[d], self.other_cell(d));
                let (ta, tb) = (self.cell_tag(a), self.cell_tag(b));
                let same = match (ta, tb) {
                    (CellTag::Region { orient: oa, h3: ha }, CellTag::Region { orient: ob, h3: hb }) => {
                        oa == ob && ha == hb
                    }
                    _ => false,
                };
                if same || a == b {
                    self.map.delete_edge(d);
                    if a != b {
                        self.merge_cell_into(b.max(a), b.min(a));
                    }
                    changed = true;
                }
            }
            // Smoothing.
            let darts: Vec<Dart> = self.map.darts().collect();
            for d in darts {
                if !self.map.is_alive(d) {
                    continue;
                }
                let d2 = self.map.sigma(d);
                if d2 == d || self.map.sigma(d2) != d {
                    continue;
                }
                if self.kind[d] != self.kind[d2] {
                    continue;
                }
                // Sides must match up for the merged edge to make sense.
                if self.cell_of[d] != self.cell_of[self.map.alpha(d2)]
                    || self.cell_of[d2] != self.cell_of[self.map.alpha(d)]
                {
                    continue;
                }
                if self.map.smooth_vertex(d).is_some() {
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.prune_dead_cells();
    }

    fn prune_dead_cells(&mut self) {
        let used: BTreeSet<CellId> = self.map.darts().map(|d| self.cell_of[d]).collect();
        if self.map.num_darts() == 0 {
            // Keep exactly one region if everything was erased.
            let keep = self.live_cells().find(|&c| self.cell_tag(c).is_region());
            for c in 0..self.cells.len() {
                if Some(c) != keep {
                    self.cells[c].alive = false;
                }
            }
            return;
        }
        for c in 0..self.cells.len() {
            if self.cells[c].alive && !used.contains(&c) {
                self.cells[c].alive = false;
            }
        }
    }

    /// Renumbers darts and cells densely; deterministic given current order.
    pub fn compact(&mut self) {
        let mut new_complex = SphereComplex::default();
        new_complex.cells.clear();
        let mut cell_map: BTreeMap<CellId, CellId> = BTreeMap::new();
        for c in self.live_cells() {
            let nc = new_complex.cells.len();
            new_complex.cells.push(CellData { tag: self.cells[c].tag, alive: true });
            cell_map.insert(c, nc);
        }
        let mut dart_map: BTreeMap<Dart, Dart> = BTreeMap::new();
        let live: Vec<Dart> = self.map.darts().collect();
        // Pair darts so alpha partners are adjacent in the new numbering.
        for &d in &live {
            if dart_map.contains_key(&d) {
                continue;
            }
            let a = self.map.alpha(d);
            let nd = dart_map.len();
            dart_map.insert(d, nd);
            dart_map.insert(a, nd + 1);
        }
        let n = dart_map.len();
        let mut sigma = vec![0; n];
        let mut sigma_inv = vec![0; n];
        let mut alpha = vec![0; n];
        let mut kind = vec![EdgeKind::Plain; n];
        let mut cell_of = vec![0; n];
        for (&d, &nd) in &dart_map {
            sigma[nd] = dart_map[&self.map.sigma(d)];
            sigma_inv[nd] = dart_map[&self.map.sigma_inv(d)];
            alpha[nd] = dart_map[&self.map.alpha(d)];
            kind[nd] = self.kind[d];
            cell_of[nd] = cell_map[&self.cell_of[d]];
        }
        new_complex.map = CombMap::from_raw(sigma, sigma_inv, alpha);
        new_complex.kind = kind;
        new_complex.cell_of = cell_of;
        if new_complex.cells.is_empty() {
            // Should not happen: empty spheres keep their region cell.
            new_complex
                .cells
                .push(CellData { tag: CellTag::Region { orient: Orient::In, h3: false }, alive: true });
        }
        *self = new_complex;
    }

    // -- serialization ----------------------------------------------------------

    /// Deterministic text form; also the canonical-key payload once the
    /// complex has been canonically relabeled.
    pub fn serialize(&self) -> String {
        let mut out = String::from("spherecomplex v1\n");
        out.push_str(&format!("darts {}\n", self.map.num_darts()));
        let mut cell_order: Vec<CellId> = self.live_cells().collect();
        cell_order.sort_unstable();
        let cell_index: BTreeMap<CellId, usize> =
            cell_order.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        for c in &cell_order {
            let tag = self.cell_tag(*c);
            let line = match tag {
                CellTag::Disc { anchor } => match anchor {
                    Some(f) => format!("cell {} disc {}\n", cell_index[c], f),
                    None => format!("cell {} disc -\n", cell_index[c]),
                },
                CellTag::Band => format!("cell {} band\n", cell_index[c]),
                CellTag::Region { orient, h3 } => format!(
                    "cell {} region {} {}\n",
                    cell_index[c],
                    match orient {
                        Orient::In => "in",
                        Orient::Out => "out",
                    },
                    if h3 { "h3" } else { "bd" }
                ),
            };
            out.push_str(&line);
        }
        for d in self.map.darts() {
            out.push_str(&format!(
                "d {} {} {} {} {}\n",
                d,
                self.map.sigma(d),
                self.map.alpha(d),
                kind_token(self.kind[d]),
                cell_index[&self.cell_of[d]],
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<SphereComplex, SurfaceError> {
        let mut lines = text.lines().enumerate();
        let perr = |line: usize, msg: &str| SurfaceError::Parse { line: line + 1, msg: msg.into() };
        let Some((l0, header)) = lines.next() else {
            return Err(perr(0, "empty input"));
        };
        if header.trim() != "spherecomplex v1" {
            return Err(perr(l0, "expected 'spherecomplex v1' header"));
        }
        let mut ndarts = None;
        let mut cells: Vec<CellData> = Vec::new();
        let mut dart_lines: Vec<(usize, usize, usize, EdgeKind, usize)> = Vec::new();
        for (ln, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "darts" => {
                    ndarts = Some(tok.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| perr(ln, "bad darts count"))?)
                }
                "cell" => {
                    let idx: usize = tok.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| perr(ln, "bad cell id"))?;
                    if idx != cells.len() {
                        return Err(perr(ln, "cells must be listed in order"));
                    }
                    let tag = match *tok.get(2).ok_or_else(|| perr(ln, "missing cell tag"))? {
                        "disc" => {
                            let anchor = match *tok.get(3).ok_or_else(|| perr(ln, "missing disc anchor"))? {
                                "-" => None,
                                s => Some(s.parse().map_err(|_| perr(ln, "bad disc anchor"))?),
                            };
                            CellTag::Disc { anchor }
                        }
                        "band" => CellTag::Band,
                        "region" => {
                            let orient = match *tok.get(3).ok_or_else(|| perr(ln, "missing orientation"))? {
                                "in" => Orient::In,
                                "out" => Orient::Out,
                                _ => return Err(perr(ln, "bad orientation")),
                            };
                            let h3 = match *tok.get(4).ok_or_else(|| perr(ln, "missing region kind"))? {
                                "h3" => true,
                                "bd" => false,
                                _ => return Err(perr(ln, "bad region kind")),
                            };
                            CellTag::Region { orient, h3 }
                        }
                        _ => return Err(perr(ln, "unknown cell tag")),
                    };
                    cells.push(CellData { tag, alive: true });
                }
                "d" => {
                    let get = |i: usize| -> Result<usize, SurfaceError> {
                        tok.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| perr(ln, "bad dart field"))
                    };
                    let d = get(1)?;
                    let s = get(2)?;
                    let a = get(3)?;
                    let k = parse_kind(tok.get(4).copied().unwrap_or("")).ok_or_else(|| perr(ln, "bad edge kind"))?;
                    let c = get(5)?;
                    dart_lines.push((d, s, a, k, c));
                }
                _ => return Err(perr(ln, "unknown record")),
            }
        }
        let n = ndarts.ok_or_else(|| perr(0, "missing darts count"))?;
        if dart_lines.len() != n {
            return Err(perr(0, "dart count mismatch"));
        }
        let mut sigma = vec![usize::MAX; n];
        let mut alpha = vec![usize::MAX; n];
        let mut kind = vec![EdgeKind::Plain; n];
        let mut cell_of = vec![usize::MAX; n];
        for (d, s, a, k, c) in dart_lines {
            if d >= n || s >= n || a >= n || c >= cells.len() {
                return Err(perr(0, "dart record out of range"));
            }
            sigma[d] = s;
            alpha[d] = a;
            kind[d] = k;
            cell_of[d] = c;
        }
        if sigma.iter().any(|&s| s == usize::MAX) {
            return Err(perr(0, "missing dart records"));
        }
        let mut sigma_inv = vec![usize::MAX; n];
        for d in 0..n {
            sigma_inv[sigma[d]] = d;
        }
        if sigma_inv.iter().any(|&s| s == usize::MAX) {
            return Err(perr(0, "sigma is not a permutation"));
        }
        let sc = SphereComplex {
            map: CombMap::from_raw(sigma, sigma_inv, alpha),
            cell_of,
            kind,
            cells,
        };
        sc.well_formed()?;
        Ok(sc)
    }
}

fn kind_token(k: EdgeKind) -> String {
    match k {
        EdgeKind::Attach => "at".into(),
        EdgeKind::BandSide => "bs".into(),
        EdgeKind::FaceArc { corner } => format!("fa{corner}"),
        EdgeKind::FaceGap => "fg".into(),
        EdgeKind::Scar { id } => format!("sc{id}"),
        EdgeKind::Plain => "pl".into(),
    }
}

fn parse_kind(tok: &str) -> Option<EdgeKind> {
    match tok {
        "at" => Some(EdgeKind::Attach),
        "bs" => Some(EdgeKind::BandSide),
        "fg" => Some(EdgeKind::FaceGap),
        "pl" => Some(EdgeKind::Plain),
        _ => {
            if let Some(rest) = tok.strip_prefix("fa") {
                rest.parse().ok().map(|corner| EdgeKind::FaceArc { corner })
            } else if let Some(rest) = tok.strip_prefix("sc") {
                rest.parse().ok().map(|id| EdgeKind::Scar { id })
            } else {
                None
            }
        }
    }
}

/// One component of the attachment surface.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FComponent {
    pub discs: Vec<CellId>,
    pub bands: Vec<CellId>,
    pub boundary_circles: usize,
    pub gamma_touches: u64,
    pub euler: i64,
    pub index: i64,
}

impl FComponent {
    pub fn counts(&self, zero_handle: usize) -> crate::complexity::ComponentCounts {
        crate::complexity::ComponentCounts {
            band_cells: self.bands.len() as u64,
            index: self.index,
            boundary_circles: self.boundary_circles as u64,
            zero_handle,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SutureArc {
    pub darts: Vec<Dart>,
    pub closed: bool,
}
