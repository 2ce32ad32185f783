//! Decomposing a sphere complex along a curve system.
//!
//! Each curve bounds a disc pushed into the ball; cutting along all the discs
//! severs the ball into sub-balls. On the boundary: the sphere is cut along
//! the curves, every cut circle is capped with a copy of the disc, caps are
//! oriented by the curve's transverse orientation (the piece the normal
//! points into receives an inward cap), and the sutures of each piece are
//! re-derived as the interfaces between regions of opposite orientation.
//! Attachment-surface cells split along their chords; disc scars carry a
//! shared id on both sides so the cut can be re-paired later.

use super::curves::{build_overlay, co_side_of, CoSide, Curve, CurveSystem, Overlay};
use super::map::{CombMap, Dart};
use super::{CellId, CellTag, EdgeKind, Orient, SphereComplex, SurfaceError};
use std::collections::{BTreeMap, BTreeSet};

/// Where a result cell came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Parent(CellId),
    Cap { curve: usize },
}

#[derive(Clone, Debug)]
pub struct SplitPiece {
    pub sc: SphereComplex,
    /// Result cell -> sources in the parent complex.
    pub sources: BTreeMap<CellId, BTreeSet<Provenance>>,
    /// Result regions adjacent to the cut (candidates for re-orientation).
    pub touched_regions: BTreeSet<CellId>,
}

impl SplitPiece {
    /// The unique parent source of a result cell, if it has exactly one.
    pub fn parent_of(&self, c: CellId) -> Option<CellId> {
        let src = self.sources.get(&c)?;
        let parents: Vec<CellId> = src
            .iter()
            .filter_map(|p| match p {
                Provenance::Parent(x) => Some(*x),
                _ => None,
            })
            .collect();
        if parents.len() == 1 {
            Some(parents[0])
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub pieces: Vec<SplitPiece>,
    /// Per curve: (piece index on the normal side, piece index on the other).
    pub curve_sides: Vec<(usize, usize)>,
}

pub fn split_along(sc: &SphereComplex, cs: &CurveSystem) -> Result<SplitOutcome, SurfaceError> {
    if cs.curves.is_empty() {
        let mut sources = BTreeMap::new();
        for c in sc.live_cells() {
            sources.insert(c, BTreeSet::from([Provenance::Parent(c)]));
        }
        return Ok(SplitOutcome {
            pieces: vec![SplitPiece { sc: sc.clone(), sources, touched_regions: BTreeSet::new() }],
            curve_sides: Vec::new(),
        });
    }
    let simples = cs.curves.iter().filter(|c| matches!(c, Curve::Simple { .. })).count();
    if simples > 0 {
        if cs.curves.len() != 1 {
            return Err(SurfaceError::BadCurve(
                "simple circles must be split on their own".into(),
            ));
        }
        return simple_split(sc, &cs.curves[0]);
    }
    crossing_split(sc, cs)
}

// ---------------------------------------------------------------------------
// Simple circles (no crossings)
// ---------------------------------------------------------------------------

fn simple_split(sc: &SphereComplex, curve: &Curve) -> Result<SplitOutcome, SurfaceError> {
    let Curve::Simple { cell, enclosed, normal_into_enclosed, .. } = curve else {
        unreachable!()
    };
    let region = *cell;
    if !sc.cell_tag(region).is_region() {
        return Err(SurfaceError::BadCurve(format!("cell {region} is not a region")));
    }
    let orient = sc.cell_tag(region).orient().unwrap();
    let (ncomp, comp_of) = sc.map().components();
    // Components sharing any cell other than the circled region must travel
    // together (nesting closure).
    let mut enclosed_set: BTreeSet<usize> = BTreeSet::new();
    for &d in enclosed {
        if !sc.map().is_alive(d) {
            return Err(SurfaceError::BadCurve("enclosed dart is dead".into()));
        }
        enclosed_set.insert(comp_of[d]);
    }
    loop {
        let mut grew = false;
        let mut cell_comp: BTreeMap<CellId, usize> = BTreeMap::new();
        for d in sc.map().darts() {
            let c = sc.cell_of(d);
            if c == region {
                continue;
            }
            match cell_comp.get(&c) {
                Some(&k) => {
                    let (a, b) = (k, comp_of[d]);
                    if enclosed_set.contains(&a) != enclosed_set.contains(&b) {
                        enclosed_set.insert(a);
                        enclosed_set.insert(b);
                        grew = true;
                    }
                }
                None => {
                    cell_comp.insert(c, comp_of[d]);
                }
            }
        }
        if !grew {
            break;
        }
    }
    let rest_set: BTreeSet<usize> = (0..ncomp).filter(|c| !enclosed_set.contains(c)).collect();
    let (cap_enclosed, cap_rest) = if *normal_into_enclosed {
        (Orient::In, Orient::Out)
    } else {
        (Orient::Out, Orient::In)
    };
    let piece_a = build_simple_side(sc, region, orient, &enclosed_set, &comp_of, cap_enclosed)?;
    let piece_b = build_simple_side(sc, region, orient, &rest_set, &comp_of, cap_rest)?;
    let (pos, neg) = if *normal_into_enclosed { (0, 1) } else { (1, 0) };
    Ok(SplitOutcome { pieces: vec![piece_a, piece_b], curve_sides: vec![(pos, neg)] })
}

/// One side of a simple circle: the listed components, plus a suture loop
/// when the cap orientation differs from the circled region's.
fn build_simple_side(
    sc: &SphereComplex,
    region: CellId,
    region_orient: Orient,
    comps: &BTreeSet<usize>,
    comp_of: &[usize],
    cap: Orient,
) -> Result<SplitPiece, SurfaceError> {
    let (mut piece, cell_map) = copy_components(sc, comps, comp_of);
    let mut sources: BTreeMap<CellId, BTreeSet<Provenance>> = BTreeMap::new();
    for (&old, &new) in &cell_map {
        sources.entry(new).or_default().insert(Provenance::Parent(old));
    }
    let region_new = match cell_map.get(&region) {
        Some(&c) => c,
        None => {
            let c = piece.new_cell(CellTag::Region { orient: region_orient, h3: false });
            sources.entry(c).or_default().insert(Provenance::Parent(region));
            c
        }
    };
    let mut touched = BTreeSet::new();
    if cap == region_orient {
        sources.entry(region_new).or_default().insert(Provenance::Cap { curve: 0 });
        touched.insert(region_new);
    } else {
        let cap_cell = piece.new_cell(CellTag::Region { orient: cap, h3: false });
        sources.entry(cap_cell).or_default().insert(Provenance::Cap { curve: 0 });
        let (l1, l2) = piece.new_edge(EdgeKind::Plain, cap_cell, region_new);
        piece.map_mut().splice_after(l1, l2);
        touched.insert(region_new);
        touched.insert(cap_cell);
    }
    piece.normalize();
    piece.well_formed()?;
    let touched = touched.into_iter().filter(|&c| piece.live(c)).collect();
    Ok(SplitPiece { sc: piece, sources, touched_regions: touched })
}

/// Copies selected map components into a fresh complex, keeping cell tags.
fn copy_components(
    sc: &SphereComplex,
    comps: &BTreeSet<usize>,
    comp_of: &[usize],
) -> (SphereComplex, BTreeMap<CellId, CellId>) {
    let darts: Vec<Dart> = sc.map().darts().filter(|&d| comps.contains(&comp_of[d])).collect();
    let mut dmap: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, &d) in darts.iter().enumerate() {
        dmap.insert(d, i);
    }
    let n = darts.len();
    let mut sigma = vec![0; n];
    let mut sigma_inv = vec![0; n];
    let mut alpha = vec![0; n];
    let mut kind = vec![EdgeKind::Plain; n];
    let mut cell_old = vec![usize::MAX; n];
    for (&d, &nd) in &dmap {
        sigma[nd] = dmap[&sc.map().sigma(d)];
        alpha[nd] = dmap[&sc.map().alpha(d)];
        kind[nd] = sc.kind(d);
        cell_old[nd] = sc.cell_of(d);
    }
    for d in 0..n {
        sigma_inv[sigma[d]] = d;
    }
    let mut out = SphereComplex::from_parts(
        CombMap::from_raw(sigma, sigma_inv, alpha),
        vec![usize::MAX; n],
        kind,
    );
    let mut cell_map = BTreeMap::new();
    for d in 0..n {
        let old = cell_old[d];
        let new = *cell_map.entry(old).or_insert_with(|| out.new_cell(sc.cell_tag(old)));
        out.set_cell_of(d, new);
    }
    (out, cell_map)
}

// ---------------------------------------------------------------------------
// General crossing systems
// ---------------------------------------------------------------------------

fn crossing_split(sc: &SphereComplex, cs: &CurveSystem) -> Result<SplitOutcome, SurfaceError> {
    let overlay = build_overlay(sc, cs)?;
    let work = &overlay.sc;
    let (freps, fidx) = work.map().face_orbits();
    let nfaces = freps.len();

    // Face graph: faces joined across non-chord edges, within uncrossed
    // cells, and through island anchors.
    let mut uf: Vec<usize> = (0..nfaces).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    fn union(uf: &mut Vec<usize>, a: usize, b: usize) {
        let (ra, rb) = (find(uf, a), find(uf, b));
        if ra != rb {
            uf[ra] = rb;
        }
    }
    for d in work.map().darts() {
        if overlay.chord_of[d].is_none() {
            union(&mut uf, fidx[d], fidx[work.map().alpha(d)]);
        }
    }
    let mut cell_face: BTreeMap<CellId, usize> = BTreeMap::new();
    for d in work.map().darts() {
        if overlay.chord_of[d].is_some() {
            continue;
        }
        let c = work.cell_of(d);
        if overlay.crossed_cells.contains(&c) {
            continue;
        }
        match cell_face.get(&c) {
            Some(&f) => union(&mut uf, f, fidx[d]),
            None => {
                cell_face.insert(c, fidx[d]);
            }
        }
    }
    for &(island, anchor) in &cs.island_anchors {
        union(&mut uf, fidx[island], fidx[anchor]);
    }
    let mut piece_of_face: Vec<usize> = vec![usize::MAX; nfaces];
    let mut piece_count = 0;
    for f in 0..nfaces {
        let r = find(&mut uf, f);
        if piece_of_face[r] == usize::MAX {
            piece_of_face[r] = piece_count;
            piece_count += 1;
        }
        piece_of_face[f] = piece_of_face[r];
    }

    // Side pieces per curve.
    let mut curve_sides: Vec<(usize, usize)> = Vec::new();
    for (ci, curve) in cs.curves.iter().enumerate() {
        let d = overlay.seg_dart[ci][0];
        let left_piece = piece_of_face[fidx[d]];
        let right_piece = piece_of_face[fidx[work.map().alpha(d)]];
        if left_piece == right_piece {
            return Err(SurfaceError::UnrealizableSplit(format!("curve {ci} does not separate")));
        }
        let (pos, neg) = match co_side_of(curve) {
            CoSide::Left => (left_piece, right_piece),
            CoSide::Right => (right_piece, left_piece),
        };
        curve_sides.push((pos, neg));
    }

    // Every piece must border some curve, else an island lacked an anchor.
    {
        let mut reached = vec![false; piece_count];
        for ci in 0..cs.curves.len() {
            for &d in overlay.cross_back[ci].iter().chain(overlay.cross_fwd[ci].iter()) {
                reached[piece_of_face[fidx[d]]] = true;
            }
        }
        if reached.iter().any(|&r| !r) {
            return Err(SurfaceError::UnrealizableSplit(
                "a nested component has no placement anchor".into(),
            ));
        }
    }

    // Fresh scar ids per segment, shared by the two sides of each chord.
    let mut next_scar: u32 = 0;
    for d in sc.map().darts() {
        if let EdgeKind::Scar { id } = sc.kind(d) {
            next_scar = next_scar.max(id + 1);
        }
    }
    let mut scar_of_seg: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (ci, segs) in overlay.seg_dart.iter().enumerate() {
        for si in 0..segs.len() {
            scar_of_seg.insert((ci, si), next_scar);
            next_scar += 1;
        }
    }

    let mut pieces = Vec::new();
    for p in 0..piece_count {
        pieces.push(build_piece(
            sc,
            cs,
            &overlay,
            &fidx,
            &piece_of_face,
            p,
            &curve_sides,
            &scar_of_seg,
        )?);
    }
    Ok(SplitOutcome { pieces, curve_sides })
}

/// Cap dart bookkeeping: each (curve, segment) chord contributes one cap edge
/// per bordering piece; end 0 sits at the segment's start vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CapKey {
    curve: usize,
    seg: usize,
    end: u8,
}

#[allow(clippy::too_many_arguments)]
fn build_piece(
    parent: &SphereComplex,
    cs: &CurveSystem,
    overlay: &Overlay,
    fidx: &[usize],
    piece_of_face: &[usize],
    piece: usize,
    curve_sides: &[(usize, usize)],
    scar_of_seg: &BTreeMap<(usize, usize), u32>,
) -> Result<SplitPiece, SurfaceError> {
    let work = &overlay.sc;
    let old_darts: Vec<Dart> = work
        .map()
        .darts()
        .filter(|&d| overlay.chord_of[d].is_none() && piece_of_face[fidx[d]] == piece)
        .collect();
    let mut dmap: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, &d) in old_darts.iter().enumerate() {
        dmap.insert(d, i);
    }
    let mut cap_ids: BTreeMap<CapKey, usize> = BTreeMap::new();
    let mut next = old_darts.len();
    for (ci, segs) in overlay.seg_dart.iter().enumerate() {
        let (pos, neg) = curve_sides[ci];
        if pos != piece && neg != piece {
            continue;
        }
        for si in 0..segs.len() {
            for end in [0u8, 1u8] {
                cap_ids.insert(CapKey { curve: ci, seg: si, end }, next);
                next += 1;
            }
        }
    }
    let n = next;
    let mut sigma = vec![usize::MAX; n];
    let mut sigma_inv = vec![usize::MAX; n];
    let mut alpha = vec![usize::MAX; n];
    let mut kinds = vec![EdgeKind::Plain; n];

    for &d in &old_darts {
        alpha[dmap[&d]] = dmap[&work.map().alpha(d)];
        kinds[dmap[&d]] = work.kind(d);
    }
    for (key, &nd) in &cap_ids {
        alpha[nd] = cap_ids[&CapKey { end: 1 - key.end, ..*key }];
    }

    // Sigma: each old vertex cycle restricted to this piece, chord darts
    // replaced by the piece's cap darts.
    let (vreps, _) = work.map().vertex_orbits();
    let mut cap_emitted: BTreeSet<usize> = BTreeSet::new();
    for &v in &vreps {
        let cycle = work.map().vertex_darts(v);
        let mut emitted: Vec<usize> = Vec::new();
        for &x in &cycle {
            match overlay.chord_of[x] {
                None => {
                    if piece_of_face[fidx[x]] == piece {
                        emitted.push(dmap[&x]);
                    }
                }
                Some((ci, si)) => {
                    let (pos, neg) = curve_sides[ci];
                    if pos != piece && neg != piece {
                        continue;
                    }
                    let end = if x == overlay.seg_dart[ci][si] { 0u8 } else { 1u8 };
                    let nd = cap_ids[&CapKey { curve: ci, seg: si, end }];
                    emitted.push(nd);
                    cap_emitted.insert(nd);
                }
            }
        }
        if emitted.is_empty() {
            continue;
        }
        for k in 0..emitted.len() {
            let a = emitted[k];
            let b = emitted[(k + 1) % emitted.len()];
            sigma[a] = b;
            sigma_inv[b] = a;
        }
    }
    if cap_emitted.len() != cap_ids.len() || sigma.iter().any(|&s| s == usize::MAX) {
        return Err(SurfaceError::UnrealizableSplit("piece assembly left loose darts".into()));
    }
    let map = CombMap::from_raw(sigma, sigma_inv, alpha);
    map.check().map_err(SurfaceError::UnrealizableSplit)?;

    let mut out = SphereComplex::from_parts(map, vec![usize::MAX; n], kinds);
    let (new_freps, new_fidx) = out.map().face_orbits();
    #[derive(Clone, Copy, PartialEq, Eq)]
    enum FaceOwner {
        Parent(CellId),
        Cap { curve: usize },
    }
    let inv_dmap: BTreeMap<usize, Dart> = dmap.iter().map(|(&d, &nd)| (nd, d)).collect();
    let inv_cap: BTreeMap<usize, CapKey> = cap_ids.iter().map(|(&k, &nd)| (nd, k)).collect();
    let mut owner: Vec<FaceOwner> = Vec::with_capacity(new_freps.len());
    for &rep in &new_freps {
        let walk = out.map().face_darts(rep);
        let mut cap_curve: Option<usize> = None;
        let mut all_cap = true;
        for &d in &walk {
            match inv_cap.get(&d) {
                Some(key) => {
                    if cap_curve.is_none() {
                        cap_curve = Some(key.curve);
                    }
                    if cap_curve != Some(key.curve) {
                        all_cap = false;
                    }
                }
                None => all_cap = false,
            }
        }
        if all_cap {
            owner.push(FaceOwner::Cap { curve: cap_curve.unwrap() });
            continue;
        }
        let mut parent_cell = None;
        for &d in &walk {
            if let Some(&old) = inv_dmap.get(&d) {
                parent_cell = Some(work.cell_of(old));
                break;
            }
        }
        if parent_cell.is_none() {
            let key = inv_cap[&walk[0]];
            let chord = overlay.seg_dart[key.curve][key.seg];
            parent_cell = Some(work.cell_of(chord));
        }
        owner.push(FaceOwner::Parent(parent_cell.unwrap()));
    }

    let mut sources: BTreeMap<CellId, BTreeSet<Provenance>> = BTreeMap::new();
    let mut cap_cell: BTreeMap<usize, CellId> = BTreeMap::new();
    let mut uncrossed_cell: BTreeMap<CellId, CellId> = BTreeMap::new();
    let mut face_cell: Vec<CellId> = vec![usize::MAX; new_freps.len()];
    for (f, own) in owner.iter().enumerate() {
        let c = match own {
            FaceOwner::Cap { curve } => *cap_cell.entry(*curve).or_insert_with(|| {
                let (pos, _) = curve_sides[*curve];
                let orient = if pos == piece { Orient::In } else { Orient::Out };
                let c = out.new_cell(CellTag::Region { orient, h3: false });
                sources.entry(c).or_default().insert(Provenance::Cap { curve: *curve });
                c
            }),
            FaceOwner::Parent(pc) => {
                if overlay.crossed_cells.contains(pc) {
                    let c = out.new_cell(parent.cell_tag(*pc));
                    sources.entry(c).or_default().insert(Provenance::Parent(*pc));
                    c
                } else {
                    *uncrossed_cell.entry(*pc).or_insert_with(|| {
                        let c = out.new_cell(parent.cell_tag(*pc));
                        sources.entry(c).or_default().insert(Provenance::Parent(*pc));
                        c
                    })
                }
            }
        };
        face_cell[f] = c;
    }
    for d in 0..n {
        out.set_cell_of(d, face_cell[new_fidx[d]]);
    }
    // Island anchors: the island's region face joins the anchor's cell.
    for &(island, anchor) in &cs.island_anchors {
        if let (Some(&di), Some(&da)) = (dmap.get(&island), dmap.get(&anchor)) {
            let mut ci = out.cell_of(di);
            if !out.cell_tag(ci).is_region() {
                ci = out.cell_of(out.map().alpha(di));
            }
            let ca = out.cell_of(da);
            if ci != ca && out.cell_tag(ci).is_region() && out.cell_tag(ca).is_region() {
                let keep = ci.min(ca);
                let drop = ci.max(ca);
                let src = sources.remove(&drop).unwrap_or_default();
                sources.entry(keep).or_default().extend(src);
                out.merge_cell_into(drop, keep);
            }
        }
    }

    // Cap edge kinds from the outer cell.
    let cap_pairs: Vec<(CapKey, usize)> =
        cap_ids.iter().filter(|(k, _)| k.end == 0).map(|(&k, &v)| (k, v)).collect();
    for (key, nd) in cap_pairs {
        let partner = out.map().alpha(nd);
        let (c1, c2) = (out.cell_of(nd), out.cell_of(partner));
        let cap_c = cap_cell.get(&key.curve).copied();
        let outer = if Some(c1) == cap_c { c2 } else { c1 };
        let kind = match out.cell_tag(outer) {
            CellTag::Disc { .. } => EdgeKind::Scar { id: scar_of_seg[&(key.curve, key.seg)] },
            CellTag::Band => EdgeKind::BandSide,
            CellTag::Region { .. } => EdgeKind::Plain,
        };
        out.set_kind(nd, kind);
    }

    // Seam erasure with provenance tracking, then smoothing.
    loop {
        let mut changed = false;
        let darts: Vec<Dart> = out.map().darts().collect();
        for d in darts {
            if !out.map().is_alive(d) || out.kind(d) != EdgeKind::Plain {
                continue;
            }
            let (a, b) = (out.cell_of(d), out.other_cell(d));
            if a == b {
                out.map_mut().delete_edge(d);
                changed = true;
                continue;
            }
            let (ta, tb) = (out.cell_tag(a), out.cell_tag(b));
            if let (CellTag::Region { orient: oa, h3: ha }, CellTag::Region { orient: ob, h3: hb }) =
                (ta, tb)
            {
                if oa == ob && ha == hb {
                    out.map_mut().delete_edge(d);
                    let keep = a.min(b);
                    let drop = a.max(b);
                    let src = sources.remove(&drop).unwrap_or_default();
                    sources.entry(keep).or_default().extend(src);
                    out.merge_cell_into(drop, keep);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    out.normalize();
    out.well_formed()?;
    sources.retain(|&c, _| out.live(c));

    let touched_regions: BTreeSet<CellId> = out
        .live_cells()
        .filter(|&c| {
            out.cell_tag(c).is_region()
                && sources.get(&c).is_some_and(|src| {
                    src.iter().any(|p| match p {
                        Provenance::Cap { .. } => true,
                        Provenance::Parent(pc) => overlay.crossed_cells.contains(pc),
                    })
                })
        })
        .collect();

    Ok(SplitPiece { sc: out, sources, touched_regions })
}

/// Index conservation: for every parent disc, the indices of its descendants
/// across all pieces sum to the parent's; the total over components matches
/// as well.
pub fn index_conserved(parent: &SphereComplex, outcome: &SplitOutcome) -> bool {
    let mut child_sum: BTreeMap<CellId, i64> = BTreeMap::new();
    for piece in &outcome.pieces {
        for c in piece.sc.live_cells() {
            if !piece.sc.cell_tag(c).is_disc() {
                continue;
            }
            match piece.parent_of(c) {
                Some(pc) => *child_sum.entry(pc).or_insert(0) += piece.sc.disc_index(c),
                None => return false,
            }
        }
    }
    for c in parent.live_cells() {
        if parent.cell_tag(c).is_disc()
            && child_sum.get(&c).copied().unwrap_or(0) != parent.disc_index(c)
        {
            return false;
        }
    }
    let parent_total: i64 = parent.f_components().iter().map(|f| f.index).sum();
    let child_total: i64 = outcome
        .pieces
        .iter()
        .flat_map(|p| p.sc.f_components())
        .map(|f| f.index)
        .sum();
    parent_total == child_total
}
