//! Candidate decomposition curves (operation 6) and amalgam push-offs
//! (operation 7).
//!
//! Operation 6 enumerates, per ball, every embedded oriented closed
//! transversal satisfying standard position and the five curve conditions,
//! up to canonical equivalence and within the crossing cap; systems combine
//! distinct oriented classes (the same underlying curve may appear with both
//! orientations), must stay jointly tubing-free, and systems in which every
//! component is a boundary-parallel push-off are dropped. Each split is
//! followed by a branch over the orientations of suture-free regions the cut
//! touched.

use super::{EngineCaps, OpTag, StageConfig};
use std::sync::Arc;
use crate::surface::canonical::{canonical_key_with, LabelMode};
use crate::surface::curves::{
    build_overlay, check_conditions, check_standard_position, co_side_of, CoSide, Curve,
    CurveSystem, Step,
};
use crate::surface::map::Dart;
use crate::surface::split::{split_along, SplitOutcome};
use crate::surface::{CellId, CellTag, EdgeKind, Orient, SphereComplex, SurfaceError};
use std::collections::{BTreeMap, BTreeSet};

/// One oriented curve class on a ball.
#[derive(Clone, Debug)]
pub struct CurveClass {
    pub steps: Vec<Step>,
    pub co_side: CoSide,
    pub key: Vec<u8>,
    pub unoriented_key: Vec<u8>,
    /// Whether the curve is a boundary-parallel push-off with a clean
    /// valence-two parallelity strip (the excluded trivial modification).
    pub pushoff_trivial: bool,
}

/// Canonical key of an embedded system, mixing chord structure and
/// (optionally) transverse orientations into the labels.
pub fn system_key(
    ball: &SphereComplex,
    cs: &CurveSystem,
    oriented: bool,
) -> Result<Vec<u8>, SurfaceError> {
    let overlay = build_overlay(ball, cs)?;
    let label = |d: Dart| -> u32 {
        match overlay.chord_of[d] {
            None => 0,
            Some((ci, seg)) => {
                if !oriented {
                    return 1;
                }
                let travel = overlay.seg_dart[ci][seg];
                let left_of_travel = d == travel;
                let into = match co_side_of(&cs.curves[ci]) {
                    CoSide::Left => left_of_travel,
                    CoSide::Right => !left_of_travel,
                };
                if into {
                    2
                } else {
                    3
                }
            }
        }
    };
    Ok(canonical_key_with(&overlay.sc, LabelMode::Anchored, &label))
}

// ---------------------------------------------------------------------------
// Single-curve enumeration
// ---------------------------------------------------------------------------

fn crossable(ball: &SphereComplex, d: Dart) -> bool {
    ball.kind(d) != EdgeKind::BandSide
        && !matches!(ball.cell_tag(ball.other_cell(d)), CellTag::Region { h3: true, .. })
        && !matches!(ball.cell_tag(ball.cell_of(d)), CellTag::Region { h3: true, .. })
}

/// The attach dart leaving a band through the end other than the one the
/// entering dart came through.
fn band_exit(ball: &SphereComplex, band: CellId, enter: Dart) -> Option<Dart> {
    let enter_edge = enter.min(ball.map().alpha(enter));
    ball.map().darts().find(|&d| {
        ball.cell_of(d) == band
            && ball.kind(d) == EdgeKind::Attach
            && d.min(ball.map().alpha(d)) != enter_edge
    })
}

/// Abstract closed transversal walks: cyclic dart sequences, cell-consistent,
/// vertical in bands, at most one passage per band and one arc per region,
/// at least one disc crossing, length within the cap.
fn abstract_walks(ball: &SphereComplex, max_len: usize) -> Vec<Vec<Dart>> {
    let mut seen: BTreeSet<Vec<Dart>> = BTreeSet::new();
    let mut out = Vec::new();
    let darts: Vec<Dart> = ball.map().darts().collect();
    for &start in &darts {
        if !crossable(ball, start) {
            continue;
        }
        let mut stack: Vec<Vec<Dart>> = vec![vec![start]];
        while let Some(walk) = stack.pop() {
            let last = *walk.last().unwrap();
            let cur = ball.other_cell(last);
            let first_cell = ball.cell_of(walk[0]);
            if walk.len() >= 2 && cur == first_cell && close_is_vertical(ball, &walk) {
                let touches_disc = walk.iter().any(|&d| {
                    ball.cell_tag(ball.cell_of(d)).is_disc()
                        || ball.cell_tag(ball.other_cell(d)).is_disc()
                });
                if touches_disc {
                    let canon = canonical_walk(ball, &walk);
                    if seen.insert(canon.clone()) {
                        out.push(canon);
                    }
                }
            }
            if walk.len() >= max_len {
                continue;
            }
            let next_darts: Vec<Dart> = if ball.cell_tag(cur).is_band() {
                band_exit(ball, cur, last).into_iter().collect()
            } else {
                ball.map()
                    .darts()
                    .filter(|&d| ball.cell_of(d) == cur && crossable(ball, d))
                    .collect()
            };
            for d in next_darts {
                let mut w = walk.clone();
                w.push(d);
                if walk_within_limits(ball, &w) {
                    stack.push(w);
                }
            }
        }
    }
    out
}

/// When the walk closes inside a band, the wrap-around passage must also be
/// vertical: the first step must leave through the band's other end.
fn close_is_vertical(ball: &SphereComplex, walk: &[Dart]) -> bool {
    let last = *walk.last().unwrap();
    let cur = ball.other_cell(last);
    if !ball.cell_tag(cur).is_band() {
        return true;
    }
    match band_exit(ball, cur, last) {
        Some(exit) => {
            exit.min(ball.map().alpha(exit)) == walk[0].min(ball.map().alpha(walk[0]))
        }
        None => false,
    }
}

fn walk_within_limits(ball: &SphereComplex, walk: &[Dart]) -> bool {
    let mut band_count: BTreeMap<CellId, usize> = BTreeMap::new();
    let mut region_count: BTreeMap<CellId, usize> = BTreeMap::new();
    for &d in walk {
        let cell = ball.other_cell(d);
        match ball.cell_tag(cell) {
            CellTag::Band => *band_count.entry(cell).or_insert(0) += 1,
            CellTag::Region { .. } => *region_count.entry(cell).or_insert(0) += 1,
            _ => {}
        }
    }
    band_count.values().all(|&k| k <= 1) && region_count.values().all(|&k| k <= 1)
}

/// Minimal representative over rotations and reversal.
fn canonical_walk(ball: &SphereComplex, walk: &[Dart]) -> Vec<Dart> {
    let n = walk.len();
    let mut best: Option<Vec<Dart>> = None;
    let consider = |cand: &[Dart], best: &mut Option<Vec<Dart>>| {
        for r in 0..n {
            let rot: Vec<Dart> = (0..n).map(|i| cand[(r + i) % n]).collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                *best = Some(rot);
            }
        }
    };
    consider(walk, &mut best);
    let rev: Vec<Dart> = walk.iter().rev().map(|&d| ball.map().alpha(d)).collect();
    consider(&rev, &mut best);
    best.unwrap()
}

/// All rank assignments realizing an abstract walk as an embedded curve.
fn realizations(ball: &SphereComplex, walk: &[Dart], co_side: CoSide) -> Vec<CurveSystem> {
    let mut per_edge: BTreeMap<Dart, Vec<usize>> = BTreeMap::new();
    for (i, &d) in walk.iter().enumerate() {
        per_edge.entry(d.min(ball.map().alpha(d))).or_default().push(i);
    }
    let edges: Vec<(Dart, Vec<usize>)> = per_edge.into_iter().collect();
    let mut out = Vec::new();
    let mut ranks: Vec<u32> = vec![0; walk.len()];
    assign_ranks(ball, walk, co_side, &edges, 0, &mut ranks, &mut out);
    out
}

fn assign_ranks(
    ball: &SphereComplex,
    walk: &[Dart],
    co_side: CoSide,
    edges: &[(Dart, Vec<usize>)],
    e: usize,
    ranks: &mut Vec<u32>,
    out: &mut Vec<CurveSystem>,
) {
    if e == edges.len() {
        let steps: Vec<Step> = walk
            .iter()
            .zip(ranks.iter())
            .map(|(&dart, &rank)| Step { dart, rank })
            .collect();
        let cs = CurveSystem::single(steps, co_side);
        if build_overlay(ball, &cs).is_ok() {
            out.push(cs);
        }
        return;
    }
    let (_, steps_here) = &edges[e];
    let k = steps_here.len();
    let mut perm: Vec<u32> = (0..k as u32).collect();
    loop {
        for (slot, &si) in steps_here.iter().enumerate() {
            ranks[si] = perm[slot];
        }
        assign_ranks(ball, walk, co_side, edges, e + 1, ranks, out);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(p: &mut [u32]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Boundary-parallel push-off: the curve stays in the attachment surface and
/// one side of it is a clean suture-free strip whose disc pieces each touch
/// exactly two band ends.
fn is_trivial_pushoff(ball: &SphereComplex, cs: &CurveSystem) -> bool {
    let Curve::Crossing { steps, .. } = &cs.curves[0] else {
        return false;
    };
    if steps.iter().any(|s| ball.kind(s.dart) != EdgeKind::Attach) {
        return false;
    }
    let Ok(overlay) = build_overlay(ball, cs) else {
        return false;
    };
    'side: for pick_left in [true, false] {
        let n = steps.len();
        for i in 0..n {
            let cell = ball.other_cell(steps[i].dart);
            if !ball.cell_tag(cell).is_disc() {
                continue;
            }
            let d1 = overlay.seg_dart[0][i];
            let chord = if pick_left { d1 } else { overlay.sc.map().alpha(d1) };
            let walk = overlay.sc.map().face_darts(chord);
            let mut attach_edges: BTreeSet<Dart> = BTreeSet::new();
            let mut free_darts = 0usize;
            for &d in walk.iter().skip(1) {
                if overlay.chord_of[d].is_some() {
                    continue 'side;
                }
                if let Some(rep) = overlay.orig_edge[d] {
                    match ball.kind(rep) {
                        EdgeKind::Attach => {
                            attach_edges.insert(rep);
                        }
                        k if k.is_disc_boundary() => free_darts += 1,
                        _ => {}
                    }
                }
                let head = overlay.sc.map().alpha(d);
                let plains = overlay
                    .sc
                    .map()
                    .vertex_darts(head)
                    .into_iter()
                    .filter(|&x| {
                        overlay.sc.kind(x) == EdgeKind::Plain && overlay.chord_of[x].is_none()
                    })
                    .count();
                if plains == 1 {
                    continue 'side;
                }
            }
            if attach_edges.len() != 2 || free_darts == 0 {
                continue 'side;
            }
        }
        return true;
    }
    false
}

/// All oriented curve classes on one ball.
pub fn enumerate_curves(
    ball: &SphereComplex,
    max_crossings: u32,
) -> Result<Vec<CurveClass>, SurfaceError> {
    let mut classes: BTreeMap<Vec<u8>, CurveClass> = BTreeMap::new();
    for walk in abstract_walks(ball, max_crossings as usize) {
        for co_side in [CoSide::Left, CoSide::Right] {
            for cs in realizations(ball, &walk, co_side) {
                if !check_standard_position(ball, &cs)?.is_empty() {
                    continue;
                }
                if !check_conditions(ball, &cs)?.all_satisfied() {
                    continue;
                }
                let key = system_key(ball, &cs, true)?;
                if classes.contains_key(&key) {
                    continue;
                }
                let unoriented_key = system_key(ball, &cs, false)?;
                let Curve::Crossing { steps, .. } = &cs.curves[0] else { unreachable!() };
                let pushoff_trivial = is_trivial_pushoff(ball, &cs);
                classes.insert(
                    key.clone(),
                    CurveClass {
                        steps: steps.clone(),
                        co_side,
                        key,
                        unoriented_key,
                        pushoff_trivial,
                    },
                );
            }
        }
    }
    Ok(classes.into_values().collect())
}

// ---------------------------------------------------------------------------
// System assembly
// ---------------------------------------------------------------------------

/// Inserts another curve class into an embedded system, enumerating the
/// order-preserving rank interleavings that embed.
fn insert_curve(ball: &SphereComplex, base: &CurveSystem, class: &CurveClass) -> Vec<CurveSystem> {
    let mut existing: BTreeMap<Dart, u32> = BTreeMap::new();
    for curve in &base.curves {
        if let Curve::Crossing { steps, .. } = curve {
            for st in steps {
                *existing
                    .entry(st.dart.min(ball.map().alpha(st.dart)))
                    .or_insert(0) += 1;
            }
        }
    }
    let mut ours: BTreeMap<Dart, Vec<usize>> = BTreeMap::new();
    for (i, st) in class.steps.iter().enumerate() {
        ours.entry(st.dart.min(ball.map().alpha(st.dart)))
            .or_default()
            .push(i);
    }
    for list in ours.values_mut() {
        list.sort_by_key(|&i| class.steps[i].rank);
    }
    let edges: Vec<(Dart, Vec<usize>)> = ours.into_iter().collect();
    let mut results = Vec::new();
    let mut choice: Vec<Vec<u32>> = Vec::new();
    insert_rec(ball, base, class, &edges, &existing, 0, &mut choice, &mut results);
    results
}

#[allow(clippy::too_many_arguments)]
fn insert_rec(
    ball: &SphereComplex,
    base: &CurveSystem,
    class: &CurveClass,
    edges: &[(Dart, Vec<usize>)],
    existing: &BTreeMap<Dart, u32>,
    e: usize,
    choice: &mut Vec<Vec<u32>>,
    results: &mut Vec<CurveSystem>,
) {
    if e == edges.len() {
        let mut curves = base.curves.clone();
        let mut new_steps = class.steps.clone();
        for (k, (edge, ours_here)) in edges.iter().enumerate() {
            let slots = &choice[k];
            for curve in curves.iter_mut() {
                if let Curve::Crossing { steps, .. } = curve {
                    for st in steps.iter_mut() {
                        if st.dart.min(ball.map().alpha(st.dart)) == *edge {
                            let bump = slots.iter().filter(|&&s| s <= st.rank).count() as u32;
                            st.rank += bump;
                        }
                    }
                }
            }
            for (slot_idx, &si) in ours_here.iter().enumerate() {
                new_steps[si].rank = slots[slot_idx] + slot_idx as u32;
            }
        }
        curves.push(Curve::Crossing { steps: new_steps, co_side: class.co_side });
        let cs = CurveSystem { curves, island_anchors: base.island_anchors.clone() };
        if build_overlay(ball, &cs).is_ok() {
            results.push(cs);
        }
        return;
    }
    let (edge, ours_here) = &edges[e];
    let m = existing.get(edge).copied().unwrap_or(0);
    let k = ours_here.len() as u32;
    let mut all = Vec::new();
    slot_combos(m, k, 0, &mut Vec::new(), &mut all);
    for slots in all {
        choice.push(slots);
        insert_rec(ball, base, class, edges, existing, e + 1, choice, results);
        choice.pop();
    }
}

/// Nondecreasing insertion points 0..=m for k new crossings.
fn slot_combos(m: u32, k: u32, start: u32, cur: &mut Vec<u32>, all: &mut Vec<Vec<u32>>) {
    if k == 0 {
        all.push(cur.clone());
        return;
    }
    for s in start..=m {
        cur.push(s);
        slot_combos(m, k - 1, s, cur, all);
        cur.pop();
    }
}

/// Placement variants for graph components floating inside crossed regions.
fn island_anchor_choices(
    ball: &SphereComplex,
    cs: &CurveSystem,
) -> Result<Vec<CurveSystem>, SurfaceError> {
    let overlay = build_overlay(ball, cs)?;
    let (ncomp, comp_of) = ball.map().components();
    let mut touched = vec![false; ncomp];
    for curve in &cs.curves {
        if let Curve::Crossing { steps, .. } = curve {
            for st in steps {
                touched[comp_of[st.dart]] = true;
            }
        }
    }
    let mut floating: Vec<usize> = Vec::new();
    for c in 0..ncomp {
        if touched[c] {
            continue;
        }
        let mut has_region = false;
        let mut all_crossed = true;
        for d in ball.map().darts().filter(|&d| comp_of[d] == c) {
            if ball.cell_tag(ball.cell_of(d)).is_region() {
                has_region = true;
                if !overlay.crossed_cells.contains(&ball.cell_of(d)) {
                    all_crossed = false;
                }
            }
        }
        if has_region && all_crossed {
            floating.push(c);
        }
    }
    if floating.is_empty() {
        return Ok(vec![cs.clone()]);
    }
    let mut variants = vec![cs.clone()];
    for &isl in &floating {
        let isl_dart = ball.map().darts().find(|&d| comp_of[d] == isl).unwrap();
        let regions: BTreeSet<CellId> = ball
            .map()
            .darts()
            .filter(|&d| comp_of[d] == isl && ball.cell_tag(ball.cell_of(d)).is_region())
            .map(|d| ball.cell_of(d))
            .collect();
        let anchors: Vec<Dart> = ball
            .map()
            .darts()
            .filter(|&d| comp_of[d] != isl && regions.contains(&ball.cell_of(d)))
            .collect();
        if anchors.is_empty() {
            return Ok(Vec::new());
        }
        let mut next = Vec::new();
        for v in &variants {
            for &a in &anchors {
                let mut w = v.clone();
                w.island_anchors.push((isl_dart, a));
                next.push(w);
            }
        }
        variants = next;
    }
    Ok(variants)
}

/// The split pieces for one system, times the branch over re-orientations of
/// suture-free regions the cut touched.
fn decomposition_children(
    ball: &SphereComplex,
    cs: &CurveSystem,
) -> Result<Vec<Vec<SphereComplex>>, SurfaceError> {
    let mut out = Vec::new();
    for variant in island_anchor_choices(ball, cs)? {
        let outcome: SplitOutcome = match split_along(ball, &variant) {
            Ok(o) => o,
            Err(SurfaceError::UnrealizableSplit(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut flips: Vec<(usize, CellId)> = Vec::new();
        for (pi, piece) in outcome.pieces.iter().enumerate() {
            for &r in &piece.touched_regions {
                let gamma_free = piece
                    .sc
                    .map()
                    .darts()
                    .all(|d| piece.sc.cell_of(d) != r || piece.sc.kind(d) != EdgeKind::Plain);
                if gamma_free {
                    flips.push((pi, r));
                }
            }
        }
        let k = flips.len().min(12);
        for mask in 0..(1u64 << k) {
            let mut balls: Vec<SphereComplex> =
                outcome.pieces.iter().map(|p| p.sc.clone()).collect();
            for (bit, &(pi, r)) in flips.iter().take(k).enumerate() {
                if mask >> bit & 1 == 1 {
                    let cur = balls[pi].cell_tag(r).orient().unwrap();
                    balls[pi].set_region_orient(r, cur.flip());
                }
            }
            out.push(balls);
        }
    }
    Ok(out)
}

/// Per-ball decomposition results are cached across engine nodes: untouched
/// balls recur verbatim in many states, and their candidate systems and
/// split pieces depend only on the ball itself and the crossing cap.
type BallReplacements = Arc<(Vec<Vec<Vec<Arc<SphereComplex>>>>, bool)>;

fn ball_replacements_cached(ball: &SphereComplex, caps: &EngineCaps) -> Result<BallReplacements, SurfaceError> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<(String, u32, usize), BallReplacements>>> = OnceLock::new();
    // Replacement pieces are self-contained complexes, so results computed
    // on the canonical representative are valid for every isomorphic ball.
    let canon = crate::surface::canonical::canonicalize(ball, LabelMode::Anchored);
    let key = (canon.serialize(), caps.max_curve_crossings, caps.max_children_per_node);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let value = Arc::new(ball_replacements(&canon, caps)?);
    cache.lock().unwrap().insert(key, value.clone());
    Ok(value)
}

/// All decomposition replacements for one ball: for each kept system, each
/// island placement and each re-orientation branch, the list of balls that
/// replace it. The flag reports an enumeration cap.
fn ball_replacements(
    ball: &SphereComplex,
    caps: &EngineCaps,
) -> Result<(Vec<Vec<Vec<Arc<SphereComplex>>>>, bool), SurfaceError> {
    let budget = caps.max_children_per_node;
    let mut capped = false;
    let classes = enumerate_curves(ball, caps.max_curve_crossings)?;
    let mut systems: Vec<(CurveSystem, Vec<usize>)> = Vec::new();
    let mut keys: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut frontier: Vec<(CurveSystem, Vec<usize>)> = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        let cs = CurveSystem::single(class.steps.clone(), class.co_side);
        if let Ok(key) = system_key(ball, &cs, true) {
            if keys.insert(key) {
                frontier.push((cs.clone(), vec![i]));
                systems.push((cs, vec![i]));
            }
        }
    }
    while let Some((base, members)) = frontier.pop() {
        if systems.len() > budget {
            capped = true;
            break;
        }
        let total: u32 = base
            .curves
            .iter()
            .map(|c| match c {
                Curve::Crossing { steps, .. } => steps.len() as u32,
                _ => 0,
            })
            .sum();
        for (i, class) in classes.iter().enumerate() {
            if members.contains(&i) {
                continue;
            }
            if let Some(&last) = members.last() {
                if i < last {
                    continue;
                }
            }
            if total + class.steps.len() as u32 > caps.max_curve_crossings {
                continue;
            }
            for merged in insert_curve(ball, &base, class) {
                let Ok(key) = system_key(ball, &merged, true) else { continue };
                if !keys.insert(key) {
                    continue;
                }
                let mut m = members.clone();
                m.push(i);
                systems.push((merged.clone(), m.clone()));
                frontier.push((merged, m));
            }
        }
    }
    let mut replacements = Vec::new();
    for (cs, members) in systems {
        if members.iter().all(|&i| classes[i].pushoff_trivial) {
            continue;
        }
        match check_conditions(ball, &cs) {
            Ok(report) if report.satisfied(2) => {}
            _ => continue,
        }
        let kids = decomposition_children(ball, &cs)?;
        if !kids.is_empty() {
            replacements.push(
                kids.into_iter()
                    .map(|balls| balls.into_iter().map(Arc::new).collect())
                    .collect(),
            );
        }
        if replacements.len() > budget {
            capped = true;
            break;
        }
    }
    Ok((replacements, capped))
}

/// Operation 6. Returns the children plus whether a cap was hit.
pub fn op6_decompose(
    cfg: &StageConfig,
    caps: &EngineCaps,
    parent_key: &[u8],
) -> Result<(Vec<StageConfig>, bool), SurfaceError> {
    for ball in &cfg.balls {
        for disc in ball.live_cells().filter(|&c| ball.cell_tag(c).is_disc()) {
            if ball.disc_index(disc) <= 0 {
                return Ok((Vec::new(), false));
            }
        }
        if !surface_with_sutures_connected(ball) {
            return Ok((Vec::new(), false));
        }
    }
    let mut capped = false;
    let budget = caps.max_children_per_node;
    // Per-ball options: keep the ball, or apply one replacement.
    let mut per_ball: Vec<Vec<Vec<Arc<SphereComplex>>>> = Vec::new();
    for ball in &cfg.balls {
        let arc = ball_replacements_cached(ball.as_ref(), caps)?;
        let (replacements, ball_capped) = (&arc.0, arc.1);
        capped |= ball_capped;
        let mut options: Vec<Vec<Arc<SphereComplex>>> = vec![vec![ball.clone()]];
        for per_system in replacements {
            options.extend(per_system.iter().cloned());
        }
        per_ball.push(options);
    }
    // Cartesian product, minus the untouched combination (index 0 in every
    // slot).
    let mut children = Vec::new();
    let mut idx = vec![0usize; per_ball.len()];
    'outer: loop {
        if idx.iter().any(|&i| i > 0) {
            let mut balls = Vec::new();
            for (bi, &i) in idx.iter().enumerate() {
                balls.extend(per_ball[bi][i].iter().cloned());
            }
            let child = StageConfig {
                balls,
                stage: cfg.stage + 1,
                parent: Some(parent_key.to_vec()),
                op: OpTag::Decomposed,
            };
            // A system whose trace in the attachment surface is boundary
            // parallel leaves the measures unchanged even when the curve
            // itself wanders through the regions; such decompositions are
            // the locally trivial modifications, not state transitions.
            // Emitting exactly the strictly descending children realizes
            // that exclusion in full.
            if super::strictly_descends(cfg, &child) {
                children.push(child);
                if children.len() > budget {
                    capped = true;
                    break 'outer;
                }
            }
        }
        // Advance the multi-index.
        let mut k = 0;
        loop {
            if k == idx.len() {
                break 'outer;
            }
            idx[k] += 1;
            if idx[k] < per_ball[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    if children.len() > budget {
        children.truncate(budget);
    }
    Ok((children, capped))
}

fn surface_with_sutures_connected(ball: &SphereComplex) -> bool {
    let comps = ball.f_components();
    let arcs = ball.suture_arcs();
    if comps.len() + arcs.len() <= 1 {
        return true;
    }
    let n = comps.len() + arcs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let comp_of_cell: BTreeMap<CellId, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.discs.iter().chain(f.bands.iter()).map(move |&c| (c, i)))
        .collect();
    let endpoints = ball.suture_endpoints();
    for (ai, arc) in arcs.iter().enumerate() {
        if arc.closed {
            continue;
        }
        let first = arc.darts[0];
        let last = ball.map().alpha(*arc.darts.last().unwrap());
        for d in [first, last] {
            if let Some(&(_, f)) = endpoints
                .iter()
                .find(|&&(v, _)| ball.map().vertex_darts(v).contains(&d))
            {
                let (a, b) = (comps.len() + ai, comp_of_cell[&f]);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let roots: BTreeSet<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    roots.len() <= 1
}

// ---------------------------------------------------------------------------
// Operation 7: amalgam push-offs
// ---------------------------------------------------------------------------

/// Children from one amalgam disc: one push-off with each orientation
/// (keeping only strictly descending results, which drops the trivial final
/// case), and the two-copy split with caps oriented against the flanks.
pub fn amalgam_children(
    cfg: &StageConfig,
    ball_idx: usize,
    ball: &SphereComplex,
    amalgam: &super::AmalgamDisc,
    parent_key: &[u8],
) -> Vec<StageConfig> {
    let mut out = Vec::new();
    let Some(single) = pushoff_steps(ball, amalgam, 0, 1) else {
        return out;
    };
    for co in [CoSide::Left, CoSide::Right] {
        let cs = CurveSystem::single(single.clone(), co);
        if let Some(child) = split_to_child(cfg, ball_idx, ball, &cs, parent_key) {
            if super::strictly_descends(cfg, &child) {
                out.push(child);
            }
        }
    }
    if let Some(cs) = double_pushoff(ball, amalgam) {
        if let Some(child) = split_to_child(cfg, ball_idx, ball, &cs, parent_key) {
            if super::strictly_descends(cfg, &child) {
                out.push(child);
            }
        }
    }
    out
}

fn split_to_child(
    cfg: &StageConfig,
    ball_idx: usize,
    ball: &SphereComplex,
    cs: &CurveSystem,
    parent_key: &[u8],
) -> Option<StageConfig> {
    let outcome = split_along(ball, cs).ok()?;
    let pieces: Vec<Arc<SphereComplex>> =
        outcome.pieces.iter().map(|p| Arc::new(p.sc.clone())).collect();
    let balls = super::replace_ball(cfg, ball_idx, pieces);
    Some(StageConfig {
        balls,
        stage: cfg.stage + 1,
        parent: Some(parent_key.to_vec()),
        op: OpTag::AmalgamPushoff,
    })
}

/// One push-off of the amalgam boundary: around each chain end it crosses
/// the outer disc through the free edges flanking the end attach edge.
/// `copy` 0 hugs the chain; ranks are laid out for `total` parallel copies.
fn pushoff_steps(
    ball: &SphereComplex,
    amalgam: &super::AmalgamDisc,
    copy: u32,
    total: u32,
) -> Option<Vec<Step>> {
    let mut ends = Vec::new();
    for &end in amalgam.end_attach.iter() {
        let disc_dart = ball.map().alpha(end);
        let walk = ball.map().face_darts(disc_dart);
        let at = walk.iter().position(|&d| d == disc_dart).unwrap();
        let n = walk.len();
        let before = walk[(at + n - 1) % n];
        let after = walk[(at + 1) % n];
        if !ball.kind(before).is_disc_boundary() || !ball.kind(after).is_disc_boundary() {
            return None;
        }
        ends.push((before, after, disc_dart));
    }
    // The curve: cross into the first disc through one flank, out the other,
    // along the chain's far side, around the second end, and back. Which
    // flank pairs with which is settled by trying the two matchings.
    for swap in [false, true] {
        let mut steps = Vec::new();
        for (i, &(before, after, disc_dart)) in ends.iter().enumerate() {
            let (fin, fout) = if i == 1 && swap { (after, before) } else { (before, after) };
            let enter = ball.map().alpha(fin);
            let exit = fout;
            steps.push(Step {
                dart: enter,
                rank: rank_near_corner(ball, fin, disc_dart, copy, total),
            });
            steps.push(Step {
                dart: exit,
                rank: rank_near_corner(ball, fout, disc_dart, copy, total),
            });
        }
        let cs = CurveSystem::single(steps.clone(), CoSide::Left);
        if total == 1 {
            if build_overlay(ball, &cs).is_ok() {
                return Some(steps);
            }
        } else {
            // For multi-copy layouts validity is checked after merging.
            return Some(steps);
        }
    }
    None
}

/// Rank of a crossing on `flank` near its corner with the attach edge across
/// `disc_dart`, when `total` parallel copies cross it and this is `copy`
/// (0 = innermost).
fn rank_near_corner(ball: &SphereComplex, flank: Dart, disc_dart: Dart, copy: u32, total: u32) -> u32 {
    let rep = flank.min(ball.map().alpha(flank));
    let corner_at_head = ball.map().next_in_face(flank) == disc_dart
        || ball.map().next_in_face(ball.map().alpha(flank)) == disc_dart && flank == rep;
    // More robust: the corner vertex is shared with the attach edge; decide
    // by walking the disc: if flank immediately precedes disc_dart the
    // corner sits at flank's head, else at its origin.
    let precedes = ball.map().next_in_face(flank) == disc_dart;
    let _ = corner_at_head;
    let corner_at_rep_org = if flank == rep { !precedes } else { precedes };
    if corner_at_rep_org {
        copy
    } else {
        total - 1 - copy
    }
}

/// The two-copy system with transverse orientations chosen so the middle
/// piece's caps disagree with the flank orientation.
fn double_pushoff(ball: &SphereComplex, amalgam: &super::AmalgamDisc) -> Option<CurveSystem> {
    let inner = pushoff_steps(ball, amalgam, 0, 2)?;
    let outer = pushoff_steps(ball, amalgam, 1, 2)?;
    let trial = CurveSystem {
        curves: vec![
            Curve::Crossing { steps: inner.clone(), co_side: CoSide::Left },
            Curve::Crossing { steps: outer.clone(), co_side: CoSide::Left },
        ],
        island_anchors: Vec::new(),
    };
    let overlay = build_overlay(ball, &trial).ok()?;
    let end_edge = amalgam.end_attach[0].min(ball.map().alpha(amalgam.end_attach[0]));
    let chain_side_left = |ci: usize| -> bool {
        let d1 = overlay.seg_dart[ci][0];
        overlay.sc.map().face_darts(d1).iter().any(|&d| {
            overlay.orig_edge[d] == Some(end_edge)
                || overlay.chord_of[d].is_some_and(|(c, _)| c != ci)
                    && ci == 1
        })
    };
    let want_toward_chain = amalgam.flank_orient == Orient::Out;
    let co = |toward_left: bool| if toward_left == want_toward_chain { CoSide::Left } else { CoSide::Right };
    let co_inner = co(chain_side_left(0));
    let co_outer = co(chain_side_left(1));
    Some(CurveSystem {
        curves: vec![
            Curve::Crossing { steps: inner, co_side: co_inner },
            Curve::Crossing { steps: outer, co_side: co_outer },
        ],
        island_anchors: Vec::new(),
    })
}
