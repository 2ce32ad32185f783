//! Curve systems on a sphere complex: crossing sequences, the refined
//! overlay, standard position and the five curve conditions.
//!
//! A curve is a closed transversal: it crosses edges of the complex at
//! interior points and runs through cells between consecutive crossings.
//! Within a band it must run from one end to the other (vertical); through
//! regions it travels as boundary arcs of the decomposing surface and may
//! cross sutures. Crossing order along an edge is explicit (`rank`), so a
//! system is an exact embedded picture, not just a homotopy class.

use super::map::Dart;
use super::{CellId, CellTag, EdgeKind, Orient, SphereComplex, SurfaceError};
use std::collections::{BTreeMap, BTreeSet};

/// Which side of the direction of travel the transverse orientation points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoSide {
    Left,
    Right,
}

impl CoSide {
    pub fn flip(self) -> CoSide {
        match self {
            CoSide::Left => CoSide::Right,
            CoSide::Right => CoSide::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    /// The curve crosses this dart's edge, moving from the cell on its left
    /// into the cell on its right.
    pub dart: Dart,
    /// Position among all system crossings of the edge, counted from the
    /// origin of the edge's lower-numbered dart.
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Curve {
    /// A closed transversal with at least one edge crossing.
    Crossing { steps: Vec<Step>, co_side: CoSide },
    /// A circle inside one cell, crossing nothing. `face_anchor` names the
    /// face it sits in (None only on the empty sphere); `enclosed` lists one
    /// dart per graph component it encircles; the transverse orientation
    /// points into the enclosed side iff `normal_into_enclosed`.
    Simple {
        cell: CellId,
        face_anchor: Option<Dart>,
        enclosed: Vec<Dart>,
        normal_into_enclosed: bool,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CurveSystem {
    pub curves: Vec<Curve>,
    /// Placement for graph components that sit inside a crossed region but
    /// are not touched by any curve: (island dart, anchor dart). The island
    /// lands in the same split piece as the face left of the anchor dart.
    pub island_anchors: Vec<(Dart, Dart)>,
}

impl CurveSystem {
    pub fn empty() -> Self {
        CurveSystem::default()
    }

    pub fn single(steps: Vec<Step>, co_side: CoSide) -> Self {
        CurveSystem { curves: vec![Curve::Crossing { steps, co_side }], island_anchors: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Overlay
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Overlay {
    /// Refined scratch complex: crossed edges subdivided, chords inserted.
    /// Subdivided faces keep their parent cell id; chord edges carry the
    /// crossed cell on both sides. Not `well_formed` in general.
    pub sc: SphereComplex,
    /// Per refined dart: the parent edge representative it descends from.
    pub orig_edge: Vec<Option<Dart>>,
    /// Per refined dart: Some((curve, segment)) for chord darts.
    pub chord_of: Vec<Option<(usize, usize)>>,
    /// Per curve, per step: the run dart at the crossing vertex pointing back
    /// toward the origin of the parent edge representative.
    pub cross_back: Vec<Vec<Dart>>,
    /// Per curve, per step: the run dart pointing toward the head.
    pub cross_fwd: Vec<Vec<Dart>>,
    /// Per curve, per segment i: the chord dart from step i's vertex.
    pub seg_dart: Vec<Vec<Dart>>,
    /// Cells with at least one chord through them.
    pub crossed_cells: BTreeSet<CellId>,
}

fn steps_of(curve: &Curve) -> &[Step] {
    match curve {
        Curve::Crossing { steps, .. } => steps,
        Curve::Simple { .. } => &[],
    }
}

pub fn co_side_of(curve: &Curve) -> CoSide {
    match curve {
        Curve::Crossing { co_side, .. } => *co_side,
        Curve::Simple { normal_into_enclosed, .. } => {
            if *normal_into_enclosed {
                CoSide::Left
            } else {
                CoSide::Right
            }
        }
    }
}

/// Validates step data and builds the refined overlay. Simple curves do not
/// appear in the overlay; the split handles them separately.
pub fn build_overlay(sc: &SphereComplex, cs: &CurveSystem) -> Result<Overlay, SurfaceError> {
    let mut work = sc.clone();
    let mut orig_edge: Vec<Option<Dart>> = vec![None; work.map().dart_limit()];
    for d in work.map().darts() {
        orig_edge[d] = Some(d.min(work.map().alpha(d)));
    }

    let mut per_edge: BTreeMap<Dart, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, curve) in cs.curves.iter().enumerate() {
        let steps = steps_of(curve);
        if matches!(curve, Curve::Crossing { .. }) && steps.is_empty() {
            return Err(SurfaceError::BadCurve(format!("curve {ci} has no steps")));
        }
        for (si, st) in steps.iter().enumerate() {
            if !sc.map().is_alive(st.dart) {
                return Err(SurfaceError::BadCurve(format!("curve {ci} step {si}: dead dart")));
            }
            let rep = st.dart.min(sc.map().alpha(st.dart));
            per_edge.entry(rep).or_default().push((ci, si));
        }
        let n = steps.len();
        for i in 0..n {
            let from = sc.other_cell(steps[i].dart);
            let to = sc.cell_of(steps[(i + 1) % n].dart);
            if from != to {
                return Err(SurfaceError::BadCurve(format!(
                    "curve {ci} segment {i}: cells {from} and {to} differ"
                )));
            }
        }
    }
    for (rep, xs) in &per_edge {
        let mut ranks: Vec<u32> = xs
            .iter()
            .map(|&(ci, si)| steps_of(&cs.curves[ci])[si].rank)
            .collect();
        ranks.sort_unstable();
        if ranks.iter().enumerate().any(|(i, &r)| r != i as u32) {
            return Err(SurfaceError::BadCurve(format!("edge {rep}: ranks not 0..m-1")));
        }
    }

    // Subdivide crossed edges. For edge rep r with m crossings, crossing
    // vertices appear along r's direction; vertex at rank k stores the dart
    // pointing back toward org(r) and the dart pointing toward the head.
    let mut cross_back: Vec<Vec<Dart>> =
        cs.curves.iter().map(|c| vec![usize::MAX; steps_of(c).len()]).collect();
    let mut cross_fwd: Vec<Vec<Dart>> =
        cs.curves.iter().map(|c| vec![usize::MAX; steps_of(c).len()]).collect();
    for (&rep, xs) in &per_edge {
        let m = xs.len();
        let mut tail = rep;
        let mut backs = Vec::with_capacity(m);
        let mut fwds = Vec::with_capacity(m);
        for _ in 0..m {
            let (p, q) = subdivide_edge(&mut work, &mut orig_edge, tail);
            backs.push(p);
            fwds.push(q);
            tail = q;
        }
        for &(ci, si) in xs {
            let rank = steps_of(&cs.curves[ci])[si].rank as usize;
            cross_back[ci][si] = backs[rank];
            cross_fwd[ci][si] = fwds[rank];
        }
    }

    // Insert chords. The chord out of step i lives in the cell right of the
    // step dart; its splice corner is the run dart whose left sector lies on
    // that side. With the subdivision above: left(back) is the right side of
    // the parent rep, left(fwd) its left side.
    let mut chord_of: Vec<Option<(usize, usize)>> = vec![None; work.map().dart_limit()];
    let mut seg_dart: Vec<Vec<Dart>> =
        cs.curves.iter().map(|c| vec![usize::MAX; steps_of(c).len()]).collect();
    let mut crossed_cells: BTreeSet<CellId> = BTreeSet::new();
    for (ci, curve) in cs.curves.iter().enumerate() {
        let steps = steps_of(curve);
        let n = steps.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let cell = sc.other_cell(steps[i].dart);
            crossed_cells.insert(cell);
            let from = splice_corner(sc, &cross_back[ci], &cross_fwd[ci], steps, i, true);
            let to = splice_corner(sc, &cross_back[ci], &cross_fwd[ci], steps, j, false);
            // The sector after a dart belongs to the face of its alpha
            // partner; the chord needs both target sectors on one face (or
            // on two faces of the same cell in different components, which
            // connects a nested island).
            let (af, at) = (work.map().alpha(from), work.map().alpha(to));
            if !same_face(&work, af, at) {
                let (_, comp) = work.map().components();
                if comp[af] == comp[at] || work.cell_of(af) != work.cell_of(at) {
                    return Err(SurfaceError::UnrealizableSplit(format!(
                        "curve {ci} segment {i} is not embeddable in cell {cell}"
                    )));
                }
            }
            let (d1, d2) = work.new_edge(EdgeKind::Plain, cell, cell);
            grow(&mut orig_edge, work.map().dart_limit());
            grow(&mut chord_of, work.map().dart_limit());
            chord_of[d1] = Some((ci, i));
            chord_of[d2] = Some((ci, i));
            work.map_mut().splice_after(from, d1);
            work.map_mut().splice_after(to, d2);
            seg_dart[ci][i] = d1;
        }
    }
    work.map()
        .check()
        .map_err(SurfaceError::UnrealizableSplit)?;

    // Island anchors must reference crossed region cells.
    for &(island, anchor) in &cs.island_anchors {
        if !sc.map().is_alive(island) || !sc.map().is_alive(anchor) {
            return Err(SurfaceError::BadCurve("island anchor references dead dart".into()));
        }
        let r = sc.cell_of(anchor);
        if !sc.cell_tag(r).is_region() {
            return Err(SurfaceError::BadCurve("island anchor not in a region".into()));
        }
    }

    Ok(Overlay { sc: work, orig_edge, chord_of, cross_back, cross_fwd, seg_dart, crossed_cells })
}

fn grow<T: Clone + Default>(v: &mut Vec<T>, n: usize) {
    if v.len() < n {
        v.resize(n, T::default());
    }
}

/// Subdivides the edge of `tail` (pointing toward the chain head). Returns
/// (p, q): p points from the new vertex back toward tail's origin, q toward
/// the head.
fn subdivide_edge(
    work: &mut SphereComplex,
    orig_edge: &mut Vec<Option<Dart>>,
    tail: Dart,
) -> (Dart, Dart) {
    let a = work.map().alpha(tail);
    let kind = work.kind(tail);
    let (cell_tail, cell_a) = (work.cell_of(tail), work.cell_of(a));
    let src = orig_edge[tail];
    let (p, q) = work.new_edge(kind, cell_a, cell_tail);
    grow(orig_edge, work.map().dart_limit());
    orig_edge[p] = src;
    orig_edge[q] = src;
    work.map_mut().rewire_alpha(tail, p);
    work.map_mut().rewire_alpha(q, a);
    work.map_mut().splice_after(p, q);
    (p, q)
}

/// The dart after which a chord endpoint splices at step `i`'s crossing
/// vertex. `outgoing` chords leave into the cell right of the step dart;
/// incoming chords arrive in the cell left of it.
fn splice_corner(
    parent: &SphereComplex,
    backs: &[Dart],
    fwds: &[Dart],
    steps: &[Step],
    i: usize,
    outgoing: bool,
) -> Dart {
    let d = steps[i].dart;
    let rep = d.min(parent.map().alpha(d));
    let is_rep = d == rep;
    // Under the face-walk convention next = sigma∘alpha, the sector between
    // dart x and sigma(x) belongs to the face of alpha(x): splicing after
    // `back` lands in the rep's left side, after `fwd` in its right side.
    // Outgoing target = right(d): right(rep) if d is rep, else left(rep).
    let use_back = if outgoing { !is_rep } else { is_rep };
    if use_back {
        backs[i]
    } else {
        fwds[i]
    }
}

fn same_face(work: &SphereComplex, a: Dart, b: Dart) -> bool {
    if a == b {
        return true;
    }
    let mut x = work.map().next_in_face(a);
    while x != a {
        if x == b {
            return true;
        }
        x = work.map().next_in_face(x);
    }
    false
}

// ---------------------------------------------------------------------------
// Standard position
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardViolation {
    /// A curve closed inside a single 0-handle of the attachment surface.
    InsideZeroHandle { curve: usize },
    /// The curve enters a region pressed against a 3-handle.
    MeetsThreeHandleRegion { curve: usize, segment: usize },
    /// A band passage that is not a vertical end-to-end arc.
    NotVertical { curve: usize, step: usize },
}

pub fn check_standard_position(
    sc: &SphereComplex,
    cs: &CurveSystem,
) -> Result<Vec<StandardViolation>, SurfaceError> {
    // Validate structure first (cheap parts of the overlay contract).
    build_overlay(sc, cs)?;
    let mut out = Vec::new();
    for (ci, curve) in cs.curves.iter().enumerate() {
        match curve {
            Curve::Simple { cell, .. } => {
                match sc.cell_tag(*cell) {
                    CellTag::Disc { .. } => out.push(StandardViolation::InsideZeroHandle { curve: ci }),
                    CellTag::Region { h3: true, .. } => {
                        out.push(StandardViolation::MeetsThreeHandleRegion { curve: ci, segment: 0 })
                    }
                    _ => {}
                }
            }
            Curve::Crossing { steps, .. } => {
                let n = steps.len();
                for i in 0..n {
                    let st = steps[i];
                    if sc.kind(st.dart) == EdgeKind::BandSide {
                        out.push(StandardViolation::NotVertical { curve: ci, step: i });
                        continue;
                    }
                    let cell = sc.other_cell(st.dart);
                    match sc.cell_tag(cell) {
                        CellTag::Region { h3: true, .. } => {
                            out.push(StandardViolation::MeetsThreeHandleRegion { curve: ci, segment: i })
                        }
                        CellTag::Band => {
                            // Vertical means exiting through the other end.
                            let nx = steps[(i + 1) % n];
                            let same_edge = nx.dart.min(sc.map().alpha(nx.dart))
                                == st.dart.min(sc.map().alpha(st.dart));
                            if sc.kind(nx.dart) != EdgeKind::Attach || same_edge {
                                out.push(StandardViolation::NotVertical { curve: ci, step: i });
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tubing arcs and the five conditions
// ---------------------------------------------------------------------------

/// A tubing arc: a sub-arc of a disc's free boundary joining two system
/// crossings whose transverse orientations transport coherently along it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubingArc {
    pub disc: CellId,
    /// The two crossings, as (curve, step).
    pub ends: [(usize, usize); 2],
}

/// The free-boundary runs of a disc: maximal walks of disc|region edges
/// between attach corners, as parent darts with the disc on the left.
/// Cyclic runs (valence-zero discs) are returned with `cyclic = true`.
struct BoundaryRun {
    darts: Vec<Dart>,
    cyclic: bool,
}

fn boundary_runs(sc: &SphereComplex, disc: CellId) -> Vec<BoundaryRun> {
    let rep = sc
        .map()
        .darts()
        .find(|&d| sc.cell_of(d) == disc)
        .expect("disc has darts");
    let walk = sc.map().face_darts(rep);
    let is_free = |d: Dart| sc.kind(d).is_disc_boundary();
    if walk.iter().all(|&d| is_free(d)) {
        return vec![BoundaryRun { darts: walk, cyclic: true }];
    }
    // Rotate so the walk starts right after an attach edge.
    let start = walk.iter().position(|&d| !is_free(d)).unwrap();
    let n = walk.len();
    let mut runs = Vec::new();
    let mut cur: Vec<Dart> = Vec::new();
    for k in 0..n {
        let d = walk[(start + 1 + k) % n];
        if is_free(d) {
            cur.push(d);
        } else if !cur.is_empty() {
            runs.push(BoundaryRun { darts: std::mem::take(&mut cur), cyclic: false });
        }
    }
    if !cur.is_empty() {
        runs.push(BoundaryRun { darts: cur, cyclic: false });
    }
    runs
}

/// Crossings on a boundary run, in walk order: (curve, step, sign) where the
/// sign says whether the transverse orientation points along the walk
/// direction (+) or against it (-).
fn run_crossings(sc: &SphereComplex, cs: &CurveSystem, run: &BoundaryRun) -> Vec<(usize, usize, i8)> {
    let mut out = Vec::new();
    for &d_run in &run.darts {
        let rep = d_run.min(sc.map().alpha(d_run));
        let mut here: Vec<(u32, usize, usize)> = Vec::new();
        for (ci, curve) in cs.curves.iter().enumerate() {
            for (si, st) in steps_of(curve).iter().enumerate() {
                if st.dart.min(sc.map().alpha(st.dart)) == rep {
                    here.push((st.rank, ci, si));
                }
            }
        }
        // Ranks count along the rep direction; the run may traverse the edge
        // either way.
        here.sort_unstable();
        if d_run != rep {
            here.reverse();
        }
        for (_, ci, si) in here {
            let st = steps_of(&cs.curves[ci])[si];
            let into_disc = st.dart != d_run; // crossing toward the disc side
            let left = co_side_of(&cs.curves[ci]) == CoSide::Left;
            // Derived sign table: (into, Left) -, (into, Right) +,
            // (out, Left) +, (out, Right) -.
            let sign = match (into_disc, left) {
                (true, true) | (false, false) => -1,
                _ => 1,
            };
            out.push((ci, si, sign));
        }
    }
    out
}

/// Whether any suture endpoint vertex lies strictly between two consecutive
/// crossings on the run. Suture endpoints sit at parent vertices between the
/// run's edges; crossings at parent-edge interiors never collide with them.
fn run_gap_has_suture(
    sc: &SphereComplex,
    run: &BoundaryRun,
    pos_a: usize,
    pos_b: usize,
    crossing_edges: &[usize],
) -> bool {
    // Positions index the flattened crossing list; map them to edge indices
    // within the run, then check all parent vertices strictly between.
    let (ea, eb) = (crossing_edges[pos_a], crossing_edges[pos_b]);
    let suture_at_head = |d: Dart| -> bool {
        let head = sc.map().alpha(d);
        sc.map()
            .vertex_darts(head)
            .iter()
            .any(|&x| sc.kind(x) == EdgeKind::Plain)
    };
    if ea == eb {
        return false;
    }
    let mut e = ea;
    loop {
        if suture_at_head(run.darts[e]) {
            return true;
        }
        e = (e + 1) % run.darts.len();
        if e == eb {
            return false;
        }
    }
}

pub fn find_tubing_arcs(sc: &SphereComplex, cs: &CurveSystem) -> Result<Vec<TubingArc>, SurfaceError> {
    build_overlay(sc, cs)?;
    let mut out = Vec::new();
    for disc in sc.live_cells() {
        if !sc.cell_tag(disc).is_disc() {
            continue;
        }
        for run in boundary_runs(sc, disc) {
            let crossings = run_crossings(sc, cs, &run);
            if crossings.len() < 2 {
                continue;
            }
            // Edge index within the run per crossing, for suture gap checks.
            let mut edge_idx = Vec::new();
            for (e, &d_run) in run.darts.iter().enumerate() {
                let rep = d_run.min(sc.map().alpha(d_run));
                let mut cnt = crossings_on_edge(sc, cs, rep);
                if d_run != rep {
                    cnt.reverse();
                }
                for _ in cnt {
                    edge_idx.push(e);
                }
            }
            debug_assert_eq!(edge_idx.len(), crossings.len());
            let m = crossings.len();
            let pairs: Vec<(usize, usize)> = if run.cyclic {
                (0..m).map(|i| (i, (i + 1) % m)).collect()
            } else {
                (0..m - 1).map(|i| (i, i + 1)).collect()
            };
            for (i, j) in pairs {
                if run.cyclic && m == 1 {
                    continue;
                }
                if run_gap_has_suture(sc, &run, i, j, &edge_idx) {
                    continue;
                }
                let (ca, sa, sign_a) = crossings[i];
                let (cb, sb, sign_b) = crossings[j];
                // Tubing needs the two transverse orientations anti-aligned
                // along the arc (both into the corridor or both out), which
                // is exactly when the crossing signs differ.
                if sign_a != sign_b {
                    out.push(TubingArc { disc, ends: [(ca, sa), (cb, sb)] });
                }
            }
        }
    }
    Ok(out)
}

fn crossings_on_edge(sc: &SphereComplex, cs: &CurveSystem, rep: Dart) -> Vec<(usize, usize)> {
    let mut here: Vec<(u32, usize, usize)> = Vec::new();
    for (ci, curve) in cs.curves.iter().enumerate() {
        for (si, st) in steps_of(curve).iter().enumerate() {
            if st.dart.min(sc.map().alpha(st.dart)) == rep {
                here.push((st.rank, ci, si));
            }
        }
    }
    here.sort_unstable();
    here.into_iter().map(|(_, c, s)| (c, s)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConditionViolation {
    /// Condition 1: a curve meets a band in more than one arc.
    BandTwice { curve: usize, band: CellId },
    /// Condition 2: a tubing arc exists.
    Tubing(TubingArc),
    /// Condition 3: a corner disc fails all three alternatives.
    CornerDisc { curve: usize, segment: usize },
    /// Condition 4: a curve meets a region in more than one arc, or closes
    /// inside one.
    RegionTwice { curve: usize, region: CellId },
    /// Condition 5: a disc-crossing arc with a parallel strip that neither
    /// touches a band end nor collects more than two suture hits.
    ParallelStrip { curve: usize, segment: usize },
}

impl ConditionViolation {
    pub fn condition(&self) -> u8 {
        match self {
            ConditionViolation::BandTwice { .. } => 1,
            ConditionViolation::Tubing(_) => 2,
            ConditionViolation::CornerDisc { .. } => 3,
            ConditionViolation::RegionTwice { .. } => 4,
            ConditionViolation::ParallelStrip { .. } => 5,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
}

impl ConditionReport {
    pub fn satisfied(&self, condition: u8) -> bool {
        self.violations.iter().all(|v| v.condition() != condition)
    }

    pub fn all_satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates Conditions 1-5 for the system.
pub fn check_conditions(sc: &SphereComplex, cs: &CurveSystem) -> Result<ConditionReport, SurfaceError> {
    let overlay = build_overlay(sc, cs)?;
    let mut report = ConditionReport::default();

    // Conditions 1 and 4: passage counts per curve.
    for (ci, curve) in cs.curves.iter().enumerate() {
        if let Curve::Simple { cell, .. } = curve {
            if sc.cell_tag(*cell).is_region() {
                report
                    .violations
                    .push(ConditionViolation::RegionTwice { curve: ci, region: *cell });
            }
            continue;
        }
        let steps = steps_of(curve);
        let n = steps.len();
        let mut band_count: BTreeMap<CellId, usize> = BTreeMap::new();
        let mut region_count: BTreeMap<CellId, usize> = BTreeMap::new();
        for i in 0..n {
            let cell = sc.other_cell(steps[i].dart);
            match sc.cell_tag(cell) {
                CellTag::Band => *band_count.entry(cell).or_insert(0) += 1,
                CellTag::Region { .. } => *region_count.entry(cell).or_insert(0) += 1,
                CellTag::Disc { .. } => {}
            }
        }
        for (band, k) in band_count {
            if k > 1 {
                report.violations.push(ConditionViolation::BandTwice { curve: ci, band });
            }
        }
        for (region, k) in region_count {
            if k > 1 {
                report
                    .violations
                    .push(ConditionViolation::RegionTwice { curve: ci, region });
            }
        }
    }

    // Condition 2.
    for arc in find_tubing_arcs(sc, cs)? {
        report.violations.push(ConditionViolation::Tubing(arc));
    }

    // Conditions 3 and 5: per disc-crossing segment, analyze its two sides.
    for (ci, curve) in cs.curves.iter().enumerate() {
        let steps = steps_of(curve);
        let n = steps.len();
        for i in 0..n {
            let cell = sc.other_cell(steps[i].dart);
            if !sc.cell_tag(cell).is_disc() {
                continue;
            }
            let j = (i + 1) % n;
            let enter_kind = sc.kind(steps[i].dart);
            let exit_kind = sc.kind(steps[j].dart);
            let enter_region = enter_kind.is_disc_boundary();
            let exit_region = exit_kind.is_disc_boundary();
            if enter_region && exit_region {
                if let Some(v) = condition5_violation(sc, cs, &overlay, ci, i) {
                    report.violations.push(v);
                }
            } else if enter_region != exit_region {
                if let Some(v) = condition3_violation(sc, cs, &overlay, ci, i) {
                    report.violations.push(v);
                }
            }
        }
    }

    Ok(report)
}

/// Side analysis of a chord: the refined walk of one side, minus the chord
/// dart itself.
struct SideWalk {
    /// Other chords encountered on this side (non-clean).
    other_chords: usize,
    /// Distinct parent attach edges touched.
    attach_edges: BTreeSet<Dart>,
    /// Parent suture-endpoint vertices strictly inside the walk.
    old_gamma: usize,
}

fn side_walk(sc: &SphereComplex, overlay: &Overlay, chord_dart: Dart) -> SideWalk {
    let walk = overlay.sc.map().face_darts(chord_dart);
    let mut beta: Vec<Dart> = Vec::new();
    let mut other_chords = 0;
    let mut attach_edges = BTreeSet::new();
    for &d in walk.iter().skip(1) {
        if overlay.chord_of[d].is_some() {
            other_chords += 1;
            continue;
        }
        if let Some(rep) = overlay.orig_edge[d] {
            if sc.kind(rep) == EdgeKind::Attach {
                attach_edges.insert(rep);
            }
        }
        beta.push(d);
    }
    // Suture endpoints strictly inside: heads of beta darts except the last
    // (whose head is the chord's start vertex).
    let mut old_gamma = 0;
    for (k, &d) in beta.iter().enumerate() {
        if k + 1 == beta.len() {
            break;
        }
        let head = overlay.sc.map().alpha(d);
        let plain = overlay
            .sc
            .map()
            .vertex_darts(head)
            .into_iter()
            .filter(|&x| overlay.sc.kind(x) == EdgeKind::Plain && overlay.chord_of[x].is_none())
            .count();
        if plain == 1 {
            old_gamma += 1;
        }
    }
    let _ = beta;
    SideWalk { other_chords, attach_edges, old_gamma }
}

/// Whether the transverse orientation of curve `ci` points into the side
/// whose walk starts with `chord_dart`.
fn normal_into_side(cs: &CurveSystem, overlay: &Overlay, ci: usize, seg: usize, chord_dart: Dart) -> bool {
    let travel = overlay.seg_dart[ci][seg];
    let left_of_travel = chord_dart == travel;
    match co_side_of(&cs.curves[ci]) {
        CoSide::Left => left_of_travel,
        CoSide::Right => !left_of_travel,
    }
}

/// The deposit rule at a region-side crossing corner: splitting leaves a new
/// suture endpoint on the flank of the piece whose cap orientation differs
/// from the region's.
fn end_deposit(sc: &SphereComplex, cs: &CurveSystem, overlay: &Overlay, ci: usize, seg: usize, step: usize, chord_dart: Dart) -> bool {
    let st = steps_of(&cs.curves[ci])[step];
    let region = if sc.cell_tag(sc.cell_of(st.dart)).is_region() {
        sc.cell_of(st.dart)
    } else {
        sc.other_cell(st.dart)
    };
    let Some(orient) = sc.cell_tag(region).orient() else {
        return false;
    };
    // Cap orientation on this side: In on the positive (normal) side.
    let cap = if normal_into_side(cs, overlay, ci, seg, chord_dart) {
        Orient::In
    } else {
        Orient::Out
    };
    cap != orient
}

fn condition3_violation(
    sc: &SphereComplex,
    cs: &CurveSystem,
    overlay: &Overlay,
    ci: usize,
    seg: usize,
) -> Option<ConditionViolation> {
    let d1 = overlay.seg_dart[ci][seg];
    let d2 = overlay.sc.map().alpha(d1);
    for chord_dart in [d1, d2] {
        let side = side_walk(sc, overlay, chord_dart);
        if side.other_chords > 0 {
            continue; // the corner disc must meet the system in α alone
        }
        let bullet1 = side.attach_edges.len() >= 2;
        let agree = normal_into_side(cs, overlay, ci, seg, chord_dart);
        let gamma = side.old_gamma;
        let bullet2 = gamma >= 1 && !agree;
        let bullet3 = gamma >= 2 && agree;
        if !(bullet1 || bullet2 || bullet3) {
            return Some(ConditionViolation::CornerDisc { curve: ci, segment: seg });
        }
    }
    None
}

fn condition5_violation(
    sc: &SphereComplex,
    cs: &CurveSystem,
    overlay: &Overlay,
    ci: usize,
    seg: usize,
) -> Option<ConditionViolation> {
    let steps = steps_of(&cs.curves[ci]);
    let n = steps.len();
    let j = (seg + 1) % n;
    let d1 = overlay.seg_dart[ci][seg];
    let d2 = overlay.sc.map().alpha(d1);
    for chord_dart in [d1, d2] {
        let side = side_walk(sc, overlay, chord_dart);
        if !side.attach_edges.is_empty() {
            continue; // touches a band end
        }
        // Post-split suture hits along this side: surviving old endpoints,
        // one per interior crossing, plus the two end-corner deposits.
        let mut hits = side.old_gamma + side.other_chords;
        if end_deposit(sc, cs, overlay, ci, seg, seg, chord_dart) {
            hits += 1;
        }
        if end_deposit(sc, cs, overlay, ci, seg, j, chord_dart) {
            hits += 1;
        }
        if hits <= 2 {
            return Some(ConditionViolation::ParallelStrip { curve: ci, segment: seg });
        }
    }
    None
}
