//! Tiling a triangulation with catalog graphs and certifying candidates.
//!
//! Every tetrahedron receives one catalog record; across each internal face
//! the two records' disc patterns, tau slots and gamma slots must correspond
//! under the gluing's vertex map. A complete assignment joins the tiles into
//! a handle structure M' = N(G) ∪ 2-handles; candidates are kept when the
//! tangle closes into a single curve, H1(M') ≅ Z and ∂M' is a torus, and are
//! reported with their slope data and the unperformed external checks.

pub mod boundary;

use crate::engine::catalog::{Catalog, GraphEntry};
use crate::engine::extract::{CatalogGraph, SlotMark};
use crate::engine::hex;
use crate::homology::{
    boundary_basis, h1_group, h1_presentation, slope_distance, BasisId, GraphPresentation,
    HomologyError, TorusSlope, Word,
};
use crate::triangulation::{FaceGluing, GeneralisedTriangulation};
use num_bigint::BigInt;
use num_traits::Signed;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("homology error: {0}")]
    Homology(#[from] HomologyError),
    #[error("assembly error: {0}")]
    Other(String),
}

/// How one face of a tile matches the neighbor: leg bijection plus, per leg
/// pair, the aligned positions of tau and gamma slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceMatch {
    /// (leg index in tile a, leg index in tile b).
    pub leg_pairs: Vec<(usize, usize)>,
    /// Per leg pair: aligned (pos_a, pos_b) for every tau/gamma mark.
    pub slot_pairs: Vec<Vec<(usize, usize)>>,
}

/// All ways the records' signatures at the glued faces correspond under the
/// vertex map. Words align reversed (gluings are orientation-reversing) with
/// corners mapped through the gluing.
pub fn face_matchings(a: &CatalogGraph, fa: u8, b: &CatalogGraph, fb: u8, gl: &FaceGluing) -> Vec<FaceMatch> {
    let legs_a = a.legs_at(fa);
    let legs_b = b.legs_at(fb);
    if legs_a.len() != legs_b.len() {
        return Vec::new();
    }
    if legs_a.is_empty() {
        return vec![FaceMatch { leg_pairs: Vec::new(), slot_pairs: Vec::new() }];
    }
    // Pairwise word alignments.
    let mut aligns: BTreeMap<(usize, usize), Vec<Vec<(usize, usize)>>> = BTreeMap::new();
    for &la in &legs_a {
        for &lb in &legs_b {
            let ws = word_alignments(&a.legs[la].word, &b.legs[lb].word, gl);
            if !ws.is_empty() {
                aligns.insert((la, lb), ws);
            }
        }
    }
    // Enumerate bijections consistent with per-pair alignments; cut structure
    // must correspond under one bijection of cut ids.
    let mut out = Vec::new();
    let mut used_b: BTreeSet<usize> = BTreeSet::new();
    let mut current: Vec<(usize, usize, usize)> = Vec::new(); // (la, lb, align index)
    enumerate_bijections(a, b, &legs_a, &legs_b, &aligns, 0, &mut used_b, &mut current, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_bijections(
    a: &CatalogGraph,
    b: &CatalogGraph,
    legs_a: &[usize],
    legs_b: &[usize],
    aligns: &BTreeMap<(usize, usize), Vec<Vec<(usize, usize)>>>,
    k: usize,
    used_b: &mut BTreeSet<usize>,
    current: &mut Vec<(usize, usize, usize)>,
    out: &mut Vec<FaceMatch>,
) {
    if k == legs_a.len() {
        // Cut ids must correspond consistently.
        let mut cut_map: BTreeMap<u32, u32> = BTreeMap::new();
        let mut cut_rev: BTreeMap<u32, u32> = BTreeMap::new();
        let mut ok = true;
        for &(la, lb, ai) in current.iter() {
            let align = &aligns[&(la, lb)][ai];
            for &(pa, pb) in align {
                if let (SlotMark::Cut(ca), SlotMark::Cut(cb)) =
                    (a.legs[la].word[pa], b.legs[lb].word[pb])
                {
                    if *cut_map.entry(ca).or_insert(cb) != cb || *cut_rev.entry(cb).or_insert(ca) != ca {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            out.push(FaceMatch {
                leg_pairs: current.iter().map(|&(la, lb, _)| (la, lb)).collect(),
                slot_pairs: current
                    .iter()
                    .map(|&(la, lb, ai)| {
                        aligns[&(la, lb)][ai]
                            .iter()
                            .copied()
                            .filter(|&(pa, _)| {
                                matches!(
                                    a.legs[la].word[pa],
                                    SlotMark::Tau(_) | SlotMark::Gamma(_)
                                )
                            })
                            .collect()
                    })
                    .collect(),
            });
        }
        return;
    }
    let la = legs_a[k];
    for &lb in legs_b {
        if used_b.contains(&lb) {
            continue;
        }
        if let Some(ws) = aligns.get(&(la, lb)) {
            used_b.insert(lb);
            for ai in 0..ws.len() {
                current.push((la, lb, ai));
                enumerate_bijections(a, b, legs_a, legs_b, aligns, k + 1, used_b, current, out);
                current.pop();
            }
            used_b.remove(&lb);
        }
    }
}

/// Alignments of word_a against word_b reversed: for each rotation of the
/// reversed word that matches mark-for-mark (with corners mapped through the
/// gluing), the aligned positions.
fn word_alignments(wa: &[SlotMark], wb: &[SlotMark], gl: &FaceGluing) -> Vec<Vec<(usize, usize)>> {
    if wa.len() != wb.len() {
        return Vec::new();
    }
    let n = wa.len();
    if n == 0 {
        return vec![Vec::new()];
    }
    let mark_matches = |ma: &SlotMark, mb: &SlotMark| -> bool {
        match (ma, mb) {
            (SlotMark::Tau(_), SlotMark::Tau(_)) => true,
            (SlotMark::Gamma(_), SlotMark::Gamma(_)) => true,
            (SlotMark::Cut(_), SlotMark::Cut(_)) => true,
            (SlotMark::Corner(v), SlotMark::Corner(w)) => gl.map_vertex(*v) == Some(*w),
            _ => false,
        }
    };
    let mut out = Vec::new();
    // b's word reversed, aligned against a at every rotation.
    let rev: Vec<(usize, SlotMark)> = wb.iter().copied().enumerate().rev().collect();
    for r in 0..n {
        let mut align = Vec::new();
        let mut ok = true;
        for i in 0..n {
            let (pb, mb) = rev[(r + i) % n];
            if !mark_matches(&wa[i], &mb) {
                ok = false;
                break;
            }
            align.push((i, pb));
        }
        if ok {
            out.push(align);
        }
    }
    out
}

/// Slot-mark compatibility as a symmetric yes/no.
pub fn compatible(a: &CatalogGraph, fa: u8, b: &CatalogGraph, fb: u8, gl: &FaceGluing) -> bool {
    !face_matchings(a, fa, b, fb, gl).is_empty()
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct SearchCaps {
    pub max_assignments: u64,
    pub max_candidates: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { max_assignments: 10_000_000, max_candidates: 10_000 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub assignments_tried: u64,
    pub complete_assignments: u64,
    pub gamma_rejected: u64,
    pub homology_rejected: u64,
    pub boundary_rejected: u64,
    pub capped: bool,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    /// Catalog record per tetrahedron, as (config key hex, mask).
    pub assignment: Vec<(String, u64)>,
    /// The core-parallel boundary curve, as a closed walk over the spine
    /// graph edges (signed 1-handle traversals).
    pub k_walk: Vec<(usize, i8)>,
    /// Whether the walk's representative stays off the 2-handle regions.
    pub k_avoids_attachments: bool,
    pub h1_free_rank: usize,
    pub h1_torsion: Vec<BigInt>,
    pub sigma: TorusSlope,
    pub delta_lambda_sigma: u64,
    pub delta_mu_sigma: u64,
    /// Reduced p/q when the candidate curve is null-homologous in M.
    pub pq: Option<(BigInt, BigInt)>,
    /// External checks the pipeline does not perform.
    pub external_checks: Vec<&'static str>,
    /// Whether Δ(σ, μ) > 1 (the regime of the finiteness statement).
    pub in_regime: bool,
}

pub const EXTERNAL_CHECKS: [&str; 4] = [
    "reducibility of the filled manifold: unverified",
    "solid torus recognition: unverified",
    "torsion order of the core in the fundamental group: unverified",
    "norm minimization across the filling: unverified",
];

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub candidates: Vec<Candidate>,
    pub stats: SearchStats,
}

/// Backtracking over tile assignments with per-face matching enumeration,
/// most-constrained tetrahedron first.
pub fn search(
    gt: &GeneralisedTriangulation,
    catalog: &Catalog,
    caps: SearchCaps,
) -> Result<SearchOutcome, AssembleError> {
    let tiles: Vec<&GraphEntry> = catalog
        .graphs
        .iter()
        .filter(|g| g.graph.assemblable)
        .collect();
    let mut stats = SearchStats::default();
    let mut candidates = Vec::new();

    // Per tetrahedron: tiles with no legs at its boundary (unglued) faces.
    let mut options: Vec<Vec<usize>> = Vec::new();
    for t in 0..gt.tets {
        let mut opts = Vec::new();
        for (i, tile) in tiles.iter().enumerate() {
            let ok = (0..4u8).all(|f| gt.is_glued(t, f) || tile.graph.legs_at(f).is_empty());
            if ok {
                opts.push(i);
            }
        }
        options.push(opts);
    }
    // Internal face list with gluings (each counted once).
    let mut faces: Vec<FaceGluing> = Vec::new();
    let mut seen: BTreeSet<(usize, u8)> = BTreeSet::new();
    for t in 0..gt.tets {
        for f in 0..4u8 {
            if seen.contains(&(t, f)) {
                continue;
            }
            if let Some(g) = gt.gluing_at(t, f) {
                seen.insert(g.side_a);
                seen.insert(g.side_b);
                faces.push(g);
            }
        }
    }
    // Order tets by fewest options (fail-first).
    let mut order: Vec<usize> = (0..gt.tets).collect();
    order.sort_by_key(|&t| options[t].len());

    let mut assignment: Vec<Option<usize>> = vec![None; gt.tets];
    let mut match_choice: BTreeMap<(usize, u8), usize> = BTreeMap::new();
    let _ = &match_choice;
    dfs(
        gt,
        &tiles,
        &options,
        &faces,
        &order,
        0,
        &mut assignment,
        &caps,
        &mut stats,
        &mut candidates,
    )?;
    candidates.sort_by(|a, b| a.assignment.cmp(&b.assignment).then(a.k_walk.cmp(&b.k_walk)));
    candidates.dedup_by(|a, b| a.assignment == b.assignment && a.k_walk == b.k_walk);
    Ok(SearchOutcome { candidates, stats })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    gt: &GeneralisedTriangulation,
    tiles: &[&GraphEntry],
    options: &[Vec<usize>],
    faces: &[FaceGluing],
    order: &[usize],
    k: usize,
    assignment: &mut Vec<Option<usize>>,
    caps: &SearchCaps,
    stats: &mut SearchStats,
    candidates: &mut Vec<Candidate>,
) -> Result<(), AssembleError> {
    if stats.assignments_tried >= caps.max_assignments || candidates.len() >= caps.max_candidates {
        stats.capped = true;
        return Ok(());
    }
    if k == order.len() {
        stats.complete_assignments += 1;
        assemble_assignment(gt, tiles, faces, assignment, stats, candidates, caps)?;
        return Ok(());
    }
    let t = order[k];
    for &ti in &options[t] {
        stats.assignments_tried += 1;
        assignment[t] = Some(ti);
        // Forward check: every fully assigned face must be compatible.
        let ok = faces.iter().all(|g| {
            let (ta, fa) = g.side_a;
            let (tb, fb) = g.side_b;
            match (assignment[ta], assignment[tb]) {
                (Some(a), Some(b)) => compatible(&tiles[a].graph, fa, &tiles[b].graph, fb, g),
                _ => true,
            }
        });
        if ok {
            dfs(gt, tiles, options, faces, order, k + 1, assignment, caps, stats, candidates)?;
        }
        assignment[t] = None;
        if stats.capped {
            return Ok(());
        }
    }
    Ok(())
}

/// Enumerate face matchings for a complete assignment and assemble each
/// combination.
#[allow(clippy::too_many_arguments)]
fn assemble_assignment(
    gt: &GeneralisedTriangulation,
    tiles: &[&GraphEntry],
    faces: &[FaceGluing],
    assignment: &[Option<usize>],
    stats: &mut SearchStats,
    candidates: &mut Vec<Candidate>,
    caps: &SearchCaps,
) -> Result<(), AssembleError> {
    let per_face: Vec<Vec<FaceMatch>> = faces
        .iter()
        .map(|g| {
            let a = assignment[g.side_a.0].unwrap();
            let b = assignment[g.side_b.0].unwrap();
            face_matchings(&tiles[a].graph, g.side_a.1, &tiles[b].graph, g.side_b.1, g)
        })
        .collect();
    if per_face.iter().any(|m| m.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; faces.len()];
    loop {
        let matches: Vec<&FaceMatch> = idx.iter().zip(per_face.iter()).map(|(&i, m)| &m[i]).collect();
        if let Some(c) = assemble_candidate(gt, tiles, faces, assignment, &matches, stats)? {
            candidates.push(c);
            if candidates.len() >= caps.max_candidates {
                stats.capped = true;
                return Ok(());
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < per_face[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Joins one complete matched assignment into M' and filters homologically.
fn assemble_candidate(
    gt: &GeneralisedTriangulation,
    tiles: &[&GraphEntry],
    faces: &[FaceGluing],
    assignment: &[Option<usize>],
    matches: &[&FaceMatch],
    stats: &mut SearchStats,
) -> Result<Option<Candidate>, AssembleError> {
    let assembled = match boundary::assemble_structure(gt, tiles, faces, assignment, matches) {
        Ok(a) => a,
        Err(boundary::StructureError::GammaNotSingleCurve)
        | Err(boundary::StructureError::Disconnected) => {
            stats.gamma_rejected += 1;
            return Ok(None);
        }
        Err(boundary::StructureError::NoGamma) => {
            stats.gamma_rejected += 1;
            return Ok(None);
        }
    };
    // H1(M') must be infinite cyclic.
    let graph = GraphPresentation::new(assembled.vertices, assembled.edges.clone());
    let words: Vec<Word> = assembled.tau_words.clone();
    let (_, relators) = h1_presentation(&graph, &words)?;
    let h1 = h1_group(&relators);
    if !h1.is_infinite_cyclic() {
        stats.homology_rejected += 1;
        return Ok(None);
    }
    // Boundary torus and basis.
    let problem = boundary::boundary_problem(&assembled)?;
    let basis = match boundary_basis(&problem) {
        Ok(b) => b,
        Err(HomologyError::NotTorus { .. })
        | Err(HomologyError::NotInfiniteCyclic)
        | Err(HomologyError::BoundaryMapNotOnto) => {
            stats.boundary_rejected += 1;
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    let (sa, sb) = basis.coords_of(&assembled.gamma_chain)?;
    let (sa64, sb64) = (big_to_i64(&sa), big_to_i64(&sb));
    let Some((sa64, sb64)) = sa64.zip(sb64) else {
        return Err(AssembleError::Other("slope coordinates overflow".into()));
    };
    if sa64 == 0 && sb64 == 0 {
        // The tangle is null-homologous on the boundary torus: not a slope.
        stats.boundary_rejected += 1;
        return Ok(None);
    }
    let sigma = TorusSlope::new(sa64, sb64, BasisId(0)).expect("nonzero slope");
    let lambda = TorusSlope::new(1, 0, BasisId(0)).unwrap();
    let mu = TorusSlope::new(0, 1, BasisId(0)).unwrap();
    let delta_lambda_sigma = slope_distance(&lambda, &sigma)?;
    let delta_mu_sigma = slope_distance(&mu, &sigma)?;
    // K's walk over the spine.
    let k_walk = boundary::lambda_walk(&assembled, &basis);
    // p/q when K is null-homologous in the ambient manifold.
    let pq = ambient_pq(gt, &assembled, &k_walk, sa64, sb64);
    Ok(Some(Candidate {
        assignment: assignment
            .iter()
            .map(|a| {
                let t = tiles[a.unwrap()];
                (hex(&t.config_key), t.mask)
            })
            .collect(),
        k_walk,
        k_avoids_attachments: basis.lambda_avoids_attachments,
        h1_free_rank: h1.free_rank,
        h1_torsion: h1.torsion,
        sigma,
        delta_lambda_sigma,
        delta_mu_sigma,
        pq,
        external_checks: EXTERNAL_CHECKS.to_vec(),
        in_regime: delta_mu_sigma > 1,
    }))
}

fn big_to_i64(x: &BigInt) -> Option<i64> {
    let (sign, digits) = x.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 if digits[0] <= i64::MAX as u64 => {
            let v = digits[0] as i64;
            Some(if sign == num_bigint::Sign::Minus { -v } else { v })
        }
        _ => None,
    }
}

/// The class of K in H1(M): M presented by the dual spine (one generator per
/// glued face, relators per interior edge orbit). K's walk projects onto the
/// spine generators. When the class vanishes, σ's coordinates read as p/q
/// with q normalized positive.
fn ambient_pq(
    gt: &GeneralisedTriangulation,
    assembled: &boundary::Assembled,
    k_walk: &[(usize, i8)],
    sa: i64,
    sb: i64,
) -> Option<(BigInt, BigInt)> {
    use crate::homology::IntMatrix;
    // Spine of M: vertices = tets, edges = gluings, relators = interior edge
    // orbit rings.
    let gluings: Vec<FaceGluing> = {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in 0..gt.tets {
            for f in 0..4u8 {
                if seen.contains(&(t, f)) {
                    continue;
                }
                if let Some(g) = gt.gluing_at(t, f) {
                    seen.insert(g.side_a);
                    seen.insert(g.side_b);
                    out.push(g);
                }
            }
        }
        out
    };
    let spine_edges: Vec<(usize, usize)> = gluings.iter().map(|g| (g.side_a.0, g.side_b.0)).collect();
    let spine = GraphPresentation::new(gt.tets, spine_edges);
    let edge_of_face: BTreeMap<(usize, u8), (usize, i8)> = gluings
        .iter()
        .enumerate()
        .flat_map(|(i, g)| [(g.side_a, (i, 1i8)), (g.side_b, (i, -1i8))])
        .collect();
    let mut words: Vec<Word> = Vec::new();
    for orbit in gt.edge_orbits() {
        if !orbit.closed {
            continue;
        }
        let mut word: Word = Vec::new();
        for &(t, _, _, _, exit) in &orbit.ring {
            let &(e, s) = edge_of_face.get(&(t, exit)).expect("interior passage glued");
            word.push((e, s));
        }
        words.push(word);
    }
    let cb = crate::homology::CycleBasis::new(spine.clone());
    let mut rel = IntMatrix::zeros(words.len(), cb.rank());
    for (r, word) in words.iter().enumerate() {
        let mut chain = vec![BigInt::from(0); spine.edges.len()];
        for &(e, s) in word {
            chain[e] += BigInt::from(s);
        }
        let coords = cb.cycle_coords(&chain).ok()?;
        for (c, v) in coords.into_iter().enumerate() {
            rel[(r, c)] = v;
        }
    }
    // K's chain over the spine edges: the assembled graph edges map to
    // gluings by construction order.
    let mut chain = vec![BigInt::from(0); spine.edges.len()];
    for &(e, s) in k_walk {
        let spine_edge = assembled.edge_to_gluing[e];
        chain[spine_edge] += BigInt::from(s);
    }
    let coords = cb.cycle_coords(&chain).ok()?;
    // Null-homologous iff the class lies in the relator lattice.
    let relt = rel.transpose();
    let sol = crate::homology::solve(&relt, &coords);
    if sol.is_none() {
        return None;
    }
    // p pairs with λ, q with μ, q normalized positive.
    let (mut p, mut q) = (BigInt::from(sb), BigInt::from(sa));
    if q.is_negative() {
        p = -p;
        q = -q;
    }
    Some((p, q))
}

/// Re-verifies a candidate's internal consistency and lists the external
/// checks still required. Never claims exceptionality.
#[derive(Clone, Debug)]
pub struct CertifyReport {
    pub consistent: bool,
    pub items: Vec<String>,
}

pub fn certify_candidate(c: &Candidate) -> CertifyReport {
    let mut items = Vec::new();
    let mut consistent = true;
    let lambda = TorusSlope::new(1, 0, c.sigma.basis()).unwrap();
    let mu = TorusSlope::new(0, 1, c.sigma.basis()).unwrap();
    match slope_distance(&lambda, &c.sigma) {
        Ok(d) if d == c.delta_lambda_sigma => {}
        _ => {
            consistent = false;
            items.push("SlopeArithmeticMismatch: Δ(λ,σ) does not match coordinates".into());
        }
    }
    match slope_distance(&mu, &c.sigma) {
        Ok(d) if d == c.delta_mu_sigma => {}
        _ => {
            consistent = false;
            items.push("SlopeArithmeticMismatch: Δ(μ,σ) does not match coordinates".into());
        }
    }
    if c.h1_free_rank != 1 || !c.h1_torsion.is_empty() {
        consistent = false;
        items.push("homology report is not infinite cyclic".into());
    }
    if !c.in_regime {
        items.push("Δ(σ,μ) ≤ 1: outside the finiteness regime".into());
    }
    if consistent {
        items.push("internally consistent; external checks pending".into());
    }
    for e in &c.external_checks {
        items.push((*e).to_string());
    }
    CertifyReport { consistent, items }
}
