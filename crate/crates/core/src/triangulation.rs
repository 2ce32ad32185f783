//! Generalised triangulations: parsing, validation, and the dual handle
//! structure.
//!
//! A triangulation is a set of 3-simplices with faces identified in pairs;
//! faces are indexed by their opposite vertex. Dualizing associates an
//! i-handle with each (3-i)-simplex not contained in the boundary: a 0-handle
//! per tetrahedron, a 1-handle per glued face, a 2-handle per interior edge
//! orbit and a 3-handle per interior non-ideal vertex orbit. Each 0-handle's
//! boundary sphere carries the base pattern restricted to the faces and
//! edges actually dualized.

use crate::surface::pattern::{faces_of_edge, tetra_pattern};
use crate::surface::SphereComplex;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face {0}.{1} glued twice")]
    DuplicateGluing(usize, u8),
    #[error("vertex map is not a bijection")]
    NonBijectiveMap,
    #[error("face glued to itself")]
    SelfGluing,
    #[error("reference out of range: {0}")]
    OutOfRange(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryPolicy {
    Genuine,
    Ideal,
    Mixed,
}

impl BoundaryPolicy {
    fn token(&self) -> &'static str {
        match self {
            BoundaryPolicy::Genuine => "genuine",
            BoundaryPolicy::Ideal => "ideal",
            BoundaryPolicy::Mixed => "mixed",
        }
    }
}

/// One face identification. `verts(side_a)` in ascending order map to
/// `images` on side b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaceGluing {
    pub side_a: (usize, u8),
    pub side_b: (usize, u8),
    pub images: [u8; 3],
}

/// The three vertices of a face, ascending.
pub fn face_vertices(face: u8) -> [u8; 3] {
    let mut out = [0u8; 3];
    let mut k = 0;
    for v in 0..4u8 {
        if v != face {
            out[k] = v;
            k += 1;
        }
    }
    out
}

impl FaceGluing {
    /// The vertex map as a function on the three face vertices.
    pub fn map_vertex(&self, v: u8) -> Option<u8> {
        let vs = face_vertices(self.side_a.1);
        vs.iter().position(|&x| x == v).map(|i| self.images[i])
    }

    /// The inverse direction.
    pub fn inverse(&self) -> FaceGluing {
        let vs = face_vertices(self.side_a.1);
        let ws = face_vertices(self.side_b.1);
        let mut images = [0u8; 3];
        for (i, &w) in ws.iter().enumerate() {
            let j = self.images.iter().position(|&x| x == w).expect("bijection");
            images[i] = vs[j];
        }
        FaceGluing { side_a: self.side_b, side_b: self.side_a, images }
    }

    /// The full permutation of {0..3} sending side_a's labels to side_b's:
    /// the face index maps to the other face index.
    pub fn permutation(&self) -> [u8; 4] {
        let mut p = [0u8; 4];
        p[self.side_a.1 as usize] = self.side_b.1;
        for (i, &v) in face_vertices(self.side_a.1).iter().enumerate() {
            p[v as usize] = self.images[i];
        }
        p
    }
}

fn perm_sign(p: &[u8; 4]) -> i8 {
    let mut sign = 1i8;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralisedTriangulation {
    pub tets: usize,
    pub gluings: Vec<FaceGluing>,
    pub ideal_vertices: BTreeSet<(usize, u8)>,
    pub policy: BoundaryPolicy,
}

impl GeneralisedTriangulation {
    /// The gluing on a face, if any, oriented with that face as side_a.
    pub fn gluing_at(&self, tet: usize, face: u8) -> Option<FaceGluing> {
        for g in &self.gluings {
            if g.side_a == (tet, face) {
                return Some(*g);
            }
            if g.side_b == (tet, face) {
                return Some(g.inverse());
            }
        }
        None
    }

    pub fn is_glued(&self, tet: usize, face: u8) -> bool {
        self.gluing_at(tet, face).is_some()
    }

    // -- parsing ------------------------------------------------------------

    pub fn parse(text: &str) -> Result<Self, TriError> {
        let perr = |line: usize, msg: &str| TriError::Parse { line: line + 1, msg: msg.into() };
        let mut tets = None;
        let mut policy = BoundaryPolicy::Genuine;
        let mut gluings: Vec<FaceGluing> = Vec::new();
        let mut ideal = BTreeSet::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "tets" => {
                    tets = Some(
                        toks.get(1)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| perr(ln, "bad tetrahedron count"))?,
                    );
                }
                "policy" => {
                    policy = match toks.get(1).copied() {
                        Some("genuine") => BoundaryPolicy::Genuine,
                        Some("ideal") => BoundaryPolicy::Ideal,
                        Some("mixed") => BoundaryPolicy::Mixed,
                        _ => return Err(perr(ln, "policy must be genuine|ideal|mixed")),
                    };
                }
                "glue" => {
                    // glue a.f b.g : p0 p1 p2
                    if toks.len() != 7 || toks[3] != ":" {
                        return Err(perr(ln, "expected 'glue a.f b.g : p0 p1 p2'"));
                    }
                    let side_a = parse_side(toks[1]).ok_or_else(|| perr(ln, "bad side"))?;
                    let side_b = parse_side(toks[2]).ok_or_else(|| perr(ln, "bad side"))?;
                    let mut images = [0u8; 3];
                    for k in 0..3 {
                        images[k] = toks[4 + k]
                            .parse()
                            .map_err(|_| perr(ln, "bad vertex image"))?;
                    }
                    gluings.push(FaceGluing { side_a, side_b, images });
                }
                "ideal" => {
                    let (t, v) = parse_side(toks.get(1).copied().unwrap_or(""))
                        .ok_or_else(|| perr(ln, "bad ideal mark"))?;
                    ideal.insert((t, v));
                }
                _ => return Err(perr(ln, "unknown record")),
            }
        }
        let tets = tets.ok_or_else(|| perr(0, "missing 'tets N' header"))?;
        let gt = GeneralisedTriangulation { tets, gluings, ideal_vertices: ideal, policy };
        gt.check_structure()?;
        Ok(gt)
    }

    fn check_structure(&self) -> Result<(), TriError> {
        let mut used: BTreeSet<(usize, u8)> = BTreeSet::new();
        for g in &self.gluings {
            for &(t, f) in [&g.side_a, &g.side_b].into_iter() {
                if t >= self.tets || f > 3 {
                    return Err(TriError::OutOfRange(format!("{t}.{f}")));
                }
                if !used.insert((t, f)) {
                    return Err(TriError::DuplicateGluing(t, f));
                }
            }
            if g.side_a == g.side_b {
                return Err(TriError::SelfGluing);
            }
            let target = face_vertices(g.side_b.1);
            let mut seen = BTreeSet::new();
            for &im in &g.images {
                if !target.contains(&im) || !seen.insert(im) {
                    return Err(TriError::NonBijectiveMap);
                }
            }
        }
        for &(t, v) in &self.ideal_vertices {
            if t >= self.tets || v > 3 {
                return Err(TriError::OutOfRange(format!("{t}.{v}")));
            }
        }
        Ok(())
    }

    /// Deterministic text form; `parse ∘ serialize` is the identity.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tets {}", self.tets);
        let _ = writeln!(out, "policy {}", self.policy.token());
        let mut gluings = self.gluings.clone();
        gluings.sort();
        for g in gluings {
            let _ = writeln!(
                out,
                "glue {}.{} {}.{} : {} {} {}",
                g.side_a.0, g.side_a.1, g.side_b.0, g.side_b.1, g.images[0], g.images[1], g.images[2]
            );
        }
        for &(t, v) in &self.ideal_vertices {
            let _ = writeln!(out, "ideal {t}.{v}");
        }
        out
    }

    // -- orbits ---------------------------------------------------------------

    /// Orientability: a consistent orientation assignment exists with every
    /// gluing permutation odd.
    pub fn orientable(&self) -> bool {
        let mut orient: Vec<i8> = vec![0; self.tets];
        for start in 0..self.tets {
            if orient[start] != 0 {
                continue;
            }
            orient[start] = 1;
            let mut stack = vec![start];
            while let Some(t) = stack.pop() {
                for f in 0..4u8 {
                    if let Some(g) = self.gluing_at(t, f) {
                        let (t2, _) = g.side_b;
                        let want = -orient[t] * perm_sign(&g.permutation());
                        if orient[t2] == 0 {
                            orient[t2] = want;
                            stack.push(t2);
                        } else if orient[t2] != want {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Edge orbit structure: for each orbit, the ring of passages around the
    /// edge and whether it closes up (interior edge).
    pub fn edge_orbits(&self) -> Vec<EdgeOrbit> {
        let mut seen: BTreeSet<(usize, u8, u8)> = BTreeSet::new();
        let mut orbits = Vec::new();
        for t in 0..self.tets {
            for a in 0..4u8 {
                for b in a + 1..4u8 {
                    if seen.contains(&(t, a, b)) {
                        continue;
                    }
                    let orbit = self.trace_edge(t, a, b);
                    for &(tt, x, y, _, _) in &orbit.ring {
                        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                        seen.insert((tt, lo, hi));
                    }
                    orbits.push(orbit);
                }
            }
        }
        orbits
    }

    /// Walk around edge {a,b} of tet t: each ring entry is
    /// (tet, a, b, entry_face, exit_face) where entry/exit are the two faces
    /// containing the edge.
    fn trace_edge(&self, t0: usize, a0: u8, b0: u8) -> EdgeOrbit {
        let walk = |t0: usize, a0: u8, b0: u8, first_exit: u8| -> (Vec<(usize, u8, u8, u8, u8)>, bool) {
            // Move from tet to tet crossing `exit` faces; stop at an unglued
            // face or on closing up.
            let mut ring = Vec::new();
            let (mut t, mut a, mut b, mut exit) = (t0, a0, b0, first_exit);
            loop {
                let (fa, fb) = faces_of_edge(a, b);
                let entry = if exit == fa { fb } else { fa };
                ring.push((t, a, b, entry, exit));
                match self.gluing_at(t, exit) {
                    None => return (ring, false),
                    Some(g) => {
                        let t2 = g.side_b.0;
                        let a2 = g.map_vertex(a).expect("edge vertex on face");
                        let b2 = g.map_vertex(b).expect("edge vertex on face");
                        let entered = g.side_b.1;
                        let (fa2, fb2) = faces_of_edge(a2, b2);
                        let exit2 = if entered == fa2 { fb2 } else { fa2 };
                        if (t2, exit2.min(100)) == (t0, exit2.min(100))
                            && t2 == t0
                            && ((a2 == a0 && b2 == b0) || (a2 == b0 && b2 == a0))
                            && entered != exit2
                        {
                            // Potential closure: closed iff we re-enter the
                            // starting passage.
                            let start_entry = ring[0].3;
                            if entered == start_entry || exit2 == ring[0].4 {
                                return (ring, true);
                            }
                        }
                        if ring.iter().any(|&(tt, x, y, e, _)| {
                            tt == t2 && ((x == a2 && y == b2) || (x == b2 && y == a2)) && e == entered
                        }) {
                            return (ring, true);
                        }
                        t = t2;
                        a = a2;
                        b = b2;
                        exit = exit2;
                    }
                }
            }
        };
        let (fa, fb) = faces_of_edge(a0, b0);
        let (ring, closed) = walk(t0, a0, b0, fa);
        if closed {
            return EdgeOrbit { ring, closed };
        }
        // Open in that direction: walk the other way and join.
        let (back, closed2) = walk(t0, a0, b0, fb);
        debug_assert!(!closed2, "edge ring closed one way but not the other");
        let mut full: Vec<(usize, u8, u8, u8, u8)> =
            back.into_iter().rev().map(|(t, a, b, e, x)| (t, a, b, x, e)).collect();
        full.extend(ring.into_iter().skip(1));
        EdgeOrbit { ring: full, closed: false }
    }

    /// Vertex orbits: corners identified across gluings.
    pub fn vertex_orbits(&self) -> Vec<Vec<(usize, u8)>> {
        let n = self.tets * 4;
        let idx = |t: usize, v: u8| t * 4 + v as usize;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for g in &self.gluings {
            for &v in &face_vertices(g.side_a.1) {
                let w = g.map_vertex(v).unwrap();
                let (a, b) = (idx(g.side_a.0, v), idx(g.side_b.0, w));
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<(usize, u8)>> = BTreeMap::new();
        for t in 0..self.tets {
            for v in 0..4u8 {
                let r = find(&mut parent, idx(t, v));
                groups.entry(r).or_default().push((t, v));
            }
        }
        groups.into_values().collect()
    }

    /// Euler characteristic and closedness of a vertex orbit's link surface.
    pub fn vertex_link(&self, orbit: &[(usize, u8)]) -> LinkInfo {
        let corners: BTreeSet<(usize, u8)> = orbit.iter().copied().collect();
        // Link faces: one triangle per corner.
        let f = corners.len() as i64;
        // Link edges: triangle sides (t, v, face containing v); glued sides
        // pair via the gluings.
        let mut side_seen: BTreeSet<(usize, u8, u8)> = BTreeSet::new();
        let mut e = 0i64;
        let mut closed = true;
        for &(t, v) in &corners {
            for face in 0..4u8 {
                if face == v || side_seen.contains(&(t, v, face)) {
                    continue;
                }
                side_seen.insert((t, v, face));
                match self.gluing_at(t, face) {
                    Some(g) => {
                        let t2 = g.side_b.0;
                        let v2 = g.map_vertex(v).unwrap();
                        side_seen.insert((t2, v2, g.side_b.1));
                    }
                    None => closed = false,
                }
                e += 1;
            }
        }
        // Link vertices: edge-ends at the orbit's corners, identified around
        // each triangulation edge.
        let mut end_seen: BTreeSet<(usize, u8, u8)> = BTreeSet::new();
        let mut v_count = 0i64;
        for &(t, v) in &corners {
            for u in 0..4u8 {
                if u == v || end_seen.contains(&(t, v, u)) {
                    continue;
                }
                v_count += 1;
                // Sweep the full ring of the edge {v,u} marking this end.
                let (a, b) = (v.min(u), v.max(u));
                let orbit_ring = self.trace_edge(t, a, b);
                // Walk again tracking which end corresponds to v.
                let mut cur = (t, v, u);
                end_seen.insert(cur);
                // Propagate across every gluing step in the ring.
                for &(tt, x, y, _entry, exit) in &orbit_ring.ring {
                    let _ = (x, y);
                    if let Some(g) = self.gluing_at(tt, exit) {
                        let _ = g;
                    }
                }
                // Simpler: sweep neighbors transitively via gluings.
                let mut stack = vec![cur];
                while let Some((tt, vv, uu)) = stack.pop() {
                    for face in 0..4u8 {
                        if face == vv || face == uu {
                            continue;
                        }
                        if let Some(g) = self.gluing_at(tt, face) {
                            let nv = g.map_vertex(vv).unwrap();
                            let nu = g.map_vertex(uu).unwrap();
                            let key = (g.side_b.0, nv, nu);
                            if end_seen.insert(key) {
                                stack.push(key);
                            }
                        }
                    }
                }
                cur = (t, v, u);
                let _ = cur;
            }
        }
        LinkInfo { euler: v_count - e + f, closed }
    }

    /// Whether a vertex orbit carries any ideal mark.
    pub fn orbit_ideal(&self, orbit: &[(usize, u8)]) -> bool {
        orbit.iter().any(|c| self.ideal_vertices.contains(c))
    }
}

fn parse_side(tok: &str) -> Option<(usize, u8)> {
    let (a, b) = tok.split_once('.')?;
    let t = a.parse().ok()?;
    let f: u8 = b.parse().ok()?;
    if f > 3 {
        return None;
    }
    Some((t, f))
}

#[derive(Clone, Debug)]
pub struct EdgeOrbit {
    /// Passages (tet, a, b, entry_face, exit_face) around the edge.
    pub ring: Vec<(usize, u8, u8, u8, u8)>,
    pub closed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkInfo {
    pub euler: i64,
    pub closed: bool,
}

// ---------------------------------------------------------------------------
// Validation report
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub orientable: bool,
    /// (component description, euler characteristic, is_torus)
    pub boundary_components: Vec<(String, i64, bool)>,
    pub all_tori: bool,
    pub items: Vec<String>,
}

/// Report-based validation: orientability, boundary components with their
/// Euler characteristics, and the boundary-torus requirement.
pub fn validate(gt: &GeneralisedTriangulation) -> ValidationReport {
    let mut report = ValidationReport { orientable: gt.orientable(), ..Default::default() };
    if !report.orientable {
        report.items.push("non-orientable".into());
    }
    // Policy consistency.
    let orbits = gt.vertex_orbits();
    match gt.policy {
        BoundaryPolicy::Genuine => {
            if !gt.ideal_vertices.is_empty() {
                report.items.push("policy genuine but ideal vertices marked".into());
            }
        }
        BoundaryPolicy::Ideal => {
            if orbits.iter().any(|o| !gt.orbit_ideal(o)) {
                report.items.push("policy ideal but some vertex unmarked".into());
            }
        }
        BoundaryPolicy::Mixed => {}
    }
    for orbit in &orbits {
        let ideal = gt.orbit_ideal(orbit);
        if ideal && orbit.iter().any(|c| !gt.ideal_vertices.contains(c)) {
            report
                .items
                .push(format!("ideal marks inconsistent on orbit of {:?}", orbit[0]));
        }
    }
    // Ideal vertex links are boundary components.
    for orbit in &orbits {
        let link = gt.vertex_link(orbit);
        if gt.orbit_ideal(orbit) {
            let torus = link.closed && link.euler == 0;
            report.boundary_components.push((
                format!("ideal vertex link at {}.{}", orbit[0].0, orbit[0].1),
                link.euler,
                torus,
            ));
        } else if link.closed && link.euler != 2 {
            report
                .items
                .push(format!("vertex {}.{} has a non-sphere closed link", orbit[0].0, orbit[0].1));
        }
    }
    // Real boundary: unglued faces glued up along boundary edges.
    let bd = boundary_surface_components(gt);
    for (i, (euler, faces)) in bd.iter().enumerate() {
        let torus = *euler == 0;
        report
            .boundary_components
            .push((format!("boundary surface component {i} ({faces} faces)"), *euler, torus));
    }
    report.all_tori = !report.boundary_components.is_empty()
        && report.boundary_components.iter().all(|&(_, _, t)| t)
        || report.boundary_components.is_empty();
    if !report.boundary_components.iter().all(|&(_, _, t)| t) {
        report.items.push("boundary not torus".into());
    }
    report
}

/// Components of the real (unglued-face) boundary surface with their Euler
/// characteristics, by direct cell counting.
pub fn boundary_surface_components(gt: &GeneralisedTriangulation) -> Vec<(i64, usize)> {
    let faces: Vec<(usize, u8)> = (0..gt.tets)
        .flat_map(|t| (0..4u8).map(move |f| (t, f)))
        .filter(|&(t, f)| !gt.is_glued(t, f))
        .collect();
    if faces.is_empty() {
        return Vec::new();
    }
    let fidx: BTreeMap<(usize, u8), usize> = faces.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut parent: Vec<usize> = (0..faces.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    // Pair boundary-face edges via the open edge rings.
    let mut edge_pairs = 0usize;
    let mut edges_seen: BTreeSet<Vec<(usize, u8, u8)>> = BTreeSet::new();
    for orbit in gt.edge_orbits() {
        if orbit.closed {
            continue;
        }
        let norm: Vec<(usize, u8, u8)> = orbit.ring.iter().map(|&(t, a, b, _, _)| (t, a.min(b), a.max(b))).collect();
        if !edges_seen.insert(norm) {
            continue;
        }
        // The two open ends land on unglued faces.
        let first = orbit.ring.first().unwrap();
        let last = orbit.ring.last().unwrap();
        let end1 = (first.0, first.3);
        let end2 = (last.0, last.4);
        if let (Some(&i), Some(&j)) = (fidx.get(&end1), fidx.get(&end2)) {
            edge_pairs += 1;
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
    }
    // Boundary vertices: non-ideal vertex orbits with open links.
    let mut bd_vertices: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new(); // orbit -> faces touching
    for (oi, orbit) in gt.vertex_orbits().iter().enumerate() {
        if gt.orbit_ideal(orbit) {
            continue;
        }
        let link = gt.vertex_link(orbit);
        if link.closed {
            continue;
        }
        let mut touch = BTreeSet::new();
        for &(t, v) in orbit {
            for f in 0..4u8 {
                if f != v {
                    if let Some(&i) = fidx.get(&(t, f)) {
                        touch.insert(i);
                    }
                }
            }
        }
        if !touch.is_empty() {
            bd_vertices.insert(oi, touch);
        }
    }
    // Components and counts.
    let mut comp_faces: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..faces.len() {
        let r = find(&mut parent, i);
        *comp_faces.entry(r).or_insert(0) += 1;
    }
    let mut comp_edges: BTreeMap<usize, i64> = BTreeMap::new();
    let _ = edge_pairs;
    for orbit in gt.edge_orbits() {
        if orbit.closed {
            continue;
        }
        let first = orbit.ring.first().unwrap();
        let end1 = (first.0, first.3);
        if let Some(&i) = fidx.get(&end1) {
            let r = find(&mut parent, i);
            *comp_edges.entry(r).or_insert(0) += 1;
        }
    }
    let mut comp_vertices: BTreeMap<usize, i64> = BTreeMap::new();
    for (_, touch) in bd_vertices {
        let i = *touch.iter().next().unwrap();
        let r = find(&mut parent, i);
        *comp_vertices.entry(r).or_insert(0) += 1;
    }
    comp_faces
        .iter()
        .map(|(&r, &f)| {
            let e = comp_edges.get(&r).copied().unwrap_or(0);
            let v = comp_vertices.get(&r).copied().unwrap_or(0);
            (v - e + f as i64, f)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dual handle structure
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct HandleStructure {
    /// One boundary sphere per tetrahedron, carrying the restricted pattern.
    pub spheres: Vec<SphereComplex>,
    /// 1-handles: the glued face pairs (ends on the two spheres).
    pub one_handles: Vec<FaceGluing>,
    /// 2-handles: interior edge orbits with their attaching rings.
    pub two_handles: Vec<EdgeOrbit>,
    /// 3-handles: interior non-ideal vertex orbits.
    pub three_handles: Vec<Vec<(usize, u8)>>,
    /// Sutures on the manifold boundary (empty for the trivial structure).
    pub sutures: Vec<String>,
}

impl HandleStructure {
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (
            self.spheres.len(),
            self.one_handles.len(),
            self.two_handles.len(),
            self.three_handles.len(),
        )
    }

    pub fn euler(&self) -> i64 {
        let (h0, h1, h2, h3) = self.counts();
        h0 as i64 - h1 as i64 + h2 as i64 - h3 as i64
    }
}

/// Builds the dual handle structure of a validated triangulation.
pub fn dual_handle_structure(gt: &GeneralisedTriangulation) -> HandleStructure {
    let edge_orbits = gt.edge_orbits();
    let vertex_orbits = gt.vertex_orbits();
    let interior_vertices: Vec<Vec<(usize, u8)>> = vertex_orbits
        .iter()
        .filter(|o| !gt.orbit_ideal(o) && gt.vertex_link(o).closed)
        .cloned()
        .collect();
    let dual_edges: Vec<&EdgeOrbit> = edge_orbits.iter().filter(|o| o.closed).collect();

    // Per tetrahedron: which faces are glued and which edges dualized.
    let mut spheres = Vec::new();
    for t in 0..gt.tets {
        let mut sc = tetra_pattern();
        // Remove bands for boundary edges.
        for a in 0..4u8 {
            for b in a + 1..4u8 {
                let dualized = dual_edges.iter().any(|o| {
                    o.ring
                        .iter()
                        .any(|&(tt, x, y, _, _)| tt == t && ((x, y) == (a, b) || (x, y) == (b, a)))
                });
                if !dualized {
                    let band = band_for_edge(&sc, a, b);
                    sc.remove_band(band).expect("band removal");
                }
            }
        }
        for f in 0..4u8 {
            if !gt.is_glued(t, f) {
                if let Some(disc) = sc.disc_for_face(f) {
                    sc.remove_disc_with_bands(disc).expect("disc removal");
                }
            }
        }
        sc.normalize();
        // Mark regions pressed against 3-handles.
        for v in 0..4u8 {
            let interior = interior_vertices
                .iter()
                .any(|o| o.contains(&(t, v)));
            if interior {
                if let Some(r) = sc.region_for_vertex(v) {
                    sc.set_region_h3(r, true);
                }
            }
        }
        sc.well_formed().expect("dual sphere pattern");
        spheres.push(sc);
    }
    HandleStructure {
        spheres,
        one_handles: gt.gluings.clone(),
        two_handles: dual_edges.into_iter().cloned().collect(),
        three_handles: interior_vertices,
        sutures: Vec::new(),
    }
}

/// The band of the base pattern dual to edge {a,b}: the band whose two discs
/// are the faces containing the edge.
fn band_for_edge(sc: &SphereComplex, a: u8, b: u8) -> crate::surface::CellId {
    let (fa, fb) = faces_of_edge(a, b);
    let da = sc.disc_for_face(fa).unwrap();
    let db = sc.disc_for_face(fb).unwrap();
    for c in sc.live_cells() {
        if !sc.cell_tag(c).is_band() {
            continue;
        }
        let mut touches = BTreeSet::new();
        for d in sc.map().darts() {
            if sc.cell_of(d) == c && sc.kind(d) == crate::surface::EdgeKind::Attach {
                touches.insert(sc.other_cell(d));
            }
        }
        // The two bands between the same disc pair are distinguished by
        // their corner arcs; for the full pattern disc pairs determine bands
        // uniquely.
        if touches == BTreeSet::from([da, db]) {
            // Check the band's sides touch the regions at a and b.
            let sides: BTreeSet<_> = sc
                .map()
                .darts()
                .filter(|&d| sc.cell_of(d) == c && sc.kind(d) == crate::surface::EdgeKind::BandSide)
                .map(|d| sc.other_cell(d))
                .collect();
            let ra = sc.region_for_vertex(a);
            let rb = sc.region_for_vertex(b);
            if ra.is_some_and(|r| sides.contains(&r)) && rb.is_some_and(|r| sides.contains(&r)) {
                return c;
            }
        }
    }
    panic!("no band for edge {a},{b}");
}

/// The boundary handle structure check: Euler characteristic of the manifold
/// boundary computed from the induced cells, against 2·χ of the handle
/// counts.
pub fn boundary_surface(gt: &GeneralisedTriangulation, hs: &HandleStructure) -> BoundaryReport {
    let mut components = Vec::new();
    for (euler, faces) in boundary_surface_components(gt) {
        components.push((euler, format!("{faces} boundary faces")));
    }
    for orbit in gt.vertex_orbits() {
        if gt.orbit_ideal(&orbit) {
            let link = gt.vertex_link(&orbit);
            components.push((link.euler, format!("ideal link at {}.{}", orbit[0].0, orbit[0].1)));
        }
    }
    let total: i64 = components.iter().map(|&(e, _)| e).sum();
    BoundaryReport { components, total_euler: total, handle_euler: 2 * hs.euler() }
}

#[derive(Clone, Debug)]
pub struct BoundaryReport {
    /// (euler characteristic, description) per boundary component.
    pub components: Vec<(i64, String)>,
    pub total_euler: i64,
    /// 2·(h0 - h1 + h2 - h3); must equal `total_euler`.
    pub handle_euler: i64,
}

impl BoundaryReport {
    pub fn consistent(&self) -> bool {
        self.total_euler == self.handle_euler
    }

    pub fn genus_of(euler: i64) -> i64 {
        (2 - euler) / 2
    }
}
