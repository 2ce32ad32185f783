//! The base sphere pattern of a dualized tetrahedron.
//!
//! The boundary sphere of the 0-handle dual to a tetrahedron carries four
//! discs (one per face, where the face-dual 1-handles attach), six bands (one
//! per edge, where the edge-dual 2-handles run over the sphere) and four
//! complementary regions (one per vertex). Combinatorially this is the flag
//! complex of the tetrahedron: vertices of the pattern are flags (vertex,
//! edge, face), and the three edge types at a flag cross to the flag differing
//! in exactly that element.

use super::map::CombMap;
use super::{CellId, CellTag, EdgeKind, Orient, SphereComplex, SurfaceError};
use std::collections::BTreeMap;

/// Face f of the tetrahedron is opposite vertex f; these cycles orient all
/// four faces consistently (outward).
pub const FACE_CYCLES: [[u8; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// The two faces containing edge {u, v}: the complementary pair.
pub fn faces_of_edge(u: u8, v: u8) -> (u8, u8) {
    let mut others = (0..4u8).filter(|&x| x != u && x != v);
    (others.next().unwrap(), others.next().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Flag {
    v: u8,
    u: u8,
    f: u8,
}

fn third_vertex(flag: Flag) -> u8 {
    (0..4u8).find(|&x| x != flag.v && x != flag.u && x != flag.f).unwrap()
}

fn flag_positive(flag: Flag) -> bool {
    let w = third_vertex(flag);
    let cyc = FACE_CYCLES[flag.f as usize];
    let triple = [flag.v, flag.u, w];
    (0..3).any(|r| (0..3).all(|i| triple[i] == cyc[(i + r) % 3]))
}

/// Builds the full pattern. All regions start oriented `In` with `h3 = false`.
pub fn tetra_pattern() -> SphereComplex {
    let mut flags = Vec::new();
    let mut flag_index = BTreeMap::new();
    for v in 0..4u8 {
        for u in 0..4u8 {
            if u == v {
                continue;
            }
            for f in 0..4u8 {
                if f == v || f == u {
                    continue;
                }
                flag_index.insert((v, u, f), flags.len());
                flags.push(Flag { v, u, f });
            }
        }
    }
    debug_assert_eq!(flags.len(), 24);

    let vflip = |fl: Flag| Flag { v: fl.u, u: fl.v, f: fl.f };
    let eflip = |fl: Flag| Flag { v: fl.v, u: third_vertex(fl), f: fl.f };
    let fflip = |fl: Flag| {
        let (a, b) = faces_of_edge(fl.v, fl.u);
        Flag { v: fl.v, u: fl.u, f: if fl.f == a { b } else { a } }
    };

    // Dart 3i+t: t = 0 vertex-flip (attach), 1 edge-flip (corner arc),
    // 2 face-flip (band side).
    let n = 72;
    let mut alpha = vec![0usize; n];
    let mut sigma = vec![0usize; n];
    let mut sigma_inv = vec![0usize; n];
    for (i, &fl) in flags.iter().enumerate() {
        let targets = [vflip(fl), eflip(fl), fflip(fl)];
        for (t, tg) in targets.iter().enumerate() {
            let j = flag_index[&(tg.v, tg.u, tg.f)];
            alpha[3 * i + t] = 3 * j + t;
        }
        if flag_positive(fl) {
            sigma[3 * i] = 3 * i + 1;
            sigma[3 * i + 1] = 3 * i + 2;
            sigma[3 * i + 2] = 3 * i;
        } else {
            sigma[3 * i] = 3 * i + 2;
            sigma[3 * i + 2] = 3 * i + 1;
            sigma[3 * i + 1] = 3 * i;
        }
    }
    for d in 0..n {
        sigma_inv[sigma[d]] = d;
    }
    let map = CombMap::from_raw(sigma, sigma_inv, alpha);

    let mut sc = SphereComplex::from_parts(
        map,
        vec![usize::MAX; n],
        (0..n)
            .map(|d| match d % 3 {
                0 => EdgeKind::Attach,
                1 => EdgeKind::FaceArc { corner: flags[d / 3].v },
                _ => EdgeKind::BandSide,
            })
            .collect(),
    );

    // Classify face orbits into cells by their dart types.
    let (reps, fidx) = sc.map().face_orbits();
    let mut cell_of_orbit: Vec<CellId> = Vec::with_capacity(reps.len());
    for &rep in &reps {
        let walk = sc.map().face_darts(rep);
        let mut has = [false; 3];
        for &d in &walk {
            has[d % 3] = true;
        }
        let fl = flags[walk[0] / 3];
        let tag = match (has[0], has[1], has[2]) {
            (true, true, false) => CellTag::Disc { anchor: Some(fl.f) },
            (true, false, true) => CellTag::Band,
            (false, true, true) => CellTag::Region { orient: Orient::In, h3: false },
            other => panic!("unexpected orbit content {other:?}"),
        };
        cell_of_orbit.push(sc.new_cell(tag));
    }
    for d in 0..n {
        sc.set_cell_of(d, cell_of_orbit[fidx[d]]);
    }
    sc.well_formed().expect("tetra pattern must validate");
    sc
}

impl SphereComplex {
    pub(crate) fn from_parts(map: CombMap, cell_of: Vec<usize>, kind: Vec<EdgeKind>) -> Self {
        let mut sc = SphereComplex::default();
        sc.replace_parts(map, cell_of, kind);
        sc
    }

    /// The disc anchored at tetrahedron face `f`, if present.
    pub fn disc_for_face(&self, f: u8) -> Option<CellId> {
        self.live_cells().find(|&c| self.cell_tag(c) == CellTag::Disc { anchor: Some(f) })
    }

    /// The region whose corner arcs are anchored at tetrahedron vertex `v`
    /// (only meaningful on unsplit patterns).
    pub fn region_for_vertex(&self, v: u8) -> Option<CellId> {
        for d in self.map().darts() {
            if let EdgeKind::FaceArc { corner } = self.kind(d) {
                if corner == v {
                    let c = self.cell_of(d);
                    if self.cell_tag(c).is_region() {
                        return Some(c);
                    }
                    let o = self.other_cell(d);
                    if self.cell_tag(o).is_region() {
                        return Some(o);
                    }
                }
            }
        }
        None
    }

    /// Removes one band; its footprint joins the flanking regions, which must
    /// already agree in orientation (caller's guard). Attach edges become
    /// unanchored free boundary.
    pub fn remove_band(&mut self, band: CellId) -> Result<(), SurfaceError> {
        if !self.cell_tag(band).is_band() {
            return Err(SurfaceError::BadCell(format!("cell {band} is not a band")));
        }
        let rep = self
            .map()
            .darts()
            .find(|&d| self.cell_of(d) == band)
            .ok_or_else(|| SurfaceError::BadCell("band has no darts".into()))?;
        let walk = self.map().face_darts(rep);
        let mut regions: Vec<CellId> = Vec::new();
        let mut side_edges = Vec::new();
        let mut attach_edges = Vec::new();
        for &d in &walk {
            match self.kind(d) {
                EdgeKind::BandSide => {
                    regions.push(self.other_cell(d));
                    side_edges.push(d);
                }
                EdgeKind::Attach => attach_edges.push(d),
                k => return Err(SurfaceError::BadCell(format!("band edge kind {k:?}"))),
            }
        }
        regions.sort_unstable();
        regions.dedup();
        let target = regions[0];
        for &d in &side_edges {
            self.map_mut().delete_edge(d);
        }
        for &d in &attach_edges {
            self.set_kind(d, EdgeKind::FaceGap);
            self.set_cell_of(d, target);
        }
        for r in regions.iter().skip(1) {
            self.merge_cell_into(*r, target);
        }
        self.merge_cell_into(band, target);
        Ok(())
    }

    /// Removes a disc together with the bands abutting it (the drag rule).
    pub fn remove_disc_with_bands(&mut self, disc: CellId) -> Result<(), SurfaceError> {
        if !self.cell_tag(disc).is_disc() {
            return Err(SurfaceError::BadCell(format!("cell {disc} is not a disc")));
        }
        loop {
            let attach = self
                .map()
                .darts()
                .find(|&d| self.cell_of(d) == disc && self.kind(d) == EdgeKind::Attach);
            match attach {
                Some(d) => {
                    let band = self.other_cell(d);
                    self.remove_band(band)?;
                }
                None => break,
            }
        }
        // Now every edge of the disc borders a region; erase the disc.
        let mut regions = Vec::new();
        let edges: Vec<usize> = self
            .map()
            .darts()
            .filter(|&d| self.cell_of(d) == disc)
            .collect();
        for &d in &edges {
            regions.push(self.other_cell(d));
        }
        regions.sort_unstable();
        regions.dedup();
        for &d in &edges {
            if self.map().is_alive(d) {
                self.map_mut().delete_edge(d);
            }
        }
        let target = regions[0];
        for r in regions.iter().skip(1) {
            self.merge_cell_into(*r, target);
        }
        self.merge_cell_into(disc, target);
        Ok(())
    }

    pub fn set_region_orient(&mut self, region: CellId, orient: Orient) {
        match self.cell_tag(region) {
            CellTag::Region { h3, .. } => self.set_cell_tag(region, CellTag::Region { orient, h3 }),
            _ => panic!("cell {region} is not a region"),
        }
    }

    pub fn set_region_h3(&mut self, region: CellId, h3: bool) {
        match self.cell_tag(region) {
            CellTag::Region { orient, .. } => self.set_cell_tag(region, CellTag::Region { orient, h3 }),
            _ => panic!("cell {region} is not a region"),
        }
    }

    /// Ordered list of live region cells.
    pub fn regions(&self) -> Vec<CellId> {
        self.live_cells().filter(|&c| self.cell_tag(c).is_region()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_pattern_shape() {
        let sc = tetra_pattern();
        let discs: Vec<_> = sc.live_cells().filter(|&c| sc.cell_tag(c).is_disc()).collect();
        let bands: Vec<_> = sc.live_cells().filter(|&c| sc.cell_tag(c).is_band()).collect();
        let regions = sc.regions();
        assert_eq!(discs.len(), 4);
        assert_eq!(bands.len(), 6);
        assert_eq!(regions.len(), 4);
        for f in 0..4 {
            let d = sc.disc_for_face(f).unwrap();
            assert_eq!(sc.disc_valence(d), 3);
            assert_eq!(sc.disc_index(d), 1);
        }
        let comps = sc.f_components();
        assert_eq!(comps.len(), 1);
        let c = &comps[0];
        assert_eq!(c.discs.len(), 4);
        assert_eq!(c.bands.len(), 6);
        assert_eq!(c.boundary_circles, 4);
        assert_eq!(c.gamma_touches, 0);
        assert_eq!(c.index, 4);
        // Complexity triple (7, 4, 4).
        let counts = c.counts(0);
        assert_eq!(counts.triple(), crate::complexity::ComplexityTriple::new(7, 4, 4));
    }

    #[test]
    fn remove_one_band() {
        let mut sc = tetra_pattern();
        let band = sc.live_cells().find(|&c| sc.cell_tag(c).is_band()).unwrap();
        sc.remove_band(band).unwrap();
        sc.normalize();
        sc.well_formed().unwrap();
        let comps = sc.f_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].bands.len(), 5);
        assert_eq!(sc.regions().len(), 3);
    }

    #[test]
    fn remove_disc_drags_bands() {
        let mut sc = tetra_pattern();
        let disc = sc.disc_for_face(0).unwrap();
        sc.remove_disc_with_bands(disc).unwrap();
        sc.normalize();
        sc.well_formed().unwrap();
        let comps = sc.f_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].discs.len(), 3);
        assert_eq!(comps[0].bands.len(), 3);
    }

    #[test]
    fn remove_everything_leaves_empty_sphere() {
        let mut sc = tetra_pattern();
        for f in 0..4 {
            if let Some(d) = sc.disc_for_face(f) {
                sc.remove_disc_with_bands(d).unwrap();
            }
        }
        sc.normalize();
        sc.well_formed().unwrap();
        assert_eq!(sc.map().num_darts(), 0);
        assert_eq!(sc.regions().len(), 1);
    }

    #[test]
    fn serialization_round_trip() {
        let mut sc = tetra_pattern();
        sc.compact();
        let text = sc.serialize();
        let back = SphereComplex::parse(&text).unwrap();
        assert_eq!(back.serialize(), text);
    }
}
