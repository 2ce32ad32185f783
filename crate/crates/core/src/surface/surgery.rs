//! Local simplification surgeries on a sphere complex: the in-place moves
//! the catalog engine applies between decompositions.

use super::map::Dart;
use super::{CellId, EdgeKind, SphereComplex, SurfaceError};

impl SphereComplex {
    /// Replaces a band whose two flanking regions have opposite orientations
    /// with a suture arc joining the two discs it was attached to. The
    /// regions extend over the band's footprint, separated by the new arc.
    pub fn band_to_suture(&mut self, band: CellId) -> Result<(), SurfaceError> {
        if !self.cell_tag(band).is_band() {
            return Err(SurfaceError::BadCell(format!("cell {band} is not a band")));
        }
        let rep = self
            .map()
            .darts()
            .find(|&d| self.cell_of(d) == band)
            .ok_or_else(|| SurfaceError::BadCell("band has no darts".into()))?;
        let walk = self.map().face_darts(rep);
        let attach: Vec<Dart> = walk.iter().copied().filter(|&d| self.kind(d) == EdgeKind::Attach).collect();
        let sides: Vec<Dart> = walk.iter().copied().filter(|&d| self.kind(d) == EdgeKind::BandSide).collect();
        if attach.len() != 2 || sides.len() != 2 {
            return Err(SurfaceError::BadCell(
                "band replacement needs a clean two-sided band".into(),
            ));
        }
        let flank = |s: &Self, d: Dart| s.other_cell(d);
        let (r1, r2) = (flank(self, sides[0]), flank(self, sides[1]));
        let (o1, o2) = (
            self.cell_tag(r1).orient().expect("region"),
            self.cell_tag(r2).orient().expect("region"),
        );
        if r1 == r2 || o1 == o2 {
            return Err(SurfaceError::BadCell(
                "band flanks must be distinct regions of opposite orientation".into(),
            ));
        }

        // Midpoint vertices on the two attach edges.
        let v1 = self.subdivide_plain(attach[0]);
        let v2 = self.subdivide_plain(attach[1]);
        // Suture chord across the band face, spliced into the band-side
        // sectors at both midpoints.
        let (s1, s2) = self.new_edge(EdgeKind::Plain, band, band);
        let corner1 = self.band_side_corner(v1, band);
        let corner2 = self.band_side_corner(v2, band);
        self.map_mut().splice_after(corner1, s1);
        self.map_mut().splice_after(corner2, s2);

        // The band face is now split in two by the chord; identify which
        // half carries which flank, re-cell, then delete the side edges.
        let half1 = self.map().face_darts(s1);
        let half2 = self.map().face_darts(s2);
        let (h1_region, h2_region) = if half1.contains(&sides[0]) {
            (r1, r2)
        } else {
            (r2, r1)
        };
        for &d in &half1 {
            if self.cell_of(d) == band {
                self.set_cell_of(d, h1_region);
            }
        }
        for &d in &half2 {
            if self.cell_of(d) == band {
                self.set_cell_of(d, h2_region);
            }
        }
        for d in [sides[0], sides[1]] {
            self.map_mut().delete_edge(d);
        }
        // The four attach half-edges become free disc boundary.
        for v in [v1, v2] {
            for d in self.map().vertex_darts(v) {
                if self.kind(d) == EdgeKind::Attach {
                    self.set_kind(d, EdgeKind::FaceGap);
                }
            }
        }
        self.kill_cell(band);
        self.normalize();
        self.well_formed()
    }

    /// Splits the edge of `d` at a new midpoint vertex, returning a dart at
    /// the new vertex. Kind and cells are inherited by both halves.
    fn subdivide_plain(&mut self, d: Dart) -> Dart {
        let a = self.map().alpha(d);
        let kind = self.kind(d);
        let (cd, ca) = (self.cell_of(d), self.cell_of(a));
        let (p, q) = self.new_edge(kind, ca, cd);
        self.map_mut().rewire_alpha(d, p);
        self.map_mut().rewire_alpha(q, a);
        self.map_mut().splice_after(p, q);
        p
    }

    /// The dart at vertex `v` after which a splice lands in the sector of the
    /// given cell.
    fn band_side_corner(&self, v: Dart, cell: CellId) -> Dart {
        for d in self.map().vertex_darts(v) {
            if self.cell_of(self.map().alpha(d)) == cell {
                return d;
            }
        }
        panic!("vertex has no sector in cell {cell}");
    }

    /// Removes a disc component of the attachment surface meeting the
    /// sutures in exactly two points, joining the two points by a suture arc
    /// across the footprint. Returns the cells removed.
    pub fn remove_product_disc_component(
        &mut self,
        component_cells: &[CellId],
    ) -> Result<(), SurfaceError> {
        let cells: std::collections::BTreeSet<CellId> = component_cells.iter().copied().collect();
        // Endpoints of the two sutures on this component.
        let endpoints: Vec<Dart> = self
            .suture_endpoints()
            .into_iter()
            .filter(|(_, f)| cells.contains(f))
            .map(|(v, _)| v)
            .collect();
        if endpoints.len() != 2 {
            return Err(SurfaceError::BadCell(format!(
                "product disc removal needs exactly two suture points, found {}",
                endpoints.len()
            )));
        }
        // Walk the boundary circle; between the two endpoints one side's
        // region absorbs the footprint.
        let boundary: Vec<Dart> = self
            .f_boundary_darts()
            .into_iter()
            .filter(|&d| cells.contains(&self.cell_of(d)))
            .collect();
        if boundary.is_empty() {
            return Err(SurfaceError::BadCell("component has no boundary".into()));
        }
        // Side A: the region adjacent to some boundary dart reachable from
        // endpoint 1 without passing endpoint 2. Simpler: the regions seen
        // along the circle change exactly at the two endpoints. Pick any
        // boundary dart; its region is one side.
        let r_a = self.other_cell(boundary[0]);
        let mut r_b = None;
        for &d in &boundary {
            let r = self.other_cell(d);
            if r != r_a {
                r_b = Some(r);
                break;
            }
        }
        let Some(r_b) = r_b else {
            return Err(SurfaceError::BadCell(
                "product disc removal: both sides fall in one region".into(),
            ));
        };
        // Re-cell the footprint into side A, delete internal structure and
        // side-A boundary, keep side-B boundary as the new suture chain.
        for d in self.map().darts().collect::<Vec<_>>() {
            if cells.contains(&self.cell_of(d)) {
                self.set_cell_of(d, r_a);
            }
        }
        for d in self.map().darts().collect::<Vec<_>>() {
            if !self.map().is_alive(d) || d > self.map().alpha(d) {
                continue;
            }
            let (c1, c2) = (self.cell_of(d), self.other_cell(d));
            if c1 == r_a && c2 == r_a {
                self.map_mut().delete_edge(d);
            } else if (c1 == r_a && c2 == r_b) || (c1 == r_b && c2 == r_a) {
                self.set_kind(d, EdgeKind::Plain);
            }
        }
        for &c in &cells {
            self.kill_cell(c);
        }
        self.normalize();
        self.well_formed()
    }

    /// Merges a suture-free valence-two disc and its two distinct bands into
    /// a single band.
    pub fn merge_valence_two_disc(&mut self, disc: CellId) -> Result<(), SurfaceError> {
        if !self.cell_tag(disc).is_disc() {
            return Err(SurfaceError::BadCell(format!("cell {disc} is not a disc")));
        }
        if self.disc_gamma_hits(disc) != 0 || self.disc_valence(disc) != 2 {
            return Err(SurfaceError::BadCell(
                "merge needs a suture-free valence-two disc".into(),
            ));
        }
        let attach: Vec<Dart> = self
            .map()
            .darts()
            .filter(|&d| self.cell_of(d) == disc && self.kind(d) == EdgeKind::Attach)
            .collect();
        let bands: Vec<CellId> = attach.iter().map(|&d| self.other_cell(d)).collect();
        if bands[0] == bands[1] {
            return Err(SurfaceError::BadCell(
                "disc abuts the same band twice".into(),
            ));
        }
        let target = bands[0].min(bands[1]);
        let other = bands[0].max(bands[1]);
        // Disc free arcs become band sides.
        for d in self.map().darts().collect::<Vec<_>>() {
            if self.cell_of(d) == disc && self.kind(d).is_disc_boundary() {
                self.set_kind(d, EdgeKind::BandSide);
            }
        }
        // Attach edges between the disc and its bands become internal seams.
        for &d in &attach {
            self.map_mut().delete_edge(d);
        }
        self.merge_cell_into(other, target);
        self.merge_cell_into(disc, target);
        self.normalize();
        self.well_formed()
    }
}

#[cfg(test)]
mod tests {
    use super::super::pattern::tetra_pattern;
    use super::super::{CellTag, Orient};

    #[test]
    fn band_to_suture_basic() {
        let mut sc = tetra_pattern();
        // Make the two flanks of some band disagree.
        let band = sc.live_cells().find(|&c| sc.cell_tag(c).is_band()).unwrap();
        let flanks: Vec<_> = sc
            .map()
            .darts()
            .filter(|&d| sc.cell_of(d) == band && sc.kind(d) == super::super::EdgeKind::BandSide)
            .map(|d| sc.other_cell(d))
            .collect();
        sc.set_region_orient(flanks[0], Orient::In);
        sc.set_region_orient(flanks[1], Orient::Out);
        let before_bands = sc.live_cells().filter(|&c| sc.cell_tag(c).is_band()).count();
        sc.band_to_suture(band).unwrap();
        let after_bands = sc.live_cells().filter(|&c| sc.cell_tag(c).is_band()).count();
        assert_eq!(after_bands, before_bands - 1);
        // One open suture arc appeared, with endpoints on two discs.
        let arcs = sc.suture_arcs();
        assert_eq!(arcs.len(), 1);
        assert!(!arcs[0].closed);
        assert_eq!(sc.suture_endpoints().len(), 2);
        // Each of its two endpoint discs gained one suture hit.
        let hits: u64 = sc
            .live_cells()
            .filter(|&c| sc.cell_tag(c).is_disc())
            .map(|c| sc.disc_gamma_hits(c))
            .sum();
        assert_eq!(hits, 2);
    }

    #[test]
    fn merge_valence_two() {
        // Build a valence-2 disc by removing a band from the pattern, which
        // leaves two discs of valence 2.
        let mut sc = tetra_pattern();
        let band = sc.live_cells().find(|&c| sc.cell_tag(c).is_band()).unwrap();
        sc.remove_band(band).unwrap();
        sc.normalize();
        let disc = sc
            .live_cells()
            .find(|&c| sc.cell_tag(c).is_disc() && sc.disc_valence(c) == 2)
            .expect("valence-2 disc");
        let before: Vec<usize> = vec![
            sc.live_cells().filter(|&c| sc.cell_tag(c).is_disc()).count(),
            sc.live_cells().filter(|&c| sc.cell_tag(c).is_band()).count(),
        ];
        sc.merge_valence_two_disc(disc).unwrap();
        let after: Vec<usize> = vec![
            sc.live_cells().filter(|&c| sc.cell_tag(c).is_disc()).count(),
            sc.live_cells().filter(|&c| sc.cell_tag(c).is_band()).count(),
        ];
        assert_eq!(after[0], before[0] - 1);
        assert_eq!(after[1], before[1] - 1);
        // The component's C1 dropped by one; its index is unchanged
        // (it was 2 after the band removal: -2*(-1) + 0).
        let comps = sc.f_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].index, 2);
    }

    #[test]
    fn product_disc_removal() {
        // Hand-built fixture: a lone disc V whose boundary carries two
        // suture endpoints, the suture crossing the complementary disc once:
        // a product disc. Vertices e1, e2; edges arcA (V|rA), arcB (V|rB),
        // suture s (rA|rB).
        use super::super::map::CombMap;
        use super::super::{EdgeKind, SphereComplex};
        let mut built = None;
        'search: for flip1 in 0..2 {
            for flip2 in 0..2 {
                // darts: 0,1 = arcA; 2,3 = arcB; 4,5 = suture.
                let alpha = vec![1, 0, 3, 2, 5, 4];
                // vertex e1: darts 0 (arcA out), 2 (arcB out), 4 (s out)
                // vertex e2: darts 1, 3, 5.
                let mk = |order: &[usize]| -> (Vec<usize>, Vec<usize>) {
                    let mut sigma = vec![0; 6];
                    let mut sigma_inv = vec![0; 6];
                    for k in 0..order.len() {
                        let a = order[k];
                        let b = order[(k + 1) % order.len()];
                        sigma[a] = b;
                        sigma_inv[b] = a;
                    }
                    (sigma, sigma_inv)
                };
                let o1: Vec<usize> = if flip1 == 0 { vec![0, 2, 4] } else { vec![0, 4, 2] };
                let o2: Vec<usize> = if flip2 == 0 { vec![1, 3, 5] } else { vec![1, 5, 3] };
                let (s1, si1) = mk(&o1);
                let (s2, si2) = mk(&o2);
                let sigma: Vec<usize> = (0..6)
                    .map(|d| if o1.contains(&d) { s1[d] } else { s2[d] })
                    .collect();
                let sigma_inv: Vec<usize> = (0..6)
                    .map(|d| if o1.contains(&d) { si1[d] } else { si2[d] })
                    .collect();
                let map = CombMap::from_raw(sigma, sigma_inv, alpha);
                if map.check().is_err() {
                    continue;
                }
                let mut sc = SphereComplex::from_parts(
                    map,
                    vec![usize::MAX; 6],
                    vec![
                        EdgeKind::FaceGap,
                        EdgeKind::FaceGap,
                        EdgeKind::FaceGap,
                        EdgeKind::FaceGap,
                        EdgeKind::Plain,
                        EdgeKind::Plain,
                    ],
                );
                let v = sc.new_cell(CellTag::Disc { anchor: None });
                let ra = sc.new_cell(CellTag::Region { orient: Orient::In, h3: false });
                let rb = sc.new_cell(CellTag::Region { orient: Orient::Out, h3: false });
                // Assign cells by face orbits: the face {0-or-1 with 2-or-3}
                // of length 2 is V; the suture-bearing faces are regions.
                let (reps, fidx) = sc.map().face_orbits();
                let mut ok = true;
                let mut face_cells = vec![usize::MAX; reps.len()];
                for (i, &rep) in reps.iter().enumerate() {
                    let walk = sc.map().face_darts(rep);
                    let has_s = walk.iter().any(|&d| d >= 4);
                    if !has_s && walk.len() == 2 {
                        face_cells[i] = v;
                    } else if has_s {
                        face_cells[i] = usize::MAX; // decide below
                    } else {
                        ok = false;
                    }
                }
                if !ok || face_cells.iter().filter(|&&c| c == v).count() != 1 {
                    continue;
                }
                let mut region_faces: Vec<usize> = (0..reps.len()).filter(|&i| face_cells[i] == usize::MAX).collect();
                if region_faces.len() != 2 {
                    continue;
                }
                face_cells[region_faces.remove(0)] = ra;
                face_cells[region_faces.remove(0)] = rb;
                for d in 0..6 {
                    sc.set_cell_of(d, face_cells[fidx[d]]);
                }
                if sc.well_formed().is_ok() {
                    built = Some((sc, v));
                    break 'search;
                }
            }
        }
        let (mut sc, v) = built.expect("product disc fixture must assemble");
        assert_eq!(sc.disc_gamma_hits(v), 2);
        assert_eq!(sc.disc_index(v), 0);
        sc.remove_product_disc_component(&[v]).unwrap();
        // The footprint is gone; the suture closed up into a circle.
        assert_eq!(sc.f_components().len(), 0);
        let arcs = sc.suture_arcs();
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].closed);
    }
}
