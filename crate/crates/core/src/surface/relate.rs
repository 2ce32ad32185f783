//! Structural relations between a parent sphere complex and the spheres of a
//! state derived from it: the respects discipline and the trivial
//! modification predicate.

use super::split::Provenance;
use super::{CellId, SphereComplex};
use std::collections::{BTreeMap, BTreeSet};

/// How a child ball's cells sit inside the parent complex.
#[derive(Clone, Debug, Default)]
pub struct Placement {
    pub sources: BTreeMap<CellId, BTreeSet<Provenance>>,
}

impl Placement {
    pub fn identity(sc: &SphereComplex) -> Self {
        let mut sources = BTreeMap::new();
        for c in sc.live_cells() {
            sources.insert(c, BTreeSet::from([Provenance::Parent(c)]));
        }
        Placement { sources }
    }

    pub fn parents_of(&self, c: CellId) -> Vec<CellId> {
        self.sources
            .get(&c)
            .map(|s| {
                s.iter()
                    .filter_map(|p| match p {
                        Provenance::Parent(x) => Some(*x),
                        _ => None,
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// The respects discipline: child discs lie inside single parent discs,
/// child bands inside the attachment surface with at least one vertical band
/// part, child regions outside the parent's attachment surface.
pub fn respects(parent: &SphereComplex, child: &SphereComplex, placement: &Placement) -> bool {
    for c in child.live_cells() {
        let Some(src) = placement.sources.get(&c) else {
            return false;
        };
        let parents: Vec<CellId> = src
            .iter()
            .filter_map(|p| match p {
                Provenance::Parent(x) => Some(*x),
                _ => None,
            })
            .collect();
        if parents.iter().any(|&p| !parent.live(p)) {
            return false;
        }
        let tag = child.cell_tag(c);
        if tag.is_disc() {
            if parents.len() != 1 || !parent.cell_tag(parents[0]).is_disc() {
                return false;
            }
        } else if tag.is_band() {
            if parents.is_empty() || !parents.iter().all(|&p| parent.cell_tag(p).is_f_cell()) {
                return false;
            }
            if !parents.iter().any(|&p| parent.cell_tag(p).is_band()) {
                return false;
            }
        } else if !parents.iter().all(|&p| parent.cell_tag(p).is_region()) {
            return false;
        }
    }
    true
}

struct ChildComponent {
    ball: usize,
    discs: usize,
    bands: usize,
    circles: usize,
    gamma: u64,
    index: i64,
    /// Parent cells, with multiplicity, of every cell in the component.
    parent_cells: Vec<CellId>,
}

fn child_components(balls: &[(&SphereComplex, &Placement)]) -> Vec<ChildComponent> {
    let mut out = Vec::new();
    for (bi, (sc, placement)) in balls.iter().enumerate() {
        for comp in sc.f_components() {
            let mut parent_cells = Vec::new();
            for &c in comp.discs.iter().chain(comp.bands.iter()) {
                parent_cells.extend(placement.parents_of(c));
            }
            parent_cells.sort_unstable();
            out.push(ChildComponent {
                ball: bi,
                discs: comp.discs.len(),
                bands: comp.bands.len(),
                circles: comp.boundary_circles,
                gamma: comp.gamma_touches,
                index: comp.index,
                parent_cells,
            });
        }
    }
    out
}

/// Conditions (i)-(iii) of the trivial-modification relation between one
/// parent 0-handle and the state balls descending from it: positive-index
/// surface components stay inside positive parent components, gathered in a
/// single ball, and every positive parent component is either copied,
/// trimmed by a boundary collar, or realizes the special four-suture-point
/// disc branch.
pub fn is_trivial_modification(
    parent: &SphereComplex,
    balls: &[(&SphereComplex, &Placement)],
) -> bool {
    for (sc, placement) in balls {
        if !respects(parent, sc, placement) {
            return false;
        }
    }
    let parent_comps = parent.f_components();
    let parent_of_cell: BTreeMap<CellId, usize> = parent_comps
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.discs.iter().chain(f.bands.iter()).map(move |&c| (c, i)))
        .collect();
    let children = child_components(balls);

    let mut positive_ball: Option<usize> = None;
    for ch in &children {
        if ch.index <= 0 {
            continue;
        }
        let comps: BTreeSet<usize> = ch.parent_cells.iter().map(|c| parent_of_cell[c]).collect();
        if comps.len() != 1 || parent_comps[*comps.iter().next().unwrap()].index <= 0 {
            return false;
        }
        match positive_ball {
            None => positive_ball = Some(ch.ball),
            Some(b) if b != ch.ball => return false,
            _ => {}
        }
    }

    for (pi, f) in parent_comps.iter().enumerate() {
        if f.index <= 0 {
            continue;
        }
        let mut f_cells: Vec<CellId> = f.discs.iter().chain(f.bands.iter()).copied().collect();
        f_cells.sort_unstable();
        let in_f = |ch: &ChildComponent| {
            ch.parent_cells.iter().all(|c| parent_of_cell.get(c) == Some(&pi))
        };
        let copy = children.iter().any(|ch| {
            in_f(ch)
                && ch.parent_cells == f_cells
                && ch.discs == f.discs.len()
                && ch.bands == f.bands.len()
                && ch.circles == f.boundary_circles
                && ch.gamma == f.gamma_touches
        });
        if copy {
            continue;
        }
        let collar = children.iter().any(|ch| {
            if !in_f(ch) || ch.parent_cells.len() != ch.discs + ch.bands {
                return false;
            }
            let dedup: BTreeSet<CellId> = ch.parent_cells.iter().copied().collect();
            if dedup.len() != ch.parent_cells.len() {
                return false;
            }
            // Whole-handle sub-surface with unchanged index, Euler
            // characteristic, boundary and suture counts: collars removed
            // from suture-free boundary circles.
            let euler = ch.discs as i64 - ch.bands as i64;
            if euler != f.euler
                || ch.index != f.index
                || ch.gamma != f.gamma_touches
                || ch.circles != f.boundary_circles
            {
                return false;
            }
            let removed: Vec<CellId> =
                f_cells.iter().copied().filter(|c| !dedup.contains(c)).collect();
            !removed.is_empty()
                && removed.iter().all(|&c| {
                    !parent.cell_tag(c).is_disc()
                        || (parent.disc_valence(c) == 2 && parent.disc_gamma_hits(c) == 0)
                })
        });
        if collar {
            continue;
        }
        if !final_branch(parent, &parent_comps, pi, balls) {
            return false;
        }
    }
    true
}

/// The special branch: the surface is a single disc component meeting the
/// sutures in four points, two on each of exactly two of its 0-handles, the
/// two suture arcs joining distinct 0-handles; some ball keeps a full copy
/// whose sutures are exactly the two complementary arcs.
fn final_branch(
    parent: &SphereComplex,
    parent_comps: &[super::FComponent],
    pi: usize,
    balls: &[(&SphereComplex, &Placement)],
) -> bool {
    if parent_comps.len() != 1 {
        return false;
    }
    let f = &parent_comps[pi];
    if f.euler != 1 || f.gamma_touches != 4 {
        return false;
    }
    let mut per_disc: BTreeMap<CellId, u64> = BTreeMap::new();
    for (_, disc) in parent.suture_endpoints() {
        *per_disc.entry(disc).or_insert(0) += 1;
    }
    if per_disc.len() != 2 || per_disc.values().any(|&k| k != 2) {
        return false;
    }
    let arcs = parent.suture_arcs();
    if arcs.len() != 2 || arcs.iter().any(|a| a.closed) {
        return false;
    }
    // Both arcs join the two distinct discs: each arc's endpoints lie on
    // different discs.
    let endpoint_discs: Vec<Vec<CellId>> = arcs
        .iter()
        .map(|arc| {
            let first = arc.darts[0];
            let last = parent.map().alpha(*arc.darts.last().unwrap());
            [first, last]
                .iter()
                .filter_map(|&d| {
                    parent
                        .suture_endpoints()
                        .into_iter()
                        .find(|&(v, _)| parent.map().vertex_darts(v).contains(&d))
                        .map(|(_, disc)| disc)
                })
                .collect()
        })
        .collect();
    if endpoint_discs
        .iter()
        .any(|ds| ds.len() != 2 || ds[0] == ds[1])
    {
        return false;
    }
    let mut f_cells: Vec<CellId> = f.discs.iter().chain(f.bands.iter()).copied().collect();
    f_cells.sort_unstable();
    balls.iter().any(|(sc, placement)| {
        let comps = sc.f_components();
        comps.len() == 1 && {
            let ch = &comps[0];
            let mut parents: Vec<CellId> = ch
                .discs
                .iter()
                .chain(ch.bands.iter())
                .flat_map(|&c| placement.parents_of(c))
                .collect();
            parents.sort_unstable();
            parents == f_cells
                && ch.gamma_touches == 4
                && sc.suture_arcs().iter().filter(|a| !a.closed).count() == 2
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::pattern::tetra_pattern;

    #[test]
    fn identity_placement_respects_and_is_trivial() {
        let sc = tetra_pattern();
        let placement = Placement::identity(&sc);
        assert!(respects(&sc, &sc, &placement));
        assert!(is_trivial_modification(&sc, &[(&sc, &placement)]));
    }

    #[test]
    fn removing_positive_component_is_not_trivial() {
        let sc = tetra_pattern();
        // Empty child: the single positive component vanished.
        let empty = SphereComplex::empty(crate::surface::Orient::In);
        let placement = Placement::identity(&empty);
        assert!(!is_trivial_modification(&sc, &[(&empty, &placement)]));
    }

    #[test]
    fn band_in_disc_violates_respects() {
        let sc = tetra_pattern();
        let mut placement = Placement::identity(&sc);
        // Claim a band sits inside a disc.
        let band = sc.live_cells().find(|&c| sc.cell_tag(c).is_band()).unwrap();
        let disc = sc.disc_for_face(0).unwrap();
        placement
            .sources
            .insert(band, BTreeSet::from([Provenance::Parent(disc)]));
        assert!(!respects(&sc, &sc, &placement));
    }
}
