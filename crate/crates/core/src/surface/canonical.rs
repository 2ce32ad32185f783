//! Canonical forms for labeled sphere complexes and lists of them.
//!
//! Keys are equal exactly when the structures are isomorphic as labeled
//! combinatorial maps (orientation-preserving, respecting cell tags and edge
//! kinds). Each connected component is encoded by a breadth-first traversal
//! from every possible start dart, keeping the lexicographically least
//! stream. Cells may span components (nested islands share regions), so the
//! cross-component identifications are encoded separately and the component
//! order is minimized jointly where local streams tie.

use super::map::Dart;
use super::{CellId, CellTag, EdgeKind, Orient, SphereComplex};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    /// Compare cell tags and edge classes only.
    Tags,
    /// Additionally compare face/corner anchors and scar pairings.
    Anchored,
}

fn kind_code(k: EdgeKind, mode: LabelMode) -> u32 {
    match mode {
        LabelMode::Tags => match k {
            EdgeKind::Attach => 0,
            EdgeKind::BandSide => 1,
            EdgeKind::FaceArc { .. } | EdgeKind::FaceGap | EdgeKind::Scar { .. } => 2,
            EdgeKind::Plain => 3,
        },
        LabelMode::Anchored => match k {
            EdgeKind::Attach => 0,
            EdgeKind::BandSide => 1,
            EdgeKind::FaceArc { corner } => 10 + corner as u32,
            EdgeKind::FaceGap => 2,
            EdgeKind::Scar { .. } => 3,
            EdgeKind::Plain => 4,
        },
    }
}

fn tag_code(t: CellTag, mode: LabelMode) -> u32 {
    match t {
        CellTag::Disc { anchor } => match (mode, anchor) {
            (LabelMode::Anchored, Some(f)) => 10 + f as u32,
            _ => 0,
        },
        CellTag::Band => 1,
        CellTag::Region { orient, h3 } => {
            20 + 2 * (h3 as u32) + if orient == Orient::Out { 1 } else { 0 }
        }
    }
}

/// One component's canonical stream from a given start dart, with the
/// discovery order it induces.
#[derive(Clone)]
pub(crate) struct Stream {
    tokens: Vec<u32>,
    order: Vec<Dart>,
    /// Distinct cell ids in local first-appearance order.
    cells_seen: Vec<CellId>,
    /// Distinct scar ids in local first-appearance order (Anchored mode).
    scars_seen: Vec<u32>,
}

type ExtraLabel<'a> = Option<&'a dyn Fn(Dart) -> u32>;

fn encode_component(sc: &SphereComplex, start: Dart, mode: LabelMode, extra: ExtraLabel) -> Stream {
    let mut num: BTreeMap<Dart, u32> = BTreeMap::new();
    let mut order: Vec<Dart> = Vec::new();
    fn push(d: Dart, num: &mut BTreeMap<Dart, u32>, order: &mut Vec<Dart>) -> u32 {
        if let Some(&k) = num.get(&d) {
            return k;
        }
        let k = order.len() as u32;
        num.insert(d, k);
        order.push(d);
        k
    }
    push(start, &mut num, &mut order);
    let mut tokens = Vec::new();
    let mut cells_seen: Vec<CellId> = Vec::new();
    let mut cell_ord: BTreeMap<CellId, u32> = BTreeMap::new();
    let mut scars_seen: Vec<u32> = Vec::new();
    let mut scar_ord: BTreeMap<u32, u32> = BTreeMap::new();
    let mut i = 0usize;
    while i < order.len() {
        let d = order[i];
        let s = push(sc.map().sigma(d), &mut num, &mut order);
        let a = push(sc.map().alpha(d), &mut num, &mut order);
        tokens.push(s);
        tokens.push(a);
        tokens.push(kind_code(sc.kind(d), mode));
        if let Some(f) = extra {
            tokens.push(f(d));
        }
        if mode == LabelMode::Anchored {
            if let EdgeKind::Scar { id } = sc.kind(d) {
                let next = scars_seen.len() as u32;
                let ord = *scar_ord.entry(id).or_insert_with(|| {
                    scars_seen.push(id);
                    next
                });
                tokens.push(ord);
            }
        }
        let c = sc.cell_of(d);
        let next = cells_seen.len() as u32;
        let ord = *cell_ord.entry(c).or_insert_with(|| {
            cells_seen.push(c);
            next
        });
        tokens.push(ord);
        i += 1;
    }
    // Cell tag table in local ordinal order.
    for &c in &cells_seen {
        tokens.push(tag_code(sc.cell_tag(c), mode));
    }
    Stream { tokens, order, cells_seen, scars_seen }
}

struct ComponentCanon {
    tokens: Vec<u32>,
    /// All streams achieving the minimum (automorphic starts).
    best: Vec<Stream>,
}

fn canonical_component(
    sc: &SphereComplex,
    darts: &[Dart],
    mode: LabelMode,
    extra: ExtraLabel,
) -> ComponentCanon {
    let mut best: Option<Vec<u32>> = None;
    let mut streams = Vec::new();
    for &d in darts {
        let s = encode_component(sc, d, mode, extra);
        match &best {
            None => {
                best = Some(s.tokens.clone());
                streams = vec![s];
            }
            Some(b) => match s.tokens.cmp(b) {
                std::cmp::Ordering::Less => {
                    best = Some(s.tokens.clone());
                    streams = vec![s];
                }
                std::cmp::Ordering::Equal => streams.push(s),
                std::cmp::Ordering::Greater => {}
            },
        }
    }
    ComponentCanon { tokens: best.unwrap_or_default(), best: streams }
}

/// A sphere complex as canonical component streams plus the minimized
/// encoding of cross-component cell/scar identifications.
#[derive(Clone)]
pub(crate) struct SphereCanon {
    comp_tokens: Vec<Vec<u32>>,
    glue_tokens: Vec<u32>,
    /// One witness choice realizing the minimum, in component order.
    witness: Vec<Stream>,
    empty_region: Option<u32>,
}

fn canonical_sphere(sc: &SphereComplex, mode: LabelMode, extra: ExtraLabel) -> SphereCanon {
    if sc.map().num_darts() == 0 {
        let region = sc.regions()[0];
        return SphereCanon {
            comp_tokens: Vec::new(),
            glue_tokens: Vec::new(),
            witness: Vec::new(),
            empty_region: Some(tag_code(sc.cell_tag(region), mode)),
        };
    }
    let (ncomp, comp_of) = sc.map().components();
    let mut comp_darts: Vec<Vec<Dart>> = vec![Vec::new(); ncomp];
    for d in sc.map().darts() {
        comp_darts[comp_of[d]].push(d);
    }
    let canons: Vec<ComponentCanon> = comp_darts
        .iter()
        .map(|darts| canonical_component(sc, darts, mode, extra))
        .collect();
    let mut idx: Vec<usize> = (0..ncomp).collect();
    idx.sort_by(|&a, &b| canons[a].tokens.cmp(&canons[b].tokens));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        if let Some(last) = groups.last_mut() {
            if canons[last[0]].tokens == canons[i].tokens {
                last.push(i);
                continue;
            }
        }
        groups.push(vec![i]);
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();
    let mut best_glue: Option<Vec<u32>> = None;
    let mut best_witness: Vec<Stream> = Vec::new();
    let mut choice: Vec<usize> = vec![0; groups.len()];
    loop {
        let comp_order: Vec<usize> = choice
            .iter()
            .zip(group_perms.iter())
            .flat_map(|(&c, perms)| perms[c].iter().copied())
            .collect();
        let start_counts: Vec<usize> = comp_order.iter().map(|&c| canons[c].best.len()).collect();
        let mut starts = vec![0usize; comp_order.len()];
        'starts: loop {
            let witness: Vec<&Stream> = comp_order
                .iter()
                .zip(starts.iter())
                .map(|(&c, &s)| &canons[c].best[s])
                .collect();
            let glue = glue_encoding(&witness);
            if best_glue.as_ref().is_none_or(|b| glue < *b) {
                best_glue = Some(glue);
                best_witness = witness.into_iter().cloned().collect();
            }
            let mut k = 0;
            loop {
                if k == starts.len() {
                    break 'starts;
                }
                starts[k] += 1;
                if starts[k] < start_counts[k] {
                    break;
                }
                starts[k] = 0;
                k += 1;
            }
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return SphereCanon {
                    comp_tokens: idx.iter().map(|&i| canons[i].tokens.clone()).collect(),
                    glue_tokens: best_glue.unwrap_or_default(),
                    witness: best_witness,
                    empty_region: None,
                };
            }
            choice[k] += 1;
            if choice[k] < group_perms[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Global first-appearance numbering of cells and scars over the witness
/// streams: encodes which local ordinals are identified.
fn glue_encoding(witness: &[&Stream]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut global_cell: BTreeMap<CellId, u32> = BTreeMap::new();
    for s in witness {
        for &c in &s.cells_seen {
            let next = global_cell.len() as u32;
            let g = *global_cell.entry(c).or_insert(next);
            out.push(g);
        }
        out.push(u32::MAX);
    }
    let mut global_scar: BTreeMap<u32, u32> = BTreeMap::new();
    for s in witness {
        for &id in &s.scars_seen {
            let next = global_scar.len() as u32;
            let g = *global_scar.entry(id).or_insert(next);
            out.push(g);
        }
        out.push(u32::MAX);
    }
    out
}

/// Canonical key of one sphere complex.
pub fn canonical_key(sc: &SphereComplex, mode: LabelMode) -> Vec<u8> {
    canonical_key_multi(std::slice::from_ref(sc), mode)
}

/// Canonical key with an extra per-dart label mixed into the encoding (used
/// to canonicalize curve overlays, where chord darts carry curve data).
pub fn canonical_key_with(sc: &SphereComplex, mode: LabelMode, extra: &dyn Fn(Dart) -> u32) -> Vec<u8> {
    let canon = canonical_sphere(sc, mode, Some(extra));
    let mut tokens = Vec::new();
    for ct in &canon.comp_tokens {
        tokens.push(0xfffc_0000u32);
        tokens.extend_from_slice(ct);
    }
    tokens.push(0xfffb_0000);
    tokens.extend_from_slice(&canon.glue_tokens);
    if let Some(t) = canon.empty_region {
        tokens.push(0xfffd_0000);
        tokens.push(t);
    }
    let mut bytes = Vec::with_capacity(tokens.len() * 4);
    for t in tokens {
        bytes.extend_from_slice(&t.to_be_bytes());
    }
    bytes
}

/// Canonical key of an order-insensitive list of sphere complexes that may
/// share scar pairings (the balls of one engine state).
pub fn canonical_key_multi(spheres: &[SphereComplex], mode: LabelMode) -> Vec<u8> {
    let canons: Vec<SphereCanon> = spheres.iter().map(|s| canonical_sphere(s, mode, None)).collect();
    let refs: Vec<&SphereCanon> = canons.iter().collect();
    assemble_multi_key(&refs, mode)
}

fn assemble_multi_key(canons: &[&SphereCanon], mode: LabelMode) -> Vec<u8> {
    assemble_multi(canons, mode).0
}

/// The canonical bytes plus the winning sphere order realizing them.
fn assemble_multi(canons: &[&SphereCanon], mode: LabelMode) -> (Vec<u8>, Vec<usize>) {
    let _ = mode;
    let mut order: Vec<usize> = (0..canons.len()).collect();
    order.sort_by(|&a, &b| sphere_sort_key(canons[a]).cmp(&sphere_sort_key(canons[b])));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        if let Some(last) = groups.last_mut() {
            if sphere_sort_key(canons[last[0]]) == sphere_sort_key(canons[i]) {
                last.push(i);
                continue;
            }
        }
        groups.push(vec![i]);
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g)).collect();
    let mut choice = vec![0usize; groups.len()];
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    loop {
        let sphere_order: Vec<usize> = choice
            .iter()
            .zip(group_perms.iter())
            .flat_map(|(&c, perms)| perms[c].iter().copied())
            .collect();
        let mut tokens: Vec<u32> = Vec::new();
        let mut global_scar: BTreeMap<u32, u32> = BTreeMap::new();
        for &si in &sphere_order {
            tokens.push(0xfffe_0000);
            if let Some(t) = canons[si].empty_region {
                tokens.push(0xfffd_0000);
                tokens.push(t);
                continue;
            }
            for ct in &canons[si].comp_tokens {
                tokens.push(0xfffc_0000);
                tokens.extend_from_slice(ct);
            }
            tokens.push(0xfffb_0000);
            tokens.extend_from_slice(&canons[si].glue_tokens);
            for s in &canons[si].witness {
                for &id in &s.scars_seen {
                    let next = global_scar.len() as u32;
                    let g = *global_scar.entry(id).or_insert(next);
                    tokens.push(g);
                }
            }
        }
        if best.as_ref().is_none_or(|(b, _)| tokens < *b) {
            best = Some((tokens, sphere_order.clone()));
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                let (toks, win) = best.unwrap_or_default();
                let mut bytes = Vec::with_capacity(toks.len() * 4);
                for t in toks {
                    bytes.extend_from_slice(&t.to_be_bytes());
                }
                return (bytes, win);
            }
            choice[k] += 1;
            if choice[k] < group_perms[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Cached per-sphere canonical data, keyed by the exact serialization.
/// Engine children share ball objects heavily, so this collapses the cost of
/// keying large batches of configs.
fn canonical_sphere_cached(sc: &SphereComplex, mode: LabelMode) -> std::sync::Arc<SphereCanon> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<(String, bool), Arc<SphereCanon>>>> = OnceLock::new();
    let key = (sc.serialize(), mode == LabelMode::Anchored);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let value = Arc::new(canonical_sphere(sc, mode, None));
    cache.lock().unwrap().insert(key, value.clone());
    value
}

/// Cache-backed canonical key of a list of sphere complexes.
pub fn canonical_key_multi_cached(spheres: &[SphereComplex], mode: LabelMode) -> Vec<u8> {
    let refs: Vec<&SphereComplex> = spheres.iter().collect();
    canonical_key_multi_cached_refs(&refs, mode)
}

/// As `canonical_key_multi_cached`, over references.
pub fn canonical_key_multi_cached_refs(spheres: &[&SphereComplex], mode: LabelMode) -> Vec<u8> {
    let canons: Vec<std::sync::Arc<SphereCanon>> =
        spheres.iter().map(|s| canonical_sphere_cached(s, mode)).collect();
    let refs: Vec<&SphereCanon> = canons.iter().map(|a| a.as_ref()).collect();
    assemble_multi_key(&refs, mode)
}

fn sphere_sort_key(c: &SphereCanon) -> Vec<u32> {
    let mut key = Vec::new();
    match c.empty_region {
        Some(t) => {
            key.push(0);
            key.push(t);
        }
        None => {
            key.push(1);
            for ct in &c.comp_tokens {
                key.push(u32::MAX);
                key.extend_from_slice(ct);
            }
            key.push(u32::MAX - 1);
            key.extend_from_slice(&c.glue_tokens);
        }
    }
    key
}

/// Relabels a sphere complex into its canonical numbering, so isomorphic
/// inputs serialize identically.
pub fn canonicalize(sc: &SphereComplex, mode: LabelMode) -> SphereComplex {
    if sc.map().num_darts() == 0 {
        let mut out = sc.clone();
        out.compact();
        return out;
    }
    let canon = canonical_sphere(sc, mode, None);
    let mut dart_new: BTreeMap<Dart, usize> = BTreeMap::new();
    let mut offset = 0usize;
    for s in &canon.witness {
        for (i, &d) in s.order.iter().enumerate() {
            dart_new.insert(d, offset + i);
        }
        offset += s.order.len();
    }
    let n = offset;
    let mut sigma = vec![0usize; n];
    let mut sigma_inv = vec![0usize; n];
    let mut alpha = vec![0usize; n];
    let mut kind = vec![EdgeKind::Plain; n];
    let mut cell_old = vec![usize::MAX; n];
    for (&d, &nd) in &dart_new {
        sigma[nd] = dart_new[&sc.map().sigma(d)];
        alpha[nd] = dart_new[&sc.map().alpha(d)];
        kind[nd] = sc.kind(d);
        cell_old[nd] = sc.cell_of(d);
    }
    for d in 0..n {
        sigma_inv[sigma[d]] = d;
    }
    let mut out = SphereComplex::from_parts(
        super::map::CombMap::from_raw(sigma, sigma_inv, alpha),
        vec![usize::MAX; n],
        kind,
    );
    let mut cell_map: BTreeMap<CellId, CellId> = BTreeMap::new();
    for d in 0..n {
        let old = cell_old[d];
        let newc = match cell_map.get(&old) {
            Some(&c) => c,
            None => {
                let c = out.new_cell(sc.cell_tag(old));
                cell_map.insert(old, c);
                c
            }
        };
        out.set_cell_of(d, newc);
    }
    let mut scar_map: BTreeMap<u32, u32> = BTreeMap::new();
    for d in 0..n {
        if let EdgeKind::Scar { id } = out.kind(d) {
            let next = scar_map.len() as u32;
            let new_id = *scar_map.entry(id).or_insert(next);
            out.set_kind(d, EdgeKind::Scar { id: new_id });
        }
    }
    out
}

/// Rebuilds one sphere from a witness stream choice with externally managed
/// cell/scar maps.
fn rebuild_from_witness(
    sc: &SphereComplex,
    witness: &[Stream],
    scar_map: &mut BTreeMap<u32, u32>,
    next_scar: &mut u32,
) -> SphereComplex {
    let mut dart_new: BTreeMap<Dart, usize> = BTreeMap::new();
    let mut offset = 0usize;
    for s in witness {
        for (i, &d) in s.order.iter().enumerate() {
            dart_new.insert(d, offset + i);
        }
        offset += s.order.len();
    }
    let n = offset;
    let mut sigma = vec![0usize; n];
    let mut sigma_inv = vec![0usize; n];
    let mut alpha = vec![0usize; n];
    let mut kind = vec![EdgeKind::Plain; n];
    let mut cell_old = vec![usize::MAX; n];
    for (&d, &nd) in &dart_new {
        sigma[nd] = dart_new[&sc.map().sigma(d)];
        alpha[nd] = dart_new[&sc.map().alpha(d)];
        kind[nd] = sc.kind(d);
        cell_old[nd] = sc.cell_of(d);
    }
    for d in 0..n {
        sigma_inv[sigma[d]] = d;
    }
    let mut out = SphereComplex::from_parts(
        super::map::CombMap::from_raw(sigma, sigma_inv, alpha),
        vec![usize::MAX; n],
        kind,
    );
    let mut cell_map: BTreeMap<CellId, CellId> = BTreeMap::new();
    for d in 0..n {
        let old = cell_old[d];
        let newc = match cell_map.get(&old) {
            Some(&c) => c,
            None => {
                let c = out.new_cell(sc.cell_tag(old));
                cell_map.insert(old, c);
                c
            }
        };
        out.set_cell_of(d, newc);
    }
    for d in 0..n {
        if let EdgeKind::Scar { id } = out.kind(d) {
            let new_id = *scar_map.entry(id).or_insert_with(|| {
                let v = *next_scar;
                *next_scar += 1;
                v
            });
            out.set_kind(d, EdgeKind::Scar { id: new_id });
        }
    }
    out
}

/// The canonical presentation of a whole list of spheres: the order and dart
/// numbering realizing the canonical key, with scar ids renumbered globally
/// (so cut pairings across spheres survive). Isomorphic inputs yield
/// byte-identical serializations.
pub fn canonicalize_multi(spheres: &[&SphereComplex], mode: LabelMode) -> Vec<SphereComplex> {
    let canons: Vec<SphereCanon> = spheres.iter().map(|s| canonical_sphere(s, mode, None)).collect();
    let refs: Vec<&SphereCanon> = canons.iter().collect();
    let (_, order) = assemble_multi(&refs, mode);
    let mut scar_map: BTreeMap<u32, u32> = BTreeMap::new();
    let mut next_scar = 0u32;
    let mut out = Vec::new();
    for &si in &order {
        if canons[si].empty_region.is_some() {
            let mut e = spheres[si].clone();
            e.compact();
            out.push(e);
            continue;
        }
        out.push(rebuild_from_witness(
            spheres[si],
            &canons[si].witness,
            &mut scar_map,
            &mut next_scar,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::pattern::tetra_pattern;

    #[test]
    fn relabeled_pattern_same_key() {
        let a = tetra_pattern();
        let mut b = tetra_pattern();
        b.compact();
        assert_eq!(canonical_key(&a, LabelMode::Tags), canonical_key(&b, LabelMode::Tags));
        assert_eq!(
            canonical_key(&a, LabelMode::Anchored),
            canonical_key(&b, LabelMode::Anchored)
        );
    }

    #[test]
    fn tag_mode_forgets_anchors_anchored_keeps() {
        // Outward region at vertex 0 vs vertex 1: related by a tetrahedral
        // relabeling, so Tags-mode keys agree while Anchored-mode keys differ.
        let mut a = tetra_pattern();
        let ra = a.region_for_vertex(0).unwrap();
        a.set_region_orient(ra, Orient::Out);
        let mut b = tetra_pattern();
        let rb = b.region_for_vertex(1).unwrap();
        b.set_region_orient(rb, Orient::Out);
        assert_eq!(canonical_key(&a, LabelMode::Tags), canonical_key(&b, LabelMode::Tags));
        assert_ne!(
            canonical_key(&a, LabelMode::Anchored),
            canonical_key(&b, LabelMode::Anchored)
        );
    }

    #[test]
    fn sixteen_orientation_assignments_anchored() {
        let base = tetra_pattern();
        let regions = base.regions();
        assert_eq!(regions.len(), 4);
        let mut keys = std::collections::BTreeSet::new();
        for mask in 0..16u32 {
            let mut sc = base.clone();
            for (i, &r) in regions.iter().enumerate() {
                sc.set_region_orient(r, if mask >> i & 1 == 1 { Orient::Out } else { Orient::In });
            }
            keys.insert(canonical_key(&sc, LabelMode::Anchored));
        }
        assert_eq!(keys.len(), 16);
    }

    #[test]
    fn tag_mode_orbit_count() {
        // Under relabeling-invariance the 16 assignments collapse to the five
        // orbit classes of the rotation action (out-count 0..4).
        let base = tetra_pattern();
        let regions = base.regions();
        let mut keys = std::collections::BTreeSet::new();
        for mask in 0..16u32 {
            let mut sc = base.clone();
            for (i, &r) in regions.iter().enumerate() {
                sc.set_region_orient(r, if mask >> i & 1 == 1 { Orient::Out } else { Orient::In });
            }
            keys.insert(canonical_key(&sc, LabelMode::Tags));
        }
        assert_eq!(keys.len(), 5);
    }

    #[test]
    fn canonicalize_is_stable() {
        let sc = tetra_pattern();
        let c1 = canonicalize(&sc, LabelMode::Anchored);
        let c2 = canonicalize(&c1, LabelMode::Anchored);
        assert_eq!(c1.serialize(), c2.serialize());
        c1.well_formed().unwrap();
    }
}
