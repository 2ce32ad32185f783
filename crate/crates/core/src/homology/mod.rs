//! First homology of candidate handle structures, torus slope arithmetic,
//! and the boundary basis (λ, μ) used when a candidate passes the H1 ≅ Z test.

pub mod matrix;
pub mod snf;

pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfResult};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("relator word {0} is not a closed walk")]
    OpenWalk(usize),
    #[error("edge chain is not a cycle")]
    NotACycle,
    #[error("boundary surface is not a single torus (components={components}, euler={euler})")]
    NotTorus { components: usize, euler: i64 },
    #[error("H1 is not infinite cyclic")]
    NotInfiniteCyclic,
    #[error("no boundary curve maps to a generator of H1")]
    BoundaryMapNotOnto,
    #[error("slopes expressed in different bases")]
    BasisMismatch,
    #[error("slope coordinates (0,0) are not a slope")]
    ZeroSlope,
    #[error("domain error: {0}")]
    Domain(String),
}

// ---------------------------------------------------------------------------
// Integer linear algebra helpers on top of SNF.
// ---------------------------------------------------------------------------

/// Solves A x = b over the integers. Returns None when no integral solution
/// exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len());
    let s = smith_normal_form(a);
    let ub = s.u.mul_vec(b);
    let n = a.cols();
    let mut y = vec![BigInt::zero(); n];
    for i in 0..a.rows() {
        let di = if i < n { s.d[(i, i)].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !ub[i].is_zero() {
                return None;
            }
        } else {
            let (q, r) = ub[i].div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// A basis for the integer kernel lattice {x : A x = 0}, as matrix columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let n = a.cols();
    let r = s.rank;
    let mut k = IntMatrix::zeros(n, n - r);
    for (out, j) in (r..n).enumerate() {
        for i in 0..n {
            k[(i, out)] = s.v[(i, j)].clone();
        }
    }
    k
}

// ---------------------------------------------------------------------------
// Graph presentations and H1.
// ---------------------------------------------------------------------------

/// An abstract graph with arbitrarily oriented edges (loops and parallel
/// edges allowed). Vertices are 0..num_vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPresentation {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphPresentation {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        for &(u, v) in &edges {
            assert!(u < num_vertices && v < num_vertices, "edge endpoint out of range");
        }
        GraphPresentation { num_vertices, edges }
    }
}

/// A signed traversal word: +1 traverses the edge with its orientation,
/// -1 against it.
pub type Word = Vec<(usize, i8)>;

/// Cycle-basis data for a graph: a spanning forest plus the list of non-tree
/// edges, which index the fundamental cycle basis of H1 ≅ Z^(E - V + C).
#[derive(Clone, Debug)]
pub struct CycleBasis {
    pub graph: GraphPresentation,
    pub nontree: Vec<usize>,
    tree_edge: Vec<bool>,
}

impl CycleBasis {
    pub fn new(graph: GraphPresentation) -> Self {
        let n = graph.num_vertices;
        let mut seen = vec![false; n];
        let mut tree_edge = vec![false; graph.edges.len()];
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(u, v)) in graph.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &(v, e) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        tree_edge[e] = true;
                        stack.push(v);
                    }
                }
            }
        }
        let nontree: Vec<usize> = (0..graph.edges.len()).filter(|&e| !tree_edge[e]).collect();
        CycleBasis { graph, nontree, tree_edge }
    }

    pub fn rank(&self) -> usize {
        self.nontree.len()
    }

    /// Coordinates of a 1-cycle (vector over all edges) in the fundamental
    /// cycle basis: the coefficients on the non-tree edges.
    pub fn cycle_coords(&self, chain: &[BigInt]) -> Result<Vec<BigInt>, HomologyError> {
        assert_eq!(chain.len(), self.graph.edges.len());
        // Boundary check: signed degree at every vertex must vanish.
        let mut deg = vec![BigInt::zero(); self.graph.num_vertices];
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            if chain[e].is_zero() {
                continue;
            }
            deg[v] += &chain[e];
            deg[u] -= &chain[e];
        }
        if deg.iter().any(|d| !d.is_zero()) {
            return Err(HomologyError::NotACycle);
        }
        Ok(self.nontree.iter().map(|&e| chain[e].clone()).collect())
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.tree_edge[e]
    }
}

/// Checks that a word is a closed walk and returns its 1-chain over edges.
fn word_chain(graph: &GraphPresentation, word: &Word) -> Option<Vec<BigInt>> {
    let mut chain = vec![BigInt::zero(); graph.edges.len()];
    if word.is_empty() {
        return Some(chain);
    }
    let step = |&(e, s): &(usize, i8)| -> Option<(usize, usize)> {
        if e >= graph.edges.len() || (s != 1 && s != -1) {
            return None;
        }
        let (u, v) = graph.edges[e];
        Some(if s == 1 { (u, v) } else { (v, u) })
    };
    let (start, mut at) = step(&word[0])?;
    chain[word[0].0] += BigInt::from(word[0].1);
    for t in &word[1..] {
        let (from, to) = step(t)?;
        if from != at {
            return None;
        }
        at = to;
        chain[t.0] += BigInt::from(t.1);
    }
    if at != start {
        return None;
    }
    Some(chain)
}

/// The relator matrix of H1(N(G)) / ⟨τ⟩ over the fundamental cycle basis:
/// one row per word, abelianized signed counts on the non-tree edges.
pub fn h1_presentation(
    graph: &GraphPresentation,
    tau_words: &[Word],
) -> Result<(CycleBasis, IntMatrix), HomologyError> {
    let basis = CycleBasis::new(graph.clone());
    let mut rel = IntMatrix::zeros(tau_words.len(), basis.rank());
    for (r, word) in tau_words.iter().enumerate() {
        let chain = word_chain(graph, word).ok_or(HomologyError::OpenWalk(r))?;
        let coords = basis.cycle_coords(&chain)?;
        for (c, val) in coords.into_iter().enumerate() {
            rel[(r, c)] = val;
        }
    }
    Ok((basis, rel))
}

/// Cokernel decomposition of a relator matrix (rows = relators over the
/// generators): free rank plus the invariant factors greater than one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Group {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl H1Group {
    pub fn is_infinite_cyclic(&self) -> bool {
        self.free_rank == 1 && self.torsion.is_empty()
    }
}

pub fn h1_group(relators: &IntMatrix) -> H1Group {
    let s = smith_normal_form(relators);
    let torsion: Vec<BigInt> = s
        .invariant_factors()
        .into_iter()
        .filter(|d| d > &BigInt::one())
        .collect();
    H1Group {
        free_rank: relators.cols() - s.rank,
        torsion,
    }
}

/// Evaluates classes in H1 when the cokernel is Z: maps generator
/// coordinates to the integer class.
#[derive(Clone, Debug)]
pub struct InfiniteCyclicClass {
    u: IntMatrix,
    row: usize,
}

impl InfiniteCyclicClass {
    /// relators: rows = relator vectors over Z^n. Requires coker ≅ Z.
    pub fn new(relators: &IntMatrix) -> Result<Self, HomologyError> {
        let a = relators.transpose(); // n x m, columns span the relator lattice
        let s = smith_normal_form(&a);
        let n = a.rows();
        let mut zero_rows = Vec::new();
        for i in 0..n {
            let di = if i < a.cols() { s.d[(i, i)].clone() } else { BigInt::zero() };
            if di.is_zero() {
                zero_rows.push(i);
            } else if di > BigInt::one() {
                return Err(HomologyError::NotInfiniteCyclic);
            }
        }
        if zero_rows.len() != 1 {
            return Err(HomologyError::NotInfiniteCyclic);
        }
        Ok(InfiniteCyclicClass { u: s.u, row: zero_rows[0] })
    }

    pub fn class_of(&self, coords: &[BigInt]) -> BigInt {
        let y = self.u.mul_vec(coords);
        y[self.row].clone()
    }
}

// ---------------------------------------------------------------------------
// Torus slopes.
// ---------------------------------------------------------------------------

/// Identifies the basis a slope's coordinates refer to, so distances are only
/// ever taken between slopes on the same torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisId(pub u32);

/// A slope on a torus: reduced coordinates (a, b) in a declared basis, with
/// gcd(a,b) = 1 and canonical sign (a > 0, or a = 0 and b > 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusSlope {
    a: i64,
    b: i64,
    basis: BasisId,
}

impl TorusSlope {
    pub fn new(a: i64, b: i64, basis: BasisId) -> Result<Self, HomologyError> {
        if a == 0 && b == 0 {
            return Err(HomologyError::ZeroSlope);
        }
        let g = gcd_i64(a.unsigned_abs(), b.unsigned_abs()) as i64;
        let (mut a, mut b) = (a / g, b / g);
        if a < 0 || (a == 0 && b < 0) {
            a = -a;
            b = -b;
        }
        Ok(TorusSlope { a, b, basis })
    }

    pub fn coords(&self) -> (i64, i64) {
        (self.a, self.b)
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }
}

fn gcd_i64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd_i64(b, a % b)
    }
}

/// Geometric intersection number Δ of two slopes in the same basis:
/// |a_s·b_t − b_s·a_t|.
pub fn slope_distance(s: &TorusSlope, t: &TorusSlope) -> Result<u64, HomologyError> {
    if s.basis != t.basis {
        return Err(HomologyError::BasisMismatch);
    }
    let d = (s.a as i128) * (t.b as i128) - (s.b as i128) * (t.a as i128);
    Ok(d.unsigned_abs() as u64)
}

// ---------------------------------------------------------------------------
// Boundary basis (λ, μ) for a candidate with H1 ≅ Z and torus boundary.
// ---------------------------------------------------------------------------

/// The inputs needed to find generators λ, μ of H1(∂M′): the boundary surface
/// chain complex, the chain map into the spine graph, and the relator data
/// for H1(M′) over the graph's cycle basis.
#[derive(Clone, Debug)]
pub struct BoundaryProblem {
    /// 0-cells × 1-cells signed incidence of the boundary surface.
    pub d1: IntMatrix,
    /// 1-cells × 2-cells signed incidence (columns are face boundaries).
    pub d2: IntMatrix,
    /// graph-edges × boundary-1-cells: how each boundary edge projects to the
    /// spine graph (signed traversal weights).
    pub edge_to_graph: IntMatrix,
    pub cycle_basis: CycleBasis,
    pub relators: IntMatrix,
    /// Boundary 1-cells that avoid the 2-handle attaching regions; λ prefers
    /// a representative supported here.
    pub allowed_edges: Vec<bool>,
    /// Unsigned endpoints per 1-cell (signed incidence vanishes on loops).
    pub edge_endpoints: Vec<(usize, usize)>,
    /// Unsigned boundary-walk support per 2-cell.
    pub face_edge_support: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct BoundaryBasis {
    /// λ as a 1-chain over boundary 1-cells; maps to 1 in H1(M′).
    pub lambda_chain: Vec<BigInt>,
    /// μ as a 1-chain over boundary 1-cells; maps to 0 in H1(M′).
    pub mu_chain: Vec<BigInt>,
    /// Whether λ's representative stays off the 2-handle attaching regions.
    pub lambda_avoids_attachments: bool,
    pub basis: BasisId,
    // K-coordinates bookkeeping for expressing other boundary cycles.
    kernel: IntMatrix,
    h1_image: IntMatrix, // im(d2) in kernel coordinates
    b1: Vec<BigInt>,     // torus basis in kernel coordinates
    b2: Vec<BigInt>,
    lambda_mu_inverse: [[BigInt; 2]; 2], // maps (b1,b2)-coords to (λ,μ)-coords
}

fn surface_components(p: &BoundaryProblem) -> usize {
    // Union-find over 0-, 1-, 2-cells via the unsigned attachment data.
    let n0 = p.d1.rows();
    let n1 = p.d1.cols();
    let n2 = p.d2.cols();
    let total = n0 + n1 + n2;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
        }
    };
    for (e, &(u, v)) in p.edge_endpoints.iter().enumerate() {
        union(&mut parent, u, n0 + e);
        union(&mut parent, v, n0 + e);
    }
    for (f, support) in p.face_edge_support.iter().enumerate() {
        for &e in support {
            union(&mut parent, n0 + e, n0 + n1 + f);
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    for x in 0..total {
        let r = find(&mut parent, x);
        roots.insert(r);
    }
    roots.len()
}

/// Finds generators λ, μ of H1(∂M′) ≅ Z² with λ ↦ 1 and μ ↦ 0 in H1(M′) ≅ Z.
pub fn boundary_basis(p: &BoundaryProblem) -> Result<BoundaryBasis, HomologyError> {
    let n0 = p.d1.rows() as i64;
    let n1 = p.d1.cols() as i64;
    let n2 = p.d2.cols() as i64;
    let euler = n0 - n1 + n2;
    let components = surface_components(p);
    if components != 1 || euler != 0 {
        return Err(HomologyError::NotTorus { components, euler });
    }

    // H1(∂) = ker d1 / im d2 in kernel coordinates.
    let kernel = kernel_basis(&p.d1); // n1 x k
    let k = kernel.cols();
    let mut image = IntMatrix::zeros(k, p.d2.cols());
    for j in 0..p.d2.cols() {
        let col: Vec<BigInt> = (0..p.d2.rows()).map(|i| p.d2[(i, j)].clone()).collect();
        let x = solve(&kernel, &col).ok_or(HomologyError::NotACycle)?;
        for i in 0..k {
            image[(i, j)] = x[i].clone();
        }
    }
    let s = smith_normal_form(&image);
    // Free part must be Z^2 without torsion for a torus.
    let mut free_rows = Vec::new();
    for i in 0..k {
        let di = if i < image.cols() { s.d[(i, i)].clone() } else { BigInt::zero() };
        if di.is_zero() {
            free_rows.push(i);
        } else if di > BigInt::one() {
            return Err(HomologyError::NotTorus { components, euler });
        }
    }
    if free_rows.len() != 2 {
        return Err(HomologyError::NotTorus { components, euler });
    }
    // Basis vectors in kernel coordinates: U^{-1} e_i. Solve U x = e_i.
    let mut basis_vecs = Vec::new();
    for &row in &free_rows {
        let mut e = vec![BigInt::zero(); k];
        e[row] = BigInt::one();
        let x = solve(&s.u, &e).expect("U unimodular");
        basis_vecs.push(x);
    }
    let (b1, b2) = (basis_vecs[0].clone(), basis_vecs[1].clone());

    // Map each basis cycle into H1(M′).
    let class = InfiniteCyclicClass::new(&p.relators)?;
    let to_class = |bk: &[BigInt]| -> Result<BigInt, HomologyError> {
        let chain = kernel.mul_vec(bk);
        let graph_chain = p.edge_to_graph.mul_vec(&chain);
        let coords = p.cycle_basis.cycle_coords(&graph_chain)?;
        Ok(class.class_of(&coords))
    };
    let p1 = to_class(&b1)?;
    let p2 = to_class(&b2)?;
    if p1.is_zero() && p2.is_zero() {
        return Err(HomologyError::BoundaryMapNotOnto);
    }
    let eg = p1.extended_gcd(&p2);
    if eg.gcd.abs() != BigInt::one() {
        return Err(HomologyError::BoundaryMapNotOnto);
    }
    // λ = x1 b1 + x2 b2 with p1 x1 + p2 x2 = gcd = ±1; flip sign if needed.
    let (mut x1, mut x2) = (eg.x, eg.y);
    if eg.gcd.is_negative() {
        x1 = -x1;
        x2 = -x2;
    }
    // μ spans the kernel of (p1 p2): (-p2, p1) / gcd, primitive.
    let (m1, m2) = (-p2.clone(), p1.clone());

    let comb = |c1: &BigInt, c2: &BigInt| -> Vec<BigInt> {
        (0..k).map(|i| c1 * &b1[i] + c2 * &b2[i]).collect()
    };
    let lambda_k = comb(&x1, &x2);
    let mu_k = comb(&m1, &m2);
    let mut lambda_chain = kernel.mul_vec(&lambda_k);
    let mu_chain = kernel.mul_vec(&mu_k);

    // Sanity: λ ↦ 1 and μ ↦ 0 by construction; re-verify through the maps.
    debug_assert_eq!(to_class(&lambda_k).unwrap(), BigInt::one());
    debug_assert!(to_class(&mu_k).unwrap().is_zero());

    // Prefer a λ-representative supported on the allowed subcomplex.
    let mut lambda_avoids = p
        .allowed_edges
        .iter()
        .zip(lambda_chain.iter())
        .all(|(ok, c)| *ok || c.is_zero());
    if !lambda_avoids {
        if let Some(better) = restrict_cycle(p, &kernel, &image, &lambda_k) {
            lambda_chain = better;
            lambda_avoids = true;
        }
    }

    // Matrix taking (b1,b2)-coordinates to (λ,μ)-coordinates: inverse of
    // [[x1, m1],[x2, m2]] which has determinant ±1.
    let det = &x1 * &m2 - &m1 * &x2;
    debug_assert!(det.abs() == BigInt::one());
    let inv = [
        [&m2 / &det * BigInt::one(), -&m1 / &det * BigInt::one()],
        [-&x2 / &det * BigInt::one(), &x1 / &det * BigInt::one()],
    ];

    Ok(BoundaryBasis {
        lambda_chain,
        mu_chain,
        lambda_avoids_attachments: lambda_avoids,
        basis: BasisId(0),
        kernel,
        h1_image: image,
        b1,
        b2,
        lambda_mu_inverse: inv,
    })
}

/// Looks for a cycle homologous to `target` (kernel coordinates) supported on
/// the allowed edges.
fn restrict_cycle(
    p: &BoundaryProblem,
    kernel: &IntMatrix,
    image: &IntMatrix,
    target_k: &[BigInt],
) -> Option<Vec<BigInt>> {
    let allowed: Vec<usize> = (0..p.allowed_edges.len()).filter(|&e| p.allowed_edges[e]).collect();
    if allowed.is_empty() {
        return None;
    }
    // d1 restricted to allowed columns.
    let mut d1r = IntMatrix::zeros(p.d1.rows(), allowed.len());
    for (jj, &e) in allowed.iter().enumerate() {
        for i in 0..p.d1.rows() {
            d1r[(i, jj)] = p.d1[(i, e)].clone();
        }
    }
    let ka = kernel_basis(&d1r); // allowed-cycle lattice
    // Express each allowed-kernel generator in global kernel coordinates.
    let mut ka_k = IntMatrix::zeros(kernel.cols(), ka.cols());
    for j in 0..ka.cols() {
        let mut full = vec![BigInt::zero(); p.d1.cols()];
        for (jj, &e) in allowed.iter().enumerate() {
            full[e] = ka[(jj, j)].clone();
        }
        let x = solve(kernel, &full)?;
        for i in 0..kernel.cols() {
            ka_k[(i, j)] = x[i].clone();
        }
    }
    // Solve ka_k * y + image * t = target.
    let cols = ka_k.cols() + image.cols();
    let mut sys = IntMatrix::zeros(kernel.cols(), cols);
    for i in 0..kernel.cols() {
        for j in 0..ka_k.cols() {
            sys[(i, j)] = ka_k[(i, j)].clone();
        }
        for j in 0..image.cols() {
            sys[(i, ka_k.cols() + j)] = image[(i, j)].clone();
        }
    }
    let sol = solve(&sys, target_k)?;
    let mut chain = vec![BigInt::zero(); p.d1.cols()];
    for j in 0..ka.cols() {
        if sol[j].is_zero() {
            continue;
        }
        for (jj, &e) in allowed.iter().enumerate() {
            let add = &sol[j] * &ka[(jj, j)];
            chain[e] += add;
        }
    }
    Some(chain)
}

impl BoundaryBasis {
    /// Coordinates of a boundary 1-cycle in the (λ, μ) basis.
    pub fn coords_of(&self, chain: &[BigInt]) -> Result<(BigInt, BigInt), HomologyError> {
        let k = self.kernel.cols();
        let target = solve(&self.kernel, &chain.to_vec()).ok_or(HomologyError::NotACycle)?;
        // Solve [b1 b2 | image] (c; t) = target.
        let cols = 2 + self.h1_image.cols();
        let mut sys = IntMatrix::zeros(k, cols);
        for i in 0..k {
            sys[(i, 0)] = self.b1[i].clone();
            sys[(i, 1)] = self.b2[i].clone();
            for j in 0..self.h1_image.cols() {
                sys[(i, 2 + j)] = self.h1_image[(i, j)].clone();
            }
        }
        let sol = solve(&sys, &target).ok_or(HomologyError::NotACycle)?;
        let (c1, c2) = (sol[0].clone(), sol[1].clone());
        let a = &self.lambda_mu_inverse[0][0] * &c1 + &self.lambda_mu_inverse[0][1] * &c2;
        let b = &self.lambda_mu_inverse[1][0] * &c1 + &self.lambda_mu_inverse[1][1] * &c2;
        Ok((a, b))
    }

    pub fn lambda_slope(&self) -> TorusSlope {
        TorusSlope::new(1, 0, self.basis).unwrap()
    }

    pub fn mu_slope(&self) -> TorusSlope {
        TorusSlope::new(0, 1, self.basis).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentation_examples() {
        // One vertex, one loop, no τ: H1 = Z.
        let g = GraphPresentation::new(1, vec![(0, 0)]);
        let (_, rel) = h1_presentation(&g, &[]).unwrap();
        assert_eq!(h1_group(&rel), H1Group { free_rank: 1, torsion: vec![] });

        // τ = a²: H1 = Z/2.
        let (_, rel) = h1_presentation(&g, &[vec![(0, 1), (0, 1)]]).unwrap();
        assert_eq!(
            h1_group(&rel),
            H1Group { free_rank: 0, torsion: vec![BigInt::from(2)] }
        );

        // Two loops, τ = commutator: abelianization kills it, H1 = Z².
        let g2 = GraphPresentation::new(1, vec![(0, 0), (0, 0)]);
        let word = vec![(0, 1), (1, 1), (0, -1), (1, -1)];
        let (_, rel) = h1_presentation(&g2, &[word]).unwrap();
        assert_eq!(h1_group(&rel), H1Group { free_rank: 2, torsion: vec![] });
    }

    #[test]
    fn open_walk_rejected() {
        let g = GraphPresentation::new(2, vec![(0, 1)]);
        let err = h1_presentation(&g, &[vec![(0, 1)]]).unwrap_err();
        assert_eq!(err, HomologyError::OpenWalk(0));
    }

    #[test]
    fn h1_group_padded() {
        let rel = IntMatrix::from_rows(vec![vec![1, 0], vec![0, 0]]);
        assert_eq!(h1_group(&rel), H1Group { free_rank: 1, torsion: vec![] });
    }

    #[test]
    fn slope_arithmetic() {
        let b = BasisId(7);
        let s = TorusSlope::new(1, 0, b).unwrap();
        let t = TorusSlope::new(3, 5, b).unwrap();
        assert_eq!(slope_distance(&s, &t).unwrap(), 5);
        let u = TorusSlope::new(1, 2, b).unwrap();
        assert_eq!(slope_distance(&u, &s).unwrap(), 2);
        assert_eq!(slope_distance(&t, &t).unwrap(), 0);
        // Reduction and sign canonicalization.
        let v = TorusSlope::new(-2, -4, b).unwrap();
        assert_eq!(v.coords(), (1, 2));
        assert!(TorusSlope::new(0, 0, b).is_err());
        let other = TorusSlope::new(1, 0, BasisId(8)).unwrap();
        assert_eq!(slope_distance(&s, &other).unwrap_err(), HomologyError::BasisMismatch);
    }

    /// Torus boundary problem for the solid torus spine (1 vertex, 1 loop).
    /// Boundary complex: the torus as a square complex with one 0-cell, two
    /// 1-cells (longitude l, meridian m) and one 2-cell glued along
    /// l m l⁻¹ m⁻¹. The longitude projects to the loop, the meridian to 0.
    fn solid_torus_problem() -> BoundaryProblem {
        let d1 = IntMatrix::zeros(1, 2);
        let mut d2 = IntMatrix::zeros(2, 1);
        d2[(0, 0)] = BigInt::zero();
        d2[(1, 0)] = BigInt::zero();
        let graph = GraphPresentation::new(1, vec![(0, 0)]);
        let cb = CycleBasis::new(graph);
        let mut e2g = IntMatrix::zeros(1, 2);
        e2g[(0, 0)] = BigInt::one(); // l traverses the loop once
        BoundaryProblem {
            d1,
            d2,
            edge_to_graph: e2g,
            cycle_basis: cb,
            relators: IntMatrix::zeros(0, 1),
            allowed_edges: vec![true, true],
            edge_endpoints: vec![(0, 0), (0, 0)],
            face_edge_support: vec![vec![0, 1]],
        }
    }

    #[test]
    fn solid_torus_basis() {
        let p = solid_torus_problem();
        let bb = boundary_basis(&p).unwrap();
        // λ must project to the loop generator once, μ to zero.
        let l_weight = &bb.lambda_chain[0];
        assert_eq!(l_weight, &BigInt::one());
        assert!(bb.mu_chain[0].is_zero());
        assert!(!bb.mu_chain[1].is_zero());
        // Coordinates of the meridian cycle itself.
        let (a, b) = bb.coords_of(&[BigInt::zero(), BigInt::one()]).unwrap();
        assert!(a.is_zero());
        assert_eq!(b.abs(), BigInt::one());
    }

    #[test]
    fn torsion_candidate_rejected() {
        let g = GraphPresentation::new(1, vec![(0, 0)]);
        let (_, rel) = h1_presentation(&g, &[vec![(0, 1), (0, 1)]]).unwrap();
        assert!(InfiniteCyclicClass::new(&rel).is_err());
    }

    #[test]
    fn genus_two_rejected() {
        // Genus-2 surface: one 0-cell, four 1-cells, one 2-cell; cycles all
        // survive, so the free rank is 4 and boundary_basis must refuse.
        let d1 = IntMatrix::zeros(1, 4);
        let d2 = IntMatrix::zeros(4, 1);
        let graph = GraphPresentation::new(1, vec![(0, 0), (0, 0)]);
        let cb = CycleBasis::new(graph);
        let e2g = IntMatrix::zeros(2, 4);
        let p = BoundaryProblem {
            d1,
            d2,
            edge_to_graph: e2g,
            cycle_basis: cb,
            relators: IntMatrix::zeros(0, 2),
            allowed_edges: vec![true; 4],
            edge_endpoints: vec![(0, 0); 4],
            face_edge_support: vec![vec![0, 1, 2, 3]],
        };
        match boundary_basis(&p) {
            Err(HomologyError::NotTorus { .. }) => {}
            other => panic!("expected NotTorus, got {:?}", other),
        }
    }
}
