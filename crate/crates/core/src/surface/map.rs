//! Rotation systems (combinatorial maps) on oriented surfaces.
//!
//! A map is a set of darts with two permutations: `alpha` pairs the two darts
//! of an edge, `sigma` rotates counterclockwise around the origin vertex of a
//! dart. Face walks keep the face on the left: the dart after `d` along its
//! left face is `sigma[alpha[d]]`. Embedded graphs here are always on
//! 2-spheres, one component per connected dart orbit; disconnected structures
//! are stitched together at the cell layer.

pub type Dart = usize;

pub const NIL: Dart = usize::MAX;

#[derive(Clone, Debug, Default)]
pub struct CombMap {
    sigma: Vec<Dart>,
    sigma_inv: Vec<Dart>,
    alpha: Vec<Dart>,
    alive: Vec<bool>,
}

impl CombMap {
    pub fn new() -> Self {
        CombMap::default()
    }

    /// Builds a map from complete permutation arrays (all darts alive).
    pub fn from_raw(sigma: Vec<Dart>, sigma_inv: Vec<Dart>, alpha: Vec<Dart>) -> Self {
        let n = sigma.len();
        debug_assert_eq!(sigma_inv.len(), n);
        debug_assert_eq!(alpha.len(), n);
        CombMap { sigma, sigma_inv, alpha, alive: vec![true; n] }
    }

    pub fn dart_limit(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_alive(&self, d: Dart) -> bool {
        d < self.alive.len() && self.alive[d]
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.sigma.len()).filter(move |&d| self.alive[d])
    }

    pub fn num_darts(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        debug_assert!(self.is_alive(d));
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        debug_assert!(self.is_alive(d));
        self.sigma_inv[d]
    }

    pub fn alpha(&self, d: Dart) -> Dart {
        debug_assert!(self.is_alive(d));
        self.alpha[d]
    }

    /// Next dart along the face to the left of `d`.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        self.sigma(self.alpha(d))
    }

    /// Previous dart along the face to the left of `d`.
    pub fn prev_in_face(&self, d: Dart) -> Dart {
        self.alpha(self.sigma_inv(d))
    }

    /// Allocates an isolated edge: two darts paired by alpha, each its own
    /// vertex (sigma fixed point).
    pub fn new_edge(&mut self) -> (Dart, Dart) {
        let d = self.sigma.len();
        let e = d + 1;
        self.sigma.extend([d, e]);
        self.sigma_inv.extend([d, e]);
        self.alpha.extend([e, d]);
        self.alive.extend([true, true]);
        (d, e)
    }

    /// Inserts dart `n` (currently alone at its vertex) into the rotation
    /// immediately after `at` (counterclockwise), merging the vertices.
    pub fn splice_after(&mut self, at: Dart, n: Dart) {
        debug_assert!(self.is_alive(at) && self.is_alive(n));
        debug_assert_eq!(self.sigma[n], n, "dart already spliced");
        let nxt = self.sigma[at];
        self.sigma[at] = n;
        self.sigma_inv[n] = at;
        self.sigma[n] = nxt;
        self.sigma_inv[nxt] = n;
    }

    /// Removes dart `d` from its vertex rotation, leaving it alone at a fresh
    /// vertex.
    pub fn unsplice(&mut self, d: Dart) {
        debug_assert!(self.is_alive(d));
        let prev = self.sigma_inv[d];
        if prev == d {
            return;
        }
        let nxt = self.sigma[d];
        self.sigma[prev] = nxt;
        self.sigma_inv[nxt] = prev;
        self.sigma[d] = d;
        self.sigma_inv[d] = d;
    }

    /// Re-pairs `a` and `b` as alpha partners (used when subdividing edges).
    pub fn rewire_alpha(&mut self, a: Dart, b: Dart) {
        self.alpha[a] = b;
        self.alpha[b] = a;
    }

    /// Deletes the edge of `d`: both darts are unspliced and tombstoned.
    pub fn delete_edge(&mut self, d: Dart) {
        let e = self.alpha[d];
        self.unsplice(d);
        self.unsplice(e);
        self.alive[d] = false;
        self.alive[e] = false;
    }

    /// Smooths a degree-two vertex given one of its darts: the two edges at
    /// the vertex merge into one. `d` and `sigma(d)` disappear; their alpha
    /// partners become partners of each other. Returns the surviving pair.
    /// Not applicable when the two darts form a loop.
    pub fn smooth_vertex(&mut self, d: Dart) -> Option<(Dart, Dart)> {
        let d2 = self.sigma(d);
        if d2 == d || self.sigma(d2) != d {
            return None; // not degree two
        }
        let a = self.alpha[d];
        let b = self.alpha[d2];
        if a == d2 {
            return None; // loop at this vertex
        }
        self.alive[d] = false;
        self.alive[d2] = false;
        self.alpha[a] = b;
        self.alpha[b] = a;
        Some((a, b))
    }

    pub fn vertex_degree(&self, d: Dart) -> usize {
        let mut n = 1;
        let mut x = self.sigma(d);
        while x != d {
            n += 1;
            x = self.sigma(x);
        }
        n
    }

    pub fn vertex_darts(&self, d: Dart) -> Vec<Dart> {
        let mut out = vec![d];
        let mut x = self.sigma(d);
        while x != d {
            out.push(x);
            x = self.sigma(x);
        }
        out
    }

    pub fn face_darts(&self, d: Dart) -> Vec<Dart> {
        let mut out = vec![d];
        let mut x = self.next_in_face(d);
        while x != d {
            out.push(x);
            x = self.next_in_face(x);
        }
        out
    }

    /// Orbit representatives and orbit index per dart for a permutation
    /// given as a closure.
    fn orbits(&self, next: impl Fn(Dart) -> Dart) -> (Vec<Dart>, Vec<usize>) {
        let mut idx = vec![usize::MAX; self.sigma.len()];
        let mut reps = Vec::new();
        for d in self.darts() {
            if idx[d] != usize::MAX {
                continue;
            }
            let k = reps.len();
            reps.push(d);
            let mut x = d;
            loop {
                idx[x] = k;
                x = next(x);
                if x == d {
                    break;
                }
            }
        }
        (reps, idx)
    }

    pub fn vertex_orbits(&self) -> (Vec<Dart>, Vec<usize>) {
        self.orbits(|d| self.sigma(d))
    }

    pub fn face_orbits(&self) -> (Vec<Dart>, Vec<usize>) {
        self.orbits(|d| self.next_in_face(d))
    }

    /// Connected components over the union of sigma and alpha.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.sigma.len()];
        let mut n = 0;
        for d in self.darts() {
            if comp[d] != usize::MAX {
                continue;
            }
            let mut stack = vec![d];
            comp[d] = n;
            while let Some(x) = stack.pop() {
                for y in [self.sigma(x), self.alpha(x)] {
                    if comp[y] == usize::MAX {
                        comp[y] = n;
                        stack.push(y);
                    }
                }
            }
            n += 1;
        }
        (n, comp)
    }

    /// Checks the permutation structure and that every connected component is
    /// a sphere map (v - e + f = 2).
    pub fn check(&self) -> Result<(), String> {
        for d in self.darts() {
            let a = self.alpha[d];
            if !self.is_alive(a) || a == d || self.alpha[a] != d {
                return Err(format!("alpha broken at dart {d}"));
            }
            let s = self.sigma[d];
            if !self.is_alive(s) || self.sigma_inv[s] != d {
                return Err(format!("sigma broken at dart {d}"));
            }
        }
        let (ncomp, comp) = self.components();
        let (vreps, vidx) = self.vertex_orbits();
        let (freps, _) = self.face_orbits();
        let _ = vidx;
        let mut v = vec![0i64; ncomp];
        let mut e = vec![0i64; ncomp];
        let mut f = vec![0i64; ncomp];
        for &r in &vreps {
            v[comp[r]] += 1;
        }
        for d in self.darts() {
            if d < self.alpha[d] {
                e[comp[d]] += 1;
            }
        }
        for &r in &freps {
            f[comp[r]] += 1;
        }
        for c in 0..ncomp {
            if v[c] - e[c] + f[c] != 2 {
                return Err(format!(
                    "component {c} is not a sphere: v={} e={} f={}",
                    v[c], e[c], f[c]
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A triangle: three vertices, three edges, two faces.
    fn triangle() -> CombMap {
        let mut m = CombMap::new();
        let (ab, ba) = m.new_edge();
        let (bc, cb) = m.new_edge();
        let (ca, ac) = m.new_edge();
        // Vertex A: darts ab, ac; B: ba, bc; C: cb, ca.
        m.splice_after(ab, ac);
        m.splice_after(ba, bc);
        m.splice_after(cb, ca);
        m
    }

    #[test]
    fn triangle_is_sphere() {
        let m = triangle();
        m.check().unwrap();
        let (vreps, _) = m.vertex_orbits();
        let (freps, _) = m.face_orbits();
        assert_eq!(vreps.len(), 3);
        assert_eq!(freps.len(), 2);
        // One face walk has length 3.
        assert_eq!(m.face_darts(0).len(), 3);
    }

    #[test]
    fn smooth_degree_two() {
        let mut m = CombMap::new();
        // Path a - v - b; smoothing v merges the two edges.
        let (av, va) = m.new_edge();
        let (vb, bv) = m.new_edge();
        m.splice_after(va, vb);
        assert_eq!(m.vertex_degree(va), 2);
        let (x, y) = m.smooth_vertex(va).unwrap();
        assert_eq!((x, y), (av, bv));
        assert_eq!(m.alpha(av), bv);
        m.check().unwrap();
    }

    #[test]
    fn delete_edge_splits() {
        let mut m = triangle();
        m.delete_edge(0);
        m.check().unwrap();
        assert_eq!(m.num_darts(), 4);
    }
}
