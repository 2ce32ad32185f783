//! Smith normal form with full transform bookkeeping.
//!
//! `U * A * V = D` with `U`, `V` unimodular and `D` diagonal satisfying the
//! divisibility chain `d1 | d2 | ...`. The pivot policy is deterministic
//! (smallest nonzero absolute value, ties broken row-major) so the transforms
//! are reproducible across runs and platforms.

use super::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SnfResult {
    /// The nonzero diagonal entries d1 | d2 | ... | dr.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Checks `U*A*V = D`, the diagonal shape and the divisibility chain.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        let prod = self.u.mul(a).mul(&self.v);
        if prod != self.d {
            return false;
        }
        let n = self.d.rows().min(self.d.cols());
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                if i != j && !self.d[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        for i in 0..n {
            let di = &self.d[(i, i)];
            if di.is_negative() {
                return false;
            }
            if i + 1 < n {
                let dn = &self.d[(i + 1, i + 1)];
                if di.is_zero() {
                    if !dn.is_zero() {
                        return false;
                    }
                } else if !(dn % di).is_zero() {
                    return false;
                }
            }
        }
        unimodular(&self.u) && unimodular(&self.v)
    }
}

fn unimodular(m: &IntMatrix) -> bool {
    det(m).abs() == BigInt::from(1)
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
pub fn det(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a = m.clone();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[(i, k)].is_zero());
            match swap {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = num / &prev;
            }
        }
        for i in k + 1..n {
            a[(i, k)] = BigInt::zero();
        }
        prev = a[(k, k)].clone();
    }
    sign * a[(n - 1, n - 1)].clone()
}

fn find_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs = BigInt::zero();
    for i in t..d.rows() {
        for j in t..d.cols() {
            let v = &d[(i, j)];
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            if best.is_none() || a < best_abs {
                best = Some((i, j));
                best_abs = a;
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let m = a.rows();
    let n = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let lim = m.min(n);
    let mut rank = 0;

    for t in 0..lim {
        let Some((pi, pj)) = find_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut changed = false;
            // Clear column t below the pivot.
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (p, q) = (d[(t, t)].clone(), d[(i, t)].clone());
                if (&q % &p).is_zero() {
                    let k = -(&q / &p);
                    d.add_row_multiple(i, t, &k);
                    u.add_row_multiple(i, t, &k);
                } else {
                    let eg = p.extended_gcd(&q);
                    let (g, s, w) = (eg.gcd, eg.x, eg.y);
                    let (pg, qg) = (&p / &g, &q / &g);
                    row_transform(&mut d, t, i, &s, &w, &qg, &pg);
                    row_transform(&mut u, t, i, &s, &w, &qg, &pg);
                    changed = true;
                }
            }
            // Clear row t right of the pivot.
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (p, q) = (d[(t, t)].clone(), d[(t, j)].clone());
                if (&q % &p).is_zero() {
                    let k = -(&q / &p);
                    d.add_col_multiple(j, t, &k);
                    v.add_col_multiple(j, t, &k);
                } else {
                    let eg = p.extended_gcd(&q);
                    let (g, s, w) = (eg.gcd, eg.x, eg.y);
                    let (pg, qg) = (&p / &g, &q / &g);
                    col_transform(&mut d, t, j, &s, &w, &qg, &pg);
                    col_transform(&mut v, t, j, &s, &w, &qg, &pg);
                    changed = true;
                }
            }
            // Column ops can refill the row and vice versa; loop until stable.
            let col_clear = (t + 1..m).all(|i| d[(i, t)].is_zero());
            let row_clear = (t + 1..n).all(|j| d[(t, j)].is_zero());
            if !changed && col_clear && row_clear {
                break;
            }
        }

        // Pivot must divide every entry of the remaining submatrix; if not,
        // fold the offending row into row t and re-run elimination.
        loop {
            let p = d[(t, t)].clone();
            let mut offender = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&d[(i, j)] % &p).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            let Some(i) = offender else { break };
            let one = BigInt::from(1);
            d.add_row_multiple(t, i, &one);
            u.add_row_multiple(t, i, &one);
            // Re-clear row t; pivot stays, gcds only shrink so this terminates.
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (p2, q) = (d[(t, t)].clone(), d[(t, j)].clone());
                if (&q % &p2).is_zero() {
                    let k = -(&q / &p2);
                    d.add_col_multiple(j, t, &k);
                    v.add_col_multiple(j, t, &k);
                } else {
                    let eg = p2.extended_gcd(&q);
                    let (g, s, w) = (eg.gcd, eg.x, eg.y);
                    let (pg, qg) = (&p2 / &g, &q / &g);
                    col_transform(&mut d, t, j, &s, &w, &qg, &pg);
                    v_col_transform_apply(&mut v, t, j, &s, &w, &qg, &pg);
                }
            }
            for i2 in t + 1..m {
                if d[(i2, t)].is_zero() {
                    continue;
                }
                let (p2, q) = (d[(t, t)].clone(), d[(i2, t)].clone());
                if (&q % &p2).is_zero() {
                    let k = -(&q / &p2);
                    d.add_row_multiple(i2, t, &k);
                    u.add_row_multiple(i2, t, &k);
                } else {
                    let eg = p2.extended_gcd(&q);
                    let (g, s, w) = (eg.gcd, eg.x, eg.y);
                    let (pg, qg) = (&p2 / &g, &q / &g);
                    row_transform(&mut d, t, i2, &s, &w, &qg, &pg);
                    row_transform(&mut u, t, i2, &s, &w, &qg, &pg);
                }
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }

    SnfResult { u, d, v, rank }
}

/// rows (a,b) <- (s*a + w*b, -qg*a + pg*b); determinant s*pg + w*qg = 1.
fn row_transform(m: &mut IntMatrix, a: usize, b: usize, s: &BigInt, w: &BigInt, qg: &BigInt, pg: &BigInt) {
    for j in 0..m.cols() {
        let x = m[(a, j)].clone();
        let y = m[(b, j)].clone();
        m[(a, j)] = s * &x + w * &y;
        m[(b, j)] = pg * &y - qg * &x;
    }
}

fn col_transform(m: &mut IntMatrix, a: usize, b: usize, s: &BigInt, w: &BigInt, qg: &BigInt, pg: &BigInt) {
    for i in 0..m.rows() {
        let x = m[(i, a)].clone();
        let y = m[(i, b)].clone();
        m[(i, a)] = s * &x + w * &y;
        m[(i, b)] = pg * &y - qg * &x;
    }
}

fn v_col_transform_apply(m: &mut IntMatrix, a: usize, b: usize, s: &BigInt, w: &BigInt, qg: &BigInt, pg: &BigInt) {
    col_transform(m, a, b, s, w, qg, pg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_checked(a: IntMatrix) -> SnfResult {
        let r = smith_normal_form(&a);
        assert!(r.verify(&a), "SNF identity failed for {:?}", a);
        r
    }

    #[test]
    fn single_entry() {
        let r = snf_checked(IntMatrix::from_rows(vec![vec![2]]));
        assert_eq!(r.invariant_factors(), vec![BigInt::from(2)]);
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let r = snf_checked(IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]));
        assert_eq!(
            r.invariant_factors(),
            vec![BigInt::from(1), BigInt::from(6)]
        );
    }

    #[test]
    fn zero_matrix() {
        let r = snf_checked(IntMatrix::zeros(3, 2));
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn wide_and_tall() {
        let r = snf_checked(IntMatrix::from_rows(vec![vec![4, 6, 10]]));
        assert_eq!(r.invariant_factors(), vec![BigInt::from(2)]);
        let r = snf_checked(IntMatrix::from_rows(vec![vec![4], vec![6], vec![10]]));
        assert_eq!(r.invariant_factors(), vec![BigInt::from(2)]);
    }

    #[test]
    fn known_divisibility_fix() {
        // [[2,0],[0,4]] stays (2,4); [[6,0],[0,4]] must become (2,12).
        let r = snf_checked(IntMatrix::from_rows(vec![vec![6, 0], vec![0, 4]]));
        assert_eq!(
            r.invariant_factors(),
            vec![BigInt::from(2), BigInt::from(12)]
        );
    }
}
