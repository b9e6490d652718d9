//! Integer lattices in column Hermite normal form.
//!
//! A lattice is given by generator columns of a `d × k` integer matrix.
//! Column operations bring it to `[H | 0]` with `H` lower triangular,
//! positive diagonal, and every entry left of a pivot reduced into
//! `[0, pivot)`. The unimodular transform is kept so that membership
//! certificates (the integer combination of the original generators)
//! can be recovered.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major integer matrix.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for t in 0..inner {
                        if !row[t].is_zero() && !b[t][j].is_zero() {
                            acc += &row[t] * &b[t][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(r, v)| !r.is_zero() && !v.is_zero())
                .fold(BigInt::zero(), |acc, (r, v)| acc + r * v)
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn col_combine(m: &mut IntMatrix, i: usize, j: usize, coeffs: [&BigInt; 4]) {
    // (col_i, col_j) <- (c0 col_i + c1 col_j, c2 col_i + c3 col_j)
    for row in m.iter_mut() {
        let (ci, cj) = (row[i].clone(), row[j].clone());
        row[i] = coeffs[0] * &ci + coeffs[1] * &cj;
        row[j] = coeffs[2] * &ci + coeffs[3] * &cj;
    }
}

fn col_axpy(m: &mut IntMatrix, target: usize, factor: &BigInt, source: usize) {
    // col_target -= factor * col_source
    for row in m.iter_mut() {
        if !row[source].is_zero() {
            let delta = factor * &row[source];
            row[target] -= delta;
        }
    }
}

fn col_negate(m: &mut IntMatrix, i: usize) {
    for row in m.iter_mut() {
        row[i] = -row[i].clone();
    }
}

/// Column Hermite normal form `M·U = [H | 0]` of a full-row-rank matrix.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    /// `d × d` lower-triangular basis, row-major.
    pub basis: IntMatrix,
    /// `k × k` unimodular transform.
    pub transform: IntMatrix,
}

impl ColumnHnf {
    /// Returns `None` when the generated lattice does not have full rank.
    pub fn new(generators: &IntMatrix) -> Option<ColumnHnf> {
        let d = generators.len();
        let k = generators.first().map_or(0, |r| r.len());
        if k < d {
            return None;
        }
        let mut m = generators.clone();
        let mut u = identity(k);
        for i in 0..d {
            for j in i + 1..k {
                if m[i][j].is_zero() {
                    continue;
                }
                let a = m[i][i].clone();
                let b = m[i][j].clone();
                let eg = a.extended_gcd(&b);
                let (mut g, mut x, mut y) = (eg.gcd, eg.x, eg.y);
                if g.is_negative() {
                    g = -g;
                    x = -x;
                    y = -y;
                }
                let nb = -(&b / &g);
                let na = &a / &g;
                col_combine(&mut m, i, j, [&x, &y, &nb, &na]);
                col_combine(&mut u, i, j, [&x, &y, &nb, &na]);
            }
            if m[i][i].is_zero() {
                return None;
            }
            if m[i][i].is_negative() {
                col_negate(&mut m, i);
                col_negate(&mut u, i);
            }
            for j in 0..i {
                let q = m[i][j].div_floor(&m[i][i]);
                if !q.is_zero() {
                    col_axpy(&mut m, j, &q, i);
                    col_axpy(&mut u, j, &q, i);
                }
            }
        }
        let basis = m.iter().map(|row| row[..d].to_vec()).collect();
        Some(ColumnHnf { basis, transform: u })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.basis[i][i].clone()).collect()
    }

    /// Index of the lattice in `Z^d` (product of pivots).
    pub fn index(&self) -> BigInt {
        self.diagonal().iter().product()
    }

    /// Canonical residue of `x`: the unique congruent vector in the box
    /// `[0, h_11) × … × [0, h_dd)`.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut v = x.to_vec();
        for i in 0..self.rank() {
            let q = v[i].div_floor(&self.basis[i][i]);
            if !q.is_zero() {
                for (r, row) in self.basis.iter().enumerate().skip(i) {
                    if !row[i].is_zero() {
                        v[r] -= &q * &row[i];
                    }
                }
            }
        }
        v
    }

    /// Integer coordinates `c` with `H·c = x`, if `x` lies in the lattice.
    pub fn solve(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let d = self.rank();
        let mut c: Vec<BigInt> = Vec::with_capacity(d);
        for i in 0..d {
            let mut rhs = x[i].clone();
            for (j, cj) in c.iter().enumerate() {
                if !self.basis[i][j].is_zero() {
                    rhs -= &self.basis[i][j] * cj;
                }
            }
            let (q, r) = rhs.div_rem(&self.basis[i][i]);
            if !r.is_zero() {
                return None;
            }
            c.push(q);
        }
        Some(c)
    }

    /// Combination of the original generator columns producing `x`.
    pub fn certificate(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.solve(x)?;
        let d = self.rank();
        Some(
            self.transform
                .iter()
                .map(|row| row[..d].iter().zip(&c).fold(BigInt::zero(), |acc, (u, v)| acc + u * v))
                .collect(),
        )
    }

    /// Generators of the integer kernel of the original matrix.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let d = self.rank();
        let k = self.transform.len();
        (d..k).map(|j| self.transform.iter().map(|row| row[j].clone()).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hnf_of_gaussian_lattice() {
        // columns (1,-1) and (1,1): index 2
        let h = ColumnHnf::new(&m(&[&[1, 1], &[-1, 1]])).unwrap();
        assert_eq!(h.index(), BigInt::from(2));
        assert_eq!(h.reduce(&v(&[1, 0])), v(&[0, 1]));
        assert_eq!(h.reduce(&v(&[2, 0])), v(&[0, 0]));
        assert!(h.solve(&v(&[1, 1])).is_some());
        assert!(h.solve(&v(&[1, 0])).is_none());
    }

    #[test]
    fn certificate_reconstructs_vector() {
        let gens = m(&[&[4, 1, 6], &[2, 3, 0]]);
        let h = ColumnHnf::new(&gens).unwrap();
        let x = v(&[11, 5]);
        if let Some(c) = h.certificate(&x) {
            let back = mat_vec(&gens, &c);
            assert_eq!(back, x);
        }
        for ker in h.kernel() {
            assert!(mat_vec(&gens, &ker).iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn singular_lattice_rejected() {
        assert!(ColumnHnf::new(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&m(&[&[1, 1], &[-1, 1]])), BigInt::from(2));
        assert_eq!(determinant(&m(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]])), BigInt::from(-2));
    }
}
