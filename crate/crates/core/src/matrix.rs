//! Exact integer and rational matrix kernels: Hermite normal form with
//! transform, Smith-style diagonalization, integer kernels and rational
//! Gaussian elimination. Everything here is arbitrary precision; nothing
//! rounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type Rat = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<BigInt>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        debug_assert!(rows.iter().all(|x| x.len() == c));
        Mat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.a[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn rows_vec(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lik = self.at(i, k);
                if lik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = lik * other.at(k, j);
                    *out.at_mut(i, j) += v;
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// row_i -= q * row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = q * self.at(j, c);
            *self.at_mut(i, c) -= v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.at(i, c).clone();
            *self.at_mut(i, c) = v;
        }
    }

    /// Row Hermite normal form together with a unimodular transform:
    /// returns `(h, u)` with `u * self == h`, pivots positive, entries
    /// above each pivot reduced into `[0, pivot)`, zero rows at the bottom.
    pub fn hnf_with_transform(&self) -> (Mat, Mat) {
        let mut h = self.clone();
        let mut u = Mat::identity(self.rows);
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // Euclidean elimination within column c among rows >= r.
            loop {
                let mut pivot: Option<usize> = None;
                for i in r..self.rows {
                    if !h.at(i, c).is_zero() {
                        pivot = match pivot {
                            Some(p) if h.at(p, c).abs() <= h.at(i, c).abs() => Some(p),
                            _ => Some(i),
                        };
                    }
                }
                let Some(p) = pivot else { break };
                h.swap_rows(r, p);
                u.swap_rows(r, p);
                if h.at(r, c).is_negative() {
                    h.negate_row(r);
                    u.negate_row(r);
                }
                let mut dirty = false;
                for i in r + 1..self.rows {
                    if !h.at(i, c).is_zero() {
                        let q = h.at(i, c).div_floor(h.at(r, c));
                        h.row_sub(i, r, &q);
                        u.row_sub(i, r, &q);
                        if !h.at(i, c).is_zero() {
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
            if !h.at(r, c).is_zero() {
                // Reduce the entries above the pivot into [0, pivot).
                for i in 0..r {
                    let q = h.at(i, c).div_floor(h.at(r, c));
                    h.row_sub(i, r, &q);
                    u.row_sub(i, r, &q);
                }
                r += 1;
            }
        }
        (h, u)
    }

    /// Canonical row HNF with zero rows removed.
    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.hnf_rows().len()
    }

    pub fn hnf_rows(&self) -> Vec<Vec<BigInt>> {
        let (h, _) = self.hnf_with_transform();
        (0..h.rows)
            .map(|i| h.row_vec(i))
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect()
    }

    /// Basis (as rows) of `{ x : x * self == 0 }`, in canonical HNF form.
    pub fn left_kernel(&self) -> Mat {
        let (h, u) = self.hnf_with_transform();
        let rows: Vec<Vec<BigInt>> = (0..h.rows)
            .filter(|&i| h.row(i).iter().all(|x| x.is_zero()))
            .map(|i| u.row_vec(i))
            .collect();
        Mat::from_rows_padded(rows, self.rows).hnf_mat()
    }

    /// Basis (as rows) of `{ x : self * x^T == 0 }`, in canonical HNF form.
    pub fn right_kernel(&self) -> Mat {
        self.transpose().left_kernel()
    }

    fn from_rows_padded(rows: Vec<Vec<BigInt>>, cols: usize) -> Mat {
        if rows.is_empty() {
            Mat::zero(0, cols)
        } else {
            Mat::from_rows(rows)
        }
    }

    fn hnf_mat(&self) -> Mat {
        Mat::from_rows_padded(self.hnf_rows(), self.cols)
    }

    /// Diagonalization by unimodular row and column operations:
    /// returns `(d, v, v_inv)` such that `u * self * v = diag(d)` for some
    /// unimodular `u`, with `v * v_inv == I`. The diagonal is not reduced to
    /// the divisibility chain; callers only rely on which entries are zero
    /// and on their absolute product.
    pub fn smith_diagonalize(&self) -> (Vec<BigInt>, Mat, Mat) {
        let mut m = self.clone();
        let n = self.cols;
        let mut v = Mat::identity(n);
        let mut vinv = Mat::identity(n);

        // col_i -= q * col_j on m, mirrored on v / vinv.
        fn col_sub(m: &mut Mat, v: &mut Mat, vinv: &mut Mat, i: usize, j: usize, q: &BigInt) {
            if q.is_zero() {
                return;
            }
            for r in 0..m.nrows() {
                let x = q * m.at(r, j);
                *m.at_mut(r, i) -= x;
            }
            for r in 0..v.nrows() {
                let x = q * v.at(r, j);
                *v.at_mut(r, i) -= x;
            }
            // (C^-1 on the left of vinv) is the row operation row_j += q*row_i
            vinv.row_sub(j, i, &(-q.clone()));
        }
        fn col_swap(m: &mut Mat, v: &mut Mat, vinv: &mut Mat, i: usize, j: usize) {
            if i == j {
                return;
            }
            for r in 0..m.nrows() {
                let c = m.ncols();
                m.a.swap(r * c + i, r * c + j);
            }
            for r in 0..v.nrows() {
                let c = v.ncols();
                v.a.swap(r * c + i, r * c + j);
            }
            vinv.swap_rows(i, j);
        }

        let t_max = m.rows.min(m.cols);
        let mut t = 0;
        while t < t_max {
            // Find a nonzero pivot in the remaining block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m.rows {
                for j in t..m.cols {
                    if !m.at(i, j).is_zero() {
                        pivot = match pivot {
                            Some((pi, pj)) if m.at(pi, pj).abs() <= m.at(i, j).abs() => {
                                Some((pi, pj))
                            }
                            _ => Some((i, j)),
                        };
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            m.swap_rows(t, pi);
            col_swap(&mut m, &mut v, &mut vinv, t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m.rows {
                    if !m.at(i, t).is_zero() {
                        let q = m.at(i, t).div_floor(m.at(t, t));
                        m.row_sub(i, t, &q);
                        if !m.at(i, t).is_zero() {
                            m.swap_rows(t, i);
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..m.cols {
                    if !m.at(t, j).is_zero() {
                        let q = m.at(t, j).div_floor(m.at(t, t));
                        col_sub(&mut m, &mut v, &mut vinv, j, t, &q);
                        if !m.at(t, j).is_zero() {
                            col_swap(&mut m, &mut v, &mut vinv, t, j);
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
            t += 1;
        }
        let d = (0..t_max).map(|i| m.at(i, i).clone()).collect();
        (d, v, vinv)
    }
}

/// Dot product of integer slices.
pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
pub(crate) fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub(crate) fn big_to_rat(x: &BigInt) -> Rat {
    Rat::from_integer(x.clone())
}

/// Solve `a * x = b` over the rationals by Gaussian elimination.
/// Returns `None` when the system is singular or inconsistent.
pub(crate) fn solve_rational(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    if n == 0 {
        return Some(vec![]);
    }
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let v = &m[col][j] * &f;
                    m[i][j] = &m[i][j] - v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Any particular solution of `a * x = b` for a possibly singular or
/// rectangular system; `None` when inconsistent. Free variables are zero.
pub(crate) fn solve_rational_general(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let m = a.len();
    assert_eq!(b.len(), m);
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(row, p);
        let piv = aug[row][col].clone();
        for j in col..=n {
            aug[row][j] = &aug[row][j] / &piv;
        }
        for i in 0..m {
            if i != row && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in col..=n {
                    let v = &aug[row][j] * &f;
                    aug[i][j] = &aug[i][j] - v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == m {
            break;
        }
    }
    // inconsistent if a zero row has nonzero rhs
    for i in row..m {
        if !aug[i][n].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); n];
    for (r, c) in pivots {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn hnf_transform_invariant() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let (h, u) = a.hnf_with_transform();
        assert_eq!(u.mul(&a), h);
        assert_eq!(a.rank(), 3);
    }

    #[test]
    fn hnf_canonical_reduction() {
        let a = m(&[&[0, 1, 5], &[3, 2, 1]]);
        let (h, _) = a.hnf_with_transform();
        assert_eq!(h.rows_vec(), m(&[&[3, 0, -9], &[0, 1, 5]]).rows_vec());
    }

    #[test]
    fn left_kernel_annihilates() {
        let a = m(&[&[1, 2], &[2, 4], &[3, 5]]);
        let k = a.left_kernel();
        assert_eq!(k.nrows(), 1);
        let prod = k.mul(&a);
        assert!(prod.rows_vec().iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn right_kernel_of_row() {
        let a = m(&[&[3, 5]]);
        let k = a.right_kernel();
        assert_eq!(k.nrows(), 1);
        assert_eq!(k.row_vec(0), vec![BigInt::from(5), BigInt::from(-3)]);
    }

    #[test]
    fn smith_diagonalize_reconstruction() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12]]);
        let (d, v, vinv) = a.smith_diagonalize();
        assert_eq!(v.mul(&vinv), Mat::identity(3));
        assert_eq!(vinv.mul(&v), Mat::identity(3));
        // a*v = u^-1 * diag(d): columns past the rank vanish
        let av = a.mul(&v);
        let k = d.iter().filter(|x| !x.is_zero()).count();
        assert_eq!(k, a.rank());
        for i in 0..av.nrows() {
            for j in k..av.ncols() {
                assert!(av.at(i, j).is_zero());
            }
        }
    }

    #[test]
    fn solve_rational_2x2() {
        let a = vec![vec![rat(2), rat(1)], vec![rat(1), rat(3)]];
        let b = vec![rat(5), rat(10)];
        let x = solve_rational(&a, &b).unwrap();
        assert_eq!(x, vec![rat(1), rat(3)]);
    }

}
