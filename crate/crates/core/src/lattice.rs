//! Finite-rank integer lattices with symmetric bilinear forms.
//!
//! Sublattices are stored in row Hermite normal form, so two sublattices
//! are equal as sets of vectors iff their stored generators are equal.
//! Every operation is pure; nothing here ever touches floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{big_to_rat, Mat, Rat};

/// Coordinate vector in the ambient basis of some lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticeVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(len: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn to_i64(&self) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|x| {
                i64::try_from(x).map_err(|_| Error::DataFormat(format!("{x} exceeds i64 range")))
            })
            .collect()
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector::from_i64(&v)
    }
}

/// Integer lattice of finite rank with a symmetric Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    rank: usize,
    gram: Mat,
    basis_names: Option<Vec<String>>,
}

/// JSON form: `{"rank": n, "gram": [[int,...],...], "basis_names": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_names: Option<Vec<String>>,
}

impl IntLattice {
    pub fn new(gram: Vec<Vec<BigInt>>) -> Result<Self> {
        let rank = gram.len();
        if gram.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidLattice("gram matrix is not square".into()));
        }
        let gram = Mat::from_rows(gram);
        if !gram.is_symmetric() {
            return Err(Error::InvalidLattice("gram matrix is not symmetric".into()));
        }
        Ok(IntLattice {
            rank,
            gram,
            basis_names: None,
        })
    }

    pub fn from_i64(gram: &[&[i64]]) -> Result<Self> {
        IntLattice::new(
            gram.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: names.len(),
            });
        }
        self.basis_names = Some(names);
        Ok(self)
    }

    pub fn standard(rank: usize) -> Self {
        IntLattice {
            rank,
            gram: Mat::identity(rank),
            basis_names: None,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis_names(&self) -> Option<&[String]> {
        self.basis_names.as_deref()
    }

    pub fn gram_entry(&self, i: usize, j: usize) -> &BigInt {
        self.gram.at(i, j)
    }

    pub fn gram_rows(&self) -> Vec<Vec<BigInt>> {
        self.gram.rows_vec()
    }

    pub(crate) fn gram_mat(&self) -> &Mat {
        &self.gram
    }

    pub fn to_json(&self) -> Result<LatticeJson> {
        let gram = self
            .gram
            .rows_vec()
            .into_iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        i64::try_from(x)
                            .map_err(|_| Error::DataFormat("gram entry exceeds i64".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeJson {
            rank: self.rank,
            gram,
            basis_names: self.basis_names.clone(),
        })
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self> {
        if j.gram.len() != j.rank {
            return Err(Error::DataFormat(format!(
                "declared rank {} does not match gram of size {}",
                j.rank,
                j.gram.len()
            )));
        }
        let l = IntLattice::new(
            j.gram
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )?;
        match &j.basis_names {
            Some(names) => l.with_names(names.clone()),
            None => Ok(l),
        }
    }

    fn check_len(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `u^T * gram * v`.
    pub fn gram_eval(&self, u: &LatticeVector, v: &LatticeVector) -> Result<BigInt> {
        self.check_len(u)?;
        self.check_len(v)?;
        let mut acc = BigInt::zero();
        for i in 0..self.rank {
            if u.coords()[i].is_zero() {
                continue;
            }
            for j in 0..self.rank {
                acc += &u.coords()[i] * self.gram.at(i, j) * &v.coords()[j];
            }
        }
        Ok(acc)
    }

    pub fn square(&self, v: &LatticeVector) -> Result<BigInt> {
        self.gram_eval(v, v)
    }

    /// Even iff every diagonal entry is even.
    pub fn is_even(&self) -> bool {
        (0..self.rank).all(|i| self.gram.at(i, i).is_even())
    }

    /// Inertia counts `(positive, negative, zero)` by exact rational
    /// congruence diagonalization; invariant under change of basis.
    pub fn signature(&self) -> (usize, usize, usize) {
        let n = self.rank;
        let mut m: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| big_to_rat(self.gram.at(i, j))).collect())
            .collect();
        let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
        for i in 0..n {
            if m[i][i].is_zero() {
                if let Some(j) = (i + 1..n).find(|&j| !m[j][j].is_zero()) {
                    m.swap(i, j);
                    for row in m.iter_mut() {
                        row.swap(i, j);
                    }
                } else if let Some(j) = (i + 1..n).find(|&j| !m[i][j].is_zero()) {
                    // diagonal is zero but the row is not: e_i += e_j makes
                    // the new diagonal entry 2*m[i][j] != 0
                    for k in 0..n {
                        let v = m[j][k].clone();
                        m[i][k] += v;
                    }
                    for row in m.iter_mut() {
                        let v = row[j].clone();
                        row[i] += v;
                    }
                } else {
                    zero += 1;
                    continue;
                }
            }
            let p = m[i][i].clone();
            if p.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for j in i + 1..n {
                if m[i][j].is_zero() {
                    continue;
                }
                let f = &m[i][j] / &p;
                for k in 0..n {
                    let v = &m[i][k] * &f;
                    m[j][k] = &m[j][k] - v;
                }
                for row in m.iter_mut() {
                    let v = &row[i] * &f;
                    row[j] = &row[j] - v;
                }
            }
        }
        (pos, neg, zero)
    }

    /// All `v` with `v^2 == m` and `max|coord| <= bound`, in lexicographic
    /// order. Pure box enumeration; completeness within the box only.
    pub fn enum_vectors_with_square(&self, m: &BigInt, bound: u32) -> Vec<LatticeVector> {
        let mut out = Vec::new();
        let b = i64::from(bound);
        let mut coords = vec![-b; self.rank];
        if self.rank == 0 {
            if m.is_zero() {
                out.push(LatticeVector::zero(0));
            }
            return out;
        }
        'outer: loop {
            let v = LatticeVector(coords.iter().map(|&x| BigInt::from(x)).collect());
            if self.square(&v).expect("length matches rank") == *m {
                out.push(v);
            }
            // odometer with the first coordinate most significant
            for i in (0..self.rank).rev() {
                if coords[i] < b {
                    coords[i] += 1;
                    for c in coords.iter_mut().skip(i + 1) {
                        *c = -b;
                    }
                    continue 'outer;
                }
            }
            break;
        }
        out
    }

    /// gcd of the coordinates of a nonzero vector.
    pub fn vector_divisibility(&self, v: &LatticeVector) -> Result<BigInt> {
        self.check_len(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(v.coords()
            .iter()
            .fold(BigInt::zero(), |acc, x| acc.gcd(x)))
    }

    /// Whether the form is nondegenerate (no radical).
    pub fn is_nondegenerate(&self) -> bool {
        self.signature().2 == 0
    }
}

/// Sublattice of an ambient [`IntLattice`], stored as independent rows in
/// canonical Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: IntLattice,
    rows: Vec<LatticeVector>,
}

/// JSON form: `{"gens": [[int,...],...]}` relative to a named or inline
/// ambient lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SublatticeJson {
    pub ambient: LatticeJson,
    pub gens: Vec<Vec<i64>>,
}

impl Sublattice {
    /// Generators need not be independent; they are Hermite-reduced and
    /// zero rows dropped.
    pub fn new(ambient: IntLattice, gens: Vec<LatticeVector>) -> Result<Self> {
        for g in &gens {
            ambient.check_len(g)?;
        }
        let mat = if gens.is_empty() {
            Vec::new()
        } else {
            Mat::from_rows(gens.into_iter().map(|g| g.0).collect()).hnf_rows()
        };
        Ok(Sublattice {
            ambient,
            rows: mat.into_iter().map(LatticeVector).collect(),
        })
    }

    pub fn full(ambient: IntLattice) -> Self {
        let rows = (0..ambient.rank())
            .map(|i| {
                let mut v = vec![BigInt::zero(); ambient.rank()];
                v[i] = BigInt::one();
                LatticeVector(v)
            })
            .collect();
        Sublattice { ambient, rows }
    }

    pub fn ambient(&self) -> &IntLattice {
        &self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn gens(&self) -> &[LatticeVector] {
        &self.rows
    }

    fn gens_mat(&self) -> Mat {
        Mat::from_rows(self.rows.iter().map(|r| r.0.clone()).collect())
    }

    fn same_ambient(&self, other: &Sublattice) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    /// Primitive closure: `(self ⊗ Q) ∩ ambient`, same rational span.
    pub fn saturate(&self) -> Sublattice {
        if self.rows.is_empty() {
            return self.clone();
        }
        let a = self.gens_mat();
        let (d, _, vinv) = a.smith_diagonalize();
        let k = d.iter().filter(|x| !x.is_zero()).count();
        let rows: Vec<Vec<BigInt>> = (0..k).map(|i| vinv.row_vec(i)).collect();
        let rows = Mat::from_rows(rows).hnf_rows();
        Sublattice {
            ambient: self.ambient.clone(),
            rows: rows.into_iter().map(LatticeVector).collect(),
        }
    }

    /// True iff saturation does not grow the row span over Z.
    pub fn is_primitive(&self) -> bool {
        self.saturate().rows == self.rows
    }

    /// Exact lattice intersection.
    pub fn intersect(&self, other: &Sublattice) -> Result<Sublattice> {
        self.same_ambient(other)?;
        if self.rows.is_empty() || other.rows.is_empty() {
            return Sublattice::new(self.ambient.clone(), vec![]);
        }
        let a = self.gens_mat();
        let b = other.gens_mat();
        let stacked = Mat::from_rows(
            a.rows_vec()
                .into_iter()
                .chain(b.rows_vec())
                .collect::<Vec<_>>(),
        );
        let kernel = stacked.left_kernel();
        // for (x | y) in the kernel, x*a = -y*b lies in both sublattices
        let mut gens = Vec::new();
        for i in 0..kernel.nrows() {
            let row = kernel.row(i);
            let x = &row[..a.nrows()];
            let mut v = vec![BigInt::zero(); self.ambient.rank()];
            for (xi, arow) in x.iter().zip(a.rows_vec()) {
                for (vj, aj) in v.iter_mut().zip(arow) {
                    *vj += xi * aj;
                }
            }
            gens.push(LatticeVector(v));
        }
        Sublattice::new(self.ambient.clone(), gens)
    }

    /// `{ v : <v, s> = 0 for all s in self }`; saturated by construction.
    pub fn orth_complement(&self) -> Sublattice {
        if self.rows.is_empty() {
            return Sublattice::full(self.ambient.clone());
        }
        let pairing = self.gens_mat().mul(self.ambient.gram_mat());
        let kernel = pairing.right_kernel();
        Sublattice {
            ambient: self.ambient.clone(),
            rows: (0..kernel.nrows())
                .map(|i| LatticeVector(kernel.row_vec(i)))
                .collect(),
        }
    }

    /// Express `v` in terms of the stored generators over Q, if it lies in
    /// the rational span.
    pub fn rational_coords(&self, v: &LatticeVector) -> Result<Option<Vec<BigRational>>> {
        self.ambient.check_len(v)?;
        let r = self.rank();
        if r == 0 {
            return Ok(if v.is_zero() { Some(vec![]) } else { None });
        }
        // Solve x * G = v over Q via the normal equations against G's rows.
        let g = self.gens_mat();
        let gt = g.transpose();
        let ggt = g.mul(&gt);
        let a: Vec<Vec<Rat>> = (0..r)
            .map(|i| (0..r).map(|j| big_to_rat(ggt.at(i, j))).collect())
            .collect();
        let b: Vec<Rat> = (0..r)
            .map(|i| big_to_rat(&crate::matrix::dot(g.row(i), v.coords())))
            .collect();
        let Some(x) = crate::matrix::solve_rational(&a, &b) else {
            return Ok(None);
        };
        // verify: x * g == v (membership in the rational span)
        for j in 0..self.ambient.rank() {
            let mut acc = Rat::zero();
            for (xi, grow) in x.iter().zip(g.rows_vec()) {
                acc += xi * big_to_rat(&grow[j]);
            }
            if acc != big_to_rat(&v.coords()[j]) {
                return Ok(None);
            }
        }
        Ok(Some(x))
    }
}

/// Orthogonal-configuration test: with `n0 = intersect(np, nm)` and
/// `r± = n± ∩ n∓^⊥`, both sides must satisfy `rank(n±) = rank(n0) + rank(r±)`.
pub fn is_orthogonal_configuration(np: &Sublattice, nm: &Sublattice) -> Result<bool> {
    let n0 = np.intersect(nm)?;
    let rp = np.intersect(&nm.orth_complement())?;
    let rm = nm.intersect(&np.orth_complement())?;
    Ok(np.rank() == n0.rank() + rp.rank() && nm.rank() == n0.rank() + rm.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn m_plus() -> IntLattice {
        IntLattice::from_i64(&[&[0, 3], &[3, 2]]).unwrap()
    }

    pub(crate) fn m_minus() -> IntLattice {
        IntLattice::from_i64(&[&[0, 4], &[4, 2]]).unwrap()
    }

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    #[test]
    fn gram_eval_reference_squares() {
        let lp = m_plus();
        assert_eq!(lp.square(&v(&[-1, 1])).unwrap(), BigInt::from(-4));
        assert_eq!(lp.square(&v(&[5, -3])).unwrap(), BigInt::from(-72));
        assert_eq!(lp.square(&v(&[0, 0])).unwrap(), BigInt::zero());
        let lm = m_minus();
        assert_eq!(lm.square(&v(&[5, -2])).unwrap(), BigInt::from(-72));
    }

    #[test]
    fn gram_eval_dimension_mismatch() {
        let lp = m_plus();
        assert!(matches!(
            lp.gram_eval(&v(&[1]), &v(&[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(m_plus().signature(), (1, 1, 0));
        let neg = IntLattice::from_i64(&[&[-72]]).unwrap();
        assert_eq!(neg.signature(), (0, 1, 0));
        let empty = IntLattice::from_i64(&[]).unwrap();
        assert_eq!(empty.signature(), (0, 0, 0));
        let degenerate = IntLattice::from_i64(&[&[0, 0], &[0, 2]]).unwrap();
        assert_eq!(degenerate.signature(), (1, 0, 1));
        let hyperbolic = IntLattice::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(hyperbolic.signature(), (1, 1, 0));
    }

    #[test]
    fn saturate_examples() {
        let z2 = IntLattice::standard(2);
        let s = Sublattice::new(z2.clone(), vec![v(&[2, 0])]).unwrap();
        let sat = s.saturate();
        assert_eq!(sat.gens(), &[v(&[1, 0])]);
        assert!(sat.is_primitive());
        assert!(!s.is_primitive());

        let s = Sublattice::new(m_plus(), vec![v(&[5, -3])]).unwrap();
        assert_eq!(s.saturate().gens(), s.gens());
        assert!(s.is_primitive());
    }

    #[test]
    fn full_lattice_is_primitive() {
        assert!(Sublattice::full(m_plus()).is_primitive());
        let s = Sublattice::new(IntLattice::standard(2), vec![v(&[2, 2])]).unwrap();
        assert!(!s.is_primitive());
    }

    #[test]
    fn intersect_examples() {
        let z2 = IntLattice::standard(2);
        let s1 = Sublattice::new(z2.clone(), vec![v(&[1, 0])]).unwrap();
        let s2 = Sublattice::new(z2.clone(), vec![v(&[0, 1])]).unwrap();
        assert_eq!(s1.intersect(&s2).unwrap().rank(), 0);
        assert_eq!(s1.intersect(&s1).unwrap(), s1);

        let other = Sublattice::new(m_plus(), vec![v(&[1, 0])]).unwrap();
        assert!(matches!(s1.intersect(&other), Err(Error::AmbientMismatch)));
    }

    #[test]
    fn intersect_with_index() {
        // span{(2,0),(0,1)} ∩ span{(1,1)} = span{(2,2)}
        let z2 = IntLattice::standard(2);
        let s1 = Sublattice::new(z2.clone(), vec![v(&[2, 0]), v(&[0, 1])]).unwrap();
        let s2 = Sublattice::new(z2, vec![v(&[1, 1])]).unwrap();
        let i = s1.intersect(&s2).unwrap();
        assert_eq!(i.gens(), &[v(&[2, 2])]);
    }

    #[test]
    fn orth_complement_examples() {
        let s = Sublattice::new(m_plus(), vec![v(&[1, 0])]).unwrap();
        let c = s.orth_complement();
        assert_eq!(c.gens(), &[v(&[1, 0])]);
        assert_eq!(m_plus().gram_eval(&v(&[1, 0]), &v(&[1, 0])).unwrap(), BigInt::zero());

        let ample = Sublattice::new(m_plus(), vec![v(&[1, 1])]).unwrap();
        assert_eq!(ample.orth_complement().gens(), &[v(&[5, -3])]);

        let trivial = Sublattice::new(m_plus(), vec![]).unwrap();
        assert_eq!(trivial.orth_complement().rank(), 2);
    }

    #[test]
    fn double_complement_is_saturation() {
        let z2 = IntLattice::standard(2);
        let s = Sublattice::new(z2, vec![v(&[2, 0])]).unwrap();
        assert_eq!(s.orth_complement().orth_complement(), s.saturate());
    }

    #[test]
    fn orthogonal_configuration_examples() {
        let z2 = IntLattice::standard(2);
        let np = Sublattice::new(z2.clone(), vec![v(&[1, 0])]).unwrap();
        assert!(is_orthogonal_configuration(&np, &np).unwrap());
        let nm = Sublattice::new(z2, vec![v(&[1, 1])]).unwrap();
        // lines meeting only at 0 and not orthogonal: rank defect
        assert!(!is_orthogonal_configuration(&np, &nm).unwrap());
    }

    #[test]
    fn enum_vectors_examples() {
        let lp = m_plus();
        assert!(lp
            .enum_vectors_with_square(&BigInt::from(-4), 3)
            .contains(&v(&[-1, 1])));
        assert!(lp
            .enum_vectors_with_square(&BigInt::from(-72), 5)
            .contains(&v(&[5, -3])));
        assert!(lp
            .enum_vectors_with_square(&BigInt::zero(), 1)
            .contains(&v(&[0, 0])));
        // lexicographic order
        let found = lp.enum_vectors_with_square(&BigInt::from(-4), 2);
        let mut sorted = found.clone();
        sorted.sort();
        assert_eq!(found, sorted);
    }

    #[test]
    fn vector_divisibility_examples() {
        let lp = m_plus();
        assert_eq!(lp.vector_divisibility(&v(&[5, -3])).unwrap(), BigInt::one());
        assert_eq!(
            lp.vector_divisibility(&v(&[10, -6])).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            lp.vector_divisibility(&v(&[0, 4])).unwrap(),
            BigInt::from(4)
        );
        assert!(matches!(
            lp.vector_divisibility(&v(&[0, 0])),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn evenness() {
        assert!(m_plus().is_even());
        assert!(!IntLattice::from_i64(&[&[1]]).unwrap().is_even());
    }
}
