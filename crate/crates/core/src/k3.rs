//! Degree and slope arithmetic on a polarized K3 Picard lattice, the finite
//! destabilizer enumeration behind the rank-2 stability criterion, and the
//! polarization-chamber genericity check.
//!
//! The key finiteness fact: the orthogonal complement of the ample class is
//! negative definite, so each degree slice `{D : D.A = d, D^2 >= m}` is a
//! lattice-point problem in an ellipsoid and can be enumerated exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{IntLattice, LatticeVector};
use crate::matrix::{big_to_rat, dot, solve_rational, Mat, Rat};

/// A K3 Picard lattice together with an ample class of positive square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizedK3 {
    pic: IntLattice,
    ample: LatticeVector,
}

impl PolarizedK3 {
    /// Validates: even lattice, signature `(1, rank-1, 0)`, `ample^2 > 0`.
    /// Those conditions force `ample^⊥` to be negative definite, which the
    /// enumerations below rely on.
    pub fn new(pic: IntLattice, ample: LatticeVector) -> Result<Self> {
        if !pic.is_even() {
            return Err(Error::InvalidLattice("picard lattice must be even".into()));
        }
        if pic.rank() == 0 {
            return Err(Error::InvalidLattice("picard lattice has rank 0".into()));
        }
        if pic.signature() != (1, pic.rank() - 1, 0) {
            return Err(Error::InvalidLattice(format!(
                "signature {:?} is not (1, rank-1, 0)",
                pic.signature()
            )));
        }
        if !pic.square(&ample)?.is_positive() {
            return Err(Error::InvalidLattice(
                "ample class must have positive square".into(),
            ));
        }
        Ok(PolarizedK3 { pic, ample })
    }

    pub fn pic(&self) -> &IntLattice {
        &self.pic
    }

    pub fn ample(&self) -> &LatticeVector {
        &self.ample
    }

    /// `D . ample`.
    pub fn degree(&self, d: &LatticeVector) -> Result<BigInt> {
        self.pic.gram_eval(d, &self.ample)
    }

    /// `(c1 . ample) / rk` as an exact rational.
    pub fn slope(&self, c1: &LatticeVector, rk: u32) -> Result<BigRational> {
        if rk == 0 {
            return Err(Error::HypothesisViolation("rank must be >= 1".into()));
        }
        Ok(Rat::new(self.degree(c1)?, BigInt::from(rk)))
    }

    /// All integer classes `D` with `D.ample == d` and `D^2 >= min_square`,
    /// in lexicographic coordinate order. Complete: the slice is finite
    /// because `ample^⊥` is negative definite.
    pub fn enum_degree_slice(&self, d: &BigInt, min_square: &BigInt) -> Result<Vec<LatticeVector>> {
        if !d.is_positive() {
            return Err(Error::HypothesisViolation("degree must be positive".into()));
        }
        self.degree_slice_any(d, min_square)
    }

    fn pairing_vector(&self) -> Vec<BigInt> {
        let n = self.pic.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.pic.gram_entry(i, j) * &self.ample.coords()[j])
                    .sum()
            })
            .collect()
    }

    fn degree_slice_any(&self, d: &BigInt, min_square: &BigInt) -> Result<Vec<LatticeVector>> {
        let n = self.pic.rank();
        // a = gram * ample; the slice is { x : a.x = d }
        let a = self.pairing_vector();
        let (h, u) = Mat::from_rows(vec![a.clone()])
            .transpose()
            .hnf_with_transform();
        let g = h.at(0, 0).clone();
        if g.is_zero() {
            return Err(Error::Inconsistent("degenerate polarization".into()));
        }
        if !(d % &g).is_zero() {
            return Ok(vec![]);
        }
        // particular solution x0 with a.x0 = d; rows 1.. of u span the kernel
        let scale = d / &g;
        let x0: Vec<BigInt> = u.row(0).iter().map(|c| c * &scale).collect();
        debug_assert_eq!(dot(&a, &x0), *d);
        let kernel: Vec<Vec<BigInt>> = (1..u.nrows()).map(|i| u.row_vec(i)).collect();
        let m = kernel.len();
        if m == 0 {
            let x0v = LatticeVector::new(x0);
            return Ok(if self.pic.square(&x0v)? >= *min_square {
                vec![x0v]
            } else {
                vec![]
            });
        }
        let kmat = Mat::from_rows(kernel.clone());
        // Q = K G K^T is negative definite on the kernel coordinates
        let q = kmat.mul(self.pic.gram_mat()).mul(&kmat.transpose());
        let gx0: Vec<BigInt> = (0..n)
            .map(|i| (0..n).map(|j| self.pic.gram_entry(i, j) * &x0[j]).sum())
            .collect();
        let kg_x0: Vec<Rat> = kernel.iter().map(|k| big_to_rat(&dot(k, &gx0))).collect();
        let q_rat: Vec<Vec<Rat>> = (0..m)
            .map(|i| (0..m).map(|j| big_to_rat(q.at(i, j))).collect())
            .collect();
        // w solves Q w = K G x0; then q(x0 + K z) = (z+w)^T Q (z+w) + d^2/A^2
        let w = solve_rational(&q_rat, &kg_x0)
            .ok_or_else(|| Error::Inconsistent("degenerate slice form".into()))?;
        let q0 = {
            let qx0 = big_to_rat(&self.pic.square(&LatticeVector::new(x0.clone()))?);
            let wt_kgx0: Rat = w.iter().zip(&kg_x0).map(|(a, b)| a * b).sum();
            qx0 - wt_kgx0
        };
        let radius = &q0 - &big_to_rat(min_square);
        if radius.is_negative() {
            return Ok(vec![]);
        }
        let p: Vec<Vec<Rat>> = q_rat
            .iter()
            .map(|row| row.iter().map(|x| -x.clone()).collect())
            .collect();
        let zs = ellipsoid_points(&p, &w, &radius);
        let mut out: Vec<LatticeVector> = zs
            .into_iter()
            .map(|z| {
                let mut coords = x0.clone();
                for (zi, krow) in z.iter().zip(&kernel) {
                    for (c, k) in coords.iter_mut().zip(krow) {
                        *c += zi * k;
                    }
                }
                LatticeVector::new(coords)
            })
            .filter(|v| {
                self.pic
                    .square(v)
                    .map(|s| s >= *min_square)
                    .unwrap_or(false)
            })
            .collect();
        out.sort();
        out.dedup();
        debug_assert!(out.iter().all(|v| self.degree(v).unwrap() == *d));
        Ok(out)
    }

    /// All nonzero `D` with `D.ample == 0` and `-delta <= D^2 < 0`.
    fn degree_zero_shell(&self, delta: &BigInt) -> Result<Vec<LatticeVector>> {
        if !delta.is_positive() {
            return Ok(vec![]);
        }
        let n = self.pic.rank();
        let a = self.pairing_vector();
        let kernel_mat = Mat::from_rows(vec![a]).right_kernel();
        let kernel: Vec<Vec<BigInt>> = (0..kernel_mat.nrows())
            .map(|i| kernel_mat.row_vec(i))
            .collect();
        let m = kernel.len();
        if m == 0 {
            return Ok(vec![]);
        }
        let kmat = Mat::from_rows(kernel.clone());
        let q = kmat.mul(self.pic.gram_mat()).mul(&kmat.transpose());
        let p: Vec<Vec<Rat>> = (0..m)
            .map(|i| (0..m).map(|j| -big_to_rat(q.at(i, j))).collect())
            .collect();
        let w = vec![Rat::zero(); m];
        let zs = ellipsoid_points(&p, &w, &big_to_rat(delta));
        let mut out = Vec::new();
        for z in zs {
            if z.iter().all(|x| x.is_zero()) {
                continue;
            }
            let mut coords = vec![BigInt::zero(); n];
            for (zi, krow) in z.iter().zip(&kernel) {
                for (c, k) in coords.iter_mut().zip(krow) {
                    *c += zi * k;
                }
            }
            out.push(LatticeVector::new(coords));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Rank-2 slope-stability pre-check by finite enumeration of candidate
    /// effective classes of degree up to the slope. Candidates of degree `d`
    /// are classes with `D^2 >= -2` (possible primes) together with all sums
    /// of candidates of smaller positive degrees. An empty candidate set
    /// certifies stability; witnesses are only potential destabilizers and
    /// still require a geometric containment check outside this tool.
    pub fn destabilizer_search(&self, c1: &LatticeVector, rk: u32) -> Result<DestabilizerReport> {
        if rk != 2 {
            return Err(Error::UnsupportedRank {
                got: rk as usize,
                context: "destabilizer search is specific to rank 2".into(),
            });
        }
        let mu = self.slope(c1, rk)?;
        if !mu.is_positive() {
            return Err(Error::HypothesisViolation(format!(
                "slope {mu} is not positive"
            )));
        }
        let d_max_big = mu.floor().to_integer();
        if d_max_big > BigInt::from(10_000) {
            return Err(Error::Overflow(format!(
                "degree bound {d_max_big} is too large to enumerate"
            )));
        }
        let d_max = usize::try_from(&d_max_big).unwrap_or(0);
        let mut by_degree: Vec<Vec<(LatticeVector, bool)>> = Vec::new(); // level d at index d-1
        for d in 1..=d_max {
            let primes = self.degree_slice_any(&BigInt::from(d as u64), &BigInt::from(-2))?;
            let mut level: Vec<(LatticeVector, bool)> = Vec::new();
            for d1 in 1..=d / 2 {
                let d2 = d - d1;
                for (a, _) in &by_degree[d1 - 1] {
                    for (b, _) in &by_degree[d2 - 1] {
                        level.push((a.add(b), true));
                    }
                }
            }
            for p in primes {
                level.push((p, false));
            }
            // canonical order; a class that can be prime is never flagged
            // composite, so primes (flag false) win the dedup
            level.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
            level.dedup_by(|a, b| a.0 == b.0);
            by_degree.push(level);
        }
        let mut witnesses = Vec::new();
        for (i, level) in by_degree.iter().enumerate() {
            for (class, composite) in level {
                witnesses.push(DestabilizerWitness {
                    class: class.clone(),
                    degree: BigInt::from(i as u64 + 1),
                    square: self.pic.square(class)?,
                    composite: *composite,
                });
            }
        }
        let verdict = if witnesses.is_empty() {
            StabilityVerdict::Stable
        } else {
            StabilityVerdict::Inconclusive
        };
        Ok(DestabilizerReport { verdict, witnesses })
    }

    /// Wall check for the polarization: with `delta = 2 rk c2 - (rk-1) c1^2`,
    /// true iff there is no `D != 0` with `-delta <= D^2 < 0` and
    /// `D.ample == 0`.
    pub fn chamber_check(&self, rk: u32, c1: &LatticeVector, c2: &BigInt) -> Result<bool> {
        if rk == 0 {
            return Err(Error::HypothesisViolation("rank must be >= 1".into()));
        }
        let c1sq = self.pic.square(c1)?;
        let delta = BigInt::from(2 * rk) * c2 - BigInt::from(rk - 1) * c1sq;
        Ok(self.degree_zero_shell(&delta)?.is_empty())
    }
}

/// Minimal self-intersection of an irreducible curve class on a K3: a class
/// with `D^2 < -2` cannot be prime.
pub fn can_be_prime_square(d_square: &BigInt) -> bool {
    *d_square >= BigInt::from(-2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityVerdict {
    Stable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestabilizerWitness {
    pub class: LatticeVector,
    pub degree: BigInt,
    pub square: BigInt,
    pub composite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestabilizerReport {
    pub verdict: StabilityVerdict,
    pub witnesses: Vec<DestabilizerWitness>,
}

/// All integer points `x` with `(x+w)^T P (x+w) <= r` for a positive
/// definite rational `P`. Exact: coordinate intervals are found by outward
/// scanning on the quadratic condition, never by square roots.
fn ellipsoid_points(p: &[Vec<Rat>], w: &[Rat], r: &Rat) -> Vec<Vec<BigInt>> {
    let m = p.len();
    if r.is_negative() {
        return vec![];
    }
    if m == 0 {
        return vec![vec![]];
    }
    // Jacobi decomposition q(y) = sum_i d_i (y_i + sum_{j>i} u_ij y_j)^2
    let mut a: Vec<Vec<Rat>> = p.to_vec();
    let mut diag = vec![Rat::zero(); m];
    let mut u = vec![vec![Rat::zero(); m]; m];
    for i in 0..m {
        diag[i] = a[i][i].clone();
        assert!(
            diag[i].is_positive(),
            "form is not positive definite; the point set would be infinite"
        );
        for j in i + 1..m {
            u[i][j] = &a[i][j] / &diag[i];
        }
        for j in i + 1..m {
            for k in j..m {
                let v = &a[i][j] * &a[i][k] / &diag[i];
                a[j][k] = &a[j][k] - &v;
                if j != k {
                    a[k][j] = a[j][k].clone();
                }
            }
        }
    }

    struct Ctx<'a> {
        diag: &'a [Rat],
        u: &'a [Vec<Rat>],
        w: &'a [Rat],
        out: Vec<Vec<BigInt>>,
    }
    // choose coordinates from the last index down; the i-th square only
    // involves y_j with j >= i
    fn recurse(ctx: &mut Ctx, i: usize, rem: &Rat, x: &mut Vec<BigInt>) {
        let m = ctx.diag.len();
        let mut offset = ctx.w[i].clone();
        for j in i + 1..m {
            offset += &ctx.u[i][j] * (big_to_rat(&x[j]) + &ctx.w[j]);
        }
        let term = |t: &BigInt| -> Rat {
            let y = big_to_rat(t) + &offset;
            &ctx.diag[i] * &y * &y
        };
        let center = (-offset.clone()).floor().to_integer();
        for start_up in [false, true] {
            let mut t = if start_up {
                &center + 1
            } else {
                center.clone()
            };
            loop {
                let tv = term(&t);
                if tv > *rem {
                    break;
                }
                x[i] = t.clone();
                let new_rem = rem - tv;
                if i == 0 {
                    ctx.out.push(x.clone());
                } else {
                    recurse(ctx, i - 1, &new_rem, x);
                }
                if start_up {
                    t += 1;
                } else {
                    t -= 1;
                }
            }
        }
    }
    let mut ctx = Ctx {
        diag: &diag,
        u: &u,
        w,
        out: Vec::new(),
    };
    let mut x = vec![BigInt::zero(); m];
    recurse(&mut ctx, m - 1, r, &mut x);
    ctx.out
}
