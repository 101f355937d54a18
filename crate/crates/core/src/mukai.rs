//! Mukai-vector algebra on a K3 Picard lattice: pairing, construction from
//! Chern data, moduli-space dimensions, line-bundle twists, and the rank-1
//! intersection-lattice constraints on first Chern classes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{IntLattice, LatticeVector, Sublattice};

/// `(r, l, s)` with `l` in Picard coordinates and `s = chi - r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: BigInt,
    pub l: LatticeVector,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: impl Into<BigInt>, l: LatticeVector, s: impl Into<BigInt>) -> Self {
        MukaiVector {
            r: r.into(),
            l,
            s: s.into(),
        }
    }
}

/// JSON form: `{"r": int, "l": [int,...], "s": int}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MukaiVectorJson {
    pub r: i64,
    pub l: Vec<i64>,
    pub s: i64,
}

impl MukaiVector {
    pub fn to_json(&self) -> Result<MukaiVectorJson> {
        Ok(MukaiVectorJson {
            r: i64::try_from(&self.r).map_err(|_| Error::DataFormat("rank exceeds i64".into()))?,
            l: self.l.to_i64()?,
            s: i64::try_from(&self.s).map_err(|_| Error::DataFormat("s exceeds i64".into()))?,
        })
    }

    pub fn from_json(j: &MukaiVectorJson) -> Self {
        MukaiVector::new(j.r, LatticeVector::from_i64(&j.l), j.s)
    }
}

/// `(r,l,s).(r',l',s') = l.l' - r s' - r' s`.
pub fn mukai_pairing(pic: &IntLattice, v: &MukaiVector, w: &MukaiVector) -> Result<BigInt> {
    Ok(pic.gram_eval(&v.l, &w.l)? - &v.r * &w.s - &w.r * &v.s)
}

pub fn mukai_square(pic: &IntLattice, v: &MukaiVector) -> Result<BigInt> {
    mukai_pairing(pic, v, v)
}

/// Mukai vector of a sheaf with the given Chern data:
/// `chi = c1^2/2 + 2 rk - c2` and `v = (rk, c1, chi - rk)`.
pub fn mukai_from_chern(
    pic: &IntLattice,
    rk: u32,
    c1: &LatticeVector,
    c2: &BigInt,
) -> Result<MukaiVector> {
    let c1sq = pic.square(c1)?;
    if c1sq.is_odd() {
        return Err(Error::HypothesisViolation(
            "c1^2 must be even on an even lattice".into(),
        ));
    }
    let chi = &c1sq / 2 + BigInt::from(2 * rk) - c2;
    Ok(MukaiVector::new(
        BigInt::from(rk),
        c1.clone(),
        chi - BigInt::from(rk),
    ))
}

/// Read `c2` back off a Mukai vector: `c2 = c1^2/2 + 2 rk - (s + rk)`.
pub fn chern_c2(pic: &IntLattice, v: &MukaiVector) -> Result<BigInt> {
    let c1sq = pic.square(&v.l)?;
    Ok(&c1sq / 2 + 2 * &v.r - (&v.s + &v.r))
}

/// Moduli dimension `v^2 + 2` (conditional on nonemptiness, which this tool
/// does not decide).
pub fn moduli_dim(pic: &IntLattice, v: &MukaiVector) -> Result<BigInt> {
    Ok(mukai_square(pic, v)? + 2)
}

/// Moduli dimension from Chern data, cross-evaluated along two routes:
/// `v^2 + 2` and `(1-rk) c1^2 + 2 rk c2 - 2 rk^2 + 2`. Errors if the routes
/// disagree.
pub fn moduli_dim_from_chern(
    pic: &IntLattice,
    rk: u32,
    c1: &LatticeVector,
    c2: &BigInt,
) -> Result<BigInt> {
    let v = mukai_from_chern(pic, rk, c1, c2)?;
    let via_mukai = moduli_dim(pic, &v)?;
    let rk_big = BigInt::from(rk);
    let expanded = (BigInt::one() - &rk_big) * pic.square(c1)?
        + BigInt::from(2) * &rk_big * c2
        - BigInt::from(2) * &rk_big * &rk_big
        + BigInt::from(2);
    if via_mukai != expanded {
        return Err(Error::Inconsistent(format!(
            "dimension formulas disagree: {via_mukai} vs {expanded}"
        )));
    }
    Ok(via_mukai)
}

/// Rank-2 dimension via the Euler characteristic: `10 - 4 chi + c1^2`.
pub fn rank2_dim_via_chi(c1_square: &BigInt, chi: &BigInt) -> BigInt {
    BigInt::from(10) - BigInt::from(4) * chi + c1_square
}

/// Twist by a line bundle of first Chern class `m`:
/// `(r, l + r m, s + l.m + r m^2/2)`.
pub fn twist(pic: &IntLattice, v: &MukaiVector, m: &LatticeVector) -> Result<MukaiVector> {
    let msq = pic.square(m)?;
    let rmsq = &v.r * &msq;
    if rmsq.is_odd() {
        return Err(Error::HypothesisViolation(
            "r * m^2 must be even (even lattice)".into(),
        ));
    }
    let l = v.l.add(&m.scale(&v.r));
    let s = &v.s + pic.gram_eval(&v.l, m)? + rmsq / 2;
    Ok(MukaiVector {
        r: v.r.clone(),
        l,
        s,
    })
}

/// Constraints on the primitive generator of a rank-1 intersection lattice:
/// its square must be at most -8 and divisible by 4 for a two-dimensional
/// moduli space to be reachable after twisting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct N0ChernReport {
    pub generator: Vec<i64>,
    pub square: i64,
    pub square_at_most_minus8: bool,
    pub divisible_by_4: bool,
    pub pass: bool,
}

pub fn n0_chern_constraints(n0: &Sublattice) -> Result<N0ChernReport> {
    if n0.rank() != 1 {
        return Err(Error::UnsupportedRank {
            got: n0.rank(),
            context: "constraint applies to rank-1 intersection lattices".into(),
        });
    }
    let gen = n0.saturate().gens()[0].clone();
    let square = n0.ambient().square(&gen)?;
    let square_at_most_minus8 = square <= BigInt::from(-8);
    let divisible_by_4 = (&square % BigInt::from(4)).is_zero();
    Ok(N0ChernReport {
        generator: gen.to_i64()?,
        square: i64::try_from(&square)
            .map_err(|_| Error::DataFormat("square exceeds i64".into()))?,
        square_at_most_minus8,
        divisible_by_4,
        pass: square_at_most_minus8 && divisible_by_4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m_plus() -> IntLattice {
        IntLattice::from_i64(&[&[0, 3], &[3, 2]]).unwrap()
    }

    fn m_minus() -> IntLattice {
        IntLattice::from_i64(&[&[0, 4], &[4, 2]]).unwrap()
    }

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    #[test]
    fn pairing_reference_values() {
        let pic = m_plus();
        let vp = MukaiVector::new(2, v(&[-1, 1]), -1);
        assert_eq!(mukai_square(&pic, &vp).unwrap(), BigInt::zero());
        let vp_twisted = MukaiVector::new(2, v(&[5, -3]), -18);
        assert_eq!(mukai_square(&pic, &vp_twisted).unwrap(), BigInt::zero());
        let unit = MukaiVector::new(0, v(&[0, 0]), 1);
        assert_eq!(mukai_pairing(&pic, &unit, &unit).unwrap(), BigInt::zero());
    }

    #[test]
    fn pairing_dimension_mismatch() {
        let pic = m_plus();
        let bad = MukaiVector::new(1, v(&[1]), 0);
        let ok = MukaiVector::new(1, v(&[1, 0]), 0);
        assert!(mukai_pairing(&pic, &bad, &ok).is_err());
    }

    #[test]
    fn from_chern_reference_values() {
        let vp = mukai_from_chern(&m_plus(), 2, &v(&[-1, 1]), &BigInt::one()).unwrap();
        assert_eq!(vp, MukaiVector::new(2, v(&[-1, 1]), -1));
        let vm = mukai_from_chern(&m_minus(), 2, &v(&[1, 0]), &BigInt::from(2)).unwrap();
        assert_eq!(vm, MukaiVector::new(2, v(&[1, 0]), 0));
        let structure_sheaf = mukai_from_chern(&m_plus(), 1, &v(&[0, 0]), &BigInt::zero()).unwrap();
        assert_eq!(structure_sheaf, MukaiVector::new(1, v(&[0, 0]), 1));
    }

    #[test]
    fn moduli_dims() {
        let pic = m_plus();
        let vp = MukaiVector::new(2, v(&[-1, 1]), -1);
        assert_eq!(moduli_dim(&pic, &vp).unwrap(), BigInt::from(2));
        let vm = MukaiVector::new(2, v(&[1, 0]), 0);
        assert_eq!(moduli_dim(&m_minus(), &vm).unwrap(), BigInt::from(2));
        let line_bundle = MukaiVector::new(1, v(&[0, 0]), 1);
        assert_eq!(moduli_dim(&pic, &line_bundle).unwrap(), BigInt::zero());
    }

    #[test]
    fn dim_route_agreement() {
        assert_eq!(
            moduli_dim_from_chern(&m_plus(), 2, &v(&[-1, 1]), &BigInt::one()).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(
            moduli_dim_from_chern(&m_minus(), 2, &v(&[1, 0]), &BigInt::from(2)).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn dim_via_chi() {
        assert_eq!(
            rank2_dim_via_chi(&BigInt::from(-4), &BigInt::one()),
            BigInt::from(2)
        );
        assert_eq!(
            rank2_dim_via_chi(&BigInt::zero(), &BigInt::from(2)),
            BigInt::from(2)
        );
        assert_eq!(
            rank2_dim_via_chi(&BigInt::from(-8), &BigInt::zero()),
            BigInt::from(2)
        );
    }

    #[test]
    fn twist_reference_values() {
        let vp = MukaiVector::new(2, v(&[-1, 1]), -1);
        let out = twist(&m_plus(), &vp, &v(&[3, -2])).unwrap();
        assert_eq!(out, MukaiVector::new(2, v(&[5, -3]), -18));

        let vm = MukaiVector::new(2, v(&[1, 0]), 0);
        let out = twist(&m_minus(), &vm, &v(&[2, -1])).unwrap();
        assert_eq!(out, MukaiVector::new(2, v(&[5, -2]), -18));

        let id = twist(&m_plus(), &vp, &v(&[0, 0])).unwrap();
        assert_eq!(id, vp);
    }

    #[test]
    fn twist_preserves_pairing_spot() {
        let pic = m_plus();
        let a = MukaiVector::new(2, v(&[1, 2]), 3);
        let b = MukaiVector::new(-1, v(&[0, 5]), 2);
        let m = v(&[2, -3]);
        let before = mukai_pairing(&pic, &a, &b).unwrap();
        let after = mukai_pairing(
            &pic,
            &twist(&pic, &a, &m).unwrap(),
            &twist(&pic, &b, &m).unwrap(),
        )
        .unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn c2_read_back() {
        let pic = m_plus();
        for (rk, c1, c2) in [
            (2u32, v(&[-1, 1]), 1i64),
            (2, v(&[5, -3]), 19),
            (1, v(&[0, 0]), 0),
        ] {
            let mv = mukai_from_chern(&pic, rk, &c1, &BigInt::from(c2)).unwrap();
            assert_eq!(chern_c2(&pic, &mv).unwrap(), BigInt::from(c2));
        }
    }

    #[test]
    fn n0_constraint_examples() {
        let n0 = Sublattice::new(m_plus(), vec![v(&[5, -3])]).unwrap();
        let rep = n0_chern_constraints(&n0).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.square, -72);

        let boundary = Sublattice::full(IntLattice::from_i64(&[&[-8]]).unwrap());
        assert!(n0_chern_constraints(&boundary).unwrap().pass);

        let bad = Sublattice::full(IntLattice::from_i64(&[&[-6]]).unwrap());
        let rep = n0_chern_constraints(&bad).unwrap();
        assert!(!rep.pass);
        assert!(!rep.divisible_by_4);

        let rank2 = Sublattice::full(m_plus());
        assert!(matches!(
            n0_chern_constraints(&rank2),
            Err(Error::UnsupportedRank { .. })
        ));
    }
}
