//! Numeric intersection rings of building blocks: triple products, second
//! Chern pairings, threefold Riemann-Roch, restriction to the anticanonical
//! K3, blow-up and branched double-cover constructors, and the conormal /
//! inelasticity bookkeeping for Hartshorne-Serre data.
//!
//! Charts are validated at construction: the Noether identity `c1.c2 = 24`,
//! the restriction compatibility between triple products and the K3 Gram,
//! and for blow-ups the genus identity `chi(O(-E)) = g` all must hold, so a
//! sign error in the ring data fails loudly instead of propagating.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{IntLattice, LatticeVector};
use crate::matrix::{big_to_rat, Rat};

/// Fully symmetric rank-3 integer tensor, stored dense.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor3 {
    dim: usize,
    vals: Vec<BigInt>,
}

impl Tensor3 {
    pub fn new(dim: usize) -> Self {
        Tensor3 {
            dim,
            vals: vec![BigInt::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &BigInt {
        &self.vals[self.idx(i, j, k)]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, v: BigInt) {
        for (a, b, c) in [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ] {
            let ix = self.idx(a, b, c);
            self.vals[ix] = v.clone();
        }
    }

    pub fn from_sparse(dim: usize, entries: &[(usize, usize, usize, BigInt)]) -> Result<Self> {
        let mut t = Tensor3::new(dim);
        for (i, j, k, v) in entries {
            if *i >= dim || *j >= dim || *k >= dim {
                return Err(Error::DataFormat(format!(
                    "triple index ({i},{j},{k}) out of range for dimension {dim}"
                )));
            }
            let existing = t.get(*i, *j, *k);
            if !existing.is_zero() && existing != v {
                return Err(Error::DataFormat(format!(
                    "conflicting triple entries at ({i},{j},{k})"
                )));
            }
            t.set_sym(*i, *j, *k, v.clone());
        }
        Ok(t)
    }

    /// Canonical sparse encoding: entries with `i <= j <= k` and nonzero value.
    pub fn to_sparse(&self) -> Vec<(usize, usize, usize, BigInt)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i..self.dim {
                for k in j..self.dim {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    /// Trilinear contraction.
    pub fn eval(&self, a: &LatticeVector, b: &LatticeVector, c: &LatticeVector) -> Result<BigInt> {
        for v in [a, b, c] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        let mut acc = BigInt::zero();
        for i in 0..self.dim {
            if a.coords()[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if b.coords()[j].is_zero() {
                    continue;
                }
                let ab = &a.coords()[i] * &b.coords()[j];
                for k in 0..self.dim {
                    acc += &ab * self.get(i, j, k) * &c.coords()[k];
                }
            }
        }
        Ok(acc)
    }
}

/// Named curve class with its pairing against each basis divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub name: String,
    pub pair: Vec<BigInt>,
}

/// Intersection-ring data of a (semi-)Fano threefold: named divisor basis,
/// triple products, `c2.D_i` pairings and the anticanonical class. Optional
/// curve classes get carried into blocks built from this chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoChart {
    pub names: Vec<String>,
    pub triple: Tensor3,
    pub c2_pair: Vec<BigInt>,
    pub minus_k: LatticeVector,
    pub curves: Vec<CurveClass>,
}

/// Expected value of `c1.c2` on a threefold with `chi(O) = 1`.
fn noether_bound() -> BigInt {
    BigInt::from(24)
}

fn rr_chi_raw(
    triple: &Tensor3,
    c2_pair: &[BigInt],
    anticanonical: &LatticeVector,
    l: &LatticeVector,
) -> Result<BigInt> {
    let l3 = triple.eval(l, l, l)?;
    let l2k = triple.eval(l, l, anticanonical)?;
    let lk2 = triple.eval(l, anticanonical, anticanonical)?;
    let lc2: BigInt = l
        .coords()
        .iter()
        .zip(c2_pair)
        .map(|(a, b)| a * b)
        .sum();
    let chi: Rat = big_to_rat(&l3) / big_to_rat(&BigInt::from(6))
        + big_to_rat(&l2k) / big_to_rat(&BigInt::from(4))
        + big_to_rat(&(lk2 + lc2)) / big_to_rat(&BigInt::from(12))
        + Rat::one();
    if !chi.is_integer() {
        return Err(Error::ChartCorruption(format!(
            "Riemann-Roch value {chi} is not an integer"
        )));
    }
    Ok(chi.to_integer())
}

impl FanoChart {
    pub fn new(
        names: Vec<String>,
        triple: Tensor3,
        c2_pair: Vec<BigInt>,
        minus_k: LatticeVector,
        curves: Vec<CurveClass>,
    ) -> Result<Self> {
        let r = names.len();
        if triple.dim() != r || c2_pair.len() != r || minus_k.len() != r {
            return Err(Error::DataFormat("chart field lengths disagree".into()));
        }
        if curves.iter().any(|c| c.pair.len() != r) {
            return Err(Error::DataFormat("curve pairing length disagrees".into()));
        }
        let chart = FanoChart {
            names,
            triple,
            c2_pair,
            minus_k,
            curves,
        };
        let noether: BigInt = chart
            .minus_k
            .coords()
            .iter()
            .zip(&chart.c2_pair)
            .map(|(a, b)| a * b)
            .sum();
        if noether != noether_bound() {
            return Err(Error::ChartCorruption(format!(
                "Noether check failed: c1.c2 = {noether}, expected 24"
            )));
        }
        Ok(chart)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn chi(&self, l: &LatticeVector) -> Result<BigInt> {
        rr_chi_raw(&self.triple, &self.c2_pair, &self.minus_k, l)
    }

    pub fn triple_eval(
        &self,
        a: &LatticeVector,
        b: &LatticeVector,
        c: &LatticeVector,
    ) -> Result<BigInt> {
        self.triple.eval(a, b, c)
    }
}

/// Intersection-ring data of a building block: divisor basis (for blow-ups,
/// the pullbacks followed by the exceptional divisor), anticanonical K3
/// class, curve classes, and the restriction map onto the K3 lattice `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockChart {
    pub names: Vec<String>,
    pub triple: Tensor3,
    pub c2_pair: Vec<BigInt>,
    pub s_class: LatticeVector,
    pub curves: Vec<CurveClass>,
    pub n_gram: IntLattice,
    /// Restriction of each basis divisor, in `N` coordinates.
    pub restrict: Vec<LatticeVector>,
}

impl BlockChart {
    pub fn new(
        names: Vec<String>,
        triple: Tensor3,
        c2_pair: Vec<BigInt>,
        s_class: LatticeVector,
        curves: Vec<CurveClass>,
        n_gram: IntLattice,
        restrict: Vec<LatticeVector>,
    ) -> Result<Self> {
        let chart = BlockChart {
            names,
            triple,
            c2_pair,
            s_class,
            curves,
            n_gram,
            restrict,
        };
        chart.validate()?;
        Ok(chart)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.names.len();
        if self.triple.dim() != r
            || self.c2_pair.len() != r
            || self.s_class.len() != r
            || self.restrict.len() != r
        {
            return Err(Error::DataFormat("chart field lengths disagree".into()));
        }
        if self.curves.iter().any(|c| c.pair.len() != r) {
            return Err(Error::DataFormat("curve pairing length disagrees".into()));
        }
        let n_rank = self.n_gram.rank();
        if self.restrict.iter().any(|v| v.len() != n_rank) {
            return Err(Error::DataFormat(
                "restriction rows do not match the K3 lattice rank".into(),
            ));
        }
        // Noether: S.c2 = 24
        let noether: BigInt = self
            .s_class
            .coords()
            .iter()
            .zip(&self.c2_pair)
            .map(|(a, b)| a * b)
            .sum();
        if noether != noether_bound() {
            return Err(Error::ChartCorruption(format!(
                "Noether check failed: c1.c2 = {noether}, expected 24"
            )));
        }
        // restriction compatibility: D_i . D_j . S == <D_i|_S, D_j|_S>
        for i in 0..r {
            for j in i..r {
                let ei = basis_vector(r, i);
                let ej = basis_vector(r, j);
                let lhs = self.triple.eval(&ei, &ej, &self.s_class)?;
                let rhs = self.n_gram.gram_eval(&self.restrict[i], &self.restrict[j])?;
                if lhs != rhs {
                    return Err(Error::ChartCorruption(format!(
                        "restriction incompatibility at ({}, {}): {lhs} vs {rhs}",
                        self.names[i], self.names[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn triple_eval(
        &self,
        a: &LatticeVector,
        b: &LatticeVector,
        c: &LatticeVector,
    ) -> Result<BigInt> {
        self.triple.eval(a, b, c)
    }

    /// Euler characteristic of a line bundle by threefold Riemann-Roch:
    /// `chi(L) = L^3/6 + L^2.S/4 + L.(S^2 + c2)/12 + 1`. Non-integral
    /// results mean the chart data is corrupt.
    pub fn rr_chi(&self, l: &LatticeVector) -> Result<BigInt> {
        rr_chi_raw(&self.triple, &self.c2_pair, &self.s_class, l)
    }

    /// Necessary numeric shadow of the dual-bundle vanishing: `chi(-c1L)`,
    /// passing iff it is nonpositive.
    pub fn chi_lstar_constraint(&self, c1l: &LatticeVector) -> Result<(BigInt, bool)> {
        let chi = self.rr_chi(&c1l.neg())?;
        let pass = !chi.is_positive();
        Ok((chi, pass))
    }

    pub fn curve(&self, name: &str) -> Result<&CurveClass> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::DataFormat(format!("unknown curve class '{name}'")))
    }

    pub fn divisor_dot_curve(&self, d: &LatticeVector, curve: &CurveClass) -> Result<BigInt> {
        if d.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: d.len(),
            });
        }
        Ok(d.coords()
            .iter()
            .zip(&curve.pair)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Determinant-line compatibility for a genus-0 curve class:
    /// `(S - c1L) . W == 2`.
    pub fn hs_compat(&self, c1l: &LatticeVector, w_name: &str) -> Result<bool> {
        let w = self.curve(w_name)?.clone();
        let d = self.s_class.sub(c1l);
        Ok(self.divisor_dot_curve(&d, &w)? == BigInt::from(2))
    }

    /// Image of a divisor class in the K3 lattice.
    pub fn restrict_to_s(&self, d: &LatticeVector) -> Result<LatticeVector> {
        if d.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: d.len(),
            });
        }
        let n = self.n_gram.rank();
        let mut out = vec![BigInt::zero(); n];
        for (coef, row) in d.coords().iter().zip(&self.restrict) {
            for (o, r) in out.iter_mut().zip(row.coords()) {
                *o += coef * r;
            }
        }
        Ok(LatticeVector::new(out))
    }

    /// Express a divisor in the basis (pullback divisors..., S) when the
    /// last basis divisor appears in `S` with coefficient -1, as it does for
    /// every blow-up chart. Used for display and for search boxes.
    pub fn to_anticanonical_basis(&self, d: &LatticeVector) -> Option<Vec<BigInt>> {
        let r = self.rank();
        if d.len() != r || *self.s_class.coords().last()? != BigInt::from(-1) {
            return None;
        }
        let c = -d.coords()[r - 1].clone();
        let mut out: Vec<BigInt> = (0..r - 1)
            .map(|i| &d.coords()[i] - &c * &self.s_class.coords()[i])
            .collect();
        out.push(c);
        Some(out)
    }

    /// Inverse of [`Self::to_anticanonical_basis`].
    pub fn from_anticanonical_basis(&self, coords: &[BigInt]) -> Result<LatticeVector> {
        let r = self.rank();
        if coords.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: coords.len(),
            });
        }
        let c = &coords[r - 1];
        let mut out: Vec<BigInt> = (0..r - 1)
            .map(|i| &coords[i] + c * &self.s_class.coords()[i])
            .collect();
        out.push(c * self.s_class.coords()[r - 1].clone());
        Ok(LatticeVector::new(out))
    }

    /// Signed-sum display such as `-S-G+H` in the anticanonical basis, or a
    /// raw coordinate tuple when that basis is unavailable.
    pub fn pretty_divisor(&self, d: &LatticeVector) -> String {
        let (coords, names): (Vec<BigInt>, Vec<String>) = match self.to_anticanonical_basis(d) {
            Some(c) => {
                let mut names: Vec<String> =
                    self.names[..self.rank() - 1].iter().cloned().collect();
                names.push("S".into());
                (c, names)
            }
            None => (d.coords().to_vec(), self.names.clone()),
        };
        let mut s = String::new();
        for (c, name) in coords.iter().zip(&names) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if s.is_empty() && sign == "+" {
                // leading plus is dropped
            } else {
                s.push_str(sign);
            }
            if !mag.is_one() {
                s.push_str(&mag.to_string());
            }
            s.push_str(name);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

fn basis_vector(len: usize, i: usize) -> LatticeVector {
    let mut v = vec![BigInt::zero(); len];
    v[i] = BigInt::one();
    LatticeVector::new(v)
}

/// Blow-up centre data: intersection degrees against each basis divisor of
/// the ambient threefold, and the genus of the curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupCurve {
    pub degrees: Vec<i64>,
    pub genus: u32,
}

/// Chart of the blow-up of a threefold along a smooth curve. The exceptional
/// divisor `E` is appended to the basis with:
/// `r*Di.r*Dj.E = 0`, `r*D.E^2 = -D.C`, `E^3 = K.C + 2 - 2g`,
/// `c2.r*D = c2_Y.D + C.D`, `c2.E = c1_Y.C`, `S = r*(-K_Y) - E`.
/// Ambient curve classes keep their pairings (generic representatives are
/// disjoint from the centre); the exceptional fibre `l` with `E.l = -1` is
/// added. The construction is rejected unless `chi(O(-E)) = g` and the
/// Noether identity hold on the result.
pub fn blowup_chart(y: &FanoChart, curve: &BlowupCurve) -> Result<BlockChart> {
    let r = y.rank();
    if curve.degrees.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: curve.degrees.len(),
        });
    }
    if y.names.iter().any(|n| n == "E") {
        return Err(Error::Construction(
            "ambient chart already uses the divisor name E".into(),
        ));
    }
    let degrees: Vec<BigInt> = curve.degrees.iter().map(|&d| BigInt::from(d)).collect();
    let c1_dot_curve: BigInt = y
        .minus_k
        .coords()
        .iter()
        .zip(&degrees)
        .map(|(a, b)| a * b)
        .sum();
    let genus = BigInt::from(curve.genus);

    let mut names = y.names.clone();
    names.push("E".into());
    let mut triple = Tensor3::new(r + 1);
    for (i, j, k, v) in y.triple.to_sparse() {
        triple.set_sym(i, j, k, v);
    }
    for (i, deg) in degrees.iter().enumerate() {
        triple.set_sym(i, r, r, -deg.clone());
    }
    triple.set_sym(r, r, r, -&c1_dot_curve + BigInt::from(2) - BigInt::from(2) * &genus);

    let mut c2_pair: Vec<BigInt> = y
        .c2_pair
        .iter()
        .zip(&degrees)
        .map(|(a, b)| a + b)
        .collect();
    c2_pair.push(c1_dot_curve);

    let mut s_coords = y.minus_k.coords().to_vec();
    s_coords.push(BigInt::from(-1));
    let s_class = LatticeVector::new(s_coords);

    let mut curves: Vec<CurveClass> = y
        .curves
        .iter()
        .map(|c| {
            let mut pair = c.pair.clone();
            pair.push(BigInt::zero());
            CurveClass {
                name: c.name.clone(),
                pair,
            }
        })
        .collect();
    if curves.iter().any(|c| c.name == "l") {
        return Err(Error::Construction(
            "ambient chart already uses the curve name l".into(),
        ));
    }
    let mut fibre_pair = vec![BigInt::zero(); r];
    fibre_pair.push(BigInt::from(-1));
    curves.push(CurveClass {
        name: "l".into(),
        pair: fibre_pair,
    });

    // N = image of the block's Picard lattice on the anticanonical K3.
    // The pullback classes pair by <Di|_S, Dj|_S> = Di.Dj.(-K_Y); the
    // exceptional divisor restricts to the class of the centre, which pairs
    // as E|_S . Di|_S = Di.C and has square 2g - 2. When the centre's class
    // lies in the span of the pullbacks (as it does for an anticanonical
    // pencil base locus, where it is (-K_Y)|_S), the lattice keeps rank r;
    // otherwise the class is appended as an extra generator.
    let mut gram = vec![vec![BigInt::zero(); r]; r];
    for i in 0..r {
        for j in 0..r {
            gram[i][j] = y
                .triple
                .eval(&basis_vector(r, i), &basis_vector(r, j), &y.minus_k)?;
        }
    }
    let two_g_minus_2 = BigInt::from(2) * &genus - BigInt::from(2);
    let gram_rat: Vec<Vec<Rat>> = gram
        .iter()
        .map(|row| row.iter().map(big_to_rat).collect())
        .collect();
    let deg_rat: Vec<Rat> = degrees.iter().map(big_to_rat).collect();
    let centre_in_span: Option<LatticeVector> =
        crate::matrix::solve_rational_general(&gram_rat, &deg_rat).and_then(|x| {
            if !x.iter().all(|c| c.is_integer()) {
                return None;
            }
            let x: Vec<BigInt> = x.iter().map(|c| c.to_integer()).collect();
            let sq: BigInt = x.iter().zip(&degrees).map(|(a, b)| a * b).sum();
            (sq == two_g_minus_2).then(|| LatticeVector::new(x))
        });
    let (n_gram, restrict) = match centre_in_span {
        Some(x) => {
            let mut restrict: Vec<LatticeVector> = (0..r).map(|i| basis_vector(r, i)).collect();
            restrict.push(x);
            (IntLattice::new(gram)?, restrict)
        }
        None => {
            let mut ext = gram;
            for (row, d) in ext.iter_mut().zip(&degrees) {
                row.push(d.clone());
            }
            let mut last = degrees.clone();
            last.push(two_g_minus_2);
            ext.push(last);
            let mut restrict: Vec<LatticeVector> =
                (0..r).map(|i| basis_vector(r + 1, i)).collect();
            restrict.push(basis_vector(r + 1, r));
            (IntLattice::new(ext)?, restrict)
        }
    };

    let chart = BlockChart::new(names, triple, c2_pair, s_class, curves, n_gram, restrict)?;
    // genus identity: chi(O(-E)) counts 1 - chi(O_C) = g
    let minus_e = basis_vector(r + 1, r).neg();
    let chi_me = chart.rr_chi(&minus_e)?;
    if chi_me != genus {
        return Err(Error::ChartCorruption(format!(
            "blow-up genus identity failed: chi(O(-E)) = {chi_me}, genus = {genus}"
        )));
    }
    Ok(chart)
}

/// Chart of a double cover branched over twice the given half-branch class.
/// Triple products double; the anticanonical class is the pullback of
/// `-K - half_branch`; the `c2` pairings are solved from the pushforward
/// identity `chi(pi* M) = chi(M) + chi(M - half_branch)` on every basis
/// bundle, and must come out integral and satisfy Noether.
/// Curve classes are carried with unchanged pairings, denoting the
/// half-pullbacks of the base classes.
pub fn double_cover_chart(y0: &FanoChart, half_branch: &LatticeVector) -> Result<FanoChart> {
    let r = y0.rank();
    if half_branch.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: half_branch.len(),
        });
    }
    let mut triple = Tensor3::new(r);
    for (i, j, k, v) in y0.triple.to_sparse() {
        triple.set_sym(i, j, k, v * BigInt::from(2));
    }
    let minus_k = y0.minus_k.sub(half_branch);

    // Solve chi(pi* D_i) = chi(D_i) + chi(D_i - half_branch) for c2.D_i.
    // On the cover, chi(L) = L^3/6 + L^2.K/4 + L.K^2/12 + (L.c2)/12 + 1.
    let mut c2_pair = Vec::with_capacity(r);
    for i in 0..r {
        let e = basis_vector(r, i);
        let rhs = y0.chi(&e)? + y0.chi(&e.sub(half_branch))?;
        let l3 = triple.eval(&e, &e, &e)?;
        let l2k = triple.eval(&e, &e, &minus_k)?;
        let lk2 = triple.eval(&e, &minus_k, &minus_k)?;
        let known: Rat = big_to_rat(&l3) / big_to_rat(&BigInt::from(6))
            + big_to_rat(&l2k) / big_to_rat(&BigInt::from(4))
            + big_to_rat(&lk2) / big_to_rat(&BigInt::from(12))
            + Rat::one();
        let u = (big_to_rat(&rhs) - known) * big_to_rat(&BigInt::from(12));
        if !u.is_integer() {
            return Err(Error::Construction(format!(
                "pushforward solve for c2.{} is not integral: {u}",
                y0.names[i]
            )));
        }
        c2_pair.push(u.to_integer());
    }

    let chart = FanoChart::new(
        y0.names.clone(),
        triple,
        c2_pair,
        minus_k,
        y0.curves.clone(),
    )
    .map_err(|e| Error::Construction(format!("double cover chart inconsistent: {e}")))?;
    // the pushforward identity must also hold on the anticanonical class,
    // which was not part of the solve
    let probe = &chart.minus_k;
    let want = y0.chi(probe)? + y0.chi(&probe.sub(half_branch))?;
    if chart.chi(probe)? != want {
        return Err(Error::Construction(
            "pushforward identity fails off the solve basis".into(),
        ));
    }
    Ok(chart)
}

/// Split degrees `(a, b)` of the conormal-bundle twist on a genus-0 curve:
/// when `a >= -1` the first cohomology of the sub vanishes and
/// `h^0 = max(0, a+1) + max(0, b+1)`; otherwise the answer depends on the
/// extension class and is reported unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConormalH0 {
    Known(u32),
    Unknown,
}

pub fn conormal_h0(split: (i64, i64)) -> ConormalH0 {
    let (a, b) = split;
    if a >= -1 {
        ConormalH0::Known(((a + 1).max(0) + (b + 1).max(0)) as u32)
    } else {
        ConormalH0::Unknown
    }
}

/// Cohomology facts proven by hand and carried as data; the provenance
/// string is mandatory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttestedCohomology {
    pub h0_e: u32,
    pub conormal_split: (i64, i64),
    pub h1_lstar_zero: bool,
    pub h2_lstar_zero: bool,
    pub h1_e_zero: bool,
    pub provenance: String,
}

impl AttestedCohomology {
    pub fn validate(&self) -> Result<()> {
        if self.provenance.trim().is_empty() {
            return Err(Error::DataFormat(
                "attested cohomology requires a non-empty provenance string".into(),
            ));
        }
        Ok(())
    }
}

/// A proposed Hartshorne-Serre datum on one block: the line-bundle class,
/// a genus-0 curve class (with multiplicity for disjoint unions of fibres),
/// and optional attested cohomology inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSNumericDatum {
    pub c1l: LatticeVector,
    pub w_name: String,
    pub w_mult: u32,
    pub attested: Option<AttestedCohomology>,
}

/// Total degree of the twisted conormal bundle on a genus-0 curve by
/// adjunction: `a + b == -(S.W - 2) + 2 (c1L.W)` for the attested splitting.
pub fn conormal_degree_check(chart: &BlockChart, datum: &HSNumericDatum) -> Result<bool> {
    let attested = datum
        .attested
        .as_ref()
        .ok_or_else(|| Error::DataFormat("conormal degree check needs attested split".into()))?;
    attested.validate()?;
    let w = chart.curve(&datum.w_name)?.clone();
    let s_w = chart.divisor_dot_curve(&chart.s_class, &w)?;
    let c1l_w = chart.divisor_dot_curve(&datum.c1l, &w)?;
    let total = -(s_w - BigInt::from(2)) + BigInt::from(2) * c1l_w;
    let (a, b) = attested.conormal_split;
    Ok(BigInt::from(a + b) == total)
}

/// Half-dimension identity certifying that the bundle admits no deformations
/// fixing its restriction to the K3: `dim/2 == h^0(conormal twist) - h^0(E) + 1`.
/// Needs the first-cohomology vanishing hypotheses attested; an unknown
/// conormal h^0 leaves the check inconclusive.
pub fn inelasticity_check(
    dim_moduli: &BigInt,
    datum: &HSNumericDatum,
) -> Result<crate::cert::Verdict> {
    use crate::cert::Verdict;
    let Some(attested) = datum.attested.as_ref() else {
        return Ok(Verdict::Inconclusive);
    };
    attested.validate()?;
    if !attested.h1_lstar_zero || !attested.h1_e_zero {
        return Ok(Verdict::Inconclusive);
    }
    let h0 = match conormal_h0(attested.conormal_split) {
        ConormalH0::Known(h) => h,
        ConormalH0::Unknown => return Ok(Verdict::Inconclusive),
    };
    let rhs = BigInt::from(h0) - BigInt::from(attested.h0_e) + BigInt::one();
    Ok(if BigInt::from(2) * rhs == *dim_moduli {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvesJson {
    pub names: Vec<String>,
    /// pair[divisor][curve]
    pub pair: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestrictJson {
    #[serde(rename = "gram_N")]
    pub gram_n: Vec<Vec<i64>>,
    pub matrix: Vec<Vec<i64>>,
}

/// On-disk chart schema shared by Fano and block charts; `minus_K` marks a
/// Fano chart, `S_class` (plus curves and restriction data) a block chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartJson {
    pub schema_version: u32,
    pub div_basis: Vec<String>,
    pub triple: Vec<(usize, usize, usize, i64)>,
    pub c2_pair: Vec<i64>,
    #[serde(rename = "minus_K", skip_serializing_if = "Option::is_none")]
    pub minus_k: Option<Vec<i64>>,
    #[serde(rename = "S_class", skip_serializing_if = "Option::is_none")]
    pub s_class: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curves: Option<CurvesJson>,
    #[serde(rename = "restrict_S", skip_serializing_if = "Option::is_none")]
    pub restrict_s: Option<RestrictJson>,
}

fn curves_from_json(names: &[String], j: &Option<CurvesJson>, rank: usize) -> Result<Vec<CurveClass>> {
    let Some(c) = j else {
        return Ok(vec![]);
    };
    if c.pair.len() != rank || c.pair.iter().any(|row| row.len() != c.names.len()) {
        return Err(Error::DataFormat(format!(
            "curve pairing must be {} divisors x {} curves",
            rank,
            c.names.len()
        )));
    }
    let _ = names;
    Ok(c.names
        .iter()
        .enumerate()
        .map(|(k, name)| CurveClass {
            name: name.clone(),
            pair: (0..rank).map(|i| BigInt::from(c.pair[i][k])).collect(),
        })
        .collect())
}

fn curves_to_json(curves: &[CurveClass], rank: usize) -> Result<Option<CurvesJson>> {
    if curves.is_empty() {
        return Ok(None);
    }
    let names = curves.iter().map(|c| c.name.clone()).collect();
    let mut pair = vec![vec![0i64; curves.len()]; rank];
    for (k, c) in curves.iter().enumerate() {
        for (i, v) in c.pair.iter().enumerate() {
            pair[i][k] = i64::try_from(v)
                .map_err(|_| Error::DataFormat("curve pairing exceeds i64".into()))?;
        }
    }
    Ok(Some(CurvesJson { names, pair }))
}

fn triple_to_json(t: &Tensor3) -> Result<Vec<(usize, usize, usize, i64)>> {
    t.to_sparse()
        .into_iter()
        .map(|(i, j, k, v)| {
            i64::try_from(&v)
                .map(|v| (i, j, k, v))
                .map_err(|_| Error::DataFormat("triple product exceeds i64".into()))
        })
        .collect()
}

fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::DataFormat("value exceeds i64".into())))
        .collect()
}

impl FanoChart {
    pub fn to_json(&self) -> Result<ChartJson> {
        Ok(ChartJson {
            schema_version: crate::cert::SCHEMA_VERSION,
            div_basis: self.names.clone(),
            triple: triple_to_json(&self.triple)?,
            c2_pair: i64_vec(&self.c2_pair)?,
            minus_k: Some(self.minus_k.to_i64()?),
            s_class: None,
            curves: curves_to_json(&self.curves, self.rank())?,
            restrict_s: None,
        })
    }

    pub fn from_json(j: &ChartJson) -> Result<Self> {
        let r = j.div_basis.len();
        let minus_k = j
            .minus_k
            .as_ref()
            .ok_or_else(|| Error::DataFormat("Fano chart needs minus_K".into()))?;
        let entries: Vec<(usize, usize, usize, BigInt)> = j
            .triple
            .iter()
            .map(|&(a, b, c, v)| (a, b, c, BigInt::from(v)))
            .collect();
        FanoChart::new(
            j.div_basis.clone(),
            Tensor3::from_sparse(r, &entries)?,
            big_vec(&j.c2_pair),
            LatticeVector::from_i64(minus_k),
            curves_from_json(&j.div_basis, &j.curves, r)?,
        )
    }
}

impl BlockChart {
    pub fn to_json(&self) -> Result<ChartJson> {
        let restrict = RestrictJson {
            gram_n: self
                .n_gram
                .gram_rows()
                .iter()
                .map(|r| i64_vec(r))
                .collect::<Result<Vec<_>>>()?,
            matrix: self
                .restrict
                .iter()
                .map(|v| v.to_i64())
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(ChartJson {
            schema_version: crate::cert::SCHEMA_VERSION,
            div_basis: self.names.clone(),
            triple: triple_to_json(&self.triple)?,
            c2_pair: i64_vec(&self.c2_pair)?,
            minus_k: None,
            s_class: Some(self.s_class.to_i64()?),
            curves: curves_to_json(&self.curves, self.rank())?,
            restrict_s: Some(restrict),
        })
    }

    pub fn from_json(j: &ChartJson) -> Result<Self> {
        let r = j.div_basis.len();
        let s_class = j
            .s_class
            .as_ref()
            .ok_or_else(|| Error::DataFormat("block chart needs S_class".into()))?;
        let restrict_j = j
            .restrict_s
            .as_ref()
            .ok_or_else(|| Error::DataFormat("block chart needs restrict_S".into()))?;
        let entries: Vec<(usize, usize, usize, BigInt)> = j
            .triple
            .iter()
            .map(|&(a, b, c, v)| (a, b, c, BigInt::from(v)))
            .collect();
        let n_gram = IntLattice::new(
            restrict_j
                .gram_n
                .iter()
                .map(|row| big_vec(row))
                .collect::<Vec<_>>(),
        )?;
        BlockChart::new(
            j.div_basis.clone(),
            Tensor3::from_sparse(r, &entries)?,
            big_vec(&j.c2_pair),
            LatticeVector::from_i64(s_class),
            curves_from_json(&j.div_basis, &j.curves, r)?,
            n_gram,
            restrict_j
                .matrix
                .iter()
                .map(|row| LatticeVector::from_i64(row))
                .collect(),
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: ChartJson = serde_json::from_str(s)?;
        BlockChart::from_json(&j)
    }
}

// ---------------------------------------------------------------------------
// Built-in reference charts
// ---------------------------------------------------------------------------

/// `P^1 x P^2` with basis `(G, H)`: `G.H^2 = 1`, `-K = 2G + 3H`,
/// `c2 = (3, 6)`, curve classes `h` (fibre line x point of `P^1`... a line in
/// the `P^2` factor over a point) and `g` (the `P^1` factor over a point of
/// `P^2`).
pub fn p1xp2_fano() -> FanoChart {
    let mut triple = Tensor3::new(2);
    triple.set_sym(0, 1, 1, BigInt::one());
    FanoChart::new(
        vec!["G".into(), "H".into()],
        triple,
        vec![BigInt::from(3), BigInt::from(6)],
        LatticeVector::from_i64(&[2, 3]),
        vec![
            CurveClass {
                name: "h".into(),
                pair: vec![BigInt::zero(), BigInt::one()],
            },
            CurveClass {
                name: "g".into(),
                pair: vec![BigInt::one(), BigInt::zero()],
            },
        ],
    )
    .expect("built-in chart is consistent")
}

/// Block chart of the blow-up of `P^1 x P^2` along the base locus of a
/// generic anticanonical pencil (degrees `(9, 12)`, genus 28).
pub fn p1xp2_block() -> BlockChart {
    blowup_chart(
        &p1xp2_fano(),
        &BlowupCurve {
            degrees: vec![9, 12],
            genus: 28,
        },
    )
    .expect("built-in chart is consistent")
}

/// Double cover of `P^1 x P^2` branched over a `(2,2)` divisor.
pub fn dcover_fano() -> FanoChart {
    double_cover_chart(&p1xp2_fano(), &LatticeVector::from_i64(&[1, 1]))
        .expect("built-in chart is consistent")
}

/// Block chart of the blow-up of the double cover along the base locus of a
/// generic anticanonical pencil (degrees `(8, 8)`, genus 13).
pub fn dcover_block() -> BlockChart {
    blowup_chart(
        &dcover_fano(),
        &BlowupCurve {
            degrees: vec![8, 8],
            genus: 13,
        },
    )
    .expect("built-in chart is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::Verdict;

    fn v(c: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(c)
    }

    #[test]
    fn fano_reference_triples() {
        let y = p1xp2_fano();
        // (-K)^3 = (2G+3H)^3 = 54
        assert_eq!(
            y.triple_eval(&y.minus_k.clone(), &y.minus_k.clone(), &y.minus_k.clone())
                .unwrap(),
            BigInt::from(54)
        );
        // H^3 = 0
        assert_eq!(
            y.triple_eval(&v(&[0, 1]), &v(&[0, 1]), &v(&[0, 1])).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn fano_noether_rejects_tamper() {
        let y = p1xp2_fano();
        let bad = FanoChart::new(
            y.names.clone(),
            y.triple.clone(),
            vec![BigInt::from(3), BigInt::from(7)],
            y.minus_k.clone(),
            vec![],
        );
        assert!(matches!(bad, Err(Error::ChartCorruption(_))));
    }

    #[test]
    fn blowup_reference_values() {
        let z = p1xp2_block();
        // S.l = 1
        let l = z.curve("l").unwrap().clone();
        assert_eq!(z.divisor_dot_curve(&z.s_class, &l).unwrap(), BigInt::one());
        // E^3 = K.C + 2 - 2g = -108
        assert_eq!(*z.triple.get(2, 2, 2), BigInt::from(-108));
        // chi(O(-E)) = genus 28
        assert_eq!(z.rr_chi(&v(&[0, 0, -1])).unwrap(), BigInt::from(28));
        // chi(O) = 1
        assert_eq!(z.rr_chi(&v(&[0, 0, 0])).unwrap(), BigInt::one());
        // N lattice is the reference Gram
        assert_eq!(
            z.n_gram.gram_rows(),
            vec![
                vec![BigInt::zero(), BigInt::from(3)],
                vec![BigInt::from(3), BigInt::from(2)]
            ]
        );
    }

    #[test]
    fn dcover_reference_values() {
        let y = dcover_fano();
        assert_eq!(y.minus_k, v(&[1, 2]));
        assert_eq!(
            y.triple_eval(&y.minus_k.clone(), &y.minus_k.clone(), &y.minus_k.clone())
                .unwrap(),
            BigInt::from(24)
        );
        assert_eq!(y.c2_pair, vec![BigInt::from(4), BigInt::from(10)]);

        let z = dcover_block();
        assert_eq!(z.rr_chi(&v(&[0, 0, -1])).unwrap(), BigInt::from(13));
        // c1(T_Z).W = 2 for the line class W = h
        let h = z.curve("h").unwrap().clone();
        assert_eq!(z.divisor_dot_curve(&z.s_class, &h).unwrap(), BigInt::from(2));
        assert_eq!(
            z.n_gram.gram_rows(),
            vec![
                vec![BigInt::zero(), BigInt::from(4)],
                vec![BigInt::from(4), BigInt::from(2)]
            ]
        );
    }

    #[test]
    fn chi_lstar_reference() {
        let z = p1xp2_block();
        // c1(L) = -S-G+H = (-3,-2,1)
        let (chi, pass) = z.chi_lstar_constraint(&v(&[-3, -2, 1])).unwrap();
        assert_eq!(chi, BigInt::zero());
        assert!(pass);
        // trivial L is rejected: chi(O) = 1 > 0
        let (chi, pass) = z.chi_lstar_constraint(&v(&[0, 0, 0])).unwrap();
        assert_eq!(chi, BigInt::one());
        assert!(!pass);
        // minus side: c1(L) = G
        let zm = dcover_block();
        let (chi, pass) = zm.chi_lstar_constraint(&v(&[1, 0, 0])).unwrap();
        assert_eq!(chi, BigInt::zero());
        assert!(pass);
    }

    #[test]
    fn hs_compat_reference() {
        let z = p1xp2_block();
        assert!(z.hs_compat(&v(&[-3, -2, 1]), "l").unwrap());
        let zm = dcover_block();
        assert!(zm.hs_compat(&v(&[1, 0, 0]), "h").unwrap());
        // c1L = S fails: (S-S).W = 0
        let s = zm.s_class.clone();
        assert!(!zm.hs_compat(&s, "h").unwrap());
        assert!(z.hs_compat(&v(&[0, 0, 0]), "bogus").is_err());
    }

    #[test]
    fn restriction_reference() {
        let z = p1xp2_block();
        assert_eq!(z.restrict_to_s(&v(&[1, 0, 0])).unwrap(), v(&[1, 0]));
        assert_eq!(z.restrict_to_s(&v(&[0, 1, 0])).unwrap(), v(&[0, 1]));
        // -S-G+H restricts to B-A
        assert_eq!(z.restrict_to_s(&v(&[-3, -2, 1])).unwrap(), v(&[-1, 1]));
        assert_eq!(z.restrict_to_s(&v(&[0, 0, 0])).unwrap(), v(&[0, 0]));
        // S itself restricts to zero
        let s = z.s_class.clone();
        assert_eq!(z.restrict_to_s(&s).unwrap(), v(&[0, 0]));
    }

    #[test]
    fn restriction_identity_random() {
        // chi(L) - chi(L-S) = (L|_S)^2/2 + 2
        let charts = [p1xp2_block(), dcover_block()];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 11) as i64 - 5
        };
        for z in &charts {
            for _ in 0..20 {
                let l = v(&[next(), next(), next()]);
                let lhs = z.rr_chi(&l).unwrap() - z.rr_chi(&l.sub(&z.s_class)).unwrap();
                let r = z.restrict_to_s(&l).unwrap();
                let rhs = z.n_gram.square(&r).unwrap() / 2 + 2;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn double_cover_pushforward_oracle() {
        let y0 = p1xp2_fano();
        let yc = dcover_fano();
        let hb = v(&[1, 1]);
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 9) as i64 - 4
        };
        let mut probes = vec![v(&[1, 0]), v(&[0, 1])];
        for _ in 0..10 {
            probes.push(v(&[next(), next()]));
        }
        for m in probes {
            let lhs = yc.chi(&m).unwrap();
            let rhs = y0.chi(&m).unwrap() + y0.chi(&m.sub(&hb)).unwrap();
            assert_eq!(lhs, rhs, "pushforward oracle failed at {:?}", m);
        }
    }

    #[test]
    fn blowup_genus_oracle_random_inputs() {
        let y = p1xp2_fano();
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..10 {
            let degrees = vec![(next() % 12) as i64, (next() % 12) as i64];
            let genus = (next() % 30) as u32;
            let z = blowup_chart(&y, &BlowupCurve { degrees, genus }).unwrap();
            let r = z.rank();
            let mut minus_e = vec![0i64; r];
            minus_e[r - 1] = -1;
            assert_eq!(z.rr_chi(&v(&minus_e)).unwrap(), BigInt::from(genus));
        }
    }

    #[test]
    fn conormal_h0_values() {
        assert_eq!(conormal_h0((0, -1)), ConormalH0::Known(1));
        assert_eq!(conormal_h0((0, 0)), ConormalH0::Known(2));
        assert_eq!(conormal_h0((-2, 0)), ConormalH0::Unknown);
        assert_eq!(conormal_h0((-1, 3)), ConormalH0::Known(4));
    }

    fn plus_datum(split: (i64, i64)) -> HSNumericDatum {
        HSNumericDatum {
            c1l: v(&[-3, -2, 1]),
            w_name: "l".into(),
            w_mult: 1,
            attested: Some(AttestedCohomology {
                h0_e: 1,
                conormal_split: split,
                h1_lstar_zero: true,
                h2_lstar_zero: true,
                h1_e_zero: true,
                provenance: "hand computation on the exceptional fibre".into(),
            }),
        }
    }

    fn minus_datum() -> HSNumericDatum {
        HSNumericDatum {
            c1l: v(&[1, 0, 0]),
            w_name: "h".into(),
            w_mult: 1,
            attested: Some(AttestedCohomology {
                h0_e: 2,
                conormal_split: (0, 0),
                h1_lstar_zero: true,
                h2_lstar_zero: true,
                h1_e_zero: true,
                provenance: "hand computation on the double-cover line".into(),
            }),
        }
    }

    #[test]
    fn conormal_degree_reference() {
        let z = p1xp2_block();
        assert!(conormal_degree_check(&z, &plus_datum((0, -1))).unwrap());
        // tampered split with the wrong total degree
        assert!(!conormal_degree_check(&z, &plus_datum((1, 1))).unwrap());
        let zm = dcover_block();
        assert!(conormal_degree_check(&zm, &minus_datum()).unwrap());
    }

    #[test]
    fn inelasticity_reference() {
        let two = BigInt::from(2);
        assert_eq!(
            inelasticity_check(&two, &plus_datum((0, -1))).unwrap(),
            Verdict::Pass
        );
        assert_eq!(
            inelasticity_check(&two, &minus_datum()).unwrap(),
            Verdict::Pass
        );
        assert_eq!(
            inelasticity_check(&BigInt::from(4), &plus_datum((0, -1))).unwrap(),
            Verdict::Fail
        );
        // unknown conormal splitting: inconclusive
        assert_eq!(
            inelasticity_check(&two, &plus_datum((-2, 1))).unwrap(),
            Verdict::Inconclusive
        );
        // missing attestation: inconclusive
        let mut d = plus_datum((0, -1));
        d.attested = None;
        assert_eq!(inelasticity_check(&two, &d).unwrap(), Verdict::Inconclusive);
    }

    #[test]
    fn empty_provenance_rejected() {
        let z = p1xp2_block();
        let mut d = plus_datum((0, -1));
        d.attested.as_mut().unwrap().provenance = "  ".into();
        assert!(matches!(
            conormal_degree_check(&z, &d),
            Err(Error::DataFormat(_))
        ));
    }

    #[test]
    fn anticanonical_basis_round_trip() {
        let z = p1xp2_block();
        let chart_coords = v(&[-3, -2, 1]);
        let anti = z.to_anticanonical_basis(&chart_coords).unwrap();
        assert_eq!(
            anti,
            vec![BigInt::from(-1), BigInt::from(1), BigInt::from(-1)]
        );
        let back = z.from_anticanonical_basis(&anti).unwrap();
        assert_eq!(back, chart_coords);
        assert_eq!(z.pretty_divisor(&chart_coords), "-G+H-S");
    }

    #[test]
    fn chart_json_round_trip() {
        let z = p1xp2_block();
        let j = z.to_json().unwrap();
        let s = serde_json::to_string(&j).unwrap();
        let back = BlockChart::from_json_str(&s).unwrap();
        assert_eq!(back, z);

        let y = dcover_fano();
        let j = y.to_json().unwrap();
        let back = FanoChart::from_json(&j).unwrap();
        assert_eq!(back, y);
    }

    #[test]
    fn tampered_chart_rejected_on_load() {
        let z = p1xp2_block();
        let mut j = z.to_json().unwrap();
        j.c2_pair[0] += 1;
        assert!(matches!(
            BlockChart::from_json(&j),
            Err(Error::ChartCorruption(_))
        ));
    }
}
