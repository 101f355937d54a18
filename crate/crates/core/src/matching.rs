//! Glued lattice configurations: two polarized Picard lattices identified
//! along a common sublattice, with orthogonality between each side and the
//! other's complement built into the cross pairings. Configurations are
//! supplied as gluing data and validated; full embedding classification
//! into the rank-22 K3 lattice is out of scope, but every stated necessary
//! condition is certified.

use num_bigint::BigInt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{is_orthogonal_configuration, IntLattice, LatticeJson, LatticeVector, Sublattice};
use crate::matrix::{big_to_rat, dot, solve_rational, Mat, Rat};

/// Configuration file schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationJson {
    pub schema_version: u32,
    #[serde(rename = "Np")]
    pub np: LatticeJson,
    #[serde(rename = "Nm")]
    pub nm: LatticeJson,
    #[serde(rename = "N0")]
    pub n0: N0Json,
    /// Positivity constraints the plus-side ray must satisfy, as classes in
    /// the plus lattice basis. They encode the opposite family's ample-cone
    /// requirement transported to where the ray lives.
    pub amp_p: Vec<Vec<i64>>,
    /// Same for the minus-side ray, in the minus lattice basis.
    pub amp_m: Vec<Vec<i64>>,
    pub ample_p: Vec<i64>,
    pub ample_m: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct N0Json {
    pub gram: Vec<Vec<i64>>,
    pub embed_p: Vec<Vec<i64>>,
    pub embed_m: Vec<Vec<i64>>,
}

/// A validated glued configuration.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub np: IntLattice,
    pub nm: IntLattice,
    pub ample_p: LatticeVector,
    pub ample_m: LatticeVector,
    pub n0: IntLattice,
    pub embed_p: Vec<LatticeVector>,
    pub embed_m: Vec<LatticeVector>,
    pub amp_p: Vec<LatticeVector>,
    pub amp_m: Vec<LatticeVector>,
    pub glued: IntLattice,
    /// Images of the two bases in glued coordinates.
    pub np_in_glued: Vec<LatticeVector>,
    pub nm_in_glued: Vec<LatticeVector>,
    source: ConfigurationJson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

fn big_rows(rows: &[Vec<i64>]) -> Vec<LatticeVector> {
    rows.iter().map(|r| LatticeVector::from_i64(r)).collect()
}

/// Assemble and validate a configuration from gluing data. Checks, in
/// order: both embeddings are isometries onto primitive sublattices, the
/// glued form is integral and even and restricts to the given Grams, the
/// intersection of the two images inside the glued lattice is exactly the
/// common sublattice, and the configuration is orthogonal.
pub fn build_configuration(data: &ConfigurationJson) -> Result<Configuration> {
    let np = IntLattice::from_json(&data.np)?;
    let nm = IntLattice::from_json(&data.nm)?;
    let n0 = IntLattice::new(
        data.n0
            .gram
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
    )?;
    let embed_p = big_rows(&data.n0.embed_p);
    let embed_m = big_rows(&data.n0.embed_m);
    let r0 = n0.rank();
    let (rp, rm) = (np.rank(), nm.rank());
    if embed_p.len() != r0 || embed_m.len() != r0 {
        return Err(Error::DataFormat(
            "embedding row count must match the rank of N0".into(),
        ));
    }
    let ample_p = LatticeVector::from_i64(&data.ample_p);
    let ample_m = LatticeVector::from_i64(&data.ample_m);

    // isometry of both embeddings onto N0
    for (side, lat, rows) in [("plus", &np, &embed_p), ("minus", &nm, &embed_m)] {
        for i in 0..r0 {
            for j in 0..r0 {
                let got = lat.gram_eval(&rows[i], &rows[j])?;
                if got != *n0.gram_entry(i, j) {
                    return Err(Error::Construction(format!(
                        "{side} embedding is not an isometry: <{i},{j}> = {got}, expected {}",
                        n0.gram_entry(i, j)
                    )));
                }
            }
        }
    }
    // primitivity of both images
    for (side, lat, rows) in [("plus", &np, &embed_p), ("minus", &nm, &embed_m)] {
        let sub = Sublattice::new(lat.clone(), rows.clone())?;
        if sub.rank() != r0 {
            return Err(Error::Construction(format!(
                "{side} embedding rows are dependent"
            )));
        }
        if !sub.is_primitive() {
            return Err(Error::Construction(format!(
                "{side} embedding image is not primitive"
            )));
        }
    }

    let n = rp + rm;
    // rational pairing on Z^(rp+rm): block Grams plus cross pairings forced
    // by orthogonality, <x, y> = <proj_0 x, proj_0 y> through N0
    let mut pairing = vec![vec![Rat::zero(); n]; n];
    for i in 0..rp {
        for j in 0..rp {
            pairing[i][j] = big_to_rat(np.gram_entry(i, j));
        }
    }
    for i in 0..rm {
        for j in 0..rm {
            pairing[rp + i][rp + j] = big_to_rat(nm.gram_entry(i, j));
        }
    }
    if r0 > 0 {
        if n0.signature().2 != 0 {
            return Err(Error::Construction(
                "the common sublattice must be nondegenerate to glue".into(),
            ));
        }
        let n0_rat: Vec<Vec<Rat>> = (0..r0)
            .map(|i| (0..r0).map(|j| big_to_rat(n0.gram_entry(i, j))).collect())
            .collect();
        for i in 0..rp {
            let ei = basis(rp, i);
            let u: Vec<Rat> = embed_p
                .iter()
                .map(|e| Ok(big_to_rat(&np.gram_eval(&ei, e)?)))
                .collect::<Result<_>>()?;
            let c = solve_rational(&n0_rat, &u)
                .ok_or_else(|| Error::Construction("projection solve failed".into()))?;
            for j in 0..rm {
                let ej = basis(rm, j);
                let u2: Vec<Rat> = embed_m
                    .iter()
                    .map(|e| Ok(big_to_rat(&nm.gram_eval(&ej, e)?)))
                    .collect::<Result<_>>()?;
                // <proj x, proj y> = c^T . u2 since N0 c = u
                let cross: Rat = c.iter().zip(&u2).map(|(a, b)| a * b).sum();
                pairing[i][rp + j] = cross.clone();
                pairing[rp + j][i] = cross;
            }
        }
    }

    // quotient of Z^n by the relations embed_p(y) = embed_m(y)
    let (coord_map, basis_rows): (Mat, Mat) = if r0 == 0 {
        (Mat::identity(n), Mat::identity(n))
    } else {
        let rel_rows: Vec<Vec<BigInt>> = (0..r0)
            .map(|i| {
                let mut row = embed_p[i].coords().to_vec();
                row.extend(embed_m[i].coords().iter().map(|x| -x));
                row
            })
            .collect();
        let rel = Mat::from_rows(rel_rows);
        let (d, v, vinv) = rel.smith_diagonalize();
        let nonzero = d.iter().filter(|x| !x.is_zero()).count();
        if nonzero != r0 || d.iter().take(r0).any(|x| !x.abs().is_one()) {
            return Err(Error::Construction(
                "gluing relations are not primitive".into(),
            ));
        }
        (v, vinv)
    };
    let g_rank = n - r0;
    // glued basis: rows r0.. of vinv; coordinates of x are (x * v)[r0..]
    let glued_gram_rat: Vec<Vec<Rat>> = (0..g_rank)
        .map(|i| {
            (0..g_rank)
                .map(|j| {
                    let bi = basis_rows.row(r0 + i);
                    let bj = basis_rows.row(r0 + j);
                    let mut acc = Rat::zero();
                    for (a, ba) in bi.iter().enumerate() {
                        if ba.is_zero() {
                            continue;
                        }
                        for (b, bb) in bj.iter().enumerate() {
                            acc += big_to_rat(ba) * &pairing[a][b] * big_to_rat(bb);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut glued_gram = Vec::with_capacity(g_rank);
    for (i, row) in glued_gram_rat.iter().enumerate() {
        let mut out = Vec::with_capacity(g_rank);
        for (j, x) in row.iter().enumerate() {
            if !x.is_integer() {
                return Err(Error::Construction(format!(
                    "glued pairing ({i},{j}) = {x} is not integral"
                )));
            }
            out.push(x.to_integer());
        }
        glued_gram.push(out);
    }
    let glued = IntLattice::new(glued_gram)?;
    if !glued.is_even() {
        return Err(Error::Construction("glued form is odd".into()));
    }

    let quotient_coords = |full: &[BigInt]| -> LatticeVector {
        let m = Mat::from_rows(vec![full.to_vec()]).mul(&coord_map);
        LatticeVector::new(m.row(0)[r0..].to_vec())
    };
    let np_in_glued: Vec<LatticeVector> = (0..rp)
        .map(|i| {
            let mut full = vec![BigInt::zero(); n];
            full[i] = BigInt::one();
            quotient_coords(&full)
        })
        .collect();
    let nm_in_glued: Vec<LatticeVector> = (0..rm)
        .map(|j| {
            let mut full = vec![BigInt::zero(); n];
            full[rp + j] = BigInt::one();
            quotient_coords(&full)
        })
        .collect();

    // glued form restricts to the declared Grams
    for (lat, imgs) in [(&np, &np_in_glued), (&nm, &nm_in_glued)] {
        for i in 0..imgs.len() {
            for j in 0..imgs.len() {
                if glued.gram_eval(&imgs[i], &imgs[j])? != *lat.gram_entry(i, j) {
                    return Err(Error::Inconsistent(
                        "glued form does not restrict to the block Gram".into(),
                    ));
                }
            }
        }
    }

    // the two N0 images agree in the quotient and equal the intersection
    let np_sub = Sublattice::new(glued.clone(), np_in_glued.clone())?;
    let nm_sub = Sublattice::new(glued.clone(), nm_in_glued.clone())?;
    let n0_images_p: Vec<LatticeVector> = embed_p
        .iter()
        .map(|e| {
            let mut full = e.coords().to_vec();
            full.extend(vec![BigInt::zero(); rm]);
            quotient_coords(&full)
        })
        .collect();
    let n0_images_m: Vec<LatticeVector> = embed_m
        .iter()
        .map(|e| {
            let mut full = vec![BigInt::zero(); rp];
            full.extend(e.coords().to_vec());
            quotient_coords(&full)
        })
        .collect();
    if n0_images_p != n0_images_m {
        return Err(Error::Inconsistent(
            "the two copies of N0 disagree in the glued lattice".into(),
        ));
    }
    let n0_sub = Sublattice::new(glued.clone(), n0_images_p)?;
    if np_sub.intersect(&nm_sub)? != n0_sub {
        return Err(Error::Inconsistent(
            "intersection of the two blocks is not the declared N0".into(),
        ));
    }
    if !is_orthogonal_configuration(&np_sub, &nm_sub)? {
        return Err(Error::Construction("configuration is not orthogonal".into()));
    }

    Ok(Configuration {
        np,
        nm,
        ample_p,
        ample_m,
        n0,
        embed_p,
        embed_m,
        amp_p: big_rows(&data.amp_p),
        amp_m: big_rows(&data.amp_m),
        glued,
        np_in_glued,
        nm_in_glued,
        source: data.clone(),
    })
}

fn basis(len: usize, i: usize) -> LatticeVector {
    let mut v = vec![BigInt::zero(); len];
    v[i] = BigInt::one();
    LatticeVector::new(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrescreenReport {
    pub k: u32,
    pub bound: u32,
    pub square_needed: i64,
    pub x_witnesses: Vec<Vec<i64>>,
    pub x_found: bool,
    pub n0_witnesses: Vec<Vec<i64>>,
    pub n0_found: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub rank: usize,
    pub rank_at_most_22: bool,
    pub even: bool,
    pub signature: (usize, usize, usize),
    pub positive_at_most_3: bool,
    pub negative_at_most_19: bool,
    pub pass: bool,
}

/// The data-level pre-screen behind [`Configuration::step1_prescreen`]. It
/// only needs the plus lattice and the common sublattice, so it also runs
/// on gluing data that fails to assemble.
pub fn step1_prescreen_data(
    np: &IntLattice,
    n0: &IntLattice,
    k: u32,
    bound: u32,
) -> Result<PrescreenReport> {
    if k < 1 {
        return Err(Error::HypothesisViolation("k must be >= 1".into()));
    }
    let square_needed = 2 * i64::from(k) - 6;
    let xs = np.enum_vectors_with_square(&BigInt::from(square_needed), bound);
    let x_witnesses: Vec<Vec<i64>> = xs.iter().map(|v| v.to_i64()).collect::<Result<_>>()?;
    let x_found = !x_witnesses.is_empty();

    let mut n0_witnesses = Vec::new();
    if n0.rank() > 0 {
        let scan_bound = i64::from(bound.max(1));
        let mut coords = vec![-scan_bound; n0.rank()];
        'outer: loop {
            let v = LatticeVector::from_i64(&coords);
            if !v.is_zero() {
                let gcd = n0.vector_divisibility(&v)?;
                let sq = n0.square(&v)?;
                if gcd.is_one() && sq <= BigInt::from(-8) && (&sq % BigInt::from(4)).is_zero() {
                    n0_witnesses.push(v.to_i64()?);
                }
            }
            for i in (0..coords.len()).rev() {
                if coords[i] < scan_bound {
                    coords[i] += 1;
                    for c in coords.iter_mut().skip(i + 1) {
                        *c = -scan_bound;
                    }
                    continue 'outer;
                }
            }
            break;
        }
    }
    let n0_found = !n0_witnesses.is_empty();
    Ok(PrescreenReport {
        k,
        bound,
        square_needed,
        x_found,
        x_witnesses,
        n0_found,
        n0_witnesses,
        pass: x_found && n0_found,
    })
}

/// Necessary conditions for a primitive embedding into the K3 lattice
/// `3U + 2E8`: even, rank at most 22, signature componentwise at most (3, 19).
pub fn lattice_embedding_checks(l: &IntLattice) -> EmbeddingReport {
    let signature = l.signature();
    let rank_at_most_22 = l.rank() <= 22;
    let even = l.is_even();
    let positive_at_most_3 = signature.0 <= 3;
    let negative_at_most_19 = signature.1 <= 19;
    EmbeddingReport {
        rank: l.rank(),
        rank_at_most_22,
        even,
        signature,
        positive_at_most_3,
        negative_at_most_19,
        pass: rank_at_most_22 && even && positive_at_most_3 && negative_at_most_19,
    }
}

impl Configuration {
    pub fn source(&self) -> &ConfigurationJson {
        &self.source
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let data: ConfigurationJson = serde_json::from_str(s)?;
        build_configuration(&data)
    }

    pub fn lattice(&self, side: Side) -> &IntLattice {
        match side {
            Side::Plus => &self.np,
            Side::Minus => &self.nm,
        }
    }

    pub fn ample(&self, side: Side) -> &LatticeVector {
        match side {
            Side::Plus => &self.ample_p,
            Side::Minus => &self.ample_m,
        }
    }

    pub fn embedding(&self, side: Side) -> &[LatticeVector] {
        match side {
            Side::Plus => &self.embed_p,
            Side::Minus => &self.embed_m,
        }
    }

    /// The perpendicular ray `R(side) = N(side) ∩ N(other)^⊥`, computed in
    /// the glued lattice.
    pub fn perp_ray(&self, side: Side) -> Result<Sublattice> {
        let np_sub = Sublattice::new(self.glued.clone(), self.np_in_glued.clone())?;
        let nm_sub = Sublattice::new(self.glued.clone(), self.nm_in_glued.clone())?;
        match side {
            Side::Plus => np_sub.intersect(&nm_sub.orth_complement()),
            Side::Minus => nm_sub.intersect(&np_sub.orth_complement()),
        }
    }

    /// Express a glued-coordinates vector lying in one block's image in
    /// that block's basis.
    fn in_block_coords(&self, side: Side, v: &LatticeVector) -> Result<LatticeVector> {
        let imgs = match side {
            Side::Plus => &self.np_in_glued,
            Side::Minus => &self.nm_in_glued,
        };
        let rows: Vec<Vec<BigInt>> = imgs.iter().map(|r| r.coords().to_vec()).collect();
        let b = Mat::from_rows(rows);
        let bt = b.transpose();
        let bbt = b.mul(&bt);
        let a: Vec<Vec<Rat>> = (0..b.nrows())
            .map(|i| (0..b.nrows()).map(|j| big_to_rat(bbt.at(i, j))).collect())
            .collect();
        let rhs: Vec<Rat> = (0..b.nrows())
            .map(|i| big_to_rat(&dot(b.row(i), v.coords())))
            .collect();
        let x = solve_rational(&a, &rhs)
            .ok_or_else(|| Error::Inconsistent("ray does not lie in the block".into()))?;
        if !x.iter().all(|c| c.is_integer()) {
            return Err(Error::Inconsistent("ray is not integral in the block".into()));
        }
        // confirm the solve (the ray must lie in the image lattice)
        let coords = LatticeVector::new(x.iter().map(|c| c.to_integer()).collect());
        let mut recomposed = vec![BigInt::zero(); v.len()];
        for (c, img) in coords.coords().iter().zip(imgs) {
            for (o, i) in recomposed.iter_mut().zip(img.coords()) {
                *o += c * i;
            }
        }
        if recomposed != v.coords() {
            return Err(Error::Inconsistent("ray does not lie in the block".into()));
        }
        Ok(coords)
    }

    /// True iff the generator of the perpendicular ray (or its negative)
    /// pairs strictly positively with every constraint class supplied for
    /// that side. Requires the ray to have rank 1.
    pub fn amp_ray_check(&self) -> Result<bool> {
        Ok(self.amp_ray_check_side(Side::Plus)? && self.amp_ray_check_side(Side::Minus)?)
    }

    pub fn amp_ray_check_side(&self, side: Side) -> Result<bool> {
        let ray = self.perp_ray(side)?;
        if ray.rank() != 1 {
            return Err(Error::UnsupportedRank {
                got: ray.rank(),
                context: "perpendicular ray must have rank 1".into(),
            });
        }
        let constraints = match side {
            Side::Plus => &self.amp_p,
            Side::Minus => &self.amp_m,
        };
        if constraints.is_empty() {
            return Ok(true);
        }
        let lat = self.lattice(side);
        let gen = self.in_block_coords(side, &ray.gens()[0])?;
        for candidate in [gen.clone(), gen.neg()] {
            let mut ok = true;
            for c in constraints {
                if !lat.gram_eval(&candidate, c)?.is_positive() {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Search the plus lattice for classes of square `2k - 6` within the
    /// coordinate box, and the common sublattice for a primitive class of
    /// square at most -8 divisible by 4.
    pub fn step1_prescreen(&self, k: u32, bound: u32) -> Result<PrescreenReport> {
        step1_prescreen_data(&self.np, &self.n0, k, bound)
    }

    /// Necessary embedding conditions on the glued lattice.
    pub fn embedding_necessary_checks(&self) -> EmbeddingReport {
        lattice_embedding_checks(&self.glued)
    }
}
