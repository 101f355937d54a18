//! Constraint search for Hartshorne-Serre bundle parameters on a pair of
//! block charts under a matching configuration: enumerate line-bundle
//! classes and curve classes satisfying the compatibility, positivity,
//! Euler-characteristic, determinant-line and dimension constraints, keep
//! the pairs whose restrictions are stable and whose Mukai vectors twist to
//! a common class in the intersection lattice, and re-verify candidates
//! against attested cohomology inputs.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cert::{Certificate, CheckStatus};
use crate::chart::{
    conormal_degree_check, conormal_h0, inelasticity_check, AttestedCohomology, BlockChart,
    ChartJson, ConormalH0, HSNumericDatum,
};
use crate::error::{Error, Result};
use crate::k3::{PolarizedK3, StabilityVerdict};
use crate::lattice::LatticeVector;
use crate::matching::{Configuration, ConfigurationJson, Side};
use crate::mukai::{moduli_dim_from_chern, mukai_from_chern, twist, MukaiVector};

/// Twist classes are searched in this coordinate box.
pub const TWIST_BOX: u32 = 4;

const DEFAULT_MAX_SCAN: u64 = 1_000_000;

/// Search-spec file schema. Charts and the configuration may be inlined or
/// referenced by file name (resolved by the caller-supplied loader).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSpecJson {
    pub schema_version: u32,
    pub chart_p: DataRef<ChartJson>,
    pub chart_m: DataRef<ChartJson>,
    pub config: DataRef<ConfigurationJson>,
    pub k: u32,
    #[serde(rename = "box")]
    pub box_bound: u32,
    pub curve_classes_m: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_scan: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataRef<T> {
    Path(String),
    Inline(T),
}

impl<T: Clone> DataRef<T> {
    fn resolve<F>(&self, parse: F, load: &dyn Fn(&str) -> Result<String>) -> Result<T>
    where
        F: Fn(&str) -> Result<T>,
    {
        match self {
            DataRef::Inline(t) => Ok(t.clone()),
            DataRef::Path(p) => parse(&load(p)?),
        }
    }
}

/// A fully resolved, validated search specification.
#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub chart_p: BlockChart,
    pub chart_m: BlockChart,
    pub cfg: Configuration,
    pub k: u32,
    pub box_bound: u32,
    pub curve_classes_m: Vec<String>,
    pub max_scan: u64,
    source: SearchSpecJson,
}

impl SearchSpec {
    pub fn new(
        chart_p: BlockChart,
        chart_m: BlockChart,
        cfg: Configuration,
        k: u32,
        box_bound: u32,
        curve_classes_m: Vec<String>,
        max_scan: Option<u64>,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::HypothesisViolation("k must be >= 1".into()));
        }
        chart_p.validate()?;
        chart_m.validate()?;
        for (chart, lat, side) in [
            (&chart_p, &cfg.np, "plus"),
            (&chart_m, &cfg.nm, "minus"),
        ] {
            if chart.n_gram.gram_rows() != lat.gram_rows() {
                return Err(Error::DataFormat(format!(
                    "{side} chart K3 lattice disagrees with the configuration"
                )));
            }
        }
        for name in &curve_classes_m {
            chart_m.curve(name)?;
        }
        // both polarizations must be genuine K3 polarizations
        PolarizedK3::new(cfg.np.clone(), cfg.ample_p.clone())?;
        PolarizedK3::new(cfg.nm.clone(), cfg.ample_m.clone())?;
        let source = SearchSpecJson {
            schema_version: crate::cert::SCHEMA_VERSION,
            chart_p: DataRef::Inline(chart_p.to_json()?),
            chart_m: DataRef::Inline(chart_m.to_json()?),
            config: DataRef::Inline(cfg.source().clone()),
            k,
            box_bound,
            curve_classes_m: curve_classes_m.clone(),
            max_scan,
        };
        Ok(SearchSpec {
            chart_p,
            chart_m,
            cfg,
            k,
            box_bound,
            curve_classes_m,
            max_scan: max_scan.unwrap_or(DEFAULT_MAX_SCAN),
            source,
        })
    }

    /// Resolve a spec file, loading referenced charts and configuration via
    /// `load` (which receives the reference string as written).
    pub fn resolve(j: &SearchSpecJson, load: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        let chart_p = j
            .chart_p
            .resolve(|s| Ok(serde_json::from_str::<ChartJson>(s)?), load)?;
        let chart_m = j
            .chart_m
            .resolve(|s| Ok(serde_json::from_str::<ChartJson>(s)?), load)?;
        let config = j
            .config
            .resolve(|s| Ok(serde_json::from_str::<ConfigurationJson>(s)?), load)?;
        SearchSpec::new(
            BlockChart::from_json(&chart_p)?,
            BlockChart::from_json(&chart_m)?,
            crate::matching::build_configuration(&config)?,
            j.k,
            j.box_bound,
            j.curve_classes_m.clone(),
            j.max_scan,
        )
    }

    pub fn source(&self) -> &SearchSpecJson {
        &self.source
    }

    fn chart(&self, side: Side) -> &BlockChart {
        match side {
            Side::Plus => &self.chart_p,
            Side::Minus => &self.chart_m,
        }
    }

    fn polarized(&self, side: Side) -> Result<PolarizedK3> {
        PolarizedK3::new(
            self.cfg.lattice(side).clone(),
            self.cfg.ample(side).clone(),
        )
    }
}

/// One side of a proposed Hartshorne-Serre datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSCandidate {
    /// Line-bundle class in chart divisor coordinates.
    pub c1l: LatticeVector,
    pub w_name: String,
    pub w_mult: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HSCandidateJson {
    pub c1l: Vec<i64>,
    pub c1l_pretty: String,
    pub w: String,
    pub w_mult: u32,
}

/// A candidate pair surviving every constraint, with the twist witnesses
/// identifying both restrictions in the common sublattice.
#[derive(Clone, Debug)]
pub struct CandidatePair {
    pub plus: HSCandidate,
    pub minus: HSCandidate,
    pub twist_p: LatticeVector,
    pub twist_m: LatticeVector,
    /// Coordinates of the common twisted first Chern class in the N0 basis.
    pub common_l: LatticeVector,
    pub common_s: BigInt,
    pub checks: BTreeMap<String, CheckStatus>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidatePairJson {
    pub plus: HSCandidateJson,
    pub minus: HSCandidateJson,
    pub twist_p: Vec<i64>,
    pub twist_m: Vec<i64>,
    pub common_l: Vec<i64>,
    pub common_s: i64,
    pub checks: BTreeMap<String, CheckStatus>,
    pub certificate: Certificate,
}

impl CandidatePair {
    pub fn to_json(&self, spec: &SearchSpec) -> Result<CandidatePairJson> {
        Ok(CandidatePairJson {
            plus: HSCandidateJson {
                c1l: self.plus.c1l.to_i64()?,
                c1l_pretty: spec.chart_p.pretty_divisor(&self.plus.c1l),
                w: self.plus.w_name.clone(),
                w_mult: self.plus.w_mult,
            },
            minus: HSCandidateJson {
                c1l: self.minus.c1l.to_i64()?,
                c1l_pretty: spec.chart_m.pretty_divisor(&self.minus.c1l),
                w: self.minus.w_name.clone(),
                w_mult: self.minus.w_mult,
            },
            twist_p: self.twist_p.to_i64()?,
            twist_m: self.twist_m.to_i64()?,
            common_l: self.common_l.to_i64()?,
            common_s: i64::try_from(&self.common_s)
                .map_err(|_| Error::DataFormat("twist data exceeds i64".into()))?,
            checks: self.checks.clone(),
            certificate: self.certificate.clone(),
        })
    }
}

/// Assumption recorded on every certificate that uses the restriction
/// lattice as a stand-in for the full Picard lattice of the K3 member.
pub const PIC_ASSUMPTION: &str =
    "Pic(S) = N for a generic anticanonical member; mod 2 Pic(S) is evaluated as mod 2N";

/// Whether the restriction of `c1l` lies in the common sublattice modulo
/// twice the K3 lattice, decided by linear algebra over GF(2).
pub fn check_mod2_membership(
    cfg: &Configuration,
    chart: &BlockChart,
    side: Side,
    c1l: &LatticeVector,
) -> Result<bool> {
    let restricted = chart.restrict_to_s(c1l)?;
    let target: Vec<u8> = restricted
        .coords()
        .iter()
        .map(|x| (x % BigInt::from(2)).is_zero().then_some(0u8).unwrap_or(1))
        .collect();
    let rows: Vec<Vec<u8>> = cfg
        .embedding(side)
        .iter()
        .map(|e| {
            e.coords()
                .iter()
                .map(|x| (x % BigInt::from(2)).is_zero().then_some(0u8).unwrap_or(1))
                .collect()
        })
        .collect();
    Ok(gf2_in_span(&rows, &target))
}

fn gf2_in_span(rows: &[Vec<u8>], target: &[u8]) -> bool {
    let n = target.len();
    let mut basis: Vec<Vec<u8>> = rows.to_vec();
    let mut t = target.to_vec();
    let mut used = vec![false; basis.len()];
    for col in 0..n {
        let Some(p) = (0..basis.len()).find(|&i| !used[i] && basis[i][col] == 1) else {
            continue;
        };
        used[p] = true;
        let pivot_row = basis[p].clone();
        for (i, row) in basis.iter_mut().enumerate() {
            if i != p && !used[i] && row[col] == 1 {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        if t[col] == 1 {
            for (a, b) in t.iter_mut().zip(&pivot_row) {
                *a ^= b;
            }
        }
    }
    t.iter().all(|&x| x == 0)
}

/// Strict positivity of the restricted degree against the configured ample
/// class.
pub fn check_positivity(
    chart: &BlockChart,
    cfg: &Configuration,
    side: Side,
    c1l: &LatticeVector,
) -> Result<bool> {
    let restricted = chart.restrict_to_s(c1l)?;
    Ok(cfg
        .lattice(side)
        .gram_eval(&restricted, cfg.ample(side))?
        .is_positive())
}

/// Dimension constraint: on the plus side (exceptional fibres) the
/// restriction square must be `2k - 6`; on the minus side
/// `S.W - c1(L|_S)^2 / 4 == k + 1`, evaluated exactly over the integers.
pub fn check_dimension(
    chart: &BlockChart,
    cfg: &Configuration,
    side: Side,
    c1l: &LatticeVector,
    w_name: &str,
    w_mult: u32,
    k: u32,
) -> Result<bool> {
    let restricted = chart.restrict_to_s(c1l)?;
    let q = cfg.lattice(side).square(&restricted)?;
    match side {
        Side::Plus => Ok(q == BigInt::from(2 * i64::from(k) - 6)),
        Side::Minus => {
            let w = chart.curve(w_name)?.clone();
            let s_w = chart.divisor_dot_curve(&chart.s_class, &w)? * BigInt::from(w_mult);
            Ok(BigInt::from(4) * s_w - q == BigInt::from(4) * (BigInt::from(k) + 1))
        }
    }
}

/// The restriction's Mukai data: `c2 = S.W` and the Mukai vector built from
/// rank 2, the restricted first Chern class, and that `c2`.
fn restricted_mukai(
    spec: &SearchSpec,
    side: Side,
    cand: &HSCandidate,
) -> Result<(MukaiVector, BigInt)> {
    let chart = spec.chart(side);
    let restricted = chart.restrict_to_s(&cand.c1l)?;
    let w = chart.curve(&cand.w_name)?.clone();
    let c2 = chart.divisor_dot_curve(&chart.s_class, &w)? * BigInt::from(cand.w_mult);
    let v = mukai_from_chern(spec.cfg.lattice(side), 2, &restricted, &c2)?;
    Ok((v, c2))
}

struct SideHit {
    cand: HSCandidate,
    checks: BTreeMap<String, CheckStatus>,
    mukai: MukaiVector,
}

fn side_label(side: Side) -> &'static str {
    match side {
        Side::Plus => "plus",
        Side::Minus => "minus",
    }
}

/// Evaluate every per-side constraint for one candidate; `None` when some
/// check fails.
fn evaluate_side(
    spec: &SearchSpec,
    side: Side,
    cand: &HSCandidate,
) -> Result<Option<SideHit>> {
    let chart = spec.chart(side);
    let tag = |name: &str| format!("{name}.{}", side_label(side));
    let mut checks = BTreeMap::new();
    let mut ok = true;
    let mut record = |name: String, pass: bool, ok: &mut bool| {
        checks.insert(
            name,
            if pass {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
        );
        *ok &= pass;
    };

    record(
        tag("mod2_membership"),
        check_mod2_membership(&spec.cfg, chart, side, &cand.c1l)?,
        &mut ok,
    );
    record(
        tag("positivity"),
        check_positivity(chart, &spec.cfg, side, &cand.c1l)?,
        &mut ok,
    );
    record(tag("chi_lstar"), chart.chi_lstar_constraint(&cand.c1l)?.1, &mut ok);
    record(tag("hs_compat"), chart.hs_compat(&cand.c1l, &cand.w_name)?, &mut ok);
    record(
        tag("dimension"),
        check_dimension(chart, &spec.cfg, side, &cand.c1l, &cand.w_name, cand.w_mult, spec.k)?,
        &mut ok,
    );
    if !ok {
        return Ok(None);
    }
    // the remaining checks can error on degenerate data; only run them on
    // candidates that already pass the cheap constraints
    let k3 = spec.polarized(side)?;
    let restricted = chart.restrict_to_s(&cand.c1l)?;
    let stable = k3.destabilizer_search(&restricted, 2)?.verdict == StabilityVerdict::Stable;
    record(tag("stability"), stable, &mut ok);
    let (v, c2) = restricted_mukai(spec, side, cand)?;
    let dim = moduli_dim_from_chern(spec.cfg.lattice(side), 2, &restricted, &c2)?;
    record(tag("moduli_dim"), dim == BigInt::from(2 * u64::from(spec.k)), &mut ok);
    if !ok {
        return Ok(None);
    }
    Ok(Some(SideHit {
        cand: cand.clone(),
        checks,
        mukai: v,
    }))
}

/// Candidate line-bundle classes scanned from a coefficient box over the
/// anticanonical divisor basis (pullback classes and `S`).
fn scan_classes(chart: &BlockChart, box_bound: u32, max_scan: u64) -> Result<Vec<LatticeVector>> {
    let dim = chart.rank();
    let width = 2 * u64::from(box_bound) + 1;
    let size = width.checked_pow(dim as u32).unwrap_or(u64::MAX);
    if size > max_scan {
        return Err(Error::Overflow(format!(
            "scan of {size} classes exceeds the cap of {max_scan}"
        )));
    }
    let b = i64::from(box_bound);
    let mut out = Vec::with_capacity(size as usize);
    let mut coords = vec![-b; dim];
    'outer: loop {
        let anti: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        out.push(chart.from_anticanonical_basis(&anti)?);
        for i in (0..dim).rev() {
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
    Ok(out)
}

fn side_hits(spec: &SearchSpec, side: Side) -> Result<Vec<SideHit>> {
    let chart = spec.chart(side);
    if chart
        .to_anticanonical_basis(&chart.s_class.clone())
        .is_none()
    {
        return Err(Error::DataFormat(
            "chart does not expose the anticanonical scan basis (S must carry the last divisor with coefficient -1)".into(),
        ));
    }
    let classes = scan_classes(chart, spec.box_bound, spec.max_scan)?;
    let curve_choices: Vec<(String, u32)> = match side {
        Side::Plus => vec![("l".to_string(), spec.k)],
        Side::Minus => spec
            .curve_classes_m
            .iter()
            .map(|n| (n.clone(), 1u32))
            .collect(),
    };
    let hits: Result<Vec<Vec<SideHit>>> = classes
        .par_iter()
        .map(|c1l| {
            let mut found = Vec::new();
            for (w_name, w_mult) in &curve_choices {
                let cand = HSCandidate {
                    c1l: c1l.clone(),
                    w_name: w_name.clone(),
                    w_mult: *w_mult,
                };
                if let Some(hit) = evaluate_side(spec, side, &cand)? {
                    found.push(hit);
                }
            }
            Ok(found)
        })
        .collect();
    Ok(hits?.into_iter().flatten().collect())
}

struct TwistMatch {
    twist_p: LatticeVector,
    twist_m: LatticeVector,
    common_l: LatticeVector,
    common_s: BigInt,
}

/// Express `l` as an integer combination of the embedding rows, if possible.
fn in_embedding_coords(
    rows: &[LatticeVector],
    l: &LatticeVector,
) -> Option<LatticeVector> {
    use crate::matrix::{big_to_rat, dot, solve_rational, Mat, Rat};
    if rows.is_empty() {
        return l.is_zero().then(|| LatticeVector::new(vec![]));
    }
    let b = Mat::from_rows(rows.iter().map(|r| r.coords().to_vec()).collect());
    let bt = b.transpose();
    let bbt = b.mul(&bt);
    let a: Vec<Vec<Rat>> = (0..b.nrows())
        .map(|i| (0..b.nrows()).map(|j| big_to_rat(bbt.at(i, j))).collect())
        .collect();
    let rhs: Vec<Rat> = (0..b.nrows())
        .map(|i| big_to_rat(&dot(b.row(i), l.coords())))
        .collect();
    let x = solve_rational(&a, &rhs)?;
    if !x.iter().all(|c| c.is_integer()) {
        return None;
    }
    let coords: Vec<BigInt> = x.iter().map(|c| c.to_integer()).collect();
    let mut recomposed = vec![BigInt::zero(); l.len()];
    for (c, row) in coords.iter().zip(rows) {
        for (o, r) in recomposed.iter_mut().zip(row.coords()) {
            *o += c * r;
        }
    }
    (recomposed == l.coords()).then(|| LatticeVector::new(coords))
}

fn twist_box_vectors(rank: usize) -> Vec<LatticeVector> {
    let b = i64::from(TWIST_BOX);
    let mut out = Vec::new();
    let mut coords = vec![-b; rank];
    'outer: loop {
        out.push(LatticeVector::from_i64(&coords));
        for i in (0..rank).rev() {
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

/// Find line-bundle twists taking both Mukai vectors to one and the same
/// vector supported on the common sublattice. Deterministic: the
/// lexicographically first witness pair wins.
fn twist_match(
    spec: &SearchSpec,
    vp: &MukaiVector,
    vm: &MukaiVector,
) -> Result<Option<TwistMatch>> {
    let mut plus_keys: BTreeMap<(Vec<BigInt>, BigInt), LatticeVector> = BTreeMap::new();
    for m in twist_box_vectors(spec.cfg.np.rank()) {
        let t = twist(&spec.cfg.np, vp, &m)?;
        if let Some(a) = in_embedding_coords(&spec.cfg.embed_p, &t.l) {
            plus_keys
                .entry((a.coords().to_vec(), t.s.clone()))
                .or_insert(m);
        }
    }
    for m in twist_box_vectors(spec.cfg.nm.rank()) {
        let t = twist(&spec.cfg.nm, vm, &m)?;
        if let Some(a) = in_embedding_coords(&spec.cfg.embed_m, &t.l) {
            if let Some(mp) = plus_keys.get(&(a.coords().to_vec(), t.s.clone())) {
                return Ok(Some(TwistMatch {
                    twist_p: mp.clone(),
                    twist_m: m,
                    common_l: a,
                    common_s: t.s,
                }));
            }
        }
    }
    Ok(None)
}

fn candidate_sort_key(chart: &BlockChart, cand: &HSCandidate) -> (Vec<(String, BigInt)>, String, u32) {
    let mut terms: Vec<(String, BigInt)> = chart
        .names
        .iter()
        .cloned()
        .zip(cand.c1l.coords().iter().cloned())
        .filter(|(_, c)| !c.is_zero())
        .collect();
    terms.sort();
    (terms, cand.w_name.clone(), cand.w_mult)
}

fn pair_certificate(
    pair_input: serde_json::Value,
    checks: &BTreeMap<String, CheckStatus>,
) -> Certificate {
    let mut cert = Certificate::new("hs_candidate_pair", pair_input);
    cert.assume(PIC_ASSUMPTION);
    cert.assume("moduli nonemptiness is not decided; dimensions are conditional");
    for (id, status) in checks {
        cert.step(id.clone(), *status, json!({}));
    }
    cert.finalize()
}

/// Scan both sides and keep every candidate pair satisfying all numeric
/// constraints plus the twist matching. Output is deterministic and sorted
/// by a basis-order-independent key. Inelasticity is attached inconclusive;
/// it needs attested inputs (see [`verify_candidate`]).
pub fn enumerate_candidates(spec: &SearchSpec) -> Result<Vec<CandidatePair>> {
    let plus = side_hits(spec, Side::Plus)?;
    let minus = side_hits(spec, Side::Minus)?;
    let mut pairs = Vec::new();
    for p in &plus {
        for m in &minus {
            let Some(tm) = twist_match(spec, &p.mukai, &m.mukai)? else {
                continue;
            };
            let mut checks = p.checks.clone();
            checks.extend(m.checks.clone());
            checks.insert("twist_match".into(), CheckStatus::Pass);
            checks.insert("inelasticity.plus".into(), CheckStatus::Inconclusive);
            checks.insert("inelasticity.minus".into(), CheckStatus::Inconclusive);
            pairs.push(CandidatePair {
                plus: p.cand.clone(),
                minus: m.cand.clone(),
                twist_p: tm.twist_p,
                twist_m: tm.twist_m,
                common_l: tm.common_l,
                common_s: tm.common_s,
                checks,
                certificate: Certificate::new("placeholder", json!(null)),
            });
        }
    }
    pairs.sort_by_key(|pair| {
        (
            candidate_sort_key(&spec.chart_p, &pair.plus),
            candidate_sort_key(&spec.chart_m, &pair.minus),
        )
    });
    // attach certificates after sorting so traces list the final order
    let pairs = pairs
        .into_iter()
        .map(|mut pair| {
            let input = json!({
                "plus": {
                    "c1l": pair.plus.c1l.to_i64().unwrap_or_default(),
                    "w": pair.plus.w_name,
                    "w_mult": pair.plus.w_mult,
                },
                "minus": {
                    "c1l": pair.minus.c1l.to_i64().unwrap_or_default(),
                    "w": pair.minus.w_name,
                    "w_mult": pair.minus.w_mult,
                },
                "k": spec.k,
                "box": spec.box_bound,
            });
            pair.certificate = pair_certificate(input, &pair.checks);
            pair
        })
        .collect();
    Ok(pairs)
}

/// Re-run every numeric check for a candidate pair and evaluate the
/// inelasticity identity against attested cohomology inputs. Attested facts
/// appear as separate trace steps with their provenance. Missing
/// attestations leave the certificate inconclusive, never failed.
pub fn verify_candidate(
    spec: &SearchSpec,
    plus: &HSCandidate,
    minus: &HSCandidate,
    attested_p: Option<&AttestedCohomology>,
    attested_m: Option<&AttestedCohomology>,
) -> Result<Certificate> {
    let input = json!({
        "plus": {"c1l": plus.c1l.to_i64()?, "w": plus.w_name, "w_mult": plus.w_mult},
        "minus": {"c1l": minus.c1l.to_i64()?, "w": minus.w_name, "w_mult": minus.w_mult},
        "k": spec.k,
        "attested_plus": attested_p.map(|a| serde_json::to_value(a).unwrap_or_default()),
        "attested_minus": attested_m.map(|a| serde_json::to_value(a).unwrap_or_default()),
    });
    let mut cert = Certificate::new("hs_candidate_verify", input);
    cert.assume(PIC_ASSUMPTION);
    let mut hits = Vec::new();
    for (side, cand) in [(Side::Plus, plus), (Side::Minus, minus)] {
        match evaluate_side(spec, side, cand)? {
            Some(hit) => {
                for (id, status) in &hit.checks {
                    cert.step(id.clone(), *status, json!({}));
                }
                hits.push(hit);
            }
            None => {
                cert.pass_step(format!("numeric.{}", side_label(side)), false, json!({}));
            }
        }
    }
    if hits.len() == 2 {
        let tm = twist_match(spec, &hits[0].mukai, &hits[1].mukai)?;
        cert.pass_step(
            "twist_match",
            tm.is_some(),
            match &tm {
                Some(t) => json!({
                    "twist_p": t.twist_p.to_i64()?,
                    "twist_m": t.twist_m.to_i64()?,
                    "common_s": i64::try_from(&t.common_s).unwrap_or_default(),
                }),
                None => json!({}),
            },
        );
    }
    for (side, cand, attested) in [
        (Side::Plus, plus, attested_p),
        (Side::Minus, minus, attested_m),
    ] {
        let label = side_label(side);
        let chart = spec.chart(side);
        let datum = HSNumericDatum {
            c1l: cand.c1l.clone(),
            w_name: cand.w_name.clone(),
            w_mult: cand.w_mult,
            attested: attested.cloned(),
        };
        match attested {
            None => {
                cert.step(
                    format!("attestation.{label}"),
                    CheckStatus::Inconclusive,
                    json!({"reason": "no attested cohomology supplied"}),
                );
            }
            Some(a) => {
                a.validate()?;
                cert.step(
                    format!("attestation.{label}"),
                    CheckStatus::Attested,
                    json!({
                        "h0_e": a.h0_e,
                        "conormal_split": a.conormal_split,
                        "h1_lstar_zero": a.h1_lstar_zero,
                        "h2_lstar_zero": a.h2_lstar_zero,
                        "h1_e_zero": a.h1_e_zero,
                        "provenance": a.provenance,
                    }),
                );
                let degree_ok = conormal_degree_check(chart, &datum)?;
                cert.pass_step(format!("conormal_degree.{label}"), degree_ok, json!({}));
                let h0 = conormal_h0(a.conormal_split);
                cert.step(
                    format!("conormal_h0.{label}"),
                    match h0 {
                        ConormalH0::Known(_) => CheckStatus::Pass,
                        ConormalH0::Unknown => CheckStatus::Inconclusive,
                    },
                    json!({"value": match h0 { ConormalH0::Known(v) => Some(v), ConormalH0::Unknown => None }}),
                );
            }
        }
        let dim = BigInt::from(2 * u64::from(spec.k));
        let verdict = inelasticity_check(&dim, &datum)?;
        cert.step(
            format!("inelasticity.{label}"),
            match verdict {
                crate::cert::Verdict::Pass => CheckStatus::Pass,
                crate::cert::Verdict::Fail => CheckStatus::Fail,
                crate::cert::Verdict::Inconclusive => CheckStatus::Inconclusive,
            },
            json!({"dim": 2 * u64::from(spec.k)}),
        );
    }
    Ok(cert.finalize())
}
