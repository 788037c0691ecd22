//! Disordered classical spin models dual to CSS codes.
//!
//! For an X-error coset `E_rep + rowspace(Hx)` the model places one Ising
//! spin on every row of `Hx` and one multi-spin term on every qubit `l`,
//! coupling the spins whose checks touch `l` with sign `(−1)^{E_rep[l]}`.
//! Its partition function at the Nishimori coupling is proportional to the
//! coset probability:
//!
//! `P(b, kz) = Z(b, kz) / (2^Dx (2 cosh β)^n)`.
//!
//! Throughout, a configuration's weight is `exp(Σ_t J_t s_t ∏_{i∈t} σ_i)`
//! with `s_t = ±1` the term sign.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{sector_distribution_x, sector_distribution_z, PauliNoise, Side};
use crate::css_code::CssCode;
use crate::error::{Error, Result};
use crate::f2linalg::{BitMatrix, BitVector};
use crate::info::RelativeEntropy;

/// Largest spin count `partition_exact` will enumerate.
pub const SPIN_ENUMERATION_LIMIT: usize = 24;

/// Coupling family of a term. Single-species models use only `Single`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermFamily {
    Single,
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub sites: Vec<usize>,
    pub sign: i8,
    pub family: TermFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Species {
    Single,
    /// σ spins occupy indices `0..num_sigma`, τ spins the next `num_tau`.
    Coupled {
        num_sigma: usize,
        num_tau: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmModel {
    pub num_spins: usize,
    pub terms: Vec<Term>,
    /// Spin flips that leave every term invariant, one per row.
    pub symmetry_basis: BitMatrix,
    /// `log2` of the number of spin configurations per error string.
    pub degeneracy_exponent: usize,
    pub species: Species,
}

impl SmModel {
    /// True when every symmetry row meets every term in an even number of sites.
    pub fn symmetries_preserve_terms(&self) -> bool {
        self.symmetry_basis.rows().iter().all(|s| {
            self.terms
                .iter()
                .all(|t| t.sites.iter().filter(|&&i| s.get(i)).count() % 2 == 0)
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelJson {
            num_spins: self.num_spins,
            species: self.species,
            degeneracy_exponent: self.degeneracy_exponent,
            symmetry_basis: self
                .symmetry_basis
                .rows()
                .iter()
                .map(|r| r.to_string())
                .collect(),
            terms: self.terms.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<SmModel> {
        let doc: ModelJson = serde_json::from_str(text)?;
        let rows = doc
            .symmetry_basis
            .iter()
            .map(|r| r.parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        let symmetry_basis = BitMatrix::from_rows(doc.num_spins, rows)?;
        for t in &doc.terms {
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::InvalidParameter(format!(
                    "term sign {} is not ±1",
                    t.sign
                )));
            }
            if let Some(&bad) = t.sites.iter().find(|&&s| s >= doc.num_spins) {
                return Err(Error::InvalidParameter(format!(
                    "term site {bad} out of range for {} spins",
                    doc.num_spins
                )));
            }
        }
        Ok(SmModel {
            num_spins: doc.num_spins,
            terms: doc.terms,
            symmetry_basis,
            degeneracy_exponent: doc.degeneracy_exponent,
            species: doc.species,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    num_spins: usize,
    species: Species,
    degeneracy_exponent: usize,
    symmetry_basis: Vec<String>,
    terms: Vec<Term>,
}

/// Inverse temperature(s) applied to the term families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Couplings {
    Single {
        beta: f64,
    },
    /// Coefficients of the X, Y and Z term families of a coupled model.
    Coupled {
        x: f64,
        y: f64,
        z: f64,
    },
}

impl Couplings {
    /// Family coefficients from per-Pauli couplings `β̃i` with
    /// `e^{−2β̃i} = p̃i / (1 − p̃)`.
    pub fn from_pauli_betas(bx: f64, by: f64, bz: f64) -> Couplings {
        Couplings::Coupled {
            x: (bx + by - bz) / 2.0,
            y: (bx + bz - by) / 2.0,
            z: (bz + by - bx) / 2.0,
        }
    }

    fn coefficient(&self, family: TermFamily) -> Result<f64> {
        match (self, family) {
            (Couplings::Single { beta }, TermFamily::Single) => Ok(*beta),
            (Couplings::Coupled { x, .. }, TermFamily::X) => Ok(*x),
            (Couplings::Coupled { y, .. }, TermFamily::Y) => Ok(*y),
            (Couplings::Coupled { z, .. }, TermFamily::Z) => Ok(*z),
            _ => Err(Error::ModeMismatch {
                expected: format!("couplings for {family:?} terms"),
                found: format!("{self:?}"),
            }),
        }
    }
}

/// `β = −½ ln(p / (1 − p))`.
pub fn nishimori_beta(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InfiniteCoupling(p));
    }
    Ok(0.5 * ((1.0 - p) / p).ln())
}

fn single_species(checks: &BitMatrix, e_rep: &BitVector) -> SmModel {
    assert_eq!(e_rep.len(), checks.ncols(), "representative length");
    let columns = checks.transpose();
    let terms = columns
        .rows()
        .iter()
        .enumerate()
        .map(|(l, col)| Term {
            sites: col.iter_ones().collect(),
            sign: if e_rep.get(l) { -1 } else { 1 },
            family: TermFamily::Single,
        })
        .collect();
    let symmetry_basis = columns.kernel_basis();
    SmModel {
        num_spins: checks.nrows(),
        terms,
        degeneracy_exponent: symmetry_basis.nrows(),
        symmetry_basis,
        species: Species::Single,
    }
}

/// Model for X errors: spins on the rows of `Hx`.
///
/// Panics if `e_rep.len() != n`.
pub fn build_sm_x(code: &CssCode, e_rep: &BitVector) -> SmModel {
    single_species(code.hx(), e_rep)
}

/// Model for Z errors: spins on the rows of `Hz`.
pub fn build_sm_z(code: &CssCode, e_rep: &BitVector) -> SmModel {
    single_species(code.hz(), e_rep)
}

/// Term structure of the two-species model for correlated X/Z noise.
///
/// σ spins sit on `Hx` rows, τ spins on `Hz` rows. Qubit `l` contributes an
/// X term on its σ sites with sign `(−1)^{ex[l]}`, a Z term on its τ sites
/// with sign `(−1)^{ez[l]}` and a Y term on both with sign
/// `(−1)^{ex[l]+ez[l]}`, in that order.
pub fn coupled_structure(code: &CssCode, ex_rep: &BitVector, ez_rep: &BitVector) -> SmModel {
    let x = build_sm_x(code, ex_rep);
    let z = build_sm_z(code, ez_rep);
    let offset = x.num_spins;
    let mut terms = Vec::with_capacity(3 * code.n());
    for (tx, tz) in x.terms.iter().zip(&z.terms) {
        let tau: Vec<usize> = tz.sites.iter().map(|s| s + offset).collect();
        terms.push(Term {
            sites: tx.sites.clone(),
            sign: tx.sign,
            family: TermFamily::X,
        });
        terms.push(Term {
            sites: tau.clone(),
            sign: tz.sign,
            family: TermFamily::Z,
        });
        terms.push(Term {
            sites: tx.sites.iter().copied().chain(tau).collect(),
            sign: tx.sign * tz.sign,
            family: TermFamily::Y,
        });
    }
    let num_spins = x.num_spins + z.num_spins;
    let mut symmetry_basis = BitMatrix::empty(num_spins);
    for r in x.symmetry_basis.rows() {
        symmetry_basis
            .push_row(r.concat(&BitVector::zeros(z.num_spins)))
            .expect("width matches");
    }
    for r in z.symmetry_basis.rows() {
        symmetry_basis
            .push_row(BitVector::zeros(x.num_spins).concat(r))
            .expect("width matches");
    }
    SmModel {
        num_spins,
        terms,
        symmetry_basis,
        degeneracy_exponent: x.degeneracy_exponent + z.degeneracy_exponent,
        species: Species::Coupled {
            num_sigma: x.num_spins,
            num_tau: z.num_spins,
        },
    }
}

/// Two-species model with its couplings and normalization.
#[derive(Clone, Debug)]
pub struct CoupledModel {
    pub model: SmModel,
    pub couplings: Couplings,
    /// `ln P(a, b, kx, kz) = ln_prefactor + ln Z`.
    pub ln_prefactor: f64,
}

/// Builds the correlated-noise model for the coset pair `(ex_rep, ez_rep)`.
///
/// Each qubit's weight `w(Ex_l, Ez_l)` is written as
/// `(1 − p̃) exp(c0 + cx U + cz V + cy U V)` with `U, V = ±1`; the family
/// coefficients follow from [`Couplings::from_pauli_betas`]. Any vanishing
/// rate, or `p̃ = 1`, makes a coupling infinite and is rejected.
pub fn build_sm_coupled(
    code: &CssCode,
    ex_rep: &BitVector,
    ez_rep: &BitVector,
    noise: &PauliNoise,
) -> Result<CoupledModel> {
    let identity = noise.identity();
    let beta = |p: f64| {
        if p > 0.0 && identity > 0.0 {
            Ok(-0.5 * (p / identity).ln())
        } else {
            Err(Error::InfiniteCoupling(p))
        }
    };
    let (bx, by, bz) = (beta(noise.ptx)?, beta(noise.pty)?, beta(noise.ptz)?);
    let model = coupled_structure(code, ex_rep, ez_rep);
    let n = code.n() as f64;
    let c0 = -(bx + by + bz) / 2.0;
    let ln_prefactor = n * (identity.ln() + c0) - model.degeneracy_exponent as f64 * LN_2;
    Ok(CoupledModel {
        model,
        couplings: Couplings::from_pauli_betas(bx, by, bz),
        ln_prefactor,
    })
}

/// Per-term coupling `J_t s_t` and the terms touching each spin.
fn prepare(model: &SmModel, couplings: &Couplings) -> Result<(Vec<f64>, Vec<Vec<usize>>)> {
    let weights = model
        .terms
        .iter()
        .map(|t| Ok(couplings.coefficient(t.family)? * f64::from(t.sign)))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "coupling {w} is not finite"
        )));
    }
    let mut touching = vec![Vec::new(); model.num_spins];
    for (t, term) in model.terms.iter().enumerate() {
        for &s in &term.sites {
            touching[s].push(t);
        }
    }
    Ok((weights, touching))
}

/// Running log-sum-exp accumulator.
#[derive(Clone, Copy)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    fn add(&mut self, x: f64) {
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    fn merge(&mut self, other: LogSum) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        } else {
            self.sum += other.sum * (other.max - self.max).exp();
        }
    }

    fn ln(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

/// `ln Σ_σ exp(Σ_t J_t s_t ∏ σ)` by enumerating all spin configurations.
///
/// The walk is split into a fixed number of Gray-code chunks whose partial
/// sums are merged in order, so the result does not depend on the thread
/// count.
pub fn partition_exact(model: &SmModel, couplings: &Couplings) -> Result<f64> {
    if model.num_spins > SPIN_ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "spins for exact enumeration",
            limit: SPIN_ENUMERATION_LIMIT,
            actual: model.num_spins,
        });
    }
    let (weights, touching) = prepare(model, couplings)?;
    let total = 1u64 << model.num_spins;
    let chunks = total.min(64);
    let per = total / chunks;
    let partials: Vec<LogSum> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * per;
            let end = start + per;
            // products ∏σ for the Gray word of `start`
            let g = start ^ (start >> 1);
            let mut prods: Vec<f64> = model
                .terms
                .iter()
                .map(|t| {
                    let flips = t.sites.iter().filter(|&&s| g >> s & 1 == 1).count();
                    if flips % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            let mut energy: f64 = weights.iter().zip(&prods).map(|(w, p)| w * p).sum();
            let mut acc = LogSum::new();
            acc.add(energy);
            for i in start + 1..end {
                let s = i.trailing_zeros() as usize;
                for &t in &touching[s] {
                    energy -= 2.0 * weights[t] * prods[t];
                    prods[t] = -prods[t];
                }
                acc.add(energy);
            }
            acc
        })
        .collect();
    let mut total_sum = LogSum::new();
    for p in partials {
        total_sum.merge(p);
    }
    Ok(total_sum.ln())
}

fn ln_two_cosh(beta: f64) -> f64 {
    beta.abs() + (-2.0 * beta.abs()).exp().ln_1p()
}

/// `ln` of the sector probability implied by `ln Z` of a single-species model.
fn ln_sector_probability(ln_z: f64, model: &SmModel, n: usize, beta: f64) -> f64 {
    ln_z - model.degeneracy_exponent as f64 * LN_2 - n as f64 * ln_two_cosh(beta)
}

fn representative(code: &CssCode, side: Side, syndrome: u64, logical: u64) -> Result<BitVector> {
    match side {
        Side::X => code.x_error_representative(
            &BitVector::from_u64(code.rank_z(), syndrome),
            &BitVector::from_u64(code.k(), logical),
        ),
        Side::Z => code.z_error_representative(
            &BitVector::from_u64(code.rank_x(), syndrome),
            &BitVector::from_u64(code.k(), logical),
        ),
    }
}

fn build_side(code: &CssCode, side: Side, e_rep: &BitVector) -> SmModel {
    match side {
        Side::X => build_sm_x(code, e_rep),
        Side::Z => build_sm_z(code, e_rep),
    }
}

/// `ln Z` at coupling `beta` for every sector of one side, indexed like the
/// single-side sector distributions (syndrome low, logical high).
fn sector_log_partitions(code: &CssCode, side: Side, beta: f64) -> Result<(Vec<f64>, SmModel)> {
    let syndrome_bits = match side {
        Side::X => code.rank_z(),
        Side::Z => code.rank_x(),
    };
    let k = code.k();
    let probe = build_side(code, side, &BitVector::zeros(code.n()));
    let mut out = Vec::with_capacity(1 << (syndrome_bits + k));
    for index in 0..1u64 << (syndrome_bits + k) {
        let syndrome = index & ((1 << syndrome_bits) - 1);
        let rep = representative(code, side, syndrome, index >> syndrome_bits)?;
        let model = build_side(code, side, &rep);
        out.push(partition_exact(&model, &Couplings::Single { beta })?);
    }
    Ok((out, probe))
}

/// Worst disagreement between enumerated sector probabilities and their
/// partition-function expressions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorIdentityReport {
    pub side: Side,
    pub p: f64,
    pub beta: f64,
    pub sectors: usize,
    pub max_abs_deviation: f64,
}

fn verify_side(code: &CssCode, side: Side, p: f64) -> Result<SectorIdentityReport> {
    let beta = nishimori_beta(p)?;
    let dist = match side {
        Side::X => sector_distribution_x(code, p)?,
        Side::Z => sector_distribution_z(code, p)?,
    };
    let (ln_z, probe) = sector_log_partitions(code, side, beta)?;
    let mut max_abs_deviation: f64 = 0.0;
    for (lz, &p_enum) in ln_z.iter().zip(dist.probabilities()) {
        let p_sm = ln_sector_probability(*lz, &probe, code.n(), beta).exp();
        max_abs_deviation = max_abs_deviation.max((p_sm - p_enum).abs());
    }
    Ok(SectorIdentityReport {
        side,
        p,
        beta,
        sectors: ln_z.len(),
        max_abs_deviation,
    })
}

/// Checks `P(b, kz) = Z(b, kz) / (2^Dx (2 cosh β)^n)` on every X sector.
pub fn verify_sector_identity(code: &CssCode, px: f64) -> Result<SectorIdentityReport> {
    verify_side(code, Side::X, px)
}

/// Mirror of [`verify_sector_identity`] for phase flips.
pub fn verify_sector_identity_z(code: &CssCode, pz: f64) -> Result<SectorIdentityReport> {
    verify_side(code, Side::Z, pz)
}

/// Dual coupling `β_z` with `sinh 2β_x sinh 2β_z = 1`.
pub fn dual_beta(beta_x: f64) -> Result<f64> {
    if !(beta_x > 0.0 && beta_x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "duality needs a positive finite coupling, got {beta_x}"
        )));
    }
    Ok(0.5 * (1.0 / (2.0 * beta_x).sinh()).asinh())
}

/// Both sides of the disorder-free duality between the X and Z models.
///
/// With `t = tanh β_x` and normalized sector weights `P` as in the sector
/// identity, the exact statement is
/// `Σ_kz P_x(o, kz) = (1 + t)^n / 2^rank_z · P_z(o, o)`;
/// the raw comparison keeps only `kz = 0` on the left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KwReport {
    pub beta_x: f64,
    pub beta_z: f64,
    pub ln_px_trivial: f64,
    pub ln_px_summed: f64,
    pub ln_rhs: f64,
    /// `ln P_x(o, o) − ln rhs`; nonzero from other homology classes.
    pub raw_discrepancy: f64,
    /// `ln Σ_kz P_x(o, kz) − ln rhs`; zero up to rounding.
    pub summed_discrepancy: f64,
}

pub fn kw_check(code: &CssCode, beta_x: f64) -> Result<KwReport> {
    let beta_z = dual_beta(beta_x)?;
    let n = code.n();
    let k = code.k();
    let mut px = LogSum::new();
    let mut ln_px_trivial = 0.0;
    for kz in 0..1u64 << k {
        let rep = representative(code, Side::X, 0, kz)?;
        let model = build_sm_x(code, &rep);
        let ln_z = partition_exact(&model, &Couplings::Single { beta: beta_x })?;
        let ln_p = ln_sector_probability(ln_z, &model, n, beta_x);
        if kz == 0 {
            ln_px_trivial = ln_p;
        }
        px.add(ln_p);
    }
    let z_model = build_sm_z(code, &BitVector::zeros(n));
    let ln_pz = ln_sector_probability(
        partition_exact(&z_model, &Couplings::Single { beta: beta_z })?,
        &z_model,
        n,
        beta_z,
    );
    let ln_rhs = n as f64 * beta_x.tanh().ln_1p() - code.rank_z() as f64 * LN_2 + ln_pz;
    let ln_px_summed = px.ln();
    Ok(KwReport {
        beta_x,
        beta_z,
        ln_px_trivial,
        ln_px_summed,
        ln_rhs,
        raw_discrepancy: ln_px_trivial - ln_rhs,
        summed_discrepancy: ln_px_summed - ln_rhs,
    })
}

/// Disorder-averaged free-energy cost of shifting the logical label by
/// `k_shift`, `Σ P(b, kz) log2(Z(b, kz) / Z(b, kz ⊕ k_shift))`, with both
/// the weights and the ratios taken from exact partition functions.
pub fn domain_wall_free_energy(
    code: &CssCode,
    px: f64,
    k_shift: &BitVector,
) -> Result<RelativeEntropy> {
    if k_shift.len() != code.k() {
        return Err(Error::DimensionMismatch {
            context: "logical shift",
            expected: code.k(),
            found: k_shift.len(),
        });
    }
    if k_shift.is_zero() {
        return Ok(RelativeEntropy::Finite(0.0));
    }
    let beta = match nishimori_beta(px) {
        Ok(b) => b,
        // a deterministic error pattern makes the two sectors disjoint
        Err(Error::InfiniteCoupling(_)) => return Ok(RelativeEntropy::Infinite),
        Err(e) => return Err(e),
    };
    let (ln_z, probe) = sector_log_partitions(code, Side::X, beta)?;
    let shift = (k_shift.to_u64() as usize) << code.rank_z();
    let total = ln_z
        .iter()
        .enumerate()
        .map(|(i, &lz)| {
            let p = ln_sector_probability(lz, &probe, code.n(), beta).exp();
            p * (lz - ln_z[i ^ shift]) / LN_2
        })
        .sum();
    Ok(RelativeEntropy::Finite(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing_from_independent, sector_distribution_joint};
    use crate::code_zoo::{color666, four22, steane, surface2d, toric2d, toric3d, xcube};
    use crate::info::relative_entropy;
    use proptest::prelude::*;

    #[test]
    fn nishimori_values() {
        assert_eq!(nishimori_beta(0.5).unwrap(), 0.0);
        assert!((nishimori_beta(0.1).unwrap() - 0.5 * 9f64.ln()).abs() < 1e-15);
        assert!((nishimori_beta(0.3).unwrap() + nishimori_beta(0.7).unwrap()).abs() < 1e-15);
        assert!(matches!(
            nishimori_beta(0.0),
            Err(Error::InfiniteCoupling(_))
        ));
        assert!(nishimori_beta(1.0).is_err());
    }

    #[test]
    fn model_structures() {
        let m = build_sm_x(&four22(), &BitVector::zeros(4));
        assert_eq!(m.num_spins, 1);
        assert_eq!(m.terms.len(), 4);
        assert!(m.terms.iter().all(|t| t.sites == vec![0]));
        assert_eq!(m.symmetry_basis.nrows(), 0);

        let m = build_sm_x(&toric2d(2).unwrap(), &BitVector::zeros(8));
        assert_eq!(m.num_spins, 4);
        assert_eq!(m.terms.len(), 8);
        assert!(m.terms.iter().all(|t| t.sites.len() == 2));
        assert_eq!(m.symmetry_basis.nrows(), 1);
        assert_eq!(m.symmetry_basis.row(0).weight(), 4);
        assert_eq!(m.degeneracy_exponent, 1);

        let m = build_sm_x(&color666(3, 3).unwrap(), &BitVector::zeros(18));
        assert!(m.terms.iter().all(|t| t.sites.len() == 3));
        assert_eq!(m.symmetry_basis.nrows(), 2);

        let m = build_sm_z(&toric3d(2).unwrap(), &BitVector::zeros(24));
        assert!(m.terms.iter().all(|t| t.sites.len() == 4));

        let xc = xcube(2).unwrap();
        let mx = build_sm_x(&xc, &BitVector::zeros(24));
        assert!(mx.terms.iter().all(|t| t.sites.len() == 4));
        let mz = build_sm_z(&xc, &BitVector::zeros(24));
        // the z-normal cross is dropped, so z edges touch four crosses and others two
        assert!(mz
            .terms
            .iter()
            .all(|t| t.sites.len() == 2 || t.sites.len() == 4));

        let s = surface2d(3, 3).unwrap();
        let m = build_sm_x(&s, &BitVector::zeros(s.n()));
        assert!(m.terms.iter().any(|t| t.sites.len() == 1));
        assert_eq!(m.symmetry_basis.nrows(), 0);

        for m in [mx, mz, m] {
            assert!(m.symmetries_preserve_terms());
        }
    }

    #[test]
    fn partition_closed_forms() {
        let m = build_sm_x(&toric2d(2).unwrap(), &BitVector::zeros(8));
        let z0 = partition_exact(&m, &Couplings::Single { beta: 0.0 }).unwrap();
        assert!((z0 - 4.0 * LN_2).abs() < 1e-14);

        let single = SmModel {
            num_spins: 1,
            terms: vec![Term {
                sites: vec![0],
                sign: 1,
                family: TermFamily::Single,
            }],
            symmetry_basis: BitMatrix::empty(1),
            degeneracy_exponent: 0,
            species: Species::Single,
        };
        for beta in [0.3, 2.0, -1.5] {
            let z = partition_exact(&single, &Couplings::Single { beta }).unwrap();
            assert!((z - (2.0 * f64::cosh(beta)).ln()).abs() < 1e-14);
        }
        assert!(partition_exact(
            &single,
            &Couplings::Coupled {
                x: 1.0,
                y: 1.0,
                z: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn toric2d_ferromagnet_by_hand() {
        let m = build_sm_x(&toric2d(2).unwrap(), &BitVector::zeros(8));
        let beta = 0.3;
        let mut z = 0.0;
        for s in 0..16u32 {
            let spin = |i: usize| if s >> i & 1 == 1 { -1.0 } else { 1.0 };
            let e: f64 = m
                .terms
                .iter()
                .map(|t| t.sites.iter().map(|&i| spin(i)).product::<f64>())
                .sum();
            z += (beta * e).exp();
        }
        let exact = partition_exact(&m, &Couplings::Single { beta }).unwrap();
        assert!((exact - z.ln()).abs() < 1e-13);
    }

    #[test]
    fn large_couplings_do_not_overflow() {
        let code = toric2d(3).unwrap();
        let m = build_sm_x(&code, &BitVector::zeros(code.n()));
        let z = partition_exact(&m, &Couplings::Single { beta: 500.0 }).unwrap();
        // two ground states, energy 18 each
        assert!((z - (500.0 * 18.0 + LN_2)).abs() < 1e-9);
    }

    #[test]
    fn sector_identity_holds() {
        for (code, p) in [
            (four22(), 0.1),
            (four22(), 0.5),
            (toric2d(2).unwrap(), 0.15),
            (steane(), 0.05),
        ] {
            let r = verify_sector_identity(&code, p).unwrap();
            assert!(r.max_abs_deviation < 1e-12, "{r:?}");
            let r = verify_sector_identity_z(&code, p).unwrap();
            assert!(r.max_abs_deviation < 1e-12, "{r:?}");
        }
        assert!(verify_sector_identity(&four22(), 0.0).is_err());
    }

    #[test]
    fn gauge_covariance() {
        let code = toric2d(2).unwrap();
        let mut rep = BitVector::zeros(8);
        rep.set(3, true);
        let shifted = rep.xor(code.hx().row(1));
        let c = Couplings::Single { beta: 0.7 };
        let a = partition_exact(&build_sm_x(&code, &rep), &c).unwrap();
        let b = partition_exact(&build_sm_x(&code, &shifted), &c).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn high_temperature_expansion() {
        // four22: P_x(o,o) = 2^(rank_x - n) Σ_{l ∈ ker Hx} t^|l| = (1 + 6t² + t⁴) / 8
        let code = four22();
        let m = build_sm_x(&code, &BitVector::zeros(4));
        for beta in [0.05, 0.1, 0.2] {
            let ln_p = ln_sector_probability(
                partition_exact(&m, &Couplings::Single { beta }).unwrap(),
                &m,
                4,
                beta,
            );
            let t: f64 = f64::tanh(beta);
            let second_order = ((1.0 + 6.0 * t * t) / 8.0).ln();
            assert!((ln_p - second_order).abs() <= t.powi(4) * 1.01);
            let full = ((1.0 + 6.0 * t * t + t.powi(4)) / 8.0).ln();
            assert!((ln_p - full).abs() < 1e-14);
        }
    }

    #[test]
    fn kramers_wannier() {
        for (code, beta) in [(four22(), 0.5), (toric2d(2).unwrap(), 0.4), (steane(), 0.8)] {
            let r = kw_check(&code, beta).unwrap();
            assert!((f64::sinh(2.0 * r.beta_x) * f64::sinh(2.0 * r.beta_z) - 1.0).abs() < 1e-12);
            assert!(r.summed_discrepancy.abs() < 1e-9, "{r:?}");
        }
        let r = kw_check(&toric2d(2).unwrap(), 0.4).unwrap();
        assert!(r.raw_discrepancy.abs() > 1e-3);
        // deep in the ordered phase the trivial class dominates
        let r = kw_check(&toric2d(2).unwrap(), 4.0).unwrap();
        assert!(r.raw_discrepancy.abs() < 1e-3);
        assert!(kw_check(&four22(), 0.0).is_err());
    }

    #[test]
    fn domain_wall_matches_relative_entropy() {
        let code = toric2d(2).unwrap();
        let shift = BitVector::from_u64(2, 0b01);
        for p in [0.05, 0.2, 0.35] {
            let dist = sector_distribution_x(&code, p).unwrap();
            let rel = relative_entropy(&dist, &BitVector::zeros(2), &shift)
                .unwrap()
                .finite()
                .unwrap();
            let dw = domain_wall_free_energy(&code, p, &shift)
                .unwrap()
                .finite()
                .unwrap();
            assert!((rel - dw).abs() < 1e-12, "{rel} vs {dw}");
        }
        assert_eq!(
            domain_wall_free_energy(&code, 0.0, &shift).unwrap(),
            RelativeEntropy::Infinite
        );
        assert!(
            domain_wall_free_energy(&code, 0.5, &shift)
                .unwrap()
                .finite()
                .unwrap()
                .abs()
                < 1e-15
        );
        let low = domain_wall_free_energy(&code, 0.02, &shift)
            .unwrap()
            .finite()
            .unwrap();
        let high = domain_wall_free_energy(&code, 0.2, &shift)
            .unwrap()
            .finite()
            .unwrap();
        assert!(low > high);
    }

    #[test]
    fn coupled_model_reproduces_joint_distribution() {
        let code = four22();
        let noise = PauliNoise::new(0.07, 0.03, 0.11).unwrap();
        let joint = sector_distribution_joint(&code, &noise).unwrap();
        let (wa, wb, k) = (code.rank_x(), code.rank_z(), code.k());
        for (index, &p) in joint.probabilities().iter().enumerate() {
            let idx = index as u64;
            let a = idx & ((1 << wa) - 1);
            let b = (idx >> wa) & ((1 << wb) - 1);
            let kx = (idx >> (wa + wb)) & ((1 << k) - 1);
            let kz = idx >> (wa + wb + k);
            let ex = representative(&code, Side::X, b, kz).unwrap();
            let ez = representative(&code, Side::Z, a, kx).unwrap();
            let cm = build_sm_coupled(&code, &ex, &ez, &noise).unwrap();
            assert!(cm.model.symmetries_preserve_terms());
            let ln_p = cm.ln_prefactor + partition_exact(&cm.model, &cm.couplings).unwrap();
            assert!((ln_p.exp() - p).abs() < 1e-12, "index {index}");
        }
    }

    #[test]
    fn coupled_model_factorizes_under_identification() {
        let code = four22();
        let (px, pz) = (0.12, 0.07);
        let noise = depolarizing_from_independent(px, pz);
        let mut ex = BitVector::zeros(4);
        ex.set(1, true);
        let mut ez = BitVector::zeros(4);
        ez.set(2, true);
        let cm = build_sm_coupled(&code, &ex, &ez, &noise).unwrap();
        let Couplings::Coupled { x, y, z } = cm.couplings else {
            panic!()
        };
        assert!(y.abs() < 1e-12);
        assert!((x - nishimori_beta(px).unwrap()).abs() < 1e-12);
        assert!((z - nishimori_beta(pz).unwrap()).abs() < 1e-12);
        let joint = partition_exact(&cm.model, &cm.couplings).unwrap();
        let zx = partition_exact(&build_sm_x(&code, &ex), &Couplings::Single { beta: x }).unwrap();
        let zz = partition_exact(&build_sm_z(&code, &ez), &Couplings::Single { beta: z }).unwrap();
        assert!((joint - zx - zz).abs() < 1e-10);
    }

    #[test]
    fn coupled_model_rejects_zero_rates() {
        let code = four22();
        let zero = BitVector::zeros(4);
        for noise in [
            PauliNoise::new(0.0, 0.0, 0.0).unwrap(),
            PauliNoise::new(0.0, 0.2, 0.0).unwrap(),
        ] {
            assert!(matches!(
                build_sm_coupled(&code, &zero, &zero, &noise),
                Err(Error::InfiniteCoupling(_))
            ));
        }
    }

    #[test]
    fn y_dominated_noise_couples_through_y_terms() {
        // β̃x = β̃z large, β̃y small: the Y family carries almost all coupling
        let Couplings::Coupled { x, y, z } = Couplings::from_pauli_betas(5.0, 0.1, 5.0) else {
            panic!()
        };
        assert!((x - 0.05).abs() < 1e-15 && (z - 0.05).abs() < 1e-15);
        assert!((y - 4.95).abs() < 1e-15);
    }

    #[test]
    fn json_export() {
        let code = toric2d(2).unwrap();
        let mut rep = BitVector::zeros(8);
        rep.set(0, true);
        let m = build_sm_x(&code, &rep);
        let text = m.to_json().unwrap();
        assert!(text.contains("\"sign\": -1"));
        assert_eq!(SmModel::from_json(&text).unwrap(), m);
        let cm = coupled_structure(&code, &rep, &rep);
        assert_eq!(SmModel::from_json(&cm.to_json().unwrap()).unwrap(), cm);
    }

    #[test]
    fn enumeration_limit() {
        let code = toric2d(5).unwrap();
        let m = build_sm_x(&code, &BitVector::zeros(code.n()));
        assert!(partition_exact(&m, &Couplings::Single { beta: 0.1 })
            .unwrap_err()
            .is_bound_exceeded());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn symmetry_rows_are_even_on_terms(bits in 0u64..(1 << 18)) {
            let code = toric2d(3).unwrap();
            let rep = BitVector::from_u64(18, bits);
            prop_assert!(build_sm_x(&code, &rep).symmetries_preserve_terms());
            prop_assert!(build_sm_z(&code, &rep).symmetries_preserve_terms());
        }

        #[test]
        fn thread_count_does_not_change_ln_z(beta in -2.0f64..2.0, bits in 0u64..(1 << 18)) {
            let code = toric2d(3).unwrap();
            let m = build_sm_x(&code, &BitVector::from_u64(18, bits));
            let c = Couplings::Single { beta };
            let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()
                .install(|| partition_exact(&m, &c).unwrap());
            let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap()
                .install(|| partition_exact(&m, &c).unwrap());
            prop_assert_eq!(one.to_bits(), many.to_bits());
        }
    }
}
