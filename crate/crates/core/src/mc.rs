//! Single-spin-flip Metropolis sampling of the single-species models with
//! disorder drawn from the noise channel.
//!
//! Random numbers come from ChaCha8 streams. Every replica and disorder draw
//! gets its own stream, selected by hashing `(seed, purpose, indices)`, so
//! results do not depend on scheduling or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::Side;
use crate::css_code::CssCode;
use crate::error::{Error, Result};
use crate::f2linalg::BitVector;
use crate::statmech::{build_sm_x, build_sm_z, SmModel, Species};

/// Number of blocks used for error bars.
pub const BLOCKS: usize = 16;

/// Initial spin configuration of every replica.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Start {
    /// All spins up.
    Cold,
    /// Independent uniform spins per replica.
    Hot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct McConfig {
    /// Total sweeps, including burn-in.
    pub sweeps: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub replicas: usize,
    /// Worker threads; `0` uses the ambient rayon pool.
    pub threads: usize,
    pub start: Start,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            sweeps: 4096,
            burn_in: 1024,
            seed: 0,
            replicas: 2,
            threads: 0,
            start: Start::Cold,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidParameter("need at least one replica".into()));
        }
        if self.burn_in >= self.sweeps || self.sweeps - self.burn_in < BLOCKS {
            return Err(Error::InvalidParameter(format!(
                "need at least {BLOCKS} measured sweeps after burn-in, got {} - {}",
                self.sweeps, self.burn_in
            )));
        }
        Ok(())
    }

    fn measured(&self) -> usize {
        self.sweeps - self.burn_in
    }
}

/// Estimates with blocking errors. Energies are per term in units of the
/// coupling, so a fully satisfied model sits at −1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McObservables {
    pub mean_energy: f64,
    pub energy_err: f64,
    /// Mean squared overlap between replica pairs; absent with one replica.
    pub ea_overlap: Option<f64>,
    pub ea_err: Option<f64>,
    /// Measured sweeps per replica.
    pub samples: usize,
}

/// SplitMix64 finalizer, used only to derive stream identifiers.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const PURPOSE_DISORDER: u64 = 1;
const PURPOSE_REPLICA: u64 = 2;

fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let id = path
        .iter()
        .fold(mix64(seed), |acc, &x| mix64(acc ^ mix64(x)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Draws an error string with independent flips at rate `p`.
pub fn sample_disorder(code: &CssCode, p: f64, rng_seed: u64) -> Result<BitVector> {
    let mut rng = stream(rng_seed, &[PURPOSE_DISORDER]);
    draw(code.n(), p, &mut rng)
}

fn draw(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<BitVector> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{p} is not a probability")));
    }
    let mut e = BitVector::zeros(n);
    for l in 0..n {
        if rng.gen::<f64>() < p {
            e.set(l, true);
        }
    }
    Ok(e)
}

/// Compressed term/spin incidence for the update loop.
struct Lattice {
    signs: Vec<i8>,
    term_sites: Vec<Vec<u32>>,
    /// `spin_terms[offsets[s]..offsets[s+1]]` are the terms containing `s`.
    offsets: Vec<usize>,
    spin_terms: Vec<u32>,
}

impl Lattice {
    fn new(model: &SmModel) -> Result<Self> {
        if model.species != Species::Single {
            return Err(Error::ModeMismatch {
                expected: "a single-species model".into(),
                found: format!("{:?}", model.species),
            });
        }
        let mut touching = vec![Vec::new(); model.num_spins];
        for (t, term) in model.terms.iter().enumerate() {
            for &s in &term.sites {
                touching[s].push(t as u32);
            }
        }
        let mut offsets = vec![0];
        let mut spin_terms = Vec::new();
        for ts in touching {
            spin_terms.extend(ts);
            offsets.push(spin_terms.len());
        }
        Ok(Self {
            signs: model.terms.iter().map(|t| t.sign).collect(),
            term_sites: model
                .terms
                .iter()
                .map(|t| t.sites.iter().map(|&s| s as u32).collect())
                .collect(),
            offsets,
            spin_terms,
        })
    }
}

struct Replica {
    spins: Vec<i8>,
    /// `sign_t ∏ σ` per term.
    satisfied: Vec<i8>,
    /// `Σ_t sign_t ∏ σ`.
    total: i64,
    rng: ChaCha8Rng,
}

impl Replica {
    fn new(lattice: &Lattice, num_spins: usize, start: Start, mut rng: ChaCha8Rng) -> Self {
        let spins: Vec<i8> = (0..num_spins)
            .map(|_| match start {
                Start::Cold => 1,
                Start::Hot => {
                    if rng.gen::<bool>() {
                        1
                    } else {
                        -1
                    }
                }
            })
            .collect();
        let satisfied: Vec<i8> = lattice
            .term_sites
            .iter()
            .zip(&lattice.signs)
            .map(|(sites, &sign)| sites.iter().fold(sign, |acc, &s| acc * spins[s as usize]))
            .collect();
        let total = satisfied.iter().map(|&v| i64::from(v)).sum();
        Self {
            spins,
            satisfied,
            total,
            rng,
        }
    }

    /// One pass over all spins in index order.
    fn sweep(&mut self, lattice: &Lattice, beta: f64) {
        for s in 0..self.spins.len() {
            let terms = &lattice.spin_terms[lattice.offsets[s]..lattice.offsets[s + 1]];
            let field: i64 = terms
                .iter()
                .map(|&t| i64::from(self.satisfied[t as usize]))
                .sum();
            // flipping changes the exponent β Σ sign∏σ by −2β·field; moves
            // that leave the weight unchanged take a fair coin, since always
            // accepting them makes the sequential sweep reducible on small
            // lattices with doubled bonds
            let accept = if field == 0 || beta == 0.0 {
                self.rng.gen::<bool>()
            } else {
                let x = -2.0 * beta * field as f64;
                x >= 0.0 || self.rng.gen::<f64>() < x.exp()
            };
            if accept {
                self.spins[s] = -self.spins[s];
                for &t in terms {
                    self.satisfied[t as usize] = -self.satisfied[t as usize];
                }
                self.total -= 2 * field;
            }
        }
    }
}

/// Mean and standard error from equal-size blocks of a time series.
fn blocking(series: &[f64]) -> (f64, f64) {
    let len = series.len() / BLOCKS * BLOCKS;
    let per = len / BLOCKS;
    let means: Vec<f64> = series[series.len() - len..]
        .chunks(per)
        .map(|c| c.iter().sum::<f64>() / per as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / BLOCKS as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (BLOCKS - 1) as f64;
    (mean, (var / BLOCKS as f64).sqrt())
}

/// Per-sweep averages over replicas (energy per term) and replica pairs (q²).
fn run_chain(
    model: &SmModel,
    lattice: &Lattice,
    beta: f64,
    cfg: &McConfig,
    path: &[u64],
) -> (Vec<f64>, Vec<f64>) {
    let mut replicas: Vec<Replica> = (0..cfg.replicas)
        .map(|r| {
            let mut p = path.to_vec();
            p.extend([PURPOSE_REPLICA, r as u64]);
            Replica::new(lattice, model.num_spins, cfg.start, stream(cfg.seed, &p))
        })
        .collect();
    let terms = model.terms.len().max(1) as f64;
    let spins = model.num_spins.max(1) as f64;
    let mut energy = Vec::with_capacity(cfg.measured());
    let mut overlap = Vec::with_capacity(cfg.measured());
    for sweep in 0..cfg.sweeps {
        for r in &mut replicas {
            r.sweep(lattice, beta);
        }
        if sweep < cfg.burn_in {
            continue;
        }
        let e: f64 = replicas
            .iter()
            .map(|r| -(r.total as f64) / terms)
            .sum::<f64>()
            / replicas.len() as f64;
        energy.push(e);
        if replicas.len() >= 2 {
            let mut acc = 0.0;
            let mut pairs = 0usize;
            for i in 0..replicas.len() {
                for j in i + 1..replicas.len() {
                    let q: i64 = replicas[i]
                        .spins
                        .iter()
                        .zip(&replicas[j].spins)
                        .map(|(&a, &b)| i64::from(a * b))
                        .sum();
                    acc += (q as f64 / spins).powi(2);
                    pairs += 1;
                }
            }
            overlap.push(acc / pairs as f64);
        }
    }
    (energy, overlap)
}

/// Metropolis estimates for one model at inverse temperature `beta`.
///
/// Infinite `beta` is allowed and samples at zero temperature (only moves
/// that do not raise the energy are accepted).
pub fn metropolis(model: &SmModel, beta: f64, cfg: &McConfig) -> Result<McObservables> {
    cfg.validate()?;
    if beta.is_nan() {
        return Err(Error::InvalidParameter("beta is NaN".into()));
    }
    let lattice = Lattice::new(model)?;
    let (energy, overlap) = run_chain(model, &lattice, beta, cfg, &[]);
    let (mean_energy, energy_err) = blocking(&energy);
    let (ea_overlap, ea_err) = if overlap.is_empty() {
        (None, None)
    } else {
        let (m, e) = blocking(&overlap);
        (Some(m), Some(e))
    };
    Ok(McObservables {
        mean_energy,
        energy_err,
        ea_overlap,
        ea_err,
        samples: cfg.measured(),
    })
}

/// Disorder-averaged observables at one point of a Nishimori scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: f64,
    pub beta: f64,
    pub mean_energy: f64,
    pub energy_err: f64,
    pub ea_overlap: Option<f64>,
    pub ea_err: Option<f64>,
    /// Disorder realizations averaged.
    pub samples: usize,
}

/// `β = −½ ln(p / (1 − p))`, extended to `±∞` at the endpoints.
fn scan_beta(p: f64) -> f64 {
    if p == 0.0 {
        f64::INFINITY
    } else if p == 1.0 {
        f64::NEG_INFINITY
    } else {
        0.5 * ((1.0 - p) / p).ln()
    }
}

fn mean_and_err(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `disorder_samples` independent disorder draws per grid point along
/// the Nishimori line and averages their thermal estimates. Error bars are
/// the standard error over disorder draws.
pub fn nishimori_scan(
    code: &CssCode,
    side: Side,
    p_grid: &[f64],
    disorder_samples: usize,
    cfg: &McConfig,
) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    if disorder_samples == 0 {
        return Err(Error::InvalidParameter(
            "need at least one disorder sample".into(),
        ));
    }
    let run = || -> Result<Vec<ScanRow>> {
        let mut rows = Vec::with_capacity(p_grid.len());
        for (pi, &p) in p_grid.iter().enumerate() {
            let beta = scan_beta(p);
            let per_sample: Vec<(f64, Option<f64>)> = (0..disorder_samples)
                .into_par_iter()
                .map(|j| {
                    let path = [pi as u64, j as u64];
                    let mut rng = stream(cfg.seed, &[PURPOSE_DISORDER, path[0], path[1]]);
                    let e = draw(code.n(), p, &mut rng)?;
                    let model = match side {
                        Side::X => build_sm_x(code, &e),
                        Side::Z => build_sm_z(code, &e),
                    };
                    let lattice = Lattice::new(&model)?;
                    let (energy, overlap) = run_chain(&model, &lattice, beta, cfg, &path);
                    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                    Ok((avg(&energy), (!overlap.is_empty()).then(|| avg(&overlap))))
                })
                .collect::<Result<_>>()?;
            let energies: Vec<f64> = per_sample.iter().map(|s| s.0).collect();
            let (mean_energy, energy_err) = mean_and_err(&energies);
            let overlaps: Vec<f64> = per_sample.iter().filter_map(|s| s.1).collect();
            let (ea_overlap, ea_err) = if overlaps.is_empty() {
                (None, None)
            } else {
                let (m, e) = mean_and_err(&overlaps);
                (Some(m), Some(e))
            };
            rows.push(ScanRow {
                p,
                beta,
                mean_energy,
                energy_err,
                ea_overlap,
                ea_err,
                samples: disorder_samples,
            });
        }
        Ok(rows)
    };
    if cfg.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run)
    }
}
