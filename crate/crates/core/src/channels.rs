//! Pauli noise models and exact sector distributions.
//!
//! A sector distribution assigns a probability to every reachable label
//! `(a, b, kx, kz)` (or a subset of those fields). The tables are produced by
//! walking all error strings in Gray-code order, so each step toggles one
//! qubit and updates the sector key with a single XOR.
//!
//! Packed layout: the fields present are concatenated in the order
//! `a, b, kx, kz`, low bits first, and bit `i` of a field is bit `i` of its
//! label vector. Syndrome fields therefore occupy the low bits of a packed
//! index and logical fields the high bits.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::css_code::{CssCode, SectorKey};
use crate::error::{Error, Result};
use crate::f2linalg::BitMatrix;

/// Largest `n` accepted by the single-side enumerators.
pub const FACTORIZED_QUBIT_LIMIT: usize = 26;
/// Largest `n` accepted by the joint `(Ex, Ez)` enumerator.
pub const JOINT_QUBIT_LIMIT: usize = 13;

/// Count tables larger than this many entries are not built; the enumerator
/// accumulates floating-point probabilities directly instead.
const COUNT_TABLE_LIMIT: usize = 1 << 24;

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} = {p} is not a probability"
        )))
    }
}

/// Independent bit-flip and phase-flip rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentNoise {
    pub px: f64,
    pub pz: f64,
}

impl IndependentNoise {
    pub fn new(px: f64, pz: f64) -> Result<Self> {
        check_probability(px, "px")?;
        check_probability(pz, "pz")?;
        Ok(Self { px, pz })
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new(p, p)
    }
}

/// Single-qubit Pauli channel with X, Y and Z rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliNoise {
    pub ptx: f64,
    pub pty: f64,
    pub ptz: f64,
}

impl PauliNoise {
    pub fn new(ptx: f64, pty: f64, ptz: f64) -> Result<Self> {
        check_probability(ptx, "ptx")?;
        check_probability(pty, "pty")?;
        check_probability(ptz, "ptz")?;
        let noise = Self { ptx, pty, ptz };
        if noise.total() > 1.0 + 1e-15 {
            return Err(Error::InvalidParameter(format!(
                "Pauli rates sum to {} > 1",
                noise.total()
            )));
        }
        Ok(noise)
    }

    /// Total error probability `p̃x + p̃y + p̃z`.
    pub fn total(&self) -> f64 {
        self.ptx + self.pty + self.ptz
    }

    /// Probability of the identity, clamped at zero.
    pub fn identity(&self) -> f64 {
        (1.0 - self.total()).max(0.0)
    }
}

/// The Pauli channel equal to independent X and Z flips.
pub fn depolarizing_from_independent(px: f64, pz: f64) -> PauliNoise {
    PauliNoise {
        ptx: px * (1.0 - pz),
        pty: px * pz,
        ptz: pz * (1.0 - px),
    }
}

/// `p^weight (1−p)^(n−weight)` evaluated in log space, with `0^0 = 1`.
pub fn error_weight_prob(weight: usize, n: usize, p: f64) -> f64 {
    assert!(weight <= n, "weight {weight} exceeds n = {n}");
    (log_pow(p, weight) + log_pow(1.0 - p, n - weight)).exp()
}

fn log_pow(base: f64, exp: usize) -> f64 {
    if exp == 0 {
        0.0
    } else {
        exp as f64 * base.ln()
    }
}

/// One of the four label components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    A,
    B,
    Kx,
    Kz,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::A, Field::B, Field::Kx, Field::Kz];

    pub fn name(self) -> &'static str {
        match self {
            Field::A => "a",
            Field::B => "b",
            Field::Kx => "kx",
            Field::Kz => "kz",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// A subset of `{a, b, kx, kz}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct FieldSet(u8);

impl FieldSet {
    pub const EMPTY: FieldSet = FieldSet(0);
    pub const ALL: FieldSet = FieldSet(0b1111);
    /// Fields of an X-error distribution: `(b, kz)`.
    pub const X_SIDE: FieldSet = FieldSet(0b1010);
    /// Fields of a Z-error distribution: `(a, kx)`.
    pub const Z_SIDE: FieldSet = FieldSet(0b0101);

    pub fn of(fields: &[Field]) -> Self {
        FieldSet(fields.iter().fold(0, |acc, f| acc | f.bit()))
    }

    pub fn contains(self, f: Field) -> bool {
        self.0 & f.bit() != 0
    }

    pub fn is_subset(self, other: FieldSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Field> {
        Field::ALL.into_iter().filter(move |&f| self.contains(f))
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(Field::name).collect()
    }

    pub fn parse_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut set = FieldSet::EMPTY;
        for name in names {
            let f = Field::ALL
                .into_iter()
                .find(|f| f.name() == name.as_ref())
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("unknown field {:?}", name.as_ref()))
                })?;
            set.0 |= f.bit();
        }
        Ok(set)
    }
}

impl fmt::Display for FieldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names().join(","))
    }
}

/// Label widths of a code: `a` has `rank_x` bits, `b` has `rank_z`, the
/// logical fields `k` each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldWidths {
    pub a: usize,
    pub b: usize,
    pub kx: usize,
    pub kz: usize,
}

impl FieldWidths {
    pub fn of_code(code: &CssCode) -> Self {
        Self {
            a: code.rank_x(),
            b: code.rank_z(),
            kx: code.k(),
            kz: code.k(),
        }
    }

    pub fn get(&self, f: Field) -> usize {
        match f {
            Field::A => self.a,
            Field::B => self.b,
            Field::Kx => self.kx,
            Field::Kz => self.kz,
        }
    }
}

/// Noise parameters recorded alongside a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
pub enum NoiseRecord {
    BitFlip { px: f64 },
    PhaseFlip { pz: f64 },
    Pauli { ptx: f64, pty: f64, ptz: f64 },
}

/// Probability table over sector labels restricted to a set of fields.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorDistribution {
    fields: FieldSet,
    widths: FieldWidths,
    probs: Vec<f64>,
    code_hash: String,
    noise: NoiseRecord,
}

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

impl SectorDistribution {
    fn from_parts(
        fields: FieldSet,
        widths: FieldWidths,
        probs: Vec<f64>,
        code_hash: String,
        noise: NoiseRecord,
    ) -> Self {
        Self {
            fields,
            widths,
            probs,
            code_hash,
            noise,
        }
    }

    pub fn fields(&self) -> FieldSet {
        self.fields
    }

    /// Widths of all four fields for the originating code, present or not.
    pub fn code_widths(&self) -> FieldWidths {
        self.widths
    }

    /// Width of `f` in this table (zero when absent).
    pub fn width(&self, f: Field) -> usize {
        if self.fields.contains(f) {
            self.widths.get(f)
        } else {
            0
        }
    }

    /// Bit offset of `f` in a packed index.
    pub fn offset(&self, f: Field) -> usize {
        Field::ALL
            .into_iter()
            .take_while(|&g| g != f)
            .map(|g| self.width(g))
            .sum()
    }

    /// Total packed width.
    pub fn bits(&self) -> usize {
        Field::ALL.into_iter().map(|f| self.width(f)).sum()
    }

    pub fn syndrome_bits(&self) -> usize {
        self.width(Field::A) + self.width(Field::B)
    }

    pub fn logical_bits(&self) -> usize {
        self.width(Field::Kx) + self.width(Field::Kz)
    }

    /// Dense table indexed by packed label.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn code_hash(&self) -> &str {
        &self.code_hash
    }

    pub fn noise(&self) -> NoiseRecord {
        self.noise
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Value of field `f` in a packed index.
    pub fn field_value(&self, index: usize, f: Field) -> u64 {
        let w = self.width(f);
        if w == 0 {
            return 0;
        }
        ((index >> self.offset(f)) as u64) & ((1u64 << w) - 1)
    }

    /// Packed index of a full sector label; absent fields are ignored.
    pub fn index_of(&self, key: &SectorKey) -> Result<usize> {
        let mut index = 0usize;
        for f in self.fields.iter() {
            let v = match f {
                Field::A => &key.a,
                Field::B => &key.b,
                Field::Kx => &key.kx,
                Field::Kz => &key.kz,
            };
            if v.len() != self.widths.get(f) {
                return Err(Error::DimensionMismatch {
                    context: "sector label field",
                    expected: self.widths.get(f),
                    found: v.len(),
                });
            }
            index |= (v.to_u64() as usize) << self.offset(f);
        }
        Ok(index)
    }

    pub fn get(&self, key: &SectorKey) -> Result<f64> {
        Ok(self.probs[self.index_of(key)?])
    }

    /// Sums out every field not in `keep`.
    pub fn marginalize(&self, keep: FieldSet) -> Result<SectorDistribution> {
        if !keep.is_subset(self.fields) {
            return Err(Error::ModeMismatch {
                expected: format!("a subset of {}", self.fields),
                found: keep.to_string(),
            });
        }
        let mut out = SectorDistribution::from_parts(
            keep,
            self.widths,
            Vec::new(),
            self.code_hash.clone(),
            self.noise,
        );
        out.probs = vec![0.0; 1 << out.bits()];
        let moves: Vec<(usize, u64, usize)> = keep
            .iter()
            .map(|f| (self.offset(f), (1u64 << self.width(f)) - 1, out.offset(f)))
            .collect();
        for (index, &p) in self.probs.iter().enumerate() {
            let mut target = 0usize;
            for &(from, mask, to) in &moves {
                target |= ((((index >> from) as u64) & mask) as usize) << to;
            }
            out.probs[target] += p;
        }
        Ok(out)
    }

    /// Serializes nonzero entries under zero-padded lowercase hex keys.
    pub fn to_json(&self) -> Result<String> {
        let digits = self.bits().div_ceil(4).max(1);
        let probabilities: BTreeMap<String, f64> = self
            .probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(|(i, &p)| (format!("{i:0digits$x}"), p))
            .collect();
        let doc = DistributionJson {
            code_hash: self.code_hash.clone(),
            noise: self.noise,
            fields: self.fields.names().into_iter().map(String::from).collect(),
            widths: self.widths,
            probabilities,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<SectorDistribution> {
        let doc: DistributionJson = serde_json::from_str(text)?;
        let fields = FieldSet::parse_names(&doc.fields)?;
        let mut dist = SectorDistribution::from_parts(
            fields,
            doc.widths,
            Vec::new(),
            doc.code_hash,
            doc.noise,
        );
        let bits = dist.bits();
        if bits > 2 * FACTORIZED_QUBIT_LIMIT {
            return Err(Error::TooLarge {
                what: "packed label width",
                limit: 2 * FACTORIZED_QUBIT_LIMIT,
                actual: bits,
            });
        }
        dist.probs = vec![0.0; 1 << bits];
        for (key, p) in doc.probabilities {
            let index = usize::from_str_radix(&key, 16)
                .map_err(|_| Error::InvalidParameter(format!("sector key {key:?} is not hex")))?;
            if index >= dist.probs.len() {
                return Err(Error::InvalidParameter(format!(
                    "sector key {key:?} exceeds {bits} bits"
                )));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "probability {p} at {key:?} is not a probability"
                )));
            }
            dist.probs[index] = p;
        }
        let total = dist.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(dist)
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    code_hash: String,
    noise: NoiseRecord,
    fields: Vec<String>,
    widths: FieldWidths,
    probabilities: BTreeMap<String, f64>,
}

/// Packs column `l` of each matrix into one word, matrices laid out one
/// after another from the low bits.
fn column_keys(n: usize, blocks: &[&BitMatrix]) -> Vec<u64> {
    let mut keys = vec![0u64; n];
    let mut shift = 0;
    for m in blocks {
        for (i, row) in m.rows().iter().enumerate() {
            for l in row.iter_ones() {
                keys[l] |= 1u64 << (shift + i);
            }
        }
        shift += m.nrows();
    }
    keys
}

/// Key and weight of the Gray-code word `i ^ (i >> 1)`.
fn gray_state(i: u64, keys: &[u64]) -> (u64, usize) {
    let g = i ^ (i >> 1);
    let mut key = 0;
    for (l, &k) in keys.iter().enumerate() {
        if g >> l & 1 == 1 {
            key ^= k;
        }
    }
    (key, g.count_ones() as usize)
}

/// Which error type a single-side enumeration ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Bit flips, labelled by `(b, kz)`.
    X,
    /// Phase flips, labelled by `(a, kx)`.
    Z,
}

impl Side {
    pub fn fields(self) -> FieldSet {
        match self {
            Side::X => FieldSet::X_SIDE,
            Side::Z => FieldSet::Z_SIDE,
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Side::X),
            "z" | "Z" => Ok(Side::Z),
            _ => Err(Error::InvalidParameter(format!(
                "side must be x or z, got {s:?}"
            ))),
        }
    }
}

enum Tally {
    /// `counts[key * (n + 1) + w]` strings of weight `w` in sector `key`.
    Counts(Vec<u64>),
    /// Too many sectors for a count table; enumerate per probability.
    Direct,
}

/// Sector-resolved weight enumerator of one error type.
///
/// Building it walks all `2^n` strings once; afterwards the distribution at
/// any flip rate is a polynomial evaluation per sector. Counts are integers,
/// so the result does not depend on how the walk was split across threads.
pub struct WeightEnumerator {
    side: Side,
    n: usize,
    key_bits: usize,
    keys: Vec<u64>,
    widths: FieldWidths,
    code_hash: String,
    tally: Tally,
}

impl WeightEnumerator {
    pub fn new(code: &CssCode, side: Side) -> Result<Self> {
        let n = code.n();
        if n > FACTORIZED_QUBIT_LIMIT {
            return Err(Error::TooLarge {
                what: "qubits for single-side enumeration",
                limit: FACTORIZED_QUBIT_LIMIT,
                actual: n,
            });
        }
        let keys = match side {
            Side::X => column_keys(n, &[code.hz_reduced(), code.logical_z()]),
            Side::Z => column_keys(n, &[code.hx_reduced(), code.logical_x()]),
        };
        let key_bits = match side {
            Side::X => code.rank_z() + code.k(),
            Side::Z => code.rank_x() + code.k(),
        };
        let table_len = (1usize << key_bits) * (n + 1);
        let tally = if table_len <= COUNT_TABLE_LIMIT {
            Tally::Counts(count_table(n, &keys, key_bits))
        } else {
            Tally::Direct
        };
        Ok(Self {
            side,
            n,
            key_bits,
            keys,
            widths: FieldWidths::of_code(code),
            code_hash: code.code_hash(),
            tally,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Number of strings of each weight in the sector with packed label `key`.
    pub fn counts(&self, key: usize) -> Option<&[u64]> {
        match &self.tally {
            Tally::Counts(c) => Some(&c[key * (self.n + 1)..(key + 1) * (self.n + 1)]),
            Tally::Direct => None,
        }
    }

    /// Sector distribution at flip rate `p`.
    pub fn distribution(&self, p: f64) -> Result<SectorDistribution> {
        check_probability(p, "flip rate")?;
        let n = self.n;
        let weight_probs: Vec<f64> = (0..=n).map(|w| error_weight_prob(w, n, p)).collect();
        let probs = match &self.tally {
            Tally::Counts(counts) => counts
                .par_chunks(n + 1)
                .map(|row| {
                    row.iter()
                        .zip(&weight_probs)
                        .map(|(&c, &wp)| c as f64 * wp)
                        .sum()
                })
                .collect(),
            Tally::Direct => {
                let mut probs = vec![0.0; 1 << self.key_bits];
                let (mut key, mut weight) = (0u64, 0usize);
                probs[0] += weight_probs[0];
                for i in 1..(1u64 << n) {
                    let l = i.trailing_zeros() as usize;
                    key ^= self.keys[l];
                    let g = i ^ (i >> 1);
                    if g >> l & 1 == 1 {
                        weight += 1;
                    } else {
                        weight -= 1;
                    }
                    probs[key as usize] += weight_probs[weight];
                }
                probs
            }
        };
        let noise = match self.side {
            Side::X => NoiseRecord::BitFlip { px: p },
            Side::Z => NoiseRecord::PhaseFlip { pz: p },
        };
        Ok(SectorDistribution::from_parts(
            self.side.fields(),
            self.widths,
            probs,
            self.code_hash.clone(),
            noise,
        ))
    }
}

fn count_table(n: usize, keys: &[u64], key_bits: usize) -> Vec<u64> {
    let stride = n + 1;
    let len = (1usize << key_bits) * stride;
    let total = 1u64 << n;
    // keep the per-chunk tables within a fixed memory budget
    let chunks = (COUNT_TABLE_LIMIT * 4 / len)
        .clamp(1, 64)
        .min(total as usize) as u64;
    let per = total.div_ceil(chunks);
    let partials: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * per;
            let end = ((c + 1) * per).min(total);
            let mut table = vec![0u64; len];
            if start >= end {
                return table;
            }
            let (mut key, mut weight) = gray_state(start, keys);
            table[key as usize * stride + weight] += 1;
            for i in start + 1..end {
                let l = i.trailing_zeros() as usize;
                key ^= keys[l];
                let g = i ^ (i >> 1);
                if g >> l & 1 == 1 {
                    weight += 1;
                } else {
                    weight -= 1;
                }
                table[key as usize * stride + weight] += 1;
            }
            table
        })
        .collect();
    let mut counts = vec![0u64; len];
    for t in partials {
        for (acc, c) in counts.iter_mut().zip(t) {
            *acc += c;
        }
    }
    counts
}

/// `P(b, kz)` under independent bit flips at rate `px`.
pub fn sector_distribution_x(code: &CssCode, px: f64) -> Result<SectorDistribution> {
    WeightEnumerator::new(code, Side::X)?.distribution(px)
}

/// `P(a, kx)` under independent phase flips at rate `pz`.
pub fn sector_distribution_z(code: &CssCode, pz: f64) -> Result<SectorDistribution> {
    WeightEnumerator::new(code, Side::Z)?.distribution(pz)
}

/// `P(a, b, kx, kz)` under a general single-qubit Pauli channel.
///
/// Enumerates every pair `(Ex, Ez)`. Z errors are grouped by their
/// `(a, kx)` label and each group fills its own slice of the table in
/// ascending order of `Ez`, so the floating-point result is independent of
/// the thread count.
pub fn sector_distribution_joint(code: &CssCode, noise: &PauliNoise) -> Result<SectorDistribution> {
    let n = code.n();
    if n > JOINT_QUBIT_LIMIT {
        return Err(Error::TooLarge {
            what: "qubits for joint enumeration",
            limit: JOINT_QUBIT_LIMIT,
            actual: n,
        });
    }
    let noise = PauliNoise::new(noise.ptx, noise.pty, noise.ptz)?;
    let (k, wa, wb) = (code.k(), code.rank_x(), code.rank_z());
    let x_keys = column_keys(n, &[code.hz_reduced(), code.logical_z()]);
    let z_keys = column_keys(n, &[code.hx_reduced(), code.logical_x()]);
    let x_bits = wb + k;
    let z_bits = wa + k;

    // weight_prob[(nx * (n+1) + ny) * (n+1) + nz]
    let stride = n + 1;
    let (lx, ly, lz, li) = (
        noise.ptx.ln(),
        noise.pty.ln(),
        noise.ptz.ln(),
        noise.identity().ln(),
    );
    let term = |count: usize, ln_p: f64| if count == 0 { 0.0 } else { count as f64 * ln_p };
    let mut weight_prob = vec![0.0; stride * stride * stride];
    for nx in 0..=n {
        for ny in 0..=n - nx {
            for nz in 0..=n - nx - ny {
                let ln = term(nx, lx) + term(ny, ly) + term(nz, lz) + term(n - nx - ny - nz, li);
                weight_prob[(nx * stride + ny) * stride + nz] = ln.exp();
            }
        }
    }

    let mut groups: Vec<Vec<u64>> = vec![Vec::new(); 1 << z_bits];
    for ez in 0..(1u64 << n) {
        let key = (0..n)
            .filter(|&l| ez >> l & 1 == 1)
            .fold(0u64, |acc, l| acc ^ z_keys[l]);
        groups[key as usize].push(ez);
    }

    let rows: Vec<Vec<f64>> = groups
        .par_iter()
        .map(|ezs| {
            let mut row = vec![0.0; 1 << x_bits];
            for &ez in ezs {
                // Ex = 0: only Z errors
                let (mut nx, mut ny, mut nz) = (0usize, 0usize, ez.count_ones() as usize);
                let mut key = 0u64;
                row[0] += weight_prob[(nx * stride + ny) * stride + nz];
                for i in 1..(1u64 << n) {
                    let l = i.trailing_zeros() as usize;
                    key ^= x_keys[l];
                    let set = (i ^ (i >> 1)) >> l & 1 == 1;
                    match (ez >> l & 1 == 1, set) {
                        (true, true) => {
                            ny += 1;
                            nz -= 1;
                        }
                        (true, false) => {
                            ny -= 1;
                            nz += 1;
                        }
                        (false, true) => nx += 1,
                        (false, false) => nx -= 1,
                    }
                    row[key as usize] += weight_prob[(nx * stride + ny) * stride + nz];
                }
            }
            row
        })
        .collect();

    let widths = FieldWidths::of_code(code);
    let mut probs = vec![0.0; 1 << (x_bits + z_bits)];
    // internal labels: z side = a | kx << wa, x side = b | kz << wb
    // canonical: a | b << wa | kx << (wa + wb) | kz << (wa + wb + k)
    let low = |v: u64, w: usize| v & ((1u64 << w) - 1);
    for (zkey, row) in rows.iter().enumerate() {
        let zkey = zkey as u64;
        let z_part = low(zkey, wa) | (zkey >> wa) << (wa + wb);
        for (xkey, &p) in row.iter().enumerate() {
            let xkey = xkey as u64;
            let x_part = low(xkey, wb) << wa | (xkey >> wb) << (wa + wb + k);
            probs[(z_part | x_part) as usize] = p;
        }
    }
    Ok(SectorDistribution::from_parts(
        FieldSet::ALL,
        widths,
        probs,
        code.code_hash(),
        NoiseRecord::Pauli {
            ptx: noise.ptx,
            pty: noise.pty,
            ptz: noise.ptz,
        },
    ))
}
