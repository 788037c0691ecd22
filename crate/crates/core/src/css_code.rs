//! CSS codes: validation, logical operators, distances and sector labels.
//!
//! A code is a pair of parity-check matrices `(Hz, Hx)` over the same `n`
//! qubits with `Hx · Hzᵀ = 0`. Rows of `Hz` are Z-type stabilizers, rows of
//! `Hx` are X-type stabilizers. Neither matrix needs full row rank; the
//! redundancy `m' - rank` is the symmetry dimension of the associated
//! classical model.

use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::f2linalg::{BitMatrix, BitVector};

/// Largest kernel dimension the exhaustive distance search accepts.
pub const DISTANCE_ENUMERATION_LIMIT: usize = 24;

/// Binary symplectic representation of a Pauli operator, phases dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticOp {
    pub z_part: BitVector,
    pub x_part: BitVector,
}

impl SymplecticOp {
    pub fn z_type(support: BitVector) -> Self {
        let n = support.len();
        Self {
            z_part: support,
            x_part: BitVector::zeros(n),
        }
    }

    pub fn x_type(support: BitVector) -> Self {
        let n = support.len();
        Self {
            z_part: BitVector::zeros(n),
            x_part: support,
        }
    }

    pub fn is_z_type(&self) -> bool {
        self.x_part.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z_part.is_zero()
    }

    /// Symplectic form: true iff the two operators anticommute.
    pub fn anticommutes(&self, other: &SymplecticOp) -> bool {
        self.z_part.parity_with(&other.x_part) ^ self.x_part.parity_with(&other.z_part)
    }

    /// Operator product up to phase.
    pub fn mul_assign(&mut self, other: &SymplecticOp) {
        self.z_part.xor_assign(&other.z_part);
        self.x_part.xor_assign(&other.x_part);
    }
}

/// Symplectic Gram-Schmidt orthogonalization.
///
/// Repeatedly takes the first pending operator `g1`. If it commutes with all
/// other pending operators it is set aside as commuting. Otherwise the first
/// anticommuting operator becomes its partner `g2`, and every remaining
/// operator `g` is replaced by `g · g1^f(g,g2) · g2^f(g,g1)`, which makes it
/// commute with both.
pub fn sgsop(ops: &[SymplecticOp]) -> (Vec<(SymplecticOp, SymplecticOp)>, Vec<SymplecticOp>) {
    let mut pending: Vec<SymplecticOp> = ops.to_vec();
    let mut pairs = Vec::new();
    let mut commuting = Vec::new();
    while !pending.is_empty() {
        let g1 = pending.remove(0);
        match pending.iter().position(|g| g1.anticommutes(g)) {
            None => commuting.push(g1),
            Some(j) => {
                let g2 = pending.remove(j);
                for g in &mut pending {
                    let with_g2 = g.anticommutes(&g2);
                    let with_g1 = g.anticommutes(&g1);
                    if with_g2 {
                        g.mul_assign(&g1);
                    }
                    if with_g1 {
                        g.mul_assign(&g2);
                    }
                }
                pairs.push((g1, g2));
            }
        }
    }
    (pairs, commuting)
}

fn check_commutation(hz: &BitMatrix, hx: &BitMatrix) -> Result<()> {
    if hz.ncols() != hx.ncols() {
        return Err(Error::DimensionMismatch {
            context: "Hx column count",
            expected: hz.ncols(),
            found: hx.ncols(),
        });
    }
    for (row_x, x) in hx.rows().iter().enumerate() {
        for (row_z, z) in hz.rows().iter().enumerate() {
            if x.parity_with(z) {
                return Err(Error::CommutationViolation { row_x, row_z });
            }
        }
    }
    Ok(())
}

/// Logical operators of the code `(Hz, Hx)` as `(logical_x, logical_z)`.
///
/// The normalizer is generated by Z-type operators on `ker Hx` followed by
/// X-type operators on `ker Hz`, both from [`BitMatrix::kernel_basis`].
/// Running [`sgsop`] on that list yields `k` anticommuting pairs; the Z-type
/// member of pair `i` is `logical_z[i]` and the X-type member `logical_x[i]`,
/// so `logical_z[i] · logical_x[j] = δ_ij`.
pub fn logical_operators(hz: &BitMatrix, hx: &BitMatrix) -> Result<(BitMatrix, BitMatrix)> {
    check_commutation(hz, hx)?;
    let n = hz.ncols();
    let ops: Vec<SymplecticOp> = hx
        .kernel_basis()
        .into_rows()
        .into_iter()
        .map(SymplecticOp::z_type)
        .chain(
            hz.kernel_basis()
                .into_rows()
                .into_iter()
                .map(SymplecticOp::x_type),
        )
        .collect();
    let (pairs, _) = sgsop(&ops);
    let mut logical_x = BitMatrix::empty(n);
    let mut logical_z = BitMatrix::empty(n);
    for (g1, g2) in pairs {
        let (z_op, x_op) = if g1.is_z_type() { (g1, g2) } else { (g2, g1) };
        debug_assert!(z_op.is_z_type() && x_op.is_x_type());
        logical_z.push_row(z_op.z_part)?;
        logical_x.push_row(x_op.x_part)?;
    }
    Ok((logical_x, logical_z))
}

/// Syndrome and logical labels of an error pair.
///
/// `a` is the X-check syndrome of the Z error and `kx` its logical-X parity;
/// `b` is the Z-check syndrome of the X error and `kz` its logical-Z parity.
/// Syndromes are expressed on the independent check rows only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorKey {
    pub a: BitVector,
    pub b: BitVector,
    pub kx: BitVector,
    pub kz: BitVector,
}

impl SectorKey {
    pub fn xor(&self, other: &SectorKey) -> SectorKey {
        SectorKey {
            a: self.a.xor(&other.a),
            b: self.b.xor(&other.b),
            kx: self.kx.xor(&other.kx),
            kz: self.kz.xor(&other.kz),
        }
    }
}

/// X and Z code distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeDistance {
    /// Minimum weight of a nontrivial X-type logical.
    pub dx: usize,
    /// Minimum weight of a nontrivial Z-type logical.
    pub dz: usize,
}

impl CodeDistance {
    pub fn min(&self) -> usize {
        self.dx.min(self.dz)
    }
}

/// A validated CSS code with derived ranks and a fixed logical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    n: usize,
    hz: BitMatrix,
    hx: BitMatrix,
    hz_independent: Vec<usize>,
    hx_independent: Vec<usize>,
    hz_reduced: BitMatrix,
    hx_reduced: BitMatrix,
    logical_x: BitMatrix,
    logical_z: BitMatrix,
}

impl CssCode {
    /// Validates `(Hz, Hx)` and extracts logical operators.
    ///
    /// A code with `k = 0` is accepted.
    pub fn new(hz: BitMatrix, hx: BitMatrix) -> Result<Self> {
        let n = hz.ncols();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "a code needs at least one qubit".into(),
            ));
        }
        let (logical_x, logical_z) = logical_operators(&hz, &hx)?;
        let hz_independent = hz.independent_row_indices();
        let hx_independent = hx.independent_row_indices();
        let hz_reduced = hz.select_rows(&hz_independent);
        let hx_reduced = hx.select_rows(&hx_independent);
        let code = Self {
            n,
            hz,
            hx,
            hz_independent,
            hx_independent,
            hz_reduced,
            hx_reduced,
            logical_x,
            logical_z,
        };
        debug_assert_eq!(code.logical_x.nrows(), code.k());
        Ok(code)
    }

    /// Same stabilizers with a caller-supplied logical basis.
    ///
    /// Rejects bases whose rows are not in the right kernels or whose
    /// pairing `logical_z · logical_xᵀ` is not the identity.
    pub fn with_logicals(&self, logical_x: BitMatrix, logical_z: BitMatrix) -> Result<Self> {
        let k = self.k();
        for (m, what) in [(&logical_x, "logical_x"), (&logical_z, "logical_z")] {
            if m.nrows() != k || m.ncols() != self.n {
                return Err(Error::InvalidParameter(format!(
                    "{what} must be {k}x{}, got {}x{}",
                    self.n,
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if !self.hz.mul(&logical_x.transpose())?.is_zero() {
            return Err(Error::InvalidParameter(
                "logical_x rows must lie in ker Hz".into(),
            ));
        }
        if !self.hx.mul(&logical_z.transpose())?.is_zero() {
            return Err(Error::InvalidParameter(
                "logical_z rows must lie in ker Hx".into(),
            ));
        }
        if logical_z.mul(&logical_x.transpose())? != BitMatrix::identity(k) {
            return Err(Error::InvalidParameter(
                "logical pairing matrix must be the identity".into(),
            ));
        }
        Ok(Self {
            logical_x,
            logical_z,
            ..self.clone()
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn rank_z(&self) -> usize {
        self.hz_independent.len()
    }

    pub fn rank_x(&self) -> usize {
        self.hx_independent.len()
    }

    pub fn k(&self) -> usize {
        self.n - self.rank_x() - self.rank_z()
    }

    /// `dim ker(Hxᵀ)`: redundant X checks.
    pub fn symmetry_dim_x(&self) -> usize {
        self.hx.nrows() - self.rank_x()
    }

    /// `dim ker(Hzᵀ)`: redundant Z checks.
    pub fn symmetry_dim_z(&self) -> usize {
        self.hz.nrows() - self.rank_z()
    }

    pub fn logical_x(&self) -> &BitMatrix {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &BitMatrix {
        &self.logical_z
    }

    /// Rows of `Hz` used as the independent Z-check basis for syndromes.
    pub fn hz_independent_rows(&self) -> &[usize] {
        &self.hz_independent
    }

    pub fn hx_independent_rows(&self) -> &[usize] {
        &self.hx_independent
    }

    pub(crate) fn hz_reduced(&self) -> &BitMatrix {
        &self.hz_reduced
    }

    pub(crate) fn hx_reduced(&self) -> &BitMatrix {
        &self.hx_reduced
    }

    /// Sector label of the error `X^{ex} Z^{ez}`.
    ///
    /// Panics if either error has length other than `n`.
    pub fn sector_of(&self, ex: &BitVector, ez: &BitVector) -> SectorKey {
        assert_eq!(ex.len(), self.n, "X error length");
        assert_eq!(ez.len(), self.n, "Z error length");
        SectorKey {
            a: self.hx_reduced.matvec_unchecked(ez),
            b: self.hz_reduced.matvec_unchecked(ex),
            kx: self.logical_x.matvec_unchecked(ez),
            kz: self.logical_z.matvec_unchecked(ex),
        }
    }

    /// An X error with Z syndrome `b` and logical-Z parity `kz`.
    ///
    /// Solves `Hz E = b` on the independent rows (free variables zero), then
    /// adds `logical_x[i]` wherever the logical parity must change.
    pub fn x_error_representative(&self, b: &BitVector, kz: &BitVector) -> Result<BitVector> {
        Self::representative(&self.hz_reduced, &self.logical_z, &self.logical_x, b, kz)
    }

    /// A Z error with X syndrome `a` and logical-X parity `kx`.
    pub fn z_error_representative(&self, a: &BitVector, kx: &BitVector) -> Result<BitVector> {
        Self::representative(&self.hx_reduced, &self.logical_x, &self.logical_z, a, kx)
    }

    fn representative(
        checks: &BitMatrix,
        detectors: &BitMatrix,
        shifts: &BitMatrix,
        syndrome: &BitVector,
        logical: &BitVector,
    ) -> Result<BitVector> {
        if logical.len() != detectors.nrows() {
            return Err(Error::DimensionMismatch {
                context: "logical label length",
                expected: detectors.nrows(),
                found: logical.len(),
            });
        }
        let mut e = checks
            .solve(syndrome)?
            .expect("independent check rows have full row rank");
        let current = detectors.matvec_unchecked(&e);
        for i in 0..detectors.nrows() {
            if current.get(i) != logical.get(i) {
                e.xor_assign(shifts.row(i));
            }
        }
        Ok(e)
    }

    /// Exhaustive coset search for the X and Z distances.
    ///
    /// `dz` is the minimum weight over `ker Hx` outside the row space of
    /// `Hz`; a kernel vector is outside exactly when it anticommutes with
    /// some logical X. `dx` is the mirror image.
    pub fn distance(&self) -> Result<CodeDistance> {
        if self.k() == 0 {
            return Err(Error::NoLogicalQubits);
        }
        let dz = min_logical_weight(&self.hx.kernel_basis(), &self.logical_x)?;
        let dx = min_logical_weight(&self.hz.kernel_basis(), &self.logical_z)?;
        Ok(CodeDistance { dx, dz })
    }

    /// Serializes to the `css-code v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "css-code v1");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "Hz {}", self.hz.nrows());
        out.push_str(&self.hz.to_string());
        let _ = writeln!(out, "Hx {}", self.hx.nrows());
        out.push_str(&self.hx.to_string());
        out
    }

    /// Parses the `css-code v1` text format and validates the result.
    pub fn from_text(text: &str) -> Result<Self> {
        let (hz, hx) = parse_code_text(text)?;
        Self::new(hz, hx)
    }

    /// Hex SHA-256 of the canonical text form, truncated to 16 digits.
    pub fn code_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl FromStr for CssCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

fn min_logical_weight(kernel: &BitMatrix, detectors: &BitMatrix) -> Result<usize> {
    let dim = kernel.nrows();
    if dim > DISTANCE_ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "kernel dimension for distance search",
            limit: DISTANCE_ENUMERATION_LIMIT,
            actual: dim,
        });
    }
    let masks: Vec<u64> = kernel
        .rows()
        .iter()
        .map(|r| {
            detectors
                .rows()
                .iter()
                .enumerate()
                .filter(|(_, d)| d.parity_with(r))
                .fold(0u64, |m, (i, _)| m | (1u64 << i))
        })
        .collect();
    let mut v = BitVector::zeros(kernel.ncols());
    let mut mask = 0u64;
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << dim) {
        let j = i.trailing_zeros() as usize;
        v.xor_assign(kernel.row(j));
        mask ^= masks[j];
        if mask != 0 {
            best = best.min(v.weight());
        }
    }
    Ok(best)
}

fn parse_code_text(text: &str) -> Result<(BitMatrix, BitMatrix)> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    let mut cursor = 0usize;
    let err = |line: usize, message: String| Error::Parse { line, message };
    let next = |cursor: &mut usize| -> Result<(usize, &str)> {
        let i = *cursor;
        *cursor += 1;
        lines
            .get(i)
            .map(|l| (i + 1, *l))
            .ok_or_else(|| err(i + 1, "unexpected end of file".into()))
    };

    let (ln, header) = next(&mut cursor)?;
    if header != "css-code v1" {
        return Err(err(
            ln,
            format!("expected header `css-code v1`, found {header:?}"),
        ));
    }
    let (ln, n_line) = next(&mut cursor)?;
    let n = parse_count(ln, n_line, "n")?;
    let read_block = |cursor: &mut usize, tag: &str| -> Result<BitMatrix> {
        let (ln, line) = next(cursor)?;
        let rows = parse_count(ln, line, tag)?;
        let mut m = BitMatrix::empty(n);
        for _ in 0..rows {
            let (ln, line) = next(cursor)?;
            if line.len() != n {
                return Err(err(
                    ln,
                    format!("row has length {}, expected {n}", line.len()),
                ));
            }
            let row = line.parse::<BitVector>().map_err(|_| {
                err(
                    ln,
                    format!("row {line:?} contains characters other than 0/1"),
                )
            })?;
            m.push_row(row)?;
        }
        Ok(m)
    };
    let hz = read_block(&mut cursor, "Hz")?;
    let hx = read_block(&mut cursor, "Hx")?;
    if cursor < lines.len() {
        return Err(err(cursor + 1, "trailing content after Hx block".into()));
    }
    Ok((hz, hx))
}

fn parse_count(line_no: usize, line: &str, tag: &str) -> Result<usize> {
    let rest = line
        .strip_prefix(tag)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `{tag} <int>`, found {line:?}"),
        })?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected a non-negative integer after `{tag}`, found {rest:?}"),
        });
    }
    rest.parse().map_err(|_| Error::Parse {
        line: line_no,
        message: format!("integer {rest:?} out of range"),
    })
}
