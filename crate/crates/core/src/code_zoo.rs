//! Deterministic constructors for the example code families.
//!
//! Every constructor builds explicit check supports and hands them to
//! [`CssCode::new`], so the usual validation applies. Qubit layouts are
//! documented per family; the same layout numbers the terms of the derived
//! classical models.

use std::fmt;
use std::str::FromStr;

use crate::css_code::CssCode;
use crate::error::{Error, Result};
use crate::f2linalg::BitMatrix;

/// Family name plus side lengths, as written on the command line
/// (`toric2d:3`, `surface2d:3x4`, `steane`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub family: Family,
    pub dims: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Toric2d,
    Surface2d,
    Color666,
    Toric3d,
    Xcube,
    Steane,
    Four22,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Toric2d => "toric2d",
            Family::Surface2d => "surface2d",
            Family::Color666 => "color666",
            Family::Toric3d => "toric3d",
            Family::Xcube => "xcube",
            Family::Steane => "steane",
            Family::Four22 => "four22",
        }
    }

    fn arity(self) -> &'static [usize] {
        match self {
            Family::Toric2d | Family::Toric3d | Family::Xcube => &[1],
            Family::Surface2d | Family::Color666 => &[1, 2],
            Family::Steane | Family::Four22 => &[0],
        }
    }
}

impl FromStr for LatticeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, dims) = match s.split_once(':') {
            Some((name, dims)) => (name, Some(dims)),
            None => (s, None),
        };
        let family = match name {
            "toric2d" => Family::Toric2d,
            "surface2d" => Family::Surface2d,
            "color666" => Family::Color666,
            "toric3d" => Family::Toric3d,
            "xcube" => Family::Xcube,
            "steane" => Family::Steane,
            "four22" => Family::Four22,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown code family {other:?}"
                )))
            }
        };
        let dims = match dims {
            None => Vec::new(),
            Some(d) => d
                .split('x')
                .map(|part| {
                    part.parse::<usize>().map_err(|_| {
                        Error::InvalidParameter(format!("bad dimension {part:?} in {s:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        if !family.arity().contains(&dims.len()) {
            return Err(Error::InvalidParameter(format!(
                "{} takes {:?} dimensions, got {}",
                family.name(),
                family.arity(),
                dims.len()
            )));
        }
        Ok(Self { family, dims })
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        if !self.dims.is_empty() {
            let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
            write!(f, ":{}", dims.join("x"))?;
        }
        Ok(())
    }
}

impl LatticeSpec {
    /// Builds the code. A single dimension for a 2D open/colour family is
    /// used for both sides.
    pub fn build(&self) -> Result<CssCode> {
        let d = |i: usize| self.dims.get(i).or(self.dims.first()).copied().unwrap_or(0);
        match self.family {
            Family::Toric2d => toric2d(d(0)),
            Family::Surface2d => surface2d(d(0), d(1)),
            Family::Color666 => color666(d(0), d(1)),
            Family::Toric3d => toric3d(d(0)),
            Family::Xcube => xcube(d(0)),
            Family::Steane => Ok(steane()),
            Family::Four22 => Ok(four22()),
        }
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}

fn build(n: usize, z_checks: &[Vec<usize>], x_checks: &[Vec<usize>]) -> Result<CssCode> {
    CssCode::new(
        BitMatrix::from_supports(n, z_checks),
        BitMatrix::from_supports(n, x_checks),
    )
}

/// Periodic `L×L` toric code.
///
/// Qubit `2·(L·y + x) + o` is the edge leaving vertex `(x, y)` in direction
/// `o` (0 = +x, 1 = +y). X check `L·y + x` is the vertex star at `(x, y)`;
/// Z check `L·y + x` is the plaquette whose lower-left corner is `(x, y)`.
pub fn toric2d(l: usize) -> Result<CssCode> {
    require(l >= 2, "toric2d needs L >= 2")?;
    let edge = |x: usize, y: usize, o: usize| 2 * (l * (y % l) + (x % l)) + o;
    let mut stars = Vec::with_capacity(l * l);
    let mut plaquettes = Vec::with_capacity(l * l);
    for y in 0..l {
        for x in 0..l {
            stars.push(vec![
                edge(x, y, 0),
                edge(x + l - 1, y, 0),
                edge(x, y, 1),
                edge(x, y + l - 1, 1),
            ]);
            plaquettes.push(vec![
                edge(x, y, 0),
                edge(x, y + 1, 0),
                edge(x, y, 1),
                edge(x + 1, y, 1),
            ]);
        }
    }
    build(2 * l * l, &plaquettes, &stars)
}

/// Planar surface code with X distance `lx` and Z distance `ly`.
///
/// Vertices form an `lx × (ly−1)` grid with smooth left/right boundaries and
/// rough top/bottom boundaries (vertical edges protrude past the first and
/// last vertex rows). Horizontal edge `(x, y)`, `x < lx−1`, has index
/// `y·(lx−1) + x`; vertical edge `(x, j)`, `j ∈ 0..ly` counted from the
/// bottom, has index `(lx−1)(ly−1) + j·lx + x`. X checks are vertex stars
/// (row `y·lx + x`), Z checks the faces between vertex columns `x` and `x+1`
/// (row `j·(lx−1) + x`), with the rough-boundary faces carrying weight 3.
/// Logical X runs left-right along a row of vertical edges, logical Z
/// bottom-top along a column of them.
pub fn surface2d(lx: usize, ly: usize) -> Result<CssCode> {
    require(lx >= 2 && ly >= 2, "surface2d needs Lx, Ly >= 2")?;
    let rows = ly - 1;
    let h_count = (lx - 1) * rows;
    let h = |x: usize, y: usize| y * (lx - 1) + x;
    let v = |x: usize, j: usize| h_count + j * lx + x;
    let n = h_count + ly * lx;

    let mut stars = Vec::new();
    for y in 0..rows {
        for x in 0..lx {
            let mut s = vec![v(x, y), v(x, y + 1)];
            if x > 0 {
                s.push(h(x - 1, y));
            }
            if x + 1 < lx {
                s.push(h(x, y));
            }
            stars.push(s);
        }
    }
    let mut faces = Vec::new();
    for j in 0..ly {
        for x in 0..lx - 1 {
            let mut f = vec![v(x, j), v(x + 1, j)];
            if j > 0 {
                f.push(h(x, j - 1));
            }
            if j < rows {
                f.push(h(x, j));
            }
            faces.push(f);
        }
    }
    build(n, &faces, &stars)
}

/// Colour of the hexagon at cell `(i, j)` of a [`color666`] lattice.
pub fn color666_face_color(i: usize, j: usize) -> usize {
    (i + 2 * j) % 3
}

/// Periodic (6,6,6) colour code on an `lx × ly` honeycomb torus.
///
/// Hexagons sit on a triangular lattice at cells `(i, j)`, face index
/// `j·lx + i`, coloured by [`color666_face_color`]. Each cell carries two
/// qubits: `2·(j·lx + i)` touches faces `(i,j), (i+1,j), (i,j+1)` and
/// `2·(j·lx + i) + 1` touches `(i+1,j), (i,j+1), (i+1,j+1)`. Each face
/// supports an X and a Z check on its six qubits, so Hx = Hz. Both sides
/// must be multiples of 3 for the colouring to close around the torus.
pub fn color666(lx: usize, ly: usize) -> Result<CssCode> {
    require(
        lx >= 3 && ly >= 3 && lx.is_multiple_of(3) && ly.is_multiple_of(3),
        "color666 needs Lx, Ly to be positive multiples of 3",
    )?;
    let face = |i: usize, j: usize| (j % ly) * lx + (i % lx);
    let mut faces = vec![Vec::new(); lx * ly];
    for j in 0..ly {
        for i in 0..lx {
            let up = 2 * (j * lx + i);
            for f in [face(i, j), face(i + 1, j), face(i, j + 1)] {
                faces[f].push(up);
            }
            for f in [face(i + 1, j), face(i, j + 1), face(i + 1, j + 1)] {
                faces[f].push(up + 1);
            }
        }
    }
    build(2 * lx * ly, &faces, &faces)
}

fn site3(l: usize, x: usize, y: usize, z: usize) -> usize {
    (x % l) + l * ((y % l) + l * (z % l))
}

/// Unit offsets along the three axes.
const AXES: [[usize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// Periodic 3D toric code on an `L³` cubic lattice.
///
/// Qubit `3·s + μ` is the edge leaving site `s = x + L(y + L z)` along axis
/// `μ`. X check `s` is the six-edge vertex star; Z check `3·s + μ` is the
/// plaquette at `s` normal to `μ`.
pub fn toric3d(l: usize) -> Result<CssCode> {
    require(l >= 2, "toric3d needs L >= 2")?;
    let edge = |p: [usize; 3], mu: usize| 3 * site3(l, p[0], p[1], p[2]) + mu;
    let shift = |p: [usize; 3], mu: usize, by: usize| {
        let mut q = p;
        q[mu] += by;
        q
    };
    let mut stars = Vec::new();
    let mut plaquettes = Vec::new();
    for z in 0..l {
        for y in 0..l {
            for x in 0..l {
                let p = [x, y, z];
                stars.push(
                    (0..3)
                        .flat_map(|mu| [edge(p, mu), edge(shift(p, mu, l - 1), mu)])
                        .collect(),
                );
                for mu in 0..3 {
                    let (nu, la) = ((mu + 1) % 3, (mu + 2) % 3);
                    plaquettes.push(vec![
                        edge(p, nu),
                        edge(shift(p, nu, 1), la),
                        edge(shift(p, la, 1), nu),
                        edge(p, la),
                    ]);
                }
            }
        }
    }
    debug_assert_eq!(AXES.len(), 3);
    build(3 * l * l * l, &plaquettes, &stars)
}

/// X-cube model on a periodic `L³` lattice.
///
/// Edges are numbered as in [`toric3d`]. X check `s` is the 12-edge cube
/// whose lowest corner is site `s`. Z checks are vertex crosses: row
/// `2·s + t` for `t ∈ {0, 1}` is the four-edge cross at `s` lying in the
/// plane normal to axis `t` (x or y). The z-normal cross is their product
/// and is not emitted.
pub fn xcube(l: usize) -> Result<CssCode> {
    require(l >= 2, "xcube needs L >= 2")?;
    let edge = |p: [usize; 3], mu: usize| 3 * site3(l, p[0], p[1], p[2]) + mu;
    let mut cubes = Vec::new();
    let mut crosses = Vec::new();
    for z in 0..l {
        for y in 0..l {
            for x in 0..l {
                let p = [x, y, z];
                let mut cube = Vec::with_capacity(12);
                for mu in 0..3 {
                    let (nu, la) = ((mu + 1) % 3, (mu + 2) % 3);
                    for a in 0..2 {
                        for b in 0..2 {
                            let mut q = p;
                            q[nu] += a;
                            q[la] += b;
                            cube.push(edge(q, mu));
                        }
                    }
                }
                cubes.push(cube);
                for normal in 0..2 {
                    let mut cross = Vec::with_capacity(4);
                    for mu in (0..3).filter(|&m| m != normal) {
                        let mut back = p;
                        back[mu] += l - 1;
                        cross.push(edge(p, mu));
                        cross.push(edge(back, mu));
                    }
                    crosses.push(cross);
                }
            }
        }
    }
    build(3 * l * l * l, &crosses, &cubes)
}

fn hamming_supports() -> Vec<Vec<usize>> {
    vec![vec![0, 2, 4, 6], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]
}

/// Steane [[7,1,3]] code: both check matrices are the Hamming(7,4) check.
pub fn steane() -> CssCode {
    let h = hamming_supports();
    build(7, &h, &h).expect("Steane code is valid")
}

/// The [[4,2,2]] code with a single weight-4 check of each type.
pub fn four22() -> CssCode {
    let h = vec![vec![0, 1, 2, 3]];
    build(4, &h, &h).expect("[[4,2,2]] code is valid")
}
