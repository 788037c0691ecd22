use std::fmt;
use std::path::Path;
use std::str::FromStr;

use css_coherence::channels::{IndependentNoise, PauliNoise};
use css_coherence::code_zoo::LatticeSpec;
use css_coherence::{BitVector, CssCode};

use crate::{CliError, CliResult, GridArgs};

/// Builds a zoo code from `family:dims`, or reads a code file when the
/// selector names an existing path.
pub fn resolve_code(selector: &str) -> CliResult<CssCode> {
    let path = Path::new(selector);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: selector.to_string(),
            source,
        })?;
        return CssCode::from_text(&text).map_err(|e| CliError::Input(format!("{selector}: {e}")));
    }
    let spec = LatticeSpec::from_str(selector)
        .map_err(|e| CliError::Input(format!("{e} (and no file named {selector:?})")))?;
    Ok(spec.build()?)
}

pub fn parse_f64(name: &str, s: &str) -> CliResult<f64> {
    s.parse::<f64>()
        .map_err(|_| CliError::Input(format!("{name}: cannot parse {s:?} as a number")))
}

pub fn parse_probability(name: &str, s: &str) -> CliResult<f64> {
    let p = parse_f64(name, s)?;
    check_probability(name, p)?;
    Ok(p)
}

fn check_probability(name: &str, p: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CliError::Input(format!("{name} = {p} is outside [0, 1]")))
    }
}

/// Evenly spaced points from start to stop inclusive, or the explicit list.
pub fn grid(args: &GridArgs) -> CliResult<Vec<f64>> {
    let points = match &args.p_list {
        Some(list) => list.clone(),
        None => {
            if args.points == 0 {
                return Err(CliError::Input("--points must be at least 1".into()));
            }
            if args.points == 1 {
                vec![args.p_start]
            } else {
                let step = (args.p_stop - args.p_start) / (args.points - 1) as f64;
                (0..args.points)
                    .map(|i| {
                        if i + 1 == args.points {
                            args.p_stop
                        } else {
                            args.p_start + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    };
    if points.is_empty() {
        return Err(CliError::Input("empty p grid".into()));
    }
    for &p in &points {
        check_probability("p", p)?;
    }
    Ok(points)
}

/// Parses a string of `0`/`1` characters of the given length.
pub fn parse_bits(name: &str, s: &str, len: usize) -> CliResult<BitVector> {
    let bits: Vec<bool> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Input(format!(
                "{name}: {s:?} is not a bit string"
            ))),
        })
        .collect::<CliResult<_>>()?;
    if bits.len() != len {
        return Err(CliError::Input(format!(
            "{name}: expected {len} bits, got {}",
            bits.len()
        )));
    }
    Ok(BitVector::from_bools(&bits))
}

pub fn bits_to_string(v: &BitVector) -> String {
    (0..v.len())
        .map(|i| if v.get(i) { '1' } else { '0' })
        .collect()
}

/// How the grid parameter `p` maps to channel rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseMode {
    /// Independent flips with `pz = eta · px`.
    Independent { eta: f64 },
    /// `p̃x = p̃y = p̃z = p/3`.
    Depolarizing,
    /// `p̃ = p · w / Σw`.
    Pauli { w: [f64; 3] },
}

/// Channel at one grid point.
pub enum PointNoise {
    Factorized(IndependentNoise),
    Joint(PauliNoise),
}

impl NoiseMode {
    pub fn at(&self, p: f64) -> CliResult<PointNoise> {
        Ok(match *self {
            NoiseMode::Independent { eta } => {
                PointNoise::Factorized(IndependentNoise::new(p, eta * p)?)
            }
            NoiseMode::Depolarizing => {
                PointNoise::Joint(PauliNoise::new(p / 3.0, p / 3.0, p / 3.0)?)
            }
            NoiseMode::Pauli { w } => {
                let s: f64 = w.iter().sum();
                PointNoise::Joint(PauliNoise::new(p * w[0] / s, p * w[1] / s, p * w[2] / s)?)
            }
        })
    }

    pub fn is_joint(&self) -> bool {
        !matches!(self, NoiseMode::Independent { .. })
    }
}

impl FromStr for NoiseMode {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("independent", None) => Ok(NoiseMode::Independent { eta: 1.0 }),
            ("independent", Some(a)) => {
                let eta = parse_f64("noise ratio", a)?;
                if !(eta >= 0.0 && eta.is_finite()) {
                    return Err(CliError::Input(format!("noise ratio {eta} must be finite and non-negative")));
                }
                Ok(NoiseMode::Independent { eta })
            }
            ("depolarizing", None) => Ok(NoiseMode::Depolarizing),
            ("pauli", Some(a)) => {
                let w: Vec<f64> = a
                    .split(',')
                    .map(|x| parse_f64("pauli weight", x))
                    .collect::<CliResult<_>>()?;
                let ok = w.len() == 3
                    && w.iter().all(|&x| x >= 0.0 && x.is_finite())
                    && w.iter().sum::<f64>() > 0.0;
                if !ok {
                    return Err(CliError::Input(format!(
                        "pauli noise needs three non-negative weights with a positive sum, got {a:?}"
                    )));
                }
                Ok(NoiseMode::Pauli { w: [w[0], w[1], w[2]] })
            }
            _ => Err(CliError::Input(format!(
                "unknown noise {s:?}; use independent, independent:ETA, depolarizing or pauli:WX,WY,WZ"
            ))),
        }
    }
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseMode::Independent { eta } if *eta == 1.0 => f.write_str("independent"),
            NoiseMode::Independent { eta } => write!(f, "independent:{eta}"),
            NoiseMode::Depolarizing => f.write_str("depolarizing"),
            NoiseMode::Pauli { w } => write!(f, "pauli:{},{},{}", w[0], w[1], w[2]),
        }
    }
}
