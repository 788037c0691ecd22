use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use css_coherence::channels::{
    depolarizing_from_independent, sector_distribution_joint, sector_distribution_x,
    sector_distribution_z, FieldSet, PauliNoise, SectorDistribution, Side, WeightEnumerator,
};
use css_coherence::info::{
    bound_report, bound_report_factorized, coherent_information_factorized,
    coherent_information_general, ml_success, relative_entropy, sampling_success, BoundReport,
    RelativeEntropy,
};
use css_coherence::mc::{nishimori_scan, McConfig, Start};
use css_coherence::statmech::{
    build_sm_x, build_sm_z, domain_wall_free_energy, kw_check as kw_report, verify_sector_identity,
    verify_sector_identity_z,
};
use css_coherence::{BitVector, CssCode, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{emit, format_f64, Cell, Provenance, Table};
use crate::params::{bits_to_string, grid, parse_bits, resolve_code, NoiseMode, PointNoise};
use crate::{CliError, CliResult, DistSide, GridArgs, OutArgs, SweepArgs};

/// Largest accepted sector-identity deviation in `verify`.
const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Largest accepted gap between independent and correlated evaluations.
const CONSISTENCY_TOLERANCE: f64 = 1e-10;
/// Largest accepted summed duality discrepancy in `kw-check`.
const DUALITY_TOLERANCE: f64 = 1e-9;

pub fn code_info(selector: &str, as_json: bool) -> CliResult<()> {
    let code = resolve_code(selector)?;
    let distance = match code.distance() {
        Ok(d) => Some((d.dx, d.dz)),
        Err(Error::NoLogicalQubits) => None,
        Err(e) if e.is_bound_exceeded() => None,
        Err(e) => return Err(e.into()),
    };
    let supports = |m: &css_coherence::BitMatrix| -> Vec<Vec<usize>> {
        m.rows().iter().map(|r| r.iter_ones().collect()).collect()
    };
    let lx = supports(code.logical_x());
    let lz = supports(code.logical_z());
    let prov = Provenance::new("code-info").code(selector, &code);
    if as_json {
        let doc = json!({
            "provenance": prov.to_json(),
            "n": code.n(),
            "k": code.k(),
            "rank_x": code.rank_x(),
            "rank_z": code.rank_z(),
            "symmetry_dim_x": code.symmetry_dim_x(),
            "symmetry_dim_z": code.symmetry_dim_z(),
            "distance": distance.map(|(dx, dz)| json!({ "dx": dx, "dz": dz })),
            "logical_x": lx,
            "logical_z": lz,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("report serializes")
        );
        return Ok(());
    }
    let mut out = prov.header();
    let d = match distance {
        Some((dx, dz)) => format!("({dx},{dz})"),
        None if code.k() == 0 => "none".into(),
        None => "not computed (exceeds enumeration bound)".into(),
    };
    let _ = writeln!(out, "n={} k={} d={d}", code.n(), code.k());
    let _ = writeln!(out, "rank_x={} rank_z={}", code.rank_x(), code.rank_z());
    let _ = writeln!(
        out,
        "symmetry_dim_x={} symmetry_dim_z={}",
        code.symmetry_dim_x(),
        code.symmetry_dim_z()
    );
    for (name, ops) in [("logical_x", &lx), ("logical_z", &lz)] {
        for (i, s) in ops.iter().enumerate() {
            let s: Vec<String> = s.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{name}[{i}]: {}", s.join(" "));
        }
    }
    print!("{out}");
    Ok(())
}

pub fn export_code(selector: &str, out: Option<&Path>) -> CliResult<()> {
    let code = resolve_code(selector)?;
    emit(out, &code.to_text())
}

fn require_logicals(code: &CssCode) -> CliResult<()> {
    if code.k() == 0 {
        return Err(Error::NoLogicalQubits.into());
    }
    Ok(())
}

/// Everything a sweep row can report at one grid point.
struct Point {
    px: f64,
    pz: f64,
    pauli: Option<PauliNoise>,
    report: BoundReport,
    rel: RelativeEntropy,
}

fn evaluate(
    code: &CssCode,
    mode: NoiseMode,
    grid: &[f64],
    shift: &BitVector,
) -> CliResult<Vec<Point>> {
    let zero = BitVector::zeros(code.k());
    let k = code.k();
    if mode.is_joint() {
        grid.par_iter()
            .map(|&p| {
                let PointNoise::Joint(noise) = mode.at(p)? else {
                    unreachable!("joint modes yield joint channels")
                };
                let dist = sector_distribution_joint(code, &noise)?;
                let rel = relative_entropy(&dist.marginalize(FieldSet::X_SIDE)?, &zero, shift)?;
                Ok(Point {
                    px: noise.ptx + noise.pty,
                    pz: noise.ptz + noise.pty,
                    pauli: Some(noise),
                    report: bound_report(&dist, k),
                    rel,
                })
            })
            .collect()
    } else {
        let ex = WeightEnumerator::new(code, Side::X)?;
        let ez = WeightEnumerator::new(code, Side::Z)?;
        grid.par_iter()
            .map(|&p| {
                let PointNoise::Factorized(noise) = mode.at(p)? else {
                    unreachable!("independent mode yields factorized channels")
                };
                let dx = ex.distribution(noise.px)?;
                let dz = ez.distribution(noise.pz)?;
                Ok(Point {
                    px: noise.px,
                    pz: noise.pz,
                    pauli: None,
                    report: bound_report_factorized(&dx, &dz, k)?,
                    rel: relative_entropy(&dx, &zero, shift)?,
                })
            })
            .collect()
    }
}

fn sweep_points(
    args: &SweepArgs,
    shift: Option<&str>,
) -> CliResult<(CssCode, NoiseMode, Vec<Point>)> {
    let code = resolve_code(&args.code)?;
    require_logicals(&code)?;
    let mode: NoiseMode = args.noise.parse()?;
    let p_grid = grid(&args.grid)?;
    let shift = match shift {
        Some(s) => parse_bits("shift", s, code.k())?,
        None => BitVector::unit(code.k(), 0),
    };
    if shift.is_zero() {
        return Err(CliError::Input(
            "the relative-entropy shift must be nonzero".into(),
        ));
    }
    let points = evaluate(&code, mode, &p_grid, &shift)?;
    Ok((code, mode, points))
}

fn pauli_cells(row: &mut Vec<Cell>, point: &Point) {
    if let Some(n) = point.pauli {
        row.extend([Cell::Num(n.ptx), Cell::Num(n.pty), Cell::Num(n.ptz)]);
    }
}

/// Emits the table, then fails if any grid point broke the bound chain.
fn finish_sweep(
    table: &Table,
    prov: &Provenance,
    points: &[Point],
    out: &OutArgs,
) -> CliResult<()> {
    emit(out.out.as_deref(), &table.render(prov, out.format))?;
    let bad: Vec<String> = points
        .iter()
        .filter(|p| p.report.violations.any())
        .map(|p| format!("(p_x={}, p_z={})", p.px, p.pz))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "bound chain fails at {}",
            bad.join(", ")
        )))
    }
}

fn sweep_provenance(
    command: &str,
    args: &SweepArgs,
    code: &CssCode,
    mode: NoiseMode,
    n: usize,
) -> Provenance {
    Provenance::new(command)
        .code(&args.code, code)
        .with("noise", mode)
        .with("points", n)
}

pub fn ic_sweep(args: &SweepArgs, shift: Option<&str>) -> CliResult<()> {
    let (code, mode, points) = sweep_points(args, shift)?;
    let mut columns = vec![
        "p_x",
        "p_z",
        "ic_bits",
        "ml_success",
        "sampling_success",
        "jensen_lower",
        "rel_entropy_bits",
    ];
    if mode.is_joint() {
        columns.extend(["pt_x", "pt_y", "pt_z"]);
    }
    let mut table = Table::new(columns);
    for p in &points {
        let mut row = vec![
            Cell::Num(p.px),
            Cell::Num(p.pz),
            Cell::Num(p.report.ic_bits),
            Cell::Num(p.report.ml),
            Cell::Num(p.report.sampling),
            Cell::Num(p.report.jensen_lower),
            Cell::Rel(p.rel),
        ];
        pauli_cells(&mut row, p);
        table.rows.push(row);
    }
    let shift_label = match shift {
        Some(s) => s.to_string(),
        None => bits_to_string(&BitVector::unit(code.k(), 0)),
    };
    let prov =
        sweep_provenance("ic-sweep", args, &code, mode, points.len()).with("shift", shift_label);
    finish_sweep(&table, &prov, &points, &args.out)
}

pub fn decoder_sweep(args: &SweepArgs) -> CliResult<()> {
    let (code, mode, points) = sweep_points(args, None)?;
    let mut columns = vec![
        "p_x",
        "p_z",
        "ml_success",
        "sampling_success",
        "jensen_lower",
        "ml_lower",
        "bounds_ok",
    ];
    if mode.is_joint() {
        columns.extend(["pt_x", "pt_y", "pt_z"]);
    }
    let mut table = Table::new(columns);
    for p in &points {
        let mut row = vec![
            Cell::Num(p.px),
            Cell::Num(p.pz),
            Cell::Num(p.report.ml),
            Cell::Num(p.report.sampling),
            Cell::Num(p.report.jensen_lower),
            Cell::Num(p.report.ml_lower),
            Cell::Bool(!p.report.violations.any()),
        ];
        pauli_cells(&mut row, p);
        table.rows.push(row);
    }
    let prov = sweep_provenance("decoder-sweep", args, &code, mode, points.len());
    finish_sweep(&table, &prov, &points, &args.out)
}

pub fn relent_sweep(
    selector: &str,
    k0: &str,
    k0p: &str,
    grid_args: &GridArgs,
    side: Side,
    free_energy: bool,
    out: &OutArgs,
) -> CliResult<()> {
    let code = resolve_code(selector)?;
    require_logicals(&code)?;
    let k0v = parse_bits("k0", k0, code.k())?;
    let k0pv = parse_bits("k0p", k0p, code.k())?;
    if free_energy && side != Side::X {
        return Err(CliError::Input(
            "--free-energy is only available for bit flips (--side x)".into(),
        ));
    }
    let p_grid = grid(grid_args)?;
    let enumerator = WeightEnumerator::new(&code, side)?;
    let shift = k0v.xor(&k0pv);
    let rows: Vec<(f64, RelativeEntropy, Option<RelativeEntropy>)> = p_grid
        .par_iter()
        .map(|&p| {
            let d = relative_entropy(&enumerator.distribution(p)?, &k0v, &k0pv)?;
            let f = if free_energy {
                Some(domain_wall_free_energy(&code, p, &shift)?)
            } else {
                None
            };
            Ok((p, d, f))
        })
        .collect::<CliResult<_>>()?;
    let mut columns = vec!["p", "rel_entropy_bits"];
    if free_energy {
        columns.push("domain_wall_bits");
    }
    let mut table = Table::new(columns);
    let mut mismatches = Vec::new();
    for &(p, d, f) in &rows {
        let mut row = vec![Cell::Num(p), Cell::Rel(d)];
        if let Some(f) = f {
            let agree = match (d, f) {
                (RelativeEntropy::Finite(a), RelativeEntropy::Finite(b)) => {
                    (a - b).abs() <= CONSISTENCY_TOLERANCE
                }
                (a, b) => a.is_infinite() && b.is_infinite(),
            };
            if !agree {
                mismatches.push(format!("p={p}: {d} vs {f}"));
            }
            row.push(Cell::Rel(f));
        }
        table.rows.push(row);
    }
    let prov = Provenance::new("relent-sweep")
        .code(selector, &code)
        .with("side", if side == Side::X { "x" } else { "z" })
        .with("k0", k0)
        .with("k0p", k0p)
        .with("points", rows.len());
    emit(out.out.as_deref(), &table.render(&prov, out.format))?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "relative entropy and domain-wall free energy disagree at {}",
            mismatches.join("; ")
        )))
    }
}

pub fn sm_export(
    selector: &str,
    side: Side,
    syndrome: Option<&str>,
    logical: Option<&str>,
    out: Option<&Path>,
) -> CliResult<()> {
    let code = resolve_code(selector)?;
    let syndrome_len = match side {
        Side::X => code.rank_z(),
        Side::Z => code.rank_x(),
    };
    let s = match syndrome {
        Some(s) => parse_bits("syndrome", s, syndrome_len)?,
        None => BitVector::zeros(syndrome_len),
    };
    let l = match logical {
        Some(l) => parse_bits("logical", l, code.k())?,
        None => BitVector::zeros(code.k()),
    };
    let model = match side {
        Side::X => build_sm_x(&code, &code.x_error_representative(&s, &l)?),
        Side::Z => build_sm_z(&code, &code.z_error_representative(&s, &l)?),
    };
    let prov = Provenance::new("sm-export")
        .code(selector, &code)
        .with("side", if side == Side::X { "x" } else { "z" })
        .with("syndrome", bits_to_string(&s))
        .with("logical", bits_to_string(&l));
    let model: Value = serde_json::from_str(&model.to_json()?).map_err(Error::from)?;
    let doc = json!({ "provenance": prov.to_json(), "model": model });
    let mut text = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
    text.push('\n');
    emit(out, &text)
}

pub fn kw_check(selector: &str, beta: f64) -> CliResult<()> {
    let code = resolve_code(selector)?;
    let r = kw_report(&code, beta)?;
    let prov = Provenance::new("kw-check")
        .code(selector, &code)
        .with("beta_x", beta);
    let mut out = prov.header();
    for (name, v) in [
        ("beta_x", r.beta_x),
        ("beta_z", r.beta_z),
        ("ln_px_trivial", r.ln_px_trivial),
        ("ln_px_summed", r.ln_px_summed),
        ("ln_dual", r.ln_rhs),
        ("raw_discrepancy", r.raw_discrepancy),
        ("summed_discrepancy", r.summed_discrepancy),
    ] {
        let _ = writeln!(out, "{name}: {}", format_f64(v));
    }
    print!("{out}");
    if r.summed_discrepancy.abs() > DUALITY_TOLERANCE {
        return Err(CliError::Invariant(format!(
            "summed duality discrepancy {} exceeds {DUALITY_TOLERANCE}",
            r.summed_discrepancy
        )));
    }
    Ok(())
}

/// Outcome of one check in `verify`.
enum Check {
    Pass(String),
    Fail(String),
    Skipped(String),
}

/// Bound and coupling errors skip a check; anything else aborts.
fn skippable<T>(r: css_coherence::Result<T>) -> CliResult<Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_bound_exceeded() || matches!(e, Error::InfiniteCoupling(_)) => {
            Ok(Err(e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn verify(selector: &str, p: f64) -> CliResult<()> {
    let code = resolve_code(selector)?;
    require_logicals(&code)?;
    let mut checks: Vec<(&str, Check)> = Vec::new();

    for (name, r) in [
        ("sector identity (x)", verify_sector_identity(&code, p)),
        ("sector identity (z)", verify_sector_identity_z(&code, p)),
    ] {
        let check = match skippable(r)? {
            Ok(rep) => {
                let msg = format!(
                    "{} sectors, max deviation {:e}",
                    rep.sectors, rep.max_abs_deviation
                );
                if rep.max_abs_deviation < IDENTITY_TOLERANCE {
                    Check::Pass(msg)
                } else {
                    Check::Fail(msg)
                }
            }
            Err(why) => Check::Skipped(why),
        };
        checks.push((name, check));
    }

    let dists = match skippable(sector_distribution_x(&code, p))? {
        Ok(dx) => skippable(sector_distribution_z(&code, p))?.map(|dz| (dx, dz)),
        Err(why) => Err(why),
    };
    let factorized = match dists {
        Ok((dx, dz)) => {
            let r = bound_report_factorized(&dx, &dz, code.k())?;
            let msg = format!(
                "ic={} ml={} sampling={} jensen_lower={}",
                r.ic_bits, r.ml, r.sampling, r.jensen_lower
            );
            checks.push((
                "bound chain",
                if r.violations.any() {
                    Check::Fail(format!("{msg} {:?}", r.violations))
                } else {
                    Check::Pass(msg)
                },
            ));
            Some(r.ic_bits)
        }
        Err(why) => {
            checks.push(("bound chain", Check::Skipped(why)));
            None
        }
    };

    let noise = depolarizing_from_independent(p, p);
    let check = match (
        factorized,
        skippable(sector_distribution_joint(&code, &noise))?,
    ) {
        (Some(ic), Ok(joint)) => {
            let general = coherent_information_general(&joint, code.k())?;
            let gap = (general - ic).abs();
            let msg = format!("|Ic(joint) - Ic(independent)| = {gap:e}");
            if gap <= CONSISTENCY_TOLERANCE {
                Check::Pass(msg)
            } else {
                Check::Fail(msg)
            }
        }
        (None, _) => Check::Skipped("independent evaluation unavailable".into()),
        (_, Err(why)) => Check::Skipped(why),
    };
    checks.push(("correlated channel consistency", check));

    let prov = Provenance::new("verify").code(selector, &code).with("p", p);
    let mut out = prov.header();
    let mut failed = Vec::new();
    for (name, c) in &checks {
        let (tag, msg) = match c {
            Check::Pass(m) => ("ok", m),
            Check::Fail(m) => {
                failed.push(*name);
                ("FAIL", m)
            }
            Check::Skipped(m) => ("skipped", m),
        };
        let _ = writeln!(out, "{name}: {tag}: {msg}");
    }
    print!("{out}");
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

pub fn mc(
    selector: &str,
    grid_args: &GridArgs,
    side: Side,
    samples: usize,
    cfg: &McConfig,
    out: &OutArgs,
) -> CliResult<()> {
    let code = resolve_code(selector)?;
    let p_grid = grid(grid_args)?;
    let rows = nishimori_scan(&code, side, &p_grid, samples, cfg)?;
    let mut table = Table::new(vec![
        "p",
        "beta",
        "mean_energy",
        "energy_err",
        "ea_overlap",
        "ea_err",
        "samples",
    ]);
    let opt = |v: Option<f64>| v.map_or(Cell::Missing, Cell::Num);
    for r in &rows {
        table.rows.push(vec![
            Cell::Num(r.p),
            Cell::Num(r.beta),
            Cell::Num(r.mean_energy),
            Cell::Num(r.energy_err),
            opt(r.ea_overlap),
            opt(r.ea_err),
            Cell::Count(r.samples),
        ]);
    }
    // thread count is left out: results do not depend on it
    let prov = Provenance::new("mc")
        .code(selector, &code)
        .with("side", if side == Side::X { "x" } else { "z" })
        .with("seed", cfg.seed)
        .with("sweeps", cfg.sweeps)
        .with("burn_in", cfg.burn_in)
        .with("replicas", cfg.replicas)
        .with(
            "start",
            if cfg.start == Start::Cold {
                "cold"
            } else {
                "hot"
            },
        )
        .with("disorder_samples", samples);
    emit(out.out.as_deref(), &table.render(&prov, out.format))
}

pub fn dist_export(
    selector: &str,
    p: f64,
    side: DistSide,
    noise: &str,
    out: Option<&Path>,
) -> CliResult<()> {
    let code = resolve_code(selector)?;
    let dist = match side {
        DistSide::X => sector_distribution_x(&code, p)?,
        DistSide::Z => sector_distribution_z(&code, p)?,
        DistSide::Joint => {
            let channel = match noise.parse::<NoiseMode>()?.at(p)? {
                PointNoise::Joint(n) => n,
                PointNoise::Factorized(n) => depolarizing_from_independent(n.px, n.pz),
            };
            sector_distribution_joint(&code, &channel)?
        }
    };
    let mut text = dist.to_json()?;
    text.push('\n');
    emit(out, &text)
}

fn read_distribution(path: &PathBuf) -> CliResult<SectorDistribution> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    SectorDistribution::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn dist_info(files: &[PathBuf], as_json: bool) -> CliResult<()> {
    let dists: Vec<SectorDistribution> = files
        .iter()
        .map(read_distribution)
        .collect::<CliResult<_>>()?;
    let mut fields: Vec<(&str, Value)> = Vec::new();
    let first = &dists[0];
    fields.push(("code_hash", json!(first.code_hash())));
    match dists.as_slice() {
        [d] => {
            fields.push(("fields", json!(d.fields().to_string())));
            fields.push(("total", json!(d.total())));
            if d.fields() == FieldSet::ALL {
                let k = d.logical_bits() / 2;
                let r = bound_report(d, k);
                let ic = coherent_information_general(d, k)?;
                fields.push(("k", json!(k)));
                fields.push(("ic_bits", json!(ic)));
                fields.push(("ml_success", json!(r.ml)));
                fields.push(("sampling_success", json!(r.sampling)));
                fields.push(("jensen_lower", json!(r.jensen_lower)));
            } else {
                fields.push(("ml_success", json!(ml_success(d))));
                fields.push(("sampling_success", json!(sampling_success(d))));
            }
        }
        [a, b] => {
            let (dx, dz) = if a.fields() == FieldSet::X_SIDE {
                (a, b)
            } else {
                (b, a)
            };
            let k = dx.logical_bits();
            let ic = coherent_information_factorized(dx, dz, k)?;
            let r = bound_report_factorized(dx, dz, k)?;
            fields.push((
                "fields",
                json!(format!("{} x {}", dx.fields(), dz.fields())),
            ));
            fields.push(("k", json!(k)));
            fields.push(("ic_bits", json!(ic)));
            fields.push(("ml_success", json!(r.ml)));
            fields.push(("sampling_success", json!(r.sampling)));
            fields.push(("jensen_lower", json!(r.jensen_lower)));
        }
        _ => unreachable!("clap limits the file count"),
    }
    if as_json {
        let obj: serde_json::Map<String, Value> = fields
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&Value::Object(obj)).expect("report serializes")
        );
    } else {
        for (k, v) in fields {
            match v {
                Value::String(s) => println!("{k}: {s}"),
                other => println!("{k}: {other}"),
            }
        }
    }
    Ok(())
}
