//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use css_coherence::channels::{
    depolarizing_from_independent, sector_distribution_joint, sector_distribution_x,
    sector_distribution_z, Side, WeightEnumerator,
};
use css_coherence::code_zoo::{color666, four22, steane, surface2d, toric2d, toric3d, xcube};
use css_coherence::info::{
    bound_report_factorized, coherent_information_factorized, coherent_information_general,
    ml_success, relative_entropy, sampling_success,
};
use css_coherence::mc::{metropolis, nishimori_scan, McConfig};
use css_coherence::statmech::{
    build_sm_x, domain_wall_free_energy, kw_check, partition_exact, verify_sector_identity,
    Couplings,
};
use css_coherence::{BitMatrix, BitVector, CssCode};

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| 0.5 * i as f64 / (points - 1) as f64)
        .collect()
}

fn ic_curve(code: &CssCode, ps: &[f64]) -> Vec<f64> {
    let ex = WeightEnumerator::new(code, Side::X).unwrap();
    let ez = WeightEnumerator::new(code, Side::Z).unwrap();
    ps.iter()
        .map(|&p| {
            coherent_information_factorized(
                &ex.distribution(p).unwrap(),
                &ez.distribution(p).unwrap(),
                code.k(),
            )
            .unwrap()
        })
        .collect()
}

fn sweep_codes() -> Vec<(&'static str, CssCode)> {
    vec![
        ("steane", steane()),
        ("four22", four22()),
        ("toric2d:2", toric2d(2).unwrap()),
        ("toric2d:3", toric2d(3).unwrap()),
        ("surface2d:2", surface2d(2, 2).unwrap()),
    ]
}

fn endpoints() -> Outcome {
    let codes = vec![
        ("steane", steane()),
        ("four22", four22()),
        ("toric2d:2", toric2d(2).unwrap()),
        ("toric2d:3", toric2d(3).unwrap()),
        ("surface2d:2", surface2d(2, 2).unwrap()),
        ("surface2d:3", surface2d(3, 3).unwrap()),
        ("color666:3", color666(3, 3).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (name, code) in &codes {
        assert!(code.n() <= 20);
        let k = code.k() as f64;
        let ic = ic_curve(code, &[0.0, 0.5]);
        let zero = BitVector::zeros(code.k());
        let flip = BitVector::unit(code.k(), 0);
        let rel =
            relative_entropy(&sector_distribution_x(code, 0.0).unwrap(), &zero, &flip).unwrap();
        worst = worst.max((ic[1] + k).abs());
        if ic[0] != k || !rel.is_infinite() || (ic[1] + k).abs() > 1e-9 {
            failures.push(*name);
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} codes, Ic(0)=k exactly, D(0)=inf, max |Ic(0.5)+k| = {worst:.1e}; failing: {failures:?}",
            codes.len()
        ),
    }
}

fn bound_chain() -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for (name, code) in sweep_codes() {
        let ex = WeightEnumerator::new(&code, Side::X).unwrap();
        let ez = WeightEnumerator::new(&code, Side::Z).unwrap();
        for p in grid(21) {
            let r = bound_report_factorized(
                &ex.distribution(p).unwrap(),
                &ez.distribution(p).unwrap(),
                code.k(),
            )
            .unwrap();
            checked += 1;
            if r.violations.any() {
                violations.push(format!("{name}@{p}"));
            }
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!(
            "{checked} grid points, {} violations {violations:?}",
            violations.len()
        ),
    }
}

fn monotonicity() -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    for (_, code) in sweep_codes() {
        let ic = ic_curve(&code, &grid(21));
        for w in ic.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
    }
    Outcome {
        pass: worst_rise <= 1e-9,
        detail: format!("largest step increase {worst_rise:.1e} (tolerance 1e-9)"),
    }
}

fn sector_identity() -> Outcome {
    let cases = [
        ("four22", four22(), 0.1),
        ("four22", four22(), 0.3),
        ("toric2d:2", toric2d(2).unwrap(), 0.1),
        ("toric2d:2", toric2d(2).unwrap(), 0.15),
        ("steane", steane(), 0.05),
    ];
    let mut worst: f64 = 0.0;
    for (_, code, p) in &cases {
        worst = worst.max(verify_sector_identity(code, *p).unwrap().max_abs_deviation);
    }
    Outcome {
        pass: worst < 1e-12,
        detail: format!("{} cases, max |P - Z/norm| = {worst:.1e}", cases.len()),
    }
}

/// A random CSS code on 8 qubits: two random Z checks, X checks drawn from
/// their orthogonal complement.
fn random_code(seed: u64) -> CssCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let hz = BitMatrix::from_rows(
            8,
            (0..2)
                .map(|_| BitVector::from_u64(8, rng.gen::<u64>() & 0xff))
                .collect(),
        )
        .unwrap();
        let kernel = hz.kernel_basis();
        let hx_rows = (0..2)
            .map(|_| {
                let mut v = BitVector::zeros(8);
                for r in kernel.rows() {
                    if rng.gen::<bool>() {
                        v.xor_assign(r);
                    }
                }
                v
            })
            .collect();
        let hx = BitMatrix::from_rows(8, hx_rows).unwrap();
        let code = CssCode::new(hz, hx).unwrap();
        if code.k() >= 1 && code.rank_x() >= 1 && code.rank_z() >= 1 {
            return code;
        }
    }
}

fn depolarizing_consistency() -> Outcome {
    let points = [
        (0.02, 0.05),
        (0.1, 0.1),
        (0.2, 0.07),
        (0.3, 0.25),
        (0.45, 0.4),
    ];
    let mut worst: f64 = 0.0;
    for code in [four22(), random_code(2024)] {
        for &(px, pz) in &points {
            let joint =
                sector_distribution_joint(&code, &depolarizing_from_independent(px, pz)).unwrap();
            let general = coherent_information_general(&joint, code.k()).unwrap();
            let factorized = coherent_information_factorized(
                &sector_distribution_x(&code, px).unwrap(),
                &sector_distribution_z(&code, pz).unwrap(),
                code.k(),
            )
            .unwrap();
            worst = worst.max((general - factorized).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("four22 + random [[8,k]] code, 5 points each, max |dIc| = {worst:.1e}"),
    }
}

fn kramers_wannier() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut raw: f64 = 0.0;
    for code in [four22(), toric2d(2).unwrap()] {
        for beta in [0.3, 0.5, 0.8] {
            let r = kw_check(&code, beta).unwrap();
            worst = worst.max(r.summed_discrepancy.abs());
            raw = raw.max(r.raw_discrepancy.abs());
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!(
            "summed |ln lhs - ln rhs| max {worst:.1e}; single-class comparison max {raw:.2e}"
        ),
    }
}

fn relative_entropy_identity() -> Outcome {
    let code = toric2d(2).unwrap();
    let zero = BitVector::zeros(2);
    let mut worst: f64 = 0.0;
    let ps = [0.03, 0.08, 0.15, 0.25, 0.4];
    for shift in [1u64, 2, 3] {
        let shift = BitVector::from_u64(2, shift);
        for &p in &ps {
            let dist = sector_distribution_x(&code, p).unwrap();
            let rel = relative_entropy(&dist, &zero, &shift)
                .unwrap()
                .finite()
                .unwrap();
            let dw = domain_wall_free_energy(&code, p, &shift)
                .unwrap()
                .finite()
                .unwrap();
            worst = worst.max((rel - dw).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("toric2d:2, 5 points x 3 shifts, max |D - dF| = {worst:.1e}"),
    }
}

/// Another valid logical basis: for `k ≥ 2` replace `lx1 → lx1 + lx0` and
/// `lz0 → lz0 + lz1`; for `k = 1` multiply each logical by a stabilizer.
fn changed_basis(code: &CssCode) -> CssCode {
    let mut lx = code.logical_x().clone().into_rows();
    let mut lz = code.logical_z().clone().into_rows();
    if code.k() >= 2 {
        let lx0 = lx[0].clone();
        lx[1].xor_assign(&lx0);
        let lz1 = lz[1].clone();
        lz[0].xor_assign(&lz1);
    } else {
        lx[0].xor_assign(code.hx().row(0));
        lz[0].xor_assign(code.hz().row(code.hz().nrows() - 1));
    }
    let n = code.n();
    code.with_logicals(
        BitMatrix::from_rows(n, lx).unwrap(),
        BitMatrix::from_rows(n, lz).unwrap(),
    )
    .unwrap()
}

fn logical_basis_independence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut relabelled = false;
    for code in [steane(), toric2d(2).unwrap()] {
        let other = changed_basis(&code);
        for p in [0.05, 0.12, 0.3] {
            let (ax, az) = (
                sector_distribution_x(&code, p).unwrap(),
                sector_distribution_z(&code, p).unwrap(),
            );
            let (bx, bz) = (
                sector_distribution_x(&other, p).unwrap(),
                sector_distribution_z(&other, p).unwrap(),
            );
            relabelled |= ax.probabilities() != bx.probabilities();
            let ia = coherent_information_factorized(&ax, &az, code.k()).unwrap();
            let ib = coherent_information_factorized(&bx, &bz, code.k()).unwrap();
            worst = worst
                .max((ia - ib).abs())
                .max((ml_success(&ax) - ml_success(&bx)).abs())
                .max((ml_success(&az) - ml_success(&bz)).abs())
                .max((sampling_success(&ax) - sampling_success(&bx)).abs())
                .max((sampling_success(&az) - sampling_success(&bz)).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-12 && relabelled,
        detail: format!(
            "steane + toric2d:2, labels permuted: {relabelled}, max change {worst:.1e}"
        ),
    }
}

fn zoo_structure() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    let c = color666(3, 3).unwrap();
    pass &= c.k() == 4 && c.symmetry_dim_x() == 2 && c.symmetry_dim_z() == 2;
    rows.push(format!(
        "color666:3 (n,k,Dx,Dz)=({},{},{},{})",
        c.n(),
        c.k(),
        c.symmetry_dim_x(),
        c.symmetry_dim_z()
    ));
    for l in [2usize, 3] {
        let t = toric3d(l).unwrap();
        pass &= t.k() == 3 && t.symmetry_dim_x() == 1 && t.symmetry_dim_z() == l * l * l + 2;
        rows.push(format!(
            "toric3d:{l}=({},{},{},{})",
            t.n(),
            t.k(),
            t.symmetry_dim_x(),
            t.symmetry_dim_z()
        ));
        let x = xcube(l).unwrap();
        pass &= x.k() == 6 * l - 3;
        rows.push(format!(
            "xcube:{l}=({},{},{},{})",
            x.n(),
            x.k(),
            x.symmetry_dim_x(),
            x.symmetry_dim_z()
        ));
    }
    Outcome {
        pass,
        detail: rows.join(" "),
    }
}

fn monte_carlo() -> Outcome {
    let code = toric2d(2).unwrap();
    let model = build_sm_x(&code, &BitVector::zeros(code.n()));
    let h = 1e-5;
    let ln_z = |b: f64| partition_exact(&model, &Couplings::Single { beta: b }).unwrap();
    let cfg = McConfig {
        sweeps: 65536,
        burn_in: 1024,
        seed: 17,
        ..McConfig::default()
    };
    let mut worst_sigma: f64 = 0.0;
    for beta in [0.2, 0.5, 1.0] {
        let exact = -(ln_z(beta + h) - ln_z(beta - h)) / (2.0 * h) / model.terms.len() as f64;
        let obs = metropolis(&model, beta, &cfg).unwrap();
        worst_sigma = worst_sigma.max((obs.mean_energy - exact).abs() / obs.energy_err);
    }
    let big = toric2d(8).unwrap();
    let scan_cfg = McConfig {
        sweeps: 2048,
        burn_in: 512,
        seed: 5,
        ..McConfig::default()
    };
    let rows = nishimori_scan(&big, Side::X, &[0.05, 0.20], 32, &scan_cfg).unwrap();
    let gap = rows[0].ea_overlap.unwrap() - rows[1].ea_overlap.unwrap();
    Outcome {
        pass: worst_sigma <= 3.0 && gap > 0.3,
        detail: format!(
            "energy within {worst_sigma:.2} blocking SE (limit 3); toric2d:8 q2(0.05) - q2(0.20) = {gap:.3} (need > 0.3)"
        ),
    }
}

fn crossing() -> Outcome {
    let ps = grid(41);
    let small = ic_curve(&toric2d(2).unwrap(), &ps);
    let large = ic_curve(&toric2d(3).unwrap(), &ps);
    let diff: Vec<f64> = large
        .iter()
        .zip(&small)
        .map(|(l, s)| (l - s) / 2.0)
        .collect();
    let cross = ps
        .windows(2)
        .zip(diff.windows(2))
        .find(|(p, d)| p[0] >= 0.05 && p[1] <= 0.20 && d[0] > 0.0 && d[1] < 0.0)
        .map(|(p, d)| p[0] + (p[1] - p[0]) * d[0] / (d[0] - d[1]));
    Outcome {
        pass: cross.is_some(),
        detail: match cross {
            Some(p) => format!("Ic/k curves of toric2d:2 and toric2d:3 cross at p = {p:.4}"),
            None => "no crossing in [0.05, 0.20]".into(),
        },
    }
}

/// Name, check and runtime budget of one criterion.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("endpoint exactness", endpoints, Duration::from_secs(10)),
        ("bound chain", bound_chain, Duration::from_secs(120)),
        ("monotonicity", monotonicity, Duration::from_secs(120)),
        ("sector identity", sector_identity, Duration::from_secs(60)),
        (
            "depolarizing consistency",
            depolarizing_consistency,
            Duration::from_secs(120),
        ),
        (
            "Kramers-Wannier duality",
            kramers_wannier,
            Duration::from_secs(60),
        ),
        (
            "relative entropy = domain-wall free energy",
            relative_entropy_identity,
            Duration::from_secs(60),
        ),
        (
            "logical-basis independence",
            logical_basis_independence,
            Duration::from_secs(60),
        ),
        ("zoo structure", zoo_structure, Duration::from_secs(10)),
        (
            "Monte Carlo validity",
            monte_carlo,
            Duration::from_secs(300),
        ),
        ("Ic crossing", crossing, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {} ({:.2}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
