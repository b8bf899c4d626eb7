//! Command-line interface: analyze, contact, norm, taylor, verify.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 verification
//! suite failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use birif::quadnorms::{blaschke_lower_bound_check, douglas_1d, douglas_bidisc_weighted};
use birif::series::{coeff_norm_partial_sums, kappa_coeff_closed_form};
use birif::{
    catalog, classify, estimate_contact_order, find_torus_zeros, parse_poly, slice_norm,
    taylor_coeffs, trace_branches, BiPoly, MixedInput, QuadGrid, Rif, SpaceSpec, Var,
};

#[derive(Parser)]
#[command(name = "birif", version, about = "Two-variable rational inner function diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Denominator polynomial expression, e.g. "2 - z1 - z2".
    #[arg(long)]
    p: String,

    /// Target space family.
    #[arg(long, value_parser = ["frak", "bcg", "bcgw", "higher"])]
    space: Option<String>,

    /// Weight parameter alpha.
    #[arg(long)]
    alpha: Option<f64>,

    /// Second weight parameter (tensor weights only; defaults to alpha).
    #[arg(long)]
    alpha2: Option<f64>,

    /// Derivative orders M N (higher-order spaces and taylor grids).
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    order: Option<Vec<u64>>,

    /// Quadrature resolution R A.
    #[arg(long, num_args = 2, value_names = ["R", "A"])]
    grid: Option<Vec<usize>>,

    /// Comma-separated truncation levels (decreasing).
    #[arg(long, value_delimiter = ',')]
    eps_levels: Option<Vec<f64>>,

    /// Write the JSON report to this path (also printed to stdout).
    #[arg(long)]
    json: Option<PathBuf>,

    /// Directory for CSV sidecars.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Full membership analysis: stability, contact order, classification.
    Analyze(CommonArgs),
    /// Contact order estimation at each boundary singularity.
    Contact(CommonArgs),
    /// Quadrature norm estimate with truncation diagnostics.
    Norm(CommonArgs),
    /// Taylor coefficient grid and weighted partial sums.
    Taylor(CommonArgs),
    /// Reproduction suite over the built-in examples.
    Verify {
        /// Suite name ("examples"; "paper-sec6" is accepted as an alias).
        #[arg(long, default_value = "examples")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Verification,
}

impl From<birif::Error> for CliError {
    fn from(e: birif::Error) -> Self {
        match e {
            birif::Error::Parse { .. } | birif::Error::Domain(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o failure: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help/version requests are successes, anything else is usage.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Contact(args) => cmd_contact(&args),
        Command::Norm(args) => cmd_norm(&args),
        Command::Taylor(args) => cmd_taylor(&args),
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification) => ExitCode::from(3),
    }
}

fn build_rif(args: &CommonArgs) -> Result<Rif, CliError> {
    let p = parse_poly(&args.p)?;
    Ok(Rif::from_denominator(p)?)
}

fn build_space(args: &CommonArgs) -> Result<SpaceSpec, CliError> {
    let name = args.space.as_deref().unwrap_or("bcgw");
    match name {
        "bcg" => Ok(SpaceSpec::Bcg),
        "bcgw" => {
            let alpha = args
                .alpha
                .ok_or_else(|| CliError::Usage("--alpha is required for --space bcgw".into()))?;
            Ok(SpaceSpec::BcgWeighted { alpha })
        }
        "frak" => {
            let alpha1 = args
                .alpha
                .ok_or_else(|| CliError::Usage("--alpha is required for --space frak".into()))?;
            Ok(SpaceSpec::Frak { alpha1, alpha2: args.alpha2.unwrap_or(alpha1) })
        }
        "higher" => {
            let order = args.order.as_ref().ok_or_else(|| {
                CliError::Usage("--order M N is required for --space higher".into())
            })?;
            Ok(SpaceSpec::HigherOrder { m: order[0] as u32, n: order[1] as u32 })
        }
        other => Err(CliError::Usage(format!("unknown space '{other}'"))),
    }
}

fn build_grid(args: &CommonArgs) -> QuadGrid {
    match &args.grid {
        Some(g) => QuadGrid::new(g[0], g[1]),
        None => QuadGrid::default(),
    }
}

fn emit_json(args: &CommonArgs, doc: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc).expect("report serializes");
    println!("{text}");
    if let Some(path) = &args.json {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn write_csv(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn cmd_analyze(args: &CommonArgs) -> Result<(), CliError> {
    let rif = build_rif(args)?;
    let space = build_space(args)?;
    let grid = build_grid(args);
    let report = birif::report::classify_with_grid(&rif, &space, &grid)?;
    if let Some(dir) = &args.csv {
        for (i, &(_, t)) in report.rif_summary.singularities.iter().enumerate() {
            let trace = trace_branches(&rif, Complex64::from_polar(1.0, t), 0.3, 24)?;
            write_csv(dir, &format!("branch_trace_{i}.csv"), &trace.to_csv())?;
        }
    }
    emit_json(args, &serde_json::to_value(&report).expect("report serializes"))
}

fn cmd_contact(args: &CommonArgs) -> Result<(), CliError> {
    let rif = build_rif(args)?;
    let zeros = find_torus_zeros(rif.denom(), 256)?;
    let mut estimates = Vec::new();
    for (i, &tau) in zeros.points.iter().enumerate() {
        let est = estimate_contact_order(&rif, tau)?;
        if let Some(dir) = &args.csv {
            let trace = trace_branches(&rif, tau.1, 0.3, 24)?;
            write_csv(dir, &format!("branch_trace_{i}.csv"), &trace.to_csv())?;
        }
        estimates.push(est);
    }
    let doc = json!({
        "denominator": args.p,
        "singularities": zeros.angles,
        "estimates": estimates,
        "k": estimates.iter().map(|e| e.k).max().unwrap_or(0),
    });
    emit_json(args, &doc)
}

fn cmd_norm(args: &CommonArgs) -> Result<(), CliError> {
    let rif = build_rif(args)?;
    let space = build_space(args)?;
    let grid = build_grid(args);
    let levels = args.eps_levels.clone();

    let slice_with_levels = |var: Var, n: u32, alpha: f64| -> birif::Result<birif::NormEstimate> {
        match &levels {
            Some(l) => birif::quadnorms::slice_norm_with_levels(&rif, var, n, alpha, &grid, l),
            None => slice_norm(&rif, var, n, alpha, &grid),
        }
    };

    let estimates: Vec<(String, birif::NormEstimate)> = match space {
        SpaceSpec::Bcg => vec![
            ("slice_z1".into(), slice_with_levels(Var::Z1, 1, 1.0)?),
            ("slice_z2".into(), slice_with_levels(Var::Z2, 1, 1.0)?),
        ],
        SpaceSpec::BcgWeighted { alpha } => vec![
            ("slice_z1".into(), slice_with_levels(Var::Z1, 1, alpha)?),
            ("slice_z2".into(), slice_with_levels(Var::Z2, 1, alpha)?),
        ],
        SpaceSpec::HigherOrder { m, n } => vec![
            ("slice_z1".into(), slice_with_levels(Var::Z1, m, 1.0)?),
            ("slice_z2".into(), slice_with_levels(Var::Z2, n, 1.0)?),
        ],
        SpaceSpec::Frak { alpha1, alpha2 } => {
            let est = match &levels {
                Some(l) => birif::quadnorms::mixed_dirichlet_norm_with_levels(
                    MixedInput::Rif(&rif),
                    alpha1,
                    alpha2,
                    &grid,
                    l,
                )?,
                None => birif::mixed_dirichlet_norm(MixedInput::Rif(&rif), alpha1, alpha2, &grid)?,
            };
            vec![("mixed".into(), est)]
        }
    };

    if let Some(dir) = &args.csv {
        for (name, est) in &estimates {
            write_csv(dir, &format!("truncation_{name}.csv"), &est.truncation_csv())?;
        }
    }
    let doc = json!({
        "denominator": args.p,
        "space": space,
        "estimates": estimates.iter().map(|(n, e)| json!({"part": n, "estimate": e})).collect::<Vec<_>>(),
    });
    emit_json(args, &doc)
}

fn cmd_taylor(args: &CommonArgs) -> Result<(), CliError> {
    let rif = build_rif(args)?;
    let (m, n) = match &args.order {
        Some(o) => (o[0] as usize, o[1] as usize),
        None => (64, 64),
    };
    let grid = taylor_coeffs(&rif, m, n)?;
    if let Some(dir) = &args.csv {
        write_csv(dir, "taylor.csv", &grid.to_csv())?;
    }
    let mut doc = json!({
        "denominator": args.p,
        "kmax": grid.kmax,
        "lmax": grid.lmax,
    });
    if let Ok(space) = build_space(args) {
        let cuts: Vec<usize> = (1..=(m + n)).filter(|c| c.is_power_of_two()).collect();
        let sums = coeff_norm_partial_sums(&grid, &space, &cuts)?;
        doc["space"] = serde_json::to_value(space).expect("space serializes");
        doc["diagonal_cuts"] = json!(cuts);
        doc["partial_sums"] = json!(sums);
    }
    emit_json(args, &doc)
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, name: &str, ok: bool) {
        println!("{} {}", if ok { "pass" } else { "FAIL" }, name);
        if !ok {
            self.failures += 1;
        }
    }
}

fn cmd_verify(suite: &str, seed: u64) -> Result<(), CliError> {
    if suite != "examples" && suite != "paper-sec6" {
        return Err(CliError::Usage(format!("unknown suite '{suite}'")));
    }
    let mut s = Suite { failures: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let kappa = catalog::kappa();
    let amy = catalog::amy();

    // Reflection reproduces the canonical numerators exactly.
    let refl = kappa.numer();
    s.check(
        "reflection of 2 - z1 - z2 is 2 z1 z2 - z1 - z2",
        (refl.coeff(1, 1) - Complex64::new(2.0, 0.0)).norm() == 0.0
            && (refl.coeff(1, 0) - Complex64::new(-1.0, 0.0)).norm() == 0.0
            && (refl.coeff(0, 1) - Complex64::new(-1.0, 0.0)).norm() == 0.0,
    );

    // Contact orders.
    let one = Complex64::new(1.0, 0.0);
    let ek = estimate_contact_order(&kappa, (one, one))?;
    s.check("contact order 2 at the (1,1) singularity of the degree-(1,1) example", ek.k == 2);
    let ea = estimate_contact_order(&amy, (one, one))?;
    s.check("contact order 4 at the (1,1) singularity of the degree-(2,1) example", ea.k == 4);

    // Coefficient closed form against the recurrence.
    let grid = taylor_coeffs(&kappa, 24, 24)?;
    let mut max_err: f64 = 0.0;
    for k in 0..=22usize {
        for l in 0..=(22 - k) {
            max_err = max_err
                .max((grid.a[k + 1][l + 1].re - kappa_coeff_closed_form(k, l)).abs());
        }
    }
    s.check("closed-form coefficients match the recurrence", max_err <= 1e-10);

    // Agler identity and diagonal property.
    let mut points = Vec::new();
    for _ in 0..100 {
        let mut pt = || {
            let r: f64 = rng.gen::<f64>();
            let t: f64 = rng.gen::<f64>();
            Complex64::from_polar(0.9 * r.sqrt(), 2.0 * std::f64::consts::PI * t)
        };
        points.push(((pt(), pt()), (pt(), pt())));
    }
    s.check(
        "refined kernel identity residual below 1e-10",
        birif::agler::refined_identity_residual(&points) < 1e-10,
    );
    let r = birif::agler::kappa_inner_reduction(4096)?;
    s.check(
        "reduced kernel integral equals pi/2 (flagged against the quoted 1/4)",
        (r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-6 && r.discrepancy,
    );

    // Divergence bracketing of the degree-(2,1) example around 5/4.
    let qgrid = QuadGrid::default();
    let lo = slice_norm(&amy, Var::Z1, 1, 1.2, &qgrid)?;
    let hi = slice_norm(&amy, Var::Z1, 1, 1.3, &qgrid)?;
    s.check(
        "slice norms bracket the 5/4 cutoff (finite at 1.2, divergent at 1.3)",
        lo.verdict == birif::Verdict::Finite && hi.verdict == birif::Verdict::Divergent,
    );

    // Douglas quadrature on monomials.
    let mut douglas_ok = true;
    for n in 1..=4u32 {
        let v = douglas_1d(|z| z.powu(n), 1.0, 512)?;
        douglas_ok &= (v - n as f64).abs() < 1e-3 * n as f64;
    }
    s.check("unweighted boundary quadrature reproduces the monomial norms", douglas_ok);

    // Blaschke lower bound on random configurations.
    let mut blaschke_ok = true;
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let zeros: Vec<Complex64> = (0..n)
            .map(|_| {
                let r: f64 = rng.gen::<f64>();
                let t: f64 = rng.gen::<f64>();
                Complex64::from_polar(0.95 * r.sqrt(), 2.0 * std::f64::consts::PI * t)
            })
            .collect();
        let distinct = zeros.iter().enumerate().all(|(i, a)| {
            zeros[..i].iter().all(|b| (a - b).norm() >= 1e-3)
        });
        if !distinct {
            continue;
        }
        for alpha in [0.5, 1.0, 1.5] {
            // The constant-free inequality fails for alpha < 1 (B(z) = z at
            // alpha = 1/2 gives 2/3 < 1); the Bergman point-evaluation
            // constant 2 - alpha restores it.
            let (lhs, rhs, _) = blaschke_lower_bound_check(&zeros, alpha, &qgrid)?;
            blaschke_ok &= lhs * (2.0 - alpha) >= rhs * (1.0 - 1e-6);
        }
    }
    s.check(
        "Blaschke derivative lower bound holds up to the Bergman constant",
        blaschke_ok,
    );

    // Norm-equivalence ratio of the fourfold boundary functional.
    let mut ratio_ok = true;
    for _ in 0..5 {
        let mut coeffs = Vec::new();
        for i in 0..=4u32 {
            for j in 0..=4u32 {
                coeffs.push((
                    (i, j),
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                ));
            }
        }
        let f = BiPoly::from_coeffs(coeffs)?;
        for alpha in [0.5, 1.0] {
            let quad = douglas_bidisc_weighted(&f, alpha, 40)?;
            let coeff_norm: f64 = f
                .iter()
                .map(|(&(i, j), c)| {
                    (i as f64 + 1.0).powf(alpha) * (j as f64 + 1.0).powf(alpha) * c.norm_sqr()
                })
                .sum();
            let ratio = quad / coeff_norm;
            ratio_ok &= (0.1..=10.0).contains(&ratio);
        }
    }
    s.check("fourfold boundary functional is norm-equivalent on random polynomials", ratio_ok);

    // Classification examples.
    let rep = classify(&kappa, &SpaceSpec::HigherOrder { m: 2, n: 1 })?;
    s.check(
        "degree-(1,1) example is excluded from the (2,1) higher-order space",
        rep.theoretical_verdict == birif::TheoreticalVerdict::NonMember && rep.agreement,
    );
    let rep = classify(&kappa, &SpaceSpec::BcgWeighted { alpha: 1.4 })?;
    s.check(
        "degree-(1,1) example is a member at alpha = 1.4 (cutoff 1.5)",
        rep.theoretical_verdict == birif::TheoreticalVerdict::Member && rep.agreement,
    );

    println!(
        "{}: {} failure(s)",
        if s.failures == 0 { "suite passed" } else { "suite failed" },
        s.failures
    );
    if s.failures > 0 {
        return Err(CliError::Verification);
    }
    Ok(())
}
