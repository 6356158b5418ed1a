use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mobius_core::band::{self, BandError, ConePatch, SearchConfig, Tolerances};
use mobius_core::certs::{all_certificates, CertReport};
use mobius_core::exactnum::{parse_rational, PRECISION_CAP_ENV};
use mobius_core::{lambda, region, Rational};
use serde_json::{json, Value};

/// Certified bounds and band analysis for polygonal paper Moebius bands.
///
/// Exit status: 0 when every check passes, 1 when a certificate or check
/// fails, 2 on usage or input errors.
#[derive(Parser, Debug)]
#[command(name = "mobius", version)]
struct Cli {
    /// Seed for randomized steps (generic perturbation, search restarts).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Floating-point tolerance for closure and band checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Directory for JSON reports and exported files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the certificate suite.
    Verify {
        /// Run only the certificates with these ids (repeatable).
        #[arg(long)]
        only: Vec<String>,
    },
    /// Plot the slope region and check its trapezoid certificate.
    Region {
        /// Grid points per axis.
        #[arg(long, default_value_t = 60)]
        resolution: usize,
    },
    /// Enclose the lower bound λ₁ and the critical parameter t₀.
    Lambda1 {
        /// Enclosure width, as a decimal, scientific or p/q rational.
        #[arg(long, default_value = "1e-12")]
        width: String,
        /// Largest working precision in bits for interval evaluation.
        #[arg(long, env = "MOBIUS_PRECISION_CAP")]
        precision_cap: Option<u32>,
    },
    /// Band engine commands.
    Band {
        #[command(subcommand)]
        command: BandCommand,
    },
    /// Polygonal approximation of a cone-patch strip.
    Approx {
        /// Mesh sizes (number of trapezoids).
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        n: Vec<usize>,
        /// Half-angle of the cone.
        #[arg(long, default_value_t = 0.3)]
        half_angle: f64,
    },
}

#[derive(Subcommand, Debug)]
enum BandCommand {
    /// Fold a band spec and run invariants, locus, and T-pattern analysis.
    Analyze { spec: PathBuf },
    /// Search for a flat-folded half strip ending in a T-pattern with short boundary.
    Search {
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Target for the boundary length L + R.
        #[arg(long, default_value_t = 1.72)]
        target: f64,
    },
}

struct Failure(u8, String);

impl From<BandError> for Failure {
    fn from(e: BandError) -> Self {
        Failure(2, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

/// Write through a temporary file so readers never see a partial report.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure(2, format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, dir.join(name)).map_err(io)
}

fn emit(out: &Option<PathBuf>, name: &str, value: &Value) -> Result<(), Failure> {
    match out {
        Some(dir) => write_atomic(dir, name, &(serde_json::to_string_pretty(value).expect("json") + "\n")),
        None => Ok(()),
    }
}

fn status(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure(1, "some checks failed".into()))
    }
}

fn verify(cli: &Cli, only: &[String]) -> Result<(), Failure> {
    let all = all_certificates();
    if let Some(bad) = only.iter().find(|id| !all.iter().any(|(k, _)| k == id)) {
        let ids: Vec<&str> = all.iter().map(|(k, _)| *k).collect();
        return Err(usage(format!("unknown certificate `{bad}` (known: {})", ids.join(", "))));
    }
    let chosen: Vec<_> = all.into_iter().filter(|(k, _)| only.is_empty() || only.iter().any(|o| o == k)).collect();
    let mut ok = true;
    std::thread::scope(|s| -> Result<(), Failure> {
        let handles: Vec<_> = chosen.iter().map(|(id, f)| (*id, s.spawn(f))).collect();
        let stdout = std::io::stdout();
        for (id, h) in handles {
            let report: CertReport = h.join().map_err(|_| Failure(1, format!("{id}: certificate panicked")))?;
            ok &= report.is_verified();
            emit(&cli.out, &format!("{id}.json"), &serde_json::to_value(&report).expect("json"))?;
            let mut lock = stdout.lock();
            let _ = write!(lock, "{report}");
        }
        Ok(())
    })?;
    status(ok)
}

fn region_cmd(cli: &Cli, resolution: usize) -> Result<(), Failure> {
    if resolution < 2 {
        return Err(usage("resolution must be at least 2"));
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| usage(e.to_string()))?;
    let path = dir.join("omega.svg");
    let plot = region::plot_omega(resolution, &path).map_err(|e| Failure(1, e.to_string()))?;
    println!("wrote {} ({} of {} samples inside Ω)", path.display(), plot.inside.len(), plot.samples);
    let cert = region::trapezoid_certificate();
    print!("{cert}");
    emit(&cli.out, "trapezoid.json", &serde_json::to_value(&cert).expect("json"))?;
    status(cert.is_verified() && region::sampled_signs_ok(&plot.inside))
}

fn lambda1_cmd(cli: &Cli, width: &str, cap: Option<u32>) -> Result<(), Failure> {
    let w = parse_rational(width)
        .filter(|r: &Rational| r > &Rational::from_integer(0.into()))
        .ok_or_else(|| usage(format!("bad width `{width}`")))?;
    if let Some(bits) = cap {
        // interval evaluation reads the cap from the environment
        std::env::set_var(PRECISION_CAP_ENV, bits.to_string());
    }
    let r = lambda::lambda1(&w).map_err(|e| Failure(1, e.to_string()))?;
    println!("λ₁ ∈ {}", r.lambda1);
    println!("t₀ ∈ {}", r.t0);
    print!("{}", r.certificate);
    emit(&cli.out, "lambda1.json", &serde_json::to_value(&r).expect("json"))?;
    status(r.certificate.is_verified())
}

fn analyze(cli: &Cli, spec_path: &Path) -> Result<(), Failure> {
    let spec = band::parse_band_spec(spec_path)?;
    let dihedrals = spec.dihedrals.clone().ok_or_else(|| usage("the spec has no dihedrals to fold with"))?;
    let e = band::fold(&spec.flat, &dihedrals)?;
    let tol = cli.tolerance;
    let signs: Vec<i32> = spec.flat.signs().iter().map(|&s| s as i32).collect();
    let closure = e.closure_residual();
    println!("λ = {:.12}, {} triangles", e.lambda(), e.n_triangles());
    println!("sign sequence: {signs:?}");
    println!("closure residual {closure:.3e}, isometry residual {:.3e}", e.isometry_residual());
    let mut report = json!({
        "lambda": e.lambda(),
        "triangles": e.n_triangles(),
        "signs": signs,
        "closure_residual": closure,
        "gluing_residual": e.gluing_residual(),
        "isometry_residual": e.isometry_residual(),
        "max_distortion": e.max_distortion(),
    });
    if let Some(dir) = &cli.out {
        write_atomic(dir, "band.obj", &band::to_obj(&e))?;
    }
    if closure > tol {
        println!("the folded strip does not close: no band analysis");
        emit(&cli.out, "band.json", &report)?;
        return status(false);
    }
    let mut ok = true;
    let ridge = band::ridge_curve(&e, tol)?;
    let rr = band::ridge_invariant_report(&ridge, e.lambda());
    let cert = rr.to_cert_report(tol);
    ok &= cert.is_verified();
    print!("{cert}");
    report["ridge"] = serde_json::to_value(&rr).expect("json");
    if let Some(dir) = &cli.out {
        let core = band::core_curve(&e, tol)?;
        write_atomic(dir, "core.csv", &band::to_csv(&core))?;
        write_atomic(dir, "ridge.csv", &band::to_csv(&ridge.vertices))?;
        write_atomic(dir, "curves.svg", &band::to_svg(&[("black", &ridge.vertices), ("steelblue", &core)], 400.0))?;
    }

    let (generic, perturbed) = match band::check_genericity(&e) {
        Ok(()) => (e.clone(), false),
        Err(_) => (band::perturb_to_generic(&e, 1e-6, cli.seed)?, true),
    };
    let locus = band::perp_pair_locus(&generic)?;
    println!(
        "perpendicular-pair locus: {} components, {} essential, invariant essential component: {}{}",
        locus.components.len(),
        locus.essential_count(),
        locus.has_invariant_essential(),
        if perturbed { " (after a generic perturbation)" } else { "" }
    );
    report["locus"] = json!({
        "perturbed": perturbed,
        "components": locus.components.len(),
        "essential": locus.essential_count(),
        "invariant_essential": locus.has_invariant_essential(),
    });
    let tols = Tolerances { closure: tol, gluing: tol, ..Tolerances::default() };
    match band::find_t_pattern(&generic, &locus, &tols) {
        Ok(tp) => {
            for w in &tp.warnings {
                println!("warning: {w}");
            }
            let m = band::measure_t_pattern(&generic, &tp)?;
            let cert = m.to_cert_report();
            ok &= cert.is_verified();
            let mm = &m.measurements;
            println!(
                "T-pattern: B = {:.9}, T = {:.9}, b = {:.9}, t = {:.9}, S₁ = {:.9}, S₂ = {:.9}",
                mm.big_b,
                mm.big_t,
                mm.b,
                mm.t,
                mm.s(1),
                mm.s(2)
            );
            print!("{cert}");
            let mut tjson = serde_json::to_value(&m).expect("json");
            tjson["pattern"] = serde_json::to_value(&tp).expect("json");
            tjson["certificate"] = serde_json::to_value(&cert).expect("json");
            if region::omega_member_f64(mm.b, mm.t) {
                let z = band::zero_slope_bends(&m);
                println!("(b, t) ∈ Ω: {} zero-slope bends", z.count);
                ok &= z.count >= 2;
                tjson["zero_slope"] = serde_json::to_value(&z).expect("json");
            }
            report["t_pattern"] = tjson;
        }
        Err(BandError::NotFound(why)) => {
            println!("no T-pattern found: {why}");
            report["t_pattern"] = Value::Null;
        }
        Err(e) => return Err(e.into()),
    }
    emit(&cli.out, "band.json", &report)?;
    status(ok)
}

fn search_cmd(cli: &Cli, steps: usize, restarts: usize, target: f64) -> Result<(), Failure> {
    if steps == 0 || restarts == 0 {
        return Err(usage("steps and restarts must be positive"));
    }
    let cfg = SearchConfig { steps, restarts, seed: cli.seed, s_target: target, ..SearchConfig::default() };
    let r = band::search_half_strip(&cfg);
    println!(
        "best restart {}: L + R = {:.9}, B = {:.6}, T = {:.6}, residual {:.3e}",
        r.seed,
        r.score.s,
        r.score.big_b,
        r.score.big_t,
        r.score.residual()
    );
    emit(&cli.out, "search.json", &serde_json::to_value(&r).expect("json"))?;
    status(r.objective <= cli.tolerance)
}

fn approx_cmd(cli: &Cli, ns: &[usize], half_angle: f64) -> Result<(), Failure> {
    if ns.iter().any(|&n| n < 1) {
        return Err(usage("mesh sizes must be positive"));
    }
    let cone = ConePatch { half_angle, ..ConePatch::default() };
    let mut rows = Vec::new();
    for &n in ns {
        let a = cone.approximate(n)?;
        println!(
            "n = {n:3}: K = {:.9}, max distance {:.3e}, max tilt {:.3e}, lemma constant {:.9}",
            a.k,
            a.proximity.unwrap_or(0.0),
            a.tangent_angle.unwrap_or(0.0),
            a.lemma_constant()
        );
        rows.push(json!({
            "n": n,
            "k": a.k,
            "proximity": a.proximity,
            "tangent_angle": a.tangent_angle,
            "lemma_constant": a.lemma_constant(),
        }));
    }
    let decreasing = rows.windows(2).all(|w| w[1]["k"].as_f64() < w[0]["k"].as_f64());
    println!("K strictly decreasing: {decreasing}");
    emit(&cli.out, "approx.json", &json!({ "half_angle": half_angle, "meshes": rows }))?;
    status(decreasing)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Verify { only } => verify(cli, only),
        Command::Region { resolution } => region_cmd(cli, *resolution),
        Command::Lambda1 { width, precision_cap } => lambda1_cmd(cli, width, *precision_cap),
        Command::Band { command: BandCommand::Analyze { spec } } => analyze(cli, spec),
        Command::Band { command: BandCommand::Search { steps, restarts, target } } => {
            search_cmd(cli, *steps, *restarts, *target)
        }
        Command::Approx { n, half_angle } => approx_cmd(cli, n, *half_angle),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
