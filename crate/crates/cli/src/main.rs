//! Command-line front end: analyze a perturbation spec, verify predicted
//! cycles numerically, print the moment table, or reproduce the worked
//! examples with pinned parameters.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use eulertop::families;
use eulertop::melnikov::{self, melnikov_allspheres, trig_moment, BifurcationReport};
use eulertop::model::{casimir, hamiltonian, InertiaParams, State3};
use eulertop::perturbation::FieldSpec;
use eulertop::polynomial::{rat, rat_int};
use eulertop::specfile::SpecFile;
use eulertop::verifier::{casimir_drift, field_3d, find_cycle, integrate, IntegratorConfig};
use eulertop::PerturbedSystem;

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "EULERTOP_OUT";

const EXIT_OK: u8 = 0;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "eulertop",
    about = "Limit cycles of Casimir-preserving perturbations of the Euler top",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct CommonRun {
    /// Perturbation spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Sphere radius for tangent/cross-product specs (illegal for the
    /// semisphere kind, whose radius is intrinsic).
    #[arg(long)]
    c: Option<f64>,
    /// Override the third moment of inertia.
    #[arg(long)]
    mu3: Option<f64>,
    /// Output directory for CSV artifacts (default: $EULERTOP_OUT if set).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator relative tolerance.
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    /// Integrator absolute tolerance.
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Compute I(h) and the predicted bifurcation levels.
    Analyze {
        #[command(flatten)]
        common: CommonRun,
        /// Override the spec epsilon (bookkeeping only at this stage).
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Confirm predicted cycles by return-map iteration at each epsilon.
    Verify {
        #[command(flatten)]
        common: CommonRun,
        /// Comma-separated list of perturbation sizes; the default runs the
        /// halving study (eps, eps/2, eps/4).
        #[arg(long, value_delimiter = ',', default_value = "1e-3,5e-4,2.5e-4")]
        epsilon: Vec<f64>,
    },
    /// Print the exact trigonometric moment table.
    Moments {
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Reproduce a worked example with pinned parameters.
    Example {
        /// One of: example1, example2, corollary-m3 .. corollary-m7.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (e.g. `eulertop moments | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            common,
            epsilon,
            format,
        } => cmd_analyze(common, epsilon, format),
        Command::Verify { common, epsilon } => cmd_verify(common, epsilon),
        Command::Moments { max_degree, format } => cmd_moments(max_degree, format),
        Command::Example { name, out } => cmd_example(&name, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::numerical(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| Failure::numerical(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

struct LoadedSpec {
    system: PerturbedSystem,
    c: f64,
}

fn load_spec(common: &CommonRun, epsilon_override: Option<f64>) -> Result<LoadedSpec, Failure> {
    let text = fs::read_to_string(&common.spec)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", common.spec.display())))?;
    let mut file = SpecFile::from_json(&text).map_err(|e| Failure::invalid(e.to_string()))?;

    if common.c.is_some() && file.intrinsic_c().is_some() {
        return Err(Failure::invalid(
            "--c override is illegal for the semisphere kind: its radius is intrinsic",
        ));
    }
    if let Some(mu3) = common.mu3 {
        match &mut file {
            SpecFile::Semisphere { params, .. }
            | SpecFile::Tangent { params, .. }
            | SpecFile::CrossProduct { params, .. } => params.mu[2] = mu3,
        }
    }
    let mut system = file.build().map_err(|e| Failure::invalid(e.to_string()))?;
    if let Some(eps) = epsilon_override {
        system.epsilon = eps;
    }
    let c = file.intrinsic_c().or(common.c).unwrap_or(1.0);
    if !(c > 0.0) {
        return Err(Failure::invalid(format!(
            "sphere radius must be positive, got {c}"
        )));
    }
    Ok(LoadedSpec { system, c })
}

fn analyze_spec(
    system: &PerturbedSystem,
    c: f64,
) -> Result<(Option<melnikov::MelnikovPoly>, BifurcationReport), Failure> {
    match melnikov::analyze(&system.spec, &system.params, c) {
        Ok(pair) => Ok(pair),
        Err(melnikov::MelnikovError::IdenticallyZero) => Err(Failure {
            code: EXIT_INCONCLUSIVE,
            message: "I(h) = 0 identically: first-order analysis is inconclusive".into(),
        }),
        Err(e) => Err(Failure::numerical(e.to_string())),
    }
}

fn cmd_analyze(common: CommonRun, epsilon: Option<f64>, format: Format) -> Result<u8, Failure> {
    let loaded = load_spec(&common, epsilon)?;
    let (closed, report) = analyze_spec(&loaded.system, loaded.c)?;
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    if let Some(dir) = out_dir(common.out) {
        write_artifact(&dir, "bifurcation.csv", &report.to_csv())?;
        let curve = melnikov::sample_curve(
            &loaded.system.spec,
            &loaded.system.params,
            loaded.c,
            closed.as_ref(),
            400,
        )
        .map_err(|e| Failure::numerical(e.to_string()))?;
        let mut csv = String::from("h,i\n");
        for (h, i) in curve {
            csv.push_str(&format!("{h:.16e},{i:.16e}\n"));
        }
        write_artifact(&dir, "melnikov_curve.csv", &csv)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(common: CommonRun, epsilons: Vec<f64>) -> Result<u8, Failure> {
    let loaded = load_spec(&common, None)?;
    let (_, report) = analyze_spec(&loaded.system, loaded.c)?;
    print!("{}", report.to_text());
    if !report.roots.iter().any(|r| r.admissible) {
        println!("no admissible roots; nothing to verify");
    }

    let drift_cfg = IntegratorConfig {
        rtol: common.rtol,
        atol: common.atol,
        ..Default::default()
    };
    let cycle_cfg = IntegratorConfig::with_tol(common.rtol.min(1e-12), common.atol.min(1e-14));
    let mut csv = String::from("h_star,h_num,rho,epsilon,converged,casimir_drift,note\n");
    let out = out_dir(common.out);

    for root in &report.roots {
        for &eps in &epsilons {
            let mut row =
                |h_num: &str, rho: &str, converged: &str, drift: &str, note: &str| {
                    csv.push_str(&format!(
                        "{:.16e},{},{},{:.6e},{},{},{}\n",
                        root.h_star, h_num, rho, eps, converged, drift, note
                    ));
                };
            if !root.admissible {
                row("", "", "false", "", "skipped: admissibility");
                continue;
            }
            if !root.simple {
                row("", "", "false", "", "skipped: non-simple root");
                continue;
            }
            if !root.inside_disk {
                row("", "", "false", "", "skipped: oval outside disk");
                continue;
            }
            let sys = PerturbedSystem {
                epsilon: eps,
                ..loaded.system.clone()
            };
            match find_cycle(&sys, loaded.c, root.h_star, &cycle_cfg) {
                Ok(cycle) => {
                    let w = (loaded.c * loaded.c - cycle.x_star * cycle.x_star).sqrt();
                    let s0 = State3::new(cycle.x_star, 0.0, w);
                    let drift = casimir_drift(&sys, &s0, 100.0, &drift_cfg)
                        .map(|d| format!("{d:.3e}"))
                        .unwrap_or_else(|e| format!("failed: {e}"));
                    row(
                        &format!("{:.16e}", cycle.h_num),
                        &format!("{:.16e}", cycle.rho),
                        "true",
                        &drift,
                        &format!("{:?}", cycle.class),
                    );
                    if let Some(dir) = &out {
                        let traj = integrate(
                            field_3d(&sys),
                            s0.as_array(),
                            2.0 * cycle.period / w.max(1e-6),
                            &drift_cfg,
                        )
                        .map_err(|e| Failure::numerical(e.to_string()))?;
                        let mut tcsv = String::from("t,x1,x2,x3,H,D\n");
                        for (t, y) in traj.t.iter().zip(&traj.y) {
                            let s = State3::from_array(*y);
                            tcsv.push_str(&format!(
                                "{t:.10e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                                s.x1,
                                s.x2,
                                s.x3,
                                hamiltonian(&sys.params, &s),
                                casimir(&s)
                            ));
                        }
                        write_artifact(
                            dir,
                            &format!("cycle_h{:.4}_eps{:.1e}.csv", root.h_star, eps),
                            &tcsv,
                        )?;
                    }
                }
                Err(e) => row("", "", "false", "", &format!("failed: {e}")),
            }
        }
    }

    print!("{csv}");
    if let Some(dir) = &out {
        write_artifact(dir, "verify.csv", &csv)?;
    }
    Ok(EXIT_OK)
}

fn cmd_moments(max_degree: u32, format: Format) -> Result<u8, Failure> {
    match format {
        Format::Csv => {
            println!("i,j,numerator,denominator,value");
            for i in 0..=max_degree {
                for j in 0..=(max_degree - i) {
                    let m = trig_moment(i, j);
                    println!(
                        "{i},{j},{},{},{:.16e}",
                        m.rat_pi.numer(),
                        m.rat_pi.denom(),
                        m.value()
                    );
                }
            }
        }
        Format::Text => {
            println!("int sin^i cos^j dt over one period, for i + j <= {max_degree}");
            for i in 0..=max_degree {
                for j in 0..=(max_degree - i) {
                    let m = trig_moment(i, j);
                    if m.value() == 0.0 {
                        println!("  W({i},{j}) = 0");
                    } else {
                        println!(
                            "  W({i},{j}) = ({}/{}) pi = {:.12}",
                            m.rat_pi.numer(),
                            m.rat_pi.denom(),
                            m.value()
                        );
                    }
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn check(label: &str, ok: bool, failures: &mut usize) {
    if ok {
        println!("  [ok]   {label}");
    } else {
        println!("  [FAIL] {label}");
        *failures += 1;
    }
}

fn cmd_example(name: &str, out: Option<PathBuf>) -> Result<u8, Failure> {
    let mut failures = 0usize;
    match name {
        "example1" => example1(&mut failures)?,
        "example2" => example2(&mut failures, out)?,
        "corollary-m3" => corollary_zero(3, &mut failures)?,
        "corollary-m5" => corollary_zero(5, &mut failures)?,
        "corollary-m4" => corollary_bound(4, 1, &mut failures)?,
        "corollary-m6" => corollary_bound(6, 2, &mut failures)?,
        "corollary-m7" => corollary_m7(&mut failures)?,
        other => {
            return Err(Failure::invalid(format!(
                "unknown example '{other}'; expected example1, example2 or corollary-m3..m7"
            )))
        }
    }
    if failures == 0 {
        println!("all checks passed");
        Ok(EXIT_OK)
    } else {
        Err(Failure::numerical(format!("{failures} check(s) failed")))
    }
}

fn example1(failures: &mut usize) -> Result<(), Failure> {
    // alpha + beta > 0 branch: the rule asks for
    // 0 < mu3 < (beta - alpha) / (beta (alpha + beta)).
    let (alpha, beta) = (0.5, -0.25);
    let mu3 = 1.0;
    let params = InertiaParams::from_alpha_beta(alpha, beta, mu3)
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let c = 1.0;
    let mu3_cap = (beta - alpha) / (beta * (alpha + beta));
    println!(
        "field-independent family: alpha = {alpha}, beta = {beta}, c = {c}, mu3 = {mu3} (rule cap {mu3_cap})"
    );
    check("mu3 satisfies the admissibility rule", mu3 < mu3_cap, failures);

    let h_expect = alpha * beta * c * c / (beta - alpha);
    let mut rng = StdRng::seed_from_u64(101);
    for trial in 0..5 {
        let l1 = rat(rng.gen_range(1..9), rng.gen_range(1..4));
        let l2 = rat(rng.gen_range(-9..-1), rng.gen_range(1..4));
        let t = families::example1_field_padded(&l1, &l2, &mut rng)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        let m = melnikov_allspheres(t.a(), t.b(), &params, c)
            .map_err(|e| Failure::numerical(e.to_string()))?;
        let roots = m
            .body_roots()
            .map_err(|e| Failure::numerical(e.to_string()))?;
        let ok = roots.len() == 1
            && (roots[0].h - h_expect).abs() <= 1e-10 * h_expect.abs()
            && roots[0].simple;
        check(
            &format!("trial {trial}: unique root at alpha beta c^2/(beta-alpha) = {h_expect:.12}"),
            ok,
            failures,
        );
    }
    let t = families::example1_field(&rat_int(1), &rat_int(-1))
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let m = melnikov_allspheres(t.a(), t.b(), &params, c)
        .map_err(|e| Failure::numerical(e.to_string()))?;
    let report = m
        .admissible_levels()
        .map_err(|e| Failure::numerical(e.to_string()))?;
    print!("{}", report.to_text());
    check(
        "root passes the printed admissibility bound",
        report.roots.iter().any(|r| r.admissible),
        failures,
    );
    Ok(())
}

fn example2(failures: &mut usize, out: Option<PathBuf>) -> Result<(), Failure> {
    let setup = families::example2_admissible_search()
        .ok_or_else(|| Failure::numerical("parameter search found no admissible set"))?;
    let params = setup.params;
    let (alpha, beta) = (params.alpha(), params.beta());
    println!(
        "stabilization-style field: mu = {:?}, c = {}, k = 1, epsilon study at 1e-2, 5e-3, 2.5e-3",
        params.mu(),
        setup.c
    );
    let c_star = 2.0 * (beta / (alpha + beta)).sqrt();
    println!(
        "  alpha = {alpha}, beta = {beta}, c* = {c_star:.6}, chosen c = {}",
        setup.c
    );
    check(
        "alpha + beta < 0 branch with c > c*",
        alpha + beta < 0.0 && setup.c > c_star,
        failures,
    );

    let field =
        families::example2_field(setup.k.clone()).map_err(|e| Failure::invalid(e.to_string()))?;
    let m = melnikov_allspheres(field.a(), field.b(), &params, setup.c)
        .map_err(|e| Failure::numerical(e.to_string()))?;
    // I(h)/h is linear in h with root 2 alpha beta / (alpha + beta).
    let r = m.rational_coeffs();
    check("I(h)/h is linear in h", r.len() == 3, failures);
    let h_root = 2.0 * alpha * beta / (alpha + beta);
    let roots = m
        .body_roots()
        .map_err(|e| Failure::numerical(e.to_string()))?;
    check(
        &format!("unique simple root at 2 alpha beta/(alpha+beta) = {h_root:.12}"),
        roots.len() == 1 && (roots[0].h - h_root).abs() <= 1e-10 * h_root && roots[0].simple,
        failures,
    );

    let cycle_cfg = IntegratorConfig::with_tol(1e-12, 1e-14);
    let mut errors = Vec::new();
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let sys = PerturbedSystem::new(params, FieldSpec::Tangent(field.clone()), eps);
        let cycle = find_cycle(&sys, setup.c, setup.h_star, &cycle_cfg)
            .map_err(|e| Failure::numerical(e.to_string()))?;
        let (h_up, h_lo) = cycle.h_transverse;
        let spread = 0.5 * (h_up - h_lo).abs();
        println!(
            "  eps = {eps:.1e}: x* = {:.10}, h_num = {:.10}, h_up = {:.10}, h_lo = {:.10}, spread/2 = {:.3e}, rho = {:.8}, {:?}",
            cycle.x_star, cycle.h_num, h_up, h_lo, spread, cycle.rho, cycle.class
        );
        errors.push(((cycle.h_num - setup.h_star).abs(), spread));
    }
    for pair in errors.windows(2) {
        let ratio = pair[0].1 / pair[1].1;
        check(
            &format!("halving epsilon shrinks the cycle-level deviation by {ratio:.3} (within [1.6, 2.4])"),
            (1.6..=2.4).contains(&ratio),
            failures,
        );
    }
    if let Some(dir) = out {
        let spec_json =
            SpecFile::from_parts(&FieldSpec::Tangent(field), params.mu(), 1e-2).to_json();
        write_artifact(&dir, "example2_spec.json", &spec_json)?;
    }
    Ok(())
}

fn corollary_zero(m_deg: u32, failures: &mut usize) -> Result<(), Failure> {
    let params = InertiaParams::new(3.0, 2.0, 1.0).map_err(|e| Failure::invalid(e.to_string()))?;
    let mut rng = StdRng::seed_from_u64(900 + m_deg as u64);
    println!("homogeneous degree {m_deg} reducible cross-product fields integrate to zero");
    for trial in 0..20 {
        let spec = families::random_reducible_cross(m_deg, &mut rng);
        let t = spec.build().map_err(|e| Failure::invalid(e.to_string()))?;
        let m = melnikov_allspheres(t.a(), t.b(), &params, 1.0)
            .map_err(|e| Failure::numerical(e.to_string()))?;
        check(
            &format!("trial {trial}: I vanishes identically (exact)"),
            m.is_zero(),
            failures,
        );
    }
    Ok(())
}

fn corollary_bound(m_deg: u32, bound: usize, failures: &mut usize) -> Result<(), Failure> {
    let params = InertiaParams::new(3.0, 2.0, 1.0).map_err(|e| Failure::invalid(e.to_string()))?;
    let mut rng = StdRng::seed_from_u64(700 + m_deg as u64);
    println!("homogeneous degree {m_deg} fields: at most {bound} positive root(s)");
    for trial in 0..20 {
        let spec = families::random_reducible_cross(m_deg, &mut rng);
        let t = spec.build().map_err(|e| Failure::invalid(e.to_string()))?;
        let m = melnikov_allspheres(t.a(), t.b(), &params, 1.0)
            .map_err(|e| Failure::numerical(e.to_string()))?;
        if m.is_zero() {
            check(&format!("trial {trial}: degenerate (I = 0)"), true, failures);
            continue;
        }
        let roots = m
            .body_roots()
            .map_err(|e| Failure::numerical(e.to_string()))?;
        check(
            &format!("trial {trial}: {} root(s) within bound {bound}", roots.len()),
            roots.len() <= bound,
            failures,
        );
    }
    Ok(())
}

fn corollary_m7(failures: &mut usize) -> Result<(), Failure> {
    let params = InertiaParams::new(2.0, 4.0, 1.0).map_err(|e| Failure::invalid(e.to_string()))?;
    let c = 1.5;
    let h_expect = params.alpha() * params.beta() * c * c / (params.beta() - params.alpha());
    println!("field-independent root across random coefficient pairs: h* = {h_expect:.12}");
    let mut rng = StdRng::seed_from_u64(77);
    let mut seen: Vec<f64> = Vec::new();
    for trial in 0..5 {
        let l1 = rat(rng.gen_range(1..9), rng.gen_range(1..4));
        let l2 = rat(rng.gen_range(-9..-1), rng.gen_range(1..4));
        let t = families::example1_field_padded(&l1, &l2, &mut rng)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        let m = melnikov_allspheres(t.a(), t.b(), &params, c)
            .map_err(|e| Failure::numerical(e.to_string()))?;
        let roots = m
            .body_roots()
            .map_err(|e| Failure::numerical(e.to_string()))?;
        let ok = roots.len() == 1 && (roots[0].h - h_expect).abs() <= 1e-10 * h_expect.abs();
        check(&format!("trial {trial}: root matches"), ok, failures);
        if let Some(r) = roots.first() {
            seen.push(r.h);
        }
    }
    let spread = seen
        .iter()
        .fold(0.0f64, |acc, &h| acc.max((h - seen[0]).abs()));
    check(
        &format!("roots identical across fields (spread {spread:.2e})"),
        spread <= 1e-10 * h_expect.abs(),
        failures,
    );
    Ok(())
}
