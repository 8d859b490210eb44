//! Command-line front end: parameter validation, monitored simulations,
//! inequality verification, quadrature self-checks, and run reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use axireg_core::config::RunConfig;
use axireg_core::ensemble::{random_flow, EnsembleSpec};
use axireg_core::exponents::{
    check_serrin_scaling_gap, derived_ab, min_delta0, params_from_epsilon, validate_aq_window,
    validate_prop_i1, validate_prop_i3, validate_serrin, SerrinCondition, EPS_SUP,
};
use axireg_core::field::Field2D;
use axireg_core::functionals::eval_functionals;
use axireg_core::grid::CylGrid;
use axireg_core::monitor::{read_series, read_series_status, run, verdict};
use axireg_core::verifier::{
    estimate_aq_constant, i1_weight_exponent, verify_i1_chain, verify_i2_chain, verify_i3_chain,
    verify_sobolev_step, young, InequalityReport,
};

#[derive(Parser)]
#[command(name = "axireg", version, about = "Axisymmetric flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every exponent window and report margins as JSON.
    ValidateParams {
        /// Configuration file; flags below override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta0: Option<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        w: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        delta1: Option<f64>,
    },
    /// Run a monitored simulation and persist series, metadata, checkpoints.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Repeatable `section.key=value` overrides.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Verify the inequality chains on a seeded random ensemble and emit a
    /// JSON array of reports. Exits nonzero if an explicit-constant
    /// inequality fails.
    Verify {
        #[arg(long, default_value_t = 96)]
        grid_n: usize,
        #[arg(long, default_value_t = 6.0)]
        extent: f64,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta0: f64,
        #[arg(long, default_value_t = 2.0)]
        safety: f64,
    },
    /// Evaluate the tracked functionals on one seeded test flow at the
    /// given resolution and at a refined resolution, and report the
    /// relative quadrature differences.
    OracleQuadrature {
        #[arg(long, default_value_t = 128)]
        grid_n: usize,
        #[arg(long, default_value_t = 6.0)]
        extent: f64,
        #[arg(long, default_value_t = 4)]
        refine: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.05)]
        delta0: f64,
    },
    /// Summarize a finished run directory and print the verdict.
    Report {
        #[arg(long)]
        run: PathBuf,
        #[arg(long, default_value_t = false)]
        json: bool,
    },
}

#[derive(Serialize)]
struct WindowReport {
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    pass: bool,
    margin: f64,
}

impl WindowReport {
    fn open(name: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        WindowReport {
            name,
            value,
            lo,
            hi,
            pass: value > lo && value < hi,
            margin: (value - lo).min(hi - value),
        }
    }
}

#[derive(Serialize)]
struct ParamsReport {
    params: Option<axireg_core::exponents::CriterionParams>,
    windows: Vec<WindowReport>,
    violations: Vec<String>,
    pass: bool,
}

fn validate_params_report(
    eps: f64,
    delta0: f64,
    cond: &SerrinCondition,
) -> ParamsReport {
    let mut windows = vec![
        WindowReport::open("eps", eps, 0.0, EPS_SUP),
        WindowReport::open("delta0", delta0, min_delta0(eps).min(1.0 / 3.0), 1.0 / 3.0),
        WindowReport::open("serrin_s", cond.s, 1.5, f64::INFINITY),
        WindowReport::open("serrin_w", cond.w, 1.0, f64::INFINITY),
        WindowReport::open("serrin_d", cond.d, -1.0, 1.0),
        WindowReport::open("serrin_delta1", cond.delta1, 0.0, f64::INFINITY),
    ];
    let balance = 2.0 / cond.w + 3.0 / cond.s + cond.d - 1.0;
    windows.push(WindowReport {
        name: "serrin_balance",
        value: balance,
        lo: -1e-12,
        hi: 1e-12,
        pass: balance.abs() <= 1e-12,
        margin: 1e-12 - balance.abs(),
    });
    let mut violations: Vec<String> = Vec::new();
    let params = match params_from_epsilon(eps, delta0) {
        Ok(p) => Some(p),
        Err(e) => {
            violations.push(e.to_string());
            None
        }
    };
    if let Some(p) = &params {
        windows.push(WindowReport::open("gamma", p.gamma, 0.0, 3.0));
        windows.push(WindowReport::open("q", p.q, 2.0 / (4.0 - p.gamma), 2.0));
        windows.push(WindowReport::open("mu", p.mu, -1.0, 1.0));
        windows.push(WindowReport::open("a", p.a, 0.0, 1.0));
        windows.push(WindowReport::open(
            "a_radial_transport",
            p.a,
            (1.0 - (4.0 - p.gamma) * p.q * p.q * delta0 / (4.0 * (p.q - 1.0))).max(0.0),
            1.0,
        ));
        windows.push(WindowReport::open(
            "mu_radial_transport",
            p.mu,
            (p.q * delta0 - 1.0).max(-1.0),
            (p.q * delta0 + p.gamma / (4.0 - p.gamma)).min(1.0),
        ));
        windows.push(WindowReport::open(
            "alpha_weight_window",
            p.alpha,
            -2.0 + p.eps0,
            p.eps0,
        ));
        match check_serrin_scaling_gap(p) {
            Ok(gap) => windows.push(WindowReport::open(
                "scaling_gap",
                gap,
                f64::NEG_INFINITY,
                0.5 + 7.0 * eps,
            )),
            Err(e) => violations.push(e.to_string()),
        }
        let rep3 = validate_prop_i3(p);
        violations.extend(rep3.violations);
        let rep1 = validate_prop_i1(p, delta0);
        violations.extend(rep1.violations);
        if !validate_aq_window(p.q, p.alpha, p.eps0) {
            violations.push("weight window violated".to_string());
        }
    }
    let serrin_rep = validate_serrin(cond);
    violations.extend(serrin_rep.violations);
    let pass = violations.is_empty() && windows.iter().all(|w| w.pass);
    ParamsReport {
        params,
        windows,
        violations,
        pass,
    }
}

fn load_config(
    config: Option<&PathBuf>,
    overrides: &[String],
) -> Result<RunConfig, axireg_core::Error> {
    let mut cfg = match config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for ov in overrides {
        cfg.apply_override(ov)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::ValidateParams {
            config,
            eps,
            delta0,
            s,
            w,
            d,
            delta1,
        } => {
            let mut cfg = load_config(config.as_ref(), &[])?;
            if let Some(v) = eps {
                cfg.criterion.eps = v;
            }
            if let Some(v) = delta0 {
                cfg.criterion.delta0 = v;
            }
            if let Some(v) = s {
                cfg.serrin.s = v;
            }
            if let Some(v) = w {
                cfg.serrin.w = v;
            }
            if let Some(v) = d {
                cfg.serrin.d = v;
            }
            if let Some(v) = delta1 {
                cfg.serrin.delta1 = v;
            }
            let report = validate_params_report(
                cfg.criterion.eps,
                cfg.criterion.delta0,
                &cfg.serrin.to_condition(),
            );
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Simulate {
            config,
            overrides,
            seed,
            name,
            out_dir,
            t_end,
        } => {
            let mut cfg = load_config(config.as_ref(), &overrides)?;
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = name {
                cfg.monitor.name = v;
            }
            if let Some(v) = out_dir {
                cfg.monitor.out_dir = v;
            }
            if let Some(v) = t_end {
                cfg.solver.t_end = v;
            }
            let out = run(&cfg)?;
            let last = out.records.last().expect("runs always record t = 0");
            println!("run written to {}", out.dir.display());
            println!(
                "records: {}   t_final: {}   omega_q: {:.6e}   envelope: {:.6e}",
                out.records.len(),
                last.t,
                last.omega_q,
                last.gronwall_bound
            );
            println!("status: {}", out.meta.status);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            grid_n,
            extent,
            states,
            seed,
            eps,
            delta0,
            safety,
        } => {
            let grid = CylGrid::shared(extent, extent, grid_n, grid_n)?;
            let params = params_from_epsilon(eps, delta0)?;
            let cond = SerrinCondition {
                s: 6.0,
                w: 4.0,
                d: 0.0,
                delta1: 0.5,
            };
            let mut reports: Vec<InequalityReport> = Vec::new();

            // Scalar Young spot check at the equality point.
            reports.push(young(1.0, 1.0, 2.0, 2.0, 0.5)?);

            let eps0 = i1_weight_exponent(&params, delta0);
            let aq = estimate_aq_constant(&grid, params.q, params.alpha, eps0, states.max(8), seed + 1000)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = EnsembleSpec::default();
            for _ in 0..states {
                let flow = random_flow(&mut rng, &spec);
                let state = flow.sample(&grid, 0.0)?;
                reports.push(verify_i3_chain(&state, &params, 0.1, 0.1, 0.1)?);
                reports.push(verify_i1_chain(
                    &state, &params, delta0, 0.1, 0.1,
                    Some(&aq), safety,
                )?);
                reports.push(verify_i2_chain(
                    &state, &cond, params.q, params.alpha, 0.1, 0.1, safety,
                )?);
            }
            let gauss = Field2D::from_fn(&grid, |r, z| (-(r * r + z * z)).exp())?;
            reports.push(verify_sobolev_step(&gauss)?);

            println!("{}", serde_json::to_string_pretty(&reports)?);
            let explicit_failures = reports
                .iter()
                .filter(|r| r.fully_explicit() && !r.pass)
                .count();
            let other_failures = reports
                .iter()
                .filter(|r| !r.fully_explicit() && !r.pass && !r.inconclusive)
                .count();
            eprintln!(
                "checked {} reports: {} explicit-constant failures, {} empirical failures",
                reports.len(),
                explicit_failures,
                other_failures
            );
            Ok(if explicit_failures > 0 {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::OracleQuadrature {
            grid_n,
            extent,
            refine,
            seed,
            eps,
            delta0,
        } => {
            let params = params_from_epsilon(eps, delta0)?;
            let cond = SerrinCondition {
                s: 6.0,
                w: 4.0,
                d: 0.0,
                delta1: 0.5,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let flow = random_flow(&mut rng, &EnsembleSpec::default());
            let coarse_grid = CylGrid::shared(extent, extent, grid_n, grid_n)?;
            let fine_n = (grid_n - 1) * refine.max(2) + 1;
            let fine_grid = CylGrid::shared(extent, extent, fine_n, fine_n)?;
            let coarse = eval_functionals(&flow.sample(&coarse_grid, 0.0)?, &params, &cond)?;
            let fine = eval_functionals(&flow.sample(&fine_grid, 0.0)?, &params, &cond)?;
            let rows = [
                ("phi_p", coarse.phi_p, fine.phi_p),
                ("omega_q", coarse.omega_q, fine.omega_q),
                ("axis_phi", coarse.axis_phi, fine.axis_phi),
                ("axis_omega", coarse.axis_omega, fine.axis_omega),
                ("i1", coarse.i1, fine.i1),
                ("i2", coarse.i2, fine.i2),
                ("i3", coarse.i3, fine.i3),
                ("f_serrin", coarse.f_serrin, fine.f_serrin),
                ("g_ur", coarse.g_ur, fine.g_ur),
            ];
            println!(
                "{:<12} {:>18} {:>18} {:>12}",
                "functional", "grid", "refined", "rel diff"
            );
            for (name, c, f) in rows {
                let rel = if f != 0.0 { (c - f).abs() / f.abs() } else { (c - f).abs() };
                println!("{name:<12} {c:>18.10e} {f:>18.10e} {rel:>12.3e}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { run, json } => {
            let records = read_series(&run.join("series.csv"))?;
            let status = read_series_status(&run.join("series.csv"))?
                .unwrap_or_else(|| "unknown".to_string());
            let meta_text = std::fs::read_to_string(run.join("meta.json"))?;
            let meta: serde_json::Value = serde_json::from_str(&meta_text)?;
            let echo = &meta["config_echo"];
            let get = |k: &str| -> f64 {
                echo[k]
                    .as_str()
                    .and_then(|v| v.parse().ok())
                    .unwrap_or(f64::NAN)
            };
            let params = params_from_epsilon(get("criterion.eps"), get("criterion.delta0"))?;
            let cond = SerrinCondition {
                s: get("serrin.s"),
                w: get("serrin.w"),
                d: get("serrin.d"),
                delta1: get("serrin.delta1"),
            };
            let v = verdict(&records, &params, &cond);
            if json {
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                let last = records.last();
                println!("run: {}", run.display());
                println!("status: {status}   records: {}", records.len());
                if let Some(last) = last {
                    println!(
                        "t_final: {}   omega_q: {:.6e}   envelope: {:.6e}",
                        last.t, last.omega_q, last.gronwall_bound
                    );
                }
                let (a, b) = derived_ab(&cond);
                println!("balance exponents: a = {a:.6}, b = {b:.6}");
                for c in &v.checks {
                    println!(
                        "  [{}] {}: {}",
                        if c.pass { "pass" } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
                println!("verdict: {}", v.summary);
                println!("note: {}", v.external_note);
            }
            Ok(if v.conclusive && v.checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
