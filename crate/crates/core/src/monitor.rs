//! Trajectory monitoring: functional time series, envelope bounds, and
//! persistence.
//!
//! A run advances the solver, samples every tracked functional at a fixed
//! cadence, evaluates the discrete identity residuals across consecutive
//! samples, and writes `series.csv` plus `meta.json` and checkpoints. The
//! envelope constant is composed per run from the verified estimate chains
//! (explicit parts exact, empirical parts labeled) using the trajectory's
//! own sup norms.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{flatten, RunConfig};
use crate::error::{Error, Result};
use crate::exponents::{
    check_serrin_scaling_gap, params_from_epsilon, validate_aq_window, validate_prop_i1,
    validate_prop_i3, validate_serrin, CriterionParams, SerrinCondition,
};
use crate::field::weighted_lp;
use crate::functionals::{
    eval_functionals, eval_identity_d_terms, eval_identity_i_terms, main_identity_assembly,
    FunctionalSet, IdentityTerms,
};
use crate::grid::CylGrid;
use crate::solver::{step, SolverConfig};
use crate::state::AxisymState;
use crate::verifier::{
    coupling_chain_constant, estimate_aq_constant, i1_weight_exponent, inflow_chain_constants,
    radial_chain_constant, AqEstimate, ConstantUsed, Provenance,
};

/// One time sample of everything tracked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorRecord {
    pub t: f64,
    pub phi_p: f64,
    pub omega_q: f64,
    pub grad_phi: f64,
    pub grad_omega: f64,
    pub axis_phi: f64,
    pub axis_omega: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub f_serrin: f64,
    pub g_ur: f64,
    pub varpi: f64,
    pub r_ut_inf: f64,
    /// `∫|u_r/r^{1+alpha}|^q / Ω_q`, the tracked weighted-radial ratio.
    pub al_ratio: f64,
    pub identity_d_residual: f64,
    pub identity_i_residual: f64,
    pub bf_lhs: f64,
    pub bf_rhs: f64,
    pub gronwall_bound: f64,
    pub loglog_bound: f64,
}

pub const CSV_COLUMNS: [&str; 21] = [
    "t",
    "phi_p",
    "omega_q",
    "grad_phi",
    "grad_omega",
    "axis_phi",
    "axis_omega",
    "i1",
    "i2",
    "i3",
    "f_serrin",
    "g_ur",
    "varpi",
    "r_ut_inf",
    "al_ratio",
    "identity_d_residual",
    "identity_i_residual",
    "bf_lhs",
    "bf_rhs",
    "gronwall_bound",
    "loglog_bound",
];

impl MonitorRecord {
    fn as_row(&self) -> [f64; 21] {
        [
            self.t,
            self.phi_p,
            self.omega_q,
            self.grad_phi,
            self.grad_omega,
            self.axis_phi,
            self.axis_omega,
            self.i1,
            self.i2,
            self.i3,
            self.f_serrin,
            self.g_ur,
            self.varpi,
            self.r_ut_inf,
            self.al_ratio,
            self.identity_d_residual,
            self.identity_i_residual,
            self.bf_lhs,
            self.bf_rhs,
            self.gronwall_bound,
            self.loglog_bound,
        ]
    }

    fn from_row(v: &[f64]) -> MonitorRecord {
        MonitorRecord {
            t: v[0],
            phi_p: v[1],
            omega_q: v[2],
            grad_phi: v[3],
            grad_omega: v[4],
            axis_phi: v[5],
            axis_omega: v[6],
            i1: v[7],
            i2: v[8],
            i3: v[9],
            f_serrin: v[10],
            g_ur: v[11],
            varpi: v[12],
            r_ut_inf: v[13],
            al_ratio: v[14],
            identity_d_residual: v[15],
            identity_i_residual: v[16],
            bf_lhs: v[17],
            bf_rhs: v[18],
            gronwall_bound: v[19],
            loglog_bound: v[20],
        }
    }
}

/// The composed envelope constant with the provenance of each ingredient.
#[derive(Debug, Clone, Serialize)]
pub struct ComposedConstant {
    pub value: f64,
    pub parts: Vec<ConstantUsed>,
}

/// Compose the constant of the coupled differential inequality
/// `d/dt (Phi_p + Omega_q) <= C [1 + f + g] Omega_q`
/// from the three estimate chains, spending the dissipation coefficients of
/// the summed identities as the chain budgets.
pub fn compose_bf_constant(
    params: &CriterionParams,
    cond: &SerrinCondition,
    nu: f64,
    aq: &AqEstimate,
    aq_safety: f64,
    sobolev_safety: f64,
    sup_r_ut: f64,
    sup_varpi_eff: f64,
) -> Result<ComposedConstant> {
    let CriterionParams {
        p, q, mu, alpha, ..
    } = *params;
    let m1 = (p * (1.0 + mu)).max(2.0 * q);
    // Budgets carved out of the dissipation coefficients of the summed,
    // power-weighted identities.
    let e1_coupling = (p - 1.0) * nu * p / m1; // hits T_z <= (4/p^2) grad_phi
    let e2_coupling = p * nu * (1.0 - mu * mu) / (2.0 * m1);
    let e3_coupling = q * nu * (1.0 - alpha * alpha) / (3.0 * m1);
    let e4_radial = p * nu * (1.0 - mu * mu) / (2.0 * m1);
    let e5_radial = q * nu * (1.0 - alpha * alpha) / (3.0 * m1);
    let e1_inflow = nu * (1.0 + alpha) / 3.0;
    let e2_inflow = 4.0 * nu * (q - 1.0) / (q * q * (1.0 - alpha));

    let c13 = coupling_chain_constant(params, e1_coupling, e2_coupling, e3_coupling, sup_r_ut)?;
    let c1 = radial_chain_constant(
        params,
        params.delta0,
        e4_radial,
        e5_radial,
        aq,
        aq_safety,
        sup_varpi_eff,
    )?;
    let (c_f, c_g) = inflow_chain_constants(cond, e1_inflow, e2_inflow, sobolev_safety)?;
    let c2 = c_f.max(c_g);
    let value = m1 * (c13 + c1) + q * (1.0 - alpha) * c2;
    if !value.is_finite() {
        return Err(Error::ConstantOverflow {
            what: "compose_bf_constant",
            value,
        });
    }
    Ok(ComposedConstant {
        value,
        parts: vec![
            ConstantUsed::new_pub("identity_weight", m1, Provenance::Explicit),
            ConstantUsed::new_pub("coupling_chain", c13, Provenance::Explicit),
            ConstantUsed::new_pub("radial_chain", c1, Provenance::Empirical),
            ConstantUsed::new_pub("aq_weighted", aq.constant, Provenance::Empirical),
            ConstantUsed::new_pub("aq_safety", aq_safety, Provenance::Explicit),
            ConstantUsed::new_pub("inflow_chain", c2, Provenance::Literature),
            ConstantUsed::new_pub("sup_r_u_theta", sup_r_ut, Provenance::Explicit),
            ConstantUsed::new_pub("sup_varpi_eff", sup_varpi_eff, Provenance::Explicit),
        ],
    })
}

/// `t -> (phi0^p + omega0^q) * exp(C ∫_0^t [1+f+g])` by cumulative
/// trapezoid; monotone nondecreasing, equal to the initial value at `t = 0`.
pub fn gronwall_bound(
    times: &[f64],
    one_plus_fg: &[f64],
    phi0_norm: f64,
    omega0_norm: f64,
    p: f64,
    q: f64,
    c: f64,
) -> Vec<f64> {
    assert_eq!(times.len(), one_plus_fg.len());
    assert!(one_plus_fg.iter().all(|&v| v >= 0.0));
    let y0 = phi0_norm.powf(p) + omega0_norm.powf(q);
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for k in 0..times.len() {
        if k > 0 {
            let dt = times[k] - times[k - 1];
            acc += 0.5 * (one_plus_fg[k] + one_plus_fg[k - 1]) * dt;
        }
        out.push(y0 * (c * acc).exp());
    }
    out
}

/// Double-logarithmic envelope: integrate
/// `d/dt ln[1 + ln^+ Y] <= C (1 + f_tilde)` where
/// `f_tilde = f / (1 + ln^+ Y)`. While the bound variable sits at or below
/// 1 the log is inactive (`ln^+ = 0`, `f_tilde = f`) and the step reduces to
/// the plain exponential bound.
pub fn loglog_gronwall(times: &[f64], f_tilde: &[f64], y0: f64, c: f64) -> Vec<f64> {
    assert_eq!(times.len(), f_tilde.len());
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0.max(0.0);
    out.push(y);
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        let m = c * (1.0 + 0.5 * (f_tilde[k] + f_tilde[k - 1]));
        if y <= 1.0 {
            y *= (m * dt).exp();
        } else {
            let l = (1.0 + y.ln()).ln() + m * dt;
            y = (l.exp() - 1.0).exp();
        }
        out.push(y);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub config_echo: std::collections::BTreeMap<String, String>,
    pub envelope_constant: ComposedConstant,
    pub aq_estimate: AqEstimate,
    pub status: String,
}

#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<MonitorRecord>,
    pub meta: RunMeta,
    pub dir: PathBuf,
}

struct TickData {
    functionals: FunctionalSet,
    t: f64,
    al_ratio: f64,
    d_terms: Option<IdentityTerms>,
    i_terms: Option<IdentityTerms>,
}

/// Drive a full monitored simulation and persist it under
/// `<out_dir>/<name>/`.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = CylGrid::shared(cfg.grid.r_max, cfg.grid.z_half, cfg.grid.n_r, cfg.grid.n_z)?;
    let params = params_from_epsilon(cfg.criterion.eps, cfg.criterion.delta0)?;
    let cond = cfg.serrin.to_condition();
    let serrin_report = validate_serrin(&cond);
    if !serrin_report.pass {
        return Err(Error::Config(format!(
            "invalid [serrin] section: {:?}",
            serrin_report.violations
        )));
    }
    let solver_cfg: SolverConfig = cfg.solver.to_solver_config();
    solver_cfg.validate()?;
    if cfg.monitor.cadence == 0 {
        return Err(Error::Config("monitor.cadence must be positive".into()));
    }

    let dir = cfg.monitor.out_dir.join(&cfg.monitor.name);
    fs::create_dir_all(&dir)?;

    // Calibrate the empirical weighted-estimate constant for this run.
    let eps0_used = i1_weight_exponent(&params, params.delta0);
    let aq = estimate_aq_constant(
        &grid,
        params.q,
        params.alpha,
        eps0_used,
        cfg.monitor.calibration_states.max(8),
        cfg.seed,
    )?;

    let initial = cfg.initial.to_initial_data()?;
    let state0 = initial.build(&grid, &solver_cfg)?;
    crate::checkpoint::write_checkpoint(&dir.join("checkpoint_initial.axrg"), &state0)?;

    let n_steps = (solver_cfg.t_end / solver_cfg.dt).round() as usize;
    let delta_eff = params.q * (eps0_used - params.kappa) / params.p;

    let mut ticks: Vec<TickData> = Vec::new();
    let mut sup_r_ut: f64 = 0.0;
    let mut sup_varpi_eff: f64 = 0.0;
    let mut prev_tick_state = state0.clone();
    let mut state = state0;
    let mut failure: Option<Error> = None;

    let record_tick = |state: &AxisymState,
                           prev: Option<&AxisymState>,
                           ticks: &mut Vec<TickData>,
                           sup_r_ut: &mut f64,
                           sup_varpi_eff: &mut f64|
     -> Result<()> {
        let functionals = eval_functionals(state, &params, &cond)?;
        *sup_r_ut = sup_r_ut.max(functionals.r_ut_inf);
        *sup_varpi_eff = sup_varpi_eff.max(state.u_theta.sup_r_weighted(1.0 - delta_eff));
        let radial_q = weighted_lp(&state.u_r, 1.0 + params.alpha, params.q)?;
        let al_ratio = if functionals.omega_q > 0.0 {
            radial_q / functionals.omega_q
        } else {
            0.0
        };
        let (d_terms, i_terms) = match prev {
            Some(prev) => (
                Some(eval_identity_d_terms(prev, state, &params, solver_cfg.nu)?),
                Some(eval_identity_i_terms(prev, state, &params, solver_cfg.nu)?),
            ),
            None => (None, None),
        };
        ticks.push(TickData {
            functionals,
            t: state.t,
            al_ratio,
            d_terms,
            i_terms,
        });
        Ok(())
    };

    record_tick(&state, None, &mut ticks, &mut sup_r_ut, &mut sup_varpi_eff)?;
    'steps: for k in 1..=n_steps {
        match step(&state, &solver_cfg) {
            Ok(next) => state = next,
            Err(e) => {
                failure = Some(e);
                break 'steps;
            }
        }
        if k % cfg.monitor.cadence == 0 || k == n_steps {
            record_tick(
                &state,
                Some(&prev_tick_state),
                &mut ticks,
                &mut sup_r_ut,
                &mut sup_varpi_eff,
            )?;
            prev_tick_state = state.clone();
        }
    }

    let envelope = compose_bf_constant(
        &params,
        &cond,
        solver_cfg.nu,
        &aq,
        2.0,
        2.0,
        sup_r_ut.max(1e-300),
        sup_varpi_eff.max(1e-300),
    )?;

    // Assemble records with the post-pass envelope columns.
    let times: Vec<f64> = ticks.iter().map(|t| t.t).collect();
    let one_plus_fg: Vec<f64> = ticks
        .iter()
        .map(|t| 1.0 + t.functionals.f_serrin + t.functionals.g_ur)
        .collect();
    let phi0_norm = ticks[0].functionals.phi_p.powf(1.0 / params.p);
    let omega0_norm = ticks[0].functionals.omega_q.powf(1.0 / params.q);
    let bound = gronwall_bound(
        &times,
        &one_plus_fg,
        phi0_norm,
        omega0_norm,
        params.p,
        params.q,
        envelope.value,
    );
    let y_series: Vec<f64> = ticks
        .iter()
        .map(|t| t.functionals.phi_p + t.functionals.omega_q)
        .collect();
    let f_tilde: Vec<f64> = ticks
        .iter()
        .zip(&y_series)
        .map(|(t, &y)| t.functionals.f_serrin / (1.0 + y.ln().max(0.0)))
        .collect();
    let loglog = loglog_gronwall(&times, &f_tilde, y_series[0], envelope.value);

    let records: Vec<MonitorRecord> = ticks
        .iter()
        .enumerate()
        .map(|(k, tick)| {
            let f = &tick.functionals;
            let (bf_lhs, d_res, i_res) = match (&tick.d_terms, &tick.i_terms) {
                (Some(d), Some(i)) => (
                    params.p * (d.rate + d.dissipation_grad)
                        + d.dissipation_axis
                        + params.q * (i.rate + i.dissipation_grad)
                        + i.dissipation_axis,
                    d.residual,
                    i.residual,
                ),
                _ => (0.0, 0.0, 0.0),
            };
            MonitorRecord {
                t: tick.t,
                phi_p: f.phi_p,
                omega_q: f.omega_q,
                grad_phi: f.grad_phi,
                grad_omega: f.grad_omega,
                axis_phi: f.axis_phi,
                axis_omega: f.axis_omega,
                i1: f.i1,
                i2: f.i2,
                i3: f.i3,
                f_serrin: f.f_serrin,
                g_ur: f.g_ur,
                varpi: f.varpi,
                r_ut_inf: f.r_ut_inf,
                al_ratio: tick.al_ratio,
                identity_d_residual: d_res,
                identity_i_residual: i_res,
                bf_lhs,
                bf_rhs: envelope.value * one_plus_fg[k] * f.omega_q,
                gronwall_bound: bound[k],
                loglog_bound: loglog[k],
            }
        })
        .collect();

    let status = match &failure {
        None => "ok".to_string(),
        Some(e) => format!("error: {e}"),
    };
    write_series(&dir.join("series.csv"), &records, &status)?;
    let meta = RunMeta {
        config_echo: flatten(cfg),
        envelope_constant: envelope,
        aq_estimate: aq,
        status: status.clone(),
    };
    fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    crate::checkpoint::write_checkpoint(&dir.join("checkpoint_final.axrg"), &state)?;

    match failure {
        Some(e) => Err(e),
        None => Ok(RunOutput {
            records,
            meta,
            dir,
        }),
    }
}

/// Write the series with a header row and a terminal status comment.
/// Floats use the shortest round-trip representation, so re-reading
/// reproduces every column bit-exactly.
pub fn write_series(path: &Path, records: &[MonitorRecord], status: &str) -> Result<()> {
    let mut text = String::new();
    text.push_str(&CSV_COLUMNS.join(","));
    text.push('\n');
    for rec in records {
        let row: Vec<String> = rec.as_row().iter().map(|v| format!("{v}")).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text.push_str(&format!("# status: {status}\n"));
    fs::write(path, text)?;
    Ok(())
}

pub fn read_series(path: &Path) -> Result<Vec<MonitorRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty series file".to_string()))?;
    if header != CSV_COLUMNS.join(",") {
        return Err(Error::Config(format!("unexpected series header {header:?}")));
    }
    let mut out = Vec::new();
    for line in lines {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>().map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<_>>()?;
        if vals.len() != CSV_COLUMNS.len() {
            return Err(Error::Config(format!(
                "row has {} columns, expected {}",
                vals.len(),
                CSV_COLUMNS.len()
            )));
        }
        out.push(MonitorRecord::from_row(&vals));
    }
    Ok(out)
}

/// Read back the terminal status comment of a series file.
pub fn read_series_status(path: &Path) -> Result<Option<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .rev()
        .find(|l| l.starts_with("# status:"))
        .map(|l| l.trim_start_matches("# status:").trim().to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Structured end-of-run assessment. It reports numerical consistency of
/// the tracked hypotheses; the regularity conclusion itself rests on an
/// external criterion and is never claimed here.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub conclusive: bool,
    pub checks: Vec<VerdictCheck>,
    pub summary: String,
    pub external_note: &'static str,
}

pub const EXTERNAL_NOTE: &str =
    "final regularity step invokes an external criterion; reported, not verified here";

pub fn verdict(
    records: &[MonitorRecord],
    params: &CriterionParams,
    cond: &SerrinCondition,
) -> Verdict {
    if records.is_empty() {
        return Verdict {
            conclusive: false,
            checks: Vec::new(),
            summary: "inconclusive: empty trajectory".to_string(),
            external_note: EXTERNAL_NOTE,
        };
    }
    let mut checks = Vec::new();

    // Parameter windows.
    let rep3 = validate_prop_i3(params);
    let rep1 = validate_prop_i1(params, params.delta0);
    let aq_ok = validate_aq_window(params.q, params.alpha, params.eps0);
    let serrin_rep = validate_serrin(cond);
    let windows_ok = rep3.pass && rep1.pass && aq_ok && serrin_rep.pass;
    checks.push(VerdictCheck {
        name: "parameter_windows",
        pass: windows_ok,
        detail: if windows_ok {
            "all exponent windows hold".to_string()
        } else {
            let mut all = rep3.violations;
            all.extend(rep1.violations);
            if !aq_ok {
                all.push(format!(
                    "alpha = {} outside the weight window ({}, {})",
                    params.alpha,
                    -2.0 + params.eps0,
                    params.eps0
                ));
            }
            all.extend(serrin_rep.violations);
            all.join("; ")
        },
    });

    // Envelope tracking.
    let mut worst = f64::INFINITY;
    let mut envelope_ok = true;
    for r in records {
        let slack = r.gronwall_bound * (1.0 + 1e-12) + 1e-300 - r.omega_q;
        if slack < worst {
            worst = slack;
        }
        if slack < 0.0 {
            envelope_ok = false;
        }
    }
    checks.push(VerdictCheck {
        name: "gronwall_envelope",
        pass: envelope_ok,
        detail: format!("smallest bound margin {worst:e}"),
    });

    // Weighted radial ratio: finite and without wild excursions.
    let ratios: Vec<f64> = records
        .iter()
        .map(|r| r.al_ratio)
        .filter(|v| *v > 0.0)
        .collect();
    let ratio_ok;
    let ratio_detail;
    if ratios.iter().any(|v| !v.is_finite()) {
        ratio_ok = false;
        ratio_detail = "non-finite ratio".to_string();
    } else if ratios.is_empty() {
        ratio_ok = true;
        ratio_detail = "ratio identically zero (degenerate flow)".to_string();
    } else {
        let mut sorted = ratios.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        let max = *sorted.last().unwrap();
        ratio_ok = max <= 5.0 * median;
        ratio_detail = format!("max {max:.6e}, median {median:.6e}");
    }
    checks.push(VerdictCheck {
        name: "weighted_radial_ratio",
        pass: ratio_ok,
        detail: ratio_detail,
    });

    // Scaling gap.
    let gap = check_serrin_scaling_gap(params);
    checks.push(VerdictCheck {
        name: "scaling_gap",
        pass: gap.is_ok(),
        detail: match &gap {
            Ok(v) => format!("3/q - 1 - alpha = {v:.6}"),
            Err(e) => e.to_string(),
        },
    });

    let all_pass = checks.iter().all(|c| c.pass);
    Verdict {
        conclusive: true,
        summary: if all_pass {
            "criterion hypotheses numerically consistent".to_string()
        } else {
            let first = checks.iter().find(|c| !c.pass).unwrap();
            format!("violated: {} ({})", first.name, first.detail)
        },
        checks,
        external_note: EXTERNAL_NOTE,
    }
}

/// Two assemblies of the combined identity from a record's own columns; the
/// monitor's bookkeeping invariant is that both routes agree to rounding.
pub fn bf_bookkeeping_gap(d: &IdentityTerms, i: &IdentityTerms) -> f64 {
    let (a, b) = main_identity_assembly(d, i);
    (a - b).abs()
}
