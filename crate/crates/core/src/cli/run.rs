//! Mode dispatch. Each mode turns a [`Resolved`] config into an [`Output`].
//!
//! CSV columns, in order:
//!
//! | mode | columns |
//! |------|---------|
//! | params | `omega0_radns,omega_eff_up_radns,omega_eff_down_radns,omega_up_radns,omega_down_radns,omega_up_ghz,r_up,r_down,r,n_bar,theta_up,theta_down,stability_margin_radns,validity_ratio,validity_warning` |
//! | sweep-field | `field_T,r,n_bar,omega_up_radns,stable` |
//! | coherence | `r,phi,time_ns,sigma_x,p_plus` |
//! | fisher | `r,phi,fisher` |
//! | mle-sim | `r,n_bar,phi_true,shots,batches,mean,empirical_variance,fisher,crlb,variance_ratio,bias,bias_standard_error,skewness,excess_kurtosis` |
//! | qsl-check | `r,n_bar,fisher_q_radns2,min_margin,holds` |
//! | adaptive-search | `stage,r,n_bar,shots,recurrence,window_lo_radns,window_hi_radns,peak_time_ns,likelihood_ratio,localized,omega_hat_radns,sigma_omega_radns` |

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::config::{Mode, Physics, Resolved, Schedule};
use super::emit::{meta, render, to_value, Cell, CsvTable, Output};
use super::CliError;
use crate::adaptive::{adaptive_search, AdaptiveConfig, AdaptiveError, StagePlan, StageReport};
use crate::dynamics::{qsl_margin, quantum_fisher, sigma_x_trace};
use crate::inference::{
    dephased_readout, estimator_study, fisher_asymptote, fisher_profile, readout, Dephasing, FisherProfile,
};
use crate::model::{check_stability, derive_quantities, nonlinearity_validity, radns_to_ghz, sweep_field};
use crate::model::DEFAULT_VALIDITY_THRESHOLD;
use crate::squeezed::CoefficientTable;

/// Runs the mode and renders its output. The second value is a notice for
/// stderr (used for a search that failed to localize).
pub fn execute(res: &Resolved) -> Result<(String, Option<String>), CliError> {
    let (out, notice) = match res.mode {
        Mode::Params => (params(res)?, None),
        Mode::SweepField => (sweep(res)?, None),
        Mode::Coherence => (coherence(res)?, None),
        Mode::Fisher => (fisher(res)?, None),
        Mode::MleSim => (mle_sim(res)?, None),
        Mode::QslCheck => (qsl_check(res)?, None),
        Mode::AdaptiveSearch => adaptive(res)?,
    };
    Ok((render(res.format, &meta(res), &out), notice))
}

/// Squeezing values and `ω_↑` (rad/ns) for the modes that accept either source.
fn squeezing(res: &Resolved) -> Result<(Vec<f64>, f64), CliError> {
    match res.physics.as_ref().expect("validated physics") {
        Physics::Direct { r, omega_up } => Ok((r.clone(), *omega_up)),
        Physics::Physical(params) => {
            let q = derive_quantities(params)?;
            Ok((vec![q.r], q.omega_up))
        }
    }
}

fn tables(res: &Resolved, rs: &[f64]) -> Result<Vec<CoefficientTable>, CliError> {
    rs.iter()
        .map(|&r| CoefficientTable::new(r, 0.0, res.tail_tol).map_err(CliError::from))
        .collect()
}

fn params(res: &Resolved) -> Result<Output, CliError> {
    let Some(Physics::Physical(params)) = &res.physics else {
        unreachable!("params mode requires physical parameters");
    };
    let q = derive_quantities(params)?;
    let margin = check_stability(params)?;
    let validity = params
        .ns_product()
        .map(|ns| nonlinearity_validity(&q, ns, DEFAULT_VALIDITY_THRESHOLD))
        .transpose()?;
    let mut table = CsvTable::new(&[
        "omega0_radns",
        "omega_eff_up_radns",
        "omega_eff_down_radns",
        "omega_up_radns",
        "omega_down_radns",
        "omega_up_ghz",
        "r_up",
        "r_down",
        "r",
        "n_bar",
        "theta_up",
        "theta_down",
        "stability_margin_radns",
        "validity_ratio",
        "validity_warning",
    ]);
    table.push(vec![
        params.omega0().into(),
        q.omega_eff_up.into(),
        q.omega_eff_down.into(),
        q.omega_up.into(),
        q.omega_down.into(),
        radns_to_ghz(q.omega_up).into(),
        q.r_up.into(),
        q.r_down.into(),
        q.r.into(),
        q.n_bar.into(),
        q.theta_up.into(),
        q.theta_down.into(),
        margin.into(),
        validity.map(|v| v.ratio).into(),
        validity.map_or(Cell::Empty, |v| Cell::B(v.warning)),
    ]);
    Ok(Output::new(table)
        .with("omega0_radns", params.omega0())
        .with("pair_coupling_radns", params.pair_coupling())
        .with("dispersive_radns", params.dispersive())
        .with("derived", q)
        .with("omega_up_ghz", radns_to_ghz(q.omega_up))
        .with("stability_margin_radns", margin)
        .with("validity", validity))
}

fn sweep(res: &Resolved) -> Result<Output, CliError> {
    let template = res.template.expect("validated template");
    let fields = res.grid.expect("validated grid").points();
    let rows = sweep_field(&template, &fields)?;
    let mut table = CsvTable::new(&["field_T", "r", "n_bar", "omega_up_radns", "stable"]);
    for row in &rows {
        let d = row.derived;
        table.push(vec![
            row.field_t.into(),
            d.map(|d| d.r).into(),
            d.map(|d| d.n_bar).into(),
            d.map(|d| d.omega_up).into(),
            Cell::B(row.stable()),
        ]);
    }
    Ok(Output::new(table)
        .with("template", template)
        .with("instability_field_t", template.instability_field())
        .with("rows", rows))
}

#[derive(Serialize)]
struct Trace {
    r: f64,
    n_bar: f64,
    phi: Vec<f64>,
    time_ns: Vec<f64>,
    sigma_x: Vec<f64>,
    p_plus: Vec<f64>,
}

fn coherence(res: &Resolved) -> Result<Output, CliError> {
    let (rs, omega_up) = squeezing(res)?;
    let phis = res.grid.expect("validated grid").points();
    let dephasing = res.t2star.map(|t2| Dephasing::new(omega_up, t2));
    let mut table = CsvTable::new(&["r", "phi", "time_ns", "sigma_x", "p_plus"]);
    let mut traces = Vec::new();
    for (r, t) in rs.iter().zip(tables(res, &rs)?) {
        let readouts: Vec<_> = phis
            .par_iter()
            .map(|&phi| match &dephasing {
                Some(d) => dephased_readout(&t, phi, d),
                None => readout(&t, phi),
            })
            .collect();
        let trace = Trace {
            r: *r,
            n_bar: t.n_bar(),
            time_ns: phis.iter().map(|phi| phi / omega_up).collect(),
            sigma_x: readouts.iter().map(|x| x.p_plus - x.p_minus).collect(),
            p_plus: readouts.iter().map(|x| x.p_plus).collect(),
            phi: phis.clone(),
        };
        for i in 0..phis.len() {
            table.push(vec![
                (*r).into(),
                trace.phi[i].into(),
                trace.time_ns[i].into(),
                trace.sigma_x[i].into(),
                trace.p_plus[i].into(),
            ]);
        }
        traces.push(trace);
    }
    Ok(Output::new(table)
        .with("omega_up_radns", omega_up)
        .with("t2star_ns", res.t2star)
        .with("traces", traces))
}

fn fisher(res: &Resolved) -> Result<Output, CliError> {
    let (rs, omega_up) = squeezing(res)?;
    let phis = res.grid.expect("validated grid").points();
    let dephasing = res.t2star.map(|t2| Dephasing::new(omega_up, t2));
    let mut table = CsvTable::new(&["r", "phi", "fisher"]);
    let mut profiles: Vec<FisherProfile> = Vec::new();
    for (r, t) in rs.iter().zip(tables(res, &rs)?) {
        let chunks: Vec<FisherProfile> = phis
            .par_chunks(256)
            .map(|chunk| fisher_profile(&t, chunk, dephasing))
            .collect();
        let values: Vec<f64> = chunks.into_iter().flat_map(|p| p.values).collect();
        for (phi, v) in phis.iter().zip(&values) {
            table.push(vec![(*r).into(), (*phi).into(), (*v).into()]);
        }
        profiles.push(FisherProfile {
            phis: phis.clone(),
            values,
            r: *r,
            n_bar: t.n_bar(),
            dephasing,
        });
    }
    let asymptotes: Vec<f64> = profiles.iter().map(|p| fisher_asymptote(p.n_bar)).collect();
    Ok(Output::new(table)
        .with("omega_up_radns", omega_up)
        .with("asymptotes", asymptotes)
        .with("profiles", profiles))
}

fn mle_sim(res: &Resolved) -> Result<Output, CliError> {
    let (rs, _) = squeezing(res)?;
    let t = CoefficientTable::new(rs[0], 0.0, res.tail_tol)?;
    let window = res.window.expect("validated window");
    let s = estimator_study(&t, res.phi_true, res.shots, res.batches, res.seed, &window, &res.mle)?;
    let mut table = CsvTable::new(&[
        "r",
        "n_bar",
        "phi_true",
        "shots",
        "batches",
        "mean",
        "empirical_variance",
        "fisher",
        "crlb",
        "variance_ratio",
        "bias",
        "bias_standard_error",
        "skewness",
        "excess_kurtosis",
    ]);
    table.push(vec![
        rs[0].into(),
        t.n_bar().into(),
        s.phi_true.into(),
        Cell::U(s.shots as u64),
        Cell::U(s.batches as u64),
        s.mean.into(),
        s.empirical_variance.into(),
        s.fisher.into(),
        s.crlb.into(),
        s.variance_ratio.into(),
        s.bias.into(),
        s.bias_standard_error.into(),
        s.skewness.into(),
        s.excess_kurtosis.into(),
    ]);
    Ok(Output::new(table).with("r", rs[0]).with("n_bar", t.n_bar()).with("study", s))
}

/// Margins below this are reported as violations.
const QSL_TOLERANCE: f64 = -1e-8;

#[derive(Serialize)]
struct QslCheck {
    r: f64,
    n_bar: f64,
    fisher_q_radns2: f64,
    min_margin: f64,
    holds: bool,
}

fn qsl_check(res: &Resolved) -> Result<Output, CliError> {
    let (rs, omega_up) = squeezing(res)?;
    let times: Vec<f64> = res.grid.expect("validated grid").points().iter().map(|p| p / omega_up).collect();
    let mut table = CsvTable::new(&["r", "n_bar", "fisher_q_radns2", "min_margin", "holds"]);
    let mut checks = Vec::new();
    for (r, t) in rs.iter().zip(tables(res, &rs)?) {
        let trace = sigma_x_trace(&t, omega_up, &times)?;
        let fq = quantum_fisher(omega_up, t.n_bar());
        let margin = qsl_margin(&trace, fq);
        let check = QslCheck {
            r: *r,
            n_bar: t.n_bar(),
            fisher_q_radns2: fq,
            min_margin: margin,
            holds: margin >= QSL_TOLERANCE,
        };
        table.push(vec![
            check.r.into(),
            check.n_bar.into(),
            check.fisher_q_radns2.into(),
            check.min_margin.into(),
            Cell::B(check.holds),
        ]);
        checks.push(check);
    }
    Ok(Output::new(table).with("omega_up_radns", omega_up).with("checks", checks))
}

fn stage_table(stages: &[StageReport]) -> CsvTable {
    let mut table = CsvTable::new(&[
        "stage",
        "r",
        "n_bar",
        "shots",
        "recurrence",
        "window_lo_radns",
        "window_hi_radns",
        "peak_time_ns",
        "likelihood_ratio",
        "localized",
        "omega_hat_radns",
        "sigma_omega_radns",
    ]);
    for s in stages {
        table.push(vec![
            Cell::U(s.stage as u64),
            s.r.into(),
            s.n_bar.into(),
            Cell::U(s.shots as u64),
            Cell::U(s.recurrence.into()),
            s.window_lo.into(),
            s.window_hi.into(),
            s.peak_time_ns.into(),
            s.likelihood_ratio.into(),
            Cell::B(s.localized),
            s.omega_hat.into(),
            s.sigma_omega.into(),
        ]);
    }
    table
}

fn adaptive(res: &Resolved) -> Result<(Output, Option<String>), CliError> {
    let plan = res.adaptive.as_ref().expect("validated adaptive plan");
    let rs: Vec<f64> = match &plan.schedule {
        Schedule::Squeezing(rs) => rs.clone(),
        Schedule::Fields { template, fields } => fields
            .iter()
            .map(|&f| Ok(derive_quantities(&template.params_at(f)?)?.r))
            .collect::<Result<_, CliError>>()?,
    };
    let cfg = AdaptiveConfig {
        omega_true: plan.omega_true,
        prior_lo: plan.prior_lo,
        prior_hi: plan.prior_hi,
        stages: rs.iter().map(|&r| StagePlan { r, shots: plan.shots }).collect(),
        scan_points: plan.scan_points,
        seed: res.seed,
        tail_tol: res.tail_tol,
        noise_floor: plan.noise_floor,
        mle: res.mle,
    };
    match adaptive_search(&cfg) {
        Ok(report) => {
            let summary = json!({
                "status": "localized",
                "omega_true_radns": report.omega_true,
                "omega_hat_radns": report.omega_hat,
                "omega_hat_ghz": radns_to_ghz(report.omega_hat),
                "sigma_omega_radns": report.sigma_omega,
                "crlb_sigma_radns": report.crlb_sigma,
                "error_radns": report.error,
                "error_in_sigmas": report.error_in_sigmas(),
                "total_shots": report.total_shots,
                "final_r": report.final_r,
            });
            let out = Output::new(stage_table(&report.stages))
                .comment("summary", &summary)
                .with("status", "localized")
                .with("report", report);
            Ok((out, None))
        }
        Err(AdaptiveError::FailedLocalization { stages }) => {
            let summary = json!({
                "status": "failed_localization",
                "omega_true_radns": cfg.omega_true,
                "total_shots": cfg.stages.iter().map(|s| s.shots).sum::<usize>(),
            });
            let notice = json!({
                "warning": "failed_localization",
                "message": AdaptiveError::FailedLocalization { stages: Vec::new() }.to_string(),
            });
            let out = Output::new(stage_table(&stages))
                .comment("summary", &summary)
                .with("status", "failed_localization")
                .with("stages", to_value(&stages));
            Ok((out, Some(notice.to_string())))
        }
        Err(e) => Err(e.into()),
    }
}
