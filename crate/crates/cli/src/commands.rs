use num_complex::Complex64;

use levy_decoherence::evolution::{
    jump_expansion_evolve, transition_scan, visibility, CountModel, JumpConfig, OffDiagonalState,
    PathSeparationWeights, TransitionReport,
};
use levy_decoherence::levy::{cf_at_time, eval_exponent};
use levy_decoherence::models::Tabulation;
use levy_decoherence::sampling::{empirical_cf, sample_total_transfer, write_samples_csv, SamplerConfig};
use levy_decoherence::SeparationGrid;

use crate::args::{CountModelArg, EvolveArgs, ExponentArgs, MontecarloArgs, TransitionArgs, VisibilityArgs};
use crate::error::CliError;
use crate::model::Model;
use crate::output::Table;

fn grid(spec: &Option<String>, default: &str) -> Result<SeparationGrid, CliError> {
    Ok(SeparationGrid::parse_spec(spec.as_deref().unwrap_or(default))?)
}

/// A comma list of numbers, or lo:hi:n.
fn number_list(spec: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    if spec.contains(':') {
        return Ok(SeparationGrid::parse_spec(spec)?.points().to_vec());
    }
    spec.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| CliError::Usage(format!("--{flag}: '{p}' is not a number"))))
        .collect()
}

pub fn units(hbar: f64) -> String {
    format!("hbar = {hbar}; s is a length, q a momentum, t a time in units of the inverse rate")
}

pub fn exponent(a: &ExponentArgs) -> Result<Table, CliError> {
    let model = Model::from_args(&a.model)?;
    let g = grid(&a.common.grid, "-10:10:201")?;
    let psi = eval_exponent(&model.psi, &g)?;
    let mut t = Table::new(vec!["s", "re_psi", "im_psi"]);
    t.note("exponent", model.psi.label());
    t.note("numeric", model.psi.is_numeric());
    t.rows = g.points().iter().zip(&psi).map(|(&s, v)| vec![s, v.re, v.im]).collect();
    Ok(t)
}

pub fn evolve(a: &EvolveArgs) -> Result<Table, CliError> {
    let model = Model::from_args(&a.model)?;
    let g = grid(&a.common.grid, "-10:10:201")?;
    let times = number_list(&a.t, "t")?;
    if times.is_empty() {
        return Err(CliError::Usage("--t needs at least one time".into()));
    }
    let jumps = if a.jump { Some(model.require_jumps("--jump")?.clone()) } else { None };
    let mut columns = vec!["t", "s", "re_phi", "im_phi", "abs_phi"];
    if jumps.is_some() {
        columns.extend(["re_phi_jump", "im_phi_jump", "closed_vs_jump", "poisson_tail"]);
    }
    let mut table = Table::new(columns);
    table.note("exponent", model.psi.label());
    if let Some(n) = a.truncation {
        table.note("truncation", n);
    }

    for &t in &times {
        let phi = cf_at_time(&model.psi, t, &g)?;
        let jump = match &jumps {
            Some((rate, pd)) => {
                let mut cfg = JumpConfig::constant(*rate, t).with_count_model(match a.count_model {
                    CountModelArg::Poisson => CountModel::Poisson,
                    CountModelArg::Gaussian => CountModel::Gaussian { variance: None },
                });
                if let Some(n) = a.truncation {
                    cfg = cfg.with_truncation(n);
                }
                let hbar = model.hbar;
                let cf = |s: f64| pd.cf(s, hbar);
                let (state, w) = jump_expansion_evolve(&OffDiagonalState::ones(&g), &cf, &cfg)?;
                if !w.markovian {
                    table.note("markovian", false);
                }
                Some((state.values, w.tail))
            }
            None => None,
        };
        for (i, (&s, v)) in g.points().iter().zip(&phi.values).enumerate() {
            let mut row = vec![t, s, v.re, v.im, v.norm()];
            if let Some((values, tail)) = &jump {
                let j = values[i];
                row.extend([j.re, j.im, (j - v).norm(), *tail]);
            }
            table.rows.push(row);
        }
    }
    table.notes.dedup();
    Ok(table)
}

pub fn transition(a: &TransitionArgs) -> Result<Table, CliError> {
    let model = Model::from_args(&a.model)?;
    let (_, pd) = model.require_jumps("transition")?;
    let g = grid(&a.common.grid, "-10:10:401")?;
    let nbar = number_list(&a.nbar, "nbar")?;
    let report = transition_scan(pd, &nbar, &g, model.hbar)?;
    let mut t = Table::new(TransitionReport::COLUMNS.to_vec());
    t.note("mean", report.mean);
    t.note("second_moment", report.second_moment);
    for s in &report.summaries {
        t.note(
            &format!("nbar {}", s.nbar),
            format!(
                "divergence {} plateau {} expected_plateau {} at s {}",
                s.divergence, s.plateau, s.expected_plateau, s.plateau_separation
            ),
        );
    }
    t.rows = report
        .rows
        .iter()
        .map(|r| vec![r.nbar, r.s, r.abs_cf_compound, r.abs_cf_gaussian, r.divergence])
        .collect();
    Ok(t)
}

pub fn montecarlo(a: &MontecarloArgs) -> Result<Table, CliError> {
    let model = Model::from_args(&a.model)?;
    let process = model
        .process
        .clone()
        .ok_or_else(|| CliError::Usage("montecarlo needs a --gaussian, --stable, --mandel, --gas or --pd model".into()))?;
    let g = grid(&a.common.grid, "-10:10:201")?;
    let mut cfg = SamplerConfig::new(process, a.t, a.samples, a.common.seed);
    cfg.hbar = model.hbar;
    let samples = sample_total_transfer(&cfg)?;
    if let Some(path) = &a.samples_out {
        let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        write_samples_csv(&samples, std::io::BufWriter::new(file))?;
    }
    let ecf = empirical_cf(&samples, &g, model.hbar)?;
    let exact: Vec<Complex64> = cf_at_time(&model.psi, a.t, &g)?.values;
    let within = ecf.within(&exact, 3.0);
    let rate = ecf.pass_rate(&exact, 3.0);

    let mut t = Table::new(vec![
        "s", "re_empirical", "im_empirical", "se", "re_analytic", "im_analytic", "abs_deviation", "within_3se",
        "pass_rate_3se",
    ]);
    t.note("samples", a.samples);
    t.note("pass_rate_3se", rate);
    if a.samples == 1 {
        t.note("se", "infinite: a single sample carries no spread estimate");
    }
    for (i, &s) in g.points().iter().enumerate() {
        let (e, x) = (ecf.values[i], exact[i]);
        t.rows.push(vec![
            s,
            e.re,
            e.im,
            ecf.std_errors[i],
            x.re,
            x.im,
            (e - x).norm(),
            if within[i] { 1.0 } else { 0.0 },
            rate,
        ]);
    }
    Ok(t)
}

pub fn visibility_over_time(a: &VisibilityArgs) -> Result<Table, CliError> {
    let model = Model::from_args(&a.model)?;
    let weights = match (&a.weights, a.point) {
        (Some(path), _) => PathSeparationWeights::from_tabulation(&Tabulation::from_path(path)?)?,
        (None, Some(s)) => PathSeparationWeights::point_mass(s),
        (None, None) => PathSeparationWeights::uniform(&grid(&a.common.grid, "0:10:101")?),
    };
    let times = number_list(&a.t, "t")?;
    if times.is_empty() {
        return Err(CliError::Usage("--t needs at least one time".into()));
    }
    let rate = model.jumps.as_ref().map(|(r, _)| *r);
    let mut columns = vec!["t", "visibility"];
    if rate.is_some() {
        columns.push("no_jump_probability");
    }
    let mut table = Table::new(columns);
    for &t in &times {
        let phi = cf_at_time(&model.psi, t, &weights.grid)?;
        let mut row = vec![t, visibility(&phi, &weights)?];
        if let Some(r) = rate {
            row.push((-r * t).exp());
        }
        table.rows.push(row);
    }
    Ok(table)
}
