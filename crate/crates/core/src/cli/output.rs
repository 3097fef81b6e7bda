//! Running a scenario and writing its CSV and report files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::diagnostics::{
    block_signatures, critical_coherence, markovianity_check, positivity_report, CriticalCoherence,
    MarkovianityVerdict, PositivityReport, DEFAULT_TOLERANCE,
};
use crate::error::Result;
use crate::evolve::{evolve, Trajectory};
use crate::generator::{Generator, Mode, RateSource};
use crate::rates::{decay_matrix, static_rates, DecayMatrix, RateSet, RateTable};
use crate::spectra::photon_number;

use super::scenario::Scenario;

pub const TRAJECTORY_HEADER: &str =
    "t,rho_gg,rho_11,rho_22,re_rho_12,im_rho_12,re_rho_g1,im_rho_g1,re_rho_g2,im_rho_g2,min_eig_rho,trace_err";
pub const RATES_HEADER: &str =
    "t,gamma_plus_e1,gamma_plus_e2,gamma_minus_e1,gamma_minus_e2,min_eig_D,det_Dplus,det_Dminus";

/// Full double precision, locale independent.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rate table covering the integration horizon on the integrator grid.
pub fn build_rate_table(scenario: &Scenario) -> Result<RateTable> {
    let steps = scenario.integrator.validate(scenario.system.eps2)?;
    RateTable::build(
        &scenario.spectrum,
        &scenario.profile,
        scenario.system.levels(),
        scenario.integrator.dt,
        scenario.integrator.time(steps),
        &scenario.quadrature,
    )
}

pub fn build_generator(scenario: &Scenario) -> Result<Generator> {
    let source = match scenario.generator.mode {
        Mode::Markov2 => RateSource::Static(static_rates(
            &scenario.spectrum,
            &scenario.profile,
            scenario.system.eps1,
            scenario.system.eps2,
        )?),
        Mode::Markov1 => RateSource::TimeDependent(Arc::new(build_rate_table(scenario)?)),
    };
    Generator::new(scenario.system, scenario.generator, source)
}

/// Everything `run` computes, before it is written out.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub positivity: PositivityReport,
    pub markovianity: MarkovianityVerdict,
    pub coherence: CriticalCoherence,
    pub occupations: [f64; 2],
}

fn decay_series(generator: &Generator, trajectory: &Trajectory) -> Result<Vec<(f64, DecayMatrix)>> {
    trajectory.times.iter().map(|&t| Ok((t, generator.effective_decay(t)?))).collect()
}

pub fn simulate(scenario: &Scenario) -> Result<(Generator, RunOutput)> {
    let generator = build_generator(scenario)?;
    let trajectory = evolve(&generator, &scenario.initial.density_matrix(), &scenario.integrator)?;
    let positivity = positivity_report(&trajectory, DEFAULT_TOLERANCE)?;
    let series = decay_series(&generator, &trajectory)?;
    let markovianity = markovianity_check(&series, DEFAULT_TOLERANCE)?;
    let occupations = [
        photon_number(&scenario.profile, scenario.system.eps1)?,
        photon_number(&scenario.profile, scenario.system.eps2)?,
    ];
    let coherence = critical_coherence(occupations[0], occupations[1])?;
    Ok((generator, RunOutput { trajectory, positivity, markovianity, coherence, occupations }))
}

pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::with_capacity(256 * (trajectory.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for ((t, rho), diag) in trajectory.times.iter().zip(&trajectory.states).zip(&trajectory.diagnostics) {
        let m = rho.matrix();
        let fields = [
            *t,
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(2, 2)].re,
            m[(1, 2)].re,
            m[(1, 2)].im,
            m[(0, 1)].re,
            m[(0, 1)].im,
            m[(0, 2)].re,
            m[(0, 2)].im,
            diag.min_eig_rho,
            diag.trace_error,
        ];
        let row: Vec<String> = fields.iter().map(|&x| num(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn rates_row(out: &mut String, t: f64, rates: &RateSet, d: &DecayMatrix) {
    let (det_p, det_m) = crate::diagnostics::block_determinants(d);
    let fields = [
        t,
        rates.gamma_plus[0][0][0],
        rates.gamma_plus[1][1][1],
        rates.gamma_minus[0][0][0],
        rates.gamma_minus[1][1][1],
        crate::diagnostics::min_decay_eigenvalue(d),
        det_p,
        det_m,
    ];
    let row: Vec<String> = fields.iter().map(|&x| num(x)).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// Diagonal rates `Γ±_nn(ε_n, t)` and decay-matrix diagnostics per record.
pub fn rates_csv(scenario: &Scenario, table: &RateTable) -> String {
    let every = scenario.integrator.record_every;
    let last = table.len() - 1;
    let mut out = String::new();
    out.push_str(RATES_HEADER);
    out.push('\n');
    let mut j = 0;
    loop {
        let rates = table.at_index(j);
        let mut d = decay_matrix(&rates);
        if scenario.generator.secular {
            d = d.secular();
        }
        rates_row(&mut out, j as f64 * table.dt(), &rates, &d);
        if j == last {
            break;
        }
        j = (j + every).min(last);
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".into())
}

pub fn report_text(scenario: &Scenario, generator: &Generator, output: &RunOutput) -> Result<String> {
    let mut s = String::new();
    let p = &output.positivity;
    let m = &output.markovianity;
    let c = &output.coherence;
    let traj = &output.trajectory;
    let min_population = traj.diagnostics.iter().flat_map(|d| d.populations).fold(f64::INFINITY, f64::min);
    let max_trace = traj.diagnostics.iter().map(|d| d.trace_error).fold(0.0, f64::max);
    let max_herm = traj.diagnostics.iter().map(|d| d.hermiticity_error).fold(0.0, f64::max);
    let series = decay_series(generator, traj)?;
    let (plus, minus) = block_signatures(&series, DEFAULT_TOLERANCE);
    let mode = match scenario.generator.mode {
        Mode::Markov2 => "markov2",
        Mode::Markov1 => "markov1",
    };
    let mut body = || -> std::fmt::Result {
        writeln!(s, "[run]")?;
        writeln!(s, "mode = {mode}")?;
        writeln!(s, "secular = {}", scenario.generator.secular)?;
        writeln!(s, "include_hc = {}", scenario.generator.include_hc)?;
        writeln!(s, "records = {}", traj.len())?;
        writeln!(s, "t_final = {}", opt(traj.times.last().copied()))?;
        writeln!(s, "min_population = {}", num(min_population))?;
        writeln!(s, "max_trace_error = {}", num(max_trace))?;
        writeln!(s, "max_hermiticity_error = {}", num(max_herm))?;
        writeln!(s)?;
        writeln!(s, "[positivity]")?;
        writeln!(s, "tolerance = {}", num(p.tolerance))?;
        writeln!(s, "violated = {}", p.first_violation_time.is_some())?;
        writeln!(s, "first_violation_time = {}", opt(p.first_violation_time))?;
        writeln!(s, "last_violation_time = {}", opt(p.last_violation_time))?;
        writeln!(s, "max_violation_magnitude = {}", num(p.max_violation_magnitude))?;
        writeln!(s, "violation_measure = {}", num(p.violation_measure))?;
        writeln!(s)?;
        writeln!(s, "[markovianity]")?;
        writeln!(s, "tolerance = {}", num(m.tolerance))?;
        writeln!(s, "is_markovian = {}", m.is_markovian)?;
        writeln!(s, "min_decay_eigenvalue = {}", num(m.min_decay_eigenvalue_over_time))?;
        writeln!(s, "witness_time = {}", opt(m.witness_time))?;
        writeln!(
            s,
            "plus_block = semidefinite:{} indefinite:{} negative:{}",
            plus.semidefinite, plus.indefinite, plus.negative
        )?;
        writeln!(
            s,
            "minus_block = semidefinite:{} indefinite:{} negative:{}",
            minus.semidefinite, minus.indefinite, minus.negative
        )?;
        writeln!(s)?;
        writeln!(s, "[critical_coherence]")?;
        writeln!(s, "occupation_e1 = {}", num(output.occupations[0]))?;
        writeln!(s, "occupation_e2 = {}", num(output.occupations[1]))?;
        writeln!(s, "p = {}", num(scenario.spectrum.p))?;
        writeln!(s, "p_crit_plus = {}", num(c.plus))?;
        writeln!(s, "p_crit_minus = {}", num(c.minus))?;
        writeln!(s, "p_crit = {}", num(c.overall))?;
        writeln!(s, "p_crit_unrooted = {}", num(c.unrooted))?;
        writeln!(s, "above_threshold = {}", scenario.spectrum.p.abs() > c.overall)
    };
    body().expect("writing to a String");
    Ok(s)
}

/// Evolve a scenario and write `trajectory.csv`, `report.txt` and, for
/// time-dependent generators, `rates.csv` into `out_dir`.
pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<RunOutput> {
    let (generator, output) = simulate(scenario)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("trajectory.csv"), trajectory_csv(&output.trajectory))?;
    if let RateSource::TimeDependent(table) = generator.source() {
        fs::write(out_dir.join("rates.csv"), rates_csv(scenario, table))?;
    }
    fs::write(out_dir.join("report.txt"), report_text(scenario, &generator, &output)?)?;
    Ok(output)
}

/// Write only `rates.csv`, from the finite-time rates, whatever the mode.
pub fn write_rates(scenario: &Scenario, out_dir: &Path) -> Result<()> {
    let table = build_rate_table(scenario)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("rates.csv"), rates_csv(scenario, &table))?;
    Ok(())
}
