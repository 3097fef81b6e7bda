//! Command-line front end: scenarios, embedded presets, file output, the
//! critical-coherence table and batch runs.

mod output;
mod scenario;

use std::fmt;
use std::path::{Path, PathBuf};

pub use output::{
    build_generator, build_rate_table, rates_csv, report_text, run, simulate, trajectory_csv, write_rates, RunOutput,
    RATES_HEADER, TRAJECTORY_HEADER,
};
pub use scenario::{parse_scenario, serialize_scenario, InitialState, Scenario};

use crate::diagnostics::{critical_coherence, CriticalCoherence};
use crate::error::{Error, Result};
use crate::spectra::{photon_number, TemperatureProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Integration { .. } => EXIT_INTEGRATION,
        _ => EXIT_CONFIG,
    }
}

/// Names and documents of the built-in scenarios.
pub const PRESETS: [(&str, &str); 4] = [
    ("fig3", include_str!("../../presets/fig3.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5-thermal", include_str!("../../presets/fig5-thermal.toml")),
    ("fig5-nonthermal", include_str!("../../presets/fig5-nonthermal.toml")),
];

pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        Error::config("preset", format!("unknown preset `{name}`, expected one of {}", known.join(", ")))
    })
}

/// Join field-level errors into one configuration error.
pub fn merge_errors(errors: Vec<Error>) -> Error {
    if errors.len() == 1 {
        return errors.into_iter().next().unwrap();
    }
    let lines: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
    Error::config("document", format!("{} errors:\n  {}", errors.len(), lines.join("\n  ")))
}

pub fn preset(name: &str) -> Result<Scenario> {
    parse_scenario(preset_text(name)?).map_err(merge_errors)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text).map_err(merge_errors)
}

/// Parse a profile spec: `constant:T`, `two_step:T1,T2[,split]` or
/// `tabulated:w0:T0,w1:T1,...`.
pub fn parse_profile(spec: &str, default_split: f64) -> Result<TemperatureProfile> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let bad = |msg: String| Error::config("profile", msg);
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
    match kind {
        "constant" => TemperatureProfile::constant(number(args)?),
        "two_step" => {
            let v: Vec<f64> = args.split(',').map(number).collect::<Result<_>>()?;
            match v[..] {
                [t1, t2] => TemperatureProfile::two_step(t1, t2, default_split),
                [t1, t2, split] => TemperatureProfile::two_step(t1, t2, split),
                _ => Err(bad("two_step takes T1,T2[,split]".into())),
            }
        }
        "tabulated" => {
            let points = args
                .split(',')
                .map(|pair| {
                    let (w, t) = pair.split_once(':').ok_or_else(|| bad(format!("`{pair}` is not w:T")))?;
                    Ok((number(w)?, number(t)?))
                })
                .collect::<Result<Vec<_>>>()?;
            TemperatureProfile::tabulated(points)
        }
        other => Err(bad(format!("unknown profile `{other}`, expected constant, two_step or tabulated"))),
    }
}

/// Occupations and critical coherence strengths at two levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceTable {
    pub eps: [f64; 2],
    pub occupations: [f64; 2],
    pub coherence: CriticalCoherence,
}

pub fn pc_table(eps1: f64, eps2: f64, profile: &TemperatureProfile) -> Result<CoherenceTable> {
    let occupations = [photon_number(profile, eps1)?, photon_number(profile, eps2)?];
    Ok(CoherenceTable {
        eps: [eps1, eps2],
        occupations,
        coherence: critical_coherence(occupations[0], occupations[1])?,
    })
}

impl fmt::Display for CoherenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coherence;
        let rows = [
            ("eps1", self.eps[0]),
            ("eps2", self.eps[1]),
            ("n(eps1)", self.occupations[0]),
            ("n(eps2)", self.occupations[1]),
            ("p_crit_plus", c.plus),
            ("p_crit_minus", c.minus),
            ("p_crit", c.overall),
            ("unrooted 4n1n2/(n1+n2)^2", c.unrooted),
        ];
        for (name, v) in rows {
            writeln!(f, "{name:<26} {v:.16e}")?;
        }
        Ok(())
    }
}

/// One entry of a batch list.
#[derive(Debug, Clone, PartialEq)]
pub enum BatchItem {
    Preset(String),
    File(PathBuf),
}

impl BatchItem {
    pub fn label(&self) -> String {
        match self {
            BatchItem::Preset(name) => name.clone(),
            BatchItem::File(path) => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        }
    }

    pub fn load(&self) -> Result<Scenario> {
        match self {
            BatchItem::Preset(name) => preset(name),
            BatchItem::File(path) => load_scenario(path),
        }
    }
}

/// Parse a batch list: one `preset:<name>` or scenario path per line, `#`
/// comments allowed. Relative paths resolve against `base`.
pub fn parse_batch_list(text: &str, base: &Path) -> Vec<BatchItem> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| match l.strip_prefix("preset:") {
            Some(name) => BatchItem::Preset(name.trim().to_string()),
            None => BatchItem::File(base.join(l)),
        })
        .collect()
}

/// Run every item into `out/<label>`, concurrently.
pub fn run_batch(items: &[BatchItem], out: &Path) -> Vec<(String, Result<()>)> {
    use rayon::prelude::*;
    items
        .par_iter()
        .map(|item| {
            let label = item.label();
            let result = item.load().and_then(|s| run(&s, &out.join(&label)).map(|_| ()));
            (label, result)
        })
        .collect()
}
