//! Scenario documents: a flat TOML schema with one table per concern.
//!
//! ```toml
//! [system]
//! eps1 = 0.95
//! eps2 = 1.05
//!
//! [spectrum]
//! family = "flat_band"      # or "ohmic"
//! strength1 = 0.0005        # γ_n (flat band) or λ_n (ohmic)
//! strength2 = 0.0005
//! cutoff = 20.0
//! p = 1.0
//!
//! [temperature]
//! profile = "two_step"      # "constant" (t), "two_step" (t1, t2, split),
//! t1 = 1.0                  # "tabulated" (breakpoints = [[ω, T], ...])
//! t2 = 500.0
//! split = 1.0               # defaults to (eps1 + eps2)/2
//!
//! [generator]
//! mode = "markov2"          # or "markov1"
//! secular = false
//! include_hc = true
//!
//! [initial]
//! state = "superposition_e1_e2"   # "ground", or "custom" with re/im 3×3
//!
//! [integrator]
//! dt = 0.01
//! t_max = 2000.0
//! record_every = 10
//!
//! [quadrature]
//! nu_panels = 4096
//! ```
//!
//! `[generator]`, `[initial]`, `[integrator]` and `[quadrature]` may be
//! omitted, as may any key with a default.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::IntegratorConfig;
use crate::generator::{DensityMatrix, GeneratorConfig, Mode, SystemSpec};
use crate::operators::Mat3;
use crate::rates::QuadratureSettings;
use crate::spectra::{CouplingSpectrum, SpectrumFamily, TemperatureProfile};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    SuperpositionE1E2,
    Ground,
    Custom(DensityMatrix),
}

impl InitialState {
    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            InitialState::SuperpositionE1E2 => DensityMatrix::superposition_e1_e2(),
            InitialState::Ground => DensityMatrix::ground(),
            InitialState::Custom(rho) => *rho,
        }
    }
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: SystemSpec,
    pub spectrum: CouplingSpectrum,
    pub profile: TemperatureProfile,
    pub generator: GeneratorConfig,
    pub initial: InitialState,
    pub integrator: IntegratorConfig,
    pub quadrature: QuadratureSettings,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    eps1: f64,
    eps2: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumDoc {
    family: String,
    strength1: f64,
    strength2: f64,
    cutoff: f64,
    p: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemperatureDoc {
    profile: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakpoints: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    #[serde(default = "default_mode")]
    mode: String,
    #[serde(default)]
    secular: bool,
    #[serde(default = "default_true")]
    include_hc: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDoc {
    #[serde(default = "default_state")]
    state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    re: Option<[[f64; 3]; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<[[f64; 3]; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratorDoc {
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_t_max")]
    t_max: f64,
    #[serde(default = "default_record_every")]
    record_every: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureDoc {
    #[serde(default = "default_nu_panels")]
    nu_panels: usize,
    #[serde(default = "default_nu_floor")]
    nu_floor: f64,
    #[serde(default = "default_panels_per_decade")]
    panels_per_decade: usize,
}

fn default_mode() -> String {
    "markov2".into()
}
fn default_true() -> bool {
    true
}
fn default_state() -> String {
    "superposition_e1_e2".into()
}
fn default_dt() -> f64 {
    IntegratorConfig::default().dt
}
fn default_t_max() -> f64 {
    IntegratorConfig::default().t_max
}
fn default_record_every() -> usize {
    IntegratorConfig::default().record_every
}
fn default_nu_panels() -> usize {
    QuadratureSettings::default().nu_panels
}
fn default_nu_floor() -> f64 {
    QuadratureSettings::default().nu_floor
}
fn default_panels_per_decade() -> usize {
    QuadratureSettings::default().panels_per_decade
}

#[derive(Debug, Serialize)]
struct ScenarioDoc {
    system: SystemDoc,
    spectrum: SpectrumDoc,
    temperature: TemperatureDoc,
    generator: GeneratorDoc,
    initial: InitialDoc,
    integrator: IntegratorDoc,
    quadrature: QuadratureDoc,
}

const SECTIONS: [&str; 7] = ["system", "spectrum", "temperature", "generator", "initial", "integrator", "quadrature"];

/// Collects field-level errors while parsing.
#[derive(Default)]
struct Errors(Vec<Error>);

impl Errors {
    fn push(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.0.push(Error::config(key, message));
    }

    fn take<T>(&mut self, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.0.push(e)).ok()
    }
}

fn section<T: for<'de> Deserialize<'de>>(
    table: &toml::Table,
    name: &str,
    required: bool,
    errors: &mut Errors,
) -> Option<T> {
    let value = match table.get(name) {
        Some(v) => v.clone(),
        None if required => {
            errors.push(name, "missing required section");
            return None;
        }
        None => toml::Value::Table(toml::Table::new()),
    };
    match value.try_into::<T>() {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(name, e.message().trim().to_string());
            None
        }
    }
}

fn require(errors: &mut Errors, key: &str, v: Option<f64>) -> Option<f64> {
    if v.is_none() {
        errors.push(key, "missing required key");
    }
    v
}

fn build_profile(doc: &TemperatureDoc, default_split: f64, errors: &mut Errors) -> Option<TemperatureProfile> {
    let allowed: &[&str] = match doc.profile.as_str() {
        "constant" => &["t"],
        "two_step" => &["t1", "t2", "split"],
        "tabulated" => &["breakpoints"],
        other => {
            errors.push(
                "temperature.profile",
                format!("unknown profile `{other}`, expected constant, two_step or tabulated"),
            );
            return None;
        }
    };
    let present = [
        ("t", doc.t.is_some()),
        ("t1", doc.t1.is_some()),
        ("t2", doc.t2.is_some()),
        ("split", doc.split.is_some()),
        ("breakpoints", doc.breakpoints.is_some()),
    ];
    for (key, is_set) in present {
        if is_set && !allowed.contains(&key) {
            errors.push(format!("temperature.{key}"), format!("not used by the {} profile", doc.profile));
        }
    }
    let profile = match doc.profile.as_str() {
        "constant" => TemperatureProfile::constant(require(errors, "temperature.t", doc.t)?),
        "two_step" => {
            let t1 = require(errors, "temperature.t1", doc.t1);
            let t2 = require(errors, "temperature.t2", doc.t2);
            TemperatureProfile::two_step(t1?, t2?, doc.split.unwrap_or(default_split))
        }
        _ => match &doc.breakpoints {
            Some(b) => TemperatureProfile::tabulated(b.iter().map(|&[w, t]| (w, t)).collect()),
            None => {
                errors.push("temperature.breakpoints", "missing required key");
                return None;
            }
        },
    };
    errors.take(profile.map_err(|e| prefix(e, "temperature")))
}

/// Give bare keys from constructors their section prefix.
fn prefix(e: Error, section: &str) -> Error {
    match e {
        Error::Config { key, message } if !key.contains('.') => Error::config(format!("{section}.{key}"), message),
        other => other,
    }
}

fn build_initial(doc: &InitialDoc, errors: &mut Errors) -> Option<InitialState> {
    if doc.state != "custom" && (doc.re.is_some() || doc.im.is_some()) {
        errors.push("initial.re", "matrix entries are only used with state = \"custom\"");
    }
    match doc.state.as_str() {
        "superposition_e1_e2" => Some(InitialState::SuperpositionE1E2),
        "ground" => Some(InitialState::Ground),
        "custom" => {
            let Some(re) = doc.re else {
                errors.push("initial.re", "missing required key for a custom state");
                return None;
            };
            let im = doc.im.unwrap_or([[0.0; 3]; 3]);
            let m = Mat3::from_fn(|i, j| Complex64::new(re[i][j], im[i][j]));
            match DensityMatrix::new(m) {
                Ok(rho) => Some(InitialState::Custom(rho)),
                Err(e) => {
                    errors.push("initial", e.to_string());
                    None
                }
            }
        }
        other => {
            errors.push(
                "initial.state",
                format!("unknown state `{other}`, expected superposition_e1_e2, ground or custom"),
            );
            None
        }
    }
}

/// Parse and validate a scenario document, reporting every bad field.
pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, Vec<Error>> {
    let table: toml::Table =
        text.parse().map_err(|e: toml::de::Error| vec![Error::config("document", e.message().trim().to_string())])?;
    let mut errors = Errors::default();
    for key in table.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            errors.push(key.clone(), "unknown section");
        }
    }

    let system_doc: Option<SystemDoc> = section(&table, "system", true, &mut errors);
    let spectrum_doc: Option<SpectrumDoc> = section(&table, "spectrum", true, &mut errors);
    let temperature_doc: Option<TemperatureDoc> = section(&table, "temperature", true, &mut errors);
    let generator_doc: Option<GeneratorDoc> = section(&table, "generator", false, &mut errors);
    let initial_doc: Option<InitialDoc> = section(&table, "initial", false, &mut errors);
    let integrator_doc: Option<IntegratorDoc> = section(&table, "integrator", false, &mut errors);
    let quadrature_doc: Option<QuadratureDoc> = section(&table, "quadrature", false, &mut errors);

    let system = system_doc.and_then(|d| errors.take(SystemSpec::new(d.eps1, d.eps2).map_err(|e| prefix(e, "system"))));

    let spectrum = spectrum_doc.and_then(|d| {
        let family = match d.family.as_str() {
            "flat_band" => SpectrumFamily::FlatBand { gamma1: d.strength1, gamma2: d.strength2, cutoff: d.cutoff },
            "ohmic" => SpectrumFamily::Ohmic { lambda1: d.strength1, lambda2: d.strength2, cutoff: d.cutoff },
            other => {
                errors.push("spectrum.family", format!("unknown family `{other}`, expected flat_band or ohmic"));
                return None;
            }
        };
        errors.take(CouplingSpectrum::new(family, d.p))
    });
    if let (Some(sys), Some(sp)) = (&system, &spectrum) {
        if !(sp.supports(sys.eps1) && sp.supports(sys.eps2)) {
            errors.push("spectrum.cutoff", format!("cutoff {} must be at least eps2 = {}", sp.cutoff(), sys.eps2));
        }
    }

    // The split defaults to the mean level energy.
    let default_split = system.map(|s| s.mean_energy()).unwrap_or(1.0);
    let profile = temperature_doc.and_then(|d| build_profile(&d, default_split, &mut errors));

    let generator = generator_doc.and_then(|d| {
        let mode = match d.mode.as_str() {
            "markov2" => Mode::Markov2,
            "markov1" => Mode::Markov1,
            other => {
                errors.push("generator.mode", format!("unknown mode `{other}`, expected markov2 or markov1"));
                return None;
            }
        };
        Some(GeneratorConfig { mode, secular: d.secular, include_hc: d.include_hc })
    });

    let initial = initial_doc.and_then(|d| build_initial(&d, &mut errors));

    let integrator = integrator_doc.and_then(|d| {
        let cfg = IntegratorConfig { dt: d.dt, t_max: d.t_max, record_every: d.record_every };
        let eps2 = system.map(|s| s.eps2).unwrap_or(0.0);
        errors.take(cfg.validate(eps2)).map(|_| cfg)
    });

    let quadrature = quadrature_doc.map(|d| {
        if d.nu_panels == 0 {
            errors.push("quadrature.nu_panels", "must be at least 1");
        }
        if d.panels_per_decade == 0 {
            errors.push("quadrature.panels_per_decade", "must be at least 1");
        }
        if !(d.nu_floor > 0.0 && d.nu_floor < 1e-2) {
            errors.push("quadrature.nu_floor", format!("must lie in (0, 0.01), got {}", d.nu_floor));
        }
        QuadratureSettings { nu_panels: d.nu_panels, nu_floor: d.nu_floor, panels_per_decade: d.panels_per_decade }
    });

    if !errors.0.is_empty() {
        return Err(errors.0);
    }
    Ok(Scenario {
        system: system.unwrap(),
        spectrum: spectrum.unwrap(),
        profile: profile.unwrap(),
        generator: generator.unwrap(),
        initial: initial.unwrap(),
        integrator: integrator.unwrap(),
        quadrature: quadrature.unwrap(),
    })
}

/// Render a scenario in the document schema; `parse_scenario` inverts it.
pub fn serialize_scenario(s: &Scenario) -> String {
    let (family, strength1, strength2, cutoff) = match s.spectrum.family {
        SpectrumFamily::FlatBand { gamma1, gamma2, cutoff } => ("flat_band", gamma1, gamma2, cutoff),
        SpectrumFamily::Ohmic { lambda1, lambda2, cutoff } => ("ohmic", lambda1, lambda2, cutoff),
    };
    let mut temperature =
        TemperatureDoc { profile: String::new(), t: None, t1: None, t2: None, split: None, breakpoints: None };
    match &s.profile {
        TemperatureProfile::Constant { temperature: t } => {
            temperature.profile = "constant".into();
            temperature.t = Some(*t);
        }
        TemperatureProfile::TwoStep { t1, t2, split } => {
            temperature.profile = "two_step".into();
            temperature.t1 = Some(*t1);
            temperature.t2 = Some(*t2);
            temperature.split = Some(*split);
        }
        TemperatureProfile::Tabulated { breakpoints } => {
            temperature.profile = "tabulated".into();
            temperature.breakpoints = Some(breakpoints.iter().map(|&(w, t)| [w, t]).collect());
        }
    }
    let initial = match &s.initial {
        InitialState::SuperpositionE1E2 => InitialDoc { state: "superposition_e1_e2".into(), re: None, im: None },
        InitialState::Ground => InitialDoc { state: "ground".into(), re: None, im: None },
        InitialState::Custom(rho) => {
            let m = rho.matrix();
            InitialDoc {
                state: "custom".into(),
                re: Some(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].re))),
                im: Some(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].im))),
            }
        }
    };
    let doc = ScenarioDoc {
        system: SystemDoc { eps1: s.system.eps1, eps2: s.system.eps2 },
        spectrum: SpectrumDoc { family: family.into(), strength1, strength2, cutoff, p: s.spectrum.p },
        temperature,
        generator: GeneratorDoc {
            mode: match s.generator.mode {
                Mode::Markov2 => "markov2".into(),
                Mode::Markov1 => "markov1".into(),
            },
            secular: s.generator.secular,
            include_hc: s.generator.include_hc,
        },
        initial,
        integrator: IntegratorDoc {
            dt: s.integrator.dt,
            t_max: s.integrator.t_max,
            record_every: s.integrator.record_every,
        },
        quadrature: QuadratureDoc {
            nu_panels: s.quadrature.nu_panels,
            nu_floor: s.quadrature.nu_floor,
            panels_per_decade: s.quadrature.panels_per_decade,
        },
    };
    toml::to_string(&doc).expect("scenario documents always serialize")
}
