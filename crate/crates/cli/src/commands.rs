//! The `measure`, `broadcast` and `recover` commands.

use std::path::Path;

use qbroadcast::broadcast::{broadcast_report, BroadcastOptions, DiscordOptions};
use qbroadcast::classicality::ClassifyOptions;
use qbroadcast::measures::{conditional_mutual_information, entropy, fidelity, mutual_information};
use qbroadcast::objects::DensityMatrix;
use qbroadcast::recovery::recovery_report;
use qbroadcast::sdp::SdpOptions;
use qbroadcast::Error;

use crate::generate::generate;
use crate::report::{InputInfo, Report};
use crate::statefile::StateFile;

/// Slack allowed on the inequality checks printed in reports.
pub const CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tolerance: f64,
    pub sdp_max_iters: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            sdp_max_iters: 500,
            seed: 0,
            restarts: 32,
        }
    }
}

impl Settings {
    pub fn sdp(&self) -> SdpOptions {
        SdpOptions {
            tolerance: self.tolerance,
            max_iterations: self.sdp_max_iters,
            seed: self.seed,
        }
    }

    pub fn discord(&self) -> DiscordOptions {
        DiscordOptions {
            seed: self.seed,
            restarts: self.restarts,
            ..DiscordOptions::default()
        }
    }

    pub fn broadcast(&self) -> BroadcastOptions {
        BroadcastOptions {
            sdp: self.sdp(),
            discord: self.discord(),
            classify: ClassifyOptions {
                seed: self.seed,
                ..ClassifyOptions::default()
            },
            ..BroadcastOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad input: exit code 2.
    Invalid(String),
    /// The computation failed or a check did not hold: exit code 1.
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => 2,
            Self::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Invalid(m) => write!(f, "invalid input: {m}"),
            Self::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::InvalidSubsystems(_) | Error::TooLarge(_) => {
                Self::Invalid(e.to_string())
            }
            _ => Self::Compute(e.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedState {
    pub file: StateFile,
    pub state: DensityMatrix,
}

impl LoadedState {
    pub fn from_file(file: StateFile) -> Result<Self, CliError> {
        let state = file.to_density().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(Self { file, state })
    }
}

/// Reads `path`, or builds the `--gen` state when no path is given.
pub fn load(path: Option<&Path>, gen: Option<&str>, seed: u64) -> Result<LoadedState, CliError> {
    let file = match (path, gen) {
        (Some(p), None) => StateFile::read(p).map_err(|e| CliError::Invalid(e.to_string()))?,
        (None, Some(g)) => generate(g, seed).map_err(CliError::Invalid)?,
        (Some(_), Some(_)) => return Err(CliError::Invalid("give either --input or --gen, not both".into())),
        (None, None) => {
            return Err(CliError::Invalid(
                "a state is required: pass --input <file> or --gen <spec>".into(),
            ))
        }
    };
    LoadedState::from_file(file)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureQuantity {
    Entropy,
    MutualInfo,
    Cmi,
    Fidelity,
}

/// Parses `"0|1"` or `"0|2|1"` style subsystem groups; factors inside a
/// group are separated by commas.
pub fn parse_parts(spec: &str, n_factors: usize) -> Result<Vec<Vec<usize>>, CliError> {
    let groups: Vec<Vec<usize>> = spec
        .split('|')
        .map(|g| {
            g.split(',')
                .map(|t| {
                    let t = t.trim();
                    t.parse::<usize>()
                        .map_err(|_| CliError::Invalid(format!("bad subsystem index {t:?} in parts {spec:?}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let mut seen = vec![false; n_factors];
    for &i in groups.iter().flatten() {
        if i >= n_factors {
            return Err(CliError::Invalid(format!(
                "subsystem {i} out of range for {n_factors} factors"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(CliError::Invalid(format!(
                "subsystem {i} appears twice in parts {spec:?}"
            )));
        }
    }
    Ok(groups)
}

pub fn measure(
    quantity: MeasureQuantity,
    input: &LoadedState,
    input2: Option<&LoadedState>,
    parts: Option<&str>,
    settings: &Settings,
) -> Result<Report, CliError> {
    let mut report = Report::new("measure", settings.seed, settings.tolerance);
    report.inputs.push(InputInfo::of(&input.file));
    let rho = &input.state;
    let n = rho.dims().len();
    match quantity {
        MeasureQuantity::Entropy => match parts {
            None => report.quantity("entropy", entropy(rho)),
            Some(p) => {
                let groups = parse_parts(p, n)?;
                let sys = groups.concat();
                let value = qbroadcast::measures::subsystem_entropy(rho, &sys)?;
                report.quantity(&format!("entropy[{p}]"), value);
            }
        },
        MeasureQuantity::MutualInfo => {
            let default = format!("0|{}", (1..n).map(|i| i.to_string()).collect::<Vec<_>>().join(","));
            let spec = parts.unwrap_or(&default);
            match parse_parts(spec, n)?.as_slice() {
                [a, b] if n >= 2 => report.quantity(&format!("mutual_info[{spec}]"), mutual_information(rho, a, b)?),
                _ => {
                    return Err(CliError::Invalid(format!(
                        "mutual-info needs two parts A|B, got {spec:?}"
                    )))
                }
            }
        }
        MeasureQuantity::Cmi => {
            let spec = parts.unwrap_or("0|2|1");
            match parse_parts(spec, n)?.as_slice() {
                [a, c, b] => report.quantity(&format!("cmi[{spec}]"), conditional_mutual_information(rho, a, c, b)?),
                _ => return Err(CliError::Invalid(format!("cmi needs three parts A|C|B, got {spec:?}"))),
            }
        }
        MeasureQuantity::Fidelity => {
            let other = input2.ok_or_else(|| CliError::Invalid("fidelity needs a second state (--input2)".into()))?;
            report.inputs.push(InputInfo::of(&other.file));
            if other.state.dims() != rho.dims() {
                return Err(CliError::Invalid(format!(
                    "fidelity needs equal dims, got {:?} and {:?}",
                    rho.dims(),
                    other.state.dims()
                )));
            }
            report.quantity("fidelity", fidelity(rho, &other.state)?);
        }
    }
    Ok(report)
}

pub fn broadcast(input: &LoadedState, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("broadcast", settings.seed, settings.tolerance);
    report.inputs.push(InputInfo::of(&input.file));
    let r = broadcast_report(&input.state, &settings.broadcast())?;
    let verdict = if r.exact.classical_classical {
        "classical-classical"
    } else if r.exact.classical_on_b {
        "classical-on-B"
    } else if r.exact.classical_on_a {
        "classical-on-A"
    } else {
        "non-classical"
    };
    report.quantity(&format!("exact: {verdict}"), r.exact.witness);
    report.certified("f_max", r.f_max.value, settings.tolerance);
    report.quantity("f_max_dual_bound", r.f_max.dual_bound);
    report.certified("f_eb", r.f_eb.value, settings.tolerance);
    report.quantity("f_eb_dual_bound", r.f_eb.dual_bound);
    report.quantity("f_eb_lower_bound", r.f_eb.lower_bound);
    report.quantity("discord", r.discord.value);
    report.quantity("classical_mi", r.discord.classical_mi);
    report.quantity("mutual_info", r.discord.mutual_information);
    report.quantity("discord_bound_eb", r.discord_bound_eb);
    report.quantity("discord_bound_max", r.discord_bound_max);
    report.solver("f_max", &r.f_max.certificate);
    report.solver("f_eb", &r.f_eb.certificate);
    report.check(
        "f_max >= f_eb",
        r.fidelity_order_holds(CHECK_TOL),
        r.f_max.value - r.f_eb.value,
        ">= -1e-6",
    );
    report.check(
        "discord >= -2 log2 f_eb",
        r.eb_bound_holds(CHECK_TOL),
        r.discord.value - r.discord_bound_eb,
        ">= -1e-6",
    );
    report.check(
        "discord >= -2 log2 f_max",
        r.max_bound_holds(CHECK_TOL),
        r.discord.value - r.discord_bound_max,
        ">= -1e-6",
    );
    report.quantity(
        "discord_restarts_converged",
        if r.discord.converged { 1.0 } else { 0.0 },
    );
    Ok(report)
}

pub fn recover(input: &LoadedState, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("recover", settings.seed, settings.tolerance);
    report.inputs.push(InputInfo::of(&input.file));
    let r = recovery_report(&input.state, &settings.sdp())?;
    report.quantity("cmi", r.cmi);
    report.quantity("petz_fidelity", r.petz_fidelity);
    report.certified("optimal_fidelity", r.optimal_fidelity, settings.tolerance);
    report.quantity("optimal_dual_bound", r.optimal.dual_bound);
    report.quantity("bound", r.bound);
    report.quantity("petz_sigma_residual", r.sigma_recovery_residual);
    report.solver("optimal_recovery", &r.optimal.certificate);
    report.check(
        "optimal >= 2^(-cmi/2)",
        r.bound_holds(CHECK_TOL),
        r.optimal_fidelity - r.bound,
        ">= -1e-6",
    );
    report.check(
        "optimal >= petz",
        r.optimal_fidelity >= r.petz_fidelity - CHECK_TOL,
        r.optimal_fidelity - r.petz_fidelity,
        ">= -1e-6",
    );
    report.check(
        "petz fixed point",
        r.sigma_recovery_residual < 1e-8,
        r.sigma_recovery_residual,
        "< 1e-8",
    );
    Ok(report)
}
