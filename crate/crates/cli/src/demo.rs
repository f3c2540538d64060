//! Demonstration suites: run the no-go and bound checks over the seeded
//! corpus and record one pass/fail line per case.

use qbroadcast::broadcast::{
    average_mi_loss, broadcast_report, computational_prep, f_max_broadcast_with, measurement_copy_broadcaster,
    DEFAULT_MAX_DIM_B,
};
use qbroadcast::classicality::{
    basis_broadcaster, classify_with, common_eigenbasis, verify_broadcast, verify_local_broadcast,
    verify_unilocal_broadcast, ClassifyOptions,
};
use qbroadcast::corpus::{
    candidate_broadcasters, classical_classical_corpus, classical_on_b_corpus, commuting_pair, non_classical_corpus,
    non_commuting_pair, pair_broadcasters, tripartite_corpus, CorpusState,
};
use qbroadcast::measures::mutual_information;
use qbroadcast::objects::{Channel, DensityMatrix};
use qbroadcast::random::derive_seed;
use qbroadcast::recovery::recovery_report;

use crate::commands::{CliError, Settings};
use crate::report::Report;

pub const SUITES: [&str; 5] = [
    "no-broadcast",
    "no-local-broadcast",
    "no-unilocal-broadcast",
    "recoverability",
    "discord-bounds",
];

/// Exact-broadcast residual threshold.
pub const EXACT_TOL: f64 = 1e-9;
/// Minimum gap that counts as a visible failure to broadcast.
pub const GAP: f64 = 1e-3;
/// Slack on inequalities between certified values.
pub const BOUND_TOL: f64 = 1e-6;

/// Corpus sizes of the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DemoSizes {
    pub pairs: usize,
    pub classical_on_b: usize,
    pub classical_classical: usize,
    pub non_classical: usize,
    pub tripartite: usize,
}

impl Default for DemoSizes {
    fn default() -> Self {
        Self {
            pairs: 50,
            classical_on_b: 20,
            classical_classical: 10,
            non_classical: 20,
            tripartite: 30,
        }
    }
}

fn classify_opts(s: &Settings) -> ClassifyOptions {
    ClassifyOptions {
        seed: s.seed,
        ..ClassifyOptions::default()
    }
}

/// Runs `suite` (or every suite for `"all"`) into one report.
pub fn demo(suite: &str, settings: &Settings, sizes: &DemoSizes) -> Result<Report, CliError> {
    let mut report = Report::new(&format!("demo {suite}"), settings.seed, settings.tolerance);
    let selected: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(CliError::Invalid(format!(
            "unknown suite {suite:?}; expected all or one of {}",
            SUITES.join(", ")
        )));
    };
    for s in selected {
        run_suite(s, settings, sizes, &mut report)?;
    }
    Ok(report)
}

pub fn run_suite(suite: &str, settings: &Settings, sizes: &DemoSizes, report: &mut Report) -> Result<(), CliError> {
    match suite {
        "no-broadcast" => no_broadcast(settings, sizes, report),
        "no-local-broadcast" => no_local_broadcast(settings, sizes, report),
        "no-unilocal-broadcast" => no_unilocal_broadcast(settings, sizes, report),
        "recoverability" => recoverability(settings, sizes, report),
        "discord-bounds" => discord_bounds(settings, sizes, report),
        _ => Err(CliError::Invalid(format!("unknown suite {suite:?}"))),
    }
}

fn no_broadcast(s: &Settings, sizes: &DemoSizes, report: &mut Report) -> Result<(), CliError> {
    for i in 0..sizes.pairs {
        let d = 2 + i % 2;
        let (rho, rho2) = commuting_pair(derive_seed(s.seed, 1000 + i as u64), d)?;
        let (basis, _) = common_eigenbasis(&[rho.matrix().clone(), rho2.matrix().clone()], s.seed)?;
        let ch = basis_broadcaster(&basis)?;
        let worst = verify_broadcast(&rho, &ch)?
            .max()
            .max(verify_broadcast(&rho2, &ch)?.max());
        report.check(
            format!("no-broadcast: commuting pair #{i} (d={d}) broadcast residual"),
            worst < EXACT_TOL,
            worst,
            "< 1e-9",
        );
    }
    for i in 0..sizes.pairs {
        let d = 2 + i % 2;
        let (rho, rho2) = non_commuting_pair(derive_seed(s.seed, 2000 + i as u64), d);
        let mut best = f64::INFINITY;
        for (_, ch) in pair_broadcasters(&rho, &rho2)? {
            let worst = verify_broadcast(&rho, &ch)?
                .max()
                .max(verify_broadcast(&rho2, &ch)?.max());
            best = best.min(worst);
        }
        report.check(
            format!("no-broadcast: non-commuting pair #{i} (d={d}) smallest residual over corpus broadcasters"),
            best > GAP,
            best,
            "> 1e-3",
        );
    }
    Ok(())
}

/// `max_i [I(A:B) − I(A_i:B_i)]` after local broadcasting with `(lambda, gamma)`.
fn local_mi_deficit(rho: &DensityMatrix, lambda: &Channel, gamma: &Channel) -> Result<f64, CliError> {
    let out = gamma.apply_on_subsystem(&lambda.apply_on_subsystem(rho, 0)?, 2)?;
    let total = mutual_information(rho, &[0], &[1])?;
    let i1 = mutual_information(&out.reduced(&[0, 2])?, &[0], &[1])?;
    let i2 = mutual_information(&out.reduced(&[1, 3])?, &[0], &[1])?;
    Ok((total - i1).max(total - i2))
}

fn no_local_broadcast(s: &Settings, sizes: &DemoSizes, report: &mut Report) -> Result<(), CliError> {
    for c in classical_classical_corpus(s.seed, sizes.classical_classical)? {
        let v = classify_with(&c.state, &classify_opts(s))?;
        let (Some(ba), Some(bb)) = (v.a.basis.as_ref(), v.b.basis.as_ref()) else {
            report.check(
                format!("no-local-broadcast: {} classified classical-classical", c.label),
                false,
                v.witness,
                "both sides classical",
            );
            continue;
        };
        let (la, gb) = (basis_broadcaster(ba)?, basis_broadcaster(bb)?);
        let res = verify_local_broadcast(&c.state, &la, &gb)?.max();
        report.check(
            format!("no-local-broadcast: {} two-sided broadcast residual", c.label),
            res < EXACT_TOL,
            res,
            "< 1e-9",
        );
        let deficit = local_mi_deficit(&c.state, &la, &gb)?;
        report.check(
            format!("no-local-broadcast: {} mutual information kept on both copies", c.label),
            deficit.abs() < 1e-8,
            deficit,
            "|deficit| < 1e-8",
        );
    }
    for c in non_classical_corpus(s.seed, sizes.non_classical)? {
        let cands_a = candidate_broadcasters(&c.state.reduced(&[0])?)?;
        let cands_b = candidate_broadcasters(&c.state.reduced(&[1])?)?;
        let mut least = f64::INFINITY;
        for (_, la) in &cands_a {
            for (_, gb) in &cands_b {
                least = least.min(local_mi_deficit(&c.state, la, gb)?);
            }
        }
        report.check(
            format!(
                "no-local-broadcast: {} smallest mutual-information deficit over corpus channels",
                c.label
            ),
            least > GAP,
            least,
            "> 1e-3",
        );
    }
    Ok(())
}

fn no_unilocal_broadcast(s: &Settings, sizes: &DemoSizes, report: &mut Report) -> Result<(), CliError> {
    for c in classical_on_b_corpus(s.seed, sizes.classical_on_b)? {
        let v = classify_with(&c.state, &classify_opts(s))?;
        match v.b.basis.as_ref() {
            Some(b) => {
                let res = verify_unilocal_broadcast(&c.state, &basis_broadcaster(b)?)?.max();
                report.check(
                    format!("no-unilocal-broadcast: {} exact broadcast residual", c.label),
                    res < EXACT_TOL,
                    res,
                    "< 1e-9",
                );
            }
            None => report.check(
                format!("no-unilocal-broadcast: {} classified classical on B", c.label),
                false,
                v.b.witness,
                "classical on B",
            ),
        }
        let f = f_max_broadcast_with(&c.state, &s.sdp(), DEFAULT_MAX_DIM_B)?;
        report.check(
            format!("no-unilocal-broadcast: {} f_max", c.label),
            (f.value - 1.0).abs() <= BOUND_TOL,
            f.value,
            "1 ± 1e-6",
        );
    }
    for c in non_classical_corpus(s.seed, sizes.non_classical)? {
        let f = f_max_broadcast_with(&c.state, &s.sdp(), DEFAULT_MAX_DIM_B)?;
        report.check(
            format!("no-unilocal-broadcast: {} f_max", c.label),
            f.value <= 1.0 - GAP,
            f.value,
            "<= 1 - 1e-3",
        );
        let residual = verify_unilocal_broadcast(&c.state, &f.channel)?.max();
        report.check(
            format!("no-unilocal-broadcast: {} residual of the optimal channel", c.label),
            residual > GAP,
            residual,
            "> 1e-3",
        );
    }
    Ok(())
}

fn recoverability(s: &Settings, sizes: &DemoSizes, report: &mut Report) -> Result<(), CliError> {
    for c in tripartite_corpus(s.seed, sizes.tripartite)? {
        let r = recovery_report(&c.state, &s.sdp())?;
        report.check(
            format!("recoverability: {} optimal - 2^(-cmi/2)", c.label),
            r.bound_holds(BOUND_TOL),
            r.optimal_fidelity - r.bound,
            ">= -1e-6",
        );
        if r.cmi < 1e-9 {
            report.check(
                format!("recoverability: {} markov recovery fidelity", c.label),
                (r.optimal_fidelity - 1.0).abs() <= BOUND_TOL,
                r.optimal_fidelity,
                "1 ± 1e-6",
            );
        }
        report.check(
            format!("recoverability: {} petz fixed-point residual", c.label),
            r.sigma_recovery_residual < 1e-8,
            r.sigma_recovery_residual,
            "< 1e-8",
        );
    }
    Ok(())
}

/// Every bipartite state the suites use.
pub fn bipartite_corpus(seed: u64, sizes: &DemoSizes) -> Result<Vec<(CorpusState, bool)>, CliError> {
    let mut out: Vec<(CorpusState, bool)> = Vec::new();
    for c in classical_classical_corpus(seed, sizes.classical_classical)? {
        out.push((c, true));
    }
    for c in classical_on_b_corpus(seed, sizes.classical_on_b)? {
        out.push((c, true));
    }
    for c in non_classical_corpus(seed, sizes.non_classical)? {
        out.push((c, false));
    }
    Ok(out)
}

fn discord_bounds(s: &Settings, sizes: &DemoSizes, report: &mut Report) -> Result<(), CliError> {
    for (c, classical_b) in bipartite_corpus(s.seed, sizes)? {
        let r = broadcast_report(&c.state, &s.broadcast())?;
        let name = &c.label;
        report.check(
            format!("discord-bounds: {name} D + 2 log2 F^EB"),
            r.eb_bound_holds(BOUND_TOL),
            r.discord.value - r.discord_bound_eb,
            ">= -1e-6",
        );
        report.check(
            format!("discord-bounds: {name} F^max - F^EB"),
            r.fidelity_order_holds(BOUND_TOL),
            r.f_max.value - r.f_eb.value,
            ">= -1e-6",
        );
        if classical_b {
            report.check(
                format!("discord-bounds: {name} discord"),
                r.discord.value < 1e-7,
                r.discord.value,
                "< 1e-7",
            );
        }
        let k = r.discord.best_povm.len();
        for n in [2, 3] {
            let ch = measurement_copy_broadcaster(&r.discord.best_povm, &computational_prep(k), n)?;
            let loss = average_mi_loss(&c.state, &ch)?;
            report.check(
                format!("discord-bounds: {name} measurement-copy loss - discord (n={n})"),
                (loss - r.discord.value).abs() <= BOUND_TOL,
                loss - r.discord.value,
                "|.| <= 1e-6",
            );
        }
        let mut channels = candidate_broadcasters(&c.state.reduced(&[1])?)?;
        channels.push(("optimal broadcast".into(), r.f_max.channel.clone()));
        let mut least = f64::INFINITY;
        for (_, ch) in &channels {
            least = least.min(average_mi_loss(&c.state, ch)?);
        }
        report.check(
            format!("discord-bounds: {name} smallest loss"),
            least >= -1e-8,
            least,
            ">= -1e-8",
        );
        if !classical_b {
            report.check(
                format!("discord-bounds: {name} smallest loss over corpus channels (non-classical)"),
                least > GAP && r.discord.value > GAP,
                least.min(r.discord.value),
                "> 1e-3",
            );
        }
    }
    Ok(())
}
