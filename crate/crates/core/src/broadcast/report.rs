//! All broadcast quantities of one bipartite state, with the bound chain
//! `D ≥ −2 log₂ F^EB` and `F^max ≥ F^EB`.

use super::{
    discord_bound, discord_with, f_eb_with, f_max_broadcast_with, DiscordOptions, DiscordResult, FebResult, FmaxResult,
    DEFAULT_MAX_DIM_B,
};
use crate::classicality::{classify_with, ClassicalityVerdict, ClassifyOptions};
use crate::error::Result;
use crate::objects::{DensityMatrix, Side};
use crate::sdp::SdpOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadcastOptions {
    pub sdp: SdpOptions,
    pub discord: DiscordOptions,
    pub classify: ClassifyOptions,
    pub max_dim_b: usize,
    /// Alternation rounds of the measure-prepare lower bound.
    pub eb_rounds: usize,
}

impl Default for BroadcastOptions {
    fn default() -> Self {
        Self {
            sdp: SdpOptions::default(),
            discord: DiscordOptions::default(),
            classify: ClassifyOptions::default(),
            max_dim_b: DEFAULT_MAX_DIM_B,
            eb_rounds: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BroadcastReport {
    pub f_max: FmaxResult,
    pub f_eb: FebResult,
    /// `−2 log₂ F^EB`.
    pub discord_bound_eb: f64,
    /// `−2 log₂ F^max`.
    pub discord_bound_max: f64,
    pub discord: DiscordResult,
    pub exact: ClassicalityVerdict,
}

impl BroadcastReport {
    /// `F^max ≥ F^EB − tol`.
    pub fn fidelity_order_holds(&self, tol: f64) -> bool {
        self.f_max.value >= self.f_eb.value - tol
    }

    /// `D ≥ −2 log₂ F^EB − tol`.
    pub fn eb_bound_holds(&self, tol: f64) -> bool {
        self.discord.value >= self.discord_bound_eb - tol
    }

    /// `D ≥ −2 log₂ F^max − tol`.
    pub fn max_bound_holds(&self, tol: f64) -> bool {
        self.discord.value >= self.discord_bound_max - tol
    }
}

pub fn broadcast_report(rho: &DensityMatrix, opts: &BroadcastOptions) -> Result<BroadcastReport> {
    let exact = classify_with(rho, &opts.classify)?;
    let f_max = f_max_broadcast_with(rho, &opts.sdp, opts.max_dim_b)?;
    let f_eb = f_eb_with(rho, &opts.sdp, opts.max_dim_b, opts.eb_rounds)?;
    let discord = discord_with(rho, Side::B, &opts.discord)?;
    Ok(BroadcastReport {
        discord_bound_eb: discord_bound(f_eb.value),
        discord_bound_max: discord_bound(f_max.value),
        f_max,
        f_eb,
        discord,
        exact,
    })
}
