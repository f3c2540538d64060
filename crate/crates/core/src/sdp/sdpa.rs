//! Plain-text dump in sparse SDPA format (`.dat-s`) of the real-embedded
//! problem, for cross-checking with external solvers.
//!
//! SDPA solves `min Σ c_i y_i` s.t. `Σ y_i F_i − F_0 ⪰ 0` in the primal and
//! `max ⟨F_0, X⟩` s.t. `⟨F_i, X⟩ = c_i` in the dual. Writing `F_0 = ½φ(C)`,
//! `F_i = ½φ(A_i)` and `c = b` makes the SDPA dual the embedded problem, so
//! the SDPA optimum equals ours.
//!
//! Layout: a comment line, `m`, the block count, the block sizes, the vector `c`,
//! then one line `matno blkno i j value` per upper-triangle entry (1-based).

use std::fmt::Write as _;

use super::embed::embed_coefficient;
use super::problem::SdpProblem;

pub fn write_sdpa(p: &SdpProblem) -> String {
    let mut out = String::new();
    let m = p.constraints().len();
    let _ = writeln!(out, "\"real-embedded Hermitian SDP, {m} constraints\"");
    let _ = writeln!(out, "{m}");
    let _ = writeln!(out, "{}", p.blocks().len());
    let sizes: Vec<String> = p.blocks().iter().map(|n| (2 * n).to_string()).collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let rhs: Vec<String> = p.constraints().iter().map(|c| format!("{:.17e}", c.rhs)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    for (k, c) in p.objective().iter().enumerate() {
        for &(i, j, v) in &embed_coefficient(c).entries {
            let _ = writeln!(out, "0 {} {} {} {:.17e}", k + 1, i + 1, j + 1, v);
        }
    }
    for (idx, con) in p.constraints().iter().enumerate() {
        for (k, a) in &con.terms {
            for &(i, j, v) in &embed_coefficient(a).entries {
                let _ = writeln!(out, "{} {} {} {} {:.17e}", idx + 1, k + 1, i + 1, j + 1, v);
            }
        }
    }
    out
}
