use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{MhDiagnostics, ReconstructionEnsemble};
use crate::device::save_map_csv;
use crate::error::Result;

/// Writes `member_NNNN.csv` for every reconstruction and `weights.csv`
/// (`member,weight,log_weight,clamped`) into `dir`.
pub fn export_ensemble(ensemble: &ReconstructionEnsemble, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut weights = String::from("member,weight,log_weight,clamped\n");
    for (m, member) in ensemble.members().iter().enumerate() {
        save_map_csv(&member.map, dir.join(format!("member_{m:04}.csv")))?;
        let _ = writeln!(
            weights,
            "{m},{},{},{}",
            ensemble.weights()[m],
            ensemble.log_weights()[m],
            member.clamped
        );
    }
    fs::write(dir.join("weights.csv"), weights)?;
    Ok(())
}

/// Writes `acceptance.csv` (per chain) and `log_likelihood.csv` (per iteration).
pub fn export_diagnostics(diag: &MhDiagnostics, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut acc = String::from("chain,acceptance\n");
    for (i, a) in diag.acceptance_rates.iter().enumerate() {
        let _ = writeln!(acc, "{i},{a}");
    }
    let mut ll = String::from("iteration,mean_log_likelihood\n");
    for (i, v) in diag.log_likelihood_trace.iter().enumerate() {
        let _ = writeln!(ll, "{},{v}", i + 1);
    }
    fs::write(dir.join("acceptance.csv"), acc)?;
    fs::write(dir.join("log_likelihood.csv"), ll)?;
    Ok(())
}
