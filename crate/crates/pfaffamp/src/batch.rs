//! Parallel batch evaluation with results that do not depend on the number
//! of threads: work is split into fixed blocks, every value is computed
//! independently, results are assembled in index order and summed by the
//! same pairwise tree as the sequential code.

use pfaffamp_core::postmeasure::{scan_point, ScanRow, ScanSetting};
use pfaffamp_core::probentropy::{check_enumeration, probability, ProbabilityPath, ProbabilityTable};
use pfaffamp_core::{amplitude, AmplitudeRequest, Complex64, EvalPath, GaussianPureState, PauliBasis, SpinConfiguration};
use rayon::prelude::*;

/// Configurations per parallel block.
pub const BLOCK: u64 = 1 << 14;

/// All `2^L` probabilities, refusing `L > limit`.
pub fn probability_table(
    state: &GaussianPureState,
    basis: &PauliBasis,
    path: ProbabilityPath,
    limit: usize,
) -> pfaffamp_core::Result<ProbabilityTable> {
    let l = state.len();
    check_enumeration(l, limit)?;
    let n = 1u64 << l;
    let blocks: Vec<Vec<f64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            (b * BLOCK..((b + 1) * BLOCK).min(n))
                .map(|k| probability(state, basis, &SpinConfiguration::from_index(l, k), path))
                .collect::<pfaffamp_core::Result<Vec<f64>>>()
        })
        .collect::<pfaffamp_core::Result<_>>()?;
    ProbabilityTable::new(l, blocks.concat())
}

/// Amplitudes of the given configurations, in order.
pub fn amplitudes(
    state: &GaussianPureState,
    basis: &PauliBasis,
    configs: &[SpinConfiguration],
    path: EvalPath,
) -> pfaffamp_core::Result<Vec<Complex64>> {
    configs.par_iter().map(|c| amplitude(&AmplitudeRequest { state, basis, config: c, path })).collect()
}

/// Decay scan with the separations evaluated in parallel; rows for each `d`
/// in the given order, then each `alpha`.
pub fn decay_scan(
    state: &GaussianPureState,
    setting: ScanSetting,
    alphas: &[f64],
    d_values: &[usize],
    a1: usize,
    a2: usize,
) -> pfaffamp_core::Result<Vec<ScanRow>> {
    let parts: Vec<Vec<ScanRow>> =
        d_values.par_iter().map(|&d| scan_point(state, setting, alphas, d, a1, a2)).collect::<pfaffamp_core::Result<_>>()?;
    Ok(parts.concat())
}
