//! Concurrent evaluation of frequency grids.
//!
//! Samples are independent, so the grid is mapped in parallel and collected
//! in order; each value is computed by the same code path regardless of the
//! thread that runs it, which keeps output bit-identical across thread counts.

use pcband_core::bandscan::{self, BandStructure, ScanConfig};
use pcband_core::{DispersionModel, DispersionSample, Medium};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::CliError;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "PCBAND_THREADS";

/// Worker count requested through [`THREADS_ENV`], if any.
pub fn requested_threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

pub fn pool(threads: Option<usize>) -> Result<ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))
}

pub fn evaluate_grid(
    pool: &ThreadPool,
    model: &DispersionModel,
    omegas: &[f64],
) -> Vec<pcband_core::Result<DispersionSample>> {
    pool.install(|| omegas.par_iter().map(|&w| model.evaluate(w)).collect())
}

pub fn scan(pool: &ThreadPool, medium: &Medium, cfg: &ScanConfig) -> Result<BandStructure, CliError> {
    Ok(bandscan::scan_with(medium, cfg, |model, omegas| evaluate_grid(pool, model, omegas))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pcband_core::{CanonicalProfile, Profile};

    #[test]
    fn parallel_scan_is_identical_to_sequential() {
        let medium = Medium::Profile(Profile::canonical(CanonicalProfile::Sinusoidal));
        let cfg = ScanConfig::new(0.01, 1.2, 120);
        let seq = bandscan::scan(&medium, &cfg).unwrap();
        for threads in [1, 3] {
            let par = scan(&pool(Some(threads)).unwrap(), &medium, &cfg).unwrap();
            assert_eq!(par, seq);
        }
    }
}
