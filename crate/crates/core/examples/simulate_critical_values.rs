//! Regenerate the simulated rows of the critical-value table (PGFF and
//! Breitung), printed as CSV lines.
//!
//! cargo run --release --example simulate_critical_values -- [n_reps]

use unitroot_ml::urtests::{simulate_null_statistics, quantile, TestId};

fn main() -> unitroot_ml::Result<()> {
    let n_reps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    // Each band is simulated at a representative length.
    let bands = [(1, 100, 80), (101, 250, 175), (251, 1_000_000, 450)];
    for test in [TestId::Pgff, TestId::Breitung] {
        for &det in test.allowed_det_specs() {
            for &(lo, hi, n) in &bands {
                let mut stats = simulate_null_statistics(test, det, n, n_reps, 20_240_611)?;
                stats.sort_by(f64::total_cmp);
                for alpha in [0.01, 0.05, 0.10] {
                    println!("{},{},{lo},{hi},{alpha},{:.6}", test.name(), det.name(), quantile(&stats, alpha));
                }
            }
        }
    }
    Ok(())
}
