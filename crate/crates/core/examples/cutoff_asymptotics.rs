//! A sharp eigenvalue cutoff makes log det diverge like (l/π) c ln c; the
//! subleading terms are fitted and removed.

use std::f64::consts::{PI, TAU};

use fermion_statesum::spectral::{cutoff_report, log_grid, CutoffScheme};

fn main() -> fermion_statesum::Result<()> {
    let (a, l) = (0.5, TAU);
    let grid = log_grid(100.0, 10_000.0, 12);
    let report = cutoff_report(a, l, &grid, CutoffScheme::Sharp)?;
    println!("κ = {:.9} (expected l/π = {:.9})", report.kappa, l / PI);
    println!("β = {:.6}, γ = {:.6}, δ = {:.6}", report.beta, report.gamma, report.delta);
    for (c, r) in report.cutoffs.iter().zip(&report.remainders) {
        println!("c = {c:>7}: log det − κ c ln c = {r:>14.6}, ratio to c ln c = {:.3e}", r / (c * c.ln()));
    }
    Ok(())
}
