//! Noise robustness: with u ≡ 0 and centered Gaussian noise of variance σ²,
//! the expected squared L²(ρ) error of the weighted fit is K̄σ²/n with
//! K̄ = m for optimal weights — linear in σ², inverse in n.
//!
//! Run: cargo run --release --example noisy_fit

use owls::experiments::{error_runs, minimal_n};
use owls::lsq::ErrorMethod;
use owls::noise::NoiseModel;
use owls::{ApproximationSpace, BasisFamily, Kernel, Target, Variant};

fn main() -> owls::Result<()> {
    let m = 5;
    let n = minimal_n(m, 1.0);
    let reps = 50;
    let space = ApproximationSpace::univariate(BasisFamily::LegendreUniform, m);
    println!("u ≡ 0, m = {m}, n = {n}, {reps} repetitions per σ\n");
    println!("    σ     mean ‖u_W‖²      theory mσ²/n     ratio");
    for sigma in [0.1, 0.2, 0.4] {
        let runs = error_runs(
            &space,
            &Target::Zero,
            n,
            reps,
            77,
            Variant::Plain,
            &NoiseModel::gaussian(sigma),
            Kernel::Auto,
            ErrorMethod::TensorQuadrature { nodes: 32 },
        )?;
        let mean_sq = runs.iter().map(|e| e * e).sum::<f64>() / runs.len() as f64;
        let theory = m as f64 * sigma * sigma / n as f64;
        println!(
            "  {sigma:.1}    {mean_sq:.6e}    {theory:.6e}    {:.3}",
            mean_sq / theory
        );
    }
    println!("\ndoubling σ quadruples the mean-square error (slope 2 on log-log).");
    Ok(())
}
