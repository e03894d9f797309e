//! Optimal sampling is dimension-robust: the stability budget depends on
//! m alone, never on d. Here d = 100 with a downward-closed space of
//! m = 30 indices; the sequential conditional sampler walks all 100
//! coordinates per point and the Gramian still concentrates at identity.
//!
//! Run: cargo run --release --example high_dim_smoke

use owls::experiments::{minimal_n, run_cell, sequence_space, Method};
use owls::{Kernel, SequenceStrategy};
use std::time::Instant;

fn main() -> owls::Result<()> {
    let d = 100;
    let m = 30;
    let n = 400;
    let space = sequence_space(
        owls::BasisFamily::ChebyshevArcsine,
        d,
        SequenceStrategy::TotalDegreeLex,
        0,
        m,
    )?;
    println!(
        "Chebyshev/arcsine, d = {d}, m = {m}, n = {n} (minimal_n = {})",
        minimal_n(m, 1.0)
    );

    let start = Instant::now();
    let cell = run_cell(&space, Method::Weighted, Kernel::Auto, n, 10, 5)?;
    let elapsed = start.elapsed();

    println!(
        "\n10 repetitions in {elapsed:.2?} ({:.1} ms per draw+Gramian)",
        elapsed.as_secs_f64() * 100.0
    );
    println!("Pr{{cond ≤ 3}} = {:.2}", cell.empirical_probability);
    println!("mean cond(G)  = {:.4}", cell.mean_cond);
    println!("mean ‖G-I‖₂   = {:.4}", cell.mean_dist);
    println!("\nn here is below the worst-case budget yet the weighted Gramian is");
    println!("already stable — the guarantee depends on m, not on the ambient d.");
    Ok(())
}
