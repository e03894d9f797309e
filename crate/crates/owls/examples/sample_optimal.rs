//! Draw from the optimal sampling measure μ_m = (k_m/m)·ρ and check the
//! defining weight identity w(x)·k_m(x) = m pointwise.
//!
//! Run: cargo run --release --example sample_optimal

use owls::sampler::Sampler;
use owls::{ApproximationSpace, BasisFamily, Kernel};

fn main() -> owls::Result<()> {
    let space = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 10);
    let sampler = Sampler::new(&space, Kernel::Auto)?;
    let sample = sampler.draw(500, 42)?;

    println!("space: Legendre/uniform, d = 1, m = {}", space.size());
    println!(
        "drew {} points from the optimal measure (seed 42)\n",
        sample.len()
    );

    println!("first five points with their weights w = m / k_m:");
    for i in 0..5 {
        let x = sample.point(i);
        println!(
            "  x = {:+.6}   w = {:.6}   k_m(x) = {:.6}",
            x[0],
            sample.weights[i],
            space.christoffel(x)?
        );
    }

    let m = space.size() as f64;
    let max_gap = (0..sample.len())
        .map(|i| (sample.weights[i] * space.christoffel(sample.point(i)).unwrap() - m).abs())
        .fold(0.0f64, f64::max);
    println!("\nmax |w·k_m - m| over the sample: {max_gap:.3e}");

    let (lo, hi) = sample
        .weights
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &w| {
            (lo.min(w), hi.max(w))
        });
    println!("weight range: [{lo:.4}, {hi:.4}] — small near ±1 where k_m is large");
    Ok(())
}
