//! Sequential conditional sampling factorizes μ_m into univariate mixture
//! densities φ_q(t | x_1..x_{q-1}), each a convex combination of squared
//! orthonormal polynomials against ρ.
//!
//! For d = 2, Λ = {(0,0), (1,0), (0,1)} on the uniform square, the first
//! coordinate's marginal has the closed form ψ_1(t) = (2 + 3t²)/6.
//!
//! Run: cargo run --release --example conditional_densities

use owls::{ApproximationSpace, BasisFamily, IndexSet};

fn main() -> owls::Result<()> {
    let space =
        ApproximationSpace::isotropic(BasisFamily::LegendreUniform, IndexSet::total_degree(2, 1))?;
    println!(
        "space: d = 2, Λ = {{(0,0),(1,0),(0,1)}}, m = {}\n",
        space.size()
    );

    let marginal = space.conditional_mixture(0, &[])?;
    println!("coordinate 1 marginal mixture over squared Legendre polynomials:");
    println!("  coefficients: {:?}", marginal.coeffs);
    println!("  (2/3 on degree 0, 1/3 on degree 1 — two of three indices put 0 there)\n");

    println!("   t        ψ_1(t)     (2+3t²)/6");
    for t in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let psi = marginal.density(t)?;
        let closed = (2.0 + 3.0 * t * t) / 6.0;
        println!("  {t:+.2}   {psi:.8}   {closed:.8}");
    }

    println!("\nconditionals of coordinate 2 given x_1 (they depend on the prefix):");
    for x1 in [-0.8, 0.0, 0.8] {
        let cond = space.conditional_mixture(1, &[x1])?;
        println!(
            "  x_1 = {x1:+.1}  ->  mixture coefficients {:?}",
            cond.coeffs
        );
    }
    println!("\nthe product of the conditionals telescopes back to the joint μ_m density:");
    let x = [0.3, -0.6];
    let joint = space.optimal_density(&x)?;
    let product = space.conditional_mixture(0, &[])?.density(x[0])?
        * space.conditional_mixture(1, &x[..1])?.density(x[1])?;
    println!("  at {x:?}: joint = {joint:.12}, telescoped = {product:.12}");
    Ok(())
}
