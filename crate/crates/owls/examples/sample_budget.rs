//! The sample-budget condition rule m ≤ κ(r)·n/ln n and the matrix
//! Chernoff tail bound 2m·exp(-c_δ·n/K) behind it.
//!
//! Run: cargo run --release --example sample_budget

use owls::experiments::{chernoff_exponent, chernoff_reference, condition_check, kappa, minimal_n};

fn main() {
    println!("κ(r) = (1 - ln 2)/(2 + 2r):");
    for r in [0.5, 1.0, 2.0] {
        println!("  κ({r}) = {:.11}", kappa(r));
    }

    println!("\nminimal budgets n with m ≤ κ(1)·n/ln n:");
    println!("   m   minimal n   n/(m ln m)");
    for m in 2..=8 {
        let n = minimal_n(m, 1.0);
        println!(
            "   {m}   {n:>8}    {:>7.2}",
            n as f64 / (m as f64 * (m as f64).ln())
        );
    }

    let m = 200;
    let n = minimal_n(m, 1.0);
    println!("\nat m = {m}: minimal n = {n}");
    let check = condition_check(m, n, 1.0);
    println!(
        "condition_check({m}, {n}, 1): satisfied = {}",
        check.satisfied
    );
    println!(
        "condition_check({m}, {}, 1): satisfied = {}  (one sample short)",
        n - 1,
        condition_check(m, n - 1, 1.0).satisfied
    );

    println!("\nChernoff failure bound with optimal weights (K = m), δ = 1/2:");
    println!("  c_δ = {:.11}", chernoff_exponent(0.5));
    println!(
        "  Pr{{‖G-I‖₂ > 1/2}} ≤ 2m·exp(-c·n/m) = {:.4e}",
        chernoff_reference(m, n, m as f64, 0.5)
    );
    println!("so all 100 repetitions of the table experiments succeed w.h.p.");
}
