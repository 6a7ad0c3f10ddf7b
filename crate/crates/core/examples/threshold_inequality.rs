//! Compares the existence threshold with the Pohozaev threshold over a grid
//! of exponents, and checks that `g` decreases.

use dpgs::nonlinearity::critical_exponent;
use dpgs::verify::{g_monotonicity_check, threshold_inequality_check};
use dpgs::Dimension;

fn main() -> Result<(), dpgs::Error> {
    for n in [1, 2, 3, 4] {
        let dim = Dimension::new(n)?;
        let top = critical_exponent(dim).min(6.0) - 0.05;
        println!("n = {n}");
        for p in [1.5, 2.0, 2.5] {
            if p >= top {
                continue;
            }
            for q in [p + 0.25 * (top - p), p + 0.75 * (top - p)] {
                match threshold_inequality_check(dim, p, q) {
                    Ok(cmp) => println!(
                        "  p = {p:.2}, q = {q:.3}: {:.6e} vs {:.6e} ({})",
                        cmp.lhs,
                        cmp.rhs,
                        if cmp.passed { "holds" } else { "violated" }
                    ),
                    Err(e) => println!("  p = {p:.2}, q = {q:.3}: {e}"),
                }
            }
            if n != 2 {
                println!("  g decreasing for p = {p:.2}: {}", g_monotonicity_check(dim, p, 200)?);
            }
        }
    }
    Ok(())
}
