//! Density, atoms and support of a free product with a point mass at zero.

use rmcalc::density::{default_range, density_grid};
use rmcalc::dsl::parse;

fn main() -> rmcalc::Result<()> {
    let d = parse("wigner * wishart(2)")?.distribution()?;
    let (lo, hi) = default_range(&d)?;
    let p = density_grid(&d, lo, hi, 401)?;
    for a in &p.atoms {
        println!("atom at {:.6} with weight {:.6}", a.location, a.weight);
    }
    println!("support {:?}", p.support.intervals);
    println!("total mass {:.6}", p.total_mass);
    for (x, f) in p.grid.iter().zip(&p.density).step_by(40) {
        println!("{x:>10.4} {f:.6}");
    }
    Ok(())
}
