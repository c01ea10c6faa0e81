//! Exact moments and free cumulants, and the recurrence they satisfy.

use rmcalc::dsl::parse;
use rmcalc::moments::{cumulant_series, fit_recurrence, moment_series};

fn main() -> rmcalc::Result<()> {
    let d = parse("inv(shift(mulwishart(inv(mulwishart(identity, 1/2)), 1/2), 1))")?.distribution()?;
    let m = moment_series(&d, 10)?;
    let k = cumulant_series(&d, 10)?;
    let show = |v: &[rmcalc::Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    println!("moments   {}", show(&m.coefficients));
    println!("cumulants {}", show(&k.coefficients));
    let r = fit_recurrence(&m, 3, 3)?;
    println!("moment recurrence: order {}, degree {}", r.order(), r.degree());
    for (j, p) in r.coefficients.iter().enumerate() {
        println!("  a(n+{j}) * ({p})");
    }
    Ok(())
}
