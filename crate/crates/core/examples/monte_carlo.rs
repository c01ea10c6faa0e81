//! Sample a matrix ensemble and compare its spectrum with the limit.

use rmcalc::cli::verify;
use rmcalc::dsl::parse;
use rmcalc::sampler::Options;

fn main() -> rmcalc::Result<()> {
    for s in ["wigner", "wigner + wishart(1/2)", "compress(atomic(1/2@0, 1/2@1), 2/5)"] {
        let e = parse(s)?;
        let r = verify(&e, 150, 60, 1, 60, 0.1, Options::default())?;
        println!("{s:<40} L1 {:.4}  KS {:.4}  {}", r.comparison.l1, r.comparison.ks, if r.pass() { "PASS" } else { "FAIL" });
    }
    Ok(())
}
