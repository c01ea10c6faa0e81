//! The expression language: parse, print, evaluate.

use rmcalc::dsl::parse;

fn main() -> rmcalc::Result<()> {
    for s in ["wigner + wigner * wishart(0.4)", "free_add(Wigner, wishart(2))", "corner(blockdiag(wigner, identity, 2/5), 5/2, 1)"] {
        let e = parse(s)?;
        println!("{s}\n  -> {e}\n  -> {}", e.distribution()?.poly().pretty());
    }
    if let Err(e) = parse("freeadd(wigner,\n  bogus(1))") {
        println!("error: {e}");
    }
    Ok(())
}
