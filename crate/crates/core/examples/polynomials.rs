//! Exact bivariate polynomials: parsing, canonical form, discriminant, resultant.

use rmcalc::algops::resultant;
use rmcalc::bipoly::BiPoly;

fn main() -> rmcalc::Result<()> {
    let raw = BiPoly::parse("(2*z*m^2 + (1+z)*m + 1)^2 * (z^2+1)", "m", "z")?;
    let canon = raw.canonicalize()?;
    println!("raw       {}", raw.pretty());
    println!("canonical {}", canon.pretty());
    println!("discriminant in m: {}", canon.discriminant_u()?);

    let a = BiPoly::parse("m^2 - z", "m", "z")?;
    let b = BiPoly::parse("m - 1", "m", "z")?;
    let r = resultant(a.rows(), b.rows())?;
    println!("Res_m(m^2 - z, m - 1) = {r}");
    Ok(())
}
