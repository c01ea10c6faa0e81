//! Sums and products of algebraic functions, through both constructions,
//! checked against the roots of a numeric slice.

use rmcalc::algops::{alg_add, alg_mul, slice_at, Strategy};
use rmcalc::bipoly::{rat, BiPoly};
use rmcalc::numeric::roots;

fn main() -> rmcalc::Result<()> {
    let l1 = BiPoly::parse("u^2 - v", "u", "v")?;
    let l2 = BiPoly::parse("u^2 - 2*u - v", "u", "v")?;
    for (name, f) in [("sum", alg_add as fn(&_, &_, _) -> _), ("product", alg_mul)] {
        let res = f(&l1, &l2, Strategy::Resultant)?;
        let comp = f(&l1, &l2, Strategy::Companion)?;
        println!("{name}: {}", res.pretty());
        println!("  companion route agrees: {}", res.equivalent(&comp));
        let v0 = rat(3, 2);
        let mut rs: Vec<String> = roots(&slice_at(&res, &v0)).iter().map(|z| format!("{:.6}", z.re)).collect();
        rs.sort();
        println!("  roots at v = 3/2: {}", rs.join(" "));
    }
    Ok(())
}
