//! One distribution in every encoding, and back to the Stieltjes transform.

use rmcalc::bipoly::int;
use rmcalc::encodings::{marcenko_pastur, Kind};

fn main() -> rmcalc::Result<()> {
    let mp = marcenko_pastur(&int(2))?;
    for kind in Kind::ALL {
        let e = mp.convert(kind)?;
        let back = e.convert(Kind::Mz)?;
        println!("{:>4}: {}    round trip ok: {}", kind.name(), e.poly().pretty(), back.equivalent(&mp));
    }
    Ok(())
}
