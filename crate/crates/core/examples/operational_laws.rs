//! Operational laws on encoded distributions: free sums and products,
//! compression, and a Jacobi ensemble built from Wishart steps.

use rmcalc::bipoly::{int, rat};
use rmcalc::encodings::{atomic, identity, marcenko_pastur, semicircle};
use rmcalc::oplaws::{compress, free_add, free_mul, inverse, multiply_wishart, shift};

fn main() -> rmcalc::Result<()> {
    let w = semicircle();
    let mp = marcenko_pastur(&rat(1, 2))?;
    println!("A + B: {}", free_add(&w, &mp)?.poly().pretty());
    println!("A B:   {}", free_mul(&w, &mp)?.poly().pretty());

    let coin = atomic(&[(rat(1, 2), int(0)), (rat(1, 2), int(1))])?;
    println!("compressed coin: {}", compress(&coin, &rat(2, 5))?.poly().pretty());

    let (c1, c2) = (rat(1, 10), rat(5, 8));
    let w1 = multiply_wishart(&identity(), &c1)?;
    let jacobi = inverse(&shift(&multiply_wishart(&inverse(&w1)?, &c2)?, &int(1))?)?;
    println!("Jacobi: {}", jacobi.poly().pretty());
    Ok(())
}
