//! Exact classical visibility bounds, with the balanced and one-sided
//! patterns side by side.
//!
//! ```text
//! cargo run --example bound_table
//! ```

use mzi_bound::bound::{balanced_and_lopsided, bound_table};

fn main() -> mzi_bound::Result<()> {
    println!("{:>3} {:>3}  {:>7}  {:>7}", "m", "n", "exact", "percent");
    for b in bound_table(5)? {
        let p = b.pattern();
        println!("{:>3} {:>3}  {:>7}  {:>7}", p.m, p.n, b.exact().to_string(), b.percent_rounded(2));
    }

    println!("\nN  balanced            one-sided");
    for total in 2..=12 {
        let (bal, lop) = balanced_and_lopsided(total)?;
        println!("{total:<2} {:<18}  {}", bal.exact().to_string(), lop.exact());
    }
    Ok(())
}
