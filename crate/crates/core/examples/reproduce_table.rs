//! Rerun a stored benchmark table and print measured against stored
//! iteration counts.
//!
//! cargo run --release --example reproduce_table -- [id] [max_omega]

use transmission_bie::benchmarks::{run_table, TableOptions, COLUMNS};

fn main() -> transmission_bie::Result<()> {
    let mut args = std::env::args().skip(1);
    let id: u8 = args.next().map_or(4, |s| s.parse().expect("table id"));
    let max_omega: f64 = args.next().map_or(16.0, |s| s.parse().expect("max omega"));
    let options = TableOptions {
        max_omega: Some(max_omega),
        errors: false,
        ..TableOptions::default()
    };

    print!("{:>7} {:>6} {:>5} {:>9}", "curve", "omega", "eps2", "unknowns");
    for f in COLUMNS {
        print!(" {:>13}", f.name());
    }
    println!();
    for row in run_table(id, &options)? {
        let r = &row.reference;
        print!(
            "{:>7} {:>6} {:>5} {:>9}",
            r.geometry.name(),
            r.omega,
            r.eps2,
            r.unknowns
        );
        for (f, stored) in COLUMNS.iter().zip(r.values) {
            let ours = row.get(*f).map_or("-".to_string(), |m| m.iterations.to_string());
            print!(" {:>13}", format!("{ours} ({})", stored.iterations));
        }
        println!("  {}", if row.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
