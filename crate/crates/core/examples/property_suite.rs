//! Run the property suite and print a one-line summary per record.
//!
//! cargo run --release --example property_suite

use transmission_bie::properties::{run_properties, PropertyOptions};

fn main() {
    let records = run_properties(&PropertyOptions::default());
    for r in &records {
        println!(
            "{} {:<12} {:>11.3e} {:<12} {}",
            if r.pass { "ok  " } else { "FAIL" },
            r.module,
            r.observed,
            r.required,
            r.property
        );
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    println!("{} records, {failed} failed", records.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
