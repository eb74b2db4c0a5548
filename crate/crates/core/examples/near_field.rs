//! Total field on a grid around the kite, written as CSV (x, y, |u|).
//! Grid points too close to the boundary are left empty.
//!
//! cargo run --release --example near_field -- [path]

use std::fs::File;
use std::io::{BufWriter, Write};

use transmission_bie::postprocess::near_field;
use transmission_bie::{solve, Error, Formulation, GeometryKind, Polarization, TransmissionConfig};

fn main() -> transmission_bie::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "kite_near_field.csv".into());
    let config = TransmissionConfig::new(GeometryKind::Kite, Formulation::SkrPs, 8.0, 4.0, Polarization::E, 96);
    let sol = solve(&config)?;

    let m = 121;
    let coord = |i: usize| -3.0 + 6.0 * i as f64 / (m - 1) as f64;
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "x,y,abs")?;
    let mut skipped = 0;
    for i in 0..m {
        for j in 0..m {
            let p = [coord(i), coord(j)];
            match near_field(&sol, &[p]) {
                Ok(u) => writeln!(out, "{},{},{:e}", p[0], p[1], u[0].norm())?,
                Err(Error::TooClose(..)) => {
                    skipped += 1;
                    writeln!(out, "{},{},", p[0], p[1])?;
                }
                Err(e) => return Err(e),
            }
        }
    }
    out.flush()?;
    println!("{} points ({skipped} next to the boundary) -> {path}", m * m);
    Ok(())
}
