//! Write the far-field pattern of the cavity to CSV together with the
//! modulus in decibels, for plotting.
//!
//! cargo run --release --example far_field_export -- [path]

use std::fs::File;
use std::io::{BufWriter, Write};

use transmission_bie::postprocess::far_field;
use transmission_bie::{solve, Formulation, GeometryKind, Polarization, TransmissionConfig};

fn main() -> transmission_bie::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "cavity_far_field.csv".into());
    let mut config = TransmissionConfig::new(
        GeometryKind::Cavity,
        Formulation::SkrLp,
        16.0,
        4.0,
        Polarization::H,
        128,
    );
    config.directions = 1440;
    let sol = solve(&config)?;
    let ff = far_field(&sol)?;

    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "angle,re,im,db")?;
    for (theta, a) in ff.angles.iter().zip(&ff.amplitudes) {
        writeln!(out, "{theta:.12},{:e},{:e},{:.4}", a.re, a.im, 20.0 * a.norm().log10())?;
    }
    out.flush()?;
    println!("{} directions, {} iterations -> {path}", ff.len(), sol.iterations());
    Ok(())
}
