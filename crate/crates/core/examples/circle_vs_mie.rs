//! Solve scattering by the unit disc with every formulation and compare the
//! far field against the separation-of-variables series.
//!
//! cargo run --release --example circle_vs_mie -- [omega] [eps2]

use transmission_bie::mie::{mie_far_field, mie_solve};
use transmission_bie::postprocess::{far_field, far_field_error, FarField};
use transmission_bie::{solve, Formulation, GeometryKind, Polarization, TransmissionConfig};

fn main() -> transmission_bie::Result<()> {
    let mut args = std::env::args().skip(1);
    let omega: f64 = args.next().map_or(8.0, |s| s.parse().expect("omega"));
    let eps2: f64 = args.next().map_or(2.0, |s| s.parse().expect("eps2"));

    println!(
        "{:>8} {:>9} {:>6} {:>11} {:>8}",
        "form", "unknowns", "iters", "error", "time[s]"
    );
    for n in [16, 32] {
        for f in Formulation::ALL {
            let config = TransmissionConfig::new(GeometryKind::Circle, f, omega, eps2, Polarization::E, n);
            let sol = solve(&config)?;
            let reference = mie_far_field(&mie_solve(1.0, &config)?, &FarField::angles(config.directions));
            let err = far_field_error(&far_field(&sol)?, &reference)?;
            println!(
                "{:>8} {:>9} {:>6} {:>11.3e} {:>8.3}",
                f.name(),
                config.unknowns(),
                sol.iterations(),
                err,
                sol.assembly_seconds + sol.solve_seconds
            );
        }
    }
    Ok(())
}
