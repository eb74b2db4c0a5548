//! Iteration counts of all formulations on the kite as the frequency grows,
//! with the resolution scaled to keep a fixed number of points per wavelength.
//!
//! cargo run --release --example kite_solve -- [eps2] [E|H]

use transmission_bie::{solve, Formulation, GeometryKind, Polarization, TransmissionConfig};

fn main() -> transmission_bie::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps2: f64 = args.next().map_or(4.0, |s| s.parse().expect("eps2"));
    let pol: Polarization = args.next().map_or(Ok(Polarization::E), |s| s.parse())?;

    print!("{:>6} {:>9}", "omega", "unknowns");
    for f in Formulation::ALL {
        print!(" {:>7}", f.name());
    }
    println!();
    for (omega, n) in [(4.0, 32), (8.0, 64), (16.0, 128), (32.0, 256)] {
        let base = TransmissionConfig::new(GeometryKind::Kite, Formulation::Sk15, omega, eps2, pol, n);
        print!("{omega:>6} {:>9}", base.unknowns());
        for f in Formulation::ALL {
            print!(" {:>7}", solve(&base.with_formulation(f))?.iterations());
        }
        println!();
    }
    Ok(())
}
