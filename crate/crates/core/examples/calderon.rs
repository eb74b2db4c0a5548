//! Calderón identities S·N = −I/4 + D² and N·S = −I/4 + (D*)² for the
//! discrete operators, on the whole matrix and on the resolved band.
//!
//! cargo run --release --example calderon

use transmission_bie::geometry::{sample, GeometryKind};
use transmission_bie::operators::{calderon_residual, Wavenumber};

fn main() -> transmission_bie::Result<()> {
    let k = Wavenumber::real(2.0)?;
    println!(
        "{:>7} {:>5} {:>10} {:>10} {:>10} {:>12} {:>12}",
        "curve", "n", "full SN", "full NS", "mixed", "resolved SN", "resolved NS"
    );
    for g in [GeometryKind::Circle, GeometryKind::Kite, GeometryKind::Cavity] {
        for n in [32, 64, 128] {
            let r = calderon_residual(&sample(&g.curve(), n)?, k)?;
            println!(
                "{:>7} {n:>5} {:>10.2e} {:>10.2e} {:>10.2e} {:>12.2e} {:>12.2e}",
                g.name(),
                r.full_sn,
                r.full_ns,
                r.mixed,
                r.resolved_sn,
                r.resolved_ns
            );
        }
    }
    Ok(())
}
