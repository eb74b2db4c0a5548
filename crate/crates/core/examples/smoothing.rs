//! Decay of operator differences on Fourier modes: S_k − σ^S and
//! S_ka − S_kb gain three orders, N_ka − N_kb gains one.
//!
//! cargo run --release --example smoothing

use num_complex::Complex64;
use transmission_bie::geometry::{sample, GeometryKind};
use transmission_bie::operators::{
    assemble_layer_operators, assemble_sigma, operator_difference_decay, OperatorKind, Wavenumber,
};

fn main() -> transmission_bie::Result<()> {
    let ka = Wavenumber::new(Complex64::new(2.0, 1.0))?;
    let kb = Wavenumber::new(Complex64::new(5.0, 0.5))?;
    for g in [GeometryKind::Circle, GeometryKind::Kite] {
        let nodes = sample(&g.curve(), 64)?;
        let a = assemble_layer_operators(&nodes, ka)?;
        let b = assemble_layer_operators(&nodes, kb)?;
        let sig = assemble_sigma(&nodes, OperatorKind::SigmaS, ka)?;
        println!("{}:", g.name());
        println!(
            "  S_ka - sigma^S  {:>6.2}",
            operator_difference_decay(&a.s, &sig.entries, &nodes)?
        );
        println!(
            "  S_ka - S_kb     {:>6.2}",
            operator_difference_decay(&a.s, &b.s, &nodes)?
        );
        println!(
            "  N_ka - N_kb     {:>6.2}",
            operator_difference_decay(&a.n, &b.n, &nodes)?
        );
    }
    Ok(())
}
