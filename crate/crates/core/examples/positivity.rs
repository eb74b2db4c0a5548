//! Numerical range of the complexified single-layer and hypersingular
//! operators and of their Fourier-multiplier surrogates.
//!
//! cargo run --release --example positivity -- [re] [im]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transmission_bie::geometry::{sample, GeometryKind};
use transmission_bie::operators::{apply_dense, assemble_layer_operators, assemble_sigma, OperatorKind, Wavenumber};

fn main() -> transmission_bie::Result<()> {
    let mut args = std::env::args().skip(1);
    let re: f64 = args.next().map_or(2.0, |s| s.parse().expect("re"));
    let im: f64 = args.next().map_or(1.0, |s| s.parse().expect("im"));
    let kappa = Wavenumber::complexified(Complex64::new(re, im))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    println!("min Im<A phi, phi>/|phi|^2 over 200 random densities, kappa = {re}+{im}i");
    println!(
        "{:>7} {:>11} {:>11} {:>11} {:>11}",
        "curve", "S", "N", "sigma^S", "sigma^N"
    );
    for g in [GeometryKind::Circle, GeometryKind::Kite, GeometryKind::Cavity] {
        let nodes = sample(&g.curve(), 64)?;
        let ops = assemble_layer_operators(&nodes, kappa)?;
        let ss = assemble_sigma(&nodes, OperatorKind::SigmaS, kappa)?;
        let sn = assemble_sigma(&nodes, OperatorKind::SigmaN, kappa)?;
        let w = nodes.arclength_weights();
        let mut least = [f64::INFINITY; 4];
        for _ in 0..200 {
            let x: Vec<Complex64> = (0..nodes.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm: f64 = x.iter().zip(&w).map(|(v, wi)| v.norm_sqr() * wi).sum();
            for (slot, m) in [&ops.s, &ops.n, &ss.entries, &sn.entries].into_iter().enumerate() {
                let y = apply_dense(m, &x)?;
                let q: Complex64 = (0..x.len()).map(|i| x[i].conj() * w[i] * y[i]).sum();
                least[slot] = least[slot].min(q.im / norm);
            }
        }
        println!(
            "{:>7} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}",
            g.name(),
            least[0],
            least[1],
            least[2],
            least[3]
        );
    }
    Ok(())
}
