//! Bessel and Hankel functions of integer order and complex argument.
//!
//! Every transcendental quantity in the kernels and in the circular
//! reference solution goes through this module. Arguments are restricted to
//! the closed first quadrant, which is where `k·r` lands for admissible
//! wavenumbers. Evaluation is delegated to the Amos algorithm
//! implementation in `complex-bessel`; this module owns the domain contract
//! and the small-argument/kernel conveniences built on top of it.

use complex_bessel::{besselj_seq, hankel1_seq, Scaling};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by the general-purpose routines.
pub const MAX_ORDER: u32 = 500;
/// Largest |z| accepted by the general-purpose routines.
pub const MAX_ARG: f64 = 500.0;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn check_domain(order: u32, z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if order > MAX_ORDER {
        return Err(Error::Domain(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let tol = 1e-12 * z.norm().max(1.0);
    if z.re < -tol || z.im < -tol {
        return Err(Error::Domain(format!("argument {z} outside the first quadrant")));
    }
    if z.norm() > MAX_ARG {
        return Err(Error::Domain(format!("|z| = {} exceeds {MAX_ARG}", z.norm())));
    }
    Ok(())
}

fn amos_err(order: u32, z: Complex64, e: complex_bessel::Error) -> Error {
    Error::Bessel {
        order,
        z,
        reason: e.to_string(),
    }
}

/// J_n(z).
pub fn bessel_j(order: u32, z: Complex64) -> Result<Complex64> {
    check_domain(order, z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(if order == 0 { 1.0.into() } else { 0.0.into() });
    }
    complex_bessel::besselj(order as f64, z).map_err(|e| amos_err(order, z, e))
}

/// Y_n(z). Singular at the origin.
pub fn bessel_y(order: u32, z: Complex64) -> Result<Complex64> {
    check_domain(order, z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("Y_n is singular at z = 0".into()));
    }
    complex_bessel::bessely(order as f64, z).map_err(|e| amos_err(order, z, e))
}

/// H^(1)_n(z) = J_n(z) + i Y_n(z). Singular at the origin.
pub fn hankel1(order: u32, z: Complex64) -> Result<Complex64> {
    check_domain(order, z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("H^(1)_n is singular at z = 0".into()));
    }
    complex_bessel::hankel1(order as f64, z).map_err(|e| amos_err(order, z, e))
}

/// d/dz J_n(z), from the order-lowering/raising pair.
pub fn bessel_j_deriv(order: u32, z: Complex64) -> Result<Complex64> {
    if order == 0 {
        return Ok(-bessel_j(1, z)?);
    }
    Ok((bessel_j(order - 1, z)? - bessel_j(order + 1, z)?) * 0.5)
}

/// d/dz H^(1)_n(z).
pub fn hankel1_deriv(order: u32, z: Complex64) -> Result<Complex64> {
    if order == 0 {
        return Ok(-hankel1(1, z)?);
    }
    Ok((hankel1(order - 1, z)? - hankel1(order + 1, z)?) * 0.5)
}

/// d/dz Y_n(z).
pub fn bessel_y_deriv(order: u32, z: Complex64) -> Result<Complex64> {
    if order == 0 {
        return Ok(-bessel_y(1, z)?);
    }
    Ok((bessel_y(order - 1, z)? - bessel_y(order + 1, z)?) * 0.5)
}

/// Orders 0 and 1 of both J and H^(1) at one argument; the kernel hot path.
#[derive(Debug, Clone, Copy)]
pub struct KernelBessel {
    pub j0: Complex64,
    pub j1: Complex64,
    pub h0: Complex64,
    pub h1: Complex64,
}

/// J_0, J_1, H_0, H_1 at `z ≠ 0` without the range checks of the public
/// single-order routines. Callers guarantee a first-quadrant argument.
pub(crate) fn kernel_bessel(z: Complex64) -> Result<KernelBessel> {
    let j = besselj_seq(0.0, z, 2, Scaling::Unscaled).map_err(|e| amos_err(0, z, e))?;
    let h = hankel1_seq(0.0, z, 2, Scaling::Unscaled).map_err(|e| amos_err(0, z, e))?;
    Ok(KernelBessel {
        j0: j.values[0],
        j1: j.values[1],
        h0: h.values[0],
        h1: h.values[1],
    })
}

/// H_0 and H_1 only, for kernel entries outside the log-split window.
pub(crate) fn kernel_hankel(z: Complex64) -> Result<(Complex64, Complex64)> {
    let h = hankel1_seq(0.0, z, 2, Scaling::Unscaled).map_err(|e| amos_err(0, z, e))?;
    Ok((h.values[0], h.values[1]))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    const fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(bessel_j(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(hankel1(0, c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(bessel_j(501, c(1.0, 0.0)).is_err());
        assert!(bessel_j(0, c(501.0, 0.0)).is_err());
        assert!(hankel1(0, c(-1.0, 0.5)).is_err());
        assert!(hankel1(0, c(1.0, -0.5)).is_err());
    }

    #[test]
    fn recurrence_residuals() {
        let args = [c(0.3, 0.0), c(2.0, 1.0), c(7.5, 0.2), c(15.0, 3.0), c(40.0, 0.0)];
        for z in args {
            for n in 1..30u32 {
                let jm = bessel_j(n - 1, z).unwrap();
                let j = bessel_j(n, z).unwrap();
                let jp = bessel_j(n + 1, z).unwrap();
                let res = (jm + jp - j * (2.0 * n as f64) / z).norm();
                assert!(res <= 1e-10 * j.norm().max(1e-300), "J n={n} z={z} res={res}");
                let hm = hankel1(n - 1, z).unwrap();
                let h = hankel1(n, z).unwrap();
                let hp = hankel1(n + 1, z).unwrap();
                let res = (hm + hp - h * (2.0 * n as f64) / z).norm();
                assert!(res <= 1e-10 * h.norm(), "H n={n} z={z} res={res}");
            }
        }
    }

    #[test]
    fn kernel_path_matches_single_order_routines() {
        let z = c(3.7, 0.8);
        let kb = kernel_bessel(z).unwrap();
        assert!(rel(kb.j0, bessel_j(0, z).unwrap()) < 1e-14);
        assert!(rel(kb.j1, bessel_j(1, z).unwrap()) < 1e-14);
        assert!(rel(kb.h0, hankel1(0, z).unwrap()) < 1e-14);
        assert!(rel(kb.h1, hankel1(1, z).unwrap()) < 1e-14);
    }

    #[test]
    fn green_function_log_behaviour_is_bounded() {
        // (i/4) H0(x) + log(x)/(2π) stays bounded and tends to
        // i/4 - (log(1/2) + γ)/(2π) as x → 0.
        let limit = c(0.25, 0.0) * c(0.0, 1.0) - c(((0.5f64).ln() + EULER_GAMMA) / (2.0 * std::f64::consts::PI), 0.0);
        for e in 1..9 {
            let x = 10f64.powi(-e);
            let g = c(0.0, 0.25) * hankel1(0, c(x, 0.0)).unwrap() + c(x.ln() / (2.0 * std::f64::consts::PI), 0.0);
            assert!(g.norm() < 1.0);
            if e >= 4 {
                assert!((g - limit).norm() < 1e-6, "x={x} g={g}");
            }
        }
    }

    // 40-digit values from an arbitrary-precision evaluation.
    const FROZEN: [(u32, Complex64, Complex64, Complex64); 11] = [
        (
            0,
            c(2.0, 1.0),
            c(0.187853728082461716, -0.646169435153980716),
            c(0.112215177796067924, 0.154281685256013263),
        ),
        (
            1,
            c(2.0, 1.0),
            c(0.790623392553428336, -0.0799326941677760539),
            c(0.191216550786574742, -0.0962481319882485575),
        ),
        (
            0,
            c(0.5, 0.0),
            c(0.938469807240812904, 0.0),
            c(0.938469807240812904, -0.444518733506706557),
        ),
        (
            1,
            c(10.0, 0.0),
            c(0.0434727461688614367, 0.0),
            c(0.0434727461688614367, 0.249015424206953884),
        ),
        (
            5,
            c(3.0, 2.0),
            c(-0.09885798984869188, 0.0859246625629204304),
            c(-0.415444028861583382, 0.273925556899570192),
        ),
        (
            10,
            c(7.0, 0.5),
            c(0.0209218049531855761, 0.0124328211174475846),
            c(-0.801539703788014412, -1.65724431359334801),
        ),
        (
            0,
            c(0.01, 0.0),
            c(0.999975000156249566, 0.0),
            c(0.999975000156249566, -3.00545563708364594),
        ),
        (
            1,
            c(250.0, 3.0),
            c(-0.437147329994833675, -0.257501965409846074),
            c(-0.00214640428225285052, 0.00130569899337656102),
        ),
        (
            20,
            c(1.0, 1.0),
            c(-4.01289606089834279e-22, 9.55631316376843089e-24),
            c(-1.04328261780960276e+18, 3.96356472799098174e+19),
        ),
        (
            500,
            c(450.0, 2.0),
            c(2.4825884786019127e-9, 3.68462253917159268e-9),
            c(-2.69053518316083434e+5, -1.88799061462335925e+5),
        ),
        (
            2,
            c(40.0, 5.0),
            c(0.492921630515870988, 9.26346408349757872),
            c(-6.0855350059606731e-5, -0.000849946428921210699),
        ),
    ];

    const FROZEN_DERIV: [(u32, Complex64, Complex64, Complex64); 3] = [
        (
            0,
            c(2.0, 1.0),
            c(-0.790623392553428336, 0.0799326941677760539),
            c(-0.191216550786574742, 0.0962481319882485575),
        ),
        (
            3,
            c(5.0, 0.5),
            c(-0.1838209070414018, -0.10324971206882648),
            c(-0.108098430263968003, 0.197089631294383068),
        ),
        (
            7,
            c(12.0, 0.0),
            c(-0.144410048154661934, 0.0),
            c(-0.144410048154661934, -0.150850990157713016),
        ),
    ];

    #[test]
    fn frozen_values() {
        for (n, z, j, h) in FROZEN {
            assert!(rel(bessel_j(n, z).unwrap(), j) < 1e-12, "J_{n}({z})");
            assert!(rel(hankel1(n, z).unwrap(), h) < 1e-12, "H_{n}({z})");
        }
        for (n, z, jd, hd) in FROZEN_DERIV {
            assert!(rel(bessel_j_deriv(n, z).unwrap(), jd) < 1e-12, "J'_{n}({z})");
            assert!(rel(hankel1_deriv(n, z).unwrap(), hd) < 1e-12, "H'_{n}({z})");
        }
    }

    #[test]
    fn wronskian() {
        // J_n Y_n' − J_n' Y_n = 2/(πz)
        for z in [c(0.7, 0.0), c(3.0, 1.5), c(25.0, 0.3)] {
            for n in [0u32, 1, 4, 12] {
                let w = bessel_j(n, z).unwrap() * bessel_y_deriv(n, z).unwrap()
                    - bessel_j_deriv(n, z).unwrap() * bessel_y(n, z).unwrap();
                let exact = c(2.0 / std::f64::consts::PI, 0.0) / z;
                assert!(rel(w, exact) < 1e-11, "n={n} z={z}");
            }
        }
    }
}
