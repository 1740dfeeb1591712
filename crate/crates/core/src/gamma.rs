//! Complex log-gamma.
//!
//! Lanczos approximation (g = 7, nine coefficients) on `Re z >= 1/2` and the
//! reflection formula below that. The reflected branch uses a log-sine that is
//! analytic in each open half-plane, so the result continues the real
//! `ln Γ` along the positive axis into the cut plane.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Returns `true` when `z` is a pole of Γ (zero or a negative integer).
pub fn is_gamma_pole<T: Real>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// Principal-branch `ln Γ(z)`.
pub fn log_gamma_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if is_gamma_pole(z) {
        return Err(Error::Pole {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(ln_gamma_unchecked(z))
}

/// `ln Γ(z)` without the pole check; poles yield non-finite output.
pub(crate) fn ln_gamma_unchecked<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let pi = T::PI();
        let one = Complex::new(T::one(), T::zero());
        Complex::new(pi.ln(), T::zero()) - ln_sin_pi(z) - lanczos(one - z)
    } else {
        lanczos(z)
    }
}

fn lanczos<T: Real>(z: Complex<T>) -> Complex<T> {
    let zm1 = z - T::one();
    let mut acc = Complex::new(T::lit(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + Complex::new(T::lit(c), T::zero()) / (zm1 + T::lit(i as f64));
    }
    let t = zm1 + T::lit(LANCZOS_G + 0.5);
    let half_ln_two_pi = T::lit(0.918_938_533_204_672_7);
    (zm1 + T::lit(0.5)) * t.ln() - t + acc.ln() + half_ln_two_pi
}

/// `ln sin(πz)` on a branch analytic in each open half-plane.
///
/// For `Im z > 0`: `sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})` with
/// `|e^{2iπz}| < 1`, which avoids overflow for large `|Im z|`.
fn ln_sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let pi = T::PI();
    if z.im < T::zero() {
        return ln_sin_pi(z.conj()).conj();
    }
    if z.im == T::zero() {
        let s = (pi * z.re).sin();
        return Complex::new(s, T::zero()).ln();
    }
    let i = Complex::new(T::zero(), T::one());
    let w = (i * z * (pi + pi)).exp();
    let ln_half_i = Complex::new(T::lit(0.5).ln(), pi * T::lit(0.5));
    -(i * z * pi) + (Complex::new(T::one(), T::zero()) - w).ln() + ln_half_i
}

/// `Γ(z)` via `exp(ln Γ(z))`.
pub fn gamma_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    log_gamma_complex(z).map(|l| l.exp())
}
