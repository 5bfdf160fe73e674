use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{BecError, Result};

/// Total winding `(1/2π)·Σ arg(z_{i+1}/z_i)` of samples near the unit circle.
pub fn unwind_phase(samples: &[Complex64]) -> Result<f64> {
    for (i, z) in samples.iter().enumerate() {
        let r = z.norm();
        if !(r > 0.5 && r < 2.0) {
            return Err(BecError::ContractViolation(format!(
                "unwind_phase: |sample {i}| = {r:.3e} outside (0.5, 2)"
            )));
        }
    }
    let mut total = 0.0;
    for (i, w) in samples.windows(2).enumerate() {
        let jump = phase_increment(w[0], w[1]);
        if jump.abs() > FRAC_PI_2 * (1.0 + 1e-12) {
            return Err(BecError::InsufficientResolution { index: i, jump });
        }
        total += jump;
    }
    Ok(total / (2.0 * PI))
}

/// Principal-branch phase increment from `a` to `b`.
pub fn phase_increment(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}
