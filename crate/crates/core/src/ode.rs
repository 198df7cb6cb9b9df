//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{ModelError, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct StepControl<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    /// Steps shorter than `min_step_rel * |t|`-scale are treated as stalled.
    pub min_step: f64,
    pub max_steps: usize,
}

/// Integrator state advancing `y' = f(t, y)`.
pub struct Dopri5<F, const N: usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    rhs: F,
    control: StepControl<N>,
    t: f64,
    y: [f64; N],
    h: f64,
    k1: [f64; N],
    steps: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut rhs: F, t0: f64, y0: [f64; N], initial_step: f64, control: StepControl<N>) -> Self {
        let k1 = rhs(t0, &y0);
        Self { rhs, control, t: t0, y: y0, h: initial_step, k1, steps: 0 }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[f64; N] {
        &self.y
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// Forces a fresh right-hand-side evaluation; call after crossing a
    /// discontinuity in the forcing.
    pub fn restart(&mut self) {
        self.k1 = (self.rhs)(self.t, &self.y);
    }

    /// Advances exactly to `t_end` (must not precede the current time).
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            let remaining = t_end - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < self.control.min_step && !last {
                return Err(ModelError::StepSizeUnderflow { t: self.t, h });
            }
            if self.steps >= self.control.max_steps {
                return Err(ModelError::StepSizeUnderflow { t: self.t, h });
            }
            let (y_new, k7, err) = self.trial(h);
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                self.y = y_new;
                self.k1 = k7;
                self.steps += 1;
                // keep the controller's step even if we clipped to land on t_end
                if !last {
                    self.h = h * factor;
                } else {
                    self.h = self.h.max(h * factor.min(1.0));
                }
            } else {
                self.h = h * factor;
                if self.h < self.control.min_step {
                    return Err(ModelError::StepSizeUnderflow { t: self.t, h: self.h });
                }
            }
        }
        Ok(())
    }

    fn trial(&mut self, h: f64) -> ([f64; N], [f64; N], f64) {
        let t = self.t;
        let y = self.y;
        let k1 = self.k1;
        let k2 = (self.rhs)(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = (self.rhs)(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = (self.rhs)(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = (self.rhs)(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = (self.rhs)(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = (self.rhs)(t + h, &y_new);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.control.atol[i] + self.control.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        (y_new, k7, err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let control = StepControl { rtol: 1e-10, atol: [1e-14], min_step: 1e-12, max_steps: 100_000 };
        let mut solver = Dopri5::new(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 0.1, control);
        solver.advance_to(5.0).unwrap();
        assert!((solver.state()[0] - (-5.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_many_periods() {
        let control = StepControl { rtol: 1e-11, atol: [1e-13, 1e-13], min_step: 1e-12, max_steps: 1_000_000 };
        let mut solver = Dopri5::new(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], 0.01, control);
        let t_end = 20.0 * std::f64::consts::TAU;
        solver.advance_to(t_end).unwrap();
        assert!(solver.state()[0].abs() < 1e-8);
        assert!((solver.state()[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn stalled_control_reports_underflow() {
        let control = StepControl { rtol: 1e-10, atol: [1e-14], min_step: 1e-3, max_steps: 1000 };
        // finite-time blow-up at t = 1
        let mut solver = Dopri5::new(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 0.1, control);
        assert!(matches!(solver.advance_to(2.0), Err(ModelError::StepSizeUnderflow { .. })));
    }
}
