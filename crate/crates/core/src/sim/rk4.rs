use alloc::vec;
use alloc::vec::Vec;

use super::SimError;

/// Classical fourth-order Runge–Kutta stepper with reusable scratch space.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    probe: Vec<f64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        Self {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            probe: vec![0.0; len],
        }
    }

    /// Advances `s` from `t` to `t + dt` in place. `f(t, s, out)` writes the
    /// time derivative of `s` into `out`.
    pub fn step<F>(&mut self, f: &mut F, s: &mut [f64], t: f64, dt: f64) -> Result<(), SimError>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let half = 0.5 * dt;
        f(t, s, &mut self.k1);
        for i in 0..s.len() {
            self.probe[i] = s[i] + half * self.k1[i];
        }
        f(t + half, &self.probe, &mut self.k2);
        for i in 0..s.len() {
            self.probe[i] = s[i] + half * self.k2[i];
        }
        f(t + half, &self.probe, &mut self.k3);
        for i in 0..s.len() {
            self.probe[i] = s[i] + dt * self.k3[i];
        }
        f(t + dt, &self.probe, &mut self.k4);
        let sixth = dt / 6.0;
        for i in 0..s.len() {
            s[i] += sixth * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
        if s.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(SimError::NonFiniteState { t: t + dt })
        }
    }
}

/// One RK4 step returning the new state.
pub fn rk4_step<F>(mut f: F, s: &[f64], t: f64, dt: f64) -> Result<Vec<f64>, SimError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut out = s.to_vec();
    Rk4::new(s.len()).step(&mut f, &mut out, t, dt)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fmath;

    #[test]
    fn constant_state_unchanged() {
        let s = rk4_step(|_, _, out: &mut [f64]| out.fill(0.0), &[1.5, -2.0], 0.0, 0.1).unwrap();
        assert_eq!(s, vec![1.5, -2.0]);
    }

    #[test]
    fn exponential_decay_one_step() {
        let s = rk4_step(|_, x: &[f64], out: &mut [f64]| out[0] = -x[0], &[1.0], 0.0, 0.1).unwrap();
        assert!((s[0] - fmath::exp(-0.1)).abs() <= 1e-7);
    }

    #[test]
    fn rotation_preserves_norm() {
        let mut rk = Rk4::new(2);
        let mut s = [1.0, 0.0];
        let mut f = |_: f64, x: &[f64], out: &mut [f64]| {
            out[0] = x[1];
            out[1] = -x[0];
        };
        for k in 0..10_000 {
            rk.step(&mut f, &mut s, k as f64 * 1e-3, 1e-3).unwrap();
        }
        assert!((fmath::sqrt(s[0] * s[0] + s[1] * s[1]) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn blow_up_reported() {
        let r = rk4_step(|_, _, out: &mut [f64]| out[0] = f64::INFINITY, &[0.0], 0.0, 1.0);
        assert!(matches!(r, Err(SimError::NonFiniteState { .. })));
    }
}
