//! Explicit integrators for small complex ODE systems.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    pub h_init: T,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-13),
            h_init: T::lit(1e-3),
            h_max: T::lit(1.0),
            max_steps: 5_000_000,
        }
    }
}

/// Observer verdict after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of `dy/dt = f(t, y)` from `t0` to `t_end`.
///
/// `observe` sees every accepted `(t, y)` and may stop the integration early.
/// Returns the final time and state.
pub fn dopri5<T, F, O>(
    mut f: F,
    t0: T,
    y0: &[Complex<T>],
    t_end: T,
    tol: &Tolerances<T>,
    mut observe: O,
) -> Result<(T, Vec<Complex<T>>), OdeError>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
    O: FnMut(T, &[Complex<T>]) -> Control,
{
    let n = y0.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = tol.h_init.min(tol.h_max);
    let mut k = vec![vec![zero; n]; 7];
    let mut stage = vec![zero; n];
    let mut y5 = vec![zero; n];
    let c: Vec<T> = C.iter().map(|&x| T::lit(x)).collect();
    let a: Vec<Vec<T>> = A.iter().map(|row| row.iter().map(|&x| T::lit(x)).collect()).collect();
    let b5: Vec<T> = B5.iter().map(|&x| T::lit(x)).collect();
    let b4: Vec<T> = B4.iter().map(|&x| T::lit(x)).collect();
    let safety = T::lit(0.9);
    let min_h = T::epsilon() * T::lit(16.0);

    f(t, &y, &mut k[0]);
    for _ in 0..tol.max_steps {
        if t >= t_end {
            return Ok((t, y));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    if a[s][j] != T::zero() {
                        acc = acc + kj[i] * (h * a[s][j]);
                    }
                }
                stage[i] = acc;
            }
            f(t + c[s] * h, &stage, &mut k[s]);
        }
        // The 7th stage is evaluated at the 5th-order solution (FSAL).
        let mut err_sq = T::zero();
        for i in 0..n {
            let mut hi = y[i];
            let mut lo = y[i];
            for s in 0..7 {
                hi = hi + k[s][i] * (h * b5[s]);
                lo = lo + k[s][i] * (h * b4[s]);
            }
            y5[i] = hi;
            let scale = tol.atol + tol.rtol * y[i].norm().max(hi.norm());
            let e = (hi - lo).norm() / scale;
            err_sq = err_sq + e * e;
        }
        let err = (err_sq / T::from_usize(n.max(1)).unwrap()).sqrt();
        if !err.is_finite() {
            return Err(OdeError::NonFinite { t: t.as_f64() });
        }
        if err <= T::one() {
            t = t + h;
            std::mem::swap(&mut y, &mut y5);
            let last = k.pop().unwrap();
            k.insert(0, last);
            if observe(t, &y) == Control::Stop {
                return Ok((t, y));
            }
        }
        let factor = if err == T::zero() {
            T::lit(5.0)
        } else {
            (safety * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
        };
        h = (h * factor).min(tol.h_max);
        if h < min_h * t.abs().max(T::one()) {
            return Err(OdeError::StepUnderflow { t: t.as_f64() });
        }
    }
    Err(OdeError::TooManySteps(tol.max_steps))
}

/// Classical fixed-step RK4; returns the state at every grid point `t0 + j·dt`, j = 0..=steps.
pub fn rk4_grid<T, F>(mut f: F, t0: T, y0: &[Complex<T>], dt: T, steps: usize) -> Vec<Vec<Complex<T>>>
where
    T: Real,
    F: FnMut(T, &[Complex<T>], &mut [Complex<T>]),
{
    let n = y0.len();
    let zero = Complex::new(T::zero(), T::zero());
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    out.push(y.clone());
    for j in 0..steps {
        let t = t0 + dt * T::from_usize(j).unwrap();
        f(t, &y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (dt * half);
        }
        f(t + dt * half, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (dt * half);
        }
        f(t + dt * half, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * dt;
        }
        f(t + dt, &tmp, &mut k4);
        for i in 0..n {
            y[i] = y[i] + (k1[i] + k2[i] * two + k3[i] * two + k4[i]) * (dt * sixth);
        }
        out.push(y.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dopri_solves_complex_exponential() {
        let lam = Complex::new(-0.5, 2.0);
        let tol = Tolerances::default();
        let (t, y) = dopri5(
            |_, y: &[Complex<f64>], dy: &mut [Complex<f64>]| dy[0] = lam * y[0],
            0.0,
            &[Complex::new(1.0, 0.0)],
            3.0,
            &tol,
            |_, _| Control::Continue,
        )
        .unwrap();
        assert_eq!(t, 3.0);
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-9);
    }

    #[test]
    fn observer_can_stop() {
        let mut calls = 0;
        let (t, _) = dopri5(
            |_, _: &[Complex<f64>], dy: &mut [Complex<f64>]| dy[0] = Complex::new(1.0, 0.0),
            0.0,
            &[Complex::new(0.0, 0.0)],
            100.0,
            &Tolerances::default(),
            |_, _| {
                calls += 1;
                if calls == 3 { Control::Stop } else { Control::Continue }
            },
        )
        .unwrap();
        assert!(t < 100.0);
        assert_eq!(calls, 3);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let run = |dt: f64, steps| {
            rk4_grid(|_, y: &[Complex<f64>], dy: &mut [Complex<f64>]| dy[0] = -y[0], 0.0, &[Complex::new(1.0, 0.0)], dt, steps)
                .last()
                .unwrap()[0]
                .re
        };
        let e1 = (run(0.1, 10) - (-1.0f64).exp()).abs();
        let e2 = (run(0.05, 20) - (-1.0f64).exp()).abs();
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.2, "order {order}");
    }
}
