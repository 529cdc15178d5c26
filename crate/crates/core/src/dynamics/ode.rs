//! Explicit Runge-Kutta steppers on dense complex matrices.

use num_complex::Complex64;

use crate::space::CMatrix;

/// Right-hand side `dy/dt = f(t, y)`, written into the third argument.
pub(crate) trait Rhs {
    fn eval(&self, t: f64, y: &CMatrix, out: &mut CMatrix);
}

fn lincomb(out: &mut CMatrix, y: &CMatrix, terms: &[(f64, &CMatrix)]) {
    let o = out.as_mut_slice();
    o.copy_from_slice(y.as_slice());
    for (w, k) in terms {
        if *w == 0.0 {
            continue;
        }
        let w = Complex64::new(*w, 0.0);
        for (a, b) in o.iter_mut().zip(k.as_slice()) {
            *a += w * b;
        }
    }
}

pub(crate) struct Rk4 {
    k: [CMatrix; 4],
    tmp: CMatrix,
}

impl Rk4 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let z = || CMatrix::zeros(rows, cols);
        Self {
            k: [z(), z(), z(), z()],
            tmp: z(),
        }
    }

    pub fn step(&mut self, f: &impl Rhs, t: f64, h: f64, y: &mut CMatrix) {
        let [k1, k2, k3, k4] = &mut self.k;
        f.eval(t, y, k1);
        lincomb(&mut self.tmp, y, &[(h / 2.0, k1)]);
        f.eval(t + h / 2.0, &self.tmp, k2);
        lincomb(&mut self.tmp, y, &[(h / 2.0, k2)]);
        f.eval(t + h / 2.0, &self.tmp, k3);
        lincomb(&mut self.tmp, y, &[(h, k3)]);
        f.eval(t + h, &self.tmp, k4);
        let (a, b) = (h / 6.0, h / 3.0);
        for (((yi, a1), (a2, a3)), a4) in y
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice().iter().zip(k3.as_slice()))
            .zip(k4.as_slice())
        {
            *yi += (a1 + a4) * a + (a2 + a3) * b;
        }
    }
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand-Prince 5(4) with first-same-as-last reuse.
pub(crate) struct DormandPrince {
    k: Vec<CMatrix>,
    y_new: CMatrix,
    rtol: f64,
    atol: f64,
    fsal_valid: bool,
    pub h: f64,
    pub h_max: f64,
}

impl DormandPrince {
    pub fn new(rows: usize, cols: usize, rtol: f64, atol: f64, h0: f64, h_max: f64) -> Self {
        Self {
            k: (0..7).map(|_| CMatrix::zeros(rows, cols)).collect(),
            y_new: CMatrix::zeros(rows, cols),
            rtol,
            atol,
            fsal_valid: false,
            h: h0.min(h_max),
            h_max,
        }
    }

    /// Advances `y` by one accepted step no longer than `limit`; returns the
    /// step actually taken.
    pub fn step(&mut self, f: &impl Rhs, t: f64, limit: f64, y: &mut CMatrix) -> f64 {
        if !self.fsal_valid {
            f.eval(t, y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        loop {
            let h = self.h.min(limit).min(self.h_max);
            for s in 1..7 {
                let (done, rest) = self.k.split_at_mut(s);
                let terms: Vec<(f64, &CMatrix)> = (0..s).map(|j| (h * A[s][j], &done[j])).collect();
                lincomb(&mut self.y_new, y, &terms);
                f.eval(t + C[s] * h, &self.y_new, &mut rest[0]);
            }
            // y_new currently holds the fifth-order solution (stage 7 input)
            let mut acc = 0.0;
            let n = y.len() as f64;
            for i in 0..y.len() {
                let mut e = Complex64::new(0.0, 0.0);
                for s in 0..7 {
                    if E[s] != 0.0 {
                        e += self.k[s].as_slice()[i] * E[s];
                    }
                }
                let scale = self.atol
                    + self.rtol * y.as_slice()[i].norm().max(self.y_new.as_slice()[i].norm());
                acc += (e.norm() * h / scale).powi(2);
            }
            let err = (acc / n).sqrt();
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                y.copy_from(&self.y_new);
                self.k.swap(0, 6);
                if h >= self.h.min(self.h_max) * 0.999 {
                    self.h = (h * factor).min(self.h_max);
                }
                return h;
            }
            self.h = h * factor.min(1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotation;
    impl Rhs for Rotation {
        fn eval(&self, _t: f64, y: &CMatrix, out: &mut CMatrix) {
            out.copy_from(&(y * Complex64::new(-0.3, -2.0)));
        }
    }

    struct Forced;
    impl Rhs for Forced {
        fn eval(&self, t: f64, _y: &CMatrix, out: &mut CMatrix) {
            out.fill(Complex64::new(t.cos(), 0.0));
        }
    }

    fn exact(t: f64) -> Complex64 {
        (Complex64::new(-0.3, -2.0) * t).exp()
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |n: usize| {
            let mut y = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            let mut s = Rk4::new(1, 1);
            let h = 2.0 / n as f64;
            for i in 0..n {
                s.step(&Rotation, i as f64 * h, h, &mut y);
            }
            (y[(0, 0)] - exact(2.0)).norm()
        };
        let ratio = err(50) / err(100);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn rk4_handles_explicit_time() {
        let mut y = CMatrix::zeros(1, 1);
        let mut s = Rk4::new(1, 1);
        for i in 0..200 {
            s.step(&Forced, i as f64 * 0.01, 0.01, &mut y);
        }
        assert!((y[(0, 0)].re - 2f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn adaptive_meets_tolerance() {
        let mut y = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let mut s = DormandPrince::new(1, 1, 1e-10, 1e-12, 1e-3, 1.0);
        let mut t = 0.0;
        let mut steps = 0;
        while t < 3.0 {
            t += s.step(&Rotation, t, 3.0 - t, &mut y);
            steps += 1;
        }
        assert!((t - 3.0).abs() < 1e-14);
        assert!((y[(0, 0)] - exact(3.0)).norm() < 1e-8);
        assert!(steps < 400, "{steps} steps");
    }
}
