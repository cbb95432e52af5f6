//! Scalar nonlinearities `kappa(s)`, `s = |x| >= 0`.

/// A nonlinearity with symbolic first and second derivatives.
///
/// `evaluate(s, from_left)` returns `(kappa, kappa', kappa'')` at `s`; at a
/// breakpoint `from_left` selects the branch ending there.
pub trait Kappa: Send + Sync {
    fn evaluate(&self, s: f64, from_left: bool) -> (f64, f64, f64);

    /// Points where the branch formula changes.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn value(&self, s: f64) -> f64 {
        self.evaluate(s, false).0
    }

    fn derivative(&self, s: f64) -> f64 {
        self.evaluate(s, false).1
    }

    /// `kappa_d(x) = kappa'(|x|)|x| + kappa(|x|)`.
    fn kappa_d(&self, x: f64) -> f64 {
        let s = x.abs();
        let (k, kp, _) = self.evaluate(s, false);
        kp * s + k
    }

    /// `|kappa_d'(x)| = |kappa''(s) s + 2 kappa'(s)|`, `s = |x|`.
    fn kappa_d_slope(&self, x: f64, from_left: bool) -> f64 {
        let s = x.abs();
        let (_, kp, kpp) = self.evaluate(s, from_left);
        (kpp * s + 2.0 * kp).abs()
    }
}

/// `kappa(s) = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantKappa(pub f64);

impl Kappa for ConstantKappa {
    fn evaluate(&self, _s: f64, _from_left: bool) -> (f64, f64, f64) {
        (self.0, 0.0, 0.0)
    }
}

/// Cubic piece `a0 + a1 (s - s0) + a2 (s - s0)^2 + a3 (s - s0)^3` on `[s0, next)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicBranch {
    pub start: f64,
    pub coeffs: [f64; 4],
}

impl CubicBranch {
    fn eval(&self, s: f64) -> (f64, f64, f64) {
        let [a0, a1, a2, a3] = self.coeffs;
        let u = s - self.start;
        (
            a0 + u * (a1 + u * (a2 + u * a3)),
            a1 + u * (2.0 * a2 + 3.0 * a3 * u),
            2.0 * a2 + 6.0 * a3 * u,
        )
    }
}

/// Piecewise cubic, C1 nonlinearity saturating at a constant:
///
/// ```text
/// kappa(s) = -5 s^3 + 1.5 s^2 + 1                   0   <= s < 0.1
///            -5 (s - 0.1)^3 + 0.15 (s - 0.1) + 1.01  0.1 <= s < 0.2
///            1.02                                    0.2 <= s
/// ```
///
/// `scale` stretches the argument: the stored curve is evaluated at
/// `s / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaPiecewise {
    branches: Vec<CubicBranch>,
    scale: f64,
}

impl Default for KappaPiecewise {
    fn default() -> Self {
        Self::rl_circuit()
    }
}

impl KappaPiecewise {
    pub fn rl_circuit() -> Self {
        Self {
            branches: vec![
                CubicBranch {
                    start: 0.0,
                    coeffs: [1.0, 0.0, 1.5, -5.0],
                },
                CubicBranch {
                    start: 0.1,
                    coeffs: [1.01, 0.15, 0.0, -5.0],
                },
                CubicBranch {
                    start: 0.2,
                    coeffs: [1.02, 0.0, 0.0, 0.0],
                },
            ],
            scale: 1.0,
        }
    }

    /// Same curve with breakpoints moved to `scale * [0.1, 0.2]`.
    pub fn scaled(mut self, scale: f64) -> Self {
        assert!(scale > 0.0, "scale must be positive");
        self.scale *= scale;
        self
    }

    pub fn branches(&self) -> &[CubicBranch] {
        &self.branches
    }

    pub fn saturation(&self) -> f64 {
        self.branches.last().map_or(0.0, |b| b.coeffs[0])
    }
}

impl Kappa for KappaPiecewise {
    fn evaluate(&self, s: f64, from_left: bool) -> (f64, f64, f64) {
        let r = s.abs() / self.scale;
        let idx = self
            .branches
            .iter()
            .rposition(|b| if from_left { b.start < r } else { b.start <= r })
            .unwrap_or(0);
        let (k, kp, kpp) = self.branches[idx].eval(r);
        (k, kp / self.scale, kpp / (self.scale * self.scale))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.branches.iter().skip(1).map(|b| b.start * self.scale).collect()
    }
}
