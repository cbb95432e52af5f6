use std::f64::consts::PI;

use serde::Serialize;

/// Double-sided spectrum `p = [-floor(N/2) + delta, ..., floor(N/2)]` with
/// `delta = 1` for even `N`, and angular frequencies `omega_j = 2 pi p_j / T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    indices: Vec<i64>,
    frequencies: Vec<f64>,
    period: f64,
}

pub fn build_spectrum(n: usize, period: f64) -> Spectrum {
    assert!(n >= 1, "spectrum needs at least one harmonic");
    assert!(period > 0.0, "period must be positive");
    let half = (n / 2) as i64;
    let delta = if n.is_multiple_of(2) { 1 } else { 0 };
    let indices: Vec<i64> = (-half + delta..=half).collect();
    debug_assert_eq!(indices.len(), n);
    let frequencies = indices
        .iter()
        .map(|&p| 2.0 * PI * p as f64 / period)
        .collect();
    Spectrum {
        indices,
        frequencies,
        period,
    }
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Standard FFT bin (`0..N`) holding harmonic `j` of this spectrum.
    pub fn fft_bin(&self, j: usize) -> usize {
        self.indices[j].rem_euclid(self.len() as i64) as usize
    }

    /// Position of the DC component.
    pub fn dc_index(&self) -> usize {
        self.indices
            .iter()
            .position(|&p| p == 0)
            .expect("every spectrum contains p = 0")
    }
}
