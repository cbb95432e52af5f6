//! Unitary DFT `F~ = F (x) I` with `F_{jq} = exp(-i omega_j T_{q-1}) / sqrt(N)`.
//!
//! Rows are ordered by the spectrum vector `p` (ascending harmonics) rather
//! than by FFT bins; harmonic `p_j` lives in bin `p_j mod N`. Since
//! `omega_j T_q = 2 pi p_j q / N`, the transform only depends on `N`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::linalg::spectrum::Spectrum;

/// Imaginary residue (relative to the input norm) above which the real
/// inverse transform logs a warning.
pub const IMAG_RESIDUE_WARN: f64 = 1e-8;

fn check_len(n: usize, spectrum: &Spectrum) -> Result<()> {
    if n != spectrum.len() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.len(),
            found: n,
        });
    }
    Ok(())
}

fn transform(
    x: &BlockVector<Complex64>,
    spectrum: &Spectrum,
    inverse: bool,
) -> Result<BlockVector<Complex64>> {
    let n = x.num_blocks();
    check_len(n, spectrum)?;
    let d = x.block_dim();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let scale = 1.0 / (n as f64).sqrt();
    let bins: Vec<usize> = (0..n).map(|j| spectrum.fft_bin(j)).collect();
    let mut out = BlockVector::zeros(n, d);
    let mut buf = vec![Complex64::default(); n];
    for c in 0..d {
        if inverse {
            for (j, &bin) in bins.iter().enumerate() {
                buf[bin] = x.block(j)[c];
            }
            fft.process(&mut buf);
            for (q, v) in buf.iter().enumerate() {
                out.block_mut(q)[c] = v * scale;
            }
        } else {
            for (q, v) in buf.iter_mut().enumerate() {
                *v = x.block(q)[c];
            }
            fft.process(&mut buf);
            for (j, &bin) in bins.iter().enumerate() {
                out.block_mut(j)[c] = buf[bin] * scale;
            }
        }
    }
    Ok(out)
}

/// `x^ = F~ x`; block `j` of the result is harmonic `p_j`.
pub fn dft_forward(x: &BlockVector<f64>, spectrum: &Spectrum) -> Result<BlockVector<Complex64>> {
    transform(&x.to_complex(), spectrum, false)
}

/// Forward transform of a complex block vector.
pub fn dft_forward_complex(
    x: &BlockVector<Complex64>,
    spectrum: &Spectrum,
) -> Result<BlockVector<Complex64>> {
    transform(x, spectrum, false)
}

/// `x = F~^H x^` without discarding the imaginary part.
pub fn dft_inverse_complex(
    x_hat: &BlockVector<Complex64>,
    spectrum: &Spectrum,
) -> Result<BlockVector<Complex64>> {
    transform(x_hat, spectrum, true)
}

/// `x = F~^H x^` for coefficients of a real signal.
///
/// The imaginary part is dropped; if it exceeds `1e-8 ||x^||` a warning is
/// logged since the input was then not Hermitian symmetric.
pub fn dft_inverse(x_hat: &BlockVector<Complex64>, spectrum: &Spectrum) -> Result<BlockVector<f64>> {
    let z = transform(x_hat, spectrum, true)?;
    let imag = z.as_slice().iter().map(|v| v.im * v.im).sum::<f64>().sqrt();
    let scale = x_hat.norm();
    if imag > IMAG_RESIDUE_WARN * scale {
        log::warn!(
            "inverse DFT discarded an imaginary residue of {imag:e} (input norm {scale:e})"
        );
    }
    BlockVector::from_flat(z.as_slice().iter().map(|v| v.re).collect(), z.block_dim())
}
