#pragma once

#include <vector>

#include "ghostsim/axis.hpp"

namespace ghostsim {

/// Unnormalized c2c DFT, FFTW-backed. sign = -1: sum_j v_j e^{-2pi i m j / n}
/// (forward), sign = +1: the conjugate sum (backward). Plans are cached per
/// (n, sign) and execution is thread-safe.
void fft_inplace(std::vector<Complex>& v, int sign);
std::vector<Complex> fft(std::vector<Complex> v, int sign);

/// Spatial frequency of FFT bin m on the dual of axis `a` in native DFT
/// layout: dq * m for m <= n/2, dq * (m - n) above.
double fft_bin_frequency(const Axis& a, int bin);

/// Unitary transform pair on centered grids with the convention
///   F(q) = (2pi)^(-1/2) integral f(x) e^{-iqx} dx,
///   f(x) = (2pi)^(-1/2) integral F(q) e^{+iqx} dq.
/// dft_centered maps a field on `f.axis` to fourier_dual_axis(f.axis);
/// idft_centered inverts it onto a grid centered at `center_x`.
ComplexField dft_centered(const ComplexField& f);
ComplexField idft_centered(const ComplexField& spectrum, double center_x = 0.0);

/// Circular cross-correlation c[m] = sum_j conj(a[j]) b[(j+m) mod n], m = 0..n-1.
std::vector<Complex> circular_cross_correlation(const std::vector<Complex>& a,
                                                const std::vector<Complex>& b);
std::vector<double> circular_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b);

}  // namespace ghostsim
