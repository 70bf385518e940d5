#include "ghostsim/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

// Plan creation is not thread-safe in FFTW; execution via fftw_execute_dft is.
// FFTW_UNALIGNED lets plans run on any std::vector storage.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> probe(static_cast<size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(probe.data());
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw ValidationError("fftw plan creation failed for n=" + std::to_string(n));
    plans_.emplace(key, p);
    return p;
  }

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace

void fft_inplace(std::vector<Complex>& v, int sign) {
  if (v.empty()) return;
  fftw_plan p = PlanCache::instance().get(static_cast<int>(v.size()), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(p, buf, buf);
}

std::vector<Complex> fft(std::vector<Complex> v, int sign) {
  fft_inplace(v, sign);
  return v;
}

double fft_bin_frequency(const Axis& a, int bin) {
  const double dq = 2.0 * std::numbers::pi / (a.n * a.dx);
  return dq * (bin <= a.n / 2 ? bin : bin - a.n);
}

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2 pi)

// Centered grids put samples at (index - c) * pitch with c = (n-1)/2, which is
// half-integer for even n. The phase ramps below map that layout onto the
// native DFT.
struct CenteredRamps {
  std::vector<Complex> in;   // applied before the DFT
  std::vector<Complex> out;  // applied after
};

CenteredRamps make_ramps(int n, double c, int sign) {
  CenteredRamps r;
  r.in.resize(static_cast<size_t>(n));
  r.out.resize(static_cast<size_t>(n));
  const double w = 2.0 * std::numbers::pi * c / n;
  const double c2 = 2.0 * std::numbers::pi * c * c / n;
  for (int j = 0; j < n; ++j) {
    r.in[static_cast<size_t>(j)] = std::polar(1.0, -sign * w * j);
    r.out[static_cast<size_t>(j)] = std::polar(1.0, -sign * (w * j - c2));
  }
  return r;
}

}  // namespace

ComplexField dft_centered(const ComplexField& f) {
  const Axis& a = f.axis;
  const Axis qa = fourier_dual_axis(a);
  const int n = a.n;
  const double c = 0.5 * (n - 1);
  CenteredRamps r = make_ramps(n, c, -1);

  std::vector<Complex> work(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    work[static_cast<size_t>(j)] = f.values[static_cast<size_t>(j)] * r.in[static_cast<size_t>(j)];
  fft_inplace(work, -1);
  const double scale = a.dx * kInvSqrt2Pi;
  for (int m = 0; m < n; ++m) {
    const double qm = qa.coord(m);
    work[static_cast<size_t>(m)] *= r.out[static_cast<size_t>(m)] * scale *
                                    std::polar(1.0, -qm * a.center);
  }
  return ComplexField(qa, std::move(work));
}

ComplexField idft_centered(const ComplexField& spectrum, double center_x) {
  const Axis& qa = spectrum.axis;
  const int n = qa.n;
  const double dx = 2.0 * std::numbers::pi / (n * qa.dx);
  const Axis xa = Axis{n, dx, center_x};
  const double c = 0.5 * (n - 1);
  CenteredRamps r = make_ramps(n, c, +1);

  std::vector<Complex> work(static_cast<size_t>(n));
  for (int m = 0; m < n; ++m) {
    const double qm = qa.coord(m);
    work[static_cast<size_t>(m)] = spectrum.values[static_cast<size_t>(m)] *
                                   r.in[static_cast<size_t>(m)] *
                                   std::polar(1.0, qm * center_x);
  }
  fft_inplace(work, +1);
  const double scale = qa.dx * kInvSqrt2Pi;
  for (int j = 0; j < n; ++j)
    work[static_cast<size_t>(j)] *= r.out[static_cast<size_t>(j)] * scale;
  return ComplexField(xa, std::move(work));
}

std::vector<Complex> circular_cross_correlation(const std::vector<Complex>& a,
                                                const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw ValidationError("cross-correlation length mismatch");
  const size_t n = a.size();
  std::vector<Complex> fa = fft(a, -1);
  std::vector<Complex> fb = fft(b, -1);
  for (size_t i = 0; i < n; ++i) fa[i] = std::conj(fa[i]) * fb[i];
  fft_inplace(fa, +1);
  const double inv = 1.0 / static_cast<double>(n);
  for (Complex& v : fa) v *= inv;
  return fa;
}

std::vector<double> circular_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b) {
  std::vector<Complex> ca(a.begin(), a.end());
  std::vector<Complex> cb(b.begin(), b.end());
  std::vector<Complex> cc = circular_cross_correlation(ca, cb);
  std::vector<double> out(cc.size());
  for (size_t i = 0; i < cc.size(); ++i) out[i] = cc[i].real();
  return out;
}

}  // namespace ghostsim
