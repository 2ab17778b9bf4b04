// Fixed-point map of the scaled profile equation, templated on the working precision.
// The double instance drives the iteration; the __float128 instance evaluates the final
// residuals, whose H^2 norm with weight exp(alpha_hat x) would otherwise be dominated by
// transform round-off amplified near the domain edges.
#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>
#include <quadmath.h>

#include "wws/profile.hpp"

namespace wws {

namespace {

std::mutex& planner_mutex_d() {
  static std::mutex m;
  return m;
}

std::mutex& planner_mutex_q() {
  static std::mutex m;
  return m;
}

inline double rtanh(double x) { return std::tanh(x); }
inline __float128 rtanh(__float128 x) { return tanhq(x); }

template <class R>
struct Fft;

template <>
struct Fft<double> {
  fftw_plan f, b;
  int n;
  explicit Fft(int n_) : n(n_) {
    std::lock_guard<std::mutex> lock(planner_mutex_d());
    std::vector<fftw_complex> x(n), y(n);
    f = fftw_plan_dft_1d(n, x.data(), y.data(), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    b = fftw_plan_dft_1d(n, x.data(), y.data(), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex_d());
    fftw_destroy_plan(f);
    fftw_destroy_plan(b);
  }
  void forward(std::complex<double>* in, std::complex<double>* out) {
    fftw_execute_dft(f, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }
  void backward(std::complex<double>* in, std::complex<double>* out) {
    fftw_execute_dft(b, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }
};

template <>
struct Fft<__float128> {
  fftwq_plan f, b;
  int n;
  explicit Fft(int n_) : n(n_) {
    std::lock_guard<std::mutex> lock(planner_mutex_q());
    std::vector<fftwq_complex> x(n), y(n);
    f = fftwq_plan_dft_1d(n, x.data(), y.data(), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    b = fftwq_plan_dft_1d(n, x.data(), y.data(), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex_q());
    fftwq_destroy_plan(f);
    fftwq_destroy_plan(b);
  }
  void forward(std::complex<__float128>* in, std::complex<__float128>* out) {
    fftwq_execute_dft(f, reinterpret_cast<fftwq_complex*>(in), reinterpret_cast<fftwq_complex*>(out));
  }
  void backward(std::complex<__float128>* in, std::complex<__float128>* out) {
    fftwq_execute_dft(b, reinterpret_cast<fftwq_complex*>(in), reinterpret_cast<fftwq_complex*>(out));
  }
};

// Real-valued symbols of the map at scaled wavenumber k: tanh ratio T(eps k), Hilbert
// factor tanh(eps k) (times i), profile factor Q(k), and the 2/3 filter.
template <class R>
struct MapSymbols {
  std::vector<R> T, th, Q, keep;
  MapSymbols(int n, double Lhat, double eps) : T(n), th(n), Q(n), keep(n) {
    const R e = eps, g = R(1) - e * e;
    const R pi = R(M_PIq);
    for (int i = 0; i < n; ++i) {
      const int m = i <= n / 2 ? i : i - n;
      const R k = R(2) * pi * R(m) / R(Lhat);
      const R z = e * k;
      const R z2 = z * z;
      R t, omt;
      if (z2 < R(0.01)) {
        omt = z2 * (R(1) / 3 + z2 * (R(-2) / 15 + z2 * (R(17) / 315 + z2 * (R(-62) / 2835 +
              z2 * (R(1382) / 155925 + z2 * (R(-21844) / 6081075 + z2 * (R(929569) / 638512875)))))));
        t = R(1) - omt;
      } else {
        t = rtanh(z) / z;
        omt = R(1) - t;
      }
      T[i] = t;
      // Nyquist read as a cosine: the odd Hilbert factor averages to zero there.
      th[i] = (i == n / 2) ? R(0) : rtanh(z);
      Q[i] = e * e / (e * e + g * omt);
      keep[i] = (3 * std::abs(m) <= n) ? R(1) : R(0);
    }
  }
};

template <class R>
void apply_symbol(Fft<R>& fft, const std::vector<R>& in, const std::vector<R>& sym, bool times_i,
                  std::vector<R>& out) {
  const int n = fft.n;
  std::vector<std::complex<R>> a(n), c(n);
  for (int j = 0; j < n; ++j) a[j] = std::complex<R>(in[j], R(0));
  fft.forward(a.data(), c.data());
  for (int i = 0; i < n; ++i) {
    c[i] *= sym[i] / R(n);
    if (times_i) c[i] = std::complex<R>(-c[i].imag(), c[i].real());
  }
  fft.backward(c.data(), a.data());
  out.resize(n);
  for (int j = 0; j < n; ++j) out[j] = a[j].real();
}

template <class R>
std::vector<R> map_impl(const std::vector<R>& theta, double eps, double Lhat) {
  const int n = static_cast<int>(theta.size());
  Fft<R> fft(n);
  MapSymbols<R> s(n, Lhat, eps);
  const R e2 = R(eps) * R(eps), g = R(1) - e2;
  std::vector<R> tf, h, eta, N(n), out;
  apply_symbol(fft, theta, s.keep, false, tf);
  apply_symbol(fft, tf, s.th, true, h);
  apply_symbol(fft, tf, s.T, false, eta);
  for (int j = 0; j < n; ++j) {
    const R t = tf[j];
    const R A = R(1.5) * t * t + e2 * t * t * t - R(0.5) * h[j] * h[j] * (R(1) - R(2) * g * e2 * eta[j]);
    const R B = (R(1) + e2 * t) * (R(1) + e2 * t);
    N[j] = A / B;
  }
  std::vector<R> QP(n);
  for (int i = 0; i < n; ++i) QP[i] = s.Q[i] * s.keep[i];
  apply_symbol(fft, N, QP, false, out);
  return out;
}

}  // namespace

RVec profile_map(const RVec& theta, double eps, const Grid& scaled) {
  std::vector<double> t(theta.data(), theta.data() + theta.size());
  std::vector<double> r = map_impl<double>(t, eps, scaled.period());
  return Eigen::Map<RVec>(r.data(), r.size());
}

RVec profile_residual_quad(const RVec& theta, double eps, const Grid& scaled) {
  const int n = static_cast<int>(theta.size());
  std::vector<__float128> t(n);
  for (int j = 0; j < n; ++j) t[j] = theta[j];
  std::vector<__float128> m = map_impl<__float128>(t, eps, scaled.period());
  RVec r(n);
  for (int j = 0; j < n; ++j) r[j] = static_cast<double>(t[j] - m[j]);
  return r;
}

}  // namespace wws
