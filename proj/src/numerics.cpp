#include "transmute/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "transmute/errors.hpp"

namespace transmute {

// ---------------------------------------------------------------------------
// Polynomials

double PolynomialCoeffs::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

void check_order(std::size_t n, const char* what) {
  if (n > kMaxPolynomialOrder)
    throw DomainError(std::string(what) + ": order " + std::to_string(n) +
                      " exceeds the supported maximum " +
                      std::to_string(kMaxPolynomialOrder) + " (coefficients overflow)");
}

void check_finite(const std::vector<double>& c, const char* what) {
  for (double v : c)
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": coefficient overflow");
}

}  // namespace

PolynomialCoeffs legendre_coeffs(std::size_t n) {
  check_order(n, "legendre_coeffs");
  std::vector<double> prev{1.0};
  if (n == 0) return {prev};
  std::vector<double> cur{0.0, 1.0};
  for (std::size_t k = 1; k < n; ++k) {
    // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
    std::vector<double> next(k + 2, 0.0);
    const double a = static_cast<double>(2 * k + 1) / static_cast<double>(k + 1);
    const double b = static_cast<double>(k) / static_cast<double>(k + 1);
    for (std::size_t i = 0; i <= k; ++i) next[i + 1] += a * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= b * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  check_finite(cur, "legendre_coeffs");
  return {cur};
}

PolynomialCoeffs hermite_coeffs(std::size_t n) {
  check_order(n, "hermite_coeffs");
  std::vector<double> prev{1.0};
  if (n == 0) return {prev};
  std::vector<double> cur{0.0, 2.0};
  for (std::size_t k = 1; k < n; ++k) {
    // H_{k+1} = 2x H_k - 2k H_{k-1}
    std::vector<double> next(k + 2, 0.0);
    for (std::size_t i = 0; i <= k; ++i) next[i + 1] += 2.0 * cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2.0 * static_cast<double>(k) * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  check_finite(cur, "hermite_coeffs");
  return {cur};
}

double legendre_p(std::size_t n, double x) noexcept {
  double p0 = 1.0;
  if (n == 0) return p0;
  double p1 = x;
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk + 1.0) * x * p1 - kk * p0) / (kk + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_p_all(double x, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = ((2.0 * kk + 1.0) * x * out[k] - kk * out[k - 1]) / (kk + 1.0);
  }
}

double laguerre_eval(std::size_t n, double t) noexcept {
  double l0 = 1.0;
  if (n == 0) return l0;
  double l1 = 1.0 - t;
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double l2 = ((2.0 * kk + 1.0 - t) * l1 - kk * l0) / (kk + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

void laguerre_all(double t, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = 1.0 - t;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = ((2.0 * kk + 1.0 - t) * out[k] - kk * out[k - 1]) / (kk + 1.0);
  }
}

// ---------------------------------------------------------------------------
// Spherical Bessel functions

namespace {

constexpr double kRescale = 1e250;

// Ascending series, |z| <= 1.
void sph_bessel_series(cplx z, std::span<cplx> out) {
  const cplx mz2 = -0.5 * z * z;
  cplx lead = 1.0;  // z^n / (2n+1)!!
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (n > 0) lead *= z / static_cast<double>(2 * n + 1);
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= mz2 / (static_cast<double>(k) * static_cast<double>(2 * n + 2 * k + 1));
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    out[n] = lead * sum;
  }
}

}  // namespace

void spherical_bessel_j_all(cplx z, std::span<cplx> out) {
  if (out.empty()) return;
  const std::size_t n_max = out.size() - 1;
  const double az = std::abs(z);
  if (az == 0.0) {
    std::fill(out.begin(), out.end(), cplx{0.0});
    out[0] = 1.0;
    return;
  }
  if (az <= 1e-3) {
    sph_bessel_series(z, out);
    return;
  }
  const cplx j0 = std::sin(z) / z;
  const cplx j1 = (j0 - std::cos(z)) / z;
  if (az >= static_cast<double>(n_max)) {
    const cplx iz = 1.0 / z;
    out[0] = j0;
    if (n_max >= 1) out[1] = j1;
    for (std::size_t n = 1; n < n_max; ++n)
      out[n + 1] = static_cast<double>(2 * n + 1) * iz * out[n] - out[n - 1];
    return;
  }
  // Miller's algorithm, started where the leading-order decay
  // |z|^n / (2n+1)!! has put 1e-20 between j_start and j_{n_max}
  std::size_t start = n_max;
  for (double ratio = 1.0; ratio > 1e-20 || static_cast<double>(start) < az;)
    ratio *= az / static_cast<double>(2 * ++start + 1);
  const cplx iz = 1.0 / z;
  cplx p_next = 0.0, p = 1e-30;
  for (std::size_t n = start; n > 0; --n) {
    if (n <= n_max) out[n] = p;
    const cplx p_prev = static_cast<double>(2 * n + 1) * iz * p - p_next;
    p_next = p;
    p = p_prev;
    if (std::abs(p.real()) + std::abs(p.imag()) > kRescale) {
      p /= kRescale;
      p_next /= kRescale;
      for (std::size_t k = n; k <= n_max; ++k) out[k] /= kRescale;
    }
  }
  out[0] = p;
  cplx scale;
  if (n_max == 0 || std::abs(j0) >= std::abs(j1))
    scale = j0 / out[0];
  else
    scale = j1 / out[1];
  for (auto& v : out) v *= scale;
}

std::vector<cplx> spherical_bessel_j_all(std::size_t n_max, cplx z) {
  std::vector<cplx> out(n_max + 1);
  spherical_bessel_j_all(z, out);
  return out;
}

cplx spherical_bessel_j(std::size_t n, cplx z) {
  std::vector<cplx> out(n + 1);
  spherical_bessel_j_all(z, out);
  return out[n];
}

// ---------------------------------------------------------------------------
// Legendre functions of the second kind

bool on_legendre_cut(cplx z) noexcept {
  const double dist = std::abs(z.imag()) + std::max(0.0, std::abs(z.real()) - 1.0);
  return dist <= 1e-8;
}

std::vector<cplx> legendre_q_all(std::size_t n_max, cplx z) {
  if (on_legendre_cut(z))
    throw DomainError("legendre_q: argument lies on the cut [-1, 1]");
  std::vector<cplx> out(n_max + 1);
  // atanh(1/z) = 1/2 log((z+1)/(z-1)) without the cancellation at large |z|
  const cplx q0 = std::atanh(1.0 / z);
  out[0] = q0;
  if (n_max == 0) return out;

  // Convergence factor of the backward recurrence, min |z -+ sqrt(z^2 - 1)|;
  // the two roots multiply to 1, so take the reciprocal of the larger.
  const cplx s = std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  const double rho = 1.0 / std::max(std::abs(z + s), std::abs(z - s));
  const double decay = -std::log(std::max(rho, 1e-300));
  const double extra = std::ceil(40.0 / std::max(decay, 1e-12)) + 20.0;
  if (extra > 4.0e6) throw DomainError("legendre_q: argument too close to the cut");
  const std::size_t start = n_max + static_cast<std::size_t>(extra);

  cplx a_next = 0.0, a = 1e-30;
  for (std::size_t n = start; n > 0; --n) {
    if (n <= n_max) out[n] = a;
    const double nn = static_cast<double>(n);
    // n Q_{n-1} = (2n+1) z Q_n - (n+1) Q_{n+1}
    const cplx a_prev = ((2.0 * nn + 1.0) * z * a - (nn + 1.0) * a_next) / nn;
    a_next = a;
    a = a_prev;
    if (std::abs(a) > kRescale) {
      a /= kRescale;
      a_next /= kRescale;
      for (std::size_t k = n; k <= n_max; ++k) out[k] /= kRescale;
    }
  }
  const cplx scale = q0 / a;
  for (std::size_t n = 1; n <= n_max; ++n) out[n] *= scale;
  return out;
}

cplx legendre_q(std::size_t n, cplx z) { return legendre_q_all(n, z)[n]; }

// ---------------------------------------------------------------------------
// Quadrature

namespace {

constexpr std::array<double, 6> kCentral{11.0, -93.0, 802.0, 802.0, -93.0, 11.0};
constexpr std::array<double, 6> kEdge0{475.0, 1427.0, -798.0, 482.0, -173.0, 27.0};
constexpr std::array<double, 6> kEdge1{-27.0, 637.0, 1022.0, -258.0, 77.0, -11.0};
constexpr double kDenom = 1440.0;

// Weights integrating the interpolant through nodes 0..p-1 over [a, a+1].
std::vector<double> lagrange_interval_weights(std::size_t p, std::size_t a) {
  static constexpr std::array<double, 3> gx{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> w(p, 0.0);
  for (std::size_t g = 0; g < 3; ++g) {
    const double s = static_cast<double>(a) + 0.5 + 0.5 * gx[g];
    for (std::size_t j = 0; j < p; ++j) {
      double l = 1.0;
      for (std::size_t k = 0; k < p; ++k)
        if (k != j) l *= (s - static_cast<double>(k)) / (static_cast<double>(j) - static_cast<double>(k));
      w[j] += 0.5 * gw[g] * l;
    }
  }
  return w;
}

template <class T>
std::vector<T> interval_integrals(std::span<const T> y, const Grid& grid) {
  const double h = grid.step();
  std::vector<T> seg(grid.intervals(), T{});
  for (auto [first, last] : grid.segments()) {
    const std::size_t nodes = last - first + 1;
    if (nodes >= 6) {
      for (std::size_t i = first; i < last; ++i) {
        T acc{};
        if (i >= first + 2 && i + 3 <= last) {
          for (std::size_t j = 0; j < 6; ++j) acc += kCentral[j] * y[i - 2 + j];
        } else if (i < first + 2) {
          const auto& w = (i == first) ? kEdge0 : kEdge1;
          for (std::size_t j = 0; j < 6; ++j) acc += w[j] * y[first + j];
        } else {
          const auto& w = (i == last - 1) ? kEdge0 : kEdge1;
          for (std::size_t j = 0; j < 6; ++j) acc += w[j] * y[last - j];
        }
        seg[i] = acc * (h / kDenom);
      }
    } else {
      for (std::size_t i = first; i < last; ++i) {
        const auto w = lagrange_interval_weights(nodes, i - first);
        T acc{};
        for (std::size_t j = 0; j < nodes; ++j) acc += w[j] * y[first + j];
        seg[i] = acc * h;
      }
    }
  }
  return seg;
}

}  // namespace

template <class T>
std::vector<T> antiderivative(std::span<const T> samples, const Grid& grid) {
  if (samples.size() != grid.size())
    throw DomainError("antiderivative: sample count does not match the grid");
  const auto seg = interval_integrals(samples, grid);
  std::vector<T> out(grid.size(), T{});
  const std::size_t z = grid.zero_index();
  for (std::size_t i = z; i + 1 < grid.size(); ++i) out[i + 1] = out[i] + seg[i];
  for (std::size_t i = z; i > 0; --i) out[i - 1] = out[i] - seg[i - 1];
  return out;
}

template <class T>
T integrate(std::span<const T> samples, const Grid& grid) {
  if (samples.size() != grid.size())
    throw DomainError("integrate: sample count does not match the grid");
  CompensatedSum<T> acc;
  for (const T& v : interval_integrals(samples, grid)) acc.add(v);
  return acc.value();
}

template <class T>
T interpolate(const Grid& grid, std::span<const T> values, double x) {
  constexpr std::size_t kInterpolationPoints = 8;
  std::size_t node;
  if (grid.node_index(x, node)) return values[node];
  if (!grid.contains(x)) throw DomainError("interpolate: abscissa outside the grid");
  const double h = grid.step();
  const double pos = (x - grid.left()) / h;
  std::size_t i = static_cast<std::size_t>(std::floor(pos));
  i = std::min(i, grid.intervals() - 1);
  // Segment holding interval [i, i+1].
  std::size_t first = 0, last = grid.size() - 1;
  for (auto [a, b] : grid.segments())
    if (i >= a && i + 1 <= b) {
      first = a;
      last = b;
      break;
    }
  // 8-point Lagrange, centred on the interval where the segment allows
  const std::size_t cnt = std::min<std::size_t>(kInterpolationPoints, last - first + 1);
  const std::size_t back = cnt / 2 - 1;
  std::size_t lo = (i >= first + back) ? i - back : first;
  if (lo + cnt - 1 > last) lo = last + 1 - cnt;
  T acc{};
  for (std::size_t j = 0; j < cnt; ++j) {
    double l = 1.0;
    for (std::size_t k = 0; k < cnt; ++k)
      if (k != j) l *= (x - grid[lo + k]) / (grid[lo + j] - grid[lo + k]);
    acc += l * values[lo + j];
  }
  return acc;
}

template std::vector<double> antiderivative(std::span<const double>, const Grid&);
template std::vector<cplx> antiderivative(std::span<const cplx>, const Grid&);
template double integrate(std::span<const double>, const Grid&);
template cplx integrate(std::span<const cplx>, const Grid&);
template double interpolate(const Grid&, std::span<const double>, double);
template cplx interpolate(const Grid&, std::span<const cplx>, double);

// ---------------------------------------------------------------------------
// Compensated summation

namespace {

inline void neumaier(double& sum, double& comp, double v) noexcept {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v))
    comp += (sum - t) + v;
  else
    comp += (v - t) + sum;
  sum = t;
}

}  // namespace

template <>
void CompensatedSum<double>::add(double v) noexcept {
  neumaier(sum_, comp_, v);
}

template <>
void CompensatedSum<cplx>::add(cplx v) noexcept {
  double sr = sum_.real(), si = sum_.imag(), cr = comp_.real(), ci = comp_.imag();
  neumaier(sr, cr, v.real());
  neumaier(si, ci, v.imag());
  sum_ = {sr, si};
  comp_ = {cr, ci};
}

// ---------------------------------------------------------------------------
// Least squares

template <class T>
double Matrix<T>::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const T& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

template class Matrix<double>;
template class Matrix<cplx>;

namespace {

inline double conj_if(double v) { return v; }
inline cplx conj_if(cplx v) { return std::conj(v); }

inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }
inline cplx sign_of(cplx v) {
  const double a = std::abs(v);
  return a == 0.0 ? cplx{1.0} : v / a;
}

template <class T>
struct QrWork {
  std::size_t m, k;
  std::vector<T> r;  // column-major m x k
  std::vector<T> rhs;
  std::vector<std::size_t> perm;
  T& at(std::size_t i, std::size_t j) { return r[j * m + i]; }
};

// Householder reflection of column j (rows j..m-1) applied to columns j..k-1 and rhs.
template <class T>
void reflect(QrWork<T>& w, std::size_t j) {
  const std::size_t m = w.m;
  double alpha2 = 0.0;
  for (std::size_t i = j; i < m; ++i) alpha2 += std::norm(w.at(i, j));
  const double alpha = std::sqrt(alpha2);
  if (alpha == 0.0) return;
  std::vector<T> v(m - j);
  for (std::size_t i = j; i < m; ++i) v[i - j] = w.at(i, j);
  const T phase = sign_of(v[0]);
  v[0] += phase * alpha;
  double vnorm2 = 0.0;
  for (const T& e : v) vnorm2 += std::norm(e);
  auto apply = [&](auto&& get) {
    T dot{};
    for (std::size_t i = j; i < m; ++i) dot += conj_if(v[i - j]) * get(i);
    const T f = 2.0 * dot / vnorm2;
    for (std::size_t i = j; i < m; ++i) get(i) -= f * v[i - j];
  };
  for (std::size_t c = j; c < w.k; ++c) apply([&](std::size_t i) -> T& { return w.at(i, c); });
  apply([&](std::size_t i) -> T& { return w.rhs[i]; });
}

template <class T>
LstsqResult<T> qr_solve(const Matrix<T>& a, std::span<const T> b, bool pivot) {
  const std::size_t m = a.rows(), k = a.cols();
  if (b.size() != m) throw DomainError("lstsq: right-hand side length mismatch");
  if (m < k) throw DomainError("lstsq: need at least as many rows as columns");
  QrWork<T> w{m, k, std::vector<T>(m * k), std::vector<T>(b.begin(), b.end()), {}};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) w.at(i, j) = a(i, j);
  w.perm.resize(k);
  for (std::size_t j = 0; j < k; ++j) w.perm[j] = j;

  const double anorm = a.frobenius_norm();
  const double threshold = kRankTolerance * anorm;
  std::size_t rank = k;
  for (std::size_t j = 0; j < k; ++j) {
    if (pivot) {
      std::size_t best = j;
      double best_norm = -1.0;
      for (std::size_t c = j; c < k; ++c) {
        double s = 0.0;
        for (std::size_t i = j; i < m; ++i) s += std::norm(w.at(i, c));
        if (s > best_norm) {
          best_norm = s;
          best = c;
        }
      }
      if (best != j) {
        for (std::size_t i = 0; i < m; ++i) std::swap(w.at(i, j), w.at(i, best));
        std::swap(w.perm[j], w.perm[best]);
      }
      if (std::sqrt(best_norm) < threshold) {
        rank = j;
        break;
      }
    }
    reflect(w, j);
  }

  LstsqResult<T> out;
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (std::size_t j = 0; j < rank; ++j) {
    const double d = std::abs(w.at(j, j));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  out.min_diagonal_ratio = anorm > 0.0 ? dmin / anorm : 0.0;
  out.condition_estimate = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
  if (!pivot && (anorm == 0.0 || dmin < threshold)) {
    std::ostringstream msg;
    msg << "lstsq: matrix is rank deficient (min |R_jj| / ||A|| = " << out.min_diagonal_ratio << ")";
    throw RankDeficient(msg.str());
  }

  std::vector<T> y(k, T{});
  for (std::size_t jj = rank; jj > 0; --jj) {
    const std::size_t j = jj - 1;
    T s = w.rhs[j];
    for (std::size_t c = j + 1; c < rank; ++c) s -= w.at(j, c) * y[c];
    y[j] = s / w.at(j, j);
  }
  out.x.assign(k, T{});
  for (std::size_t j = 0; j < k; ++j) out.x[w.perm[j]] = y[j];

  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    T s = -b[i];
    for (std::size_t j = 0; j < k; ++j) s += a(i, j) * out.x[j];
    res += std::norm(s);
  }
  out.residual_norm = std::sqrt(res);
  return out;
}

}  // namespace

template <class T>
LstsqResult<T> lstsq(const Matrix<T>& a, std::span<const T> b) {
  return qr_solve(a, b, false);
}

template <class T>
LstsqResult<T> lstsq_pivoted(const Matrix<T>& a, std::span<const T> b) {
  return qr_solve(a, b, true);
}

template LstsqResult<double> lstsq(const Matrix<double>&, std::span<const double>);
template LstsqResult<cplx> lstsq(const Matrix<cplx>&, std::span<const cplx>);
template LstsqResult<double> lstsq_pivoted(const Matrix<double>&, std::span<const double>);
template LstsqResult<cplx> lstsq_pivoted(const Matrix<cplx>&, std::span<const cplx>);

}  // namespace transmute
