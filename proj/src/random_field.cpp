#include "sdg/random_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Even-frequency equation c*cos(w a) - w*sin(w a) = 0 and odd-frequency
// equation w*cos(w a) + c*sin(w a) = 0 for the exponential kernel on an
// interval of half-width a, with c = 1/ell. Each branch
// ((k-1/2)pi/a, (k+1/2)pi/a) holds one root of each family; the even root of
// branch k lies in [k pi/a, (k+1/2) pi/a], the odd root in
// [(k-1/2) pi/a, k pi/a].
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw std::runtime_error("solve_1d_eigenpairs: root bracketing failed");
  while (hi - lo > 1e-12) {
    double midpt = 0.5 * (lo + hi);
    double fm = f(midpt);
    if (fm == 0.0) return midpt;
    if (flo * fm < 0.0) {
      hi = midpt;
    } else {
      lo = midpt;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double Eigenpair1D::eval(double x) const {
  const double t = x - mid;
  return (even ? std::cos(omega * t) : std::sin(omega * t)) / norm;
}

std::vector<Eigenpair1D> solve_1d_eigenpairs(double ell, double a, double b, int count) {
  if (ell <= 0.0) throw std::invalid_argument("solve_1d_eigenpairs: correlation length must be > 0");
  if (count < 1) throw std::invalid_argument("solve_1d_eigenpairs: count must be >= 1");
  if (!(a < b)) throw std::invalid_argument("solve_1d_eigenpairs: empty interval");

  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double c = 1.0 / ell;

  auto even_fn = [&](double w) { return c * std::cos(w * half) - w * std::sin(w * half); };
  auto odd_fn = [&](double w) { return w * std::cos(w * half) + c * std::sin(w * half); };

  std::vector<Eigenpair1D> pairs;
  pairs.reserve(count);
  // Frequencies interleave as even_0 < odd_1 < even_1 < odd_2 < ..., so
  // eigenvalues come out already sorted.
  for (int k = 0; static_cast<int>(pairs.size()) < count; ++k) {
    if (k > 0) {
      double w = bisect(odd_fn, (k - 0.5) * kPi / half + 1e-14, k * kPi / half);
      Eigenpair1D p;
      p.omega = w;
      p.lambda = 2.0 * c / (w * w + c * c);
      p.even = false;
      p.norm = std::sqrt(half - std::sin(2.0 * w * half) / (2.0 * w));
      p.mid = mid;
      p.half = half;
      pairs.push_back(p);
      if (static_cast<int>(pairs.size()) == count) break;
    }
    double w = bisect(even_fn, k * kPi / half + (k == 0 ? 1e-14 : 0.0), (k + 0.5) * kPi / half);
    Eigenpair1D p;
    p.omega = w;
    p.lambda = 2.0 * c / (w * w + c * c);
    p.even = true;
    p.norm = std::sqrt(half + std::sin(2.0 * w * half) / (2.0 * w));
    p.mid = mid;
    p.half = half;
    pairs.push_back(p);
  }
  // odd_k was appended before even_k within each branch; eigenvalues decrease
  // with frequency, so restore descending order.
  std::sort(pairs.begin(), pairs.end(),
            [](const Eigenpair1D& x, const Eigenpair1D& y) { return x.lambda > y.lambda; });
  pairs.resize(count);
  return pairs;
}

KLExpansion::KLExpansion(MeanField mean, double kappa, std::vector<Eigenpair1D> axis1,
                         std::vector<Eigenpair1D> axis2, int count, double domain_area)
    : mean_(std::move(mean)), kappa_(kappa), axis1_(std::move(axis1)), axis2_(std::move(axis2)) {
  const int m1 = static_cast<int>(axis1_.size());
  const int m2 = static_cast<int>(axis2_.size());
  if (m1 < count || m2 < count)
    throw std::runtime_error("KLExpansion: 1D eigenpair pool too small for requested count");
  std::vector<Mode> table;
  table.reserve(static_cast<size_t>(m1) * m2);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) table.push_back({axis1_[i].lambda * axis2_[j].lambda, i, j});
  std::sort(table.begin(), table.end(), [](const Mode& x, const Mode& y) {
    if (x.lambda != y.lambda) return x.lambda > y.lambda;
    return std::pair(x.i, x.j) < std::pair(y.i, y.j);
  });
  table.resize(count);
  modes_ = std::move(table);
  double sum = 0.0;
  for (const Mode& m : modes_) sum += m.lambda;
  captured_ratio_ = sum / domain_area;
}

double KLExpansion::phi(int k, const Eigen::Vector2d& x) const {
  const Mode& m = modes_[k];
  return axis1_[m.i].eval(x.x()) * axis2_[m.j].eval(x.y());
}

double KLExpansion::evaluate(const Eigen::Vector2d& x, std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != size())
    throw std::invalid_argument("KLExpansion::evaluate: realization length mismatch");
  double value = mean_(x);
  for (int k = 0; k < size(); ++k)
    value += kappa_ * std::sqrt(modes_[k].lambda) * phi(k, x) * xi[k];
  return value;
}

KLExpansion assemble_2d_eigenpairs(const CovarianceSpec& spec, int count,
                                   KLExpansion::MeanField mean) {
  if (count < 0) throw std::invalid_argument("assemble_2d_eigenpairs: count must be >= 0");
  if (spec.kappa < 0.0) throw std::invalid_argument("assemble_2d_eigenpairs: kappa must be >= 0");
  const int pool = std::max(count, 1) + 8;
  auto a1 = solve_1d_eigenpairs(spec.ell1, spec.x_lo, spec.x_hi, pool);
  auto a2 = solve_1d_eigenpairs(spec.ell2, spec.y_lo, spec.y_hi, pool);
  const double area = (spec.x_hi - spec.x_lo) * (spec.y_hi - spec.y_lo);
  return KLExpansion(std::move(mean), spec.kappa, std::move(a1), std::move(a2),
                     count, area);
}

int select_truncation(const CovarianceSpec& spec, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("select_truncation: ratio must lie in (0,1)");
  const int m = 1000;
  auto a1 = solve_1d_eigenpairs(spec.ell1, spec.x_lo, spec.x_hi, m);
  auto a2 = solve_1d_eigenpairs(spec.ell2, spec.y_lo, spec.y_hi, m);
  std::vector<double> products;
  products.reserve(static_cast<size_t>(m) * m);
  for (const auto& p : a1)
    for (const auto& q : a2) products.push_back(p.lambda * q.lambda);
  std::partial_sort(products.begin(), products.begin() + m, products.end(),
                    std::greater<double>());
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += products[i];
  double cumulative = 0.0;
  for (int n = 1; n <= m; ++n) {
    cumulative += products[n - 1];
    if (cumulative > ratio * total) return n;
  }
  return m;
}

}  // namespace sdg
