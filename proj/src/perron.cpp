#include "thermoform/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermoform/error.hpp"

namespace thermoform {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) with a, b possibly -inf.
double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

std::size_t LogMatrix::nonzeros() const {
  std::size_t total = 0;
  for (const auto& r : rows_) total += r.size();
  return total;
}

LogMatrix LogMatrix::transposed() const {
  LogMatrix t(size());
  for (int u = 0; u < size(); ++u)
    for (const auto& e : row(u)) t.add(e.col, u, e.log_weight);
  return t;
}

double log_sum_exp(std::span<const double> values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - top);
  return top + std::log(s);
}

PerronResult perron(const LogMatrix& m, const PerronOptions& options) {
  const int n = m.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "perron: empty matrix");

  PerronResult result;
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  if (options.start.size() == x.size()) {
    bool finite = true;
    for (double v : options.start) finite = finite && std::isfinite(v);
    if (finite) x.assign(options.start.begin(), options.start.end());
  }
  std::vector<double> mx(static_cast<std::size_t>(n));
  std::vector<double> terms;

  double prev_lo = kNegInf, prev_hi = std::numeric_limits<double>::infinity();
  double best_width = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    // mx = log(M x), with per-row log-sum-exp.
    for (int u = 0; u < n; ++u) {
      auto r = m.row(u);
      if (r.empty()) {
        throw Error(ErrorCode::InvalidArgument, "perron: matrix has an empty row (not irreducible)");
      }
      double top = kNegInf;
      for (const auto& e : r) top = std::max(top, e.log_weight + x[static_cast<std::size_t>(e.col)]);
      double s = 0.0;
      for (const auto& e : r) s += std::exp(e.log_weight + x[static_cast<std::size_t>(e.col)] - top);
      mx[static_cast<std::size_t>(u)] = top + std::log(s);
    }

    // Collatz-Wielandt bounds: min_u (Mx)_u/x_u <= rho <= max_u (Mx)_u/x_u.
    double lo = std::numeric_limits<double>::infinity(), hi = kNegInf;
    for (int u = 0; u < n; ++u) {
      const double ratio = mx[static_cast<std::size_t>(u)] - x[static_cast<std::size_t>(u)];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    result.log_lower = lo;
    result.log_upper = hi;
    result.log_root = 0.5 * (lo + hi);
    result.iterations = it;

    const double scale = std::max(1.0, std::abs(result.log_root));
    if (hi - lo <= options.rel_tol * scale) {
      result.log_vector = x;
      return result;
    }
    // Rounding floor: the bracket stops shrinking a little above rel_tol on
    // large matrices. Accept it once it has stalled; callers see the width.
    if (hi - lo < best_width) {
      best_width = hi - lo;
      stalled = 0;
    } else if (++stalled >= 200 && best_width <= 1e3 * options.rel_tol * scale) {
      result.log_vector = x;
      return result;
    }

    // x <- (M + sigma I) x with sigma = current root estimate.
    const double log_sigma = result.log_root;
    double top = kNegInf;
    for (int u = 0; u < n; ++u) {
      auto& xu = x[static_cast<std::size_t>(u)];
      xu = log_add(mx[static_cast<std::size_t>(u)], log_sigma + xu);
      top = std::max(top, xu);
    }
    for (auto& xu : x) xu -= top;

    prev_lo = lo;
    prev_hi = hi;
  }

  std::ostringstream msg;
  msg.precision(17);
  msg << "power iteration did not converge after " << options.max_iterations
      << " iterations; last log-root bounds [" << prev_lo << ", " << prev_hi << "] and ["
      << result.log_lower << ", " << result.log_upper << "]";
  throw Error(ErrorCode::NotConverged, msg.str());
}

PerronResult perron_left(const LogMatrix& m, const PerronOptions& options) {
  return perron(m.transposed(), options);
}

}  // namespace thermoform
