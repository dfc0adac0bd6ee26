#ifndef THERMOFORM_PERRON_HPP
#define THERMOFORM_PERRON_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace thermoform {

/// Nonnegative sparse matrix stored row-wise with log-domain weights.
/// Row u lists the columns v with a strictly positive entry exp(log_weight).
class LogMatrix {
 public:
  struct Entry {
    int col;
    double log_weight;
  };

  LogMatrix() = default;
  explicit LogMatrix(int size) : rows_(static_cast<std::size_t>(size)) {}

  int size() const { return static_cast<int>(rows_.size()); }
  void add(int row, int col, double log_weight) {
    rows_[static_cast<std::size_t>(row)].push_back({col, log_weight});
  }
  std::span<const Entry> row(int u) const { return rows_[static_cast<std::size_t>(u)]; }
  std::size_t nonzeros() const;

  LogMatrix transposed() const;

 private:
  std::vector<std::vector<Entry>> rows_;
};

struct PerronOptions {
  double rel_tol = 1e-13;
  int max_iterations = 100000;
  /// Optional log-domain start vector (all-ones when empty or mis-sized).
  std::span<const double> start;
};

/// Perron root and eigenvector of an irreducible nonnegative matrix.
/// log_lower/log_upper are Collatz-Wielandt bounds on log(rho) from the
/// final iterate; they bracket the true value whenever the matrix is
/// irreducible.
struct PerronResult {
  double log_root = 0.0;
  double log_lower = 0.0;
  double log_upper = 0.0;
  std::vector<double> log_vector;  // max entry normalised to 0
  int iterations = 0;
};

/// Right Perron pair (M r = rho r) by shifted power iteration in the log
/// domain. The shift tracks the current root estimate, which keeps the
/// iteration convergent on periodic (imprimitive) matrices. Starts from the
/// all-ones vector unless a start vector is given; results are deterministic. Throws Error(NotConverged)
/// carrying the last two bound pairs.
PerronResult perron(const LogMatrix& m, const PerronOptions& options = {});

/// Left Perron vector via the transpose.
PerronResult perron_left(const LogMatrix& m, const PerronOptions& options = {});

/// log(sum(exp(values))) without overflow; -inf for an empty range.
double log_sum_exp(std::span<const double> values);

}  // namespace thermoform

#endif  // THERMOFORM_PERRON_HPP
