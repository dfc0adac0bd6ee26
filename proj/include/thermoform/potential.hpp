#ifndef THERMOFORM_POTENTIAL_HPP
#define THERMOFORM_POTENTIAL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermoform/sft.hpp"

namespace thermoform {

enum class PotentialVariant {
  ExplicitTable,  // values keyed by admissible words of one length
  Coordinate,     // phi(x) = c[x_0]
  DistOrbit,      // phi(x) = -a * min_j d_alpha(x, T^j p)
  DistSunny,      // phi(x) = -d(x, S), S = points with at most one non-zero symbol
  DistSubshift,   // phi(x) = -d(x, S), S = points whose m-blocks all lie in a list
};

const char* variant_name(PotentialVariant v);

struct PotentialSpec {
  PotentialVariant variant = PotentialVariant::Coordinate;
  std::map<std::string, double> table;  // ExplicitTable
  std::vector<double> coordinate;       // Coordinate, one value per symbol
  Word orbit;                           // DistOrbit generating word p
  double scale = 1.0;                   // DistOrbit factor a
  double alpha = 0.5;                   // DistOrbit metric base
  std::vector<Word> blocks;             // DistSubshift allowed m-blocks

  static PotentialSpec explicit_table(std::map<std::string, double> table);
  static PotentialSpec coordinate_values(std::vector<double> values);
  static PotentialSpec dist_orbit(Word p, double a = 1.0, double alpha = 0.5);
  static PotentialSpec dist_sunny();
  static PotentialSpec dist_subshift(std::vector<Word> blocks);

  bool is_distance() const {
    return variant == PotentialVariant::DistOrbit || variant == PotentialVariant::DistSunny ||
           variant == PotentialVariant::DistSubshift;
  }
};

/// Parses the potential spec format (JSON): {"variant": ..., "depth": ...,
/// plus variant parameters}. Returns the spec and the requested depth
/// (0 when absent).
std::pair<PotentialSpec, int> parse_potential_spec(std::string_view text);
std::pair<PotentialSpec, int> load_potential_spec(const std::string& path);

/// A potential depending on k consecutive coordinates, stored as a one-sided
/// table over admissible k-words. Distance potentials are evaluated on the
/// window centred at the origin and shifted so the window starts at
/// coordinate 0; pressure and equilibrium data are unchanged by that shift.
///
/// When the number of admissible k-words exceeds the materialisation budget
/// the table is not stored and value() evaluates the spec directly.
class LocallyConstantPotential {
 public:
  LocallyConstantPotential(Sft sft, PotentialSpec spec, int depth);

  const Sft& sft() const { return sft_; }
  const PotentialSpec& spec() const { return spec_; }
  int depth() const { return depth_; }

  double holder_c() const { return holder_c_; }
  double holder_alpha() const { return holder_alpha_; }
  double truncation_error() const { return truncation_error_; }

  bool materialized() const { return !table_.empty(); }
  /// Value on an admissible window of length depth().
  double value(std::span<const int> window) const;
  /// Dense index of a k-word (base-|A| digits); valid when materialized.
  std::size_t index(std::span<const int> window) const;

  double min_value() const { return min_; }
  double max_value() const { return max_; }

  /// Same potential with every value scaled by s and shifted by c
  /// (explicit-table result; requires a materialized table).
  LocallyConstantPotential affine(double s, double c) const;

 private:
  double evaluate(std::span<const int> window) const;

  Sft sft_;
  PotentialSpec spec_;
  int depth_;
  double holder_c_ = 0.0;
  double holder_alpha_ = 0.5;
  double truncation_error_ = 0.0;
  std::vector<double> table_;  // NaN on inadmissible words
  double min_ = 0.0, max_ = 0.0;
  // DistSubshift: language of S restricted to lengths <= depth.
  std::vector<std::vector<std::uint8_t>> subshift_language_;
};

inline constexpr std::size_t kMaterializeBudget = std::size_t{1} << 20;

LocallyConstantPotential build_potential(const Sft& sft, const PotentialSpec& spec, int depth);

/// Sum of the table over the |w| - k + 1 sliding windows of w.
double birkhoff_sum(const LocallyConstantPotential& pot, std::span<const int> w);

/// inf (or sup) over x in [w] of S_{|w|} phi(x): the |w| windows starting
/// inside w, with the trailing windows optimised over admissible
/// continuations. Requires a materialized table.
double cylinder_birkhoff_inf(const LocallyConstantPotential& pot, std::span<const int> w);
double cylinder_birkhoff_sup(const LocallyConstantPotential& pot, std::span<const int> w);

/// The blocks of a dist-subshift spec that extend to bi-infinite points of S.
std::vector<Word> trimmed_blocks(const std::vector<Word>& blocks);

/// Sup-norm distance between the intended potential and its depth-truncated
/// table: a * alpha^r for dist-orbit, 2^-r for the other distance variants
/// (r = (depth-1)/2), 0 otherwise.
double truncation_bound(const PotentialSpec& spec, int depth);

// Depth used when none is given: the table word length, 1 for coordinates, 9 for distances.
int default_depth(const PotentialSpec& spec);

}  // namespace thermoform

#endif  // THERMOFORM_POTENTIAL_HPP
