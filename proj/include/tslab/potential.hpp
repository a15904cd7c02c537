#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tslab {

/// A point scatterer strength * delta(x - offset) inside one period.
/// The strength is scaled by PotentialSpec::amplitude when evaluated.
struct DeltaTerm {
  double offset = 0.0;
  double strength = 0.0;

  friend bool operator==(const DeltaTerm&, const DeltaTerm&) = default;
};

struct ConstProfile {
  double value = 0.0;
  friend bool operator==(const ConstProfile&, const ConstProfile&) = default;
};

/// v(x) = sum_j coefficients[j] * x^j, x measured from the start of the period.
struct PolyProfile {
  std::vector<double> coefficients;
  friend bool operator==(const PolyProfile&, const PolyProfile&) = default;
};

/// Piecewise-linear interpolation through (x[i], v[i]); x strictly increasing.
struct TableProfile {
  std::vector<double> x;
  std::vector<double> v;
  friend bool operator==(const TableProfile&, const TableProfile&) = default;
};

/// Arbitrary evaluable profile. Not serializable; compared by name only.
struct CustomProfile {
  std::string name;
  std::function<double(double)> fn;
  friend bool operator==(const CustomProfile& l, const CustomProfile& r) { return l.name == r.name; }
};

using Profile = std::variant<ConstProfile, PolyProfile, TableProfile, CustomProfile>;

double evaluate(const Profile& profile, double x);

/// A smoothness interval [lo, hi] carrying an unscaled profile v(x).
struct SmoothPiece {
  double lo = 0.0;
  double hi = 0.0;
  Profile profile;

  double operator()(double x) const { return evaluate(profile, x); }
  friend bool operator==(const SmoothPiece&, const SmoothPiece&) = default;
};

/// One period of q(x) = A * (sum of deltas + smooth pieces), period L.
/// Immutable once built; construction validates every invariant.
class PotentialSpec {
 public:
  PotentialSpec(double period, double amplitude, std::vector<DeltaTerm> deltas,
                std::vector<SmoothPiece> smooth);

  /// q identically zero with the given period.
  static PotentialSpec free(double period);

  double period() const noexcept { return period_; }
  double amplitude() const noexcept { return amplitude_; }
  const std::vector<DeltaTerm>& deltas() const noexcept { return deltas_; }
  const std::vector<SmoothPiece>& smooth() const noexcept { return smooth_; }

  bool is_free() const noexcept;

  /// amplitude * strength of delta i.
  double scaled_strength(std::size_t i) const { return amplitude_ * deltas_.at(i).strength; }

  /// Largest |A * strength| or |A * v| sampled over the pieces; 0 for the free medium.
  double contrast() const;

  /// Same shape with a different amplitude.
  PotentialSpec with_amplitude(double amplitude) const;

  /// A * v(x) for x in [0, L]; zero where no piece covers x.
  double evaluate_smooth(double x) const;

  /// Extra nodes inside the pieces where the profile has kinks (table nodes).
  std::vector<double> breakpoints() const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

 private:
  double period_;
  double amplitude_;
  std::vector<DeltaTerm> deltas_;
  std::vector<SmoothPiece> smooth_;
};

/// A delta comb: one delta of strength A per period at offset 0.
PotentialSpec make_single_delta_comb(double amplitude, double period);

/// Period 2l, +A at offset 0 and -A at offset l.
PotentialSpec make_alternating_delta_comb(double amplitude, double half_period);

/// A * v(x) on the given pieces, no deltas.
PotentialSpec make_scaled_smooth(std::vector<SmoothPiece> pieces, double amplitude, double period);

/// The potential truncated to N periods: q on [0, NL], zero outside.
class TruncatedPotential {
 public:
  TruncatedPotential(PotentialSpec spec, int periods);

  const PotentialSpec& spec() const noexcept { return spec_; }
  int periods() const noexcept { return periods_; }
  double length() const noexcept { return spec_.period() * periods_; }

  /// Smooth part of q_N at any real x.
  double evaluate_smooth(double x) const;

  /// Every delta of q_N as (position, scaled strength), ordered by position.
  std::vector<DeltaTerm> deltas() const;

 private:
  PotentialSpec spec_;
  int periods_;
};

}  // namespace tslab
