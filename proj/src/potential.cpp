#include "tslab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tslab/error.hpp"

namespace tslab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_range(double lo, double hi) {
  std::ostringstream os;
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

void validate_profile(const Profile& profile) {
  std::visit(overloaded{
                 [](const ConstProfile& p) {
                   if (!std::isfinite(p.value)) raise(ErrorCode::invalid_spec, "const profile is not finite");
                 },
                 [](const PolyProfile& p) {
                   if (p.coefficients.empty()) raise(ErrorCode::invalid_spec, "poly profile has no coefficients");
                   for (double c : p.coefficients)
                     if (!std::isfinite(c)) raise(ErrorCode::invalid_spec, "poly coefficient is not finite");
                 },
                 [](const TableProfile& p) {
                   if (p.x.size() < 2 || p.x.size() != p.v.size())
                     raise(ErrorCode::invalid_spec, "table profile needs matching x/v arrays of length >= 2");
                   for (std::size_t i = 1; i < p.x.size(); ++i)
                     if (!(p.x[i] > p.x[i - 1])) raise(ErrorCode::invalid_spec, "table x must be strictly increasing");
                   for (double v : p.v)
                     if (!std::isfinite(v)) raise(ErrorCode::invalid_spec, "table value is not finite");
                 },
                 [](const CustomProfile& p) {
                   if (!p.fn) raise(ErrorCode::invalid_spec, "custom profile has no function");
                 },
             },
             profile);
}

}  // namespace

double evaluate(const Profile& profile, double x) {
  return std::visit(overloaded{
                        [](const ConstProfile& p) { return p.value; },
                        [x](const PolyProfile& p) {
                          double acc = 0.0;
                          for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it)
                            acc = acc * x + *it;
                          return acc;
                        },
                        [x](const TableProfile& p) {
                          if (x <= p.x.front()) return p.v.front();
                          if (x >= p.x.back()) return p.v.back();
                          const auto it = std::upper_bound(p.x.begin(), p.x.end(), x);
                          const std::size_t i = static_cast<std::size_t>(it - p.x.begin());
                          const double w = (x - p.x[i - 1]) / (p.x[i] - p.x[i - 1]);
                          return (1.0 - w) * p.v[i - 1] + w * p.v[i];
                        },
                        [x](const CustomProfile& p) { return p.fn(x); },
                    },
                    profile);
}

PotentialSpec::PotentialSpec(double period, double amplitude, std::vector<DeltaTerm> deltas,
                             std::vector<SmoothPiece> smooth)
    : period_(period), amplitude_(amplitude), deltas_(std::move(deltas)), smooth_(std::move(smooth)) {
  if (!(period_ > 0.0) || !std::isfinite(period_))
    raise(ErrorCode::invalid_spec, "period must be positive and finite");
  if (!std::isfinite(amplitude_)) raise(ErrorCode::invalid_spec, "amplitude must be finite");

  for (std::size_t i = 0; i < deltas_.size(); ++i) {
    const DeltaTerm& d = deltas_[i];
    if (!(d.offset >= 0.0 && d.offset < period_))
      raise(ErrorCode::invalid_spec, "delta offset must lie in [0, L)");
    if (!std::isfinite(d.strength) || d.strength == 0.0)
      raise(ErrorCode::invalid_spec, "delta strength must be finite and nonzero");
    if (i > 0 && !(d.offset > deltas_[i - 1].offset))
      raise(ErrorCode::invalid_spec, "delta offsets must be strictly increasing");
  }

  std::sort(smooth_.begin(), smooth_.end(),
            [](const SmoothPiece& l, const SmoothPiece& r) { return l.lo < r.lo; });
  for (std::size_t i = 0; i < smooth_.size(); ++i) {
    const SmoothPiece& p = smooth_[i];
    if (!(p.lo < p.hi)) raise(ErrorCode::invalid_spec, "smooth piece needs lo < hi");
    if (p.lo < 0.0 || p.hi > period_)
      raise(ErrorCode::invalid_spec, "smooth piece " + fmt_range(p.lo, p.hi) + " leaves [0, L]");
    if (i > 0 && p.lo < smooth_[i - 1].hi)
      raise(ErrorCode::invalid_spec, "smooth pieces " + fmt_range(smooth_[i - 1].lo, smooth_[i - 1].hi) +
                                         " and " + fmt_range(p.lo, p.hi) + " overlap");
    validate_profile(p.profile);
    for (double x : {p.lo, 0.5 * (p.lo + p.hi), p.hi})
      if (!std::isfinite(p(x))) raise(ErrorCode::invalid_spec, "smooth profile is not finite");
  }
}

PotentialSpec PotentialSpec::free(double period) { return PotentialSpec(period, 1.0, {}, {}); }

bool PotentialSpec::is_free() const noexcept {
  if (amplitude_ == 0.0) return true;
  if (!deltas_.empty()) return false;
  for (const auto& p : smooth_) {
    if (const auto* c = std::get_if<ConstProfile>(&p.profile); !c || c->value != 0.0) return false;
  }
  return true;
}

double PotentialSpec::contrast() const {
  double s = 0.0;
  for (const auto& d : deltas_) s = std::max(s, std::abs(d.strength));
  for (const auto& p : smooth_) {
    constexpr int samples = 16;
    for (int j = 0; j <= samples; ++j) s = std::max(s, std::abs(p(p.lo + (p.hi - p.lo) * j / samples)));
  }
  return std::abs(amplitude_) * s;
}

PotentialSpec PotentialSpec::with_amplitude(double amplitude) const {
  return PotentialSpec(period_, amplitude, deltas_, smooth_);
}

double PotentialSpec::evaluate_smooth(double x) const {
  if (!(x >= 0.0 && x <= period_)) raise(ErrorCode::domain, "position outside [0, L]");
  for (const auto& p : smooth_)
    if (x >= p.lo && x < p.hi) return amplitude_ * p(x);
  for (const auto& p : smooth_)
    if (x == p.hi) return amplitude_ * p(x);
  return 0.0;
}

std::vector<double> PotentialSpec::breakpoints() const {
  std::vector<double> out;
  for (const auto& p : smooth_) {
    if (const auto* t = std::get_if<TableProfile>(&p.profile)) {
      for (double x : t->x)
        if (x > p.lo && x < p.hi) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PotentialSpec make_single_delta_comb(double amplitude, double period) {
  if (amplitude == 0.0) raise(ErrorCode::invalid_spec, "comb amplitude must be nonzero");
  return PotentialSpec(period, amplitude, {{0.0, 1.0}}, {});
}

PotentialSpec make_alternating_delta_comb(double amplitude, double half_period) {
  if (amplitude == 0.0) raise(ErrorCode::invalid_spec, "comb amplitude must be nonzero");
  if (!(half_period > 0.0)) raise(ErrorCode::invalid_spec, "half period must be positive");
  return PotentialSpec(2.0 * half_period, amplitude, {{0.0, 1.0}, {half_period, -1.0}}, {});
}

PotentialSpec make_scaled_smooth(std::vector<SmoothPiece> pieces, double amplitude, double period) {
  return PotentialSpec(period, amplitude, {}, std::move(pieces));
}

TruncatedPotential::TruncatedPotential(PotentialSpec spec, int periods)
    : spec_(std::move(spec)), periods_(periods) {
  if (periods_ < 1) raise(ErrorCode::domain, "truncation needs N >= 1");
}

double TruncatedPotential::evaluate_smooth(double x) const {
  const double L = spec_.period();
  if (x < 0.0 || x > length()) return 0.0;
  double cell = std::floor(x / L);
  if (cell >= periods_) cell = periods_ - 1;
  return spec_.evaluate_smooth(std::clamp(x - cell * L, 0.0, L));
}

std::vector<DeltaTerm> TruncatedPotential::deltas() const {
  std::vector<DeltaTerm> out;
  out.reserve(spec_.deltas().size() * static_cast<std::size_t>(periods_));
  for (int n = 0; n < periods_; ++n)
    for (std::size_t i = 0; i < spec_.deltas().size(); ++i)
      out.push_back({n * spec_.period() + spec_.deltas()[i].offset, spec_.scaled_strength(i)});
  return out;
}

}  // namespace tslab
