#pragma once

#include <utility>
#include <vector>

#include "tslab/mat2.hpp"
#include "tslab/potential.hpp"

namespace tslab {

/// Knobs for propagator evaluation. The integrator is an embedded
/// Dormand-Prince 5(4) pair; smoothness-interval ends and delta offsets are
/// always step boundaries.
struct TransferOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double det_tol = 1e-10;
  double overflow_limit = 1e300;
  long max_steps = 5'000'000;
  // Rescale each integrated cell by det^{-1/2} when det is free of cancellation.
  bool project_unimodular = true;
};

/// [[cos wd, sin wd], [-sin wd, cos wd]]: the propagator across a free region.
Mat2 free_propagator(Frequency omega, double length);

/// [[1, 0], [s/w, 1]]: jump of the Prüfer data across s * delta(x).
Mat2 delta_jump(Frequency omega, double strength);

/// Propagator T(x0, x1) of p1' = w p2, p2' = ((q - w^2)/w) p1, where q is the
/// smooth part of the potential. [x0, x1] must not contain a delta in its interior.
Mat2 smooth_propagator(Frequency omega, const PotentialSpec& spec, double x0, double x1,
                       const TransferOptions& opts = {});

/// T(0, L) including every delta of the period, deltas at offset 0 first.
Mat2 monodromy(Frequency omega, const PotentialSpec& spec, const TransferOptions& opts = {});

/// T(x0, x1) for 0 <= x0 <= x1 <= L; deltas at x0 are included, deltas at x1 are not.
Mat2 propagator(Frequency omega, const PotentialSpec& spec, double x0, double x1,
                const TransferOptions& opts = {});

/// Chebyshev polynomials of the second kind, U_{m}(x) and U_{m-1}(x), by the
/// three-term recurrence; U_{-1} = 0, U_0 = 1.
std::pair<cplx, cplx> chebyshev_u_pair(cplx x, int m);
cplx chebyshev_u(cplx x, int m);

/// M^N = U_{N-1}(F) M - U_{N-2}(F) I for unimodular M with half-trace F.
Mat2 monodromy_power(const Mat2& m, cplx half_trace, int periods);

/// M^N through the power identity.
Mat2 transfer_over_slab(Frequency omega, const PotentialSpec& spec, int periods,
                        const TransferOptions& opts = {});

/// Sum of squared moduli of the entries.
double hs_norm_sq(const Mat2& m);

/// Step sequence recorded by an adaptive sweep at a reference frequency and
/// replayed at nearby frequencies, so that finite differences in omega see a
/// smooth function instead of step-selection noise.
class FrozenMonodromy {
 public:
  FrozenMonodromy(const PotentialSpec& spec, Frequency reference, const TransferOptions& opts = {});

  Mat2 operator()(Frequency omega) const;

 private:
  struct Cell {
    double lo, hi;
    std::vector<double> jumps;     // unscaled delta strengths applied at lo
    std::vector<double> nodes;     // empty for a free cell
    int piece = -1;                // index into spec().smooth(), -1 when free
  };
  PotentialSpec spec_;
  TransferOptions opts_;
  std::vector<Cell> cells_;
};

}  // namespace tslab
