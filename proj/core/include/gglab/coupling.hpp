#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gglab/error.hpp"
#include "gglab/gibbs.hpp"

namespace gglab {

struct CouplingPoint {
  double t;
  double dr;        // weighted gradient distance D_r
  double dist_sq;   // plain squared height distance over the free sites
  double energy1;
  double energy2;
};

struct CouplingOptions {
  std::size_t cadence = 0;  // steps between records; 0: default_cadence
  bool noise = true;
  double guard = kDefaultDivergenceGuard;
};

// Two replicas on one model driven by the same Gaussian increments.
struct CoupledState {
  HeightField a;
  HeightField b;
  double t = 0.0;
};

struct CouplingSeries {
  std::vector<CouplingPoint> points;
  double h = 0.0;
  double r = 0.0;
  std::size_t cadence = 0;
  std::optional<CoupledState> final_state;
};

CouplingSeries coupled_run(const GibbsModel& m, HeightField phi0, HeightField phibar0, double T, double h, double r,
                           std::uint64_t seed, const CouplingOptions& opts = {});

class NonDecayError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct ContractionFit {
  double rate = 0.0;          // -slope of log D_r against t; +inf when D_r is identically 0
  double residual_rms = 0.0;
  std::size_t points_used = 0;
  bool exact_zero = false;
};

// Least squares on the last half of the samples with D_r above
// 1e2 * eps * max D_r. Throws NonDecayError for a non-negative slope.
ContractionFit contraction_rate(const CouplingSeries& series);

}  // namespace gglab
