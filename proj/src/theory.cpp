#include "rsir/theory.hpp"

#include <cmath>
#include <string>

#include "rsir/error.hpp"

namespace rsir::theory {

namespace {

[[noreturn]] void domain(const std::string& what) { throw Error(ErrorKind::Domain, what); }

}  // namespace

void validate(const ErrorDynamicsParams& p) {
  if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) domain("lambda must lie in [0, 1]");
  if (!(p.rho > 0.0 && p.rho < 1.0)) domain("rho must lie in (0, 1)");
  if (!(p.p_tilde >= 0.0 && p.p_tilde <= 1.0)) domain("p_tilde must lie in [0, 1]");
  if (!(p.e0 >= 0.0)) domain("e0 must be >= 0");
  if (!(p.e_max >= p.e0)) domain("e_max must be >= e0");
}

double step(const ErrorDynamicsParams& p, double e_k) {
  validate(p);
  if (!(e_k >= 0.0)) domain("error must be >= 0");
  return (1.0 - p.lambda) * p.e0 + p.lambda * ((1.0 - p.p_tilde) * p.rho * e_k + p.p_tilde * p.e_max);
}

const char* trend_name(Trend trend) {
  switch (trend) {
    case Trend::Decreasing: return "decreasing";
    case Trend::Increasing: return "increasing";
    case Trend::Plateau: return "plateau";
    case Trend::Mixed: return "mixed";
  }
  return "mixed";
}

Simulation simulate(const ErrorDynamicsParams& p, double e_start, int steps) {
  if (steps < 1) domain("simulate needs at least one step");
  Simulation out;
  out.series.reserve(static_cast<std::size_t>(steps) + 1);
  out.series.push_back(e_start);
  for (int k = 0; k < steps; ++k) out.series.push_back(step(p, out.series.back()));

  bool up = false;
  bool down = false;
  for (std::size_t k = 1; k < out.series.size(); ++k) {
    const double delta = out.series[k] - out.series[k - 1];
    const double scale = 1e-12 * std::max(1.0, std::abs(out.series[k - 1]));
    if (delta > scale) up = true;
    if (delta < -scale) down = true;
  }
  out.trend = up && down ? Trend::Mixed : up ? Trend::Increasing : down ? Trend::Decreasing : Trend::Plateau;
  return out;
}

double fixed_point(const ErrorDynamicsParams& p) {
  if (p.p_tilde != 0.0) domain("fixed_point is defined for zero leakage; use limit()");
  if (p.lambda * p.rho >= 1.0) domain("lambda * rho must be < 1");
  validate(p);
  return (1.0 - p.lambda) * p.e0 / (1.0 - p.lambda * p.rho);
}

double limit(const ErrorDynamicsParams& p) {
  validate(p);
  return ((1.0 - p.lambda) * p.e0 + p.lambda * p.p_tilde * p.e_max) / (1.0 - p.lambda * (1.0 - p.p_tilde) * p.rho);
}

double breakdown_threshold(const ErrorDynamicsParams& p, double e_k) {
  if (!(p.lambda > 0.0)) domain("breakdown threshold needs lambda > 0");
  const double denom = p.lambda * (p.e_max - p.rho * e_k);
  if (!(denom > 0.0)) domain("breakdown threshold needs E_max > rho * e_k");
  return (e_k * (1.0 - p.lambda * p.rho) - (1.0 - p.lambda) * p.e0) / denom;
}

}  // namespace rsir::theory
