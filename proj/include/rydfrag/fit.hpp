#pragma once

#include <gsl/gsl_fit.h>

#include <cmath>
#include <span>
#include <vector>

#include "rydfrag/errors.hpp"

namespace rydfrag {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

// Least-squares y = intercept + slope·x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear_fit: need >= 2 paired samples");
  LinearFit f;
  double c00, c01, c11, sumsq;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &f.intercept, &f.slope, &c00, &c01, &c11, &sumsq);
  double my = 0.0;
  for (double v : y) my += v;
  my /= static_cast<double>(y.size());
  double tot = 0.0;
  for (double v : y) tot += (v - my) * (v - my);
  f.r2 = tot > 0.0 ? 1.0 - sumsq / tot : 1.0;
  return f;
}

// y ≈ prefactor · base^x, fitted on ln y.
struct ExponentialFit {
  double prefactor = 0.0;
  double base = 0.0;
  double r2 = 0.0;
};

inline ExponentialFit exponential_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> ly;
  ly.reserve(y.size());
  for (double v : y) {
    if (!(v > 0.0)) throw InvalidArgument("exponential_fit: y must be positive");
    ly.push_back(std::log(v));
  }
  const LinearFit f = linear_fit(x, ly);
  return {std::exp(f.intercept), std::exp(f.slope), f.r2};
}

}  // namespace rydfrag
