#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "rydfrag/errors.hpp"

namespace rydfrag {

struct FssPoint {
  int length = 0;
  double width = 0.0;  // disorder strength δR/R₀
  double y = 0.0;      // scaled observable, e.g. S/L
};

enum class ScalingForm {
  Standard,  // x = (δR - δR_c) · L^{1/ν}
  Literal,   // x = sign(δR - δR_c) · |δR - δR_c|^{1/ν}, no size factor
};

struct FssOptions {
  double width_c_lo = 0.0, width_c_hi = 0.05;
  double nu_lo = 0.3, nu_hi = 3.0;
  int grid = 41;  // coarse scan per axis before the simplex refinement
  ScalingForm form = ScalingForm::Standard;
  int max_iterations = 2000;
  double simplex_tol = 1e-9;
  std::size_t min_overlaps = 4;
};

struct FssResult {
  double width_c = 0.0;
  double nu = 0.0;
  double cost = 0.0;
  bool converged = false;
  std::size_t overlaps = 0;
  std::vector<std::array<double, 3>> landscape;  // (δR_c, ν, cost) of the coarse scan
};

inline double scaling_variable(double width, int length, double width_c, double nu, ScalingForm form) {
  const double d = width - width_c;
  if (form == ScalingForm::Standard) return d * std::pow(static_cast<double>(length), 1.0 / nu);
  return std::copysign(std::pow(std::abs(d), 1.0 / nu), d);
}

namespace detail {

struct Curve {
  std::vector<double> x, y;
};

inline std::map<int, Curve> scaled_curves(const std::vector<FssPoint>& data, double width_c, double nu,
                                          ScalingForm form) {
  std::map<int, std::vector<std::pair<double, double>>> raw;
  for (const auto& p : data) raw[p.length].emplace_back(scaling_variable(p.width, p.length, width_c, nu, form), p.y);
  std::map<int, Curve> out;
  for (auto& [l, pts] : raw) {
    std::sort(pts.begin(), pts.end());
    Curve c;
    for (auto& [x, y] : pts) {
      c.x.push_back(x);
      c.y.push_back(y);
    }
    out[l] = std::move(c);
  }
  return out;
}

// Mean squared distance of each point from the other sizes' curves, each
// estimated by linear interpolation between its bracketing points.
inline double collapse_cost(const std::vector<FssPoint>& data, double width_c, double nu, ScalingForm form,
                            std::size_t min_overlaps, std::size_t* overlaps = nullptr) {
  if (!(nu > 0.0)) return std::numeric_limits<double>::infinity();
  const auto curves = scaled_curves(data, width_c, nu, form);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [l, c] : curves)
    for (std::size_t k = 0; k < c.x.size(); ++k)
      for (const auto& [l2, c2] : curves) {
        if (l2 == l || c2.x.size() < 2) continue;
        const double x = c.x[k];
        auto it = std::upper_bound(c2.x.begin(), c2.x.end(), x);
        if (it == c2.x.begin() || it == c2.x.end()) continue;
        const std::size_t hi = static_cast<std::size_t>(it - c2.x.begin()), lo = hi - 1;
        const double t = (x - c2.x[lo]) / (c2.x[hi] - c2.x[lo]);
        const double y = c2.y[lo] + t * (c2.y[hi] - c2.y[lo]);
        sum += (c.y[k] - y) * (c.y[k] - y);
        ++n;
      }
  if (overlaps) *overlaps = n;
  if (n < min_overlaps) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(n);
}

struct FssObjective {
  const std::vector<FssPoint>* data;
  const FssOptions* opt;
};

inline double gsl_cost(const gsl_vector* v, void* p) {
  const auto* o = static_cast<const FssObjective*>(p);
  const double wc = gsl_vector_get(v, 0), nu = gsl_vector_get(v, 1);
  const double c = collapse_cost(*o->data, wc, nu, o->opt->form, o->opt->min_overlaps);
  return std::isfinite(c) ? c : 1e300;
}

}  // namespace detail

// Fits (δR_c, ν) by a coarse grid scan followed by Nelder-Mead refinement.
inline FssResult fss_collapse(const std::vector<FssPoint>& data, const FssOptions& opt = {}) {
  {
    std::vector<int> sizes;
    for (const auto& p : data) sizes.push_back(p.length);
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    if (sizes.size() < 3) throw InvalidArgument("fss_collapse: need at least 3 system sizes");
  }
  if (opt.grid < 2 || !(opt.nu_lo > 0.0) || !(opt.nu_hi > opt.nu_lo) || !(opt.width_c_hi > opt.width_c_lo))
    throw InvalidArgument("fss_collapse: bad search ranges");
  FssResult r;
  double best = std::numeric_limits<double>::infinity();
  double bw = 0.0, bn = 0.0;
  for (int i = 0; i < opt.grid; ++i)
    for (int j = 0; j < opt.grid; ++j) {
      const double wc = opt.width_c_lo + (opt.width_c_hi - opt.width_c_lo) * i / (opt.grid - 1);
      const double nu = opt.nu_lo + (opt.nu_hi - opt.nu_lo) * j / (opt.grid - 1);
      const double c = detail::collapse_cost(data, wc, nu, opt.form, opt.min_overlaps);
      r.landscape.push_back({wc, nu, c});
      if (c < best) {
        best = c;
        bw = wc;
        bn = nu;
      }
    }
  if (!std::isfinite(best)) throw SolverError("fss_collapse: no parameter pair in the search box overlaps the curves");

  detail::FssObjective obj{&data, &opt};
  gsl_multimin_function f{&detail::gsl_cost, 2, &obj};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, bw);
  gsl_vector_set(x, 1, bn);
  gsl_vector_set(step, 0, (opt.width_c_hi - opt.width_c_lo) / (opt.grid - 1));
  gsl_vector_set(step, 1, (opt.nu_hi - opt.nu_lo) / (opt.grid - 1));
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &f, x, step);
  int status = GSL_CONTINUE;
  for (int it = 0; it < opt.max_iterations && status == GSL_CONTINUE; ++it) {
    if (gsl_multimin_fminimizer_iterate(s)) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.simplex_tol);
  }
  r.converged = status == GSL_SUCCESS;
  r.width_c = gsl_vector_get(s->x, 0);
  r.nu = gsl_vector_get(s->x, 1);
  r.cost = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  if (r.cost > best) {
    r.width_c = bw;
    r.nu = bn;
    r.cost = best;
  }
  detail::collapse_cost(data, r.width_c, r.nu, opt.form, opt.min_overlaps, &r.overlaps);
  return r;
}

}  // namespace rydfrag
