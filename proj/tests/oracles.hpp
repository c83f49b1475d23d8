// Independent reference implementations used only as test oracles. These
// deliberately avoid the library's own code paths: quadrature and special
// functions come from GSL, expectations from brute-force Monte Carlo.
#ifndef PRIVSIM_TESTS_ORACLES_HPP
#define PRIVSIM_TESTS_ORACLES_HPP

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// E1 via GSL.
inline double e1_reference(double x) { return gsl_sf_expint_E1(x); }

// Adaptive quadrature of f over [0, inf) via GSL QAGIU.
inline double integrate_upper(const std::function<double(double)>& f,
                              double eps_abs = 1e-12, double eps_rel = 1e-12) {
  struct Ctx {
    const std::function<double(double)>* f;
  } ctx{&f};
  gsl_function gf;
  gf.function = [](double x, void* p) -> double {
    return (*static_cast<Ctx*>(p)->f)(x);
  };
  gf.params = &ctx;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4096);
  double result = 0.0, abserr = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_integration_qagiu(&gf, 0.0, eps_abs, eps_rel, 4096, ws, &result, &abserr);
  gsl_set_error_handler(old);
  gsl_integration_workspace_free(ws);
  return result;
}

// E[log2(1 + power*h)], h ~ Exp(mean), by adaptive quadrature.
inline double expected_cross_rate_quadrature(double power, double mean) {
  return integrate_upper([power, mean](double h) {
    return std::log2(1.0 + power * h) * std::exp(-h / mean) / mean;
  });
}

// Monte Carlo mean and standard error of f(draw()).
template <typename Draw, typename F>
MeanStderr monte_carlo(Draw&& draw, F&& f, std::size_t n) {
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(draw());
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var =
      (sumsq / static_cast<double>(n) - mean * mean) / static_cast<double>(n);
  return {mean, std::sqrt(var > 0.0 ? var : 0.0)};
}

}  // namespace oracles

#endif  // PRIVSIM_TESTS_ORACLES_HPP
