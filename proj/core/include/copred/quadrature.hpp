#pragma once

// Adaptive Gauss-Kronrod integration on a finite interval. 7-point Gauss
// embedded in a 15-point Kronrod rule, bisecting until |K - G| meets the
// tolerance allotted to the subinterval.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace copred {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
  bool converged = true;
};

namespace detail {

// Nodes and weights for the positive half axis; node 7 is the center.
// xgk[1], xgk[3], ... are the embedded Gauss abscissae.
inline constexpr double gk15_xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk15_wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15_panel(F& f, double a, double b, double& kronrod, double& gauss) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = gk15_wgk[7] * fc;
  double resg = gk15_wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * gk15_xgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += gk15_wgk[j] * fsum;
    if (j % 2 == 1) resg += gk15_wg[j / 2] * fsum;
  }
  kronrod = resk * half;
  gauss = resg * half;
}

}  // namespace detail

// Integrates f over [a, b]. Subintervals are accepted once the Kronrod/Gauss
// discrepancy is below max(abs_tol, rel_tol * |panel|) scaled by the panel's
// share of the interval. converged flips to false if the depth limit is hit
// while the discrepancy is still too large.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                           double rel_tol = 1e-10, int max_depth = 30) {
  QuadratureResult out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  struct Panel {
    double a, b, tol;
    int depth;
  };
  std::vector<Panel> stack;
  stack.push_back({a, b, abs_tol, 0});

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    double k, g;
    detail::gk15_panel(f, p.a, p.b, k, g);
    out.evaluations += 15;
    const double err = std::fabs(k - g);
    const double goal = std::fmax(p.tol, rel_tol * std::fabs(k));
    const double mid = 0.5 * (p.a + p.b);
    const bool splittable = p.depth < max_depth && mid > p.a && mid < p.b;
    if (err <= goal || !splittable) {
      out.value += k;
      out.error_estimate += err;
      if (err > goal) out.converged = false;
      continue;
    }
    stack.push_back({p.a, mid, 0.5 * p.tol, p.depth + 1});
    stack.push_back({mid, p.b, 0.5 * p.tol, p.depth + 1});
  }
  out.value *= sign;
  return out;
}

}  // namespace copred
