#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace dpc {

struct ScalarMinimum {
  double argument;
  double value;
  int iterations;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi], stopping once the
/// bracket is narrower than tol, followed by one parabolic step through the final triple.
template <typename F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-10,
                                      int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  for (; it < max_iterations && (hi - lo) > tol; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  ScalarMinimum best = fc < fd ? ScalarMinimum{c, fc, it} : ScalarMinimum{d, fd, it};

  // Parabolic step through the bracket ends and the best interior point.
  const double x0 = lo, x1 = best.argument, x2 = hi;
  if (x0 < x1 && x1 < x2) {
    const double f0 = f(x0), f1 = best.value, f2 = f(x2);
    const double num = (x1 - x0) * (x1 - x0) * (f1 - f2) - (x1 - x2) * (x1 - x2) * (f1 - f0);
    const double den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
    if (den != 0.0) {
      const double xp = x1 - 0.5 * num / den;
      if (xp > x0 && xp < x2) {
        const double fp = f(xp);
        if (fp < best.value) best = {xp, fp, it};
      }
    }
    if (f0 < best.value) best = {x0, f0, it};
    if (f2 < best.value) best = {x2, f2, it};
  }
  return best;
}

/// Golden-section search preceded by a log-spaced scan of [lo, hi] (lo > 0) that picks the
/// bracket around the best scanned point. Guards against a poor initial bracket when the
/// minimum sits near an end point. An optional seed is included in the scan.
template <typename F>
ScalarMinimum bracketed_minimize(F&& f, double lo, double hi, double tol,
                                 std::size_t scan_points = 96, double seed = -1.0) {
  double best_x = hi;
  double best_f = f(hi);
  double left = lo, right = hi;
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(scan_points - 1));
  double prev = lo;
  double x = lo;
  for (std::size_t i = 0; i < scan_points; ++i) {
    const double fx = f(x);
    const double next = i + 1 < scan_points ? std::min(hi, x * ratio) : hi;
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
      left = prev;
      right = next;
    }
    prev = x;
    x = next;
  }
  if (best_x == hi) left = hi / ratio;
  if (seed > lo && seed < hi) {
    const double fs = f(seed);
    if (fs < best_f) {
      best_f = fs;
      best_x = seed;
      left = std::max(lo, seed / ratio);
      right = std::min(hi, seed * ratio);
    }
  }
  auto refined = golden_section_minimize(f, left, right, tol);
  if (best_f < refined.value) refined = {best_x, best_f, refined.iterations};
  return refined;
}

}  // namespace dpc
