#pragma once

#include <vector>

namespace bravl {

/// Gauss-Legendre rule on (-1, 1). Nodes ascending, weights sum to 2.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached Newton-iterated rule, accurate to ~1e-15. n >= 2.
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate_gl(F&& f, double a, double b, const GaussRule& rule) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    s += rule.w[i] * f(m + h * rule.x[i]);
  return s * h;
}

/// Composite rule on [a,b] with panels geometrically graded (ratio 1/2)
/// toward the endpoint `sing` (either a or b). Handles integrable log and
/// power endpoint singularities: nodes never touch `sing`, the innermost
/// panel sits at distance |b-a|*2^-depth. Panels are summed smallest-first
/// in a fixed order, so results are bitwise deterministic.
///
/// Depth caution: nodes are absolute coordinates, so grading depth must not
/// push panel widths below ~1e-13 * |sing| or nodes round onto the singular
/// point. Grading toward 0 is safe at any depth; callers grading toward a
/// nonzero endpoint either cap the depth or recast the integrand in the
/// distance variable and grade toward 0.
template <class F>
double integrate_graded_toward(F&& f, double a, double b, double sing,
                               const GaussRule& rule, int depth) {
  const bool at_a = (sing == a);
  const double len = b - a;
  double scale = 1.0;
  for (int k = 0; k < depth; ++k) scale *= 0.5;

  // stub panel adjacent to the singular endpoint, then doubling panels out
  double s = at_a ? integrate_gl(f, a, a + len * scale, rule)
                  : integrate_gl(f, b - len * scale, b, rule);
  for (int k = 0; k < depth; ++k) {
    const double lo = scale, hi = 2.0 * scale; // hi reaches exactly 1.0 last
    if (at_a)
      s += integrate_gl(f, a + len * lo, a + len * hi, rule);
    else
      s += integrate_gl(f, b - len * hi, b - len * lo, rule);
    scale = hi;
  }
  return s;
}

/// Graded panels with independent depths per endpoint (0 = endpoint not
/// singular); splits at the midpoint when both ends are graded. With
/// neither graded this is a plain composite 4-panel rule.
template <class F>
double integrate_graded(F&& f, double a, double b, const GaussRule& rule,
                        int depth_a, int depth_b) {
  if (depth_a > 0 && depth_b > 0) {
    const double m = 0.5 * (a + b);
    return integrate_graded_toward(f, a, m, a, rule, depth_a) +
           integrate_graded_toward(f, m, b, b, rule, depth_b);
  }
  if (depth_a > 0) return integrate_graded_toward(f, a, b, a, rule, depth_a);
  if (depth_b > 0) return integrate_graded_toward(f, a, b, b, rule, depth_b);
  double s = 0.0;
  const double h = (b - a) / 4.0;
  for (int k = 0; k < 4; ++k)
    s += integrate_gl(f, a + k * h, a + (k + 1) * h, rule);
  return s;
}

} // namespace bravl
