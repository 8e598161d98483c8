#pragma once

#include <string>
#include <vector>

namespace bravl {

/// Hard order cap: forward recurrence loses accuracy near t -> 1+ as l
/// grows; orders above 12 are not needed by any channel in range.
inline constexpr int L_MAX = 12;

/// Legendre function of the second kind Q_l(t) for t > 1.
/// Q_0 = atanh(1/t), Q_1 = t*Q_0 - 1, higher orders by three-term
/// recurrence below t = 1.5 and by the descending series above (the closed
/// forms cancel catastrophically for large t). Strictly positive and
/// strictly decreasing in l.
/// Errors: l outside [0, L_MAX]; t - 1 < 1e-12 (callers must treat the log
/// singularity explicitly, see legendre_q_shifted).
double legendre_q(int l, double t);

/// Q_l(1 + delta) with the shift supplied directly, valid for any delta > 0
/// however small. This is the explicit near-singularity path: kernel code
/// computes delta = (p - p')^2 / (2 p p') without cancellation and never
/// forms t - 1.
double legendre_q_shifted(int l, double delta);

/// Both Q_la(1+delta) and Q_lb(1+delta) from one recurrence pass.
void legendre_q_shifted_pair(int la, int lb, double delta, double& qa,
                             double& qb);

/// Kernel angular profile g_l(u) = Q_l((u + 1/u)/2) for u > 0, u != 1.
/// Symmetric under u -> 1/u; g_0(u) = ln|(u+1)/(u-1)|.
double g_profile(int l, double u);

struct IdentityResult {
  std::string id;
  double computed = 0.0;
  double reference = 0.0;
  double abs_error = 0.0; // |computed - reference|
  int level = 0;
  bool converged = false;      // refinement delta under internal tolerance
  double refinement_delta = 0.0; // |I(level) - I(level-1)|
};

/// Evaluates the g-profile integral constants
///   int_0^inf g1/u du = 2
///   int_0^1  g1 du = pi^2/8 - 1/2,  int_1^inf g1 du = pi^2/8 + 1/2
///   int_0^inf g1/u^2 du = int_0^inf g1 du = pi^2/4   (both, independently)
///   int_0^inf g0 u^{-1/2} du = int_0^inf g0 u^{-3/2} du = 2*pi
/// plus the reflection equalities between the (0,1) and (1,inf) halves of
/// the g0 integrals. Semi-infinite ranges are folded by u -> 1/u; panels
/// are graded toward the singular endpoints. Non-convergence is reported
/// per identity (converged flag), never thrown. level >= 1.
std::vector<IdentityResult> verify_identities(int level = 4);

/// Radial reduction of the 3D convolution integrals
///   int |p-p'|^{-2} |p'|^{-3/2} d3p' = 4 pi^2 p^{-1/2}
///   int |p-p'|^{-2} |p'|^{-5/2} d3p' = 4 pi^2 p^{-3/2}
/// evaluated by quadrature of the g0-weighted radial integrand at each
/// sample p and compared against the closed form.
std::vector<IdentityResult> verify_convolution_identities(
    const std::vector<double>& p_samples = {1.0, 4.0}, int level = 4);

} // namespace bravl
