#pragma once

#include <Eigen/Dense>
#include <array>

namespace bravl {

/// Physical constants for a single run. Natural units (m = c = hbar = 1)
/// are the defaults; every formula carries m and c explicitly so SI-style
/// values work too. hbar never enters the momentum-space expressions, it is
/// kept only so configurations can state their unit system in full.
struct PhysicalParams {
  double mass = 1.0;
  double c = 1.0;
  double hbar = 1.0;
  double alpha = 7.2973525693e-3;
  double Z = 1.0;

  /// Throws std::invalid_argument unless mass >= 0, c > 0, hbar > 0,
  /// alpha > 0 and Z >= 0.
  void validate() const;

  double rest_energy() const { return mass * c * c; }
  /// Coupling strength alpha*Z, the only combination the spectra depend on.
  double nu() const { return alpha * Z; }
};

/// Relativistic dispersion e(p) = sqrt(c^2 p^2 + m^2 c^4). p >= 0 required.
double energy(double p, const PhysicalParams& params);

/// Projector normalizer n(p) = sqrt(2 e(p) (e(p) + e(0))).
/// n(0) = 2 m c^2, and n(p) = c p sqrt(2) when m = 0.
double normalizer(double p, const PhysicalParams& params);

/// Kernel coupling gamma = alpha c Z / (2 pi^2), in the momentum-space
/// convention where the full interaction form reads gamma * k[.,.].
double coupling_gamma(const PhysicalParams& params);

/// Critical charge 2 / ((pi/2 + 2/pi) alpha): couplings below this keep the
/// operator bounded below and the channel forms subcritical.
double critical_Z(double alpha);

/// Embedded-eigenvalue critical charge 3 / (4 alpha). Always below
/// critical_Z: Z_c' / Z_c = (3/8)(pi/2 + 2/pi) < 1.
double critical_Z_prime(double alpha);

/// Critical coupling nu_c = alpha * critical_Z(alpha) = 4 pi / (pi^2 + 4);
/// independent of alpha.
double critical_nu();

using PauliContraction = Eigen::Matrix2cd;

/// Pauli contraction p . sigma of a real 3-vector. Hermitian, traceless,
/// determinant -|p|^2, and (p.sigma)^2 = |p|^2 I.
PauliContraction pauli_dot(const std::array<double, 3>& p);

} // namespace bravl
