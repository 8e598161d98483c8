#include "bravl/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bravl {

void PhysicalParams::validate() const {
  if (!(mass >= 0.0) || !std::isfinite(mass))
    throw std::invalid_argument("PhysicalParams: mass must be finite and >= 0");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("PhysicalParams: c must be finite and > 0");
  if (!(hbar > 0.0) || !std::isfinite(hbar))
    throw std::invalid_argument("PhysicalParams: hbar must be finite and > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("PhysicalParams: alpha must be finite and > 0");
  if (!(Z >= 0.0) || !std::isfinite(Z))
    throw std::invalid_argument("PhysicalParams: Z must be finite and >= 0");
}

double energy(double p, const PhysicalParams& params) {
  if (!(p >= 0.0))
    throw std::invalid_argument("energy: p must be >= 0");
  return std::hypot(params.c * p, params.rest_energy());
}

double normalizer(double p, const PhysicalParams& params) {
  const double e = energy(p, params);
  return std::sqrt(2.0 * e * (e + params.rest_energy()));
}

double coupling_gamma(const PhysicalParams& params) {
  return params.alpha * params.c * params.Z /
         (2.0 * std::numbers::pi * std::numbers::pi);
}

double critical_Z(double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("critical_Z: alpha must be > 0");
  constexpr double pi = std::numbers::pi;
  return 2.0 / ((pi / 2.0 + 2.0 / pi) * alpha);
}

double critical_Z_prime(double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("critical_Z_prime: alpha must be > 0");
  return 3.0 / (4.0 * alpha);
}

double critical_nu() {
  constexpr double pi = std::numbers::pi;
  return 4.0 * pi / (pi * pi + 4.0);
}

PauliContraction pauli_dot(const std::array<double, 3>& p) {
  const std::complex<double> I(0.0, 1.0);
  PauliContraction m;
  m << p[2], p[0] - I * p[1],
       p[0] + I * p[1], -p[2];
  return m;
}

} // namespace bravl
