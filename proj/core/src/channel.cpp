#include "bravl/channel.hpp"

#include "bravl/legendre.hpp"
#include "bravl/parallel.hpp"
#include "bravl/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bravl {

void Channel::validate() const {
  if (l < 0) throw std::invalid_argument("Channel: l must be >= 0");
  if (twice_s != 1 && twice_s != -1)
    throw std::invalid_argument("Channel: s must be +1/2 or -1/2");
  if (l + twice_s < 0)
    throw std::invalid_argument(
        "Channel: l + 2s < 0; channel (0, -1/2) has no spinor");
  if (l > L_MAX || q_order() > L_MAX)
    throw std::invalid_argument("Channel: Legendre order above L_MAX");
}

Channel Channel::parse(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("Channel: expected \"L,S\" with S = +-0.5");
  Channel ch;
  try {
    std::size_t used = 0;
    ch.l = std::stoi(text.substr(0, comma), &used);
    const std::string s_text = text.substr(comma + 1);
    const double s = std::stod(s_text, &used);
    if (used != s_text.size() || (s != 0.5 && s != -0.5))
      throw std::invalid_argument("bad spin");
    ch.twice_s = s > 0 ? 1 : -1;
  } catch (const std::exception&) {
    throw std::invalid_argument("Channel: expected \"L,S\" with S = +-0.5");
  }
  ch.validate();
  return ch;
}

std::string Channel::label() const {
  return "(" + std::to_string(l) + ", " + (twice_s > 0 ? "+1/2" : "-1/2") + ")";
}

void MomentumGrid::validate() const {
  if (nodes.size() < 2)
    throw std::invalid_argument("MomentumGrid: need at least 2 nodes");
  if (nodes.size() != weights.size())
    throw std::invalid_argument("MomentumGrid: node/weight size mismatch");
  double prev = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i]) || !(nodes[i] > prev))
      throw std::invalid_argument(
          "MomentumGrid: nodes must be finite, positive, strictly increasing");
    if (!std::isfinite(weights[i]) || !(weights[i] > 0.0))
      throw std::invalid_argument("MomentumGrid: weights must be positive");
    prev = nodes[i];
  }
  if (!(map.sigma > 0.0) || map.name.empty())
    throw std::invalid_argument("MomentumGrid: bad map descriptor");
}

MomentumGrid::Cell MomentumGrid::cell(std::size_t i) const {
  const std::size_t n = nodes.size();
  if (i >= n) throw std::out_of_range("MomentumGrid::cell: index");
  const double p = nodes[i];
  const double left =
      (i == 0) ? p : 0.5 * (p - nodes[i - 1]); // cell 0 starts at 0
  const double right =
      (i + 1 < n) ? 0.5 * (nodes[i + 1] - p) : left; // last cell capped
  return {p - left, p + right};
}

MomentumGrid build_grid(int n, const MapDescriptor& map) {
  if (n < 8) throw std::invalid_argument("build_grid: N must be >= 8");
  if (map.name != "rational")
    throw std::invalid_argument("build_grid: unknown map \"" + map.name + "\"");
  if (!(map.sigma > 0.0) || !std::isfinite(map.sigma))
    throw std::invalid_argument("build_grid: sigma must be finite and > 0");
  const GaussRule& rule = gauss_legendre(n);
  MomentumGrid grid;
  grid.map = map;
  grid.nodes.resize(n);
  grid.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = rule.x[i];
    grid.nodes[i] = map.sigma * (1.0 + x) / (1.0 - x);
    grid.weights[i] = rule.w[i] * 2.0 * map.sigma / ((1.0 - x) * (1.0 - x));
  }
  grid.validate();
  return grid;
}

namespace {

// Pointwise kernel pieces shared by the public kernels, assembly, and the
// cell averages. The Q shift is always supplied by the caller so the
// near-diagonal path never cancels.
struct KernelContext {
  int l;
  int ord; // l + 2s
  double e0;
  double c2;
};

inline void kernel_pair(const KernelContext& kc, double pa, double ea,
                        double na, double pb, double eb, double nb,
                        double delta, double& k1, double& k2) {
  double q1, q2;
  legendre_q_shifted_pair(kc.l, kc.ord, delta, q1, q2);
  const double inv_nn = 1.0 / (na * nb);
  k1 = (ea + kc.e0) * (eb + kc.e0) * q1 * inv_nn;
  k2 = kc.c2 * pa * pb * q2 * inv_nn;
}

inline double shift_delta(double pa, double pb) {
  const double d = pa - pb;
  return d * d / (2.0 * pa * pb);
}

void check_kernel_args(double p_prime, double p) {
  if (!(p > 0.0) || !(p_prime > 0.0) || !std::isfinite(p) ||
      !std::isfinite(p_prime))
    throw std::invalid_argument("kernel: momenta must be finite and > 0");
  if (p == p_prime)
    throw std::domain_error(
        "kernel: coincident arguments are singular; use diagonal_kernel");
}

} // namespace

double kernel_k1(int l, double p_prime, double p, const PhysicalParams& params) {
  check_kernel_args(p_prime, p);
  params.validate();
  const double e0 = params.rest_energy();
  const double q = legendre_q_shifted(l, shift_delta(p_prime, p));
  return (energy(p_prime, params) + e0) * q * (energy(p, params) + e0) /
         (normalizer(p_prime, params) * normalizer(p, params));
}

double kernel_k2(const Channel& ch, double p_prime, double p,
                 const PhysicalParams& params) {
  ch.validate();
  check_kernel_args(p_prime, p);
  params.validate();
  const double q = legendre_q_shifted(ch.q_order(), shift_delta(p_prime, p));
  return params.c * params.c * p_prime * q * p /
         (normalizer(p_prime, params) * normalizer(p, params));
}

KernelMatrices kernel_full(const std::array<double, 3>& p_prime,
                           const std::array<double, 3>& p,
                           const PhysicalParams& params) {
  params.validate();
  const std::array<double, 3> d{p_prime[0] - p[0], p_prime[1] - p[1],
                                p_prime[2] - p[2]};
  const double dist2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  if (!(dist2 > 0.0))
    throw std::domain_error("kernel_full: coincident vectors are singular");
  const double pp = std::hypot(p_prime[0], p_prime[1], p_prime[2]);
  const double pn = std::hypot(p[0], p[1], p[2]);
  const double np = normalizer(pp, params);
  const double nn = normalizer(pn, params);
  if (!(np > 0.0) || !(nn > 0.0))
    throw std::domain_error("kernel_full: normalizer vanishes (m = 0, p = 0)");
  const double e0 = params.rest_energy();
  const double denom = np * dist2 * nn;
  KernelMatrices km;
  km.part1 = ((energy(pp, params) + e0) * (energy(pn, params) + e0) / denom) *
             Eigen::Matrix2cd::Identity();
  km.part2 =
      (params.c * params.c / denom) * (pauli_dot(p_prime) * pauli_dot(p));
  km.full = km.part1 + km.part2;
  return km;
}

MassBoundCheck mass_difference_bound_check(const std::array<double, 3>& p_prime,
                                           const std::array<double, 3>& p,
                                           const PhysicalParams& params) {
  PhysicalParams massless = params;
  massless.mass = 0.0;
  const KernelMatrices km = kernel_full(p_prime, p, params);
  const KernelMatrices k0 = kernel_full(p_prime, p, massless);
  const Eigen::Matrix2cd diff = km.full - k0.full;
  MassBoundCheck out;
  out.difference_norm = diff.jacobiSvd().singularValues()(0);
  out.part1_norm =
      (km.part1 - k0.part1).jacobiSvd().singularValues()(0);
  out.part2_norm =
      (km.part2 - k0.part2).jacobiSvd().singularValues()(0);
  const std::array<double, 3> dvec{p_prime[0] - p[0], p_prime[1] - p[1],
                                   p_prime[2] - p[2]};
  const double dist2 =
      dvec[0] * dvec[0] + dvec[1] * dvec[1] + dvec[2] * dvec[2];
  const double e0 = params.rest_energy();
  const double ep = energy(std::hypot(p[0], p[1], p[2]), params);
  const double epp = energy(std::hypot(p_prime[0], p_prime[1], p_prime[2]), params);
  out.bound =
      (e0 / (2.0 * ep) + e0 / (2.0 * epp) + e0 * e0 / (4.0 * ep * epp)) / dist2;
  const double slack = 1.0 + 1e-12;
  out.holds = out.difference_norm <= out.bound * slack;
  out.parts_hold = out.part1_norm <= 0.5 * out.bound * slack &&
                   out.part2_norm <= out.bound * slack;
  out.holds_scaled = out.difference_norm <= 1.5 * out.bound * slack;
  return out;
}

namespace {

constexpr int kCellOrder = 12;
constexpr int kCellDepth = 54;

DiagonalAverage cell_average(const KernelContext& kc, std::size_t i,
                             const MomentumGrid& grid,
                             const PhysicalParams& params, int order,
                             int depth) {
  const double p = grid.nodes[i];
  const double ep = energy(p, params);
  const double np = normalizer(p, params);
  const std::size_t n = grid.size();
  const double left =
      (i == 0) ? p : 0.5 * (p - grid.nodes[i - 1]);
  const double right = (i + 1 < n) ? 0.5 * (grid.nodes[i + 1] - p) : left;

  // Integrate in the offset xi = q - p: delta = xi^2/(2 p q) stays exact
  // however deep the panels grade toward the singularity at xi = 0.
  double sum1 = 0.0, sum2 = 0.0;
  const GaussRule& rule = gauss_legendre(order);
  auto accumulate = [&](double a, double b, double sing) {
    auto f1 = [&](double xi) {
      const double q = p + xi;
      double k1, k2;
      kernel_pair(kc, p, ep, np, q, energy(q, params), normalizer(q, params),
                  xi * xi / (2.0 * p * q), k1, k2);
      return k1;
    };
    auto f2 = [&](double xi) {
      const double q = p + xi;
      double k1, k2;
      kernel_pair(kc, p, ep, np, q, energy(q, params), normalizer(q, params),
                  xi * xi / (2.0 * p * q), k1, k2);
      return k2;
    };
    sum1 += integrate_graded_toward(f1, a, b, sing, rule, depth);
    sum2 += integrate_graded_toward(f2, a, b, sing, rule, depth);
  };
  accumulate(-left, 0.0, 0.0);
  accumulate(0.0, right, 0.0);

  DiagonalAverage avg;
  const double inv_w = 1.0 / grid.weights[i];
  avg.k1_avg = sum1 * inv_w;
  avg.k2_avg = sum2 * inv_w;
  avg.cell = {p - left, p + right};
  return avg;
}

KernelContext make_context(const Channel& ch, const PhysicalParams& params) {
  return {ch.l, ch.q_order(), params.rest_energy(), params.c * params.c};
}

} // namespace

DiagonalAverage diagonal_kernel_parts(const Channel& ch, std::size_t i,
                                      const MomentumGrid& grid,
                                      const PhysicalParams& params) {
  ch.validate();
  grid.validate();
  params.validate();
  if (i >= grid.size())
    throw std::out_of_range("diagonal_kernel: node index out of range");
  return cell_average(make_context(ch, params), i, grid, params, kCellOrder,
                      kCellDepth);
}

double diagonal_kernel(const Channel& ch, std::size_t i,
                       const MomentumGrid& grid, const PhysicalParams& params) {
  const DiagonalAverage avg = diagonal_kernel_parts(ch, i, grid, params);
  return avg.k1_avg + avg.k2_avg;
}

ChannelMatrix assemble(const Channel& ch, const MomentumGrid& grid,
                       const PhysicalParams& params) {
  ch.validate();
  grid.validate();
  params.validate();
  const std::size_t n = grid.size();
  const KernelContext kc = make_context(ch, params);

  Eigen::VectorXd e(n), nn(n), sw(n);
  for (std::size_t i = 0; i < n; ++i) {
    e(i) = energy(grid.nodes[i], params);
    nn(i) = normalizer(grid.nodes[i], params);
    sw(i) = std::sqrt(grid.weights[i]);
  }

  ChannelMatrix cm;
  cm.channel = ch;
  cm.grid = grid;
  cm.params = params;
  cm.k1_weighted.resize(n, n);
  cm.k2_weighted.resize(n, n);
  cm.diagonal_info.resize(n);

  auto& k1w = cm.k1_weighted;
  auto& k2w = cm.k2_weighted;
  parallel_for(n, [&](std::size_t i) {
    const double pi_ = grid.nodes[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pj = grid.nodes[j];
      double k1, k2;
      kernel_pair(kc, pi_, e(i), nn(i), pj, e(j), nn(j),
                  shift_delta(pi_, pj), k1, k2);
      const double ww = sw(i) * sw(j);
      k1w(i, j) = k1w(j, i) = ww * k1;
      k2w(i, j) = k2w(j, i) = ww * k2;
    }
    const DiagonalAverage avg =
        cell_average(kc, i, grid, params, kCellOrder, kCellDepth);
    cm.diagonal_info[i] = avg;
    k1w(i, i) = grid.weights[i] * avg.k1_avg;
    k2w(i, i) = grid.weights[i] * avg.k2_avg;
  });

  const double coupling =
      params.alpha * params.c * params.Z / std::numbers::pi;
  cm.matrix = -coupling * (k1w + k2w);
  cm.matrix.diagonal() += e;
  return cm;
}

double relative_bound_ratio(const Channel& ch, const MomentumGrid& grid,
                            const PhysicalParams& params) {
  const ChannelMatrix cm = assemble(ch, grid, params);
  const std::size_t n = grid.size();
  Eigen::VectorXd inv_sqrt_e(n);
  for (std::size_t i = 0; i < n; ++i)
    inv_sqrt_e(i) = 1.0 / std::sqrt(energy(grid.nodes[i], params));
  const double coupling =
      params.alpha * params.c * params.Z / std::numbers::pi;
  const Eigen::MatrixXd m = coupling * inv_sqrt_e.asDiagonal() *
                            (cm.k1_weighted + cm.k2_weighted) *
                            inv_sqrt_e.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

} // namespace bravl
