#include "bravl/spectral.hpp"

#include "bravl/virial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bravl {

Eigen::VectorXd EigenSolution::eigenfunction(Eigen::Index k) const {
  if (k < 0 || k >= eigenvalues.size())
    throw std::out_of_range("EigenSolution::eigenfunction: index");
  Eigen::VectorXd phi = eigenvectors.col(k);
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    phi(i) /= std::sqrt(grid.weights[static_cast<std::size_t>(i)]);
  return phi;
}

EigenSolution eigendecompose(const ChannelMatrix& cm) {
  const Eigen::MatrixXd& a = cm.matrix;
  if (!a.allFinite())
    throw std::invalid_argument("eigendecompose: non-finite matrix entries");
  if (a.rows() != a.cols() || a.rows() == 0)
    throw std::invalid_argument("eigendecompose: matrix must be square");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: solver did not converge");

  EigenSolution sol;
  sol.channel = cm.channel;
  sol.grid = cm.grid;
  sol.params = cm.params;
  sol.eigenvalues = solver.eigenvalues();
  sol.eigenvectors = solver.eigenvectors();
  sol.matrix_norm = sol.eigenvalues.cwiseAbs().maxCoeff();

  const Eigen::Index n = a.rows();
  sol.residual_norms.resize(n);
  const Eigen::MatrixXd av = a * sol.eigenvectors;
  for (Eigen::Index k = 0; k < n; ++k)
    sol.residual_norms(k) =
        (av.col(k) - sol.eigenvalues(k) * sol.eigenvectors.col(k)).norm();

  for (Eigen::Index k = 1; k < n; ++k)
    if (sol.eigenvalues(k) < sol.eigenvalues(k - 1))
      throw std::runtime_error("eigendecompose: eigenvalues not ascending");
  const double ortho = (sol.eigenvectors.transpose() * sol.eigenvectors -
                        Eigen::MatrixXd::Identity(n, n))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-10)
    throw std::runtime_error("eigendecompose: eigenvectors not orthonormal");
  if (sol.residual_norms.maxCoeff() > 1e-9 * sol.matrix_norm)
    throw std::runtime_error("eigendecompose: eigenpair residual too large");
  return sol;
}

namespace {

void check_sequence(const std::vector<int>& n_sequence) {
  if (n_sequence.size() < 3)
    throw std::invalid_argument(
        "refinement sequence too short: need at least 3 grids");
  for (std::size_t i = 0; i + 1 < n_sequence.size(); ++i)
    if (n_sequence[i] >= n_sequence[i + 1])
      throw std::invalid_argument(
          "refinement sequence must be strictly increasing");
}

std::vector<double> below_threshold(const EigenSolution& sol, double e0) {
  std::vector<double> out;
  for (Eigen::Index k = 0; k < sol.eigenvalues.size(); ++k) {
    if (sol.eigenvalues(k) < e0)
      out.push_back(sol.eigenvalues(k));
    else
      break; // ascending
  }
  return out;
}

} // namespace

ChannelScan scan_channel(const Channel& ch, const PhysicalParams& params,
                         const std::vector<int>& n_sequence, double sigma,
                         double stability_tol, bool allow_supercritical) {
  ch.validate();
  params.validate();
  check_sequence(n_sequence);
  if (!(stability_tol > 0.0))
    throw std::invalid_argument("scan_channel: stability_tol must be > 0");

  const double nu = params.nu();
  if (nu >= critical_nu() && !allow_supercritical)
    throw std::invalid_argument(
        "scan_channel: coupling at or above the critical value; the energy "
        "form is unbounded below (pass allow_supercritical to proceed)");

  std::string warning;
  const bool saturating_channel =
      (ch.l == 0 && ch.twice_s == 1) || (ch.l == 1 && ch.twice_s == -1);
  if (saturating_channel && nu > 0.75)
    warning = "coupling above 3/(4 alpha c): the channel admits a family of "
              "self-adjoint extensions; the discretization selects one "
              "implicitly and results are non-authoritative";

  ChannelScan scan;
  scan.matrices.reserve(n_sequence.size());
  scan.solutions.reserve(n_sequence.size());
  for (int n : n_sequence) {
    const MomentumGrid grid = build_grid(n, {"rational", sigma});
    scan.matrices.push_back(assemble(ch, grid, params));
    scan.solutions.push_back(eigendecompose(scan.matrices.back()));
  }

  const double e0 = params.rest_energy();
  const std::size_t last = n_sequence.size() - 1;

  BoundStateSet& bs = scan.bound;
  bs.channel = ch;
  bs.params = params;
  bs.sigma = sigma;
  bs.n_sequence = n_sequence;
  bs.threshold = e0;
  bs.lower_bound = (1.0 - nu / critical_nu()) * e0;
  bs.stability_tol = stability_tol;
  bs.warning = warning;

  std::vector<std::vector<double>> below(n_sequence.size());
  for (std::size_t g = 0; g < n_sequence.size(); ++g)
    below[g] = below_threshold(scan.solutions[g], e0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < below[last].size(); ++k) {
    BoundState state;
    state.lambda = below[last][k];
    state.per_grid.resize(n_sequence.size(), nan);
    for (std::size_t g = 0; g < n_sequence.size(); ++g)
      if (k < below[g].size()) state.per_grid[g] = below[g][k];
    if (k < below[last - 1].size()) {
      const double prev = below[last - 1][k];
      const double scale = std::max(std::abs(state.lambda), 1e-300 * e0);
      state.drift = std::abs(state.lambda - prev) / scale;
      state.stable = state.drift < stability_tol;
    } else {
      state.drift = std::numeric_limits<double>::infinity();
      state.stable = false; // appeared only at the finest grid
    }
    bs.states.push_back(state);
  }

  EmbeddedScanReport& es = scan.embedded;
  es.channel = ch;
  es.params = params;
  es.sigma = sigma;
  es.n_sequence = n_sequence;
  es.threshold = embedded_threshold(ch, nu) * e0;
  es.stability_tol = stability_tol;
  es.warning = warning;

  // Candidates at or above mc^2, matched across the two finest grids by rank.
  auto offsets_at = [&](std::size_t g) {
    std::vector<double> out;
    const Eigen::VectorXd& ev = scan.solutions[g].eigenvalues;
    for (Eigen::Index k = 0; k < ev.size(); ++k)
      if (ev(k) >= e0) out.push_back(ev(k) - e0);
    return out;
  };
  const std::vector<double> fine = offsets_at(last);
  const std::vector<double> prev = offsets_at(last - 1);
  es.scanned = static_cast<int>(fine.size());
  for (std::size_t k = 0; k < fine.size(); ++k) {
    if (k >= prev.size()) break; // coarser grid ran out of candidates
    const double offset = fine[k];
    const double scale = std::max(std::abs(offset), 1e-300 * e0);
    const double drift = std::abs(offset - prev[k]) / scale;
    if (drift < stability_tol) {
      EmbeddedCandidate cand;
      cand.lambda = offset + e0;
      cand.offset_drift = drift;
      cand.stable = true;
      es.stable_candidates.push_back(cand);
      if (cand.lambda >= es.threshold) ++es.stable_above_threshold;
    }
  }
  es.pass = es.stable_above_threshold == 0;
  return scan;
}

BoundStateSet bound_states(const Channel& ch, const PhysicalParams& params,
                           const std::vector<int>& n_sequence, double sigma,
                           double stability_tol, bool allow_supercritical) {
  return scan_channel(ch, params, n_sequence, sigma, stability_tol,
                      allow_supercritical)
      .bound;
}

EmbeddedScanReport embedded_scan(const Channel& ch,
                                 const PhysicalParams& params,
                                 const std::vector<int>& n_sequence,
                                 double sigma, double stability_tol,
                                 bool allow_supercritical) {
  return scan_channel(ch, params, n_sequence, sigma, stability_tol,
                      allow_supercritical)
      .embedded;
}

} // namespace bravl
