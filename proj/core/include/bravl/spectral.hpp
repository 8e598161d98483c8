#pragma once

#include "bravl/channel.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bravl {

// Full symmetric eigendecomposition of a channel matrix, with the solution
// quality checked at construction: eigenvalues ascending, eigenvector matrix
// orthonormal to 1e-10, and ||A v - lambda v|| <= 1e-9 ||A|| for every pair.
struct EigenSolution {
  Channel channel;
  MomentumGrid grid;
  PhysicalParams params;
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXd eigenvectors;   // columns, orthonormal
  Eigen::VectorXd residual_norms; // ||A v_k - lambda_k v_k||
  double matrix_norm = 0.0;       // spectral norm of A

  // Node samples of the eigenfunction: phi_i = v_i / sqrt(w_i).
  Eigen::VectorXd eigenfunction(Eigen::Index k) const;
};

EigenSolution eigendecompose(const ChannelMatrix& cm);

// One eigenvalue below the continuum threshold, tracked across the grid
// refinement sequence by its rank among the below-threshold values.
struct BoundState {
  double lambda = 0.0;          // value at the finest grid
  double drift = 0.0;           // relative drift between the two finest grids
  bool stable = false;          // drift < stability tolerance
  std::vector<double> per_grid; // value at each N (NaN where absent)
};

struct BoundStateSet {
  Channel channel;
  PhysicalParams params;
  double sigma = 1.0;
  std::vector<int> n_sequence;
  double threshold = 0.0;   // mc^2
  double lower_bound = 0.0; // (1 - Z/Z_c) mc^2
  double stability_tol = 0.0;
  std::vector<BoundState> states; // below-threshold values at the finest grid
  std::string warning;            // set when Z_c' < Z (extension ambiguity)
};

// A discrete eigenvalue found inside [mc^2, oo). Stability is judged on the
// offset lambda - mc^2: values pinned to the continuum edge have tiny
// absolute drift, so the raw eigenvalue would look spuriously stable.
struct EmbeddedCandidate {
  double lambda = 0.0;
  double offset_drift = 0.0;
  bool stable = false;
};

struct EmbeddedScanReport {
  Channel channel;
  PhysicalParams params;
  double sigma = 1.0;
  std::vector<int> n_sequence;
  double threshold = 0.0; // exclusion edge, embedded_threshold * mc^2
  double stability_tol = 0.0;
  int scanned = 0;                          // candidates >= mc^2 at finest grid
  std::vector<EmbeddedCandidate> stable_candidates;
  int stable_above_threshold = 0;
  bool pass = false; // no stable eigenvalue at or above the exclusion edge
  std::string warning;
};

// Shared driver: assembles and decomposes the channel on every grid of the
// refinement sequence once, then classifies bound states and embedded
// candidates from the same solutions. Matrices and solutions are kept so the
// virial checks can reuse the exact kernels that were diagonalized.
struct ChannelScan {
  std::vector<ChannelMatrix> matrices;  // one per N
  std::vector<EigenSolution> solutions; // one per N
  BoundStateSet bound;
  EmbeddedScanReport embedded;
};

ChannelScan scan_channel(const Channel& ch, const PhysicalParams& params,
                         const std::vector<int>& n_sequence,
                         double sigma = 1.0, double stability_tol = 1e-4,
                         bool allow_supercritical = false);

BoundStateSet bound_states(const Channel& ch, const PhysicalParams& params,
                           const std::vector<int>& n_sequence,
                           double sigma = 1.0, double stability_tol = 1e-4,
                           bool allow_supercritical = false);

EmbeddedScanReport embedded_scan(const Channel& ch,
                                 const PhysicalParams& params,
                                 const std::vector<int>& n_sequence,
                                 double sigma = 1.0,
                                 double stability_tol = 1e-4,
                                 bool allow_supercritical = false);

} // namespace bravl
