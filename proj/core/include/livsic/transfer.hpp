#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "livsic/inducing.hpp"
#include "livsic/interval_maps.hpp"
#include "livsic/observable.hpp"

namespace livsic {

/// Ulam discretization of the transfer operator on n uniform bins of [0,1].
/// Entry (i,j) is the fraction of bin j carried into bin i, so columns sum to
/// one and the operator acts on bin masses (equivalently bin densities).
struct UlamOperator {
  std::size_t n_bins = 0;
  Eigen::SparseMatrix<double> matrix;
  std::string map_descriptor;

  double bin_width() const noexcept { return 1.0 / static_cast<double>(n_bins); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return matrix * v; }
  Eigen::VectorXd column_sums() const;
};

/// Exact interval preimages of the bin edges through every branch.
UlamOperator ulam_matrix(const PiecewiseMap& map, std::size_t n_bins);

/// Power iteration from the uniform density until the L1 change is <= tol.
/// The result integrates to one (sum * bin width). NumericError after
/// max_iterations.
Eigen::VectorXd invariant_density(const UlamOperator& op, double tol = 1e-12,
                                  std::size_t max_iterations = 100000);

/// Average of fn over every bin of a uniform grid (8-point Gauss-Legendre per bin).
Eigen::VectorXd bin_averages(const RealFn& fn, std::size_t n_bins);

/// ∫ fn dρ for a bin density.
double density_integral(const Eigen::VectorXd& density, const RealFn& fn);

struct InvariantMean {
  double birkhoff = 0.0;  ///< orbit average (dithered pseudo-orbit after burn-in)
  double ulam = 0.0;      ///< quadrature against the Ulam invariant density
  double value = 0.0;     ///< the Ulam value, once both agree
  double tolerance = 0.0;
  std::size_t steps = 0;
  std::size_t burn_in = 0;
  std::size_t n_bins = 0;
};

struct InvariantMeanOptions {
  std::size_t steps = 10000000;
  std::size_t burn_in = 10000;
  std::size_t n_bins = 16384;
  double tolerance = 1e-3;
  std::uint64_t seed = 1;
};

/// ∫ f dm computed two independent ways. NumericError when they differ by
/// more than the tolerance.
InvariantMean invariant_mean(const PiecewiseMap& map, const RealFn& f, const InvariantMeanOptions& options = {});

struct DoeblinFortetOptions {
  std::size_t p_max = 10;
  std::size_t test_functions = 32;
  std::size_t n_bins = 4096;      ///< grid points on the image
  double tail_tolerance = 1e-6;   ///< induced cells are kept until the tail is this short
  std::uint64_t seed = 1;
};

struct DoeblinFortetEstimate {
  double M = 0.0;
  double eta = 0.0;
  double M0 = 0.0;
  std::vector<double> r;       ///< r_p, p = 1..p_max (NaN when not positive)
  std::size_t grid_points = 0;
  std::size_t elements = 0;
  double tail_length = 0.0;
  bool passed = false;         ///< eta < 1 - 1e-3
  std::string note;
};

/// Fits ‖L^p h‖ <= M (η^p ‖h‖ + ‖h‖₁) for the transfer operator L of a
/// uniformly expanding full-branch system, with ‖h‖ = sup + Lipschitz
/// seminorm per element. L is applied pointwise on a grid of the common
/// image with linear interpolation; test functions are random nonnegative
/// piecewise-linear functions per element with ‖h‖ = 1.
/// PreconditionError when the system is not uniformly expanding.
DoeblinFortetEstimate doeblin_fortet_estimate(const PiecewiseMap& map, const DoeblinFortetOptions& options = {});
DoeblinFortetEstimate doeblin_fortet_estimate(const InducedSystem& system,
                                              const DoeblinFortetOptions& options = {});

enum class VarianceMode { ulam, monte_carlo };

struct VarianceParams {
  VarianceMode mode = VarianceMode::ulam;
  std::size_t n_bins = 4096;
  double density_tol = 1e-12;
  std::size_t max_lag = 1000;
  double plateau_tol = 1e-6;
  std::size_t plateau_run = 3;
  std::size_t steps = 10000000;
  std::size_t burn_in = 10000;
  std::size_t batch_length = 1000;
  std::size_t streams = 8;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 1;
};

struct VarianceEstimate {
  double sigma2 = 0.0;
  std::string method;        ///< "green-kubo-ulam" or "batch-means-mc"
  double centering = 0.0;    ///< the mean subtracted from f
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> correlations;  ///< C_0, C_1, ... (ulam)
  std::vector<double> partial_sums;  ///< C_0 + 2 sum_{n<=N} C_n (ulam)
  std::size_t truncation = 0;
  std::size_t batches = 0;
  std::size_t batch_length = 0;
  std::size_t steps = 0;
  std::vector<std::string> flags;  ///< "truncation-unreliable"
};

/// CLT variance of f - ∫ f dm. Ulam mode sums Green–Kubo correlations with a
/// plateau rule (flag and NaN for α >= 1/2 or a missed plateau); Monte-Carlo
/// mode uses batch means over parallel dithered orbits with a bootstrap CI.
VarianceEstimate green_kubo_variance(const PiecewiseMap& map, const Observable& f, const VarianceParams& params = {});

}  // namespace livsic
