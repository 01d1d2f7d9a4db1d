#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "bpl/atlas.hpp"
#include "bpl/entropy.hpp"
#include "bpl/measures.hpp"

namespace bpl {

// covariance of the function-indexed bridge process:
// C_ij = P(f_i f_j) - P(f_i) P(f_j), symmetrized and PSD-clipped
Eigen::MatrixXd covariance_matrix(const FunctionNet& net, const MeasureSpec& m);

// intrinsic semimetric rho(f,g)^2 = C_ii + C_jj - 2 C_ij as a distance matrix
Eigen::MatrixXd rho_semimetric(const FunctionNet& net, const MeasureSpec& m);

struct GaussianSupStats {
    double mean = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
};

enum class GaussianVariant {
    Bridge,         // mean-zero, covariance C
    MeanAugmented,  // adds Z * P f with an independent standard normal Z
};

// Monte Carlo estimate of E sup |process| over the net; deterministic in seed
GaussianSupStats sample_gaussian_sup(const FunctionNet& net, const MeasureSpec& m,
                                     std::size_t reps, std::uint64_t seed,
                                     GaussianVariant variant);

// scale-free minoration functional: max over the grid of eps*sqrt(log N_pack)
// under the rho semimetric
double sudakov_value(const FunctionNet& net, const MeasureSpec& m,
                     std::span<const double> eps_grid);

struct EmpiricalSupStats {
    double median = 0.0;
    double q90 = 0.0;
    double se_median = 0.0;
    double se_q90 = 0.0;
    std::size_t reps = 0;
};

// replication quantiles of sup |n^{-1/2} sum (f(X_i) - P f)| with bootstrap
// standard errors
EmpiricalSupStats empirical_process_sup(const FunctionNet& net, const MeasureSpec& m,
                                        std::size_t n, std::size_t reps, std::uint64_t seed);

// raw per-replication suprema (test and diagnostics hook)
std::vector<double> empirical_sup_replications(const FunctionNet& net, const MeasureSpec& m,
                                               std::size_t n, std::size_t reps,
                                               std::uint64_t seed);

// envelope M_net(x) = max_i |f_i(x) - P f_i| evaluated at probe points drawn
// from the measure
std::vector<double> envelope_values(const FunctionNet& net, const MeasureSpec& m,
                                    std::size_t n_probe, std::uint64_t seed);

// empirical scaled envelope tail: (t, t^2 * P_hat(M_net > t)) at probe points
// drawn from the measure
std::vector<std::pair<double, double>> envelope_tail(const FunctionNet& net,
                                                     const MeasureSpec& m,
                                                     std::span<const double> t_grid,
                                                     std::size_t n_probe, std::uint64_t seed);

}  // namespace bpl
