#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "bpl/atlas.hpp"
#include "bpl/measures.hpp"

namespace bpl {

// L2-type pseudometrics: plain, polynomially weighted, measure-induced, and
// restricted to a ball. All reduce to a nonnegative pointwise weight.
struct MetricSpec {
    enum class Kind { PlainL2, WeightedL2, MeasureL2, RestrictedL2 };
    Kind kind = Kind::PlainL2;
    double gamma = 0.0;
    MeasurePtr measure;
    std::array<double, 2> center{0.0, 0.0};
    double radius = 1.0;

    static MetricSpec plain();
    static MetricSpec weighted(double gamma);
    static MetricSpec measure_l2(MeasurePtr m);
    static MetricSpec restricted(std::array<double, 2> center, double radius);
};

// per-lattice-point weight including the cell volume, so that
// dist(f,g)^2 = sum_j w_j (f_j - g_j)^2
std::vector<double> metric_weights(const MetricSpec& metric, const GridSpec& spec);

// Gram matrix of the members under the metric weight, plus integrals against
// an optional density (P f_i). Dictionary nets go through a Cholesky
// embedding of the atom Gram; value/translate nets use direct quadrature.
struct MemberGeometry {
    Eigen::MatrixXd gram;
    Eigen::VectorXd means;  // filled when density weights are supplied
};
MemberGeometry member_geometry(const FunctionNet& net, const std::vector<double>& weights,
                               const std::vector<double>* density_times_cv = nullptr);

Eigen::MatrixXd distance_matrix(const FunctionNet& net, const MetricSpec& metric);

// Greedy covering/packing surrogates on a fixed distance matrix whose row
// order is taken as canonical. Packing scans canonically for a maximal
// separated subset; covering takes the better of a farthest-point traversal
// seeded at the medoid and the packing itself (a maximal separated set also
// covers), so N_pack(2e) <= N_cover(e) <= N_pack(e) holds by construction.
class CoverPackAnalyzer {
public:
    explicit CoverPackAnalyzer(Eigen::MatrixXd dist);

    int cover_count(double eps) const;
    int pack_count(double eps) const;
    std::size_t size() const { return static_cast<std::size_t>(dist_.rows()); }

private:
    Eigen::MatrixXd dist_;
    std::vector<int> rank_;  // farthest-point visit order from the medoid
};

// permutation-invariant member order (by representation, then value content)
std::vector<std::size_t> canonical_order(const FunctionNet& net);

struct CoverPack {
    int n_cover = 0;
    int n_pack = 0;
};
CoverPack covering_packing(const FunctionNet& net, const MetricSpec& metric, double eps);

struct EntropyCurve {
    std::vector<double> eps;
    std::vector<int> n_cover;
    std::vector<int> n_pack;
    double alpha_hat = 0.0;
    double intercept = 0.0;
    double eps_lo = 0.0, eps_hi = 0.0;  // fitted window
    int fit_points = 0;
    double residual = 0.0;              // rms of the log fit
};

// evaluates the greedy counts on a decreasing eps grid and fits
// log N_cover = alpha * log(1/eps) + b over the unsaturated window
// 4 <= N_cover <= |net|/4
EntropyCurve entropy_curve(const FunctionNet& net, const MetricSpec& metric,
                           std::vector<double> eps_grid);

void write_entropy_csv(const EntropyCurve& c, const std::string& path);

// predicted covering exponents for the three experiment regimes
struct EntropyRegime {
    enum class Kind { Weighted, PowerTail, Restricted };
    Kind kind = Kind::Weighted;
    double gamma = 0.0;  // Weighted
    double delta = 0.0;  // PowerTail
    static EntropyRegime weighted(double gamma);
    static EntropyRegime power_tail(double delta);
    static EntropyRegime restricted();
};
double predicted_alpha(const BesovParams& params, const EntropyRegime& regime);

enum class RateDirection {
    EntropyNumbersToMetricEntropy,  // k^{-1/alpha} decay rate -> alpha
    MetricEntropyToEntropyNumbers,
};
// reciprocal conversion between the entropy-number decay rate and the
// metric-entropy exponent
double convert_entropy_rate(double rate, RateDirection direction);

}  // namespace bpl
