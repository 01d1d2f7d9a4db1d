#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bpl/grid.hpp"
#include "bpl/rng.hpp"

namespace bpl {

enum class MeasureKind {
    Uniform,    // constant density on a sub-box
    Gaussian,   // isotropic normal truncated to the grid
    PowerTail,  // base(x) * <x>^{-d-2*delta}, normalized on the grid
};

enum class BaseProfile {
    Const,   // identically 1
    Wobble,  // 1 + 0.3 cos(|x|), bounded below by 0.7
};

// Probability measure on the truncated lattice: evaluable density plus the
// normalizer Z such that density(x) * Z equals the raw profile pointwise.
// The mass the truncation discards is estimated analytically and reported.
struct MeasureSpec {
    GridSpec spec;
    MeasureKind kind = MeasureKind::Uniform;
    double delta = 0.0;                  // PowerTail exponent
    BaseProfile base = BaseProfile::Const;
    double sigma = 1.0;                  // Gaussian scale
    double a = -0.5, b = 0.5;            // Uniform support per axis
    double normalizer = 1.0;             // Z: density = raw/Z
    double tail_estimate = 0.0;          // estimated mass outside the grid
    double lower_bound_c = 0.0;          // c with base >= c (PowerTail), or
                                         // density level on the support (Uniform)
    double weight_bound = 0.0;           // sup over lattice of density * <x>^d
    std::vector<double> density;         // normalized lattice density

    double density_at(std::size_t flat) const { return density[flat]; }
};

using MeasurePtr = std::shared_ptr<const MeasureSpec>;

MeasurePtr make_uniform_measure(const GridSpec& spec, double a, double b);
MeasurePtr make_gaussian_measure(const GridSpec& spec, double sigma);

// density proportional to base(x) * <x>^{-d-2*delta}; tail_tolerance bounds
// the estimated truncated mass (relative), default 1e-4
MeasurePtr make_power_tail_measure(const GridSpec& spec, double delta,
                                   BaseProfile base = BaseProfile::Const,
                                   double tail_tolerance = 1e-4);

// quadrature of f against the density
double integrate(const MeasureSpec& m, const GridFunction& f);

struct MomentResult {
    double value = 0.0;
    bool divergent = false;  // grew >10% when the domain was doubled
};

// integral of |x|^{2 gamma} dP with the domain-doubling divergence heuristic
MomentResult moment(const MeasureSpec& m, double gamma);

struct SamplePoint {
    std::size_t flat_index;
    std::array<double, 2> x;
};

// i.i.d. draws by inverse CDF on the lattice (conditional sweep for d=2);
// deterministic in seed
std::vector<SamplePoint> sample_points(const MeasureSpec& m, std::size_t n,
                                       std::uint64_t seed);

void write_points_csv(const std::vector<SamplePoint>& pts, int dim, const std::string& path);

// JSON-ish descriptor used in configs and report manifests
std::string measure_kind_token(MeasureKind kind);

}  // namespace bpl
