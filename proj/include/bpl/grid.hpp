#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bpl/errors.hpp"

namespace bpl {

inline constexpr double kInfOrder = std::numeric_limits<double>::infinity();

// Uniform truncated lattice over [-L, L]^d, d in {1,2}. Points per axis must
// be a power of two (>= 16) so the discrete transform is exact dual.
struct GridSpec {
    int dim = 1;
    int points_per_axis = 16;
    double half_width = 1.0;

    std::size_t size() const {
        std::size_t n = static_cast<std::size_t>(points_per_axis);
        return dim == 1 ? n : n * n;
    }
    double step() const { return 2.0 * half_width / points_per_axis; }
    double cell_volume() const {
        double h = step();
        return dim == 1 ? h : h * h;
    }
    double domain_volume() const {
        double w = 2.0 * half_width;
        return dim == 1 ? w : w * w;
    }
    // largest resolved angular frequency, pi*N/(2L)
    double nyquist() const {
        return M_PI * points_per_axis / (2.0 * half_width);
    }
    double coordinate(int j) const { return -half_width + step() * j; }

    // flat index <-> axis indices (row-major for d=2)
    std::array<int, 2> unflatten(std::size_t flat) const {
        if (dim == 1) return {static_cast<int>(flat), 0};
        int n = points_per_axis;
        return {static_cast<int>(flat) / n, static_cast<int>(flat) % n};
    }
    std::size_t flatten(int i, int j) const {
        return dim == 1 ? static_cast<std::size_t>(i)
                        : static_cast<std::size_t>(i) * points_per_axis + j;
    }
    std::array<double, 2> point(std::size_t flat) const {
        auto ij = unflatten(flat);
        return {coordinate(ij[0]), dim == 2 ? coordinate(ij[1]) : 0.0};
    }

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && points_per_axis == o.points_per_axis &&
               half_width == o.half_width;
    }
};

GridSpec make_grid_spec(int dim, int points_per_axis, double half_width);

struct GridFunction {
    GridSpec spec;
    std::vector<double> values;

    static GridFunction zeros(const GridSpec& spec);
    // samples fn at every lattice point; validates finiteness
    static GridFunction sample(const GridSpec& spec,
                               const std::function<double(std::array<double, 2>)>& fn);
    static GridFunction from_values(const GridSpec& spec, std::vector<double> v);

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

// Frequency lattice conjugate to the spatial one: axis index m maps to the
// signed integer m~ (wrap at N/2) and xi = (pi/L) * m~.
struct FrequencyGrid {
    GridSpec spec;

    explicit FrequencyGrid(const GridSpec& s) : spec(s) {}

    int signed_index(int m) const {
        return m < spec.points_per_axis / 2 ? m : m - spec.points_per_axis;
    }
    double axis_frequency(int m) const {
        return M_PI / spec.half_width * signed_index(m);
    }
    double norm(std::size_t flat) const {
        auto ij = spec.unflatten(flat);
        double a = axis_frequency(ij[0]);
        if (spec.dim == 1) return std::abs(a);
        double b = axis_frequency(ij[1]);
        return std::sqrt(a * a + b * b);
    }
};

// (sum_j |f|^r cellvol)^{1/r}; order = kInfOrder gives max_j |f|.
double lp_norm(const GridFunction& f, double order);

// <x>^gamma = (1+|x|^2)^{gamma/2}
double weight_eval(std::span<const double> x, double gamma);

// pointwise f(x) * <x>^exponent
GridFunction apply_polynomial_weight(const GridFunction& f, double exponent);

// lp_norm((f-g) * <x>^{-gamma}, 2) without temporaries
double weighted_l2_distance(const GridFunction& f, const GridFunction& g, double gamma);

// relative L2 mass outside [-L/2, L/2]^d (wraparound safety diagnostic)
double mass_outside_core(const GridFunction& f);

// serialization: flat CSV and compact binary dump (magic "BGF1")
void write_grid_csv(const GridFunction& f, const std::string& path);
void write_grid_binary(const GridFunction& f, const std::string& path);
GridFunction read_grid_binary(const std::string& path);

}  // namespace bpl
