#include "bpl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

#include "bpl/parallel.hpp"

namespace bpl {

GridSpec make_grid_spec(int dim, int points_per_axis, double half_width) {
    if (dim != 1 && dim != 2)
        fail(ErrorKind::Parameter, "grid dimension must be 1 or 2");
    if (points_per_axis < 16 || (points_per_axis & (points_per_axis - 1)) != 0)
        fail(ErrorKind::Parameter, "points per axis must be a power of two >= 16");
    if (!(half_width > 0.0))
        fail(ErrorKind::Parameter, "half width must be positive");
    return GridSpec{dim, points_per_axis, half_width};
}

GridFunction GridFunction::zeros(const GridSpec& spec) {
    return GridFunction{spec, std::vector<double>(spec.size(), 0.0)};
}

GridFunction GridFunction::sample(const GridSpec& spec,
                                  const std::function<double(std::array<double, 2>)>& fn) {
    GridFunction f = zeros(spec);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double v = fn(spec.point(i));
        if (!std::isfinite(v)) fail(ErrorKind::Parameter, "sampled value is not finite");
        f.values[i] = v;
    }
    return f;
}

GridFunction GridFunction::from_values(const GridSpec& spec, std::vector<double> v) {
    if (v.size() != spec.size()) fail(ErrorKind::Shape, "value vector does not match grid size");
    for (double x : v)
        if (!std::isfinite(x)) fail(ErrorKind::Parameter, "grid value is not finite");
    return GridFunction{spec, std::move(v)};
}

double lp_norm(const GridFunction& f, double order) {
    if (std::isnan(order) || order < 1.0)
        fail(ErrorKind::Parameter, "lp order must be >= 1 or infinity");
    if (order == kInfOrder) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double cv = f.spec.cell_volume();
    if (order == 2.0) {
        double s = 0.0;
        for (double v : f.values) s += v * v;
        return std::sqrt(s * cv);
    }
    if (order == 1.0) {
        double s = 0.0;
        for (double v : f.values) s += std::abs(v);
        return s * cv;
    }
    // scale by the max to avoid overflow for large orders
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double v : f.values) s += std::pow(std::abs(v) / m, order);
    return m * std::pow(s * cv, 1.0 / order);
}

double weight_eval(std::span<const double> x, double gamma) {
    double n2 = 0.0;
    for (double c : x) n2 += c * c;
    return std::pow(1.0 + n2, gamma / 2.0);
}

GridFunction apply_polynomial_weight(const GridFunction& f, double exponent) {
    GridFunction g = f;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        auto p = f.spec.point(i);
        double n2 = p[0] * p[0] + (f.spec.dim == 2 ? p[1] * p[1] : 0.0);
        g.values[i] *= std::pow(1.0 + n2, exponent / 2.0);
    }
    return g;
}

double weighted_l2_distance(const GridFunction& f, const GridFunction& g, double gamma) {
    if (!(f.spec == g.spec)) fail(ErrorKind::Shape, "grid specs differ");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        auto p = f.spec.point(i);
        double n2 = p[0] * p[0] + (f.spec.dim == 2 ? p[1] * p[1] : 0.0);
        double d = (f.values[i] - g.values[i]) * std::pow(1.0 + n2, -gamma / 2.0);
        s += d * d;
    }
    return std::sqrt(s * f.spec.cell_volume());
}

double mass_outside_core(const GridFunction& f) {
    const double lim = f.spec.half_width / 2.0;
    double out = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double v2 = f.values[i] * f.values[i];
        tot += v2;
        auto p = f.spec.point(i);
        bool outside = std::abs(p[0]) > lim || (f.spec.dim == 2 && std::abs(p[1]) > lim);
        if (outside) out += v2;
    }
    return tot == 0.0 ? 0.0 : out / tot;
}

void write_grid_csv(const GridFunction& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(ErrorKind::Io, "cannot open " + path);
    std::fprintf(fp, f.spec.dim == 1 ? "index,x0,value\n" : "index,x0,x1,value\n");
    char buf[64];
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        auto p = f.spec.point(i);
        std::snprintf(buf, sizeof(buf), "%.17g", f.values[i]);
        if (f.spec.dim == 1)
            std::fprintf(fp, "%zu,%.17g,%s\n", i, p[0], buf);
        else
            std::fprintf(fp, "%zu,%.17g,%.17g,%s\n", i, p[0], p[1], buf);
    }
    std::fclose(fp);
}

void write_grid_binary(const GridFunction& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open " + path);
    out.write("BGF1", 4);
    std::uint32_t d = static_cast<std::uint32_t>(f.spec.dim);
    std::uint32_t n = static_cast<std::uint32_t>(f.spec.points_per_axis);
    double L = f.spec.half_width;
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&L), 8);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

GridFunction read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "BGF1", 4) != 0)
        fail(ErrorKind::Io, "bad magic in " + path);
    std::uint32_t d = 0, n = 0;
    double L = 0.0;
    in.read(reinterpret_cast<char*>(&d), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&L), 8);
    GridSpec spec = make_grid_spec(static_cast<int>(d), static_cast<int>(n), L);
    std::vector<double> v(spec.size());
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) fail(ErrorKind::Io, "truncated dump " + path);
    return GridFunction::from_values(spec, std::move(v));
}

}  // namespace bpl

namespace bpl {

namespace {
unsigned g_worker_threads = 1;
}

void set_worker_threads(unsigned n) {
    g_worker_threads = n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n;
}

unsigned worker_threads() { return g_worker_threads; }

}  // namespace bpl
