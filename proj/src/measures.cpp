#include "bpl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bpl {

namespace {

double base_value(BaseProfile base, double r) {
    switch (base) {
        case BaseProfile::Const: return 1.0;
        case BaseProfile::Wobble: return 1.0 + 0.3 * std::cos(r);
    }
    return 1.0;
}

double base_max(BaseProfile base) { return base == BaseProfile::Wobble ? 1.3 : 1.0; }

double point_norm(const GridSpec& spec, std::size_t flat) {
    auto p = spec.point(flat);
    return spec.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

MeasureSpec finalize(MeasureSpec m, const std::vector<double>& raw) {
    const double cv = m.spec.cell_volume();
    double mass = 0.0;
    for (double v : raw) mass += v;
    mass *= cv;
    if (!(mass > 0.0)) fail(ErrorKind::Degeneracy, "measure has zero mass on the grid");
    m.normalizer = mass;  // density * Z = raw pointwise
    m.density.resize(raw.size());
    double wb = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        m.density[i] = raw[i] / mass;
        double n = point_norm(m.spec, i);
        double w = m.density[i] * std::pow(1.0 + n * n, m.spec.dim / 2.0);
        wb = std::max(wb, w);
    }
    m.weight_bound = wb;
    return m;
}

}  // namespace

MeasurePtr make_uniform_measure(const GridSpec& spec, double a, double b) {
    if (!(a < b)) fail(ErrorKind::Parameter, "uniform support requires a < b");
    if (a < -spec.half_width || b > spec.half_width)
        fail(ErrorKind::Domain, "uniform support must lie inside the grid domain");
    MeasureSpec m;
    m.spec = spec;
    m.kind = MeasureKind::Uniform;
    m.a = a;
    m.b = b;
    m.tail_estimate = 0.0;
    std::vector<double> raw(spec.size(), 0.0);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto p = spec.point(i);
        bool in = p[0] >= a && p[0] <= b &&
                  (spec.dim == 1 || (p[1] >= a && p[1] <= b));
        raw[i] = in ? 1.0 : 0.0;
    }
    MeasureSpec out = finalize(std::move(m), raw);
    // density level on the support (the open set where the lower bound holds)
    for (double v : out.density)
        if (v > 0.0) { out.lower_bound_c = v; break; }
    return std::make_shared<const MeasureSpec>(std::move(out));
}

MeasurePtr make_gaussian_measure(const GridSpec& spec, double sigma) {
    if (!(sigma > 0.0)) fail(ErrorKind::Parameter, "gaussian sigma must be positive");
    MeasureSpec m;
    m.spec = spec;
    m.kind = MeasureKind::Gaussian;
    m.sigma = sigma;
    double axis_tail = std::erfc(spec.half_width / (sigma * std::sqrt(2.0)));
    m.tail_estimate = spec.dim == 1 ? axis_tail : 2.0 * axis_tail;
    std::vector<double> raw(spec.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto p = spec.point(i);
        double n2 = p[0] * p[0] + (spec.dim == 2 ? p[1] * p[1] : 0.0);
        raw[i] = std::exp(-n2 / (2.0 * sigma * sigma));
    }
    return std::make_shared<const MeasureSpec>(finalize(std::move(m), raw));
}

MeasurePtr make_power_tail_measure(const GridSpec& spec, double delta,
                                   BaseProfile base, double tail_tolerance) {
    if (!(delta > 0.0)) fail(ErrorKind::Parameter, "tail exponent delta must be positive");
    MeasureSpec m;
    m.spec = spec;
    m.kind = MeasureKind::PowerTail;
    m.delta = delta;
    m.base = base;
    m.lower_bound_c = base == BaseProfile::Wobble ? 0.7 : 1.0;

    const int d = spec.dim;
    std::vector<double> raw(spec.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double r = point_norm(spec, i);
        raw[i] = base_value(base, r) * std::pow(1.0 + r * r, -(d + 2.0 * delta) / 2.0);
    }
    // mass discarded beyond the grid, relative to the on-grid mass
    const double L = spec.half_width;
    double tail_abs = d == 1
        ? base_max(base) * std::pow(L, -2.0 * delta) / delta
        : base_max(base) * M_PI * std::pow(L, -2.0 * delta) / delta;
    double cv = spec.cell_volume();
    double grid_mass = 0.0;
    for (double v : raw) grid_mass += v;
    grid_mass *= cv;
    m.tail_estimate = tail_abs / (grid_mass + tail_abs);
    if (m.tail_estimate > tail_tolerance)
        fail(ErrorKind::Domain, "grid domain too small: truncated tail mass exceeds tolerance",
             m.tail_estimate);
    return std::make_shared<const MeasureSpec>(finalize(std::move(m), raw));
}

double integrate(const MeasureSpec& m, const GridFunction& f) {
    if (!(f.spec == m.spec)) fail(ErrorKind::Shape, "function and measure grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * m.density[i];
    return s * m.spec.cell_volume();
}

namespace {

double raw_moment(const MeasureSpec& m, double gamma) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.density.size(); ++i) {
        double r = point_norm(m.spec, i);
        s += std::pow(r, 2.0 * gamma) * m.density[i];
    }
    return s * m.spec.cell_volume();
}

MeasurePtr rebuild_doubled(const MeasureSpec& m) {
    GridSpec wide = make_grid_spec(m.spec.dim, m.spec.points_per_axis, 2.0 * m.spec.half_width);
    switch (m.kind) {
        case MeasureKind::Uniform: return make_uniform_measure(wide, m.a, m.b);
        case MeasureKind::Gaussian: return make_gaussian_measure(wide, m.sigma);
        case MeasureKind::PowerTail:
            return make_power_tail_measure(wide, m.delta, m.base, 1.0);
    }
    fail(ErrorKind::Parameter, "unknown measure kind");
}

}  // namespace

MomentResult moment(const MeasureSpec& m, double gamma) {
    MomentResult out;
    out.value = raw_moment(m, gamma);
    MeasurePtr wide = rebuild_doubled(m);
    double wide_value = raw_moment(*wide, gamma);
    out.divergent = out.value > 0.0 && wide_value > 1.1 * out.value;
    return out;
}

std::vector<SamplePoint> sample_points(const MeasureSpec& m, std::size_t n,
                                       std::uint64_t seed) {
    if (n < 1) fail(ErrorKind::Parameter, "sample count must be >= 1");
    Rng rng(seed);
    std::vector<SamplePoint> pts;
    pts.reserve(n);
    const int N = m.spec.points_per_axis;

    if (m.spec.dim == 1) {
        std::vector<double> cdf(m.density.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < cdf.size(); ++i) {
            acc += m.density[i];
            cdf[i] = acc;
        }
        for (std::size_t k = 0; k < n; ++k) {
            double u = rng.uniform01() * acc;
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
            if (idx >= cdf.size()) idx = cdf.size() - 1;
            pts.push_back({idx, m.spec.point(idx)});
        }
        return pts;
    }

    // d = 2: marginal over rows, then conditional within the chosen row
    std::vector<double> row_cdf(N, 0.0);
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        double rs = 0.0;
        for (int j = 0; j < N; ++j) rs += m.density[m.spec.flatten(i, j)];
        acc += rs;
        row_cdf[i] = acc;
    }
    std::vector<double> col_cdf(N);
    for (std::size_t k = 0; k < n; ++k) {
        double u = rng.uniform01() * acc;
        int row = static_cast<int>(std::lower_bound(row_cdf.begin(), row_cdf.end(), u) -
                                   row_cdf.begin());
        if (row >= N) row = N - 1;
        double racc = 0.0;
        for (int j = 0; j < N; ++j) {
            racc += m.density[m.spec.flatten(row, j)];
            col_cdf[j] = racc;
        }
        double v = rng.uniform01() * racc;
        int col = static_cast<int>(std::lower_bound(col_cdf.begin(), col_cdf.end(), v) -
                                   col_cdf.begin());
        if (col >= N) col = N - 1;
        std::size_t idx = m.spec.flatten(row, col);
        pts.push_back({idx, m.spec.point(idx)});
    }
    return pts;
}

void write_points_csv(const std::vector<SamplePoint>& pts, int dim, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(ErrorKind::Io, "cannot open " + path);
    std::fprintf(fp, dim == 1 ? "x0\n" : "x0,x1\n");
    for (const auto& p : pts) {
        if (dim == 1)
            std::fprintf(fp, "%.17g\n", p.x[0]);
        else
            std::fprintf(fp, "%.17g,%.17g\n", p.x[0], p.x[1]);
    }
    std::fclose(fp);
}

std::string measure_kind_token(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::Uniform: return "uniform";
        case MeasureKind::Gaussian: return "gaussian";
        case MeasureKind::PowerTail: return "thm4";
    }
    return "unknown";
}

}  // namespace bpl
