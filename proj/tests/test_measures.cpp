#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bpl/measures.hpp"

using namespace bpl;

TEST_CASE("power-tail measure normalization matches the arctan integral") {
    // delta = 1/2 with constant base gives density 1/(pi (1+x^2)); the grid
    // normalizer must reproduce pi within 1e-4
    GridSpec spec = make_grid_spec(1, 262144, 32768.0);
    MeasurePtr m = make_power_tail_measure(spec, 0.5);
    CHECK(std::abs(m->normalizer - M_PI) <= 1e-4);
    CHECK(m->lower_bound_c == 1.0);

    // density * Z equals the raw profile pointwise on the lattice
    for (std::size_t i : {std::size_t(0), spec.size() / 2, spec.size() - 1}) {
        auto p = spec.point(i);
        double raw = std::pow(1.0 + p[0] * p[0], -1.0);
        CHECK(m->density[i] * m->normalizer == doctest::Approx(raw).epsilon(1e-12));
        CHECK(m->density[i] * m->normalizer >=
              m->lower_bound_c * std::pow(1.0 + p[0] * p[0], -1.0) * (1.0 - 1e-12));
    }

    // even density
    GridFunction odd = GridFunction::sample(spec, [](std::array<double, 2> p) {
        return p[0] * std::exp(-p[0] * p[0]);
    });
    CHECK(std::abs(integrate(*m, odd)) < 1e-10);

    CHECK_THROWS_AS(make_power_tail_measure(spec, -0.1), Error);
    // small domain leaves too much tail mass
    CHECK_THROWS_AS(make_power_tail_measure(make_grid_spec(1, 1024, 16.0), 0.5), Error);
}

TEST_CASE("moments and the divergence flag") {
    GridSpec spec = make_grid_spec(1, 262144, 32768.0);
    MeasurePtr m = make_power_tail_measure(spec, 0.5);

    MomentResult total = moment(*m, 0.0);
    CHECK(total.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(total.divergent);

    // gamma < delta converges, gamma >= delta diverges with the domain
    MomentResult small = moment(*m, 0.25);
    CHECK_FALSE(small.divergent);
    MomentResult large = moment(*m, 1.0);
    CHECK(large.divergent);

    // concentrated measure has tiny positive moments
    MeasurePtr narrow = make_uniform_measure(make_grid_spec(1, 1024, 16.0), -0.01, 0.01);
    CHECK(moment(*narrow, 0.5).value < 0.02);
}

TEST_CASE("integrate: total mass, symmetry, smoothed half-line") {
    GridSpec spec = make_grid_spec(1, 262144, 32768.0);
    MeasurePtr m = make_power_tail_measure(spec, 0.5);

    GridFunction one = GridFunction::sample(spec, [](auto) { return 1.0; });
    CHECK(integrate(*m, one) == doctest::Approx(1.0).epsilon(1e-10));

    // smoothed step: (1 + tanh(x/w))/2 integrates to 1/2 by symmetry
    GridFunction step = GridFunction::sample(spec, [](std::array<double, 2> p) {
        return 0.5 * (1.0 + std::tanh(p[0] / 0.25));
    });
    CHECK(integrate(*m, step) == doctest::Approx(0.5).epsilon(1e-3));

    GridFunction wrong = GridFunction::zeros(make_grid_spec(1, 1024, 16.0));
    CHECK_THROWS_AS(integrate(*m, wrong), Error);
}

TEST_CASE("uniform and gaussian measures satisfy their hypotheses") {
    GridSpec spec = make_grid_spec(1, 4096, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -0.5, 0.5);
    GridFunction one = GridFunction::sample(spec, [](auto) { return 1.0; });
    CHECK(integrate(*u, one) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(u->lower_bound_c > 0.0);
    CHECK(u->tail_estimate == 0.0);

    MeasurePtr g = make_gaussian_measure(spec, 1.0);
    CHECK(integrate(*g, one) == doctest::Approx(1.0).epsilon(1e-10));
    // sup of density * <x>^d is finite and modest for the gaussian
    CHECK(g->weight_bound > 0.0);
    CHECK(g->weight_bound < 10.0);
    CHECK(g->tail_estimate < 1e-10);

    CHECK_THROWS_AS(make_uniform_measure(spec, 0.5, -0.5), Error);
    CHECK_THROWS_AS(make_uniform_measure(spec, -20.0, 20.0), Error);
}

TEST_CASE("sampler determinism, median, and KS consistency") {
    GridSpec spec = make_grid_spec(1, 65536, 8192.0);
    MeasurePtr m = make_power_tail_measure(spec, 0.5, BaseProfile::Const, 2e-4);

    auto a = sample_points(*m, 1000, 99);
    auto b = sample_points(*m, 1000, 99);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].flat_index == b[i].flat_index);

    const std::size_t n = 100000;
    auto pts = sample_points(*m, n, 7);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = pts[i].x[0];
    std::sort(xs.begin(), xs.end());
    double median = xs[n / 2];
    CHECK(std::abs(median) <= 0.02);

    // KS distance between the empirical draw and the quadrature CDF, compared
    // at atom boundaries (the lattice distribution is discrete)
    std::vector<double> cdf(m->density.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += m->density[i] * spec.cell_volume();
        cdf[i] = acc;
    }
    std::vector<std::size_t> counts(m->density.size(), 0);
    for (const auto& p : pts) ++counts[p.flat_index];
    double ks = 0.0, emp = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        emp += static_cast<double>(counts[i]) / n;
        ks = std::max(ks, std::abs(emp - cdf[i]));
    }
    CHECK(ks <= 0.01);

    CHECK_THROWS_AS(sample_points(*m, 0, 1), Error);
}

TEST_CASE("d=2 sampler sweeps conditionals") {
    GridSpec spec = make_grid_spec(2, 64, 4.0);
    MeasurePtr g = make_gaussian_measure(spec, 1.0);
    auto pts = sample_points(*g, 20000, 3);
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x[0];
        my += p.x[1];
    }
    mx /= pts.size();
    my /= pts.size();
    CHECK(std::abs(mx) < 0.05);
    CHECK(std::abs(my) < 0.05);
}

TEST_CASE("wobble base stays bounded below") {
    GridSpec spec = make_grid_spec(1, 262144, 32768.0);
    MeasurePtr m = make_power_tail_measure(spec, 0.5, BaseProfile::Wobble, 2e-4);
    CHECK(m->lower_bound_c == doctest::Approx(0.7));
    for (std::size_t i = 0; i < m->density.size(); i += 9973) {
        auto p = spec.point(i);
        double floor = 0.7 * std::pow(1.0 + p[0] * p[0], -1.0);
        CHECK(m->density[i] * m->normalizer >= floor * (1.0 - 1e-12));
    }
}
