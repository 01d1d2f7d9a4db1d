#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bpl/fft.hpp"
#include "bpl/grid.hpp"
#include "bpl/rng.hpp"

using namespace bpl;

namespace {

GridFunction random_function(const GridSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    GridFunction f = GridFunction::zeros(spec);
    for (auto& v : f.values) v = rng.normal();
    return f;
}

}  // namespace

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(make_grid_spec(3, 64, 1.0), Error);
    CHECK_THROWS_AS(make_grid_spec(1, 48, 1.0), Error);   // not a power of two
    CHECK_THROWS_AS(make_grid_spec(1, 8, 1.0), Error);    // too small
    CHECK_THROWS_AS(make_grid_spec(1, 64, -1.0), Error);
    GridSpec s = make_grid_spec(2, 64, 2.0);
    CHECK(s.size() == 64 * 64);
    CHECK(s.step() == doctest::Approx(4.0 / 64));
    CHECK(s.nyquist() == doctest::Approx(M_PI * 64 / 4.0));
}

TEST_CASE("lp norms: zero, constant, gaussian oracle") {
    GridSpec s = make_grid_spec(1, 1024, 1.0);
    GridFunction zero = GridFunction::zeros(s);
    CHECK(lp_norm(zero, 1.0) == 0.0);
    CHECK(lp_norm(zero, kInfOrder) == 0.0);

    GridFunction one = GridFunction::sample(s, [](auto) { return 1.0; });
    CHECK(lp_norm(one, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    // int exp(-2x^2) dx = sqrt(pi/2), so the L2 norm is (pi/2)^{1/4}
    GridSpec wide = make_grid_spec(1, 2048, 8.0);
    GridFunction g = GridFunction::sample(wide, [](std::array<double, 2> p) {
        return std::exp(-p[0] * p[0]);
    });
    CHECK(lp_norm(g, 2.0) == doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-6));

    CHECK_THROWS_AS(lp_norm(one, 0.5), Error);
}

TEST_CASE("lp norm homogeneity and sup bound") {
    GridSpec s = make_grid_spec(1, 256, 4.0);
    GridFunction f = random_function(s, 7);
    for (double r : {1.0, 2.0, 3.5, kInfOrder}) {
        double base = lp_norm(f, r);
        GridFunction g = f;
        for (auto& v : g.values) v *= -2.5;
        CHECK(lp_norm(g, r) == doctest::Approx(2.5 * base).epsilon(1e-12));
    }
    // ||f||_inf >= ||f||_2 / sqrt(vol)
    CHECK(lp_norm(f, kInfOrder) >=
          lp_norm(f, 2.0) / std::sqrt(s.domain_volume()) - 1e-15);
}

TEST_CASE("weight evaluation") {
    double x0[] = {0.0};
    CHECK(weight_eval(std::span<const double>(x0, 1), 3.7) == 1.0);
    double x1[] = {1.0, 0.0};
    CHECK(weight_eval(std::span<const double>(x1, 2), 2.0) == doctest::Approx(2.0));
    double x2[] = {std::sqrt(3.0)};
    CHECK(weight_eval(std::span<const double>(x2, 1), -1.0) == doctest::Approx(0.5));
}

TEST_CASE("weighted l2 distance") {
    GridSpec s = make_grid_spec(1, 4096, 2000.0);
    GridFunction f = GridFunction::sample(s, [](auto) { return 1.0; });
    GridFunction zero = GridFunction::zeros(s);
    CHECK(weighted_l2_distance(f, f, 1.3) == 0.0);

    GridFunction g = random_function(make_grid_spec(1, 256, 4.0), 3);
    GridFunction h = random_function(make_grid_spec(1, 256, 4.0), 4);
    CHECK(weighted_l2_distance(g, h, 0.0) ==
          doctest::Approx(lp_norm(GridFunction::from_values(g.spec, [&] {
                              std::vector<double> d(g.values.size());
                              for (std::size_t i = 0; i < d.size(); ++i)
                                  d[i] = g.values[i] - h.values[i];
                              return d;
                          }()), 2.0)).epsilon(1e-12));

    // int (1+x^2)^{-1} dx = pi over the line
    CHECK(weighted_l2_distance(f, zero, 1.0) ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-3));

    // weight <= 1 for gamma >= 0
    CHECK(weighted_l2_distance(g, h, 0.7) <= weighted_l2_distance(g, h, 0.0) + 1e-15);

    GridFunction other = GridFunction::zeros(make_grid_spec(1, 512, 4.0));
    CHECK_THROWS_AS(weighted_l2_distance(g, other, 0.0), Error);
}

TEST_CASE("fft roundtrip identity") {
    for (int dim : {1, 2}) {
        GridSpec s = make_grid_spec(dim, dim == 1 ? 512 : 64, 3.0);
        GridFunction f = random_function(s, 11);
        Spectrum sp = forward_fft(f);
        double imag = 0.0;
        GridFunction back = inverse_fft_real(s, sp, &imag);
        double err = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            err += (back.values[i] - f.values[i]) * (back.values[i] - f.values[i]);
            norm += f.values[i] * f.values[i];
        }
        CHECK(std::sqrt(err / norm) < 1e-10);
        CHECK(imag < 1e-10 * std::sqrt(norm * s.cell_volume()));
    }
}

TEST_CASE("grid function serialization roundtrip") {
    namespace fs = std::filesystem;
    GridSpec s = make_grid_spec(1, 64, 2.0);
    GridFunction f = random_function(s, 21);
    fs::path dir = fs::temp_directory_path() / "bpl_grid_test";
    fs::create_directories(dir);
    std::string bin = (dir / "f.bgf").string();
    write_grid_binary(f, bin);
    GridFunction g = read_grid_binary(bin);
    CHECK(g.spec == f.spec);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);

    std::string csv = (dir / "f.csv").string();
    write_grid_csv(f, csv);
    CHECK(fs::file_size(csv) > 0);

    GridSpec s2 = make_grid_spec(2, 16, 1.0);
    GridFunction f2 = random_function(s2, 22);
    std::string bin2 = (dir / "f2.bgf").string();
    write_grid_binary(f2, bin2);
    GridFunction g2 = read_grid_binary(bin2);
    CHECK(g2.spec == f2.spec);
    for (std::size_t i = 0; i < f2.values.size(); ++i) CHECK(g2.values[i] == f2.values[i]);
}

TEST_CASE("deterministic rng streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.u64() == b.u64());
    Rng c = a.derive(7), d = b.derive(7);
    for (int i = 0; i < 100; ++i) CHECK(c.normal() == d.normal());
}
