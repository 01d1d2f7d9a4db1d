#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bpl/processes.hpp"

using namespace bpl;

namespace {

GridFunction smooth_indicator(const GridSpec& spec, double lo, double hi, double edge) {
    return GridFunction::sample(spec, [&](std::array<double, 2> p) {
        double up = smooth_step01((p[0] - lo) / edge);
        double dn = smooth_step01((hi - p[0]) / edge);
        return up * dn;
    });
}

FunctionNet net_of(const BesovParams& prm, std::vector<GridFunction> fs) {
    std::vector<double> certs(fs.size(), 0.0);
    return FunctionNet::from_values(prm, std::move(fs), std::move(certs));
}

// one-sample KS statistic against the standard normal CDF
double ks_against_normal(std::vector<double> xs, double sigma) {
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double F = 0.5 * std::erfc(-xs[i] / (sigma * std::sqrt(2.0)));
        ks = std::max(ks, std::max(std::abs(F - i / n), std::abs(F - (i + 1) / n)));
    }
    return ks;
}

}  // namespace

TEST_CASE("covariance: constants, normalized member, disjoint indicators") {
    GridSpec spec = make_grid_spec(1, 4096, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -1.0, 1.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);

    GridFunction c = GridFunction::sample(spec, [](auto) { return 0.7; });
    Eigen::MatrixXd C0 = covariance_matrix(net_of(prm, {c}), *u);
    CHECK(std::abs(C0(0, 0)) < 1e-12);

    // P f = 0, P f^2 = 1 gives a unit diagonal entry
    GridFunction odd = GridFunction::sample(spec, [](std::array<double, 2> p) {
        return std::abs(p[0]) < 1.0 ? p[0] : 0.0;
    });
    GridFunction odd_sq = odd;
    for (auto& t : odd_sq.values) t *= t;
    double v = integrate(*u, odd_sq);
    GridFunction scaled = odd;
    for (auto& t : scaled.values) t /= std::sqrt(v);
    Eigen::MatrixXd C1 = covariance_matrix(net_of(prm, {scaled}), *u);
    CHECK(C1(0, 0) == doctest::Approx(1.0).epsilon(1e-9));

    // smoothed indicators of disjoint intervals: covariance ~ -ab
    GridFunction ia = smooth_indicator(spec, -0.9, -0.4, 0.02);
    GridFunction ib = smooth_indicator(spec, 0.3, 0.8, 0.02);
    double a = integrate(*u, ia), b = integrate(*u, ib);
    Eigen::MatrixXd C2 = covariance_matrix(net_of(prm, {ia, ib}), *u);
    CHECK(C2(0, 1) == doctest::Approx(-a * b).epsilon(1e-6));
}

TEST_CASE("rho semimetric identities and triangle inequality") {
    GridSpec spec = make_grid_spec(1, 2048, 16.0);
    MeasurePtr g = make_gaussian_measure(spec, 1.5);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);

    Rng rng(4);
    std::vector<GridFunction> fs;
    for (int i = 0; i < 6; ++i) {
        GridFunction f = GridFunction::zeros(spec);
        for (auto& t : f.values) t = rng.normal();
        fs.push_back(std::move(f));
    }
    // member differing from fs[0] by a constant
    GridFunction shifted = fs[0];
    for (auto& t : shifted.values) t += 3.0;
    fs.push_back(shifted);

    FunctionNet net = net_of(prm, fs);
    Eigen::MatrixXd rho = rho_semimetric(net, *g);

    CHECK(rho(0, 0) == 0.0);
    CHECK(rho(0, 6) < 1e-6);  // centering kills constants (roundoff-level)

    // identity rho^2 = P(f-g)^2 - (P(f-g))^2 recomputed independently
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 4; ++j) {
            GridFunction diff = net.value_members[i];
            for (std::size_t t = 0; t < diff.values.size(); ++t)
                diff.values[t] -= net.value_members[j].values[t];
            GridFunction diff2 = diff;
            for (auto& t : diff2.values) t *= t;
            double expect = integrate(*g, diff2) - std::pow(integrate(*g, diff), 2);
            CHECK(rho(i, j) * rho(i, j) == doctest::Approx(expect).epsilon(1e-10));
            // rho <= measure-L2 distance
            CHECK(rho(i, j) <= std::sqrt(integrate(*g, diff2)) * (1.0 + 1e-12));
        }

    // symmetry exact, triangle on sampled triples
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) CHECK(rho(i, j) == rho(j, i));
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            for (int k = 0; k < 7; ++k)
                CHECK(rho(i, j) <= rho(i, k) + rho(k, j) + 1e-8);
}

TEST_CASE("gaussian supremum sampler: singleton, constants, covariance check") {
    GridSpec spec = make_grid_spec(1, 4096, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -1.0, 1.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);

    // singleton with P f = 0, P f^2 = sigma^2: E|G| = sigma sqrt(2/pi)
    GridFunction odd = GridFunction::sample(spec, [](std::array<double, 2> p) {
        return std::abs(p[0]) < 1.0 ? p[0] : 0.0;
    });
    FunctionNet single = net_of(prm, {odd});
    Eigen::MatrixXd C = covariance_matrix(single, *u);
    double sigma = std::sqrt(C(0, 0));
    GaussianSupStats st = sample_gaussian_sup(single, *u, 4000, 11, GaussianVariant::Bridge);
    CHECK(std::abs(st.mean - sigma * std::sqrt(2.0 / M_PI)) <= 3.0 * st.se);

    // net of constants: bridge process vanishes
    GridFunction c1 = GridFunction::sample(spec, [](auto) { return 1.0; });
    GridFunction c2 = GridFunction::sample(spec, [](auto) { return -2.0; });
    GaussianSupStats zc = sample_gaussian_sup(net_of(prm, {c1, c2}), *u, 200, 3,
                                              GaussianVariant::Bridge);
    CHECK(zc.mean < 1e-6);

    CHECK_THROWS_AS(sample_gaussian_sup(single, *u, 50, 1, GaussianVariant::Bridge), Error);

    // mean-augmented variant realizes E L(f) L(g) = P(fg): check empirically
    GridFunction ia = smooth_indicator(spec, -0.8, -0.2, 0.05);
    GridFunction ib = smooth_indicator(spec, 0.1, 0.7, 0.05);
    FunctionNet pair = net_of(prm, {ia, ib});
    MemberGeometry geom = member_geometry(pair, [&] {
        std::vector<double> w(spec.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = u->density[i] * spec.cell_volume();
        return w;
    }(), nullptr);

    Eigen::MatrixXd Cp = covariance_matrix(pair, *u);
    Eigen::MatrixXd L = Cp.llt().matrixL();
    Eigen::VectorXd means(2);
    means(0) = integrate(*u, ia);
    means(1) = integrate(*u, ib);
    Rng root(21);
    const int reps = 10000;
    double e00 = 0, e01 = 0, e11 = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng = root.derive(r);
        Eigen::Vector2d z{rng.normal(), rng.normal()};
        Eigen::Vector2d g = L * z + rng.normal() * means;
        e00 += g(0) * g(0);
        e01 += g(0) * g(1);
        e11 += g(1) * g(1);
    }
    e00 /= reps;
    e01 /= reps;
    e11 /= reps;
    // P(f g) for the disjoint pair is ~0; P f^2 = C + mean^2
    CHECK(std::abs(e01 - (Cp(0, 1) + means(0) * means(1))) < 0.02);
    CHECK(std::abs(e00 - (Cp(0, 0) + means(0) * means(0))) < 0.03);
    CHECK(std::abs(e11 - (Cp(1, 1) + means(1) * means(1))) < 0.03);
}

TEST_CASE("gaussian sampler moment check against the covariance") {
    GridSpec spec = make_grid_spec(1, 1024, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -2.0, 2.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);
    Rng rng(13);
    std::vector<GridFunction> fs;
    for (int i = 0; i < 4; ++i) {
        GridFunction f = GridFunction::zeros(spec);
        for (auto& t : f.values) t = 0.5 * rng.normal();
        fs.push_back(std::move(f));
    }
    FunctionNet net = net_of(prm, fs);
    Eigen::MatrixXd C = covariance_matrix(net, *u);
    Eigen::MatrixXd L = C.llt().matrixL();

    const int reps = 10000;
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(4, 4);
    Rng root(77);
    for (int r = 0; r < reps; ++r) {
        Rng rr = root.derive(r);
        Eigen::VectorXd z(4);
        for (int i = 0; i < 4; ++i) z(i) = rr.normal();
        Eigen::VectorXd g = L * z;
        emp += g * g.transpose();
    }
    emp /= reps;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double se = std::sqrt((C(i, i) * C(j, j) + C(i, j) * C(i, j)) / reps);
            CHECK(std::abs(emp(i, j) - C(i, j)) <= 4.0 * se + 1e-12);
        }
}

TEST_CASE("sudakov functional: singleton, equidistant set, nested monotonicity") {
    GridSpec spec = make_grid_spec(1, 1024, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -2.0, 2.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);

    GridFunction f = GridFunction::sample(spec, [](std::array<double, 2> p) {
        return std::abs(p[0]) < 2.0 ? p[0] : 0.0;
    });
    std::vector<double> eps{1.0, 0.5, 0.25, 0.1};
    CHECK(sudakov_value(net_of(prm, {f}), *u, eps) == 0.0);

    // m disjoint equal-mass indicators: rho-distance is constant r across pairs
    // lattice-aligned identical shapes so the masses match exactly
    std::vector<GridFunction> bumps;
    const int m = 6;
    const double h = spec.step();
    for (int i = 0; i < m; ++i)
        bumps.push_back(smooth_indicator(spec, -1.875 + 20 * h * i, -1.625 + 20 * h * i, 2 * h));
    FunctionNet eq = net_of(prm, bumps);
    Eigen::MatrixXd rho = rho_semimetric(eq, *u);
    double r01 = rho(0, 1);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) CHECK(rho(i, j) == doctest::Approx(r01).epsilon(1e-6));
    double just_under = r01 * (1.0 - 1e-6);
    std::vector<double> grid{just_under};
    CHECK(sudakov_value(eq, *u, grid) ==
          doctest::Approx(just_under * std::sqrt(std::log(static_cast<double>(m))))
              .epsilon(1e-9));

    // nested nets: value is monotone under adding members
    std::vector<GridFunction> sub(bumps.begin(), bumps.begin() + 3);
    std::vector<double> wide;
    for (double e = r01 * 1.5; e > r01 * 0.05; e *= 0.8) wide.push_back(e);
    double small_net = sudakov_value(net_of(prm, sub), *u, wide);
    double large_net = sudakov_value(eq, *u, wide);
    CHECK(large_net >= small_net - 1e-12);
}

TEST_CASE("empirical process: constants, single-function variance and CLT") {
    GridSpec spec = make_grid_spec(1, 4096, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -1.0, 1.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);

    GridFunction c = GridFunction::sample(spec, [](auto) { return 2.0; });
    auto zero_sups = empirical_sup_replications(net_of(prm, {c}), *u, 64, 100, 5);
    for (double s : zero_sups) CHECK(s < 1e-12);

    // singleton with P f = 0: replication mean of nu_n(f)^2 approaches P f^2
    GridFunction odd = GridFunction::sample(spec, [](std::array<double, 2> p) {
        return std::abs(p[0]) < 1.0 ? p[0] : 0.0;
    });
    GridFunction odd2 = odd;
    for (auto& t : odd2.values) t *= t;
    double sigma2 = integrate(*u, odd2);
    auto sups = empirical_sup_replications(net_of(prm, {odd}), *u, 512, 600, 9);
    double mean_sq = 0.0;
    for (double s : sups) mean_sq += s * s;
    mean_sq /= sups.size();
    CHECK(std::abs(mean_sq - sigma2) <= 4.0 * sigma2 / std::sqrt(600.0) * 1.6);

    // smoothed half-line indicator: Var nu_n ~ F(1-F)
    GridFunction step = smooth_indicator(spec, 0.0, 4.0, 0.01);
    GridFunction step2 = step;
    for (auto& t : step2.values) t *= t;
    double F = integrate(*u, step);
    double varF = integrate(*u, step2) - F * F;  // ~ F(1-F) for a sharp step
    CHECK(varF == doctest::Approx(F * (1.0 - F)).epsilon(0.02));
    auto ssup = empirical_sup_replications(net_of(prm, {step}), *u, 1024, 500, 13);
    double mv = 0.0;
    for (double s : ssup) mv += s * s;
    mv /= ssup.size();
    CHECK(std::abs(mv - varF) <= 5.0 * varF / std::sqrt(500.0) * 1.6);

    // CLT normality: signed nu_n(f) for fixed f at n = 10^4 vs N(0, rho^2)
    MeasurePtr uu = make_uniform_measure(spec, -1.0, 1.0);
    FunctionNet single = net_of(prm, {odd});
    Eigen::MatrixXd C = covariance_matrix(single, *uu);
    double rho_sigma = std::sqrt(C(0, 0));
    const std::size_t n = 10000, reps = 500;
    std::vector<double> signed_vals(reps);
    Rng root(31);
    double mean_val = integrate(*uu, odd);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rr = root.derive(r);
        auto pts = sample_points(*uu, n, rr.u64());
        double acc = 0.0;
        for (const auto& pt : pts) acc += odd.values[pt.flat_index];
        signed_vals[r] = (acc - n * mean_val) / std::sqrt(static_cast<double>(n));
    }
    double ks = ks_against_normal(signed_vals, rho_sigma);
    // 1% critical value for n = 500 replications
    CHECK(ks <= 1.628 / std::sqrt(static_cast<double>(reps)));

    // quantile summary with bootstrap errors
    EmpiricalSupStats st = empirical_process_sup(net_of(prm, {odd}), *u, 256, 200, 17);
    CHECK(st.median > 0.0);
    CHECK(st.q90 >= st.median);
    CHECK(st.se_median > 0.0);
}

TEST_CASE("empirical sup is monotone under nested nets per sample path") {
    GridSpec spec = make_grid_spec(1, 1024, 8.0);
    MeasurePtr u = make_uniform_measure(spec, -1.0, 1.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);
    Rng rng(3);
    std::vector<GridFunction> fs;
    for (int i = 0; i < 6; ++i) {
        GridFunction f = GridFunction::zeros(spec);
        for (auto& t : f.values) t = rng.normal();
        fs.push_back(f);
    }
    std::vector<GridFunction> sub(fs.begin(), fs.begin() + 3);
    auto sup_small = empirical_sup_replications(net_of(prm, sub), *u, 128, 150, 23);
    auto sup_large = empirical_sup_replications(net_of(prm, fs), *u, 128, 150, 23);
    for (std::size_t r = 0; r < sup_small.size(); ++r)
        CHECK(sup_large[r] >= sup_small[r] - 1e-12);
}

TEST_CASE("envelope tail: bounded net, doubling scale relation") {
    GridSpec spec = make_grid_spec(1, 2048, 16.0);
    MeasurePtr u = make_uniform_measure(spec, -1.0, 1.0);
    BesovParams prm = make_besov_params(1.0, 2.0, 2.0, 1);

    GridFunction b = smooth_indicator(spec, -0.5, 0.5, 0.1);
    FunctionNet net = net_of(prm, {b});
    // beyond the sup of |f - P f| the tail vanishes
    double bound = 0.0;
    double mean = integrate(*u, b);
    for (double v : b.values) bound = std::max(bound, std::abs(v - mean));
    std::vector<double> t{bound * 1.05, bound * 1.2};
    auto tail = envelope_tail(net, *u, t, 2000, 3);
    CHECK(tail[0].second == 0.0);
    CHECK(tail[1].second == 0.0);

    // doubling every member relates the curves by t -> t/2 and a factor 4
    GridFunction b2 = b;
    for (auto& v : b2.values) v *= 2.0;
    FunctionNet dbl = net_of(prm, {b2});
    std::vector<double> tg{0.2, 0.4, 0.8};
    std::vector<double> tg_half{0.1, 0.2, 0.4};
    auto orig = envelope_tail(net, *u, tg_half, 3000, 7);
    auto doubled = envelope_tail(dbl, *u, tg, 3000, 7);
    for (std::size_t i = 0; i < tg.size(); ++i)
        CHECK(doubled[i].second == doctest::Approx(4.0 * orig[i].second).epsilon(1e-12));
}

TEST_CASE("covariance degeneracy guard trips on wrong input") {
    GridSpec spec = make_grid_spec(1, 512, 8.0);
    MeasurePtr u = make_uniform_measure(spec, -1.0, 1.0);
    GridFunction f = GridFunction::zeros(make_grid_spec(1, 256, 8.0));
    FunctionNet net = FunctionNet::from_values(make_besov_params(1.0, 2.0, 2.0, 1), {f}, {0.0});
    CHECK_THROWS_AS(covariance_matrix(net, *u), Error);
}
