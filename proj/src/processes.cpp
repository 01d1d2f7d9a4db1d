#include "bpl/processes.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "bpl/parallel.hpp"
#include "bpl/rng.hpp"

namespace bpl {

namespace {

std::vector<double> density_times_cv(const MeasureSpec& m) {
    std::vector<double> d(m.density.size());
    const double cv = m.spec.cell_volume();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = m.density[i] * cv;
    return d;
}

MemberGeometry measure_geometry(const FunctionNet& net, const MeasureSpec& m) {
    if (!(net.grid() == m.spec)) fail(ErrorKind::Shape, "net and measure grids differ");
    auto dcv = density_times_cv(m);
    return member_geometry(net, dcv, &dcv);
}

}  // namespace

Eigen::MatrixXd covariance_matrix(const FunctionNet& net, const MeasureSpec& m) {
    MemberGeometry g = measure_geometry(net, m);
    Eigen::MatrixXd C = g.gram - g.means * g.means.transpose();
    C = 0.5 * (C + C.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success)
        fail(ErrorKind::Degeneracy, "covariance eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    double clip = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        if (lam(i) < 0.0) {
            clip = std::max(clip, -lam(i));
            lam(i) = 0.0;
        }
    double trace = std::max(C.trace(), 0.0);
    if (clip > 1e-6 * std::max(trace, 1e-300))
        fail(ErrorKind::Degeneracy, "covariance clip beyond tolerance", clip);
    if (clip > 0.0)
        C = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    return C;
}

Eigen::MatrixXd rho_semimetric(const FunctionNet& net, const MeasureSpec& m) {
    Eigen::MatrixXd C = covariance_matrix(net, m);
    const Eigen::Index M = C.rows();
    Eigen::MatrixXd rho(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        rho(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < M; ++j) {
            double v = C(i, i) + C(j, j) - 2.0 * C(i, j);
            if (v < -1e-10)
                fail(ErrorKind::Degeneracy, "negative rho^2 beyond tolerance", v);
            double r = v > 0.0 ? std::sqrt(v) : 0.0;
            rho(i, j) = r;
            rho(j, i) = r;
        }
    }
    return rho;
}

namespace {

// square root factor with escalating diagonal jitter (relative to the mean
// diagonal), 1e-12 up to 1e-8
Eigen::MatrixXd factor_with_jitter(const Eigen::MatrixXd& C) {
    const Eigen::Index M = C.rows();
    double scale = C.trace() / static_cast<double>(M);
    if (!(scale > 0.0)) return Eigen::MatrixXd::Zero(M, M);  // degenerate all-constant net
    for (double j = 1e-12; j <= 1e-8 * 1.0000001; j *= 10.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(C + j * scale * Eigen::MatrixXd::Identity(M, M));
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    fail(ErrorKind::Degeneracy, "covariance factorization failed after jitter escalation");
}

}  // namespace

GaussianSupStats sample_gaussian_sup(const FunctionNet& net, const MeasureSpec& m,
                                     std::size_t reps, std::uint64_t seed,
                                     GaussianVariant variant) {
    if (reps < 100) fail(ErrorKind::Parameter, "need at least 100 replications");
    MemberGeometry g = measure_geometry(net, m);
    Eigen::MatrixXd C = g.gram - g.means * g.means.transpose();
    C = 0.5 * (C + C.transpose()).eval();
    Eigen::MatrixXd L = factor_with_jitter(C);

    const Eigen::Index M = C.rows();
    Rng root(seed);
    std::vector<double> sups(reps);
    parallel_for(reps, [&](std::size_t r) {
        Rng rng = root.derive(r);
        Eigen::VectorXd z(M);
        for (Eigen::Index i = 0; i < M; ++i) z(i) = rng.normal();
        Eigen::VectorXd gvec = L * z;
        if (variant == GaussianVariant::MeanAugmented) {
            double Z = rng.normal();
            gvec += Z * g.means;
        }
        sups[r] = gvec.cwiseAbs().maxCoeff();
    });
    double sum = 0.0, sum2 = 0.0;
    for (double s : sups) {
        sum += s;
        sum2 += s * s;
    }
    GaussianSupStats out;
    out.reps = reps;
    out.mean = sum / static_cast<double>(reps);
    double var = std::max(0.0, sum2 / static_cast<double>(reps) - out.mean * out.mean);
    out.se = std::sqrt(var / static_cast<double>(reps));
    return out;
}

double sudakov_value(const FunctionNet& net, const MeasureSpec& m,
                     std::span<const double> eps_grid) {
    if (eps_grid.empty()) fail(ErrorKind::Parameter, "empty epsilon grid");
    Eigen::MatrixXd rho = rho_semimetric(net, m);
    CoverPackAnalyzer an(std::move(rho));
    double best = 0.0;
    for (double e : eps_grid) {
        if (!(e > 0.0)) fail(ErrorKind::Parameter, "epsilon must be positive");
        int np = an.pack_count(e);
        if (np > 1) best = std::max(best, e * std::sqrt(std::log(static_cast<double>(np))));
    }
    return best;
}

std::vector<double> empirical_sup_replications(const FunctionNet& net, const MeasureSpec& m,
                                               std::size_t n, std::size_t reps,
                                               std::uint64_t seed) {
    if (n < 1) fail(ErrorKind::Parameter, "sample size must be >= 1");
    if (!(net.grid() == m.spec)) fail(ErrorKind::Shape, "net and measure grids differ");
    MemberGeometry g = measure_geometry(net, m);

    const std::size_t M = net.size();
    std::vector<double> sups(reps);
    Rng root(seed);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    parallel_for(reps, [&](std::size_t r) {
        Rng rng = root.derive(r);
        auto pts = sample_points(m, n, rng.u64());
        std::vector<double> acc(M, 0.0);
        for (const auto& pt : pts)
            for (std::size_t i = 0; i < M; ++i) acc[i] += net.eval_member(i, pt.flat_index);
        double sup = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            double v = inv_sqrt_n * (acc[i] - static_cast<double>(n) * g.means(i));
            sup = std::max(sup, std::abs(v));
        }
        sups[r] = sup;
    });
    return sups;
}

namespace {

double quantile_sorted(const std::vector<double>& xs, double q) {
    if (xs.empty()) return 0.0;
    double pos = q * static_cast<double>(xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace

EmpiricalSupStats empirical_process_sup(const FunctionNet& net, const MeasureSpec& m,
                                        std::size_t n, std::size_t reps, std::uint64_t seed) {
    if (reps < 100) fail(ErrorKind::Parameter, "need at least 100 replications");
    std::vector<double> sups = empirical_sup_replications(net, m, n, reps, seed);
    std::vector<double> sorted = sups;
    std::sort(sorted.begin(), sorted.end());

    EmpiricalSupStats out;
    out.reps = reps;
    out.median = quantile_sorted(sorted, 0.5);
    out.q90 = quantile_sorted(sorted, 0.9);

    // bootstrap over replications
    const std::size_t B = 200;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> med(B), q90(B), resample(sups.size());
    for (std::size_t b = 0; b < B; ++b) {
        for (auto& x : resample) x = sups[rng.below(sups.size())];
        std::sort(resample.begin(), resample.end());
        med[b] = quantile_sorted(resample, 0.5);
        q90[b] = quantile_sorted(resample, 0.9);
    }
    auto sd = [](const std::vector<double>& xs) {
        double mu = 0.0;
        for (double x : xs) mu += x;
        mu /= static_cast<double>(xs.size());
        double v = 0.0;
        for (double x : xs) v += (x - mu) * (x - mu);
        return std::sqrt(v / static_cast<double>(xs.size()));
    };
    out.se_median = sd(med);
    out.se_q90 = sd(q90);
    return out;
}

std::vector<double> envelope_values(const FunctionNet& net, const MeasureSpec& m,
                                    std::size_t n_probe, std::uint64_t seed) {
    if (n_probe < 1) fail(ErrorKind::Parameter, "need at least one probe");
    if (!(net.grid() == m.spec)) fail(ErrorKind::Shape, "net and measure grids differ");

    // P f_i by direct quadrature (cheap relative to the probe sweep)
    const std::size_t M = net.size();
    std::vector<double> means(M);
    auto dcv = density_times_cv(m);
    for (std::size_t i = 0; i < M; ++i) {
        double s = 0.0;
        if (net.translate_base) {
            // mean of a cyclic translate via index arithmetic
            const auto& base = net.translate_base->values;
            const int n = net.translate_base->spec.points_per_axis;
            long shift = net.shift_members[i];
            for (std::size_t j = 0; j < dcv.size(); ++j) {
                if (dcv[j] == 0.0) continue;
                long src = (static_cast<long>(j) - shift) % n;
                if (src < 0) src += n;
                s += base[static_cast<std::size_t>(src)] * dcv[j];
            }
        } else {
            for (std::size_t j = 0; j < dcv.size(); ++j)
                if (dcv[j] != 0.0) s += net.eval_member(i, j) * dcv[j];
        }
        means[i] = s;
    }

    auto probes = sample_points(m, n_probe, seed);
    std::vector<double> env(n_probe);
    parallel_for(n_probe, [&](std::size_t p) {
        double mx = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            mx = std::max(mx, std::abs(net.eval_member(i, probes[p].flat_index) - means[i]));
        env[p] = mx;
    });
    return env;
}

std::vector<std::pair<double, double>> envelope_tail(const FunctionNet& net,
                                                     const MeasureSpec& m,
                                                     std::span<const double> t_grid,
                                                     std::size_t n_probe, std::uint64_t seed) {
    if (t_grid.empty()) fail(ErrorKind::Parameter, "empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) fail(ErrorKind::Parameter, "t grid must be positive");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            fail(ErrorKind::Parameter, "t grid must be increasing");
    }
    std::vector<double> env = envelope_values(net, m, n_probe, seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        std::size_t count = 0;
        for (double e : env)
            if (e > t) ++count;
        double phat = static_cast<double>(count) / static_cast<double>(n_probe);
        out.push_back({t, t * t * phat});
    }
    return out;
}

}  // namespace bpl
