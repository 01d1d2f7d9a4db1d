#include "bpl/entropy.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bpl {

MetricSpec MetricSpec::plain() { return MetricSpec{}; }

MetricSpec MetricSpec::weighted(double gamma) {
    MetricSpec m;
    m.kind = Kind::WeightedL2;
    m.gamma = gamma;
    return m;
}

MetricSpec MetricSpec::measure_l2(MeasurePtr mp) {
    if (!mp) fail(ErrorKind::Parameter, "null measure in metric");
    MetricSpec m;
    m.kind = Kind::MeasureL2;
    m.measure = std::move(mp);
    return m;
}

MetricSpec MetricSpec::restricted(std::array<double, 2> center, double radius) {
    if (!(radius > 0.0)) fail(ErrorKind::Parameter, "restriction radius must be positive");
    MetricSpec m;
    m.kind = Kind::RestrictedL2;
    m.center = center;
    m.radius = radius;
    return m;
}

std::vector<double> metric_weights(const MetricSpec& metric, const GridSpec& spec) {
    const double cv = spec.cell_volume();
    std::vector<double> w(spec.size(), cv);
    switch (metric.kind) {
        case MetricSpec::Kind::PlainL2:
            break;
        case MetricSpec::Kind::WeightedL2:
            for (std::size_t i = 0; i < w.size(); ++i) {
                auto p = spec.point(i);
                double n2 = p[0] * p[0] + (spec.dim == 2 ? p[1] * p[1] : 0.0);
                w[i] = cv * std::pow(1.0 + n2, -metric.gamma);
            }
            break;
        case MetricSpec::Kind::MeasureL2:
            if (!(metric.measure->spec == spec))
                fail(ErrorKind::Shape, "metric measure lives on a different grid");
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = cv * metric.measure->density[i];
            break;
        case MetricSpec::Kind::RestrictedL2:
            for (std::size_t i = 0; i < w.size(); ++i) {
                auto p = spec.point(i);
                double dx = p[0] - metric.center[0];
                double dy = spec.dim == 2 ? p[1] - metric.center[1] : 0.0;
                w[i] = (dx * dx + dy * dy <= metric.radius * metric.radius) ? cv : 0.0;
            }
            break;
    }
    return w;
}

namespace {

// dense member-value matrix path (value and translate flavors)
MemberGeometry geometry_from_rows(const FunctionNet& net, const std::vector<double>& w,
                                  const std::vector<double>* dens) {
    const std::size_t M = net.size();
    const std::size_t N = net.grid().size();
    Eigen::MatrixXd X(M, N);
    for (std::size_t i = 0; i < M; ++i) {
        GridFunction f = net.materialize(i);
        for (std::size_t j = 0; j < N; ++j) X(i, j) = f.values[j];
    }
    Eigen::VectorXd sw(N);
    for (std::size_t j = 0; j < N; ++j) sw(j) = std::sqrt(w[j]);
    Eigen::MatrixXd Xw = X * sw.asDiagonal();
    MemberGeometry g;
    g.gram = Xw * Xw.transpose();
    if (dens) {
        Eigen::VectorXd dv(N);
        for (std::size_t j = 0; j < N; ++j) dv(j) = (*dens)[j];
        g.means = X * dv;
    }
    return g;
}

// dictionary path: atom Gram -> Cholesky embedding -> member Gram
MemberGeometry geometry_from_dict(const FunctionNet& net, const std::vector<double>& w,
                                  const std::vector<double>* dens) {
    const NetDictionary& dict = *net.dict;
    const std::size_t A = dict.atoms.size();
    const std::size_t N = dict.spec.size();
    Eigen::MatrixXd rows(A, N);
    rows.setZero();
    for (std::size_t a = 0; a < A; ++a) {
        const auto& atom = dict.atoms[a];
        for (std::size_t j = 0; j < atom.window.size(); ++j)
            rows(a, atom.start + j) = atom.window[j];
    }
    Eigen::VectorXd sw(N);
    for (std::size_t j = 0; j < N; ++j) sw(j) = std::sqrt(w[j]);
    Eigen::MatrixXd Rw = rows * sw.asDiagonal();
    Eigen::MatrixXd G = Rw * Rw.transpose();

    // tiny ridge keeps the factorization alive for rank-deficient dictionaries
    double ridge = 1e-13 * std::max(1.0, G.trace() / static_cast<double>(A));
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int attempt = 0; attempt < 5; ++attempt) {
        Eigen::MatrixXd Gj = G + ridge * Eigen::MatrixXd::Identity(A, A);
        llt.compute(Gj);
        if (llt.info() == Eigen::Success) break;
        ridge *= 100.0;
    }
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::Degeneracy, "atom Gram factorization failed");
    Eigen::MatrixXd L = llt.matrixL();

    const std::size_t M = net.size();
    Eigen::MatrixXd Y(M, A);
    Y.setZero();
    for (std::size_t i = 0; i < M; ++i)
        for (const auto& [a, c] : net.coeff_members[i]) Y.row(i) += c * L.row(a);
    MemberGeometry g;
    g.gram = Y * Y.transpose();
    if (dens) {
        Eigen::VectorXd am(A);
        for (std::size_t a = 0; a < A; ++a) {
            const auto& atom = dict.atoms[a];
            double s = 0.0;
            for (std::size_t j = 0; j < atom.window.size(); ++j)
                s += atom.window[j] * (*dens)[atom.start + j];
            am(a) = s;
        }
        g.means.resize(M);
        for (std::size_t i = 0; i < M; ++i) {
            double s = 0.0;
            for (const auto& [a, c] : net.coeff_members[i]) s += c * am(a);
            g.means(i) = s;
        }
    }
    return g;
}

}  // namespace

MemberGeometry member_geometry(const FunctionNet& net, const std::vector<double>& weights,
                               const std::vector<double>* density_times_cv) {
    if (net.size() == 0) fail(ErrorKind::Parameter, "empty net");
    if (weights.size() != net.grid().size())
        fail(ErrorKind::Shape, "metric weights do not match the net grid");
    if (net.dict) return geometry_from_dict(net, weights, density_times_cv);
    return geometry_from_rows(net, weights, density_times_cv);
}

Eigen::MatrixXd distance_matrix(const FunctionNet& net, const MetricSpec& metric) {
    MemberGeometry g = member_geometry(net, metric_weights(metric, net.grid()));
    const Eigen::Index M = g.gram.rows();
    Eigen::MatrixXd d(M, M);
    for (Eigen::Index i = 0; i < M; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < M; ++j) {
            double v = g.gram(i, i) + g.gram(j, j) - 2.0 * g.gram(i, j);
            double r = v > 0.0 ? std::sqrt(v) : 0.0;
            d(i, j) = r;
            d(j, i) = r;
        }
    }
    return d;
}

CoverPackAnalyzer::CoverPackAnalyzer(Eigen::MatrixXd dist) : dist_(std::move(dist)) {
    const Eigen::Index M = dist_.rows();
    if (M == 0) fail(ErrorKind::Parameter, "empty distance matrix");

    // farthest-point traversal from the medoid; the visit ranks break ties in
    // the covering greedy so centers spread out deterministically
    Eigen::Index start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < M; ++i) {
        double worst = dist_.row(i).maxCoeff();
        if (worst < best) {
            best = worst;
            start = i;
        }
    }
    rank_.assign(M, std::numeric_limits<int>::max());
    std::vector<double> md(M);
    for (Eigen::Index i = 0; i < M; ++i) md[i] = dist_(start, i);
    rank_[start] = 0;
    for (Eigen::Index t = 1; t < M; ++t) {
        Eigen::Index far = -1;
        double fd = -1.0;
        for (Eigen::Index i = 0; i < M; ++i)
            if (rank_[i] == std::numeric_limits<int>::max() && md[i] > fd) {
                fd = md[i];
                far = i;
            }
        if (far < 0) break;
        rank_[far] = static_cast<int>(t);
        for (Eigen::Index i = 0; i < M; ++i) md[i] = std::min(md[i], dist_(far, i));
    }
}

int CoverPackAnalyzer::pack_count(double eps) const {
    if (!(eps > 0.0)) fail(ErrorKind::Parameter, "epsilon must be positive");
    // greedy maximal eps-separated subset in canonical (row) order
    const Eigen::Index M = dist_.rows();
    std::vector<int> kept;
    for (Eigen::Index i = 0; i < M; ++i) {
        bool ok = true;
        for (int c : kept)
            if (dist_(i, c) <= eps) {
                ok = false;
                break;
            }
        if (ok) kept.push_back(static_cast<int>(i));
    }
    return static_cast<int>(kept.size());
}

int CoverPackAnalyzer::cover_count(double eps) const {
    if (!(eps > 0.0)) fail(ErrorKind::Parameter, "epsilon must be positive");
    const Eigen::Index M = dist_.rows();

    // greedy set cover: pick the member covering the most uncovered points,
    // ties broken by farthest-point rank; counts maintained incrementally
    std::vector<char> covered(M, 0);
    std::vector<int> gain(M, 0);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            if (dist_(i, j) <= eps) ++gain[i];
    Eigen::Index left = M;
    int picks = 0;
    while (left > 0) {
        Eigen::Index c = -1;
        for (Eigen::Index i = 0; i < M; ++i) {
            if (gain[i] <= 0) continue;
            if (c < 0 || gain[i] > gain[c] || (gain[i] == gain[c] && rank_[i] < rank_[c]))
                c = i;
        }
        if (c < 0) break;  // defensive: all residual gains zero
        ++picks;
        for (Eigen::Index j = 0; j < M; ++j) {
            if (covered[j] || dist_(c, j) > eps) continue;
            covered[j] = 1;
            --left;
            for (Eigen::Index i = 0; i < M; ++i)
                if (dist_(i, j) <= eps) --gain[i];
        }
    }

    // a maximal separated set is itself an internal covering; report the
    // smaller of the two greedy constructions (keeps the packing sandwich)
    return std::min(picks, pack_count(eps));
}

std::vector<std::size_t> canonical_order(const FunctionNet& net) {
    const std::size_t M = net.size();
    std::vector<std::size_t> idx(M);
    for (std::size_t i = 0; i < M; ++i) idx[i] = i;
    if (net.dict) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return net.coeff_members[a] < net.coeff_members[b];
        });
    } else if (net.translate_base) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return net.shift_members[a] < net.shift_members[b];
        });
    } else {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return net.value_members[a].values < net.value_members[b].values;
        });
    }
    return idx;
}

namespace {

Eigen::MatrixXd canonical_distance_matrix(const FunctionNet& net, const MetricSpec& metric) {
    Eigen::MatrixXd d = distance_matrix(net, metric);
    std::vector<std::size_t> ord = canonical_order(net);
    const Eigen::Index M = d.rows();
    Eigen::MatrixXd c(M, M);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            c(i, j) = d(static_cast<Eigen::Index>(ord[i]), static_cast<Eigen::Index>(ord[j]));
    return c;
}

}  // namespace

CoverPack covering_packing(const FunctionNet& net, const MetricSpec& metric, double eps) {
    if (net.size() == 0) fail(ErrorKind::Parameter, "empty net");
    if (!(eps > 0.0)) fail(ErrorKind::Parameter, "epsilon must be positive");
    CoverPackAnalyzer an(canonical_distance_matrix(net, metric));
    return CoverPack{an.cover_count(eps), an.pack_count(eps)};
}

EntropyCurve entropy_curve(const FunctionNet& net, const MetricSpec& metric,
                           std::vector<double> eps_grid) {
    if (eps_grid.size() < 2) fail(ErrorKind::Parameter, "epsilon grid too short");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] < eps_grid[i - 1]))
            fail(ErrorKind::Parameter, "epsilon grid must be strictly decreasing");
    if (eps_grid.front() / eps_grid.back() < 10.0 * (1.0 - 1e-12))
        fail(ErrorKind::Parameter, "epsilon grid must span at least one decade");

    CoverPackAnalyzer an(canonical_distance_matrix(net, metric));
    EntropyCurve c;
    c.eps = std::move(eps_grid);
    for (double e : c.eps) {
        c.n_cover.push_back(an.cover_count(e));
        c.n_pack.push_back(an.pack_count(e));
    }

    const double hi_guard = static_cast<double>(net.size()) / 4.0;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
        if (c.n_cover[i] < 4 || c.n_cover[i] > hi_guard) continue;
        xs.push_back(std::log(1.0 / c.eps[i]));
        ys.push_back(std::log(static_cast<double>(c.n_cover[i])));
        if (c.fit_points == 0) c.eps_hi = c.eps[i];
        c.eps_lo = c.eps[i];
        ++c.fit_points;
    }
    if (c.fit_points < 3)
        fail(ErrorKind::Fit, "fewer than 3 usable points in the fit window",
             static_cast<double>(c.fit_points));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom <= 0.0) fail(ErrorKind::Fit, "degenerate fit window");
    c.alpha_hat = (n * sxy - sx * sy) / denom;
    c.intercept = (sy - c.alpha_hat * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (c.alpha_hat * xs[i] + c.intercept);
        rss += r * r;
    }
    c.residual = std::sqrt(rss / n);
    return c;
}

void write_entropy_csv(const EntropyCurve& c, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(ErrorKind::Io, "cannot open " + path);
    std::fprintf(fp, "epsilon,n_cover,n_pack\n");
    for (std::size_t i = 0; i < c.eps.size(); ++i)
        std::fprintf(fp, "%.17g,%d,%d\n", c.eps[i], c.n_cover[i], c.n_pack[i]);
    std::fclose(fp);
}

EntropyRegime EntropyRegime::weighted(double gamma) {
    return EntropyRegime{Kind::Weighted, gamma, 0.0};
}
EntropyRegime EntropyRegime::power_tail(double delta) {
    return EntropyRegime{Kind::PowerTail, 0.0, delta};
}
EntropyRegime EntropyRegime::restricted() { return EntropyRegime{Kind::Restricted, 0.0, 0.0}; }

double predicted_alpha(const BesovParams& params, const EntropyRegime& regime) {
    const double d = static_cast<double>(params.dim);
    const double inv_p = params.p == kInfOrder ? 0.0 : 1.0 / params.p;
    switch (regime.kind) {
        case EntropyRegime::Kind::Weighted: {
            double threshold = params.s - d * inv_p + d / 2.0;
            if (!(threshold > 0.0))
                fail(ErrorKind::Parameter, "hypothesis s - d/p + d/2 > 0 fails");
            if (!(regime.gamma > 0.0))
                fail(ErrorKind::Parameter, "weighted regime requires gamma > 0");
            if (regime.gamma == threshold)
                fail(ErrorKind::Parameter, "boundary gamma = s - d/p + d/2 is not covered");
            if (regime.gamma > threshold) return d / params.s;
            return 1.0 / (regime.gamma / d + inv_p - 0.5);
        }
        case EntropyRegime::Kind::PowerTail:
            if (!(regime.delta > 0.0))
                fail(ErrorKind::Parameter, "tail exponent delta must be positive");
            return 1.0 / (regime.delta / d + inv_p);
        case EntropyRegime::Kind::Restricted:
            if (!(params.s > 0.0))
                fail(ErrorKind::Parameter, "restricted regime requires s > 0");
            return d / params.s;
    }
    fail(ErrorKind::Parameter, "unknown entropy regime");
}

double convert_entropy_rate(double rate, RateDirection) {
    if (!(rate > 0.0)) fail(ErrorKind::Parameter, "rate must be positive");
    return 1.0 / rate;  // the map is its own inverse
}

}  // namespace bpl
