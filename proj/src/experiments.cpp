#include "bpl/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bpl/parallel.hpp"

namespace bpl {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir);
}

void write_report(const Json& report, const std::string& out_dir) {
    std::ofstream out(out_dir + "/report.json");
    if (!out) fail(ErrorKind::Io, "cannot write report.json");
    out << report.dump(2) << "\n";
}

double order_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInfOrder;
        fail(ErrorKind::Config, "order must be a number or \"inf\"");
    }
    return j.get<double>();
}

std::FILE* open_csv(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(ErrorKind::Io, "cannot open " + path);
    return fp;
}

}  // namespace

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open config " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorKind::Config, std::string("config parse error: ") + e.what());
    }
    if (!j.contains("bpl_schema") || j["bpl_schema"].get<int>() != 1)
        fail(ErrorKind::Config, "config must declare \"bpl_schema\": 1");
    return j;
}

GridSpec parse_grid(const Json& j) {
    return make_grid_spec(j.value("d", 1), j.at("n").get<int>(),
                          j.at("half_width").get<double>());
}

BesovParams parse_besov(const Json& j) {
    return make_besov_params(j.at("s").get<double>(), order_from_json(j.at("p")),
                             order_from_json(j.at("q")), j.value("d", 1));
}

MeasurePtr parse_measure(const Json& j, const GridSpec& spec) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform")
        return make_uniform_measure(spec, j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "gaussian") return make_gaussian_measure(spec, j.value("sigma", 1.0));
    if (kind == "thm4") {
        BaseProfile base = j.value("base", std::string("const")) == "wobble"
                               ? BaseProfile::Wobble
                               : BaseProfile::Const;
        return make_power_tail_measure(spec, j.at("delta").get<double>(), base,
                                       j.value("tail_tolerance", 1e-4));
    }
    fail(ErrorKind::Config, "unknown measure kind " + kind);
}

MeasureClassSpec measure_class_of(const Json& measure_json) {
    const std::string kind = measure_json.at("kind").get<std::string>();
    if (kind == "uniform") return MeasureClassSpec::bounded_lower_bounded();
    if (kind == "gaussian") return MeasureClassSpec::weight_bounded();
    if (kind == "thm4")
        return MeasureClassSpec::power_tail(measure_json.at("delta").get<double>());
    fail(ErrorKind::Config, "unknown measure kind " + kind);
}

std::vector<double> parse_log_grid(const Json& j, bool descending) {
    if (j.is_array()) {
        std::vector<double> g = j.get<std::vector<double>>();
        if (g.empty()) fail(ErrorKind::Config, "empty grid");
        return g;
    }
    double lo = j.at("lo").get<double>();
    double hi = j.at("hi").get<double>();
    int points = j.at("points").get<int>();
    if (!(lo > 0.0) || !(hi > lo) || points < 2) fail(ErrorKind::Config, "bad log grid");
    std::vector<double> g(points);
    double ratio = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[i] = lo * std::exp(ratio * i);
    if (descending) std::reverse(g.begin(), g.end());
    return g;
}

Json classification_json(const Classification& c) {
    Json j;
    j["donsker"] = donsker_token(c.donsker);
    j["pregaussian"] = pregaussian_token(c.pregaussian);
    if (c.donsker == DonskerVerdict::DonskerUnderMoment)
        j["moment_requirement"] = c.moment_requirement;
    j["citations"] = c.citations;
    return j;
}

std::string consistency_phrase(bool consistent, const std::string& verdict) {
    return (consistent ? std::string("consistent with ") : std::string("not consistent with ")) +
           verdict;
}

namespace {

FunctionNet net_from_config(const Json& j, const BesovParams& params,
                            const DyadicPartition& part) {
    const std::string preset = j.at("preset").get<std::string>();
    const std::size_t cap = j.value("cap", 4096);
    const std::uint64_t seed = j.value("seed", 1);
    if (preset == "bump_line") {
        BumpLinePlan plan;
        plan.scale = j.value("scale", plan.scale);
        plan.spacing = j.value("spacing", plan.spacing);
        plan.max_radius = j.at("max_radius").get<double>();
        plan.coeff_levels = j.value("coeff_levels", plan.coeff_levels);
        plan.quant_level = j.value("quant_level", plan.quant_level);
        return build_bump_line_net(params, part, plan, cap, seed);
    }
    if (preset == "frequency_ladder") {
        FrequencyLadderPlan plan;
        plan.xi_max = j.at("xi_max").get<double>();
        plan.stride = j.value("stride", plan.stride);
        plan.quant_level = j.value("quant_level", plan.quant_level);
        return build_frequency_ladder_net(params, part, plan, cap, seed);
    }
    if (preset == "sign_code") {
        SignCodePlan plan;
        plan.scale = j.value("scale", plan.scale);
        plan.spacing = j.value("spacing", plan.spacing);
        plan.radius_min = j.at("radius_min").get<double>();
        plan.radius_max = j.at("radius_max").get<double>();
        plan.radius_factor = j.value("radius_factor", plan.radius_factor);
        plan.codes_per_dim = j.value("codes_per_dim", plan.codes_per_dim);
        plan.quant_level = j.value("quant_level", plan.quant_level);
        plan.singles_levels = j.value("singles_levels", plan.singles_levels);
        return build_sign_code_net(params, part, plan, cap, seed);
    }
    if (preset == "block_lattice")
        return build_net(params, part, j.at("level").get<int>(), cap, seed,
                         j.value("allow_subsample", true));
    fail(ErrorKind::Config, "unknown net preset " + preset);
}

MetricSpec metric_from_config(const Json& j, const GridSpec& spec, MeasurePtr* measure_out,
                              Json* measure_json_out) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "plain") return MetricSpec::plain();
    if (kind == "weighted") return MetricSpec::weighted(j.at("gamma").get<double>());
    if (kind == "restricted") {
        std::array<double, 2> c{j.value("center", 0.0), 0.0};
        return MetricSpec::restricted(c, j.at("radius").get<double>());
    }
    if (kind == "l2_measure") {
        Json mj = j.at("measure");
        MeasurePtr m = parse_measure(mj, spec);
        if (measure_out) *measure_out = m;
        if (measure_json_out) *measure_json_out = mj;
        return MetricSpec::measure_l2(m);
    }
    fail(ErrorKind::Config, "unknown metric kind " + kind);
}

EntropyRegime regime_from_config(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "weighted") return EntropyRegime::weighted(j.at("gamma").get<double>());
    if (kind == "thm4") return EntropyRegime::power_tail(j.at("delta").get<double>());
    if (kind == "restricted") return EntropyRegime::restricted();
    fail(ErrorKind::Config, "unknown entropy regime " + kind);
}

}  // namespace

EntropyRun run_entropy(const Json& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec spec = parse_grid(config.at("grid"));
    BesovParams params = parse_besov(config.at("besov"));
    DyadicPartition part = make_dyadic_partition(spec);

    FunctionNet net = net_from_config(config.at("net"), params, part);
    MeasurePtr metric_measure;
    Json metric_measure_json;
    MetricSpec metric =
        metric_from_config(config.at("metric"), spec, &metric_measure, &metric_measure_json);

    std::vector<double> eps = parse_log_grid(config.at("eps_grid"), true);

    EntropyRun run;
    run.curve = entropy_curve(net, metric, eps);
    run.predicted = predicted_alpha(params, regime_from_config(config.at("regime")));
    run.cls = classify(params, metric_measure ? measure_class_of(metric_measure_json)
                                              : MeasureClassSpec::any());

    write_entropy_csv(run.curve, out_dir + "/curve.csv");

    bool consistent = std::abs(run.curve.alpha_hat - run.predicted) <= 0.35 * run.predicted;
    Json report;
    report["bpl_schema"] = 1;
    report["experiment"] = "entropy";
    report["config"] = config;
    report["net_size"] = net.size();
    report["net_note"] = net.note;
    report["fit"] = {{"alpha_hat", run.curve.alpha_hat},
                     {"intercept", run.curve.intercept},
                     {"window", {run.curve.eps_lo, run.curve.eps_hi}},
                     {"fit_points", run.curve.fit_points},
                     {"residual", run.curve.residual},
                     {"predicted_alpha", run.predicted},
                     {"regime", config.at("regime").at("kind").get<std::string>()}};
    report["classification"] = classification_json(run.cls);
    report["interpretation"] =
        consistency_phrase(consistent, "the predicted covering exponent") +
        "; measured trends are diagnostics, not proofs";
    write_report(report, out_dir);
    run.report = report;
    return run;
}

GpRun run_gp(const Json& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec spec = parse_grid(config.at("grid"));
    BesovParams params = parse_besov(config.at("besov"));
    DyadicPartition part = make_dyadic_partition(spec);
    MeasurePtr measure = parse_measure(config.at("measure"), spec);

    const int level_lo = config.at("levels").at("lo").get<int>();
    const int level_hi = config.at("levels").at("hi").get<int>();
    const std::size_t per_level = config.at("members_per_level").get<std::size_t>();
    const std::size_t reps = config.value("reps", 2000);
    const std::uint64_t seed = config.value("seed", 1);
    std::vector<double> eps = parse_log_grid(config.at("eps_grid"), true);

    std::vector<FunctionNet> nets =
        build_ball_sample_levels(params, part, level_lo, level_hi, per_level, seed);

    GpRun run;
    run.cls = classify(params, measure_class_of(config.at("measure")));
    for (const auto& net : nets) {
        GpLevelRow row;
        row.level = net.level;
        row.members = net.size();
        auto g = sample_gaussian_sup(net, *measure, reps, seed + 17, GaussianVariant::Bridge);
        auto l = sample_gaussian_sup(net, *measure, reps, seed + 31,
                                     GaussianVariant::MeanAugmented);
        row.mean_sup_g = g.mean;
        row.se_g = g.se;
        row.mean_sup_l = l.mean;
        row.se_l = l.se;
        row.sudakov = sudakov_value(net, *measure, eps);
        run.levels.push_back(row);
    }

    std::FILE* fp = open_csv(out_dir + "/levels.csv");
    std::fprintf(fp, "level,estimator,value,stderr\n");
    for (const auto& r : run.levels) {
        std::fprintf(fp, "%d,mean_sup_G,%.17g,%.17g\n", r.level, r.mean_sup_g, r.se_g);
        std::fprintf(fp, "%d,mean_sup_L,%.17g,%.17g\n", r.level, r.mean_sup_l, r.se_l);
        std::fprintf(fp, "%d,sudakov,%.17g,0\n", r.level, r.sudakov);
    }
    std::fclose(fp);

    bool grew = run.levels.size() >= 2 &&
                run.levels.back().mean_sup_g >
                    1.15 * run.levels[run.levels.size() - 2].mean_sup_g;
    std::string verdict = pregaussian_token(run.cls.pregaussian);
    bool consistent = run.cls.pregaussian == PregaussianVerdict::NotPregaussian ? grew : !grew;
    Json report;
    report["bpl_schema"] = 1;
    report["experiment"] = "gp";
    report["config"] = config;
    report["classification"] = classification_json(run.cls);
    Json rows = Json::array();
    for (const auto& r : run.levels)
        rows.push_back({{"level", r.level},
                        {"members", r.members},
                        {"mean_sup_G", r.mean_sup_g},
                        {"se_G", r.se_g},
                        {"mean_sup_L", r.mean_sup_l},
                        {"se_L", r.se_l},
                        {"sudakov", r.sudakov}});
    report["levels"] = rows;
    report["interpretation"] =
        "growth trend of E sup|G| across nested nets is " +
        consistency_phrase(consistent, "verdict " + verdict) +
        "; trends are diagnostics, not proofs";
    write_report(report, out_dir);
    run.report = report;
    return run;
}

namespace {

double quantile_of(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    double pos = q * static_cast<double>(xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

GridFunction envelope_base_from_config(const Json& j, const GridSpec& spec,
                                       const BesovParams& params,
                                       const DyadicPartition& part) {
    const std::string kind = j.at("kind").get<std::string>();
    GridFunction base = GridFunction::zeros(spec);
    if (kind == "witness") {
        WitnessSpec ws{j.at("k0").get<int>(), j.at("depth").get<int>()};
        base = witness_partial_sum(ws, spec);
    } else if (kind == "bump") {
        double c[1] = {j.value("center", 0.0)};
        base = bump_atom(spec, std::span<const double>(c, 1), j.at("scale").get<double>());
    } else {
        fail(ErrorKind::Config, "unknown envelope base kind " + kind);
    }
    double cert = besov_norm(base, params, part);
    if (!(cert > 0.0)) fail(ErrorKind::Degeneracy, "envelope base has zero norm");
    for (double& v : base.values) v /= cert * (1.0 + 1e-9);
    return base;
}

}  // namespace

EnvelopeRun run_envelope(const Json& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec spec = parse_grid(config.at("grid"));
    BesovParams params = parse_besov(config.at("besov"));
    DyadicPartition part = make_dyadic_partition(spec);
    MeasurePtr measure = parse_measure(config.at("measure"), spec);

    GridFunction base = envelope_base_from_config(config.at("base"), spec, params, part);
    const long span_cells = config.at("span_cells").get<long>();
    const std::size_t n_probe = config.value("n_probe", 4096);
    const std::uint64_t seed = config.value("seed", 1);
    std::vector<double> t_grid = parse_log_grid(config.at("t_grid"), false);
    std::vector<std::size_t> sizes = config.at("family_sizes").get<std::vector<std::size_t>>();
    if (sizes.empty()) fail(ErrorKind::Config, "family_sizes must be nonempty");

    EnvelopeRun run;
    std::FILE* fp = open_csv(out_dir + "/envelope.csv");
    std::fprintf(fp, "family_size,t,scaled_tail\n");

    double fixed_t = 0.0;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        FunctionNet family = build_translate_family(base, sizes[si], params, part, span_cells);
        std::vector<double> env = envelope_values(family, *measure, n_probe, seed);
        if (si == 0) fixed_t = quantile_of(env, 0.99);

        EnvelopeSizeRow row;
        row.family_size = sizes[si];
        row.fixed_t = fixed_t;
        auto tail_at = [&](double t) {
            std::size_t c = 0;
            for (double e : env)
                if (e > t) ++c;
            return t * t * static_cast<double>(c) / static_cast<double>(env.size());
        };
        row.scaled_tail_fixed = tail_at(fixed_t);
        row.own_q99 = quantile_of(env, 0.99);
        row.scaled_tail_own = tail_at(row.own_q99);
        run.rows.push_back(row);

        for (double t : t_grid) {
            std::size_t c = 0;
            for (double e : env)
                if (e > t) ++c;
            std::fprintf(fp, "%zu,%.17g,%.17g\n", sizes[si], t,
                         t * t * static_cast<double>(c) / static_cast<double>(env.size()));
        }
    }
    std::fclose(fp);

    Classification cls = classify(params, measure_class_of(config.at("measure")));
    Json report;
    report["bpl_schema"] = 1;
    report["experiment"] = "envelope";
    report["config"] = config;
    report["classification"] = classification_json(cls);
    Json rows = Json::array();
    for (const auto& r : run.rows)
        rows.push_back({{"family_size", r.family_size},
                        {"fixed_t", r.fixed_t},
                        {"scaled_tail_fixed_t", r.scaled_tail_fixed},
                        {"own_q99", r.own_q99},
                        {"scaled_tail_own_q99", r.scaled_tail_own}});
    report["sizes"] = rows;
    report["interpretation"] =
        "scaled envelope tails across family sizes are diagnostics "
        "consistent with the classification, not proofs";
    write_report(report, out_dir);
    run.report = report;
    return run;
}

WitnessRun run_witness(const Json& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec spec = parse_grid(config.at("grid"));
    BesovParams params = parse_besov(config.at("besov"));
    DyadicPartition part = make_dyadic_partition(spec);
    const int k0 = config.at("witness").at("k0").get<int>();
    const int depth = config.at("witness").at("depth").get<int>();

    WitnessSpec ws{k0, depth};
    WitnessSpec ws2{k0, 2 * depth};
    GridFunction psi = witness_partial_sum(ws, spec);
    GridFunction psi2 = witness_partial_sum(ws2, spec);

    WitnessRun run;
    run.norm_at_depth = besov_norm(psi, params, part);
    run.norm_at_double_depth = besov_norm(psi2, params, part);
    BesovParams q1 = make_besov_params(params.s, params.p, 1.0, params.dim);
    run.norm_q1_at_depth = besov_norm(psi, q1, part);
    run.norm_q1_at_double_depth = besov_norm(psi2, q1, part);

    // probe the log-log growth at radii 2^{-m}
    std::FILE* fp = open_csv(out_dir + "/probes.csv");
    std::fprintf(fp, "m,radius,value,ratio\n");
    run.min_probe_ratio = std::numeric_limits<double>::infinity();
    for (int m = k0 + 1; m <= depth; ++m) {
        double radius = std::pow(2.0, -m);
        long idx = std::lround((radius + spec.half_width) / spec.step());
        double value = psi.values[static_cast<std::size_t>(idx)];
        double ratio = value / std::log(static_cast<double>(m) / static_cast<double>(k0));
        run.min_probe_ratio = std::min(run.min_probe_ratio, ratio);
        std::fprintf(fp, "%d,%.17g,%.17g,%.17g\n", m, radius, value, ratio);
    }
    std::fclose(fp);

    Json report;
    report["bpl_schema"] = 1;
    report["experiment"] = "witness";
    report["config"] = config;
    report["norms"] = {{"depth", depth},
                       {"norm", run.norm_at_depth},
                       {"double_depth", 2 * depth},
                       {"norm_double", run.norm_at_double_depth},
                       {"norm_q1", run.norm_q1_at_depth},
                       {"norm_q1_double", run.norm_q1_at_double_depth}};
    report["min_probe_ratio"] = run.min_probe_ratio;
    report["interpretation"] =
        "bounded norm growth with diverging pointwise probes is consistent with "
        "the blow-up construction; not a proof";
    write_report(report, out_dir);
    run.report = report;
    return run;
}

EmpRun run_emp(const Json& config, const std::string& out_dir) {
    ensure_dir(out_dir);
    GridSpec spec = parse_grid(config.at("grid"));
    BesovParams params = parse_besov(config.at("besov"));
    DyadicPartition part = make_dyadic_partition(spec);
    MeasurePtr measure = parse_measure(config.at("measure"), spec);
    const std::uint64_t seed = config.value("seed", 1);

    const int level = config.value("level", 4);
    const std::size_t members = config.value("members", 64);
    std::vector<FunctionNet> nets =
        build_ball_sample_levels(params, part, level, level, members, seed);

    EmpRun run;
    run.stats = empirical_process_sup(nets.back(), *measure, config.at("n").get<std::size_t>(),
                                      config.value("reps", 200), seed + 5);

    std::FILE* fp = open_csv(out_dir + "/emp.csv");
    std::fprintf(fp, "estimator,value,stderr\n");
    std::fprintf(fp, "median_sup,%.17g,%.17g\n", run.stats.median, run.stats.se_median);
    std::fprintf(fp, "q90_sup,%.17g,%.17g\n", run.stats.q90, run.stats.se_q90);
    std::fclose(fp);

    Classification cls = classify(params, measure_class_of(config.at("measure")));
    Json report;
    report["bpl_schema"] = 1;
    report["experiment"] = "emp";
    report["config"] = config;
    report["classification"] = classification_json(cls);
    report["stats"] = {{"median", run.stats.median},
                       {"q90", run.stats.q90},
                       {"se_median", run.stats.se_median},
                       {"se_q90", run.stats.se_q90}};
    report["interpretation"] =
        "empirical supremum quantiles are diagnostics consistent with the "
        "classification, not proofs";
    write_report(report, out_dir);
    run.report = report;
    return run;
}

Json run_classify_config(const Json& config) {
    BesovParams params = parse_besov(config.at("besov"));
    const Json& mc = config.at("measure_class");
    const std::string kind = mc.at("kind").get<std::string>();
    MeasureClassSpec spec;
    if (kind == "any")
        spec = MeasureClassSpec::any();
    else if (kind == "thm4")
        spec = MeasureClassSpec::power_tail(mc.at("delta").get<double>());
    else if (kind == "weight_bounded_density")
        spec = MeasureClassSpec::weight_bounded();
    else if (kind == "bounded_density_lower_bounded")
        spec = MeasureClassSpec::bounded_lower_bounded();
    else if (kind == "bounded_density")
        spec = MeasureClassSpec::bounded();
    else
        fail(ErrorKind::Config, "unknown measure class " + kind);

    Classification c = classify(params, spec);
    Json out;
    out["bpl_schema"] = 1;
    out["experiment"] = "classify";
    out["config"] = config;
    out["classification"] = classification_json(c);
    return out;
}

Json run_experiment(const Json& config, const std::string& out_dir) {
    if (!config.contains("bpl_schema") || config["bpl_schema"].get<int>() != 1)
        fail(ErrorKind::Config, "config must declare \"bpl_schema\": 1");
    if (config.contains("threads")) set_worker_threads(config["threads"].get<unsigned>());
    const std::string kind = config.at("experiment").get<std::string>();
    if (kind == "entropy") return run_entropy(config, out_dir).report;
    if (kind == "gp") return run_gp(config, out_dir).report;
    if (kind == "envelope") return run_envelope(config, out_dir).report;
    if (kind == "witness") return run_witness(config, out_dir).report;
    if (kind == "emp") return run_emp(config, out_dir).report;
    if (kind == "classify") {
        Json report = run_classify_config(config);
        ensure_dir(out_dir);
        write_report(report, out_dir);
        return report;
    }
    if (kind == "net") {
        ensure_dir(out_dir);
        GridSpec spec = parse_grid(config.at("grid"));
        BesovParams params = parse_besov(config.at("besov"));
        DyadicPartition part = make_dyadic_partition(spec);
        FunctionNet net = net_from_config(config.at("net"), params, part);
        save_net(net, out_dir, config.value("dump_functions", false));
        Json report;
        report["bpl_schema"] = 1;
        report["experiment"] = "net";
        report["config"] = config;
        report["count"] = net.size();
        report["note"] = net.note;
        write_report(report, out_dir);
        return report;
    }
    if (kind == "partition") {
        ensure_dir(out_dir);
        GridSpec spec = parse_grid(config.at("grid"));
        DyadicPartition part = make_dyadic_partition(spec);
        write_partition_csv(part, out_dir + "/partition.csv");
        Json report;
        report["bpl_schema"] = 1;
        report["experiment"] = "partition";
        report["config"] = config;
        report["k_max"] = part.k_max;
        write_report(report, out_dir);
        return report;
    }
    if (kind == "norm") {
        ensure_dir(out_dir);
        GridSpec spec = parse_grid(config.at("grid"));
        DyadicPartition part = make_dyadic_partition(spec);
        const Json& fj = config.at("function");
        const std::string fk = fj.at("kind").get<std::string>();
        GridFunction f = GridFunction::zeros(spec);
        if (fk == "bump") {
            double c[2] = {fj.value("center", 0.0), 0.0};
            f = bump_atom(spec, std::span<const double>(c, spec.dim),
                          fj.at("scale").get<double>());
        } else if (fk == "gaussian_bump") {
            double scale = fj.value("scale", 1.0);
            f = GridFunction::sample(spec, [&](std::array<double, 2> p) {
                double n2 = p[0] * p[0] + (spec.dim == 2 ? p[1] * p[1] : 0.0);
                return std::exp(-n2 / (scale * scale));
            });
        } else if (fk == "witness") {
            WitnessSpec ws{fj.at("k0").get<int>(), fj.at("depth").get<int>()};
            f = witness_partial_sum(ws, spec);
        } else {
            fail(ErrorKind::Config, "unknown function kind " + fk);
        }
        std::FILE* fp = open_csv(out_dir + "/norm.csv");
        std::fprintf(fp, "s,p,q,value\n");
        Json rows = Json::array();
        for (const auto& nj : config.at("norms")) {
            BesovParams bp = parse_besov(nj.contains("d") ? nj : [&] {
                Json copy = nj;
                copy["d"] = spec.dim;
                return copy;
            }());
            double v = besov_norm(f, bp, part);
            std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", bp.s, bp.p, bp.q, v);
            rows.push_back({{"s", bp.s}, {"p", bp.p}, {"q", bp.q}, {"value", v}});
        }
        std::fclose(fp);
        Json report;
        report["bpl_schema"] = 1;
        report["experiment"] = "norm";
        report["config"] = config;
        report["norms"] = rows;
        write_report(report, out_dir);
        return report;
    }
    fail(ErrorKind::Config, "unknown experiment kind " + kind);
}

}  // namespace bpl
