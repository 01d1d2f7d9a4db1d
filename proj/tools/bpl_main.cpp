// bpl: numerical laboratory for Besov-ball norms, metric entropy, and
// function-indexed Gaussian/empirical process experiments.
//
// Every subcommand runs a config-driven experiment and writes CSV plus a
// report.json that embeds the config and seeds for exact replay.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "bpl/experiments.hpp"
#include "bpl/parallel.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int levels = 0;
    bool levels_set = false;
    std::size_t cap = 0;
    bool cap_set = false;
    unsigned threads = 0;
    bool threads_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
    auto* copt = cmd->add_option("--config", o.config_path, "experiment config (JSON)");
    if (config_required) copt->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "override the config seed")
        ->each([&](const std::string&) { o.seed_set = true; });
    cmd->add_option("--levels", o.levels, "override the top refinement level")
        ->each([&](const std::string&) { o.levels_set = true; });
    cmd->add_option("--cap", o.cap, "override the net member cap")
        ->each([&](const std::string&) { o.cap_set = true; });
    cmd->add_option("--threads", o.threads, "worker threads (0 = auto)")
        ->each([&](const std::string&) { o.threads_set = true; });
}

bpl::Json config_with_overrides(const CommonOpts& o, const std::string& expected_kind,
                                bool apply_overrides) {
    bpl::Json cfg = bpl::load_config(o.config_path);
    const std::string kind = cfg.at("experiment").get<std::string>();
    if (!expected_kind.empty() && kind != expected_kind)
        bpl::fail(bpl::ErrorKind::Config,
                  "config declares experiment '" + kind + "', expected '" + expected_kind + "'");
    if (apply_overrides) {
        if (o.seed_set) cfg["seed"] = o.seed;
        if (o.threads_set) cfg["threads"] = o.threads;
        if (o.levels_set && cfg.contains("levels")) cfg["levels"]["hi"] = o.levels;
        if (o.cap_set && cfg.contains("net")) cfg["net"]["cap"] = o.cap;
    }
    return cfg;
}

int run_from_config(const CommonOpts& o, const std::string& expected_kind,
                    bool apply_overrides = true) {
    bpl::Json cfg = config_with_overrides(o, expected_kind, apply_overrides);
    bpl::Json report = bpl::run_experiment(cfg, o.out_dir);
    std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Besov-ball process laboratory"};
    app.require_subcommand(1);

    CommonOpts norm_o, part_o, net_o, entropy_o, witness_o, gp_o, emp_o, env_o, replay_o;

    auto* c_norm = app.add_subcommand("norm", "Besov norms of a built-in test function");
    add_common(c_norm, norm_o, true);
    auto* c_part = app.add_subcommand("partition", "dump the dyadic multiplier family");
    add_common(c_part, part_o, true);
    auto* c_net = app.add_subcommand("net", "build a unit-ball net and its manifest");
    add_common(c_net, net_o, true);
    auto* c_entropy = app.add_subcommand("entropy", "covering-number curve and exponent fit");
    add_common(c_entropy, entropy_o, true);
    auto* c_witness = app.add_subcommand("witness", "log-log blow-up witness diagnostics");
    add_common(c_witness, witness_o, true);
    auto* c_gp = app.add_subcommand("gp", "Gaussian supremum across nested nets");
    add_common(c_gp, gp_o, true);
    auto* c_emp = app.add_subcommand("emp", "empirical process supremum quantiles");
    add_common(c_emp, emp_o, true);
    auto* c_env = app.add_subcommand("envelope", "scaled envelope tail across family sizes");
    add_common(c_env, env_o, true);

    // classify takes either a config or inline parameters
    std::string cls_config;
    double cls_s = 1.0, cls_p = 2.0, cls_q = 2.0, cls_delta = 0.0;
    int cls_d = 1;
    std::string cls_measure = "any";
    auto* c_cls = app.add_subcommand("classify", "decision table for (s,p,q,d) and a measure class");
    c_cls->add_option("--config", cls_config, "experiment config (JSON)");
    c_cls->add_option("--s", cls_s, "smoothness");
    c_cls->add_option("--p", cls_p, "integrability index");
    c_cls->add_option("--q", cls_q, "fine index");
    c_cls->add_option("--d", cls_d, "dimension");
    c_cls->add_option("--measure-class", cls_measure,
                      "any|thm4|weight_bounded_density|bounded_density_lower_bounded|bounded_density");
    c_cls->add_option("--delta", cls_delta, "tail exponent for the thm4 class");

    auto* c_replay = app.add_subcommand("replay", "re-run a shipped config byte-for-byte");
    add_common(c_replay, replay_o, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_norm->parsed()) return run_from_config(norm_o, "norm");
        if (c_part->parsed()) return run_from_config(part_o, "partition");
        if (c_net->parsed()) return run_from_config(net_o, "net");
        if (c_entropy->parsed()) return run_from_config(entropy_o, "entropy");
        if (c_witness->parsed()) return run_from_config(witness_o, "witness");
        if (c_gp->parsed()) return run_from_config(gp_o, "gp");
        if (c_emp->parsed()) return run_from_config(emp_o, "emp");
        if (c_env->parsed()) return run_from_config(env_o, "envelope");
        if (c_replay->parsed()) return run_from_config(replay_o, "", /*apply_overrides=*/false);
        if (c_cls->parsed()) {
            bpl::Json cfg;
            if (!cls_config.empty()) {
                cfg = bpl::load_config(cls_config);
            } else {
                cfg["bpl_schema"] = 1;
                cfg["experiment"] = "classify";
                cfg["besov"] = {{"s", cls_s}, {"p", cls_p}, {"q", cls_q}, {"d", cls_d}};
                bpl::Json mc;
                mc["kind"] = cls_measure;
                if (cls_measure == "thm4") mc["delta"] = cls_delta;
                cfg["measure_class"] = mc;
            }
            std::cout << bpl::run_classify_config(cfg).dump(2) << "\n";
            return 0;
        }
    } catch (const bpl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bpl::exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
