#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "bpl/classify.hpp"
#include "bpl/entropy.hpp"
#include "bpl/processes.hpp"

namespace bpl {

using Json = nlohmann::ordered_json;

// Versioned experiment configuration ("bpl_schema": 1). One experiment kind
// per config; see configs/ for shipped examples.
Json load_config(const std::string& path);

// Dispatches on config["experiment"], writes CSV artifacts and report.json
// under out_dir, and returns the report. Identical config + seed reproduces
// byte-identical CSV output.
Json run_experiment(const Json& config, const std::string& out_dir);

// Typed pieces reused by the dispatcher and by the acceptance suite.
struct EntropyRun {
    EntropyCurve curve;
    double predicted = 0.0;
    Classification cls;
    Json report;
};
EntropyRun run_entropy(const Json& config, const std::string& out_dir);

struct GpLevelRow {
    int level = 0;
    std::size_t members = 0;
    double mean_sup_g = 0.0, se_g = 0.0;
    double mean_sup_l = 0.0, se_l = 0.0;
    double sudakov = 0.0;
};
struct GpRun {
    std::vector<GpLevelRow> levels;
    Classification cls;
    Json report;
};
GpRun run_gp(const Json& config, const std::string& out_dir);

struct EnvelopeSizeRow {
    std::size_t family_size = 0;
    double fixed_t = 0.0;           // frozen threshold from the smallest family
    double scaled_tail_fixed = 0.0; // t0^2 * P_hat(M > t0)
    double own_q99 = 0.0;           // family's own 99th-percentile envelope
    double scaled_tail_own = 0.0;   // q99^2 * P_hat(M > q99)
};
struct EnvelopeRun {
    std::vector<EnvelopeSizeRow> rows;
    Json report;
};
EnvelopeRun run_envelope(const Json& config, const std::string& out_dir);

struct WitnessRun {
    double norm_at_depth = 0.0;
    double norm_at_double_depth = 0.0;
    double norm_q1_at_depth = 0.0;
    double norm_q1_at_double_depth = 0.0;
    double min_probe_ratio = 0.0;  // min over probes of psi(x_m)/log(m/k0)
    Json report;
};
WitnessRun run_witness(const Json& config, const std::string& out_dir);

struct EmpRun {
    EmpiricalSupStats stats;
    Json report;
};
EmpRun run_emp(const Json& config, const std::string& out_dir);

Json run_classify_config(const Json& config);

// shared parsers (configs and tests)
GridSpec parse_grid(const Json& j);
BesovParams parse_besov(const Json& j);
MeasurePtr parse_measure(const Json& j, const GridSpec& spec);
MeasureClassSpec measure_class_of(const Json& measure_json);
std::vector<double> parse_log_grid(const Json& j, bool descending);
Json classification_json(const Classification& c);

// trend wording helper; reports never claim proofs
std::string consistency_phrase(bool consistent, const std::string& verdict);

}  // namespace bpl
