#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpl/besov.hpp"
#include "bpl/grid.hpp"
#include "bpl/rng.hpp"

namespace bpl {

// ---------------------------------------------------------------------------
// Atoms and dictionaries
// ---------------------------------------------------------------------------

// C^inf bump exp(-1/(1-u^2)) rescaled to peak value 1, u = |x-center|/scale
GridFunction bump_atom(const GridSpec& spec, std::span<const double> center, double scale);

// flat-top radial profile: 1 on r <= 1/2, C^inf decay to 0 at r = 1
double flat_top_bump(double r);

// Dictionary of reusable atoms (d=1). Atoms are stored over a dense window
// [start, start+window.size()) of the flat lattice; windows never wrap.
struct NetDictionary {
    GridSpec spec;
    struct Atom {
        std::size_t start = 0;
        std::vector<double> window;
        double besov_cert = 0.0;  // besov norm of the atom under the net params
        double l2 = 0.0;
    };
    std::vector<Atom> atoms;

    double eval(std::size_t atom, std::size_t flat) const {
        const Atom& a = atoms[atom];
        return flat >= a.start && flat < a.start + a.window.size()
                   ? a.window[flat - a.start]
                   : 0.0;
    }
};

using AtomCoeff = std::pair<std::uint32_t, double>;
using SparseMember = std::vector<AtomCoeff>;

// ---------------------------------------------------------------------------
// FunctionNet: finite subset of the unit-ball surrogate
// ---------------------------------------------------------------------------

// One of three member representations:
//   - dictionary + sparse coefficients (experiment nets)
//   - explicit grid functions (small nets, d=2)
//   - cyclic translates of a single base function
struct FunctionNet {
    BesovParams params;
    int level = 0;
    std::uint64_t seed = 0;
    std::size_t cap = 0;
    std::string note;  // documents enumeration/subsampling rule
    std::vector<double> certificates;

    std::shared_ptr<const NetDictionary> dict;
    std::vector<SparseMember> coeff_members;

    std::vector<GridFunction> value_members;

    std::optional<GridFunction> translate_base;
    std::vector<long> shift_members;  // cells, d=1

    std::size_t size() const;
    const GridSpec& grid() const;
    GridFunction materialize(std::size_t i) const;
    double eval_member(std::size_t i, std::size_t flat) const;

    static FunctionNet from_values(const BesovParams& params, std::vector<GridFunction> members,
                                   std::vector<double> certificates);
};

// serialize: JSON manifest plus optional binary dumps of every member
void save_net(const FunctionNet& net, const std::string& dir, bool dump_functions);

// ---------------------------------------------------------------------------
// Random ball elements (process experiments)
// ---------------------------------------------------------------------------

// random band-limited block component, unit p-norm, supported (numerically)
// in [-L/4, L/4]
GridFunction make_block_component(const GridSpec& spec, const DyadicPartition& part,
                                  int k, double p, Rng& rng);

// f = sum_k 2^{-ks} w_k b_k rescaled by its certified norm; weights w live on
// the l^q unit sphere
GridFunction make_ball_element(const BesovParams& params, const DyadicPartition& part,
                               std::span<const double> weights,
                               std::span<const GridFunction> components,
                               double* certificate = nullptr);

GridFunction sample_ball_element(const BesovParams& params, const DyadicPartition& part,
                                 std::uint64_t seed, int max_block = -1,
                                 double* certificate = nullptr);

// ---------------------------------------------------------------------------
// Deterministic nets
// ---------------------------------------------------------------------------

// Per-block coefficient-lattice net: one centered band atom per block
// k <= level, coefficients on the step-2^{-level} lattice inside the norm
// budget. Exceeding the cap with subsampling disabled is an error.
FunctionNet build_net(const BesovParams& params, const DyadicPartition& part, int level,
                      std::size_t cap = 4096, std::uint64_t seed = 1,
                      bool allow_subsample = true);

// singles ladder over translated bumps with dyadically scaled coefficients
// (decay-driven entropy geometry)
struct BumpLinePlan {
    double scale = 4.0;
    double spacing = 8.0;
    double max_radius = 512.0;
    int coeff_levels = 2;       // dyadic coefficient layers per position
    int quant_level = 8;        // coefficients quantized to 2^{-quant_level}
};
FunctionNet build_bump_line_net(const BesovParams& params, const DyadicPartition& part,
                                const BumpLinePlan& plan, std::size_t cap, std::uint64_t seed);

// singles ladder over lattice harmonics (smoothness-driven entropy geometry)
struct FrequencyLadderPlan {
    double xi_max = 1000.0;
    int stride = 1;             // keep every stride-th lattice frequency
    int quant_level = 12;
};
FunctionNet build_frequency_ladder_net(const BesovParams& params, const DyadicPartition& part,
                                       const FrequencyLadderPlan& plan, std::size_t cap,
                                       std::uint64_t seed);

// sign-pattern codebooks over dyadic position radii plus a singles stratum
// (combinatorial packing geometry for p > 2 measures)
struct SignCodePlan {
    double scale = 4.0;
    double spacing = 8.0;
    double radius_min = 16.0;
    double radius_max = 1024.0;
    double radius_factor = 2.0;  // stratum radius progression
    double codes_per_dim = 2.0;  // stratum budget proportional to atom count
    int quant_level = 10;
    int singles_levels = 2;
};
FunctionNet build_sign_code_net(const BesovParams& params, const DyadicPartition& part,
                                const SignCodePlan& plan, std::size_t cap, std::uint64_t seed);

// nested random-sample nets for process experiments; level l draws
// members_per_level new elements band-limited to blocks <= l
std::vector<FunctionNet> build_ball_sample_levels(const BesovParams& params,
                                                  const DyadicPartition& part,
                                                  int level_lo, int level_hi,
                                                  std::size_t members_per_level,
                                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Log-log witness
// ---------------------------------------------------------------------------

struct WitnessSpec {
    int base_index = 3;  // k0
    int depth = 8;       // K
};

// raw lacunary series sum_{k=k0}^{K} (1/k) g(2^k x) with the flat-top bump g
GridFunction witness_partial_sum(const WitnessSpec& ws, const GridSpec& spec);

struct WitnessResult {
    GridFunction psi;     // raw series
    double certificate;   // besov norm under the requested params
};

// requires q > 1 and s = d/p; depth must fit the grid resolution
WitnessResult build_log_log_witness(const WitnessSpec& ws, const GridSpec& spec,
                                    const BesovParams& params, const DyadicPartition& part);

// family {psi(. - z_i)} over nested dyadic shifts spanning span_cells;
// psi must be normalized (besov norm <= 1)
FunctionNet build_translate_family(const GridFunction& psi, std::size_t count,
                                   const BesovParams& params, const DyadicPartition& part,
                                   long span_cells);

}  // namespace bpl
