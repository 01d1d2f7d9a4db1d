#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bpl/fft.hpp"
#include "bpl/grid.hpp"

namespace bpl {

// Smoothness/integrability/fine-index triple. p and q accept kInfOrder.
struct BesovParams {
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;
    int dim = 1;
};

BesovParams make_besov_params(double s, double p, double q, int dim);

enum class CutoffProfile {
    SmoothExp,   // C^inf glue built from exp(-1/t)
    CosineStep,  // cos^2 ramp between the two plateaus
};

// C^inf monotone step built from exp(-1/t): 0 for t <= 0, 1 for t >= 1
double smooth_step01(double t);

// value of the generating cutoff: 1 on r <= 1, 0 on r >= 3/2
double cutoff_phi0(CutoffProfile profile, double r);

// Dyadic multiplier family phi_0, ..., phi_{k_max} sampled on the frequency
// lattice. Values are evaluated on demand from the radial profile; k_max is
// the largest block whose annulus fits under the Nyquist cutoff.
struct DyadicPartition {
    GridSpec spec;
    CutoffProfile profile = CutoffProfile::SmoothExp;
    int k_max = 0;

    // phi_k at radial frequency r
    double multiplier(int k, double r) const;
    // sampled values over the whole frequency lattice (for dumps/tests)
    std::vector<double> multiplier_values(int k) const;
    // frequency above which blocks are dropped, 2^{k_max-1}
    double retained_band() const { return std::ldexp(1.0, k_max - 1); }
};

DyadicPartition make_dyadic_partition(const GridSpec& spec,
                                      CutoffProfile profile = CutoffProfile::SmoothExp);

// write (k, |xi|, phi_k) rows for inspection
void write_partition_csv(const DyadicPartition& part, const std::string& path);

// frequency-block piece Re F^{-1}(phi_k F f); the imaginary residual must be
// negligible for real input (real radial multiplier)
GridFunction littlewood_paley_block(const GridFunction& f, const DyadicPartition& part,
                                    int k, double* imag_residual = nullptr);

// relative spectral mass above the retained band
double spectral_tail_fraction(const GridFunction& f, const DyadicPartition& part);

struct BlockNorms {
    std::vector<double> lp;       // lp norm of each block, k = 0..k_max
    double tail_fraction = 0.0;   // spectral mass above the retained band
    double max_imag_residual = 0.0;
};

// all block norms with one forward transform
BlockNorms block_lp_norms(const GridFunction& f, const DyadicPartition& part, double p);

// l^q over k of 2^{ks} ||block_k||_p, truncated at k_max; requires the
// spectral tail below 1e-8 of total mass
double besov_norm(const GridFunction& f, const BesovParams& params,
                  const DyadicPartition& part);

// (s=0, p=2, q) norm of f * <x>^{-gamma}
double weighted_b0_norm(const GridFunction& f, double gamma, double q,
                        const DyadicPartition& part);

// cyclic lattice shift by whole cells per axis; the shifted function must
// keep its mass inside [-L/2, L/2]^d
GridFunction translate(const GridFunction& f, std::span<const long> shift_cells);

// extremes of besov_norm_a / besov_norm_b over a function set
std::pair<double, double> norm_equivalence_ratio(std::span<const GridFunction> fs,
                                                 const DyadicPartition& part_a,
                                                 const DyadicPartition& part_b,
                                                 const BesovParams& params);

}  // namespace bpl
