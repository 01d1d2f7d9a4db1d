#include "bpl/besov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bpl {

namespace {

double glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double smooth_step01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = glue(t), b = glue(1.0 - t);
    return a / (a + b);
}

BesovParams make_besov_params(double s, double p, double q, int dim) {
    if (!(p >= 1.0)) fail(ErrorKind::Parameter, "besov p must be >= 1");
    if (!(q >= 1.0)) fail(ErrorKind::Parameter, "besov q must be >= 1");
    if (dim != 1 && dim != 2) fail(ErrorKind::Parameter, "besov dim must be 1 or 2");
    if (!std::isfinite(s)) fail(ErrorKind::Parameter, "besov s must be finite");
    return BesovParams{s, p, q, dim};
}

double cutoff_phi0(CutoffProfile profile, double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 1.5) return 0.0;
    switch (profile) {
        case CutoffProfile::SmoothExp:
            return smooth_step01((1.5 - r) * 2.0);
        case CutoffProfile::CosineStep: {
            double c = std::cos(M_PI * (r - 1.0));
            return c * c;
        }
    }
    return 0.0;
}

double DyadicPartition::multiplier(int k, double r) const {
    if (k < 0 || k > k_max) fail(ErrorKind::Parameter, "block index out of range");
    if (k == 0) return cutoff_phi0(profile, r);
    // phi_k(xi) = phi_0(2^{-k} xi) - phi_0(2^{-k+1} xi)
    return cutoff_phi0(profile, std::ldexp(r, -k)) -
           cutoff_phi0(profile, std::ldexp(r, -k + 1));
}

std::vector<double> DyadicPartition::multiplier_values(int k) const {
    FrequencyGrid fg(spec);
    std::vector<double> out(spec.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = multiplier(k, fg.norm(i));
    return out;
}

DyadicPartition make_dyadic_partition(const GridSpec& spec, CutoffProfile profile) {
    const double cutoff = spec.nyquist();
    if (cutoff < 3.0)
        fail(ErrorKind::Resolution, "grid too coarse: Nyquist cutoff below the first annulus");
    int k_max = 1;
    while (3.0 * std::ldexp(1.0, k_max) <= cutoff) ++k_max;  // 3*2^{k-1} <= cutoff
    return DyadicPartition{spec, profile, k_max};
}

void write_partition_csv(const DyadicPartition& part, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(ErrorKind::Io, "cannot open " + path);
    std::fprintf(fp, "k,xi,phi\n");
    FrequencyGrid fg(part.spec);
    for (int k = 0; k <= part.k_max; ++k)
        for (std::size_t i = 0; i < part.spec.size(); ++i) {
            double r = fg.norm(i);
            std::fprintf(fp, "%d,%.17g,%.17g\n", k, r, part.multiplier(k, r));
        }
    std::fclose(fp);
}

GridFunction littlewood_paley_block(const GridFunction& f, const DyadicPartition& part,
                                    int k, double* imag_residual) {
    if (!(f.spec == part.spec)) fail(ErrorKind::Shape, "function and partition grids differ");
    if (k < 0 || k > part.k_max) fail(ErrorKind::Parameter, "block index out of range");
    Spectrum spec = forward_fft(f);
    FrequencyGrid fg(f.spec);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= part.multiplier(k, fg.norm(i));
    double imag = 0.0;
    GridFunction block = inverse_fft_real(f.spec, spec, &imag);
    double block_l2 = lp_norm(block, 2.0);
    double f_l2 = lp_norm(f, 2.0);
    if (imag > 1e-10 * block_l2 + 1e-13 * f_l2)
        fail(ErrorKind::Degeneracy, "imaginary residual of a real block is too large", imag);
    if (imag_residual) *imag_residual = imag;
    return block;
}

double spectral_tail_fraction(const GridFunction& f, const DyadicPartition& part) {
    Spectrum spec = forward_fft(f);
    FrequencyGrid fg(f.spec);
    const double band = part.retained_band();
    double tail = 0.0, total = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double m = std::norm(spec[i]);
        total += m;
        if (fg.norm(i) > band) tail += m;
    }
    return total == 0.0 ? 0.0 : tail / total;
}

BlockNorms block_lp_norms(const GridFunction& f, const DyadicPartition& part, double p) {
    if (!(f.spec == part.spec)) fail(ErrorKind::Shape, "function and partition grids differ");
    Spectrum spec = forward_fft(f);
    FrequencyGrid fg(f.spec);
    const std::size_t n = spec.size();

    std::vector<double> radii(n);
    double tail = 0.0, total = 0.0;
    const double band = part.retained_band();
    for (std::size_t i = 0; i < n; ++i) {
        radii[i] = fg.norm(i);
        double m = std::norm(spec[i]);
        total += m;
        if (radii[i] > band) tail += m;
    }

    BlockNorms out;
    out.tail_fraction = total == 0.0 ? 0.0 : tail / total;
    out.lp.resize(part.k_max + 1);
    const double f_l2 = std::sqrt(total * f.spec.cell_volume() / static_cast<double>(n));

    Spectrum scratch(n);
    for (int k = 0; k <= part.k_max; ++k) {
        for (std::size_t i = 0; i < n; ++i) scratch[i] = spec[i] * part.multiplier(k, radii[i]);
        double imag = 0.0;
        GridFunction block = inverse_fft_real(f.spec, scratch, &imag);
        double block_l2 = lp_norm(block, 2.0);
        if (imag > 1e-10 * block_l2 + 1e-13 * f_l2)
            fail(ErrorKind::Degeneracy, "imaginary residual of a real block is too large", imag);
        // relative residual is only meaningful for numerically present blocks
        if (block_l2 > 1e-8 * f_l2)
            out.max_imag_residual = std::max(out.max_imag_residual, imag / block_l2);
        out.lp[k] = p == 2.0 ? block_l2 : lp_norm(block, p);
    }
    return out;
}

namespace {

double aggregate_lq(std::span<const double> terms, double q) {
    if (q == kInfOrder) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double m = 0.0;
    for (double t : terms) m = std::max(m, t);
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double t : terms) s += std::pow(t / m, q);
    return m * std::pow(s, 1.0 / q);
}

}  // namespace

double besov_norm(const GridFunction& f, const BesovParams& params,
                  const DyadicPartition& part) {
    if (params.dim != f.spec.dim) fail(ErrorKind::Parameter, "besov dim does not match grid");
    BlockNorms bn = block_lp_norms(f, part, params.p);
    if (bn.tail_fraction > 1e-8)
        fail(ErrorKind::Truncation,
             "spectral mass above the retained band exceeds 1e-8 of total",
             bn.tail_fraction);
    std::vector<double> terms(bn.lp.size());
    for (std::size_t k = 0; k < terms.size(); ++k)
        terms[k] = std::pow(2.0, static_cast<double>(k) * params.s) * bn.lp[k];
    return aggregate_lq(terms, params.q);
}

double weighted_b0_norm(const GridFunction& f, double gamma, double q,
                        const DyadicPartition& part) {
    GridFunction g = apply_polynomial_weight(f, -gamma);
    return besov_norm(g, make_besov_params(0.0, 2.0, q, f.spec.dim), part);
}

GridFunction translate(const GridFunction& f, std::span<const long> shift_cells) {
    if (static_cast<int>(shift_cells.size()) != f.spec.dim)
        fail(ErrorKind::Parameter, "shift must provide one cell count per axis");
    const int n = f.spec.points_per_axis;
    auto wrap = [n](long i) {
        long r = i % n;
        return r < 0 ? r + n : r;
    };
    GridFunction g = GridFunction::zeros(f.spec);
    if (f.spec.dim == 1) {
        for (long j = 0; j < n; ++j) g.values[wrap(j + shift_cells[0])] = f.values[j];
    } else {
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                g.values[f.spec.flatten(static_cast<int>(wrap(i + shift_cells[0])),
                                        static_cast<int>(wrap(j + shift_cells[1])))] =
                    f.values[f.spec.flatten(static_cast<int>(i), static_cast<int>(j))];
    }
    if (mass_outside_core(g) > 1e-8)
        fail(ErrorKind::Domain, "translated support leaves the safe core [-L/2, L/2]^d");
    return g;
}

std::pair<double, double> norm_equivalence_ratio(std::span<const GridFunction> fs,
                                                 const DyadicPartition& part_a,
                                                 const DyadicPartition& part_b,
                                                 const BesovParams& params) {
    if (fs.empty()) fail(ErrorKind::Parameter, "empty function set");
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& f : fs) {
        double na = besov_norm(f, params, part_a);
        double nb = besov_norm(f, params, part_b);
        if (na == 0.0 && nb == 0.0) continue;  // zero function carries no ratio
        if (nb == 0.0) fail(ErrorKind::Degeneracy, "zero denominator in equivalence ratio");
        double r = na / nb;
        if (!any) {
            lo = hi = r;
            any = true;
        } else {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    if (!any) fail(ErrorKind::Parameter, "function set contains only zero functions");
    return {lo, hi};
}

}  // namespace bpl
