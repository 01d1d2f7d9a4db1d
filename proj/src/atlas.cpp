#include "bpl/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace bpl {

namespace {

using json = nlohmann::ordered_json;

double quantize_down(double v, double step) {
    return std::floor(std::abs(v) / step) * step * (v < 0 ? -1.0 : 1.0);
}

// tight window around the numerically nonzero part of a d=1 function
NetDictionary::Atom make_window_atom(const GridFunction& f, double cert) {
    const auto& v = f.values;
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    std::size_t lo = 0, hi = v.size();
    const double thr = peak * 1e-12;
    while (lo < hi && std::abs(v[lo]) <= thr) ++lo;
    while (hi > lo && std::abs(v[hi - 1]) <= thr) --hi;
    NetDictionary::Atom a;
    a.start = lo;
    a.window.assign(v.begin() + lo, v.begin() + hi);
    a.besov_cert = cert;
    a.l2 = lp_norm(f, 2.0);
    return a;
}

// spectrum-side filter: multiply by fn(|xi|) and return the real field
GridFunction radial_filter(const GridFunction& f,
                           const std::function<double(double)>& fn) {
    Spectrum s = forward_fft(f);
    FrequencyGrid fg(f.spec);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= fn(fg.norm(i));
    return inverse_fft_real(f.spec, s);
}

double sup_abs(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

void scale_in_place(GridFunction& f, double c) {
    for (double& v : f.values) v *= c;
}

}  // namespace

GridFunction bump_atom(const GridSpec& spec, std::span<const double> center, double scale) {
    if (static_cast<int>(center.size()) != spec.dim)
        fail(ErrorKind::Parameter, "bump center must match the grid dimension");
    if (!(scale > 0.0)) fail(ErrorKind::Parameter, "bump scale must be positive");
    for (double c : center)
        if (std::abs(c) + scale > spec.half_width / 2.0)
            fail(ErrorKind::Domain, "bump support leaves the safe core [-L/2, L/2]^d");
    return GridFunction::sample(spec, [&](std::array<double, 2> p) {
        double u2 = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
            double u = (p[a] - center[a]) / scale;
            u2 += u * u;
        }
        if (u2 >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u2));
    });
}

double flat_top_bump(double r) {
    r = std::abs(r);
    if (r <= 0.5) return 1.0;
    if (r >= 1.0) return 0.0;
    return smooth_step01((1.0 - r) * 2.0);
}

// ---------------------------------------------------------------------------
// FunctionNet
// ---------------------------------------------------------------------------

std::size_t FunctionNet::size() const {
    if (dict) return coeff_members.size();
    if (translate_base) return shift_members.size();
    return value_members.size();
}

const GridSpec& FunctionNet::grid() const {
    if (dict) return dict->spec;
    if (translate_base) return translate_base->spec;
    if (value_members.empty()) fail(ErrorKind::Parameter, "empty net has no grid");
    return value_members.front().spec;
}

GridFunction FunctionNet::materialize(std::size_t i) const {
    if (dict) {
        GridFunction f = GridFunction::zeros(dict->spec);
        for (const auto& [a, c] : coeff_members[i]) {
            const auto& atom = dict->atoms[a];
            for (std::size_t j = 0; j < atom.window.size(); ++j)
                f.values[atom.start + j] += c * atom.window[j];
        }
        return f;
    }
    if (translate_base) {
        long s[1] = {shift_members[i]};
        return translate(*translate_base, s);
    }
    return value_members[i];
}

double FunctionNet::eval_member(std::size_t i, std::size_t flat) const {
    if (dict) {
        double v = 0.0;
        for (const auto& [a, c] : coeff_members[i]) v += c * dict->eval(a, flat);
        return v;
    }
    if (translate_base) {
        const int n = translate_base->spec.points_per_axis;
        long j = static_cast<long>(flat) - shift_members[i];
        j %= n;
        if (j < 0) j += n;
        return translate_base->values[static_cast<std::size_t>(j)];
    }
    return value_members[i].values[flat];
}

FunctionNet FunctionNet::from_values(const BesovParams& params,
                                     std::vector<GridFunction> members,
                                     std::vector<double> certificates) {
    FunctionNet net;
    net.params = params;
    net.value_members = std::move(members);
    net.certificates = std::move(certificates);
    net.note = "explicit member list";
    return net;
}

void save_net(const FunctionNet& net, const std::string& dir, bool dump_functions) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json manifest;
    manifest["params"] = {{"s", net.params.s},
                          {"p", net.params.p},
                          {"q", net.params.q},
                          {"d", net.params.dim}};
    manifest["level"] = net.level;
    manifest["seed"] = net.seed;
    manifest["cap"] = net.cap;
    manifest["count"] = net.size();
    manifest["note"] = net.note;
    manifest["certificates"] = net.certificates;
    std::ofstream out(dir + "/manifest.json");
    out << manifest.dump(2) << "\n";
    if (dump_functions) {
        char name[64];
        for (std::size_t i = 0; i < net.size(); ++i) {
            std::snprintf(name, sizeof(name), "/fn_%05zu.bgf", i);
            write_grid_binary(net.materialize(i), dir + name);
        }
    }
}

// ---------------------------------------------------------------------------
// Random ball elements
// ---------------------------------------------------------------------------

GridFunction make_block_component(const GridSpec& spec, const DyadicPartition& part,
                                  int k, double p, Rng& rng) {
    // white noise shaped by a smooth box on [-L/4, L/4], band-passed, then
    // re-windowed so the support stays inside the safe core exactly; the
    // second window re-spreads the spectrum only far below the retained band
    const double L = spec.half_width;
    const double edge = L / 16.0;
    std::vector<double> window(spec.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        auto pt = spec.point(i);
        double w = 1.0;
        for (int a = 0; a < spec.dim; ++a)
            w *= smooth_step01((pt[a] + L / 4.0) / edge) *
                 smooth_step01((L / 4.0 - pt[a]) / edge);
        window[i] = w;
    }
    GridFunction noise = GridFunction::zeros(spec);
    for (std::size_t i = 0; i < noise.values.size(); ++i)
        noise.values[i] = window[i] == 0.0 ? 0.0 : window[i] * rng.normal();
    GridFunction comp = radial_filter(noise, [&](double r) { return part.multiplier(k, r); });
    for (std::size_t i = 0; i < comp.values.size(); ++i) comp.values[i] *= window[i];
    // final low-pass strictly inside the retained band: kills the window's
    // spectral re-spread exactly while spreading support only at the kernel
    // scale, far below the core margin
    const double cut = part.retained_band() * 2.0 / 3.0;
    comp = radial_filter(comp, [&](double r) {
        return cutoff_phi0(CutoffProfile::SmoothExp, r / cut);
    });
    double n = lp_norm(comp, p);
    if (n > 0.0) scale_in_place(comp, 1.0 / n);
    return comp;
}

GridFunction make_ball_element(const BesovParams& params, const DyadicPartition& part,
                               std::span<const double> weights,
                               std::span<const GridFunction> components,
                               double* certificate) {
    if (weights.size() != components.size())
        fail(ErrorKind::Parameter, "weights and components must align");
    if (components.empty()) fail(ErrorKind::Parameter, "no components given");
    GridFunction f = GridFunction::zeros(components[0].spec);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        double scale = std::pow(2.0, -params.s * static_cast<double>(k)) * weights[k];
        for (std::size_t i = 0; i < f.values.size(); ++i)
            f.values[i] += scale * components[k].values[i];
    }
    double cert = besov_norm(f, params, part);
    if (cert > 0.0) {
        scale_in_place(f, 1.0 / (cert * (1.0 + 1e-9)));
        cert = 1.0 / (1.0 + 1e-9);
    }
    if (certificate) *certificate = cert;
    return f;
}

GridFunction sample_ball_element(const BesovParams& params, const DyadicPartition& part,
                                 std::uint64_t seed, int max_block, double* certificate) {
    Rng rng(seed);
    int top = max_block < 0 ? part.k_max - 3 : std::min(max_block, part.k_max - 3);
    if (top < 0) fail(ErrorKind::Resolution, "grid too coarse for any ball component");
    std::vector<GridFunction> comps;
    comps.reserve(top + 1);
    for (int k = 0; k <= top; ++k)
        comps.push_back(make_block_component(part.spec, part, k, params.p, rng));
    // random point of the l^q unit sphere
    std::vector<double> w(top + 1);
    for (auto& x : w) x = std::abs(rng.normal());
    double norm = 0.0;
    if (params.q == kInfOrder) {
        for (double x : w) norm = std::max(norm, x);
    } else {
        for (double x : w) norm += std::pow(x, params.q);
        norm = std::pow(norm, 1.0 / params.q);
    }
    if (norm > 0.0)
        for (auto& x : w) x /= norm;
    return make_ball_element(params, part, w, comps, certificate);
}

// ---------------------------------------------------------------------------
// Dictionary helpers
// ---------------------------------------------------------------------------

namespace {

// centered band atom for block k: bump modulated into the k-th annulus and
// then filtered to it exactly; normalized to unit p-norm
GridFunction centered_block_atom(const GridSpec& spec, const DyadicPartition& part,
                                 int k, double p) {
    const double L = spec.half_width;
    const double scale = std::max(L / 8.0 * std::pow(2.0, -k), 4.0 * spec.step());
    GridFunction raw = GridFunction::sample(spec, [&](std::array<double, 2> pt) {
        double u2 = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
            double u = pt[a] / scale;
            u2 += u * u;
        }
        double env = u2 >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - u2));
        if (k == 0) return env;
        double xi = 0.875 * std::ldexp(1.0, k);
        return env * std::cos(xi * pt[0]);
    });
    GridFunction atom = radial_filter(raw, [&](double r) { return part.multiplier(k, r); });
    double n = lp_norm(atom, p);
    if (!(n > 0.0)) fail(ErrorKind::Resolution, "block atom vanished after filtering");
    scale_in_place(atom, 1.0 / n);
    return atom;
}

SparseMember prune_zero(const SparseMember& m) {
    SparseMember out;
    for (const auto& ac : m)
        if (ac.second != 0.0) out.push_back(ac);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// build_net: per-block coefficient lattice (one atom per block)
// ---------------------------------------------------------------------------

FunctionNet build_net(const BesovParams& params, const DyadicPartition& part, int level,
                      std::size_t cap, std::uint64_t seed, bool allow_subsample) {
    if (level < 1) fail(ErrorKind::Parameter, "net level must be >= 1");
    const GridSpec& spec = part.spec;
    if (spec.dim != 1) fail(ErrorKind::Parameter, "dictionary nets are d=1 only");
    const int top = std::min(level, part.k_max - 2);
    if (top < 0) fail(ErrorKind::Resolution, "grid too coarse for any usable block");

    auto dict = std::make_shared<NetDictionary>();
    dict->spec = spec;
    std::vector<double> beta;  // per-atom besov certificate
    for (int k = 0; k <= top; ++k) {
        GridFunction atom = centered_block_atom(spec, part, k, params.p);
        double cert = besov_norm(atom, params, part);
        dict->atoms.push_back(make_window_atom(atom, cert));
        beta.push_back(cert);
    }

    const double tau = std::pow(2.0, -level);
    const int dims = top + 1;
    std::vector<long> radius(dims);
    double count_estimate = 1.0;
    for (int k = 0; k < dims; ++k) {
        radius[k] = static_cast<long>(std::floor(1.0 / (beta[k] * tau)));
        count_estimate *= static_cast<double>(2 * radius[k] + 1);
    }

    auto budget_ok = [&](const std::vector<long>& c) {
        if (params.q == kInfOrder) {
            for (int k = 0; k < dims; ++k)
                if (std::abs(c[k]) * tau * beta[k] > 1.0) return false;
            return true;
        }
        double s = 0.0;
        for (int k = 0; k < dims; ++k)
            s += std::pow(std::abs(c[k]) * tau * beta[k], params.q);
        return s <= 1.0;
    };
    auto to_member = [&](const std::vector<long>& c) {
        SparseMember m;
        for (int k = 0; k < dims; ++k)
            if (c[k] != 0) m.push_back({static_cast<std::uint32_t>(k),
                                        static_cast<double>(c[k]) * tau});
        return m;
    };

    std::vector<SparseMember> members;
    std::string note;
    const double enum_limit = 2e6;

    if (count_estimate <= enum_limit) {
        std::vector<SparseMember> all;
        std::vector<long> c(dims, 0);
        // odometer enumeration in canonical order
        for (int k = 0; k < dims; ++k) c[k] = -radius[k];
        while (true) {
            if (budget_ok(c)) all.push_back(to_member(c));
            int k = dims - 1;
            while (k >= 0 && c[k] == radius[k]) c[k--] = -radius[k];
            if (k < 0) break;
            ++c[k];
        }
        if (all.size() <= cap) {
            members = std::move(all);
            note = "full lattice enumeration";
        } else if (!allow_subsample) {
            fail(ErrorKind::Budget, "lattice enumeration exceeds the member cap",
                 static_cast<double>(all.size()));
        } else {
            // keep origin and singles, then a seeded uniform draw of the rest
            std::vector<SparseMember> rest;
            for (auto& m : all) {
                if (m.size() <= 1 && members.size() < cap)
                    members.push_back(m);
                else
                    rest.push_back(m);
            }
            Rng rng(seed);
            while (members.size() < cap && !rest.empty()) {
                std::size_t pick = rng.below(rest.size());
                members.push_back(rest[pick]);
                rest[pick] = rest.back();
                rest.pop_back();
            }
            note = "lattice enumeration, singles kept, seeded uniform subsample";
        }
    } else {
        if (!allow_subsample)
            fail(ErrorKind::Budget, "lattice too large to enumerate under the cap",
                 count_estimate);
        std::set<std::vector<long>> seen;
        std::vector<long> c(dims, 0);
        members.push_back({});  // origin
        seen.insert(c);
        // all single-axis lattice points first
        for (int k = 0; k < dims && members.size() < cap; ++k)
            for (long j = 1; j <= radius[k] && members.size() < cap; ++j)
                for (long sgn : {1L, -1L}) {
                    std::fill(c.begin(), c.end(), 0L);
                    c[k] = sgn * j;
                    if (budget_ok(c) && seen.insert(c).second)
                        members.push_back(to_member(c));
                }
        // seeded random mixtures on the lattice
        Rng rng(seed);
        std::size_t misses = 0;
        while (members.size() < cap && misses < 50 * cap) {
            std::vector<double> w(dims);
            double norm = 0.0;
            for (auto& x : w) x = rng.normal();
            for (double x : w)
                norm += params.q == kInfOrder ? 0.0 : std::pow(std::abs(x), params.q);
            if (params.q == kInfOrder) {
                for (double x : w) norm = std::max(norm, std::abs(x));
            } else {
                norm = std::pow(norm, 1.0 / params.q);
            }
            double u = std::pow(rng.uniform01(), 1.0 / dims);
            std::fill(c.begin(), c.end(), 0L);
            bool nonzero = false;
            for (int k = 0; k < dims; ++k) {
                double target = u * w[k] / (norm * beta[k]);
                c[k] = static_cast<long>(quantize_down(target, tau) / tau);
                nonzero |= c[k] != 0;
            }
            if (!nonzero || !budget_ok(c) || !seen.insert(c).second) {
                ++misses;
                continue;
            }
            members.push_back(to_member(c));
        }
        note = "stratified subsample: origin, singles, seeded lattice mixtures";
    }

    FunctionNet net;
    net.params = params;
    net.level = level;
    net.seed = seed;
    net.cap = cap;
    net.note = note;
    net.dict = dict;
    net.coeff_members = std::move(members);
    net.certificates.resize(net.coeff_members.size());
    for (std::size_t i = 0; i < net.coeff_members.size(); ++i) {
        auto& m = net.coeff_members[i];
        m = prune_zero(m);
        double cert;
        if (m.empty()) {
            cert = 0.0;
        } else if (m.size() == 1) {
            cert = std::abs(m[0].second) * beta[m[0].first];
        } else {
            cert = besov_norm(net.materialize(i), params, part);
        }
        if (cert > 1.0) {
            double scale = 1.0 / (cert * (1.0 + 1e-9));
            for (auto& ac : m) ac.second *= scale;
            cert *= scale;
        }
        net.certificates[i] = cert;
    }
    return net;
}

// ---------------------------------------------------------------------------
// Singles ladders and sign codes
// ---------------------------------------------------------------------------

namespace {

// low-pass filter that keeps everything below the retained band
GridFunction lowpass_bump(const GridSpec& spec, const DyadicPartition& part,
                          double center, double scale) {
    double c[1] = {center};
    GridFunction raw = bump_atom(spec, std::span<const double>(c, 1), scale);
    const int K = part.k_max - 2;
    if (K < 0) fail(ErrorKind::Resolution, "grid too coarse for low-pass atoms");
    const double inv = std::pow(2.0, -K);
    return radial_filter(raw, [&](double r) {
        return cutoff_phi0(CutoffProfile::SmoothExp, r * inv);
    });
}

double snap_to_lattice(const GridSpec& spec, double x) {
    double h = spec.step();
    return std::round((x + spec.half_width) / h) * h - spec.half_width;
}

}  // namespace

FunctionNet build_bump_line_net(const BesovParams& params, const DyadicPartition& part,
                                const BumpLinePlan& plan, std::size_t cap,
                                std::uint64_t seed) {
    const GridSpec& spec = part.spec;
    if (spec.dim != 1) fail(ErrorKind::Parameter, "bump-line nets are d=1 only");

    auto dict = std::make_shared<NetDictionary>();
    dict->spec = spec;

    // one certificate serves all positions (lattice-aligned translates)
    GridFunction proto = lowpass_bump(spec, part, 0.0, plan.scale);
    const double beta = besov_norm(proto, params, part);

    std::vector<double> centers;
    for (double x = 0.0; x <= plan.max_radius; x += plan.spacing) {
        centers.push_back(snap_to_lattice(spec, x));
        if (x > 0.0) centers.push_back(snap_to_lattice(spec, -x));
    }
    std::sort(centers.begin(), centers.end());
    for (double cx : centers) {
        long cells = static_cast<long>(std::llround(cx / spec.step()));
        long shift[1] = {cells};
        GridFunction atom = translate(proto, shift);
        dict->atoms.push_back(make_window_atom(atom, beta));
    }

    const double tau = std::pow(2.0, -plan.quant_level);
    const double top = 1.0 / beta;
    FunctionNet net;
    net.params = params;
    net.level = plan.quant_level;
    net.seed = seed;
    net.cap = cap;
    net.dict = dict;
    net.note = "single-position dyadic coefficient ladder";
    net.coeff_members.push_back({});  // zero member
    net.certificates.push_back(0.0);
    std::set<std::pair<std::uint32_t, long>> seen;
    for (std::uint32_t a = 0; a < dict->atoms.size(); ++a)
        for (int j = 0; j < plan.coeff_levels; ++j) {
            double mag = quantize_down(top * std::pow(2.0, -j), tau);
            long ticks = static_cast<long>(std::llround(mag / tau));
            if (ticks == 0) continue;
            for (long sgn : {1L, -1L}) {
                if (!seen.insert({a, sgn * ticks}).second) continue;
                net.coeff_members.push_back({{a, sgn * mag}});
                net.certificates.push_back(mag * beta);
            }
        }
    if (net.coeff_members.size() > cap)
        fail(ErrorKind::Budget, "bump-line net exceeds the member cap",
             static_cast<double>(net.coeff_members.size()));
    return net;
}

FunctionNet build_frequency_ladder_net(const BesovParams& params, const DyadicPartition& part,
                                       const FrequencyLadderPlan& plan, std::size_t cap,
                                       std::uint64_t seed) {
    const GridSpec& spec = part.spec;
    if (spec.dim != 1) fail(ErrorKind::Parameter, "frequency nets are d=1 only");
    if (plan.xi_max > part.retained_band())
        fail(ErrorKind::Truncation, "frequency ladder reaches above the retained band");

    const double dxi = M_PI / spec.half_width;
    const int m_max = static_cast<int>(plan.xi_max / dxi);
    auto dict = std::make_shared<NetDictionary>();
    dict->spec = spec;

    FunctionNet net;
    net.params = params;
    net.level = plan.quant_level;
    net.seed = seed;
    net.cap = cap;
    net.dict = dict;
    net.note = "lattice-harmonic singles ladder";
    net.coeff_members.push_back({});
    net.certificates.push_back(0.0);

    const double tau = std::pow(2.0, -plan.quant_level);
    const double l2 = std::sqrt(spec.half_width);  // ||cos(xi x)||_2 over the box
    for (int m = 1; m <= m_max; m += plan.stride) {
        double xi = dxi * m;
        for (int phase = 0; phase < 2; ++phase) {
            GridFunction h = GridFunction::sample(spec, [&](std::array<double, 2> p) {
                return (phase == 0 ? std::cos(xi * p[0]) : std::sin(xi * p[0])) / l2;
            });
            double cert = besov_norm(h, params, part);
            dict->atoms.push_back(make_window_atom(h, cert));
            double mag = quantize_down(1.0 / cert, tau);
            if (mag == 0.0) continue;
            std::uint32_t a = static_cast<std::uint32_t>(dict->atoms.size() - 1);
            for (double sgn : {1.0, -1.0}) {
                net.coeff_members.push_back({{a, sgn * mag}});
                net.certificates.push_back(mag * cert);
            }
        }
    }
    if (net.coeff_members.size() > cap)
        fail(ErrorKind::Budget, "frequency net exceeds the member cap",
             static_cast<double>(net.coeff_members.size()));
    return net;
}

FunctionNet build_sign_code_net(const BesovParams& params, const DyadicPartition& part,
                                const SignCodePlan& plan, std::size_t cap,
                                std::uint64_t seed) {
    const GridSpec& spec = part.spec;
    if (spec.dim != 1) fail(ErrorKind::Parameter, "sign-code nets are d=1 only");

    auto dict = std::make_shared<NetDictionary>();
    dict->spec = spec;
    GridFunction proto = lowpass_bump(spec, part, 0.0, plan.scale);
    const double beta = besov_norm(proto, params, part);

    std::vector<double> centers;
    for (double x = 0.0; x <= plan.radius_max; x += plan.spacing) {
        centers.push_back(x);
        if (x > 0.0) centers.push_back(-x);
    }
    std::sort(centers.begin(), centers.end());
    for (double cx : centers) {
        long cells = static_cast<long>(std::llround(snap_to_lattice(spec, cx) / spec.step()));
        long shift[1] = {cells};
        dict->atoms.push_back(make_window_atom(translate(proto, shift), beta));
    }

    FunctionNet net;
    net.params = params;
    net.level = plan.quant_level;
    net.seed = seed;
    net.cap = cap;
    net.dict = dict;
    net.note = "sign codebooks per dyadic radius, budget proportional to atom count; "
               "plus a singles ladder";
    net.coeff_members.push_back({});
    net.certificates.push_back(0.0);

    const double tau = std::pow(2.0, -plan.quant_level);

    // singles stratum
    for (std::uint32_t a = 0; a < dict->atoms.size(); ++a)
        for (int j = 0; j < plan.singles_levels; ++j) {
            double mag = quantize_down(std::pow(2.0, -j) / beta, tau);
            if (mag == 0.0) continue;
            for (double sgn : {1.0, -1.0}) {
                net.coeff_members.push_back({{a, sgn * mag}});
                net.certificates.push_back(mag * beta);
            }
        }

    // codebook strata on dyadic annuli: the polynomial weight is uniform
    // across one annulus, which is what gives each stratum its own scale
    Rng rng(seed);
    std::vector<double> xs(dict->atoms.size());
    for (std::size_t i = 0; i < centers.size(); ++i) xs[i] = centers[i];
    int stratum = 0;
    for (double R = plan.radius_min; R <= plan.radius_max * (1.0 + 1e-12);
         R *= plan.radius_factor, ++stratum) {
        const double lo = stratum == 0 ? -1.0 : R / plan.radius_factor;
        std::vector<std::uint32_t> active;
        for (std::uint32_t a = 0; a < xs.size(); ++a)
            if (std::abs(xs[a]) > lo && std::abs(xs[a]) <= R) active.push_back(a);
        const std::size_t m = active.size();
        if (m < 2) continue;
        double mag = quantize_down(std::pow(static_cast<double>(m), -1.0 / params.p) / beta, tau);
        if (mag == 0.0) mag = tau;
        std::size_t codes = static_cast<std::size_t>(std::lround(plan.codes_per_dim * m));
        Rng sr = rng.derive(static_cast<std::uint64_t>(stratum));
        for (std::size_t c = 0; c < codes; ++c) {
            SparseMember member;
            member.reserve(m);
            for (std::uint32_t a : active)
                member.push_back({a, (sr.u64() & 1) ? mag : -mag});
            net.coeff_members.push_back(std::move(member));
            net.certificates.push_back(-1.0);  // certified below
        }
    }

    if (net.coeff_members.size() > cap)
        fail(ErrorKind::Budget, "sign-code net exceeds the member cap",
             static_cast<double>(net.coeff_members.size()));

    // exact certificates for multi-atom members, rescale into the ball
    for (std::size_t i = 0; i < net.coeff_members.size(); ++i) {
        if (net.certificates[i] >= 0.0) continue;
        double cert = besov_norm(net.materialize(i), params, part);
        if (cert > 1.0) {
            double scale = 1.0 / (cert * (1.0 + 1e-9));
            for (auto& ac : net.coeff_members[i]) ac.second *= scale;
            cert *= scale;
        }
        net.certificates[i] = cert;
    }
    return net;
}

std::vector<FunctionNet> build_ball_sample_levels(const BesovParams& params,
                                                  const DyadicPartition& part,
                                                  int level_lo, int level_hi,
                                                  std::size_t members_per_level,
                                                  std::uint64_t seed) {
    if (level_lo < 1 || level_hi < level_lo)
        fail(ErrorKind::Parameter, "bad level range");
    std::vector<FunctionNet> nets;
    std::vector<GridFunction> members;
    std::vector<double> certs;
    Rng root(seed);
    for (int l = level_lo; l <= level_hi; ++l) {
        for (std::size_t i = 0; i < members_per_level; ++i) {
            Rng r = root.derive(static_cast<std::uint64_t>(l) * 100000 + i);
            double cert = 0.0;
            GridFunction f = sample_ball_element(params, part, r.u64(), l, &cert);
            members.push_back(std::move(f));
            certs.push_back(cert);
        }
        FunctionNet net = FunctionNet::from_values(params, members, certs);
        net.level = l;
        net.seed = seed;
        net.note = "nested random ball sample, blocks <= level";
        nets.push_back(std::move(net));
    }
    return nets;
}

// ---------------------------------------------------------------------------
// Witness
// ---------------------------------------------------------------------------

GridFunction witness_partial_sum(const WitnessSpec& ws, const GridSpec& spec) {
    if (ws.base_index < 1) fail(ErrorKind::Parameter, "witness base index must be >= 1");
    if (ws.depth < ws.base_index) fail(ErrorKind::Parameter, "witness depth below base index");
    double max_depth = std::log2(static_cast<double>(spec.points_per_axis) / 4.0);
    if (ws.depth > max_depth)
        fail(ErrorKind::Resolution, "witness depth exceeds the grid resolution");
    if (std::pow(2.0, -ws.base_index) >= spec.half_width / 2.0)
        fail(ErrorKind::Domain, "witness support leaves the safe core");
    return GridFunction::sample(spec, [&](std::array<double, 2> p) {
        double r = spec.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
        double v = 0.0;
        for (int k = ws.base_index; k <= ws.depth; ++k) {
            double arg = std::ldexp(r, k);
            if (arg >= 1.0) continue;  // outside this bump
            v += flat_top_bump(arg) / static_cast<double>(k);
        }
        return v;
    });
}

WitnessResult build_log_log_witness(const WitnessSpec& ws, const GridSpec& spec,
                                    const BesovParams& params, const DyadicPartition& part) {
    if (!(params.q > 1.0))
        fail(ErrorKind::Parameter, "witness requires q > 1 (series certificate fails at q <= 1)");
    double target_s = static_cast<double>(params.dim) / params.p;
    if (std::abs(params.s - target_s) > 1e-9)
        fail(ErrorKind::Parameter, "witness requires s = d/p");
    WitnessResult out{witness_partial_sum(ws, spec), 0.0};
    out.certificate = besov_norm(out.psi, params, part);
    return out;
}

FunctionNet build_translate_family(const GridFunction& psi, std::size_t count,
                                   const BesovParams& params, const DyadicPartition& part,
                                   long span_cells) {
    if (count < 1) fail(ErrorKind::Parameter, "family count must be >= 1");
    if (span_cells < static_cast<long>(count))
        fail(ErrorKind::Domain, "not enough admissible lattice shifts for the family");
    if (span_cells % static_cast<long>(count) != 0)
        fail(ErrorKind::Parameter, "span must be divisible by the family count (nested shifts)");
    double base_cert = besov_norm(psi, params, part);
    if (base_cert > 1.0 + 1e-6)
        fail(ErrorKind::Parameter, "witness must be normalized to the unit ball first");

    const long stride = span_cells / static_cast<long>(count);
    FunctionNet net;
    net.params = params;
    net.translate_base = psi;
    net.seed = 0;
    for (std::size_t i = 0; i < count; ++i)
        net.shift_members.push_back(static_cast<long>(i) * stride);

    // support safety at the extreme shift
    long worst[1] = {net.shift_members.back()};
    (void)translate(psi, worst);

    net.certificates.assign(count, base_cert);
    if (count <= 64) {
        for (std::size_t i = 0; i < count; ++i) {
            long s[1] = {net.shift_members[i]};
            net.certificates[i] = besov_norm(translate(psi, s), params, part);
        }
        net.note = "translate family, certificates recomputed per member";
    } else {
        for (std::size_t i : {std::size_t(0), count / 3, count / 2, count - 1}) {
            long s[1] = {net.shift_members[i]};
            double c = besov_norm(translate(psi, s), params, part);
            if (std::abs(c - base_cert) > 1e-8 * std::max(1.0, base_cert))
                fail(ErrorKind::Degeneracy, "translation invariance spot check failed");
        }
        net.note = "translate family, certificates by translation invariance (spot checked)";
    }
    return net;
}

}  // namespace bpl
