#include "bpl/classify.hpp"

#include <cmath>

namespace bpl {

namespace {

bool has_bounded_density(MeasureClass m) {
    return m == MeasureClass::WeightBoundedDensity ||
           m == MeasureClass::BoundedDensityLowerBounded ||
           m == MeasureClass::BoundedDensity || m == MeasureClass::PowerTail;
}

bool has_local_lower_bound(MeasureClass m) {
    return m == MeasureClass::BoundedDensityLowerBounded || m == MeasureClass::PowerTail;
}

}  // namespace

Classification classify(const BesovParams& params, const MeasureClassSpec& mc) {
    const double d = static_cast<double>(params.dim);
    const double inv_p = params.p == kInfOrder ? 0.0 : 1.0 / params.p;
    const double dp = d * inv_p;    // d/p
    const double half_d = d / 2.0;  // d/2
    const double s = params.s;
    const double q = params.q;

    if (mc.kind == MeasureClass::PowerTail) {
        if (!(params.p > 2.0))
            fail(ErrorKind::Parameter, "power-tail counterexample class requires p > 2");
        if (!(mc.delta > 0.0))
            fail(ErrorKind::Parameter, "power-tail class requires delta > 0");
    }

    Classification out;
    auto cite = [&](const std::string& t) { out.citations.push_back(t); };

    // s <= 0: outside every stated hypothesis
    if (!(s > 0.0)) {
        cite("s <= 0: outside the stated smoothness hypotheses");
        return out;
    }

    // universal positive results first (their hypotheses are disjoint from
    // every negative result below)
    if (params.p <= 2.0 && s > dp) {
        out.donsker = DonskerVerdict::UniversalDonsker;
        out.pregaussian = PregaussianVerdict::Pregaussian;
        cite("p <= 2 and s > d/p: unit ball is universally Donsker");
        return out;
    }
    if (params.dim == 1 && q == 1.0 && params.p < 2.0 && std::abs(s - dp) < 1e-12) {
        out.donsker = DonskerVerdict::UniversalDonsker;
        out.pregaussian = PregaussianVerdict::Pregaussian;
        cite("d = q = 1, p < 2, s = 1/p: unit ball is universally Donsker");
        return out;
    }

    const bool s_below_dp = s < dp - 1e-15;
    const bool s_at_dp = std::abs(s - dp) <= 1e-15;

    // large-p regime, supercritical smoothness
    if (params.p > 2.0 && s > half_d) {
        const double bound = half_d - dp;  // moment threshold d/2 - d/p
        if (mc.kind == MeasureClass::PowerTail) {
            if (mc.delta < bound - 1e-15) {
                out.pregaussian = PregaussianVerdict::NotPregaussian;
                out.donsker = DonskerVerdict::NotDonsker;
                cite("p > 2, s > d/2, tail exponent delta < d/2 - d/p: ball is not "
                     "pregaussian for this measure");
            } else if (mc.delta <= bound + 1e-15) {
                out.pregaussian = PregaussianVerdict::Open;
                out.donsker = DonskerVerdict::Open;
                cite("boundary delta = d/2 - d/p: flagged edge case, not adjudicated");
            } else {
                out.donsker = DonskerVerdict::DonskerUnderMoment;
                out.moment_requirement = bound;
                out.pregaussian = PregaussianVerdict::Pregaussian;
                cite("p > 2, s > d/2: Donsker under a moment gamma > d/2 - d/p; this "
                     "measure has moments up to delta > d/2 - d/p");
            }
        } else {
            out.donsker = DonskerVerdict::DonskerUnderMoment;
            out.moment_requirement = bound;
            out.pregaussian = PregaussianVerdict::Open;
            cite("p > 2, s > d/2: Donsker (hence pregaussian) under a moment "
                 "gamma > d/2 - d/p; the descriptor does not certify the moment");
        }
        return out;
    }

    // subcritical smoothness: s < d/2 kills pregaussianity for bounded
    // densities with a local lower bound
    if (s < half_d - 1e-15) {
        if (has_local_lower_bound(mc.kind)) {
            out.pregaussian = PregaussianVerdict::NotPregaussian;
            out.donsker = DonskerVerdict::NotDonsker;
            cite("0 < s < d/2, bounded density with a local lower bound: ball is not "
                 "pregaussian");
            return out;
        }
        out.pregaussian = PregaussianVerdict::Open;
        cite("0 < s < d/2 without a local density lower bound: pregaussian side open");
        if (has_bounded_density(mc.kind) && (s_below_dp || (s_at_dp && q > 1.0))) {
            out.donsker = DonskerVerdict::NotDonsker;
            cite("bounded density and s < d/p (or s = d/p, q > 1): ball is not Donsker");
        } else {
            cite("Donsker side open for this descriptor");
        }
        return out;
    }

    // intermediate band d/2 <= s <= d/p (forces p <= 2 here)
    const bool s_at_half_d = std::abs(s - half_d) <= 1e-15;

    // pregaussian side
    if (params.p < 2.0 && s > half_d && mc.kind == MeasureClass::WeightBoundedDensity) {
        out.pregaussian = PregaussianVerdict::Pregaussian;
        cite("p < 2, s > d/2, density with finite phi*<x>^d sup: ball is pregaussian");
    } else if (s_at_half_d && params.p == 2.0) {
        out.pregaussian = PregaussianVerdict::Open;
        cite("limiting case p = 2, s = d/2: pregaussian side open");
    } else {
        out.pregaussian = PregaussianVerdict::Open;
        cite("pregaussian side not covered for this descriptor");
    }

    // Donsker side
    if (has_bounded_density(mc.kind) && (s_below_dp || (s_at_dp && q > 1.0))) {
        out.donsker = DonskerVerdict::NotDonsker;
        cite("bounded density and s < d/p (or s = d/p, q > 1): ball is not Donsker");
    } else if (s_at_dp && q == 1.0 && params.dim > 1) {
        out.donsker = DonskerVerdict::Open;
        cite("s = d/p, q = 1, d > 1: Donsker question open");
    } else if (s_at_dp && q == 1.0 && params.p == 2.0) {
        out.donsker = DonskerVerdict::Open;
        cite("p = 2, s = d/2, q = 1: Donsker question open");
    } else {
        out.donsker = DonskerVerdict::Open;
        cite("Donsker side open for this descriptor");
    }

    // structural invariants
    if (out.pregaussian == PregaussianVerdict::NotPregaussian)
        out.donsker = DonskerVerdict::NotDonsker;
    if (out.donsker == DonskerVerdict::UniversalDonsker)
        out.pregaussian = PregaussianVerdict::Pregaussian;
    return out;
}

std::string donsker_token(DonskerVerdict v) {
    switch (v) {
        case DonskerVerdict::UniversalDonsker: return "universal_donsker";
        case DonskerVerdict::DonskerUnderMoment: return "donsker_under_moment";
        case DonskerVerdict::NotDonsker: return "not_donsker";
        case DonskerVerdict::Open: return "open";
    }
    return "open";
}

std::string pregaussian_token(PregaussianVerdict v) {
    switch (v) {
        case PregaussianVerdict::Pregaussian: return "pregaussian";
        case PregaussianVerdict::NotPregaussian: return "not_pregaussian";
        case PregaussianVerdict::Open: return "open";
    }
    return "open";
}

std::string measure_class_token(MeasureClass m) {
    switch (m) {
        case MeasureClass::Any: return "any";
        case MeasureClass::PowerTail: return "thm4";
        case MeasureClass::WeightBoundedDensity: return "weight_bounded_density";
        case MeasureClass::BoundedDensityLowerBounded:
            return "bounded_density_lower_bounded";
        case MeasureClass::BoundedDensity: return "bounded_density";
    }
    return "any";
}

}  // namespace bpl
