#pragma once

#include <string>
#include <vector>

#include "bpl/besov.hpp"

namespace bpl {

enum class DonskerVerdict {
    UniversalDonsker,
    DonskerUnderMoment,  // requires a moment gamma > d/2 - d/p
    NotDonsker,
    Open,
};

enum class PregaussianVerdict {
    Pregaussian,
    NotPregaussian,
    Open,
};

// Regularity class of the probability measure handed to the classifier.
enum class MeasureClass {
    Any,                         // no assumption
    PowerTail,                   // density ~ base * <x>^{-d-2 delta}, base >= c > 0
    WeightBoundedDensity,        // density with sup phi * <x>^d finite
    BoundedDensityLowerBounded,  // bounded density, >= c > 0 on an open set
    BoundedDensity,              // bounded density
};

struct MeasureClassSpec {
    MeasureClass kind = MeasureClass::Any;
    double delta = 0.0;  // PowerTail only
    static MeasureClassSpec any() { return {}; }
    static MeasureClassSpec power_tail(double delta) { return {MeasureClass::PowerTail, delta}; }
    static MeasureClassSpec weight_bounded() { return {MeasureClass::WeightBoundedDensity, 0.0}; }
    static MeasureClassSpec bounded_lower_bounded() {
        return {MeasureClass::BoundedDensityLowerBounded, 0.0};
    }
    static MeasureClassSpec bounded() { return {MeasureClass::BoundedDensity, 0.0}; }
};

struct Classification {
    DonskerVerdict donsker = DonskerVerdict::Open;
    PregaussianVerdict pregaussian = PregaussianVerdict::Open;
    double moment_requirement = 0.0;  // gamma threshold when DonskerUnderMoment
    std::vector<std::string> citations;  // hypothesis strings justifying the verdicts
};

// Pure total decision table over (params, measure class). Verdict invariants:
// NotPregaussian forces NotDonsker; UniversalDonsker forces Pregaussian.
Classification classify(const BesovParams& params, const MeasureClassSpec& mc);

std::string donsker_token(DonskerVerdict v);
std::string pregaussian_token(PregaussianVerdict v);
std::string measure_class_token(MeasureClass m);

}  // namespace bpl
