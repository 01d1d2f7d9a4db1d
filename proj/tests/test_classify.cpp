#include <doctest.h>

#include <cmath>

#include "bpl/classify.hpp"
#include "bpl/rng.hpp"

using namespace bpl;

TEST_CASE("worked examples") {
    // universal small-p case
    Classification a = classify(make_besov_params(2.0, 1.0, 1.0, 1), MeasureClassSpec::any());
    CHECK(a.donsker == DonskerVerdict::UniversalDonsker);
    CHECK(a.pregaussian == PregaussianVerdict::Pregaussian);

    // subcritical smoothness in d=2 with a locally lower-bounded density
    Classification b = classify(make_besov_params(0.8, 4.0, 2.0, 2),
                                MeasureClassSpec::bounded_lower_bounded());
    CHECK(b.pregaussian == PregaussianVerdict::NotPregaussian);
    CHECK(b.donsker == DonskerVerdict::NotDonsker);

    // pregaussian but not Donsker band
    Classification c = classify(make_besov_params(0.6, 1.5, 3.0, 1),
                                MeasureClassSpec::weight_bounded());
    CHECK(c.pregaussian == PregaussianVerdict::Pregaussian);
    CHECK(c.donsker == DonskerVerdict::NotDonsker);

    // p = 2 at s = d/2 with q > 1: not Donsker, pregaussian open
    Classification d = classify(make_besov_params(0.5, 2.0, 2.0, 1),
                                MeasureClassSpec::bounded());
    CHECK(d.donsker == DonskerVerdict::NotDonsker);
    CHECK(d.pregaussian == PregaussianVerdict::Open);
}

TEST_CASE("twelve-tuple regression grid") {
    struct Row {
        double s, p, q;
        int d;
        MeasureClassSpec mc;
        DonskerVerdict donsker;
        PregaussianVerdict pregaussian;
    };
    const Row rows[] = {
        {2.0, 1.0, 1.0, 1, MeasureClassSpec::any(), DonskerVerdict::UniversalDonsker,
         PregaussianVerdict::Pregaussian},
        {0.8, 4.0, 2.0, 2, MeasureClassSpec::bounded_lower_bounded(),
         DonskerVerdict::NotDonsker, PregaussianVerdict::NotPregaussian},
        {0.6, 1.5, 3.0, 1, MeasureClassSpec::weight_bounded(), DonskerVerdict::NotDonsker,
         PregaussianVerdict::Pregaussian},
        {0.5, 2.0, 2.0, 1, MeasureClassSpec::bounded(), DonskerVerdict::NotDonsker,
         PregaussianVerdict::Open},
        // power-tail class below / at / above the moment boundary
        {1.0, 4.0, 1.0, 1, MeasureClassSpec::power_tail(0.125), DonskerVerdict::NotDonsker,
         PregaussianVerdict::NotPregaussian},
        {1.0, 4.0, 2.0, 1, MeasureClassSpec::power_tail(0.25), DonskerVerdict::Open,
         PregaussianVerdict::Open},
        {1.0, 4.0, 2.0, 1, MeasureClassSpec::power_tail(0.4),
         DonskerVerdict::DonskerUnderMoment, PregaussianVerdict::Pregaussian},
        {1.0, 4.0, 2.0, 1, MeasureClassSpec::bounded(), DonskerVerdict::DonskerUnderMoment,
         PregaussianVerdict::Open},
        // s = d/p with q = 1 in d > 1: Donsker open, pregaussian via p < 2
        {10.0 / 7.0, 1.4, 1.0, 2, MeasureClassSpec::weight_bounded(), DonskerVerdict::Open,
         PregaussianVerdict::Pregaussian},
        // d=2 critical line with q > 1
        {1.0, 2.0, 4.0, 2, MeasureClassSpec::bounded(), DonskerVerdict::NotDonsker,
         PregaussianVerdict::Open},
        // p = 2, s = d/2, q = 1: both sides open
        {0.5, 2.0, 1.0, 1, MeasureClassSpec::bounded(), DonskerVerdict::Open,
         PregaussianVerdict::Open},
        // p > 2 subcritical with local lower bound
        {0.4, 3.0, 2.0, 1, MeasureClassSpec::bounded_lower_bounded(),
         DonskerVerdict::NotDonsker, PregaussianVerdict::NotPregaussian},
    };
    for (const auto& r : rows) {
        Classification c = classify(make_besov_params(r.s, r.p, r.q, r.d), r.mc);
        CAPTURE(r.s);
        CAPTURE(r.p);
        CAPTURE(r.q);
        CHECK(c.donsker == r.donsker);
        CHECK(c.pregaussian == r.pregaussian);
        CHECK_FALSE(c.citations.empty());
    }
}

TEST_CASE("moment requirement is reported for the conditional verdict") {
    Classification c = classify(make_besov_params(1.0, 4.0, 2.0, 1), MeasureClassSpec::any());
    CHECK(c.donsker == DonskerVerdict::DonskerUnderMoment);
    CHECK(c.moment_requirement == doctest::Approx(0.25));  // d/2 - d/p
}

TEST_CASE("descriptor validation") {
    CHECK_THROWS_AS(classify(make_besov_params(1.0, 2.0, 2.0, 1),
                             MeasureClassSpec::power_tail(0.1)),
                    Error);  // power-tail class needs p > 2
    CHECK_THROWS_AS(classify(make_besov_params(1.0, 4.0, 2.0, 1),
                             MeasureClassSpec::power_tail(0.0)),
                    Error);
}

TEST_CASE("property: invariants hold over 10^4 random draws") {
    Rng rng(2024);
    const MeasureClass kinds[] = {MeasureClass::Any, MeasureClass::PowerTail,
                                  MeasureClass::WeightBoundedDensity,
                                  MeasureClass::BoundedDensityLowerBounded,
                                  MeasureClass::BoundedDensity};
    int universal = 0, not_pg = 0, open_pg = 0;
    for (int it = 0; it < 10000; ++it) {
        int d = 1 + static_cast<int>(rng.below(2));
        double s = -0.5 + 3.5 * rng.uniform01();
        double p = rng.below(8) == 0 ? kInfOrder : 1.0 + 7.0 * rng.uniform01();
        double q = rng.below(8) == 0 ? kInfOrder
                                     : (rng.below(4) == 0 ? 1.0 : 1.0 + 4.0 * rng.uniform01());
        // occasionally land exactly on the critical lines
        if (rng.below(5) == 0 && p != kInfOrder) s = d / p;
        if (rng.below(7) == 0) s = d / 2.0;

        MeasureClassSpec mc;
        mc.kind = kinds[rng.below(5)];
        if (mc.kind == MeasureClass::PowerTail) {
            if (!(p > 2.0)) mc.kind = MeasureClass::BoundedDensity;
            else mc.delta = 0.8 * rng.uniform01() + 1e-3;
        }

        Classification c = classify(make_besov_params(s, p, q, d), mc);
        // verdict invariants from the type contract
        if (c.pregaussian == PregaussianVerdict::NotPregaussian) {
            CHECK(c.donsker == DonskerVerdict::NotDonsker);
            ++not_pg;
        }
        if (c.donsker == DonskerVerdict::UniversalDonsker) {
            CHECK(c.pregaussian == PregaussianVerdict::Pregaussian);
            ++universal;
        }
        if (c.pregaussian == PregaussianVerdict::Open) ++open_pg;
        CHECK_FALSE(c.citations.empty());

        // determinism
        Classification c2 = classify(make_besov_params(s, p, q, d), mc);
        CHECK(c.donsker == c2.donsker);
        CHECK(c.pregaussian == c2.pregaussian);
    }
    // the random grid should actually visit the interesting branches
    CHECK(universal > 100);
    CHECK(not_pg > 100);
    CHECK(open_pg > 100);
}

TEST_CASE("property: universal hypotheses are disjoint from negative ones") {
    // p <= 2 and s > d/p excludes both negative rules; scan a lattice
    for (double p : {1.0, 1.3, 1.7, 2.0})
        for (double s : {0.51, 0.8, 1.2, 2.4})
            for (int d : {1, 2}) {
                if (!(s > d / p)) continue;
                // the universal rule fires regardless of the measure class
                for (auto mc : {MeasureClassSpec::any(), MeasureClassSpec::bounded(),
                                MeasureClassSpec::bounded_lower_bounded(),
                                MeasureClassSpec::weight_bounded()}) {
                    Classification c = classify(make_besov_params(s, p, 2.0, d), mc);
                    CHECK(c.donsker == DonskerVerdict::UniversalDonsker);
                    // negative hypotheses cannot hold here: s > d/p and s > d/2
                    CHECK(s > d / 2.0);
                }
            }
}

TEST_CASE("tokens round out the wire format") {
    CHECK(donsker_token(DonskerVerdict::NotDonsker) == "not_donsker");
    CHECK(pregaussian_token(PregaussianVerdict::Open) == "open");
    CHECK(measure_class_token(MeasureClass::PowerTail) == "thm4");
}
