#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "kempe/errors.hpp"
#include "kempe/gadgets.hpp"

using namespace kempe;

namespace {
constexpr double kPi = 3.14159265358979323846;

Gadget make(GadgetType t, auto mutate) {
    GadgetKind k;
    k.type = t;
    mutate(k);
    return build_gadget(k);
}
Gadget make(GadgetType t) {
    return make(t, [](GadgetKind&) {});
}
}  // namespace

TEST_SUITE("peaucellier") {
    // independent oracle: resolve the cell by raw circle intersections and
    // check the traced point against the predicted vertical line
    TEST_CASE("line law against circle-intersection oracle") {
        Gadget g = make(GadgetType::peaucellier);  // L=2, r=1, d=1
        CHECK(check_consistency(g.fw).pass);
        double kinv = 3.0;
        Vec2 p1{0, 0}, p2{1, 0};
        int checked = 0;
        for (int i = 0; i < 100; ++i) {
            double tau = -1.9 + 3.8 * i / 99.0;
            Vec2 crank = p2 + unit_dir(tau) * 1.0;
            double m = dist(crank, p1);
            if (m < 1.02 || m > 2.98) continue;
            Placement p = gadget_forward_placement(g, {{"crank", crank}});
            JointId q = g.interface.at("q");

            // oracle: u,v from circles around p1 and crank, then q as the
            // second intersection of the two rhombus circles
            CircleHit arms = circle_circle(p1, 2.0, crank, 1.0);
            REQUIRE(arms.ok);
            CircleHit tips = circle_circle(arms.p_ccw, 1.0, arms.p_cw, 1.0);
            REQUIRE(tips.ok);
            Vec2 oracle_q = dist(tips.p_ccw, crank) > dist(tips.p_cw, crank) ? tips.p_ccw
                                                                             : tips.p_cw;
            CHECK(dist(p[q], oracle_q) < 1e-9);
            CHECK(std::abs(p[q].x - 1.5) < 1e-9);
            CHECK(std::abs(dist(p[q], p1) * m - kinv) < 1e-9);
            CHECK(max_bar_residual(g.fw, p) < 1e-9);
            ++checked;
        }
        CHECK(checked >= 80);
    }

    TEST_CASE("contract check") {
        Gadget g = make(GadgetType::peaucellier);
        VerificationReport rep = contract_check(g, 10, 1e-9);
        CHECK(rep.pass);
    }

    TEST_CASE("strict variant keeps the tether consistent") {
        Gadget g = make(GadgetType::strict_peaucellier);
        CHECK(check_consistency(g.fw).pass);
        VerificationReport rep = contract_check(g, 10, 1e-9);
        CHECK(rep.pass);
    }

    TEST_CASE("bad parameters rejected") {
        GadgetKind k;
        k.type = GadgetType::peaucellier;
        k.L = 1.0;
        k.r = 2.0;
        CHECK_THROWS_AS(build_gadget(k), ArgumentError);
    }
}

TEST_SUITE("lineariser") {
    TEST_CASE("three joints stay colinear and independent") {
        Gadget g = make(GadgetType::lineariser, [](GadgetKind& k) { k.n = 3; });
        CHECK(check_consistency(g.fw).pass);
        VerificationReport rep = contract_check(g, 8, 1e-9);
        CHECK(rep.pass);
        CHECK(*rep.max_trace_error <= 1e-9);
    }
}

TEST_SUITE("translator") {
    TEST_CASE("admissible interval matches the tong arms") {
        Gadget g = make(GadgetType::translator);  // reach (|AX|) = 1
        CHECK(g.ranges.at("AB").lo == doctest::Approx(0.0));
        CHECK(g.ranges.at("AB").hi == doctest::Approx(2.0));
    }

    TEST_CASE("vector copy across the sweep") {
        Gadget g = make(GadgetType::translator);
        VerificationReport rep = contract_check(g, 12, 1e-9);
        CHECK(rep.pass);
    }

    TEST_CASE("closed tong still places consistently") {
        Gadget g = make(GadgetType::translator);
        Placement p = gadget_forward_placement(
            g, {{"B", Vec2{0, 0}}, {"Aprime", Vec2{0.4, 1.0}}});
        CHECK(max_bar_residual(g.fw, p) < 1e-9);
        CHECK(dist(p[g.interface.at("Bprime")], p[g.interface.at("Aprime")]) < 1e-9);
    }
}

TEST_SUITE("rotator") {
    TEST_CASE("separation preserved over 50 rotation samples") {
        Gadget g = make(GadgetType::rotator);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            double ang = -2.5 + 5.0 * i / 49.0;
            Placement p = gadget_forward_placement(
                g, {{"B", Vec2{0.6, 0}}, {"target", unit_dir(ang) * 0.8}});
            worst = std::max(worst,
                             std::abs(dist(p[g.interface.at("Bprime")], Vec2{0, 0}) - 0.6));
            CHECK(max_bar_residual(g.fw, p) < 1e-9);
        }
        CHECK(worst == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("contract check") {
        Gadget g = make(GadgetType::rotator);
        CHECK(contract_check(g, 12, 1e-9).pass);
    }
}

TEST_SUITE("copier") {
    TEST_CASE("separation equality, output angle free") {
        Gadget g = make(GadgetType::copier);
        CHECK(contract_check(g, 12, 1e-9).pass);
    }
}

TEST_SUITE("multiplier") {
    TEST_CASE("unit fixed point") {
        Gadget g = make(GadgetType::multiplier);
        Placement p = gadget_forward_placement(g, {{"A", Vec2{1.0, 0}}, {"B", Vec2{0, 1.0}}});
        CHECK(p[g.interface.at("C")].x == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("0.5 x 0.8 = 0.4 against the line-intersection oracle") {
        Gadget g = make(GadgetType::multiplier);
        Placement p = gadget_forward_placement(g, {{"A", Vec2{0.5, 0}}, {"B", Vec2{0, 0.8}}});
        // oracle: A' = B + (A - Y), intersect line B-A' with the x-axis
        Vec2 ap = Vec2{0, 0.8} + Vec2{0.5, 0} - Vec2{0, 1};
        double t = 0.8 / (0.8 - ap.y);
        Vec2 oracle{t * ap.x, 0};
        CHECK(dist(p[g.interface.at("C")], oracle) < 1e-12);
        CHECK(p[g.interface.at("C")].x == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(max_bar_residual(g.fw, p) < 1e-9);
    }

    TEST_CASE("20x20 grid") {
        Gadget g = make(GadgetType::multiplier);
        VerificationReport rep = contract_check(g, 20, 1e-9);
        CHECK(rep.pass);
        CHECK(*rep.max_trace_error <= 1e-9);
    }
}

TEST_SUITE("divider") {
    TEST_CASE("inverse of the multiplier") {
        Gadget mul = make(GadgetType::multiplier);
        Gadget div = make(GadgetType::divider);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.15, 0.9);
        for (int i = 0; i < 50; ++i) {
            double alpha = u(rng), beta = u(rng);
            Placement pm = gadget_forward_placement(
                mul, {{"A", Vec2{alpha, 0}}, {"B", Vec2{0, beta}}});
            double prod = pm[mul.interface.at("C")].x;
            Placement pd = gadget_forward_placement(
                div, {{"C", Vec2{prod, 0}}, {"A", Vec2{alpha, 0}}});
            CHECK(std::abs(pd[div.interface.at("B")].y - beta) < 1e-8);
        }
    }

    TEST_CASE("contract check") {
        Gadget g = make(GadgetType::divider);
        CHECK(contract_check(g, 12, 1e-9).pass);
    }
}

TEST_SUITE("power") {
    TEST_CASE("cube of a half") {
        Gadget g = make(GadgetType::power, [](GadgetKind& k) { k.k = 3; });
        Placement p = gadget_forward_placement(g, {{"in", Vec2{0.5, 0}}});
        CHECK(p[g.interface.at("out")].x == doctest::Approx(0.125).epsilon(1e-12));
    }

    TEST_CASE("matches chained multipliers for k in 2..4") {
        Gadget mul = make(GadgetType::multiplier);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.1, 0.9);
        for (int k = 2; k <= 4; ++k) {
            Gadget g = make(GadgetType::power, [&](GadgetKind& kk) { kk.k = k; });
            for (int i = 0; i < 50; ++i) {
                double s = u(rng);
                Placement p = gadget_forward_placement(g, {{"in", Vec2{s, 0}}});
                // chain k-1 multiplier forwards
                double acc = s;
                for (int j = 1; j < k; ++j) {
                    Placement pm = gadget_forward_placement(
                        mul, {{"A", Vec2{s, 0}}, {"B", Vec2{0, acc}}});
                    acc = pm[mul.interface.at("C")].x;
                }
                CHECK(std::abs(p[g.interface.at("out")].x - acc) < 1e-8);
            }
        }
    }
}

TEST_SUITE("scalar") {
    TEST_CASE("contract") {
        Gadget g = make(GadgetType::scalar, [](GadgetKind& k) { k.c = 0.7; });
        CHECK(contract_check(g, 12, 1e-9).pass);
        Placement p = gadget_forward_placement(g, {{"A", Vec2{0.5, 0}}});
        CHECK(p[g.interface.at("C")].x == doctest::Approx(0.35).epsilon(1e-12));
    }
}

TEST_SUITE("angle_adder") {
    TEST_CASE("0.2 + 0.3 = 0.5 with reflection-geometry oracle") {
        Gadget g = make(GadgetType::angle_adder);
        Placement p = gadget_forward_placement(
            g, {{"theta_bar", unit_dir(0.2)}, {"phi_bar", unit_dir(0.3)}});
        Vec2 out = p[g.interface.at("out")];
        CHECK(angle_of(out) == doctest::Approx(0.5).epsilon(1e-12));
        // oracle: the output is the input chord reflected through the bisector
        // of the two bars, i.e. |A0 B| = |A' B'| must hold
        double chord_in = dist(p[g.interface.at("A0")], p[g.interface.at("theta_bar")]);
        double chord_out = dist(p[g.interface.at("phi_bar")], out);
        CHECK(chord_in == doctest::Approx(chord_out).epsilon(1e-12));
        CHECK(max_bar_residual(g.fw, p) < 1e-9);
    }

    TEST_CASE("contract check") {
        Gadget g = make(GadgetType::angle_adder);
        CHECK(contract_check(g, 12, 1e-9).pass);
    }
}

TEST_SUITE("reversor") {
    TEST_CASE("doubles its mirror angle over the valid wedge") {
        Gadget g = make(GadgetType::reversor);
        VerificationReport rep = contract_check(g, 12, 1e-9);
        CHECK(rep.pass);
        CHECK(*rep.max_trace_error <= 1e-9);
    }

    TEST_CASE("contraparallelogram bars stay exact") {
        Gadget g = make(GadgetType::reversor);
        for (int i = 1; i < 20; ++i) {
            double alpha = 0.04 + (kPi / 4 - 0.1) * i / 19.0;
            Placement p = gadget_forward_placement(g, {{"mirror", unit_dir(alpha) * 0.5}});
            CHECK(max_bar_residual(g.fw, p) < 1e-9);
            CHECK(angle_of(p[g.interface.at("out")]) == doctest::Approx(2 * alpha).epsilon(1e-12));
        }
    }
}

TEST_SUITE("multiplicator") {
    TEST_CASE("adds angles in the valid wedge") {
        Gadget g = make(GadgetType::multiplicator);
        VerificationReport rep = contract_check(g, 12, 1e-9);
        CHECK(rep.pass);
    }

    TEST_CASE("alpha >= beta is a range error") {
        Gadget g = make(GadgetType::multiplicator);
        CHECK_THROWS_AS(gadget_forward_placement(g, {{"alpha_bar", unit_dir(0.3)},
                                                     {"beta_bar", unit_dir(0.2) * 0.25}}),
                        RangeError);
    }
}

TEST_SUITE("sweep continuity") {
    // one frozen constant per kind: max internal displacement over a straight
    // input sweep stays O(h)
    TEST_CASE("translator and rotator internals move O(h)") {
        struct Case {
            GadgetType type;
            double frozen_c;
        };
        for (auto [type, frozen] : {Case{GadgetType::translator, 12.0},
                                    Case{GadgetType::rotator, 25.0},
                                    Case{GadgetType::multiplier, 30.0}}) {
            Gadget g = make(type);
            const int steps = 200;
            double h = 0.6 / steps;
            Placement prev;
            double worst = 0.0;
            for (int i = 0; i <= steps; ++i) {
                double s = 0.2 + 0.6 * i / steps;
                std::map<std::string, Vec2> inputs;
                if (type == GadgetType::translator)
                    inputs = {{"B", Vec2{s, 0}}, {"Aprime", Vec2{0.4, 1.0}}};
                else if (type == GadgetType::rotator)
                    inputs = {{"B", Vec2{s, 0}}, {"target", unit_dir(0.9) * 0.8}};
                else
                    inputs = {{"A", Vec2{s, 0}}, {"B", Vec2{0, 0.5}}};
                Placement p = gadget_forward_placement(g, inputs);
                if (i > 0)
                    for (std::size_t j = 0; j < p.size(); ++j)
                        worst = std::max(worst, dist(p[j], prev[j]));
                prev = p;
            }
            CHECK(worst <= frozen * h);
        }
    }
}
