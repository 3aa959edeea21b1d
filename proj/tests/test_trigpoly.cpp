#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "kempe/errors.hpp"
#include "kempe/trigpoly.hpp"

using namespace kempe;

namespace {
constexpr double kPi = 3.14159265358979323846;

double direct_substitution(const BivariatePoly& f, double a, double b, double th, double ph) {
    double x = a * std::cos(th) + b * std::cos(ph);
    double y = a * std::sin(th) + b * std::sin(ph);
    return f.eval(x, y);
}

BivariatePoly random_poly(std::mt19937_64& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> numer(-8, 8);
    std::uniform_int_distribution<int> denom(1, 4);
    BivariatePoly f;
    for (int tries = 0; tries < 10; ++tries) {
        int i = deg(rng), j = deg(rng);
        if (i + j > max_deg) continue;
        f.add_term(i, j, Rational(numer(rng), denom(rng)));
    }
    if (f.terms.empty()) f.add_term(1, 0, 1);
    return f;
}

}  // namespace

TEST_SUITE("parser") {
    TEST_CASE("bivariate grammar") {
        BivariatePoly f = parse_bivariate("x^2*y - 3*x + 1");
        CHECK(f.coeff(2, 1) == 1);
        CHECK(f.coeff(1, 0) == -3);
        CHECK(f.coeff(0, 0) == 1);
        CHECK(f.degree() == 3);
    }

    TEST_CASE("decimal coefficients are exact rationals") {
        BivariatePoly f = parse_bivariate("0.25*x + 1.5");
        CHECK(f.coeff(1, 0) == Rational(1, 4));
        CHECK(f.coeff(0, 0) == Rational(3, 2));
    }

    TEST_CASE("univariate in t") {
        auto c = parse_univariate("1+t-t^2");
        REQUIRE(c.size() == 3);
        CHECK(c[0] == 1);
        CHECK(c[1] == 1);
        CHECK(c[2] == -1);
    }

    TEST_CASE("errors carry a column") {
        try {
            parse_bivariate("x^2 + * y");
            CHECK(false);
        } catch (const ParseError& e) {
            CHECK(e.column > 1);
        }
    }
}

TEST_SUITE("expand") {
    TEST_CASE("f = x splits into the two arm cosines") {
        TrigSum t = expand(parse_bivariate("x"), Rational(2), Rational(1));
        CHECK(t.a00 == 0.0);
        REQUIRE(t.terms.size() == 2);
        // graded-lex: (0,1) before (1,0)
        CHECK(t.terms[0].r == 0);
        CHECK(t.terms[0].s == 1);
        CHECK(t.terms[0].amplitude == 1.0);
        CHECK(t.terms[1].r == 1);
        CHECK(t.terms[1].s == 0);
        CHECK(t.terms[1].amplitude == 2.0);
        for (const TrigTerm& term : t.terms) CHECK(term.psi_quarters == 0);
    }

    TEST_CASE("f = x^2 with unit arms, hand expansion") {
        // x^2 -> 1 + cos(th-ph) + cos(th+ph) + cos(2th)/2 + cos(2ph)/2
        TrigSum t = expand(parse_bivariate("x^2"), Rational(1), Rational(1));
        CHECK(t.a00 == 1.0);
        REQUIRE(t.terms.size() == 4);
        auto find = [&](int r, int s) -> const TrigTerm& {
            for (const TrigTerm& term : t.terms)
                if (term.r == r && term.s == s) return term;
            throw std::runtime_error("missing term");
        };
        CHECK(find(1, -1).amplitude == 1.0);
        CHECK(find(1, 1).amplitude == 1.0);
        CHECK(find(2, 0).amplitude == 0.5);
        CHECK(find(0, 2).amplitude == 0.5);

        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        for (int i = 0; i < 200; ++i) {
            double th = u(rng), ph = u(rng);
            CHECK(eval_trig(t, th, ph) ==
                  doctest::Approx(direct_substitution(parse_bivariate("x^2"), 1, 1, th, ph))
                      .epsilon(1e-12));
        }
    }

    TEST_CASE("f = y lands on sine phases with positive amplitudes") {
        TrigSum t = expand(parse_bivariate("y"), Rational(1), Rational(1));
        CHECK(t.a00 == 0.0);
        REQUIRE(t.terms.size() == 2);
        for (const TrigTerm& term : t.terms) {
            CHECK(term.amplitude == 1.0);
            CHECK(term.psi_quarters == 3);  // cos(arg + 3pi/2) = sin(arg)
        }
    }

    TEST_CASE("x^2 + y^2 collapses to the law of cosines") {
        TrigSum t = expand(parse_bivariate("x^2+y^2"), Rational(1), Rational(1));
        CHECK(t.a00 == 2.0);
        REQUIRE(t.terms.size() == 1);
        CHECK(t.terms[0].r == 1);
        CHECK(t.terms[0].s == -1);
        CHECK(t.terms[0].amplitude == 2.0);
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        for (int i = 0; i < 50; ++i) {
            double th = u(rng), ph = u(rng);
            CHECK(eval_trig(t, th, ph) ==
                  doctest::Approx(2.0 + 2.0 * std::cos(th - ph)).epsilon(1e-12));
        }
    }

    TEST_CASE("linearity under term-wise merge") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        for (int trial = 0; trial < 8; ++trial) {
            BivariatePoly f = random_poly(rng, 4);
            BivariatePoly g = random_poly(rng, 4);
            Rational a(3, 2), b(3, 4);
            TrigSum tf = expand(f, a, b);
            TrigSum tg = expand(g, a, b);
            TrigSum tsum = expand(f + g, a, b);
            for (int i = 0; i < 40; ++i) {
                double th = u(rng), ph = u(rng);
                CHECK(eval_trig(tsum, th, ph) ==
                      doctest::Approx(eval_trig(tf, th, ph) + eval_trig(tg, th, ph))
                          .epsilon(1e-11));
            }
        }
    }

    TEST_CASE("canonical keys unique per phase class, idempotent, bounded order") {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 10; ++trial) {
            BivariatePoly f = random_poly(rng, 5);
            TrigSum t = expand(f, Rational(2), Rational(1));
            CHECK(t.max_order() <= f.degree());
            std::set<std::tuple<int, int, int>> seen;
            for (const TrigTerm& term : t.terms) {
                CHECK(term.amplitude > 0.0);
                CHECK(term.r >= 0);
                if (term.r == 0) CHECK(term.s >= 0);
                // cosine-type (psi 0 or pi) and sine-type (pi/2, 3pi/2) per key
                int klass = term.psi_quarters % 2;
                auto key = std::make_tuple(term.r, term.s, klass);
                CHECK(seen.insert(key).second);
            }
        }
    }

    TEST_CASE("exact rational amplitudes for rational data") {
        // (x + y)^2 with a = 1/2, b = 1/4 keeps every amplitude in Q
        BivariatePoly f = parse_bivariate("x^2 + 2*x*y + y^2");
        TrigSum t = expand(f, Rational(1, 2), Rational(1, 4));
        // A00 = a^2 + b^2 = 5/16
        CHECK(t.a00_exact == Rational(5, 16));
        for (std::size_t i = 0; i < t.terms.size(); ++i) {
            CHECK(t.exact_amplitudes[i] > 0);
            CHECK(t.terms[i].amplitude == t.exact_amplitudes[i].convert_to<double>());
        }
    }

    TEST_CASE("20 random rational polynomials match direct substitution") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        std::uniform_int_distribution<int> numer(1, 6);
        std::uniform_int_distribution<int> denom(1, 3);
        for (int trial = 0; trial < 20; ++trial) {
            BivariatePoly f = random_poly(rng, 5);
            Rational a(numer(rng), denom(rng));
            Rational b(numer(rng), denom(rng));
            TrigSum t = expand(f, a, b);
            double ad = a.convert_to<double>(), bd = b.convert_to<double>();
            double scale = std::max(1.0, t.amplitude_sum());
            for (int i = 0; i < 1000; ++i) {
                double th = u(rng), ph = u(rng);
                double got = eval_trig(t, th, ph);
                double want = direct_substitution(f, ad, bd, th, ph);
                CHECK(std::abs(got - want) <= 1e-9 * scale);
            }
        }
    }
}

TEST_SUITE("eval_trig") {
    TEST_CASE("constant sum") {
        TrigSum t;
        t.a00 = 3.0;
        CHECK(eval_trig(t, 0.4, -2.0) == 3.0);
    }

    TEST_CASE("x^2 at the stretched-out pose") {
        TrigSum t = expand(parse_bivariate("x^2"), Rational(1), Rational(1));
        CHECK(eval_trig(t, 0.0, 0.0) == doctest::Approx(4.0).epsilon(1e-14));
    }
}

TEST_SUITE("xy_to_angles") {
    TEST_CASE("fully stretched point is excluded") {
        CHECK_THROWS_AS(xy_to_angles(2.0, 1.0, Vec2{3.0, 0.0}), RangeError);
    }

    TEST_CASE("round trip recovers the generating pair") {
        double a = 2.0, b = 1.0;
        Vec2 p{a * std::cos(0.1) + b * std::cos(0.4), a * std::sin(0.1) + b * std::sin(0.4)};
        auto [th, ph] = xy_to_angles(a, b, p);
        CHECK(th == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(ph == doctest::Approx(0.4).epsilon(1e-12));
    }

    TEST_CASE("clockwise branch recovers wedge-ordered pairs") {
        double a = 8.0, b = 2.0;
        Vec2 p{a * std::cos(0.15) + b * std::cos(0.02),
               a * std::sin(0.15) + b * std::sin(0.02)};
        auto [th, ph] = xy_to_angles(a, b, p, Elbow::cw);
        CHECK(th == doctest::Approx(0.15).epsilon(1e-11));
        CHECK(ph == doctest::Approx(0.02).epsilon(1e-9));
    }

    TEST_CASE("annulus hole is excluded") {
        CHECK_THROWS_AS(xy_to_angles(2.0, 1.0, Vec2{0.5, 0.0}), RangeError);
    }

    TEST_CASE("round trip accuracy across the annulus") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uth(-1.2, 1.2);
        for (int i = 0; i < 500; ++i) {
            double th = uth(rng), ph = uth(rng) + th;
            double a = 2.0, b = 1.0;
            Vec2 p{a * std::cos(th) + b * std::cos(ph), a * std::sin(th) + b * std::sin(ph)};
            if (norm(p) <= 1.0 + 1e-6 || norm(p) >= 3.0 - 1e-6) continue;
            Elbow e = std::sin(ph - th) >= 0 ? Elbow::ccw : Elbow::cw;
            auto [t2, p2] = xy_to_angles(a, b, p, e);
            CHECK(std::abs(std::remainder(t2 - th, 2 * kPi)) < 1e-12);
            CHECK(std::abs(std::remainder(p2 - ph, 2 * kPi)) < 1e-12);
        }
    }
}

TEST_SUITE("choose_radii") {
    TEST_CASE("certifies the example disc for n = 2") {
        Disc disc{{0.5, 0.5}, 0.1};
        RadiiChoice rc = choose_radii(2, disc);
        CHECK(rc.margin > 0.0);
        CHECK(rc.theta_max * 3.0 < kPi / 4.0);
        CHECK(rc.phi_min > 0.0);
        CHECK(rc.theta_min > 2.0 * rc.phi_max);
        // fresh random re-verification
        CHECK(verify_radii(rc, 2, 1000, 999) > 0.0);
    }

    TEST_CASE("disc touching the origin is rejected") {
        CHECK_THROWS_AS(choose_radii(2, Disc{{0.05, 0.05}, 0.1}), RangeError);
    }

    TEST_CASE("degrees 3 and 4 also certify") {
        for (int n : {3, 4}) {
            RadiiChoice rc = choose_radii(n, Disc{{0.5, 0.5}, 0.1});
            CHECK(rc.margin > 0.0);
            CHECK(verify_radii(rc, n, 500, 4242) > 0.0);
        }
    }
}
