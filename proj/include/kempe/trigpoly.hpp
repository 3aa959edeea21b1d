#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kempe/geometry.hpp"

namespace kempe {

using Rational = boost::multiprecision::cpp_rational;

/// Real bivariate polynomial sum a_ij x^i y^j with exact rational
/// coefficients (every finite double is rational, so parsing and direct
/// construction both stay exact). Zero coefficients are never stored.
struct BivariatePoly {
    std::map<std::pair<int, int>, Rational> terms;

    void add_term(int i, int j, const Rational& c);
    int degree() const;  // max i+j, -1 for the zero polynomial
    Rational coeff(int i, int j) const;
    double eval(double x, double y) const;
    BivariatePoly operator+(const BivariatePoly& o) const;

    /// f(x - sx, y - sy), exact binomial expansion.
    BivariatePoly shifted(const Rational& sx, const Rational& sy) const;

    std::string to_string() const;
};

/// Parses "x^2*y - 3*x + 1" (integer/decimal coefficients, x, y, ^, *, +, -).
BivariatePoly parse_bivariate(const std::string& text);

/// Univariate polynomial in t with the same grammar, variable name "t".
std::vector<Rational> parse_univariate(const std::string& text);

/// One canonical cosine term A*cos(r*theta + s*phi + psi), A > 0,
/// psi in {0, pi/2, pi, 3pi/2} encoded as quarter turns 0..3.
struct TrigTerm {
    double amplitude = 0.0;
    int r = 0;
    int s = 0;   // signed
    int psi_quarters = 0;
};

/// Canonical trig representation A00 + sum of cosine terms. Keys are
/// normalized to r >= 0 (s >= 0 when r = 0); at most one cosine-type
/// (psi in {0,pi}) and one sine-type (psi in {pi/2,3pi/2}) term per (r,s).
struct TrigSum {
    double a00 = 0.0;
    std::vector<TrigTerm> terms;

    // Exact amplitudes for the rational-exactness checks; parallel to terms.
    Rational a00_exact;
    std::vector<Rational> exact_amplitudes;

    int max_order() const;  // max r + |s|
    double amplitude_sum() const;
};

/// Substitutes x = a cos(theta) + b cos(phi), y = a sin(theta) + b sin(phi)
/// into f and expands with product-to-sum recurrences over the basis
/// {cos(r theta + s phi), sin(r theta + s phi)}; exact rational arithmetic
/// throughout, converted to the canonical positive-amplitude cosine form.
TrigSum expand(const BivariatePoly& f, const Rational& a, const Rational& b);
TrigSum expand(const BivariatePoly& f, double a, double b);

double eval_trig(const TrigSum& t, double theta, double phi);

std::string trigsum_to_json(const TrigSum& t);

enum class Elbow { ccw, cw };

/// Inverse of the two-link substitution: returns (theta, phi) with
/// a*(cos theta, sin theta) + b*(cos phi, sin phi) = p. The ccw convention
/// takes phi counterclockwise of theta; cw the opposite branch. Points on or
/// outside the annulus |b-a| < |p| < a+b raise RangeError.
std::pair<double, double> xy_to_angles(double a, double b, Vec2 p, Elbow elbow = Elbow::ccw);

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

/// Arm lengths plus shifted disc satisfying the wedge inequalities
/// 0 < n*phi < theta and (n+1)*theta < pi/4 at every sampled disc point
/// (clockwise elbow branch). The origin shift applied during the search is
/// folded into `disc` (shift = disc.center - input center).
struct RadiiChoice {
    double a = 0.0;
    double b = 0.0;
    Disc disc;                  // after the origin shift
    double theta_max = 0.0;     // wedge certificate box
    double theta_min = 0.0;
    double phi_max = 0.0;
    double phi_min = 0.0;
    double margin = 0.0;        // min over samples of min(theta - n*phi, pi/4 - (n+1)*theta, phi)
    std::uint64_t seed = 0;     // seed used for the random re-verification
};

/// Searches doubling arm lengths (and the folded-in shift) until a dense
/// grid of >= grid_points disc samples satisfies both wedge inequalities.
/// The input disc must lie strictly inside the open first quadrant
/// (RangeError otherwise); search exhaustion raises NoCertificateError with
/// the best margin seen.
RadiiChoice choose_radii(int n, const Disc& disc, int grid_points = 10000,
                         std::uint64_t seed = 12345);

/// Re-verifies a choice on fresh random disc samples; returns worst margin.
double verify_radii(const RadiiChoice& rc, int n, int samples, std::uint64_t seed);

}  // namespace kempe
