#include "kempe/trigpoly.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include "json.hpp"
#include "kempe/errors.hpp"

namespace kempe {

void BivariatePoly::add_term(int i, int j, const Rational& c) {
    if (i < 0 || j < 0) throw ArgumentError("polynomial exponents must be nonnegative");
    if (c == 0) return;
    auto key = std::make_pair(i, j);
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, c);
    } else {
        it->second += c;
        if (it->second == 0) terms.erase(it);
    }
}

int BivariatePoly::degree() const {
    int d = -1;
    for (const auto& [k, c] : terms) d = std::max(d, k.first + k.second);
    return d;
}

Rational BivariatePoly::coeff(int i, int j) const {
    auto it = terms.find({i, j});
    return it == terms.end() ? Rational(0) : it->second;
}

double BivariatePoly::eval(double x, double y) const {
    double acc = 0.0;
    for (const auto& [k, c] : terms)
        acc += c.convert_to<double>() * std::pow(x, k.first) * std::pow(y, k.second);
    return acc;
}

BivariatePoly BivariatePoly::operator+(const BivariatePoly& o) const {
    BivariatePoly out = *this;
    for (const auto& [k, c] : o.terms) out.add_term(k.first, k.second, c);
    return out;
}

static Rational binom(int n, int k) {
    boost::multiprecision::cpp_int num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= (n - i);
        den *= (i + 1);
    }
    return Rational(num, den);
}

BivariatePoly BivariatePoly::shifted(const Rational& sx, const Rational& sy) const {
    BivariatePoly out;
    for (const auto& [k, c] : terms) {
        const int i = k.first, j = k.second;
        // (x - sx)^i expanded times (y - sy)^j expanded
        for (int p = 0; p <= i; ++p) {
            Rational cx = binom(i, p);
            Rational sxpow = 1;
            for (int q = 0; q < i - p; ++q) sxpow *= -sx;
            for (int py = 0; py <= j; ++py) {
                Rational cy = binom(j, py);
                Rational sypow = 1;
                for (int q = 0; q < j - py; ++q) sypow *= -sy;
                out.add_term(p, py, c * cx * sxpow * cy * sypow);
            }
        }
    }
    return out;
}

std::string BivariatePoly::to_string() const {
    if (terms.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [k, c] : terms) {
        if (!first) out << (c > 0 ? " + " : " - ");
        else if (c < 0) out << "-";
        Rational mag = c > 0 ? c : Rational(-c);
        bool has_var = k.first > 0 || k.second > 0;
        if (mag != 1 || !has_var) out << mag;
        if (mag != 1 && has_var) out << "*";
        if (k.first > 0) {
            out << "x";
            if (k.first > 1) out << "^" << k.first;
        }
        if (k.second > 0) {
            if (k.first > 0) out << "*";
            out << "y";
            if (k.second > 1) out << "^" << k.second;
        }
        first = false;
    }
    return out.str();
}

// ---- polynomial text parser ----

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, 1, static_cast<int>(pos) + 1);
    }
};

Rational parse_number(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.pos;
    while (c.pos < c.text.size() && std::isdigit(static_cast<unsigned char>(c.text[c.pos]))) ++c.pos;
    boost::multiprecision::cpp_int whole = 0;
    for (std::size_t i = start; i < c.pos; ++i) whole = whole * 10 + (c.text[i] - '0');
    bool any = c.pos > start;
    Rational value(whole);
    if (c.pos < c.text.size() && c.text[c.pos] == '.') {
        ++c.pos;
        std::size_t fstart = c.pos;
        boost::multiprecision::cpp_int frac = 0, scale = 1;
        while (c.pos < c.text.size() && std::isdigit(static_cast<unsigned char>(c.text[c.pos]))) {
            frac = frac * 10 + (c.text[c.pos] - '0');
            scale *= 10;
            ++c.pos;
        }
        if (c.pos == fstart) c.fail("expected digits after decimal point");
        value += Rational(frac, scale);
        any = true;
    }
    if (!any) c.fail("expected a number");
    return value;
}

int parse_exponent(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.pos;
    while (c.pos < c.text.size() && std::isdigit(static_cast<unsigned char>(c.text[c.pos]))) ++c.pos;
    if (c.pos == start) c.fail("expected integer exponent after '^'");
    int e = 0;
    for (std::size_t i = start; i < c.pos; ++i) e = e * 10 + (c.text[i] - '0');
    return e;
}

// term := factor ('*'? factor)*, factor := number | var ('^' int)?
// Adjacency like "3x" is accepted; everything else needs explicit '*'.
template <typename EmitFn>
void parse_sum(Cursor& c, const std::string& vars, EmitFn emit) {
    if (c.done()) c.fail("empty polynomial");
    while (!c.done()) {
        int sign = 1;
        while (true) {
            char ch = c.peek();
            if (ch == '+') {
                ++c.pos;
            } else if (ch == '-') {
                sign = -sign;
                ++c.pos;
            } else {
                break;
            }
        }
        Rational coeff(sign);
        std::map<char, int> exps;
        bool expect_factor = true;
        while (true) {
            char ch = c.peek();
            if (expect_factor || ch == '*') {
                if (ch == '*') {
                    if (expect_factor) c.fail("unexpected '*'");
                    ++c.pos;
                    ch = c.peek();
                }
                if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
                    coeff *= parse_number(c);
                } else if (vars.find(ch) != std::string::npos) {
                    ++c.pos;
                    int e = 1;
                    if (c.peek() == '^') {
                        ++c.pos;
                        e = parse_exponent(c);
                    }
                    exps[ch] += e;
                } else {
                    c.fail(std::string("expected coefficient or variable (") + vars + ")");
                }
                expect_factor = false;
                continue;
            }
            // implicit adjacency: variable directly after a number/variable
            if (vars.find(ch) != std::string::npos) {
                ++c.pos;
                int e = 1;
                if (c.peek() == '^') {
                    ++c.pos;
                    e = parse_exponent(c);
                }
                exps[ch] += e;
                continue;
            }
            break;
        }
        emit(coeff, exps);
        char ch = c.peek();
        if (ch != '+' && ch != '-' && ch != '\0')
            c.fail("expected '+' or '-' between terms");
    }
}

}  // namespace

BivariatePoly parse_bivariate(const std::string& text) {
    Cursor c{text};
    BivariatePoly poly;
    parse_sum(c, "xy", [&](const Rational& coeff, const std::map<char, int>& exps) {
        int i = 0, j = 0;
        for (const auto& [v, e] : exps) (v == 'x' ? i : j) += e;
        poly.add_term(i, j, coeff);
    });
    return poly;
}

std::vector<Rational> parse_univariate(const std::string& text) {
    Cursor c{text};
    std::vector<Rational> coeffs;
    parse_sum(c, "t", [&](const Rational& coeff, const std::map<char, int>& exps) {
        int e = 0;
        for (const auto& [v, ex] : exps) {
            (void)v;
            e += ex;
        }
        if (static_cast<std::size_t>(e) >= coeffs.size()) coeffs.resize(e + 1, Rational(0));
        coeffs[e] += coeff;
    });
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
}

// ---- trig expansion ----

namespace {

using Key = std::pair<int, int>;  // argument r*theta + s*phi

struct CS {
    Rational c;  // cosine coefficient
    Rational s;  // sine coefficient
};

using TrigBasisPoly = std::map<Key, CS>;

void add_basis(TrigBasisPoly& acc, Key k, const Rational& c, const Rational& s) {
    Rational cc = c, ss = s;
    if (k.first < 0 || (k.first == 0 && k.second < 0)) {
        k = {-k.first, -k.second};
        ss = -ss;  // sin is odd, cos is even
    }
    auto& slot = acc[k];
    slot.c += cc;
    slot.s += ss;
    if (slot.c == 0 && slot.s == 0) acc.erase(k);
}

TrigBasisPoly multiply(const TrigBasisPoly& lhs, const TrigBasisPoly& rhs) {
    TrigBasisPoly out;
    const Rational half(1, 2);
    for (const auto& [k1, v1] : lhs) {
        for (const auto& [k2, v2] : rhs) {
            Key sum{k1.first + k2.first, k1.second + k2.second};
            Key diff{k1.first - k2.first, k1.second - k2.second};
            // cos*cos and sin*sin land on cosines, mixed terms on sines
            Rational cc = v1.c * v2.c;
            if (cc != 0) {
                add_basis(out, diff, cc * half, 0);
                add_basis(out, sum, cc * half, 0);
            }
            Rational ss = v1.s * v2.s;
            if (ss != 0) {
                add_basis(out, diff, ss * half, 0);
                add_basis(out, sum, -ss * half, 0);
            }
            Rational sc = v1.s * v2.c;  // sin(X)cos(Y)
            if (sc != 0) {
                add_basis(out, sum, 0, sc * half);
                add_basis(out, diff, 0, sc * half);
            }
            Rational cs = v1.c * v2.s;  // cos(X)sin(Y)
            if (cs != 0) {
                add_basis(out, sum, 0, cs * half);
                add_basis(out, diff, 0, -cs * half);
            }
        }
    }
    return out;
}

}  // namespace

TrigSum expand(const BivariatePoly& f, const Rational& a, const Rational& b) {
    if (a <= 0 || b <= 0) throw ArgumentError("expand: arm lengths must be positive");

    int max_i = 0, max_j = 0;
    for (const auto& [k, c] : f.terms) {
        max_i = std::max(max_i, k.first);
        max_j = std::max(max_j, k.second);
    }

    TrigBasisPoly unit{{Key{0, 0}, CS{Rational(1), Rational(0)}}};
    TrigBasisPoly xhat, yhat;
    add_basis(xhat, {1, 0}, a, 0);
    add_basis(xhat, {0, 1}, b, 0);
    add_basis(yhat, {1, 0}, 0, a);
    add_basis(yhat, {0, 1}, 0, b);

    std::vector<TrigBasisPoly> xpow{unit}, ypow{unit};
    for (int i = 1; i <= max_i; ++i) xpow.push_back(multiply(xpow.back(), xhat));
    for (int j = 1; j <= max_j; ++j) ypow.push_back(multiply(ypow.back(), yhat));

    TrigBasisPoly total;
    for (const auto& [k, coeff] : f.terms) {
        TrigBasisPoly term = multiply(xpow[k.first], ypow[k.second]);
        for (const auto& [key, v] : term) add_basis(total, key, v.c * coeff, v.s * coeff);
    }

    // Canonical cosine-with-phase form, positive amplitudes.
    TrigSum out;
    for (const auto& [key, v] : total) {
        if (key.first == 0 && key.second == 0) {
            out.a00_exact = v.c;  // sin(0) contributes nothing
            out.a00 = v.c.convert_to<double>();
            continue;
        }
        if (v.c != 0) {
            TrigTerm t;
            t.r = key.first;
            t.s = key.second;
            t.psi_quarters = v.c > 0 ? 0 : 2;  // cos(x+pi) = -cos(x)
            Rational amp = v.c > 0 ? v.c : Rational(-v.c);
            t.amplitude = amp.convert_to<double>();
            out.terms.push_back(t);
            out.exact_amplitudes.push_back(amp);
        }
        if (v.s != 0) {
            TrigTerm t;
            t.r = key.first;
            t.s = key.second;
            t.psi_quarters = v.s > 0 ? 3 : 1;  // cos(x+3pi/2) = sin(x)
            Rational amp = v.s > 0 ? v.s : Rational(-v.s);
            t.amplitude = amp.convert_to<double>();
            out.terms.push_back(t);
            out.exact_amplitudes.push_back(amp);
        }
    }

    // graded-lexicographic order, deterministic
    std::vector<std::size_t> idx(out.terms.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        const TrigTerm& p = out.terms[i];
        const TrigTerm& q = out.terms[j];
        auto key = [](const TrigTerm& t) {
            return std::make_tuple(t.r + std::abs(t.s), t.r, t.s, t.psi_quarters);
        };
        return key(p) < key(q);
    });
    std::vector<TrigTerm> terms;
    std::vector<Rational> amps;
    for (std::size_t i : idx) {
        terms.push_back(out.terms[i]);
        amps.push_back(out.exact_amplitudes[i]);
    }
    out.terms = std::move(terms);
    out.exact_amplitudes = std::move(amps);
    return out;
}

TrigSum expand(const BivariatePoly& f, double a, double b) {
    return expand(f, Rational(a), Rational(b));
}

int TrigSum::max_order() const {
    int n = 0;
    for (const TrigTerm& t : terms) n = std::max(n, t.r + std::abs(t.s));
    return n;
}

double TrigSum::amplitude_sum() const {
    double acc = 0.0;
    for (const TrigTerm& t : terms) acc += t.amplitude;
    return acc;
}

double eval_trig(const TrigSum& t, double theta, double phi) {
    double acc = t.a00;
    for (const TrigTerm& term : t.terms) {
        double arg = term.r * theta + term.s * phi;
        double v;
        switch (term.psi_quarters & 3) {
            case 0: v = std::cos(arg); break;
            case 1: v = -std::sin(arg); break;
            case 2: v = -std::cos(arg); break;
            default: v = std::sin(arg); break;
        }
        acc += term.amplitude * v;
    }
    return acc;
}

std::string trigsum_to_json(const TrigSum& t) {
    nlohmann::json j;
    j["A00"] = t.a00;
    j["terms"] = nlohmann::json::array();
    for (const TrigTerm& term : t.terms)
        j["terms"].push_back({{"A", term.amplitude},
                              {"r", term.r},
                              {"s", term.s},
                              {"psi", term.psi_quarters * 1.5707963267948966}});
    return j.dump(2);
}

// ---- two-link inversion ----

std::pair<double, double> xy_to_angles(double a, double b, Vec2 p, Elbow elbow) {
    if (a <= 0.0 || b <= 0.0) throw ArgumentError("xy_to_angles: arm lengths must be positive");
    double d = norm(p);
    double lo = std::abs(b - a), hi = a + b;
    double slack = 1e-12 * hi;
    if (!(d > lo + slack && d < hi - slack))
        throw RangeError("xy_to_angles: point not strictly inside the two-link annulus");
    double cos_alpha = (a * a + d * d - b * b) / (2.0 * a * d);
    cos_alpha = std::clamp(cos_alpha, -1.0, 1.0);
    double alpha = std::acos(cos_alpha);
    double beta = angle_of(p);
    double theta = elbow == Elbow::ccw ? beta - alpha : beta + alpha;
    Vec2 rest = p - unit_dir(theta) * a;
    double phi = angle_of(rest);
    return {theta, phi};
}

// ---- wedge certificate search ----

namespace {

struct WedgeStats {
    bool ok = false;
    double theta_min = 0.0, theta_max = 0.0;
    double phi_min = 0.0, phi_max = 0.0;
    double margin = -1.0;
};

WedgeStats measure_point(int n, double a, double b, Vec2 p) {
    WedgeStats st;
    double theta, phi;
    try {
        std::tie(theta, phi) = xy_to_angles(a, b, p, Elbow::cw);
    } catch (const RangeError&) {
        return st;
    }
    st.ok = true;
    st.theta_min = st.theta_max = theta;
    st.phi_min = st.phi_max = phi;
    double m1 = theta - n * phi;
    double m2 = 0.25 * 3.14159265358979323846 - (n + 1) * theta;
    double m3 = phi;
    st.margin = std::min({m1, m2, m3});
    return st;
}

void fold(WedgeStats& acc, const WedgeStats& st) {
    if (!st.ok) {
        acc.ok = false;
        return;
    }
    if (acc.margin < 0.0 && acc.theta_max == 0.0 && acc.theta_min == 0.0) {
        acc = st;
        return;
    }
    acc.theta_min = std::min(acc.theta_min, st.theta_min);
    acc.theta_max = std::max(acc.theta_max, st.theta_max);
    acc.phi_min = std::min(acc.phi_min, st.phi_min);
    acc.phi_max = std::max(acc.phi_max, st.phi_max);
    acc.margin = std::min(acc.margin, st.margin);
}

WedgeStats sweep_disc(int n, double a, double b, const Disc& disc, int grid_points) {
    WedgeStats acc;
    acc.ok = true;
    int rings = std::max(4, static_cast<int>(std::lround(std::sqrt(grid_points / 6.0))));
    int per_ring = std::max(8, grid_points / rings);
    fold(acc, measure_point(n, a, b, disc.center));
    if (!acc.ok) return acc;
    for (int i = 1; i <= rings; ++i) {
        double rho = disc.radius * static_cast<double>(i) / rings;
        for (int k = 0; k < per_ring; ++k) {
            double ang = 2.0 * 3.14159265358979323846 * k / per_ring;
            fold(acc, measure_point(n, a, b, disc.center + unit_dir(ang) * rho));
            if (!acc.ok) return acc;
        }
    }
    return acc;
}

}  // namespace

RadiiChoice choose_radii(int n, const Disc& disc, int grid_points, std::uint64_t seed) {
    if (n < 1) throw ArgumentError("choose_radii: degree must be >= 1");
    if (disc.radius <= 0.0) throw ArgumentError("choose_radii: disc radius must be positive");
    if (!(disc.center.x > disc.radius && disc.center.y > disc.radius))
        throw RangeError(
            "choose_radii: disc must lie strictly inside the open first quadrant "
            "(angles are undefined toward the origin)");

    const double pi = 3.14159265358979323846;
    const double cap = 0.25 * pi / (n + 1);
    const double theta0 = 0.75 * cap;
    const double phi0 = 0.3 * theta0 / n;
    const double sin_sep = std::sin(theta0 - phi0);
    const double b_base = std::max(1.0, disc.radius / (0.4 * phi0 * sin_sep));

    double best_margin = -1e9;
    for (int bexp = 0; bexp < 14; ++bexp) {
        double b = b_base * std::pow(2.0, bexp);
        double a_base = std::max(4.0 * b, 8.0);
        for (int aexp = 0; aexp < 14; ++aexp) {
            double a = a_base * std::pow(2.0, aexp);
            Vec2 p0 = unit_dir(theta0) * a + unit_dir(phi0) * b;
            Disc shifted{p0, disc.radius};
            WedgeStats st = sweep_disc(n, a, b, shifted, grid_points);
            if (st.ok) best_margin = std::max(best_margin, st.margin);
            if (st.ok && st.margin > 1e-3 * cap) {
                RadiiChoice rc;
                rc.a = a;
                rc.b = b;
                rc.disc = shifted;
                rc.theta_min = st.theta_min;
                rc.theta_max = st.theta_max;
                rc.phi_min = st.phi_min;
                rc.phi_max = st.phi_max;
                rc.margin = st.margin;
                rc.seed = seed;
                if (verify_radii(rc, n, 1000, seed) > 0.0) return rc;
            }
        }
    }
    throw NoCertificateError("choose_radii: search exhausted without a certified wedge",
                             best_margin);
}

double verify_radii(const RadiiChoice& rc, int n, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 1e300;
    int done = 0;
    while (done < samples) {
        Vec2 d{u(rng), u(rng)};
        if (norm2(d) > 1.0) continue;
        ++done;
        WedgeStats st = measure_point(n, rc.a, rc.b, rc.disc.center + d * rc.disc.radius);
        if (!st.ok) return -1.0;
        worst = std::min(worst, st.margin);
    }
    return worst;
}

}  // namespace kempe
