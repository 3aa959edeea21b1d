#include "kempe/gadgets.hpp"

#include <cmath>

#include "json.hpp"
#include "kempe/errors.hpp"

namespace kempe {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* gadget_type_name(GadgetType t) {
    switch (t) {
        case GadgetType::peaucellier: return "peaucellier";
        case GadgetType::strict_peaucellier: return "strict_peaucellier";
        case GadgetType::lineariser: return "lineariser";
        case GadgetType::translator: return "translator";
        case GadgetType::rotator: return "rotator";
        case GadgetType::copier: return "copier";
        case GadgetType::multiplier: return "multiplier";
        case GadgetType::divider: return "divider";
        case GadgetType::power: return "power";
        case GadgetType::scalar: return "scalar";
        case GadgetType::angle_adder: return "angle_adder";
        case GadgetType::reversor: return "reversor";
        case GadgetType::multiplicator: return "multiplicator";
    }
    return "?";
}

GadgetType gadget_type_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(GadgetType::multiplicator); ++i) {
        auto t = static_cast<GadgetType>(i);
        if (name == gadget_type_name(t)) return t;
    }
    throw ArgumentError("unknown gadget kind: " + name);
}

// ---- builders ----

namespace {

// Inversor cell line abscissa and maximal |y| reach for parameters (L, r, d).
double line_x(const GadgetKind& k) { return (k.L * k.L - k.r * k.r) / (2.0 * k.d); }

double line_y_max(const GadgetKind& k) {
    double qmax = (k.L * k.L - k.r * k.r) / (k.L - k.r);  // |q| at the near-folded extreme
    double x = line_x(k);
    return std::sqrt(std::max(qmax * qmax - x * x, 0.0));
}

void validate_inversor_params(const GadgetKind& k) {
    if (!(k.L > k.r && k.r > 0.0 && k.d > 0.0))
        throw ArgumentError("inversor parameters need L > r > 0 and d > 0");
    if ((k.L - k.r) / (2.0 * k.d) >= 1.0)
        throw ArgumentError("inversor crank circle never enters the admissible annulus");
}

Gadget make_peaucellier(const GadgetKind& k, bool strict) {
    validate_inversor_params(k);
    Gadget g;
    g.kind = k;
    Assembler a;
    JointId p1 = a.pin({0, 0}, "p1");
    JointId p2 = a.pin({k.d, 0}, "p2");
    a.anchor_base(p1, p2);
    a.bar(p1, p2);

    double tau0 = 2.0 * std::acos(std::min(1.0, (k.L + k.r) / (4.0 * k.d) +
                                                    (k.L - k.r) / (4.0 * k.d)));
    // home crank: middle of the admissible arc (positive side)
    double chi = (k.L - k.r) / (2.0 * k.d);
    double cmax = std::min(1.0, (k.L + k.r) / (2.0 * k.d));
    double cmid = 0.5 * (chi + cmax);
    tau0 = 2.0 * std::acos(cmid);

    JointId crank = a.joint(Vec2{k.d, 0} + unit_dir(tau0) * k.d, "crank");
    a.seed_input(crank);
    a.bar(p2, crank);
    JointId q = a.joint({line_x(k), 0.1}, "q");
    JointId u = a.joint({0, 0});
    JointId v = a.joint({0, 0});
    a.bar(p1, u);
    a.bar(p1, v);
    a.bar(u, crank);
    a.bar(v, crank);
    a.bar(u, q);
    a.bar(v, q);
    a.emit(StepKind::peaucellier_drive, {p1, p2, crank, q, u, v}, {k.L, k.r, 1.0});

    double ymax = line_y_max(k);
    if (strict) {
        JointId p3 = a.fixed_joint({line_x(k), 0}, "p3");
        double cap = 0.8 * ymax;
        double arm = 0.5 * cap;
        JointId tether = a.joint({line_x(k), 0.05}, "tether");
        a.bar(p3, tether);
        a.bar(tether, q);
        a.emit(StepKind::tong_elbow, {tether, p3, q}, {arm, arm, +1.0});
        g.ranges["q_y"] = Interval{-cap, cap, 2e-3};
    } else {
        g.ranges["q_y"] = Interval{-ymax, ymax, 2e-3};
    }
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"crank"};
    return g;
}

Gadget make_lineariser(const GadgetKind& k) {
    validate_inversor_params(k);
    if (k.n < 1) throw ArgumentError("lineariser fold count must be >= 1");
    Gadget g;
    g.kind = k;
    Assembler a;
    JointId p1 = a.pin({0, 0}, "p1");
    JointId p2 = a.pin({k.d, 0}, "p2");
    a.anchor_base(p1, p2);
    a.bar(p1, p2);
    double x = line_x(k);
    double ymax = line_y_max(k);
    for (int i = 0; i < k.n; ++i) {
        double y0 = (i - 0.5 * (k.n - 1)) * 0.15 * ymax;
        JointId q = a.joint({x, y0}, "q" + std::to_string(i + 1));
        a.seed_input(q);
        g.input_roles.push_back("q" + std::to_string(i + 1));
        JointId qp = a.joint({0, 0});
        JointId u = a.joint({0, 0});
        JointId v = a.joint({0, 0});
        a.bar(p1, u);
        a.bar(p1, v);
        a.bar(u, qp);
        a.bar(v, qp);
        a.bar(u, q);
        a.bar(v, q);
        a.bar(p2, qp);
        a.emit(StepKind::cell_internals, {p1, p2, q, qp, u, v}, {k.L, k.r, 1.0});
    }
    g.ranges["q_y"] = Interval{-ymax, ymax, 2e-3};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    return g;
}

Gadget make_translator(const GadgetKind& k) {
    if (k.reach <= 0.0) throw ArgumentError("translator reach must be positive");
    Gadget g;
    g.kind = k;
    Assembler a;
    JointId A = a.pin({0, 0}, "A");
    JointId helper = a.pin({0.0, -3.0 * k.reach}, "base");
    a.anchor_base(A, helper);
    JointId B = a.joint({k.reach, 0}, "B");
    JointId Ap = a.joint({0.3 * k.reach, 1.1 * k.reach}, "Aprime");
    a.seed_input(B);
    a.seed_input(Ap);
    TranslatorSizing sz;
    sz.ab_max = 2.0 * k.reach;
    sz.shift_min = 0.0;
    sz.shift_max = 2.5 * k.reach;
    JointId Bp = add_translator(a, A, B, Ap, sz);
    a.fw.set_label("Bprime", Bp);
    g.ranges["AB"] = Interval{0.0, 2.0 * k.reach, 1e-3};
    g.ranges["shift"] = Interval{0.0, 2.5 * k.reach, 1e-3};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"B", "Aprime"};
    return g;
}

Gadget make_rotator(const GadgetKind& k) {
    if (k.reach <= 0.0) throw ArgumentError("rotator reach must be positive");
    Gadget g;
    g.kind = k;
    Assembler a;
    JointId A = a.pin({0, 0}, "A");
    JointId helper = a.pin({0.0, -3.0 * k.reach}, "base");
    a.anchor_base(A, helper);
    JointId B = a.joint({0.5 * k.reach, 0}, "B");
    JointId tgt = a.joint({0.5 * k.reach, 0.6 * k.reach}, "target");
    a.seed_input(B);
    a.seed_input(tgt);
    JointId Bp = add_rotator(a, A, B, tgt, k.reach);
    a.fw.set_label("Bprime", Bp);
    g.ranges["AB"] = Interval{0.0, k.reach, 1e-3};
    g.ranges["rotation"] = Interval{-kPi + 0.15, kPi - 0.15, 1e-3};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"B", "target"};
    return g;
}

Gadget make_copier(const GadgetKind& k) {
    if (k.reach <= 0.0) throw ArgumentError("copier reach must be positive");
    Gadget g;
    g.kind = k;
    Assembler a;
    JointId A = a.pin({0, 0}, "A");
    JointId helper = a.pin({0.0, -3.0 * k.reach}, "base");
    a.anchor_base(A, helper);
    JointId B = a.joint({0.5 * k.reach, 0}, "B");
    JointId Ap = a.joint({0.2 * k.reach, 0.9 * k.reach}, "Aprime");
    JointId tgt = a.joint({0.2 * k.reach + 0.4 * k.reach, 1.2 * k.reach}, "target");
    a.seed_input(B);
    a.seed_input(Ap);
    a.seed_input(tgt);
    TranslatorSizing sz;
    sz.ab_max = 2.0 * k.reach;
    sz.shift_min = 0.0;
    sz.shift_max = 2.5 * k.reach;
    JointId T = add_translator(a, A, B, Ap, sz);
    JointId Bp = a.joint(a.fw.joints[Ap].home + Vec2{0.35 * k.reach, 0.2});
    a.fw.set_label("Bprime", Bp);
    a.emit(StepKind::separation_place, {Bp, A, B, Ap, tgt});
    add_rotator(a, Ap, T, Bp, 2.0 * k.reach, Bp);
    g.ranges["AB"] = Interval{0.0, 2.0 * k.reach, 1e-3};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"B", "Aprime", "target"};
    return g;
}

struct MulSetup {
    Assembler a;
    MultiplierFrame mf;
};

void mul_frame_pins(MulSetup& s) {
    JointId O = s.a.pin({0, 0}, "O");
    JointId X = s.a.pin({1, 0}, "X");
    s.a.anchor_base(O, X);
    JointId Y = s.a.fixed_joint({0, 1}, "Y");
    s.a.bar(O, X);
    s.a.bar(O, Y);
    s.mf.frame = Frame{};
    s.mf.O = O;
    s.mf.X = X;
    s.mf.Y = Y;
}

Gadget make_multiplier(const GadgetKind& k) {
    if (k.reach <= 0.0) throw ArgumentError("multiplier bound must be positive");
    Gadget g;
    g.kind = k;
    MulSetup s;
    mul_frame_pins(s);
    double R = k.reach;
    JointId A = s.a.joint({0.5 * R, 0}, "A");
    JointId B = s.a.joint({0, 0.5 * R}, "B");
    s.a.seed_input(A);
    s.a.seed_input(B);
    JointId C = add_multiplier_product(s.a, s.mf, A, B, R, R * R, true);
    s.a.fw.set_label("C", C);
    g.ranges["OA"] = Interval{0.0, R, 1e-3};
    g.ranges["OB"] = Interval{0.0, R, 1e-3};
    g.program = s.a.finalize(0, {});
    g.fw = std::move(s.a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"A", "B"};
    return g;
}

Gadget make_divider(const GadgetKind& k) {
    if (k.reach <= 0.0) throw ArgumentError("divider bound must be positive");
    Gadget g;
    g.kind = k;
    MulSetup s;
    mul_frame_pins(s);
    double R = k.reach;
    JointId C = s.a.joint({0.25 * R, 0}, "C");
    JointId A = s.a.joint({0.5 * R, 0}, "A");
    s.a.seed_input(C);
    s.a.seed_input(A);
    JointId B = add_divider(s.a, s.mf, C, A, 0.05 * R, R, R, true);
    s.a.fw.set_label("B", B);
    g.ranges["OA"] = Interval{0.05 * R, R, 1e-3};
    g.ranges["OC"] = Interval{0.0, R, 1e-3};
    g.ranges["OB"] = Interval{0.0, R, 1e-3};
    g.program = s.a.finalize(0, {});
    g.fw = std::move(s.a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"C", "A"};
    return g;
}

Gadget make_power(const GadgetKind& k) {
    if (k.k < 1) throw ArgumentError("power exponent must be >= 1");
    if (k.reach <= 0.0) throw ArgumentError("power bound must be positive");
    Gadget g;
    g.kind = k;
    MulSetup s;
    mul_frame_pins(s);
    double R = std::max(k.reach, 1.0);
    JointId in = s.a.joint({0.5, 0}, "in");
    s.a.seed_input(in);
    add_line_cell(s.a, {0.5 * R, 0}, {1, 0}, 0.55 * R + 0.3, in, -1.0);
    JointId out = add_power_chain(s.a, s.mf, in, k.k, k.reach);
    s.a.fw.set_label("out", out);
    g.ranges["in"] = Interval{0.0, k.reach, 1e-3};
    g.program = s.a.finalize(0, {});
    g.fw = std::move(s.a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"in"};
    return g;
}

Gadget make_scalar(const GadgetKind& k) {
    if (k.c <= 0.0) throw ArgumentError("scalar factor must be positive");
    Gadget g;
    g.kind = k;
    MulSetup s;
    mul_frame_pins(s);
    JointId A = s.a.joint({0.5, 0}, "A");
    s.a.seed_input(A);
    JointId C = add_scalar(s.a, s.mf, A, k.c, 1.0, true);
    s.a.fw.set_label("C", C);
    g.ranges["OA"] = Interval{0.0, 1.0, 1e-3};
    g.program = s.a.finalize(0, {});
    g.fw = std::move(s.a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"A"};
    return g;
}

Gadget make_angle_adder(const GadgetKind& k) {
    if (k.rho <= 0.0) throw ArgumentError("angle adder radius must be positive");
    Gadget g;
    g.kind = k;
    Assembler a;
    double rho = k.rho;
    JointId O = a.pin({0, 0}, "O");
    JointId base = a.pin({0, -3.0 * rho}, "base");
    a.anchor_base(O, base);
    JointId A0 = a.fixed_joint({rho, 0}, "A0");
    a.bar(O, A0);
    JointId B = a.joint(unit_dir(0.3) * rho, "theta_bar");
    JointId Ap = a.joint(unit_dir(0.4) * rho, "phi_bar");
    a.seed_input(B);
    a.seed_input(Ap);
    a.bar(O, B);
    a.bar(O, Ap);
    JointId Bp = a.joint(unit_dir(0.7) * rho, "out");
    a.bar(O, Bp);
    a.emit(StepKind::complex_combine, {Bp, O, B, Ap}, {rho});
    TranslatorSizing sz;
    sz.ab_max = 2.0 * rho;
    sz.shift_min = 0.0;
    sz.shift_max = 2.2 * rho;
    JointId T = add_translator(a, A0, B, Ap, sz);
    add_rotator(a, Ap, T, Bp, 2.0 * rho + 0.1, Bp);
    g.ranges["theta"] = Interval{-1.2, 1.2, 1e-3};
    g.ranges["phi"] = Interval{-1.2, 1.2, 1e-3};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"theta_bar", "phi_bar"};
    return g;
}

Gadget make_reversor(const GadgetKind& k) {
    if (k.rho <= 0.0) throw ArgumentError("reversor radius must be positive");
    Gadget g;
    g.kind = k;
    Assembler a;
    double p = k.rho, q = 0.5 * k.rho;
    JointId O = a.pin({0, 0}, "O");
    JointId base = a.pin({0, -3.0 * p}, "base");
    a.anchor_base(O, base);
    JointId E0 = a.fixed_joint({p, 0}, "E0");
    a.bar(O, E0);
    JointId X = a.joint(unit_dir(0.3) * q, "mirror");
    a.seed_input(X);
    a.bar(O, X);
    JointId Z = add_reflector(a, O, E0, X, p, q);
    a.fw.set_label("out", Z);
    g.ranges["alpha"] = Interval{0.0, kPi / 4.0, 0.04};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"mirror"};
    return g;
}

Gadget make_multiplicator(const GadgetKind& k) {
    if (k.rho <= 0.0) throw ArgumentError("multiplicator radius must be positive");
    Gadget g;
    g.kind = k;
    Assembler a;
    double p = k.rho, q = 0.5 * k.rho;
    double q2p = q * q / p;
    JointId O = a.pin({0, 0}, "O");
    JointId base = a.pin({0, -3.0 * p}, "base");
    a.anchor_base(O, base);
    JointId E0 = a.fixed_joint({p, 0}, "E0");
    a.bar(O, E0);
    JointId U = a.joint(unit_dir(0.1) * p, "alpha_bar");
    JointId V = a.joint(unit_dir(0.2) * q2p, "beta_bar");
    a.seed_input(U);
    a.seed_input(V);
    a.bar(O, U);
    a.bar(O, V);
    JointId X = a.joint(unit_dir(0.15) * q, "mirror");
    a.bar(O, X);
    a.emit(StepKind::bisector_tap, {X, O, U, V}, {q});
    add_reflector(a, O, U, X, p, q, V);
    JointId Z = add_reflector(a, O, E0, X, p, q);
    a.fw.set_label("out", Z);
    g.ranges["alpha"] = Interval{0.0, kPi / 4.0, 0.04};
    g.ranges["beta"] = Interval{0.0, kPi / 4.0, 0.04};
    g.program = a.finalize(0, {});
    g.fw = std::move(a.fw);
    g.interface = g.fw.labels;
    g.input_roles = {"alpha_bar", "beta_bar"};
    return g;
}

}  // namespace

Gadget build_gadget(const GadgetKind& kind) {
    switch (kind.type) {
        case GadgetType::peaucellier: return make_peaucellier(kind, false);
        case GadgetType::strict_peaucellier: return make_peaucellier(kind, true);
        case GadgetType::lineariser: return make_lineariser(kind);
        case GadgetType::translator: return make_translator(kind);
        case GadgetType::rotator: return make_rotator(kind);
        case GadgetType::copier: return make_copier(kind);
        case GadgetType::multiplier: return make_multiplier(kind);
        case GadgetType::divider: return make_divider(kind);
        case GadgetType::power: return make_power(kind);
        case GadgetType::scalar: return make_scalar(kind);
        case GadgetType::angle_adder: return make_angle_adder(kind);
        case GadgetType::reversor: return make_reversor(kind);
        case GadgetType::multiplicator: return make_multiplicator(kind);
    }
    throw ArgumentError("unknown gadget type");
}

// ---- forward placement ----

namespace {

double require_radius(Vec2 p, Vec2 o, double radius, const char* what) {
    double d = dist(p, o);
    if (std::abs(d - radius) > 1e-6 * std::max(1.0, radius))
        throw RangeError(std::string(what) + ": input joint must sit at its bar radius");
    return angle_of(p - o);
}

void require_on_axis(Vec2 p, Vec2 o, Vec2 dir, const char* what) {
    if (std::abs(cross(normalized(dir), p - o)) > 1e-6)
        throw RangeError(std::string(what) + ": input joint must lie on its axis");
}

}  // namespace

Placement gadget_forward_placement(const Gadget& g,
                                   const std::map<std::string, Vec2>& inputs) {
    std::vector<std::pair<JointId, Vec2>> seeds;
    for (const std::string& role : g.input_roles) {
        auto it = inputs.find(role);
        if (it == inputs.end()) throw ArgumentError("gadget_forward: missing input " + role);
        seeds.emplace_back(g.interface.at(role), it->second);
    }

    // kind-specific admissibility checks on the raw inputs
    const GadgetKind& k = g.kind;
    auto in = [&](const std::string& role) { return inputs.at(role); };
    switch (k.type) {
        case GadgetType::peaucellier:
        case GadgetType::strict_peaucellier: {
            Vec2 p2 = g.fw.joints[g.interface.at("p2")].home;
            require_radius(in("crank"), p2, k.d, "inversor crank");
            break;
        }
        case GadgetType::lineariser: {
            double x = line_x(k);
            Interval range = g.ranges.at("q_y");
            for (const std::string& role : g.input_roles) {
                Vec2 q = in(role);
                if (std::abs(q.x - x) > 1e-6)
                    throw RangeError("lineariser: designated joint off the gadget axis");
                if (!range.usable(q.y))
                    throw RangeError("lineariser: joint outside the usable segment");
            }
            break;
        }
        case GadgetType::translator: {
            double ab = dist(in("B"), Vec2{0, 0});
            if (ab > g.ranges.at("AB").usable_hi() + 1e-9)
                throw RangeError("translator: |AB| beyond reach");
            break;
        }
        case GadgetType::rotator: {
            if (dist(in("B"), Vec2{0, 0}) > g.ranges.at("AB").usable_hi() + 1e-9)
                throw RangeError("rotator: separation beyond reach");
            break;
        }
        case GadgetType::copier: {
            if (dist(in("B"), Vec2{0, 0}) > g.ranges.at("AB").usable_hi() + 1e-9)
                throw RangeError("copier: |AB| beyond reach");
            break;
        }
        case GadgetType::multiplier: {
            require_on_axis(in("A"), {0, 0}, {1, 0}, "multiplier A");
            require_on_axis(in("B"), {0, 0}, {0, 1}, "multiplier B");
            double alpha = in("A").x, beta = in("B").y;
            if (alpha < -1e-9 || alpha > g.ranges.at("OA").hi ||
                beta < -1e-9 || beta > g.ranges.at("OB").hi)
                throw RangeError("multiplier: separation outside [0, R]");
            break;
        }
        case GadgetType::divider: {
            require_on_axis(in("A"), {0, 0}, {1, 0}, "divider A");
            require_on_axis(in("C"), {0, 0}, {1, 0}, "divider C");
            double alpha = in("A").x, cval = in("C").x;
            if (alpha < g.ranges.at("OA").lo) throw RangeError("divider: divisor too small");
            if (cval < -1e-9 || cval / alpha > g.ranges.at("OB").hi)
                throw RangeError("divider: quotient outside [0, R]");
            break;
        }
        case GadgetType::power: {
            require_on_axis(in("in"), {0, 0}, {1, 0}, "power input");
            double s = in("in").x;
            if (s < -1e-9 || s > g.ranges.at("in").usable_hi() + 1e-9)
                throw RangeError("power: input outside [0, R]");
            break;
        }
        case GadgetType::scalar: {
            require_on_axis(in("A"), {0, 0}, {1, 0}, "scalar input");
            if (in("A").x < -1e-9 || in("A").x > g.ranges.at("OA").usable_hi() + 1e-9)
                throw RangeError("scalar: input outside [0, 1]");
            break;
        }
        case GadgetType::angle_adder: {
            double th = require_radius(in("theta_bar"), {0, 0}, k.rho, "angle adder theta");
            double ph = require_radius(in("phi_bar"), {0, 0}, k.rho, "angle adder phi");
            if (std::abs(th) > 1.25 || std::abs(ph) > 1.25)
                throw RangeError("angle adder: input angle outside the admissible arc");
            break;
        }
        case GadgetType::reversor: {
            double alpha = require_radius(in("mirror"), {0, 0}, 0.5 * k.rho, "reversor mirror");
            if (!g.ranges.at("alpha").usable(alpha))
                throw RangeError("reversor: mirror angle outside (0, pi/4)");
            break;
        }
        case GadgetType::multiplicator: {
            double p = k.rho, q = 0.5 * k.rho;
            double alpha = require_radius(in("alpha_bar"), {0, 0}, p, "multiplicator alpha");
            double beta = require_radius(in("beta_bar"), {0, 0}, q * q / p, "multiplicator beta");
            const Interval& r = g.ranges.at("alpha");
            if (!r.usable(alpha) || !r.usable(beta))
                throw RangeError("multiplicator: angle outside (0, pi/4)");
            if (!(alpha < beta - 1e-6))
                throw RangeError("multiplicator: needs alpha < beta (degenerate otherwise)");
            break;
        }
    }

    return eval_program(g.fw, g.program, {}, seeds);
}

std::map<JointId, Vec2> gadget_forward(const Gadget& g,
                                       const std::map<std::string, Vec2>& inputs) {
    Placement p = gadget_forward_placement(g, inputs);
    std::map<JointId, Vec2> out;
    for (const Joint& j : g.fw.joints) out[j.id] = p[j.id];
    return out;
}

// ---- contract sweeps ----

namespace {

struct SweepAcc {
    double worst_contract = 0.0;
    double worst_bars = 0.0;
    int count = 0;

    void feed(const Gadget& g, const Placement& p, double contract_dev) {
        worst_contract = std::max(worst_contract, std::abs(contract_dev));
        worst_bars = std::max(worst_bars, max_bar_residual(g.fw, p));
        ++count;
    }
};

double grid_at(const Interval& r, int i, int n) {
    return r.usable_lo() + (r.usable_hi() - r.usable_lo()) * i / std::max(n - 1, 1);
}

}  // namespace

VerificationReport contract_check(const Gadget& g, int grid_density, double tol) {
    if (grid_density < 2) throw ArgumentError("contract_check: grid density must be >= 2");
    const GadgetKind& k = g.kind;
    const int n = grid_density;
    SweepAcc acc;

    auto fwd = [&](const std::map<std::string, Vec2>& inputs) {
        return gadget_forward_placement(g, inputs);
    };

    switch (k.type) {
        case GadgetType::peaucellier:
        case GadgetType::strict_peaucellier: {
            double x = line_x(k);
            double kinv = k.L * k.L - k.r * k.r;
            Interval yr = g.ranges.at("q_y");
            Vec2 p1 = g.fw.joints[g.interface.at("p1")].home;
            Vec2 p2 = g.fw.joints[g.interface.at("p2")].home;
            JointId qid = g.interface.at("q");
            JointId crankid = g.interface.at("crank");
            for (int i = 0; i < n * n; ++i) {
                double y = grid_at(yr, i, n * n);
                // crank position from the intended line point via inversion
                Vec2 q{x, y};
                Vec2 vv = q - p1;
                Vec2 crank = p1 + vv * (kinv / norm2(vv));
                Placement p = fwd({{"crank", crank}});
                double dev = std::abs(p[qid].x - x);
                double inversion = dist(p[crankid], p1) * dist(p[qid], p1) - kinv;
                (void)p2;
                acc.feed(g, p, std::max(dev, std::abs(inversion)));
            }
            break;
        }
        case GadgetType::lineariser: {
            double x = line_x(k);
            Interval yr = g.ranges.at("q_y");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::map<std::string, Vec2> inputs;
                    for (int m = 0; m < k.n; ++m) {
                        double y = m == 0 ? grid_at(yr, i, n)
                                          : (m == 1 ? grid_at(yr, j, n)
                                                    : grid_at(yr, (i + j * m) % n, n));
                        inputs["q" + std::to_string(m + 1)] = Vec2{x, y};
                    }
                    Placement p = fwd(inputs);
                    // triangle-area colinearity across all designated joints
                    double dev = 0.0;
                    Vec2 q1 = p[g.interface.at("q1")];
                    Vec2 axis{0, 1};
                    for (int m = 1; m < k.n; ++m) {
                        Vec2 qm = p[g.interface.at("q" + std::to_string(m + 1))];
                        dev = std::max(dev, std::abs(cross(axis, qm - q1)));
                    }
                    acc.feed(g, p, dev);
                }
            break;
        }
        case GadgetType::translator: {
            Interval ab = g.ranges.at("AB");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = grid_at(ab, i, n);
                    double ang = 2.0 * kPi * j / n;
                    Vec2 B = unit_dir(ang) * s;
                    Vec2 Ap = unit_dir(0.4 + 2.0 * kPi * (j + 0.3) / n) * (1.1 * k.reach);
                    Placement p = fwd({{"B", B}, {"Aprime", Ap}});
                    Vec2 got = p[g.interface.at("Bprime")] - p[g.interface.at("Aprime")];
                    acc.feed(g, p, norm(got - B));
                }
            break;
        }
        case GadgetType::rotator: {
            Interval ab = g.ranges.at("AB");
            Interval rot = g.ranges.at("rotation");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = grid_at(ab, i, n);
                    double ang = grid_at(rot, j, n);
                    Vec2 B{s, 0};
                    Vec2 tgt = unit_dir(ang) * (0.8 * k.reach);
                    Placement p = fwd({{"B", B}, {"target", tgt}});
                    double dev = dist(p[g.interface.at("Bprime")], Vec2{0, 0}) - s;
                    double align = s < 1e-9 ? 0.0
                                            : cross(normalized(tgt),
                                                    normalized(p[g.interface.at("Bprime")]));
                    acc.feed(g, p, std::max(std::abs(dev), std::abs(align) * s));
                }
            break;
        }
        case GadgetType::copier: {
            Interval ab = g.ranges.at("AB");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = grid_at(ab, i, n) * 0.5;
                    double ang = 2.0 * kPi * j / n;
                    Vec2 B = unit_dir(0.3) * s;
                    Vec2 Ap = unit_dir(1.2) * (0.8 * k.reach);
                    Vec2 tgt = Ap + unit_dir(ang) * k.reach;
                    Placement p = fwd({{"B", B}, {"Aprime", Ap}, {"target", tgt}});
                    double dev = dist(p[g.interface.at("Bprime")], p[g.interface.at("Aprime")]) - s;
                    acc.feed(g, p, dev);
                }
            break;
        }
        case GadgetType::multiplier: {
            double R = k.reach;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double alpha = R * (0.05 + 0.9 * i / (n - 1));
                    double beta = R * (0.05 + 0.9 * j / (n - 1));
                    Placement p = fwd({{"A", Vec2{alpha, 0}}, {"B", Vec2{0, beta}}});
                    double got = p[g.interface.at("C")].x;
                    acc.feed(g, p, got - alpha * beta);
                }
            break;
        }
        case GadgetType::divider: {
            double R = k.reach;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double alpha = R * (0.1 + 0.85 * i / (n - 1));
                    double cval = 0.9 * alpha * R * j / (n - 1);
                    Placement p = fwd({{"C", Vec2{cval, 0}}, {"A", Vec2{alpha, 0}}});
                    double got = p[g.interface.at("B")].y;
                    acc.feed(g, p, got - cval / alpha);
                }
            break;
        }
        case GadgetType::power: {
            Interval r = g.ranges.at("in");
            for (int i = 0; i < n * n; ++i) {
                double s = grid_at(r, i, n * n);
                Placement p = fwd({{"in", Vec2{s, 0}}});
                acc.feed(g, p, p[g.interface.at("out")].x - std::pow(s, k.k));
            }
            break;
        }
        case GadgetType::scalar: {
            Interval r = g.ranges.at("OA");
            for (int i = 0; i < n * n; ++i) {
                double s = grid_at(r, i, n * n);
                Placement p = fwd({{"A", Vec2{s, 0}}});
                acc.feed(g, p, p[g.interface.at("C")].x - k.c * s);
            }
            break;
        }
        case GadgetType::angle_adder: {
            Interval r = g.ranges.at("theta");
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double th = grid_at(r, i, n);
                    double ph = grid_at(r, j, n);
                    Placement p = fwd({{"theta_bar", unit_dir(th) * k.rho},
                                       {"phi_bar", unit_dir(ph) * k.rho}});
                    double out = angle_of(p[g.interface.at("out")]);
                    acc.feed(g, p, std::remainder(out - th - ph, 2.0 * kPi));
                }
            break;
        }
        case GadgetType::reversor: {
            Interval r = g.ranges.at("alpha");
            for (int i = 0; i < n * n; ++i) {
                double alpha = grid_at(r, i, n * n);
                Placement p = fwd({{"mirror", unit_dir(alpha) * (0.5 * k.rho)}});
                double out = angle_of(p[g.interface.at("out")]);
                acc.feed(g, p, std::remainder(out - 2.0 * alpha, 2.0 * kPi));
            }
            break;
        }
        case GadgetType::multiplicator: {
            Interval r = g.ranges.at("alpha");
            double q2p = 0.25 * k.rho;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double alpha = grid_at(r, i, n);
                    double beta = grid_at(r, j, n);
                    if (!(alpha < beta - 1e-3)) continue;
                    Placement p = fwd({{"alpha_bar", unit_dir(alpha) * k.rho},
                                       {"beta_bar", unit_dir(beta) * q2p}});
                    double out = angle_of(p[g.interface.at("out")]);
                    acc.feed(g, p, std::remainder(out - alpha - beta, 2.0 * kPi));
                }
            break;
        }
    }

    VerificationReport rep;
    rep.max_bar_residual = acc.worst_bars;
    rep.max_trace_error = acc.worst_contract;
    rep.pass = acc.count > 0 && acc.worst_bars <= tol && acc.worst_contract <= tol;
    if (!rep.pass)
        rep.detail = acc.count == 0 ? "no admissible sweep points" : "contract deviation above tol";
    return rep;
}

std::string gadget_to_json(const Gadget& g) {
    nlohmann::json j = nlohmann::json::parse(framework_to_json(g.fw));
    j["kind"] = gadget_type_name(g.kind.type);
    j["params"] = {{"L", g.kind.L},     {"r", g.kind.r}, {"d", g.kind.d},
                   {"n", g.kind.n},     {"reach", g.kind.reach},
                   {"k", g.kind.k},     {"c", g.kind.c}, {"rho", g.kind.rho}};
    j["interface"] = nlohmann::json::object();
    for (const auto& [role, id] : g.interface) j["interface"][role] = id;
    j["ranges"] = nlohmann::json::object();
    for (const auto& [role, r] : g.ranges)
        j["ranges"][role] = {{"lo", r.lo}, {"hi", r.hi}, {"margin", r.margin}};
    return j.dump(2);
}

}  // namespace kempe
