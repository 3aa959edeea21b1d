#include "kempe/builders.hpp"

#include <algorithm>
#include <cmath>

#include "kempe/errors.hpp"

namespace kempe {

JointId Assembler::joint(Vec2 approx_home, const std::string& label) {
    JointId id = fw.add_joint(approx_home, false);
    if (!label.empty()) fw.set_label(label, id);
    return id;
}

JointId Assembler::pin(Vec2 home, const std::string& label) {
    JointId id = fw.add_joint(home, true);
    if (!label.empty()) fw.set_label(label, id);
    home_placed_.push_back(id);
    return id;
}

JointId Assembler::fixed_joint(Vec2 home, const std::string& label) {
    auto [ha, hb] = anchor_hosts();
    JointId id = fw.add_joint(home, false);
    if (!label.empty()) fw.set_label(label, id);
    fw.add_bar(id, ha, 1.0);  // lengths rewritten at finalize
    fw.add_bar(id, hb, 1.0);
    home_placed_.push_back(id);
    return id;
}

void Assembler::bar(JointId a, JointId b) { fw.add_bar(a, b, 1.0); }

void Assembler::place_home(JointId j) { home_placed_.push_back(j); }

void Assembler::emit(StepKind kind, std::vector<JointId> js, std::vector<double> params) {
    steps.push_back(Instance{kind, std::move(js), std::move(params)});
}

void Assembler::anchor_base(JointId a, JointId b) {
    host_a_ = a;
    host_b_ = b;
    host_uses_ = 0;
}

std::pair<JointId, JointId> Assembler::anchor_hosts() {
    if (host_a_ < 0) throw StructuralError("assembler: anchor base not set");
    if (host_uses_ >= 4) {
        // extend the rigid strip; alternating side keeps it non-degenerate
        Vec2 a = fw.joints[host_a_].home;
        Vec2 b = fw.joints[host_b_].home;
        Vec2 d = b - a;
        if (norm(d) < 1e-9) d = Vec2{1.0, 0.0};
        Vec2 next = b + d * 0.6 + rot90(d) * (0.8 * ladder_flip_);
        ladder_flip_ = -ladder_flip_;
        JointId id = fw.add_joint(next, false);
        fw.add_bar(id, host_a_, 1.0);
        fw.add_bar(id, host_b_, 1.0);
        home_placed_.push_back(id);
        host_a_ = host_b_;
        host_b_ = id;
        host_uses_ = 0;
    }
    ++host_uses_;
    return {host_a_, host_b_};
}

void Assembler::seed_input(JointId j) { seeded_.push_back(j); }

Program Assembler::finalize(int n_drivers, const std::vector<double>& home_driver) {
    Program prog;
    prog.n_drivers = n_drivers;
    prog.steps.reserve(steps.size() + 1);
    if (!home_placed_.empty())
        prog.steps.push_back(Instance{StepKind::place_home, home_placed_, {}});
    for (auto& s : steps) prog.steps.push_back(s);

    validate_program(fw, prog, seeded_);

    // Evaluate once at the home driver to freeze exact homes, then derive all
    // bar lengths from those homes.
    std::vector<std::pair<JointId, Vec2>> seeds;
    for (JointId j : seeded_) seeds.emplace_back(j, fw.joints[j].home);
    Placement p = eval_program(fw, prog, home_driver, seeds);
    for (Joint& j : fw.joints) {
        if (std::isnan(p[j.id].x)) throw StructuralError("finalize: joint left unplaced");
        j.home = p[j.id];
    }
    for (Bar& b : fw.bars) {
        b.length = dist(fw.joints[b.a].home, fw.joints[b.b].home);
        if (b.length <= 0.0)
            throw StructuralError("finalize: zero-length bar between coincident joints");
    }
    return prog;
}

double sample_min(const std::function<double(double)>& f, double lo, double hi, int n) {
    double best = 1e300;
    for (int i = 0; i < n; ++i)
        best = std::min(best, f(lo + (hi - lo) * i / (n - 1)));
    return best;
}

double sample_max(const std::function<double(double)>& f, double lo, double hi, int n) {
    double best = -1e300;
    for (int i = 0; i < n; ++i)
        best = std::max(best, f(lo + (hi - lo) * i / (n - 1)));
    return best;
}

// ---- lineariser cells ----

static CellIds cell_joints_and_bars(Assembler& a, JointId p1, JointId p2, JointId q,
                                    double sigma) {
    CellIds c;
    c.p1 = p1;
    c.p2 = p2;
    c.sigma = sigma;
    Vec2 hp1 = a.fw.joints[p1].home;
    Vec2 hq = a.fw.joints[q].home;
    cell::CellJoints h = cell::internals_from_line_joint(hp1, cell::arm, cell::side, sigma, hq);
    c.qp = a.joint(h.qp);
    c.u = a.joint(h.u);
    c.v = a.joint(h.v);
    a.bar(p1, c.u);
    a.bar(p1, c.v);
    a.bar(c.u, c.qp);
    a.bar(c.v, c.qp);
    a.bar(c.u, q);
    a.bar(c.v, q);
    a.bar(p2, c.qp);
    a.emit(StepKind::cell_internals, {p1, p2, q, c.qp, c.u, c.v},
           {cell::arm, cell::side, sigma});
    return c;
}

CellIds add_line_cell(Assembler& a, Vec2 point, Vec2 dir, double halfspan, JointId q,
                      double side) {
    double sigma = cell::sigma_for_halfspan(halfspan);
    Vec2 u = normalized(dir);
    Vec2 n = rot90(u) * side;
    JointId p1 = a.fixed_joint(point - n * (cell::offset * sigma));
    JointId p2 = a.fixed_joint(point - n * ((cell::offset - cell::crank) * sigma));
    a.bar(p1, p2);
    return cell_joints_and_bars(a, p1, p2, q, sigma);
}

void add_coupler(Assembler& a, JointId d0, JointId d1, const std::vector<JointId>& qs,
                 double halfspan, double side) {
    double sigma = cell::sigma_for_halfspan(halfspan);
    Vec2 h0 = a.fw.joints[d0].home;
    Vec2 h1 = a.fw.joints[d1].home;
    Vec2 u = normalized(h1 - h0);
    Vec2 n = rot90(u) * side;
    double tmin = 1e300, tmax = -1e300;
    for (JointId q : qs) {
        double t = dot(a.fw.joints[q].home - h0, u);
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    Vec2 foot = h0 + u * (0.5 * (tmin + tmax));
    JointId p1 = a.joint(foot - n * (cell::offset * sigma));
    JointId p2 = a.joint(foot - n * ((cell::offset - cell::crank) * sigma));
    a.bar(p1, p2);
    std::vector<JointId> js{d0, d1, p1, p2};
    for (JointId q : qs) js.push_back(q);
    a.emit(StepKind::coupler_anchors, js, {sigma, side});
    for (JointId q : qs) cell_joints_and_bars(a, p1, p2, q, sigma);
}

// ---- translator ----

namespace {

struct ElbowPair {
    double c1, c2;
};

// Two-bar elbow radii whose reachable annulus covers [lo, hi] with margins.
ElbowPair size_elbow(double lo, double hi) {
    double hi_t = hi * 1.15 + 0.05;
    double lo_t = std::max(0.0, lo * 0.8 - 0.02 * hi_t);
    if (lo_t < 0.02 * hi_t) lo_t = 0.0;
    return {0.5 * (hi_t + lo_t), 0.5 * (hi_t - lo_t)};
}

void brace_parallelogram(Assembler& a, JointId s0, JointId s1, JointId t0, JointId t1) {
    // Parallelogram with s0->s1 parallel to t0->t1 (equal side pair): add
    // midpoint joints on both sides and the cross bar, which stays at the
    // other side's length throughout the parallelogram branch.
    Vec2 m1h = (a.fw.joints[s0].home + a.fw.joints[s1].home) * 0.5;
    Vec2 m2h = (a.fw.joints[t0].home + a.fw.joints[t1].home) * 0.5;
    JointId m1 = a.joint(m1h);
    JointId m2 = a.joint(m2h);
    a.bar(m1, s0);
    a.bar(m1, s1);
    a.bar(m2, t0);
    a.bar(m2, t1);
    a.bar(m1, m2);
    a.emit(StepKind::midpoint, {m1, s0, s1});
    a.emit(StepKind::midpoint, {m2, t0, t1});
}

Vec2 home_of(const Assembler& a, JointId j) { return a.fw.joints[j].home; }

Vec2 elbow_home(Vec2 p, double rp, Vec2 q, double rq, double sign) {
    double d = dist(p, q);
    if (d < 1e-12) return p + Vec2{rp, 0.0};
    CircleHit hit = circle_circle(p, rp, q, rq, 1e-6);
    if (!hit.ok) throw GeometryError("builder: elbow unreachable at home configuration");
    return sign >= 0.0 ? hit.p_ccw : hit.p_cw;
}

}  // namespace

JointId add_translator(Assembler& a, JointId A, JointId B, JointId Ap,
                       const TranslatorSizing& sz, JointId bp_existing) {
    double h = 0.55 * std::max(sz.ab_max, 0.05);
    ElbowPair e = size_elbow(sz.shift_min, sz.shift_max);

    Vec2 hA = home_of(a, A), hB = home_of(a, B), hAp = home_of(a, Ap);
    Vec2 hX = elbow_home(hA, h, hB, h, +1.0);
    Vec2 hXp = hAp + hX - hA;
    Vec2 hM = elbow_home(hX, e.c1, hXp, e.c2, +1.0);
    Vec2 hN = hA + hM - hX;
    Vec2 hP = elbow_home(hX, e.c1, hXp, e.c2, -1.0);
    Vec2 hQ = hB + hP - hX;
    Vec2 hBp = hXp + hB - hX;

    JointId X = a.joint(hX);
    JointId Xp = a.joint(hXp);
    JointId M = a.joint(hM);
    JointId N = a.joint(hN);
    JointId P = a.joint(hP);
    JointId Q = a.joint(hQ);
    JointId Bp = bp_existing >= 0 ? bp_existing : a.joint(hBp);
    if (bp_existing >= 0) a.fw.joints[Bp].home = hBp;

    a.bar(A, X);
    a.bar(B, X);
    a.bar(X, M);
    a.bar(A, N);
    a.bar(M, N);
    a.bar(M, Xp);
    a.bar(N, Ap);
    a.bar(Xp, Ap);
    a.bar(X, P);
    a.bar(B, Q);
    a.bar(P, Q);
    a.bar(P, Xp);
    a.bar(Q, Bp);
    a.bar(Xp, Bp);

    a.emit(StepKind::tong_elbow, {X, A, B}, {h, h, +1.0});
    a.emit(StepKind::sum_offset, {Xp, Ap, X, A});
    a.emit(StepKind::tong_elbow, {M, X, Xp}, {e.c1, e.c2, +1.0});
    a.emit(StepKind::sum_offset, {N, A, M, X});
    a.emit(StepKind::tong_elbow, {P, X, Xp}, {e.c1, e.c2, -1.0});
    a.emit(StepKind::sum_offset, {Q, B, P, X});
    a.emit(StepKind::sum_offset, {Bp, Xp, B, X});

    brace_parallelogram(a, X, A, M, N);    // sides X-A and M-N (length h)
    brace_parallelogram(a, M, N, Xp, Ap);  // sides M-N and Xp-Ap
    brace_parallelogram(a, X, B, P, Q);
    brace_parallelogram(a, P, Q, Xp, Bp);
    return Bp;
}

// ---- rotator ----

JointId add_rotator(Assembler& a, JointId A, JointId Bin, JointId Tgt, double s_max,
                    JointId bp_existing) {
    double ell = std::max(0.8 * s_max, 0.4);
    double m = 1.6 * s_max + 0.1;

    Vec2 hA = home_of(a, A), hBin = home_of(a, Bin), hTgt = home_of(a, Tgt);
    double s0 = dist(hA, hBin);
    Vec2 din = s0 > 1e-12 ? (hBin - hA) / s0 : Vec2{1.0, 0.0};
    Vec2 dout = normalized(hTgt - hA);
    Vec2 bis = normalized(din + dout);
    double cosb = dot(din, bis);
    double u0 = s0 * cosb + std::sqrt(std::max(m * m - s0 * s0 * (1.0 - cosb * cosb), 1e-12));

    JointId C = a.joint(hA + din * ell);
    JointId D = a.joint(hA + (din + dout) * ell);
    JointId Cp = a.joint(hA + dout * ell);
    JointId E = a.joint(hA + bis * u0);
    JointId Bp = bp_existing >= 0 ? bp_existing : a.joint(hA + dout * s0);

    a.bar(A, C);
    a.bar(C, D);
    a.bar(D, Cp);
    a.bar(Cp, A);
    a.bar(Bin, E);
    a.bar(E, Bp);

    a.emit(StepKind::rotator_core, {A, Bin, Tgt, C, D, Cp, E, Bp},
           {ell, m, bp_existing >= 0 ? 1.0 : 0.0});
    brace_parallelogram(a, A, C, Cp, D);  // rhombus sides A-C and Cp-D

    // three 3-fold couplers hold {A,C,Bin}, {A,D,E}, {A,Cp,Bp} colinear;
    // the lines rotate with the rhombus, so the linearisers float
    double e_hi = m + s_max;
    double span1 = std::max(ell, s_max) + 0.1;
    double span2 = std::max(2.0 * ell, e_hi) + 0.1;
    add_coupler(a, A, C, {A, C, Bin}, 0.55 * span1);
    add_coupler(a, A, D, {A, D, E}, 0.55 * span2);
    add_coupler(a, A, Cp, {A, Cp, Bp}, 0.55 * span1);
    return Bp;
}

// ---- multiplier family ----

MultiplierFrame add_multiplier_frame(Assembler& a, const Frame& frame) {
    MultiplierFrame mf;
    mf.frame = frame;
    mf.O = a.fixed_joint(frame.map({0, 0}));
    mf.X = a.fixed_joint(frame.map({1, 0}));
    mf.Y = a.fixed_joint(frame.map({0, 1}));
    a.bar(mf.O, mf.X);
    a.bar(mf.O, mf.Y);
    return mf;
}

static void multiplier_common(Assembler& a, const MultiplierFrame& mf, JointId Ain,
                              JointId Bin, JointId C, double in_max, double out_max,
                              bool place_c) {
    // translator copying (Y, A) to (B, A'), then the product joint C at the
    // intersection of line B-A' with the x-axis; a floating lineariser holds
    // {B, A', C} colinear.
    TranslatorSizing sz;
    sz.ab_max = std::sqrt(1.0 + in_max * in_max) + 0.1;
    sz.shift_min = 0.0;
    sz.shift_max = std::max(in_max, 1.0) + 1.1;
    JointId Ap = add_translator(a, mf.Y, Ain, Bin, sz);
    if (place_c) a.emit(StepKind::axis_intersect, {C, Bin, Ap, mf.O, mf.X});
    double span = std::max({in_max, out_max, 1.0});
    add_coupler(a, Bin, Ap, {Bin, Ap, C}, 0.8 * span + 0.6, 1.0);
}

JointId add_multiplier_product(Assembler& a, const MultiplierFrame& mf, JointId Ain,
                               JointId Bin, double in_max, double out_max,
                               bool constrain_inputs) {
    Vec2 o = home_of(a, mf.O);
    Vec2 xh = home_of(a, mf.X) - o;
    double alpha0 = dot(home_of(a, Ain) - o, xh);
    double beta0 = dot(home_of(a, Bin) - o, rot90(xh));
    JointId C = a.joint(o + xh * (alpha0 * beta0));
    if (constrain_inputs) {
        add_line_cell(a, o + xh * (0.5 * in_max), xh, 0.55 * in_max + 0.3, Ain, -1.0);
        add_line_cell(a, o + rot90(xh) * (0.5 * in_max), rot90(xh), 0.55 * in_max + 0.3, Bin,
                      1.0);
    }
    multiplier_common(a, mf, Ain, Bin, C, in_max, out_max, true);
    add_line_cell(a, o + xh * (0.5 * out_max), xh, 0.55 * out_max + 0.3, C, -1.0);
    return C;
}

JointId add_divider(Assembler& a, const MultiplierFrame& mf, JointId Cin, JointId Ain,
                    double divisor_min, double in_max, double out_max,
                    bool constrain_inputs) {
    (void)divisor_min;
    Vec2 o = home_of(a, mf.O);
    Vec2 xh = home_of(a, mf.X) - o;
    double alpha0 = dot(home_of(a, Ain) - o, xh);
    double c0 = dot(home_of(a, Cin) - o, xh);
    JointId B = a.joint(o + rot90(xh) * (c0 / alpha0));
    a.emit(StepKind::divider_place, {B, mf.O, mf.X, mf.Y, Ain, Cin});
    if (constrain_inputs) {
        add_line_cell(a, o + xh * (0.5 * in_max), xh, 0.55 * in_max + 0.3, Ain, -1.0);
        add_line_cell(a, o + xh * (0.5 * in_max), xh, 0.55 * in_max + 0.35, Cin, -1.0);
    }
    add_line_cell(a, o + rot90(xh) * (0.5 * out_max), rot90(xh), 0.55 * out_max + 0.3, B, 1.0);
    multiplier_common(a, mf, Ain, B, Cin, std::max(in_max, out_max), in_max, false);
    return B;
}

JointId add_scalar(Assembler& a, const MultiplierFrame& mf, JointId Ain, double c,
                   double in_max, bool constrain_inputs) {
    Vec2 o = home_of(a, mf.O);
    Vec2 xh = home_of(a, mf.X) - o;
    JointId B = a.fixed_joint(o + rot90(xh) * c);
    a.bar(mf.O, B);
    Vec2 hA = home_of(a, Ain);
    double alpha0 = dot(hA - o, xh);
    JointId C = a.joint(o + xh * (alpha0 * c));
    if (constrain_inputs)
        add_line_cell(a, o + xh * (0.5 * in_max), xh, 0.55 * in_max + 0.3, Ain, -1.0);
    multiplier_common(a, mf, Ain, B, C, std::max(in_max, c), c * in_max, true);
    add_line_cell(a, o + xh * (0.5 * c * in_max), xh, 0.55 * c * in_max + 0.3, C, -1.0);
    return C;
}

JointId add_power_chain(Assembler& a, const MultiplierFrame& mf, JointId in_axis, int k,
                        double in_max) {
    if (k < 1) throw ArgumentError("power chain: exponent must be >= 1");
    if (k == 1) return in_axis;

    // binary addition chain: squarings for each bit, then combine set bits
    std::vector<std::pair<int, int>> products;  // (i, j) -> i + j
    int top = 1;
    while (2 * top <= k) {
        products.emplace_back(top, top);
        top *= 2;
    }
    int acc = top;
    for (int bit = top / 2; bit >= 1; bit /= 2)
        if (k & bit) {
            products.emplace_back(acc, bit);
            acc += bit;
        }

    std::map<int, JointId> on_x{{1, in_axis}};
    std::map<int, JointId> on_y;
    double m = std::max(in_max, 1.0);
    for (auto [i, j] : products) {
        if (!on_y.count(j)) {
            JointId rotated = add_rotator(a, mf.O, on_x[j], mf.Y, std::pow(m, j) + 0.2);
            on_y[j] = rotated;
        }
        on_x[i + j] = add_multiplier_product(a, mf, on_x[i], on_y[j], std::pow(m, std::max(i, j)),
                                             std::pow(m, i + j));
    }
    return on_x[k];
}

// ---- Kempe reflector ----

JointId add_reflector(Assembler& a, JointId O, JointId in_full, JointId mirror, double p,
                      double q, JointId out_existing) {
    Vec2 o = home_of(a, O);
    Vec2 hin = home_of(a, in_full);
    Vec2 hx = home_of(a, mirror);
    double iota = angle_of(hin - o);
    double mu = angle_of(hx - o);
    double q2p = q * q / p;

    Vec2 apt = o + unit_dir(iota) * p;
    Vec2 hB = reflect_line(apt + hx - o, apt, hx);
    JointId B = a.joint(hB);
    JointId Y = a.joint(hx + (hB - hx) * (q2p / p));
    JointId Z = out_existing >= 0 ? out_existing : a.joint(o + unit_dir(2 * mu - iota) * q2p);

    a.bar(in_full, B);   // q
    a.bar(B, mirror);    // p
    a.bar(mirror, Y);    // q^2/p, rigid on the bar toward B
    a.bar(Y, B);         // p - q^2/p
    a.bar(Y, Z);         // q
    a.bar(Z, O);         // q^2/p
    a.emit(StepKind::reflector_core, {O, in_full, mirror, B, Y, Z},
           {p, q, out_existing >= 0 ? 1.0 : 0.0});
    return Z;
}

JointId add_radial_mount(Assembler& a, JointId O, JointId host, double host_radius,
                         double radius, int quarters) {
    if (quarters == 0 && std::abs(radius - host_radius) < 1e-12) return host;
    double lx = 0.0, ly = 0.0;
    switch (quarters & 3) {
        case 0: lx = radius; break;
        case 1: ly = radius; break;
        case 2: lx = -radius; break;
        default: ly = -radius; break;
    }
    Vec2 o = home_of(a, O);
    Vec2 u = normalized(home_of(a, host) - o);
    JointId j = a.joint(o + u * lx + rot90(u) * ly);
    a.emit(StepKind::frame_mount, {j, O, host}, {lx, ly});
    a.bar(O, j);
    a.bar(j, host);
    return j;
}

}  // namespace kempe
