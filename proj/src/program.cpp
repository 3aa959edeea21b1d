#include "kempe/program.hpp"

#include <cmath>

#include "json.hpp"
#include "kempe/errors.hpp"

namespace kempe {

namespace cell {

CellJoints internals_from_line_joint(Vec2 p1, double L, double r, double sigma, Vec2 q) {
    CellJoints out;
    Vec2 v = q - p1;
    double m2 = norm2(v);
    double m = std::sqrt(m2);
    double mlo = sigma * (L - r) * (1.0 + 1e-6);
    double mhi = sigma * (L + r) * (1.0 - 1e-6);
    if (!(m > mlo && m < mhi))
        throw GeometryError("lineariser cell: joint outside the admissible annulus");
    out.qp = p1 + v * ((L * L - r * r) * sigma * sigma / m2);
    CircleHit hit = circle_circle(p1, L * sigma, out.qp, r * sigma);
    if (!hit.ok) throw GeometryError("lineariser cell: rhombus arms cannot close");
    out.u = hit.p_ccw;
    out.v = hit.p_cw;
    return out;
}

}  // namespace cell

static Vec2 get(const Placement& p, JointId j) { return p[j]; }

Placement eval_program(const Framework& fw, const Program& prog,
                       const std::vector<double>& driver,
                       const std::vector<std::pair<JointId, Vec2>>& seeds) {
    if (static_cast<int>(driver.size()) < prog.n_drivers)
        throw ArgumentError("eval_program: missing driver values");
    Placement p(fw.joints.size(), Vec2{std::nan(""), std::nan("")});
    for (const auto& [j, pos] : seeds) p[j] = pos;

    for (const Instance& step : prog.steps) {
        const auto& js = step.js;
        const auto& par = step.params;
        switch (step.kind) {
            case StepKind::place_home:
                for (JointId j : js) p[j] = fw.joints[j].home;
                break;
            case StepKind::driver_segment: {
                double s = driver[static_cast<int>(par[4])];
                p[js[0]] = Vec2{par[0], par[1]} + Vec2{par[2], par[3]} * s;
                break;
            }
            case StepKind::driver_polar: {
                double ang = driver[static_cast<int>(par[1])];
                p[js[0]] = get(p, js[1]) + unit_dir(ang) * par[0];
                break;
            }
            case StepKind::sum_offset:
                p[js[0]] = get(p, js[1]) + get(p, js[2]) - get(p, js[3]);
                break;
            case StepKind::midpoint:
                p[js[0]] = (get(p, js[1]) + get(p, js[2])) * 0.5;
                break;
            case StepKind::frame_mount: {
                Vec2 a = get(p, js[1]), b = get(p, js[2]);
                Vec2 u = normalized(b - a);
                p[js[0]] = a + u * par[0] + rot90(u) * par[1];
                break;
            }
            case StepKind::tong_elbow: {
                Vec2 a = get(p, js[1]), b = get(p, js[2]);
                double ra = par[0], rb = par[1];
                double d = dist(a, b);
                if (d < 1e-12 * std::max(1.0, ra)) {
                    // closed tong: any direction preserves both bars
                    p[js[0]] = a + Vec2{ra, 0.0};
                    break;
                }
                if (d > (ra + rb) * (1.0 + 1e-9) || d < std::abs(ra - rb) * (1.0 - 1e-9))
                    throw GeometryError("elbow: endpoints outside the reachable annulus");
                CircleHit hit = circle_circle(a, ra, b, rb, 1e-7);
                if (!hit.ok) throw GeometryError("elbow: no intersection");
                p[js[0]] = par[2] >= 0.0 ? hit.p_ccw : hit.p_cw;
                break;
            }
            case StepKind::cell_internals: {
                cell::CellJoints c = cell::internals_from_line_joint(get(p, js[0]), par[0],
                                                                     par[1], par[2], get(p, js[2]));
                p[js[3]] = c.qp;
                p[js[4]] = c.u;
                p[js[5]] = c.v;
                break;
            }
            case StepKind::peaucellier_drive: {
                Vec2 p1 = get(p, js[0]);
                Vec2 crank = get(p, js[2]);
                double L = par[0], r = par[1], sigma = par[2];
                Vec2 v = crank - p1;
                double m2 = norm2(v);
                double m = std::sqrt(m2);
                double mlo = sigma * (L - r) * (1.0 + 1e-6);
                double mhi = sigma * (L + r) * (1.0 - 1e-6);
                if (!(m > mlo && m < mhi))
                    throw RangeError("inversor: crank outside admissible arc");
                Vec2 q = p1 + v * ((L * L - r * r) * sigma * sigma / m2);
                p[js[3]] = q;
                CircleHit hit = circle_circle(p1, L * sigma, crank, r * sigma);
                if (!hit.ok) throw GeometryError("inversor: rhombus cannot close");
                p[js[4]] = hit.p_ccw;
                p[js[5]] = hit.p_cw;
                break;
            }
            case StepKind::coupler_anchors: {
                double sigma = par[0];
                double side_sign = par[1];
                Vec2 d0 = get(p, js[0]), d1 = get(p, js[1]);
                Vec2 dir = d1 - d0;
                if (norm(dir) < 1e-12) throw GeometryError("coupler: degenerate line");
                dir = normalized(dir);
                Vec2 n = rot90(dir) * side_sign;
                double tmin = 1e300, tmax = -1e300;
                for (std::size_t i = 4; i < js.size(); ++i) {
                    Vec2 q = get(p, js[i]);
                    if (std::abs(dot(q - d0, rot90(dir))) > 1e-6 * std::max(1.0, sigma))
                        throw GeometryError("coupler: constrained joint off the shared line");
                    double t = dot(q - d0, dir);
                    tmin = std::min(tmin, t);
                    tmax = std::max(tmax, t);
                }
                if ((tmax - tmin) * 0.5 > cell::usable_halfspan * sigma * 1.02)
                    throw GeometryError("coupler: constrained joints exceed sized span");
                Vec2 foot = d0 + dir * ((tmin + tmax) * 0.5);
                p[js[2]] = foot - n * (cell::offset * sigma);
                p[js[3]] = foot - n * ((cell::offset - cell::crank) * sigma);
                break;
            }
            case StepKind::axis_intersect: {
                Vec2 o = get(p, js[3]);
                LineHit hit = line_intersect_axis(get(p, js[1]), get(p, js[2]), o,
                                                  get(p, js[4]) - o);
                if (!hit.ok) throw GeometryError("axis intersection: lines parallel");
                p[js[0]] = hit.point;
                break;
            }
            case StepKind::divider_place: {
                Vec2 o = get(p, js[1]);
                Vec2 xhat = normalized(get(p, js[2]) - o);
                Vec2 yhat = normalized(get(p, js[3]) - o);
                double alpha = dot(get(p, js[4]) - o, xhat);
                double cval = dot(get(p, js[5]) - o, xhat);
                if (std::abs(alpha) < 1e-12) throw RangeError("divider: divisor separation is zero");
                p[js[0]] = o + yhat * (cval / alpha);
                break;
            }
            case StepKind::rotator_core: {
                Vec2 a = get(p, js[0]);
                Vec2 bin = get(p, js[1]);
                Vec2 tgt = get(p, js[2]);
                double ell = par[0], m = par[1];
                double s = dist(a, bin);
                Vec2 din = s > 1e-12 ? (bin - a) / s : Vec2{1.0, 0.0};
                Vec2 dout = tgt - a;
                if (norm(dout) < 1e-12) throw GeometryError("rotator: undefined output direction");
                dout = normalized(dout);
                Vec2 bis = din + dout;
                double bn = norm(bis);
                if (bn < 1e-9) throw RangeError("rotator: opposite directions are inadmissible");
                bis = bis / bn;
                double cosb = dot(din, bis);
                double disc = m * m - s * s * (1.0 - cosb * cosb);
                if (disc <= 0.0) throw RangeError("rotator: separation beyond reach");
                double u = s * cosb + std::sqrt(disc);
                p[js[3]] = a + din * ell;        // c
                p[js[5]] = a + dout * ell;       // cp
                p[js[4]] = get(p, js[3]) + get(p, js[5]) - a;  // d, rhombus closure
                p[js[6]] = a + bis * u;          // e
                Vec2 bp = a + dout * s;
                if (par.size() > 2 && par[2] != 0.0) {
                    if (dist(bp, get(p, js[7])) > 1e-6)
                        throw GeometryError("rotator: shared output inconsistent with inputs");
                } else {
                    p[js[7]] = bp;
                }
                break;
            }
            case StepKind::bisector_tap: {
                Vec2 o = get(p, js[1]);
                double au = angle_of(get(p, js[2]) - o);
                double av = angle_of(get(p, js[3]) - o);
                p[js[0]] = o + unit_dir(0.5 * (au + av)) * par[0];
                break;
            }
            case StepKind::reflector_core: {
                Vec2 o = get(p, js[0]);
                Vec2 in = get(p, js[1]);
                Vec2 x = get(p, js[2]);
                double pp = par[0], qq = par[1];
                bool z_external = par[2] != 0.0;
                double iota = angle_of(in - o);
                double mu = angle_of(x - o);
                if (std::abs(std::remainder(iota - mu, 2.0 * 3.14159265358979323846)) < 1e-9)
                    throw RangeError("reflector: input aligned with mirror (flat contraparallelogram)");
                Vec2 apt = o + unit_dir(iota) * pp;
                Vec2 bpar = apt + (x - o);
                Vec2 b = reflect_line(bpar, apt, x);
                p[js[3]] = b;
                p[js[4]] = x + (b - x) * (qq * qq / (pp * pp));
                Vec2 z = o + unit_dir(2.0 * mu - iota) * (qq * qq / pp);
                if (z_external) {
                    if (dist(z, get(p, js[5])) > 1e-6)
                        throw GeometryError("reflector: closure joint inconsistent with inputs");
                } else {
                    p[js[5]] = z;
                }
                break;
            }
            case StepKind::corner_point:
                p[js[0]] = Vec2{get(p, js[1]).x, get(p, js[2]).y};
                break;
            case StepKind::project_point:
                p[js[0]] = par[0] == 0.0 ? Vec2{get(p, js[1]).x, par[1]}
                                         : Vec2{par[1], get(p, js[1]).y};
                break;
            case StepKind::interval_tracer: {
                // params: [mode, K, b_1..b_K]; js: [j, src_1..src_K]
                // mode 0: intersect [x_k - b_k, x_k + b_k], place x at the midpoint.
                // mode 1: same on y. The paired step fills the other coordinate.
                int mode = static_cast<int>(par[0]);
                int K = static_cast<int>(par[1]);
                double lo = -1e300, hi = 1e300;
                for (int k = 0; k < K; ++k) {
                    Vec2 src = get(p, js[1 + k]);
                    double v = mode == 0 ? src.x : src.y;
                    lo = std::max(lo, v - par[2 + k]);
                    hi = std::min(hi, v + par[2 + k]);
                }
                if (lo > hi) throw GeometryError("tracer: tether intervals have empty intersection");
                double mid = 0.5 * (lo + hi);
                Vec2 cur = p[js[0]];
                if (mode == 0)
                    p[js[0]] = Vec2{mid, cur.y};
                else
                    p[js[0]] = Vec2{cur.x, mid};
                break;
            }
            case StepKind::rotate_about: {
                Vec2 o = get(p, js[1]);
                Vec2 v = get(p, js[2]) - o;
                p[js[0]] = o + Vec2{par[0] * v.x - par[1] * v.y, par[1] * v.x + par[0] * v.y};
                break;
            }
            case StepKind::complex_combine: {
                Vec2 o = get(p, js[1]);
                p[js[0]] = o + cmul(get(p, js[2]) - o, get(p, js[3]) - o) / par[0];
                break;
            }
            case StepKind::separation_place: {
                Vec2 anchor = get(p, js[3]);
                Vec2 d = get(p, js[4]) - anchor;
                if (norm(d) < 1e-12)
                    throw GeometryError("separation_place: undefined output direction");
                p[js[0]] = anchor + normalized(d) * dist(get(p, js[1]), get(p, js[2]));
                break;
            }
        }
    }
    return p;
}

void validate_program(const Framework& fw, const Program& prog,
                      const std::vector<JointId>& seeded) {
    std::vector<int> state(fw.joints.size(), 0);  // 0 unwritten, 1 written
    for (JointId j : seeded) state[j] = 1;

    auto need = [&](JointId j) {
        if (j < 0 || j >= static_cast<JointId>(fw.joints.size()))
            throw StructuralError("program references absent joint");
        if (!state[j]) throw StructuralError("program step reads unplaced joint");
    };
    auto write = [&](JointId j) {
        if (j < 0 || j >= static_cast<JointId>(fw.joints.size()))
            throw StructuralError("program writes absent joint");
        if (state[j]) throw StructuralError("program writes a joint twice");
        state[j] = 1;
    };

    for (const Instance& step : prog.steps) {
        const auto& js = step.js;
        switch (step.kind) {
            case StepKind::place_home:
                for (JointId j : js) write(j);
                break;
            case StepKind::driver_segment:
                write(js[0]);
                break;
            case StepKind::driver_polar:
                need(js[1]);
                write(js[0]);
                break;
            case StepKind::sum_offset:
                need(js[1]); need(js[2]); need(js[3]);
                write(js[0]);
                break;
            case StepKind::midpoint:
            case StepKind::frame_mount:
            case StepKind::tong_elbow:
                need(js[1]); need(js[2]);
                write(js[0]);
                break;
            case StepKind::cell_internals:
                need(js[0]); need(js[1]); need(js[2]);
                write(js[3]); write(js[4]); write(js[5]);
                break;
            case StepKind::peaucellier_drive:
                need(js[0]); need(js[1]); need(js[2]);
                write(js[3]); write(js[4]); write(js[5]);
                break;
            case StepKind::coupler_anchors:
                need(js[0]); need(js[1]);
                for (std::size_t i = 4; i < js.size(); ++i) need(js[i]);
                write(js[2]); write(js[3]);
                break;
            case StepKind::axis_intersect:
                need(js[1]); need(js[2]); need(js[3]); need(js[4]);
                write(js[0]);
                break;
            case StepKind::divider_place:
                for (std::size_t i = 1; i < js.size(); ++i) need(js[i]);
                write(js[0]);
                break;
            case StepKind::rotator_core:
                need(js[0]); need(js[1]); need(js[2]);
                for (int i = 3; i < 7; ++i) write(js[i]);
                if (step.params.size() > 2 && step.params[2] != 0.0)
                    need(js[7]);
                else
                    write(js[7]);
                break;
            case StepKind::bisector_tap:
                need(js[1]); need(js[2]); need(js[3]);
                write(js[0]);
                break;
            case StepKind::reflector_core:
                need(js[0]); need(js[1]); need(js[2]);
                write(js[3]); write(js[4]);
                if (step.params[2] != 0.0)
                    need(js[5]);
                else
                    write(js[5]);
                break;
            case StepKind::corner_point:
                need(js[1]); need(js[2]);
                write(js[0]);
                break;
            case StepKind::project_point:
                need(js[1]);
                write(js[0]);
                break;
            case StepKind::interval_tracer: {
                int K = static_cast<int>(step.params[1]);
                for (int k = 0; k < K; ++k) need(js[1 + k]);
                // written across the two paired tracer steps; first writes, second updates
                if (!state[js[0]]) state[js[0]] = 1;
                break;
            }
            case StepKind::rotate_about:
                need(js[1]); need(js[2]);
                write(js[0]);
                break;
            case StepKind::complex_combine:
                need(js[1]); need(js[2]); need(js[3]);
                write(js[0]);
                break;
            case StepKind::separation_place:
                need(js[1]); need(js[2]); need(js[3]); need(js[4]);
                write(js[0]);
                break;
        }
    }
    for (const Joint& j : fw.joints)
        if (!state[j.id]) throw StructuralError("program leaves a joint unplaced");
}

double instance_contract_deviation(const Framework& fw, const Program& prog,
                                   const Placement& p) {
    (void)fw;
    double worst = 0.0;
    auto bump = [&](double v) { worst = std::max(worst, std::abs(v)); };
    for (const Instance& step : prog.steps) {
        const auto& js = step.js;
        switch (step.kind) {
            case StepKind::sum_offset:
                bump(norm(p[js[0]] - (p[js[1]] + p[js[2]] - p[js[3]])));
                break;
            case StepKind::cell_internals: {
                // colinearity of q with the cell line (axis-offset test)
                Vec2 p1 = p[js[0]], p2 = p[js[1]], q = p[js[2]];
                double L = step.params[0], r = step.params[1], sigma = step.params[2];
                Vec2 n = normalized(p2 - p1);
                double expect = (L * L - r * r) * sigma * sigma / (2.0 * dist(p1, p2));
                bump(dot(q - p1, n) - expect);
                break;
            }
            case StepKind::axis_intersect: {
                Vec2 o = p[js[3]];
                Vec2 dirx = normalized(p[js[4]] - o);
                bump(cross(dirx, p[js[0]] - o));                       // on the axis
                Vec2 d = p[js[2]] - p[js[1]];
                bump(cross(normalized(d), p[js[0]] - p[js[1]]));       // on the b-line
                break;
            }
            case StepKind::rotator_core:
                bump(dist(p[js[0]], p[js[1]]) - dist(p[js[0]], p[js[7]]));
                break;
            case StepKind::reflector_core: {
                Vec2 o = p[js[0]];
                double iota = angle_of(p[js[1]] - o);
                double mu = angle_of(p[js[2]] - o);
                double out = angle_of(p[js[5]] - o);
                bump(std::remainder(out - (2.0 * mu - iota), 2.0 * 3.14159265358979323846));
                break;
            }
            default:
                break;
        }
    }
    return worst;
}

// ---- serialization ----

using nlohmann::json;

std::string program_to_json(const Program& prog) {
    json j;
    j["n_drivers"] = prog.n_drivers;
    j["steps"] = json::array();
    for (const Instance& s : prog.steps)
        j["steps"].push_back(
            {{"k", static_cast<int>(s.kind)}, {"j", s.js}, {"p", s.params}});
    return j.dump();
}

Program program_from_json(const std::string& text) {
    json j = json::parse(text);
    Program prog;
    prog.n_drivers = j.at("n_drivers").get<int>();
    for (const auto& s : j.at("steps")) {
        Instance inst;
        inst.kind = static_cast<StepKind>(s.at("k").get<int>());
        inst.js = s.at("j").get<std::vector<JointId>>();
        inst.params = s.at("p").get<std::vector<double>>();
        prog.steps.push_back(std::move(inst));
    }
    return prog;
}

}  // namespace kempe
