#pragma once

#include <string>
#include <vector>

#include "kempe/framework.hpp"

namespace kempe {

/// One deterministic placement step. Each step writes the positions of a
/// fixed set of joints from joints placed earlier (or from the driver),
/// using the closed-form branch recorded at build time. A kinematic program
/// is a topologically ordered list of these.
enum class StepKind : int {
    place_home = 0,      // js: joints placed at their home positions
    driver_segment,      // js: [j]; params: [p0x, p0y, dx, dy, which]; j = p0 + driver[which]*d
    driver_polar,        // js: [j, o]; params: [radius, which]; j = o + radius*e^(i*driver[which])
    sum_offset,          // js: [j, a, b, c]; j = a + b - c (parallelogram closure)
    midpoint,            // js: [j, a, b]
    frame_mount,         // js: [j, baseA, baseB]; params: [lx, ly]; rigid mount in the unit frame of A->B
    tong_elbow,          // js: [j, a, b]; params: [ra, rb, sign]; circle-circle elbow
    cell_internals,      // js: [p1, p2, q, qp, u, v]; params: [sigma]; Peaucellier cell from its line joint
    peaucellier_drive,   // js: [p1, p2, crank, q, u, v]; params: [sigma]; cell from its crank joint
    coupler_anchors,     // js: [d0, d1, p1, p2, q...]; params: [sigma, side]; floating lineariser anchors
    axis_intersect,      // js: [j, p, q, o, x]; j = line(p,q) ^ line(o, x-o)
    divider_place,       // js: [b, o, x, y, a, c]; b = o + (c_val/a_val) * unit(y-o)
    rotator_core,        // js: [a, bin, tgt, c, d, cp, e, bp]; params: [ell, m]
    bisector_tap,        // js: [x, o, u, v]; params: [q]; x = o + q*e^(i*(ang(u)+ang(v))/2)
    reflector_core,      // js: [o, in, x, b, y, z]; params: [p, q, z_external]
    corner_point,        // js: [j, xsrc, ysrc]; j = (x of xsrc, y of ysrc)
    project_point,       // js: [j, src]; params: [mode, coord]; axis-aligned projection
    interval_tracer,     // js: [j, srcs...]; params: [mode, K, bounds...]; tether-interval midpoint
    rotate_about,        // js: [j, o, src]; params: [cos, sin]; j = o + R*(src-o)
    complex_combine,     // js: [j, o, u, v]; params: [scale]; j = o + (u-o)(v-o)/scale (angle sum)
    separation_place,    // js: [j, a, b, anchor, tgt]; j = anchor + |ab| * unit(tgt-anchor)
};

struct Instance {
    StepKind kind = StepKind::place_home;
    std::vector<JointId> js;
    std::vector<double> params;
};

struct Program {
    std::vector<Instance> steps;
    int n_drivers = 1;
};

/// Evaluates the program at one driver value; returns a full placement.
/// `seeds` pre-places externally driven joints (gadget inputs).
/// GeometryError when a step has no real solution.
Placement eval_program(const Framework& fw, const Program& prog,
                       const std::vector<double>& driver,
                       const std::vector<std::pair<JointId, Vec2>>& seeds = {});

/// Worst per-instance contract deviation at a placement (translator vector
/// equality, multiplier product law, reflector angle law, cell colinearity).
double instance_contract_deviation(const Framework& fw, const Program& prog,
                                   const Placement& p);

/// Every joint written exactly once, inputs before use. Throws StructuralError.
void validate_program(const Framework& fw, const Program& prog,
                      const std::vector<JointId>& seeded);

std::string program_to_json(const Program& prog);
Program program_from_json(const std::string& text);

// Shared cell proportions: the compiled unit cell has arms 2, rhombus side 1,
// crank 1, inversion constant 3, line offset 1.5, usable half-span 2.589
// before range margins. sigma_for_halfspan converts a needed half-span to a
// cell scale with ~15% headroom.
namespace cell {
constexpr double arm = 2.0;
constexpr double side = 1.0;
constexpr double crank = 1.0;
constexpr double inversion = 3.0;   // arm^2 - side^2
constexpr double offset = 1.5;      // inversion / (2*crank)
constexpr double usable_halfspan = 2.2;

inline double sigma_for_halfspan(double halfspan) {
    return std::max(halfspan, 1e-6) / usable_halfspan;
}

// Internals of a cell with apex anchor p1 for a line joint q.
struct CellJoints {
    Vec2 qp, u, v;
};
CellJoints internals_from_line_joint(Vec2 p1, double L, double r, double sigma, Vec2 q);
}  // namespace cell

}  // namespace kempe
