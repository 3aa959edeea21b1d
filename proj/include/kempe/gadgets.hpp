#pragma once

#include <map>
#include <string>
#include <vector>

#include "kempe/builders.hpp"
#include "kempe/program.hpp"

namespace kempe {

enum class GadgetType {
    peaucellier,
    strict_peaucellier,
    lineariser,
    translator,
    rotator,
    copier,
    multiplier,
    divider,
    power,
    scalar,
    angle_adder,
    reversor,
    multiplicator,
};

const char* gadget_type_name(GadgetType t);
GadgetType gadget_type_from_name(const std::string& name);

/// Kind plus its geometric parameters. Only the fields meaningful for the
/// type are read (arm L and rhombus side r for inversor kinds, crank d,
/// fold count n, reach R, exponent k, scalar c, radius rho).
struct GadgetKind {
    GadgetType type = GadgetType::peaucellier;
    double L = 2.0;
    double r = 1.0;
    double d = 1.0;
    int n = 3;
    double reach = 1.0;
    int k = 2;
    double c = 1.0;
    double rho = 1.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double margin = 1e-3;  // admissible range shrinks by this fraction of the width
    double usable_lo() const { return lo + (hi - lo) * margin; }
    double usable_hi() const { return hi - (hi - lo) * margin; }
    bool usable(double x) const {
        double slack = 1e-9 * (hi - lo);
        return x >= usable_lo() - slack && x <= usable_hi() + slack;
    }
};

/// A framework fragment with named interface joints, a functional contract
/// and a deterministic forward-placement rule.
struct Gadget {
    GadgetKind kind;
    Framework fw;
    std::map<std::string, JointId> interface;   // input and output roles
    std::map<std::string, Interval> ranges;     // per input scalar
    Program program;                            // forward placement
    std::vector<std::string> input_roles;       // seeding order
};

/// Builds the canonical instance of a kind. ArgumentError on invalid
/// parameters (needs L > r > 0, n >= 1, reach > 0, k >= 1, c > 0, rho > 0).
Gadget build_gadget(const GadgetKind& kind);

/// Deterministic forward placement from input-role positions. RangeError
/// when an input is outside its admissible range, GeometryError when the
/// internal joints have no real solution.
std::map<JointId, Vec2> gadget_forward(const Gadget& g,
                                       const std::map<std::string, Vec2>& inputs);

Placement gadget_forward_placement(const Gadget& g,
                                   const std::map<std::string, Vec2>& inputs);

/// Sweeps the admissible input ranges on a grid, runs the forward map and
/// checks the kind's defining equation; worst deviation lands in
/// max_trace_error and bar preservation in max_bar_residual.
VerificationReport contract_check(const Gadget& g, int grid_density, double tol);

std::string gadget_to_json(const Gadget& g);

}  // namespace kempe
