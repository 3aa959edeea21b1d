#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kempe/geometry.hpp"

namespace kempe {

using JointId = std::int32_t;

/// Default tolerances. KEMPE_TOL (environment) overrides tol_motion.
struct Tolerances {
    static constexpr double tol_build = 1e-9;
    static double tol_motion();  // default 1e-8, env-overridable
};

struct Joint {
    JointId id = -1;
    Vec2 home;
    bool pinned = false;
};

struct Bar {
    JointId a = -1;
    JointId b = -1;
    double length = 0.0;
};

/// Pinned planar bar-joint framework. Joint ids are dense integers assigned
/// at construction; labels map semantic roles to ids so composed frameworks
/// stay addressable. Immutable by convention after construction.
struct Framework {
    std::vector<Joint> joints;
    std::vector<Bar> bars;
    std::map<std::string, JointId> labels;

    JointId add_joint(Vec2 home, bool pinned = false);
    void add_bar(JointId a, JointId b);  // length from home positions
    void add_bar(JointId a, JointId b, double length);
    void set_label(const std::string& role, JointId id);
    JointId label(const std::string& role) const;  // StructuralError if absent

    std::size_t size() const { return joints.size(); }
    int valency(JointId id) const;
    int max_valency() const;
};

using Placement = std::vector<Vec2>;  // indexed by JointId

Placement home_placement(const Framework& fw);

struct PathSample {
    double s = 0.0;
    Placement placement;
};

/// Sampled motion: s strictly increasing, every placement covers every joint,
/// pinned joints at home in every sample.
struct MotionPath {
    std::vector<PathSample> samples;
};

struct VerificationReport {
    double max_bar_residual = 0.0;
    double max_step_displacement = 0.0;
    std::optional<double> max_trace_error;
    bool pass = false;
    std::string detail;  // names the failing invariant, empty when passing
};

/// Max over bars of | |home_a - home_b| - length |; pass iff <= tol_build.
/// Dangling joint references raise StructuralError.
VerificationReport check_consistency(const Framework& fw);

/// Same residual check against an explicit placement.
double max_bar_residual(const Framework& fw, const Placement& p);

/// Certifies a sampled motion: (a) every bar preserved within tol at every
/// sample, (b) pinned joints fixed, (c) consecutive displacement <= step_bound.
VerificationReport verify_motion(const Framework& fw, const MotionPath& path,
                                 double tol, double step_bound);

/// step_bound rule: 4 x max joint speed estimate x sample spacing.
double suggest_step_bound(const MotionPath& path);

struct RigidityReport {
    int rank = 0;
    int dof = 0;
};

/// Rank of the rigidity matrix over free (unpinned) coordinates, by
/// column-pivoted orthogonal factorization with threshold 1e-7 x largest
/// diagonal. dof = 2*(free joints) - rank. Placement must satisfy the bars
/// within tol_build (PreconditionError otherwise).
RigidityReport rigidity_report(const Framework& fw, const Placement& placement);

/// Variant ignoring pins entirely (all coordinates free); used by the
/// pin-bookkeeping property checks.
RigidityReport rigidity_report_unpinned(const Framework& fw, const Placement& placement);

// ---- serialization ----

std::string framework_to_json(const Framework& fw);
Framework framework_from_json(const std::string& text);

std::string motion_path_to_json(const MotionPath& path);
MotionPath motion_path_from_json(const std::string& text);

std::string motion_path_to_csv(const MotionPath& path);
MotionPath motion_path_from_csv(const std::string& text);

}  // namespace kempe
