#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kempe/program.hpp"

namespace kempe {

/// Local frame for placing sub-assemblies: origin plus unit x-direction.
struct Frame {
    Vec2 origin{0.0, 0.0};
    Vec2 u{1.0, 0.0};
    Vec2 map(Vec2 local) const { return origin + u * local.x + rot90(u) * local.y; }
    Vec2 dir(Vec2 local) const { return u * local.x + rot90(u) * local.y; }
};

/// Incremental framework + program builder. Joints carry provisional homes
/// while building; finalize() evaluates the program once at the home driver
/// value, rewrites every computed joint's home from that placement and
/// derives all bar lengths from homes, so the emitted framework is exactly
/// consistent with its own kinematic program.
class Assembler {
  public:
    Framework fw;
    std::vector<Instance> steps;

    JointId joint(Vec2 approx_home, const std::string& label = "");
    JointId pin(Vec2 home, const std::string& label = "");
    /// Rigid joint: two bars to the current anchor hosts, placed at home.
    JointId fixed_joint(Vec2 home, const std::string& label = "");
    void bar(JointId a, JointId b);
    void place_home(JointId j);  // joint handled by the leading place_home step
    void emit(StepKind kind, std::vector<JointId> js, std::vector<double> params = {});

    /// Anchor ladder: fixed-joint attachments rotate across a rigid strip so
    /// no joint's valency grows with the number of attachments.
    void anchor_base(JointId a, JointId b);
    std::pair<JointId, JointId> anchor_hosts();

    void seed_input(JointId j);  // gadget inputs, placed by the caller

    Program finalize(int n_drivers, const std::vector<double>& home_driver);

  private:
    std::vector<JointId> home_placed_;
    std::vector<JointId> seeded_;
    JointId host_a_ = -1, host_b_ = -1;
    int host_uses_ = 0;
    int ladder_flip_ = 1;
};

// ---- shared sub-assembly builders ----

struct CellIds {
    JointId p1 = -1, p2 = -1, qp = -1, u = -1, v = -1;
    double sigma = 0.0;
};

/// Fixed-line lineariser cell for joint q: anchors rigid on the ladder, line
/// through `point` along `dir`, usable half-span `halfspan` around `point`.
/// Emit AFTER q's placement step.
CellIds add_line_cell(Assembler& a, Vec2 point, Vec2 dir, double halfspan, JointId q,
                      double side = 1.0);

/// Floating lineariser (colinearity coupler): constrains `qs` to a common
/// moving line defined by joints d0, d1. Anchors are placed at run time.
void add_coupler(Assembler& a, JointId d0, JointId d1, const std::vector<JointId>& qs,
                 double halfspan, double side = 1.0);

struct TranslatorSizing {
    double ab_max = 1.0;      // max input separation |AB|
    double shift_min = 0.0;   // range of |A' - A| over the motion
    double shift_max = 1.0;
};

/// Braced drafting-machine translator: output pair (Ap, Bp) with
/// Bp - Ap == B - A; Ap is an existing anchor joint. Returns Bp.
JointId add_translator(Assembler& a, JointId A, JointId B, JointId Ap,
                       const TranslatorSizing& sz, JointId bp_existing = -1);

/// Braced-rhombus separation rotator: |A Bp| = |A Bin| with Bp on the ray
/// from A through Tgt. When bp_existing is given the output joint is shared
/// and only verified. Returns Bp.
JointId add_rotator(Assembler& a, JointId A, JointId Bin, JointId Tgt, double s_max,
                    JointId bp_existing = -1);

struct MultiplierFrame {
    Frame frame;       // gadget-local axes
    JointId O = -1, X = -1, Y = -1;
};

MultiplierFrame add_multiplier_frame(Assembler& a, const Frame& frame);

/// Separation multiplier |OC| = |OA| * |OB| on an existing frame. A sits on
/// the local x-axis, B on the local y-axis; both must already be constrained
/// (their own cells) unless constrain_inputs is set. Returns C.
JointId add_multiplier_product(Assembler& a, const MultiplierFrame& mf, JointId Ain,
                               JointId Bin, double in_max, double out_max,
                               bool constrain_inputs = false);

/// Divider: B with |OB| = |OC| / |OA| (inputs C dividend, A divisor).
JointId add_divider(Assembler& a, const MultiplierFrame& mf, JointId Cin, JointId Ain,
                    double divisor_min, double in_max, double out_max,
                    bool constrain_inputs = false);

/// Scalar multiplier |OC| = c * |OA| via a frozen second input.
JointId add_scalar(Assembler& a, const MultiplierFrame& mf, JointId Ain, double c,
                   double in_max, bool constrain_inputs = false);

/// Power chain |O out| = |O in|^k by a binary addition chain of multipliers
/// with rotator transfers. `in_axis` is a joint on the local x-axis.
JointId add_power_chain(Assembler& a, const MultiplierFrame& mf, JointId in_axis, int k,
                        double in_max);

/// Kempe reflector (two nested contraparallelograms sharing the mirror bar):
/// output bar at angle 2*angle(mirror) - angle(in), radius q^2/p from O.
/// `in_full` must sit at radius p, `mirror` at radius q. When out_existing is
/// given, the closure is verified rather than placed.
JointId add_reflector(Assembler& a, JointId O, JointId in_full, JointId mirror, double p,
                      double q, JointId out_existing = -1);

/// Rigid colinear/perpendicular mount on the bar O->host: joint at
/// radius*e^(i(angle(host-O) + quarters*pi/2)) from O. quarters in 0..3.
JointId add_radial_mount(Assembler& a, JointId O, JointId host, double host_radius,
                         double radius, int quarters = 0);

double sample_min(const std::function<double(double)>& f, double lo, double hi, int n = 513);
double sample_max(const std::function<double(double)>& f, double lo, double hi, int n = 513);

}  // namespace kempe
