#include "kempe/framework.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "kempe/errors.hpp"
#include "json.hpp"

namespace kempe {

double Tolerances::tol_motion() {
    static const double value = [] {
        if (const char* env = std::getenv("KEMPE_TOL")) {
            char* end = nullptr;
            double v = std::strtod(env, &end);
            if (end != env && v > 0.0) return v;
        }
        return 1e-8;
    }();
    return value;
}

JointId Framework::add_joint(Vec2 home, bool pinned) {
    JointId id = static_cast<JointId>(joints.size());
    joints.push_back(Joint{id, home, pinned});
    return id;
}

void Framework::add_bar(JointId a, JointId b) {
    if (a < 0 || b < 0 || a >= static_cast<JointId>(joints.size()) ||
        b >= static_cast<JointId>(joints.size()))
        throw StructuralError("bar references absent joint");
    add_bar(a, b, dist(joints[a].home, joints[b].home));
}

void Framework::add_bar(JointId a, JointId b, double length) {
    if (a == b) throw StructuralError("bar endpoints coincide");
    bars.push_back(Bar{a, b, length});
}

void Framework::set_label(const std::string& role, JointId id) { labels[role] = id; }

JointId Framework::label(const std::string& role) const {
    auto it = labels.find(role);
    if (it == labels.end()) throw StructuralError("unresolved label: " + role);
    return it->second;
}

int Framework::valency(JointId id) const {
    int n = 0;
    for (const Bar& b : bars)
        if (b.a == id || b.b == id) ++n;
    return n;
}

int Framework::max_valency() const {
    std::vector<int> deg(joints.size(), 0);
    for (const Bar& b : bars) {
        ++deg[b.a];
        ++deg[b.b];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

Placement home_placement(const Framework& fw) {
    Placement p(fw.joints.size());
    for (const Joint& j : fw.joints) p[j.id] = j.home;
    return p;
}

static void check_structure(const Framework& fw) {
    const auto n = static_cast<JointId>(fw.joints.size());
    for (const Bar& b : fw.bars)
        if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n)
            throw StructuralError("bar references absent joint");
    for (const auto& [role, id] : fw.labels)
        if (id < 0 || id >= n) throw StructuralError("label resolves to absent joint: " + role);
}

double max_bar_residual(const Framework& fw, const Placement& p) {
    double worst = 0.0;
    for (const Bar& b : fw.bars)
        worst = std::max(worst, std::abs(dist(p[b.a], p[b.b]) - b.length));
    return worst;
}

VerificationReport check_consistency(const Framework& fw) {
    check_structure(fw);
    VerificationReport rep;
    rep.max_bar_residual = max_bar_residual(fw, home_placement(fw));
    rep.pass = rep.max_bar_residual <= Tolerances::tol_build;
    if (!rep.pass) rep.detail = "bar length residual exceeds tol_build";
    return rep;
}

VerificationReport verify_motion(const Framework& fw, const MotionPath& path,
                                 double tol, double step_bound) {
    check_structure(fw);
    if (path.samples.empty()) throw ArgumentError("verify_motion: empty path");
    VerificationReport rep;
    rep.pass = true;

    const std::size_t n = fw.joints.size();
    double prev_s = -1.0;
    const Placement* prev = nullptr;
    for (const PathSample& sample : path.samples) {
        if (sample.placement.size() != n)
            throw ArgumentError("verify_motion: placement does not cover every joint");
        if (sample.s <= prev_s) {
            rep.pass = false;
            rep.detail = "sample s values not strictly increasing";
            return rep;
        }
        prev_s = sample.s;

        for (const Joint& j : fw.joints) {
            if (!j.pinned) continue;
            double d = dist(sample.placement[j.id], j.home);
            if (d > tol) {
                rep.pass = false;
                rep.detail = "pinned joint moved";
            }
        }
        rep.max_bar_residual =
            std::max(rep.max_bar_residual, max_bar_residual(fw, sample.placement));
        if (prev) {
            double step = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                step = std::max(step, dist(sample.placement[i], (*prev)[i]));
            rep.max_step_displacement = std::max(rep.max_step_displacement, step);
        }
        prev = &sample.placement;
    }
    if (rep.max_bar_residual > tol) {
        rep.pass = false;
        if (rep.detail.empty()) rep.detail = "bar length not preserved";
    }
    if (rep.max_step_displacement > step_bound) {
        rep.pass = false;
        if (rep.detail.empty()) rep.detail = "step displacement exceeds step bound";
    }
    return rep;
}

double suggest_step_bound(const MotionPath& path) {
    if (path.samples.size() < 2) return 1.0;
    double max_speed = 0.0;
    for (std::size_t k = 1; k < path.samples.size(); ++k) {
        const auto& a = path.samples[k - 1];
        const auto& b = path.samples[k];
        double ds = b.s - a.s;
        if (ds <= 0.0) continue;
        for (std::size_t i = 0; i < a.placement.size(); ++i)
            max_speed = std::max(max_speed, dist(a.placement[i], b.placement[i]) / ds);
    }
    double spacing = (path.samples.back().s - path.samples.front().s) /
                     static_cast<double>(path.samples.size() - 1);
    return 4.0 * max_speed * spacing;
}

static RigidityReport rank_from_matrix(Eigen::MatrixXd& m, int free_coords) {
    RigidityReport rep;
    if (m.rows() == 0 || m.cols() == 0) {
        rep.rank = 0;
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
        Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
        double biggest = diag.size() ? diag.maxCoeff() : 0.0;
        double threshold = 1e-7 * biggest;
        int rank = 0;
        for (int i = 0; i < diag.size(); ++i)
            if (diag[i] > threshold) ++rank;
        rep.rank = rank;
    }
    rep.dof = free_coords - rep.rank;
    return rep;
}

static RigidityReport rigidity_impl(const Framework& fw, const Placement& placement,
                                    bool respect_pins) {
    check_structure(fw);
    if (placement.size() != fw.joints.size())
        throw PreconditionError("rigidity_report: placement does not cover every joint");
    if (max_bar_residual(fw, placement) > Tolerances::tol_build)
        throw PreconditionError("rigidity_report: placement inconsistent with bar lengths");

    std::vector<int> col(fw.joints.size(), -1);
    int free_joints = 0;
    for (const Joint& j : fw.joints)
        if (!(respect_pins && j.pinned)) col[j.id] = 2 * free_joints++;

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<int>(fw.bars.size()), 2 * free_joints);
    int row = 0;
    for (const Bar& b : fw.bars) {
        Vec2 d = placement[b.a] - placement[b.b];
        if (col[b.a] >= 0) {
            m(row, col[b.a]) = d.x;
            m(row, col[b.a] + 1) = d.y;
        }
        if (col[b.b] >= 0) {
            m(row, col[b.b]) = -d.x;
            m(row, col[b.b] + 1) = -d.y;
        }
        ++row;
    }
    return rank_from_matrix(m, 2 * free_joints);
}

RigidityReport rigidity_report(const Framework& fw, const Placement& placement) {
    return rigidity_impl(fw, placement, true);
}

RigidityReport rigidity_report_unpinned(const Framework& fw, const Placement& placement) {
    return rigidity_impl(fw, placement, false);
}

// ---- serialization ----

using nlohmann::json;

std::string framework_to_json(const Framework& fw) {
    json j;
    j["joints"] = json::array();
    for (const Joint& joint : fw.joints)
        j["joints"].push_back(
            {{"id", joint.id}, {"x", joint.home.x}, {"y", joint.home.y}, {"pinned", joint.pinned}});
    j["bars"] = json::array();
    for (const Bar& bar : fw.bars)
        j["bars"].push_back({{"a", bar.a}, {"b", bar.b}, {"length", bar.length}});
    j["labels"] = json::object();
    for (const auto& [role, id] : fw.labels) j["labels"][role] = id;
    return j.dump(2);
}

Framework framework_from_json_value(const json& j) {
    Framework fw;
    for (const auto& joint : j.at("joints")) {
        JointId id = fw.add_joint({joint.at("x").get<double>(), joint.at("y").get<double>()},
                                  joint.value("pinned", false));
        if (id != joint.at("id").get<JointId>())
            throw StructuralError("framework json: joint ids must be dense and ordered");
    }
    for (const auto& bar : j.at("bars"))
        fw.add_bar(bar.at("a").get<JointId>(), bar.at("b").get<JointId>(),
                   bar.at("length").get<double>());
    if (j.contains("labels"))
        for (auto it = j["labels"].begin(); it != j["labels"].end(); ++it)
            fw.set_label(it.key(), it.value().get<JointId>());
    check_structure(fw);
    return fw;
}

Framework framework_from_json(const std::string& text) {
    return framework_from_json_value(json::parse(text));
}

std::string motion_path_to_json(const MotionPath& path) {
    json j;
    j["samples"] = json::array();
    for (const PathSample& s : path.samples) {
        json pos = json::object();
        for (std::size_t i = 0; i < s.placement.size(); ++i)
            pos[std::to_string(i)] = {s.placement[i].x, s.placement[i].y};
        j["samples"].push_back({{"s", s.s}, {"pos", pos}});
    }
    return j.dump();
}

MotionPath motion_path_from_json(const std::string& text) {
    json j = json::parse(text);
    MotionPath path;
    for (const auto& sample : j.at("samples")) {
        PathSample ps;
        ps.s = sample.at("s").get<double>();
        const auto& pos = sample.at("pos");
        ps.placement.resize(pos.size());
        for (auto it = pos.begin(); it != pos.end(); ++it) {
            std::size_t id = std::stoul(it.key());
            if (id >= ps.placement.size()) ps.placement.resize(id + 1);
            ps.placement[id] = {it.value()[0].get<double>(), it.value()[1].get<double>()};
        }
        path.samples.push_back(std::move(ps));
    }
    return path;
}

std::string motion_path_to_csv(const MotionPath& path) {
    std::ostringstream out;
    out.precision(17);
    out << "s,joint,x,y\n";
    for (const PathSample& s : path.samples)
        for (std::size_t i = 0; i < s.placement.size(); ++i)
            out << s.s << ',' << i << ',' << s.placement[i].x << ',' << s.placement[i].y << '\n';
    return out.str();
}

MotionPath motion_path_from_csv(const std::string& text) {
    MotionPath path;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.find("joint") != std::string::npos) continue;  // header
        std::istringstream row(line);
        std::string field;
        double vals[4];
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(row, field, i == 3 ? '\n' : ','))
                throw ParseError("motion csv: expected s,joint,x,y", lineno, 1);
            try {
                vals[i] = std::stod(field);
            } catch (const std::exception&) {
                throw ParseError("motion csv: bad number '" + field + "'", lineno, 1);
            }
        }
        double s = vals[0];
        auto id = static_cast<std::size_t>(vals[1]);
        if (path.samples.empty() || path.samples.back().s != s) {
            path.samples.push_back(PathSample{s, {}});
        }
        auto& placement = path.samples.back().placement;
        if (id >= placement.size()) placement.resize(id + 1);
        placement[id] = {vals[2], vals[3]};
    }
    return path;
}

}  // namespace kempe
