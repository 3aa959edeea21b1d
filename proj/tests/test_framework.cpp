#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "kempe/errors.hpp"
#include "kempe/framework.hpp"

using namespace kempe;

namespace {

Framework unit_triangle() {
    Framework fw;
    JointId a = fw.add_joint({0, 0}, true);
    JointId b = fw.add_joint({1, 0}, true);
    JointId c = fw.add_joint({0.5, std::sqrt(3.0) / 2.0});
    fw.add_bar(a, b);
    fw.add_bar(b, c);
    fw.add_bar(c, a);
    return fw;
}

// test-side rank oracle: dense Gaussian elimination with partial pivoting
int elimination_rank(std::vector<std::vector<double>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        for (std::size_t i = row + 1; i < rows; ++i)
            if (std::abs(m[i][col]) > std::abs(m[pivot][col])) pivot = i;
        if (std::abs(m[pivot][col]) < 1e-9) continue;
        std::swap(m[row], m[pivot]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == row) continue;
            double f = m[i][col] / m[row][col];
            for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        ++row;
        ++rank;
    }
    return rank;
}

int oracle_rank(const Framework& fw, const Placement& p, bool respect_pins) {
    std::vector<int> col(fw.joints.size(), -1);
    int nfree = 0;
    for (const Joint& j : fw.joints)
        if (!(respect_pins && j.pinned)) col[j.id] = 2 * nfree++;
    std::vector<std::vector<double>> m(fw.bars.size(), std::vector<double>(2 * nfree, 0.0));
    for (std::size_t i = 0; i < fw.bars.size(); ++i) {
        const Bar& b = fw.bars[i];
        Vec2 d = p[b.a] - p[b.b];
        if (col[b.a] >= 0) {
            m[i][col[b.a]] = d.x;
            m[i][col[b.a] + 1] = d.y;
        }
        if (col[b.b] >= 0) {
            m[i][col[b.b]] = -d.x;
            m[i][col[b.b] + 1] = -d.y;
        }
    }
    return elimination_rank(std::move(m));
}

Framework unit_parallelogram(bool braced) {
    Framework fw;
    JointId a = fw.add_joint({0, 0}, true);
    JointId b = fw.add_joint({1, 0}, true);
    JointId c = fw.add_joint({1.35, 0.937});  // generic angle, not a rectangle
    JointId d = fw.add_joint({0.35, 0.937});
    fw.add_bar(a, b);
    fw.add_bar(b, c);
    fw.add_bar(c, d);
    fw.add_bar(d, a);
    if (braced) {
        JointId m1 = fw.add_joint({0.5, 0});
        JointId m2 = fw.add_joint({0.85, 0.937});
        fw.add_bar(m1, a);
        fw.add_bar(m1, b);
        fw.add_bar(m2, c);
        fw.add_bar(m2, d);
        fw.add_bar(m1, m2);
    }
    return fw;
}

}  // namespace

TEST_SUITE("check_consistency") {
    TEST_CASE("exact triangle passes with zero residual") {
        Framework fw = unit_triangle();
        VerificationReport rep = check_consistency(fw);
        CHECK(rep.pass);
        CHECK(rep.max_bar_residual == 0.0);
    }

    TEST_CASE("mis-recorded bar length fails with the forced residual") {
        Framework fw = unit_triangle();
        fw.bars[0].length = 1.1;
        VerificationReport rep = check_consistency(fw);
        CHECK_FALSE(rep.pass);
        CHECK(rep.max_bar_residual == doctest::Approx(0.1));
    }

    TEST_CASE("dangling joint reference is structural") {
        Framework fw = unit_triangle();
        fw.bars.push_back(Bar{0, 17, 1.0});
        CHECK_THROWS_AS(check_consistency(fw), StructuralError);
    }
}

TEST_SUITE("verify_motion") {
    TEST_CASE("rigid triangle held at home") {
        Framework fw = unit_triangle();
        MotionPath path;
        for (int i = 0; i < 10; ++i)
            path.samples.push_back({i / 9.0, home_placement(fw)});
        VerificationReport rep = verify_motion(fw, path, 1e-8, 1.0);
        CHECK(rep.pass);
        CHECK(rep.max_step_displacement == 0.0);
    }

    TEST_CASE("moving a pinned joint fails on pins") {
        Framework fw = unit_triangle();
        MotionPath path;
        path.samples.push_back({0.0, home_placement(fw)});
        Placement moved = home_placement(fw);
        moved[0].x += 0.01;
        path.samples.push_back({1.0, moved});
        VerificationReport rep = verify_motion(fw, path, 1e-8, 1.0);
        CHECK_FALSE(rep.pass);
        CHECK(rep.detail.find("pinned") != std::string::npos);
    }

    TEST_CASE("empty path is an argument error") {
        Framework fw = unit_triangle();
        CHECK_THROWS_AS(verify_motion(fw, MotionPath{}, 1e-8, 1.0), ArgumentError);
    }
}

TEST_SUITE("rigidity_report") {
    TEST_CASE("triangle with two pins is rigid") {
        Framework fw = unit_triangle();
        RigidityReport rep = rigidity_report(fw, home_placement(fw));
        CHECK(rep.dof == 0);
    }

    TEST_CASE("inconsistent placement is a precondition error") {
        Framework fw = unit_triangle();
        Placement p = home_placement(fw);
        p[2].x += 0.1;
        CHECK_THROWS_AS(rigidity_report(fw, p), PreconditionError);
    }

    TEST_CASE("unbraced parallelogram has the swing freedom") {
        Framework fw = unit_parallelogram(false);
        RigidityReport rep = rigidity_report(fw, home_placement(fw));
        CHECK(rep.rank == oracle_rank(fw, home_placement(fw), true));
        CHECK(rep.dof == 1);
    }

    TEST_CASE("midline-braced parallelogram against the elimination oracle") {
        // The brace preserves the parallelogram swing (the midline stays at
        // side length along the whole branch), so one infinitesimal motion
        // survives; the oracle pins the expected rank.
        Framework fw = unit_parallelogram(true);
        Placement p = home_placement(fw);
        RigidityReport rep = rigidity_report(fw, p);
        CHECK(rep.rank == oracle_rank(fw, p, true));
        CHECK(rep.dof == 2 * 4 - rep.rank);
    }

    TEST_CASE("pin bookkeeping and isometry invariance on random frameworks") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            // random generic triangulated-ish framework with one pinned edge
            Framework fw;
            int n = 5 + trial;
            for (int i = 0; i < n; ++i)
                fw.add_joint({2.0 * i + 0.3 * u(rng), 1.5 * u(rng)}, i < 2);
            for (int i = 1; i < n; ++i) fw.add_bar(i - 1, i);
            for (int i = 2; i < n; ++i)
                if (u(rng) > -0.3) fw.add_bar(i - 2, i);
            Placement p = home_placement(fw);

            RigidityReport pinned = rigidity_report(fw, p);
            CHECK(pinned.rank == oracle_rank(fw, p, true));

            // freeing the pinned edge returns exactly the three trivial motions
            RigidityReport free = rigidity_report_unpinned(fw, p);
            CHECK(free.rank == oracle_rank(fw, p, false));
            CHECK(free.dof - 3 == pinned.dof);

            // global rotation + translation of everything leaves the report alone
            double ang = 0.7 + trial;
            Vec2 t{3.1, -2.2};
            Framework fw2 = fw;
            Placement p2(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                p2[i] = cmul(p[i], unit_dir(ang)) + t;
                fw2.joints[i].home = p2[i];
            }
            RigidityReport rot = rigidity_report(fw2, p2);
            CHECK(rot.rank == pinned.rank);
            CHECK(rot.dof == pinned.dof);
        }
    }
}

TEST_SUITE("serialization") {
    TEST_CASE("framework json round trip is exact") {
        Framework fw = unit_triangle();
        fw.set_label("p1", 0);
        fw.set_label("apex", 2);
        Framework back = framework_from_json(framework_to_json(fw));
        REQUIRE(back.joints.size() == fw.joints.size());
        for (std::size_t i = 0; i < fw.joints.size(); ++i) {
            CHECK(back.joints[i].home.x == fw.joints[i].home.x);
            CHECK(back.joints[i].home.y == fw.joints[i].home.y);
            CHECK(back.joints[i].pinned == fw.joints[i].pinned);
        }
        for (std::size_t i = 0; i < fw.bars.size(); ++i)
            CHECK(back.bars[i].length == fw.bars[i].length);
        CHECK(back.label("apex") == 2);
    }

    TEST_CASE("motion path json and csv round trips") {
        Framework fw = unit_triangle();
        MotionPath path;
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 4; ++i) {
            Placement p = home_placement(fw);
            for (Vec2& v : p) v += Vec2{u(rng) * 1e-3, u(rng) * 1e-3};
            path.samples.push_back({i / 3.0, p});
        }
        MotionPath j = motion_path_from_json(motion_path_to_json(path));
        MotionPath c = motion_path_from_csv(motion_path_to_csv(path));
        REQUIRE(j.samples.size() == path.samples.size());
        REQUIRE(c.samples.size() == path.samples.size());
        for (std::size_t k = 0; k < path.samples.size(); ++k)
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(j.samples[k].placement[i].x == path.samples[k].placement[i].x);
                CHECK(c.samples[k].placement[i].y == path.samples[k].placement[i].y);
            }
    }
}
