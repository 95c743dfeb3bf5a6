#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "afem/elements.hpp"
#include "afem/errors.hpp"
#include "support.hpp"

using namespace afem;
using afem::test::unit_square;

namespace {

ElementMap reference_map() {
    Mesh m = afem::test::single_triangle({0, 0}, {1, 0}, {0, 1});
    return element_map(m, 0);
}

Eigen::Vector3d random_bary(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Eigen::Vector3d l(u(rng), u(rng), u(rng));
    return l / l.sum();
}

} // namespace

TEST(Family, RoundTripNames) {
    for (Family f : {Family::taylor_hood, Family::mini, Family::stab_p1p0, Family::stab_p1p1})
        EXPECT_EQ(parse_family(to_string(f)), f);
    EXPECT_THROW(parse_family("p2-p0"), InputError);
}

TEST(SchemeSpec, Validation) {
    SchemeSpec th = SchemeSpec::taylor_hood();
    th.stab = StabParams{};
    EXPECT_THROW(th.validate(), InputError);
    StabParams neg;
    neg.tau_S = 0;
    EXPECT_THROW(SchemeSpec::stabilized(Family::stab_p1p0, neg).validate(), InputError);
    StabParams div;
    div.tau_div = -1;
    EXPECT_THROW(SchemeSpec::stabilized(Family::stab_p1p0, div).validate(), InputError);
    EXPECT_NO_THROW(afem::test::stab_p1p0().validate());
    EXPECT_NO_THROW(afem::test::stab_p1p1().validate());
    EXPECT_THROW(SchemeSpec::stabilized(Family::stab_p1p1).validate(), InputError);
}

TEST(Basis, P1AtVertices) {
    ElementMap map = reference_map();
    LocalBasis b;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d l = Eigen::Vector3d::Zero();
        l[i] = 1;
        eval_basis(Family::stab_p1p0, map, l, b);
        for (int k = 0; k < 3; ++k) EXPECT_EQ(b.velocity[k], k == i ? 1.0 : 0.0);
    }
}

TEST(Basis, P2AtEdgeMidpoint) {
    ElementMap map = reference_map();
    LocalBasis b;
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d l = Eigen::Vector3d::Constant(0.5);
        l[j] = 0;  // midpoint of the edge opposite vertex j
        eval_basis(Family::taylor_hood, map, l, b);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(b.velocity[k], 0.0, 1e-15);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(b.velocity[3 + k], k == j ? 1.0 : 0.0, 1e-15);
    }
}

TEST(Basis, BubbleAtBarycenter) {
    ElementMap map = reference_map();
    LocalBasis b;
    eval_basis(Family::mini, map, Eigen::Vector3d::Constant(1.0 / 3), b);
    ASSERT_EQ(b.n_velocity, 4);
    EXPECT_NEAR(b.velocity[3], 1.0, 1e-15);
}

TEST(Basis, PressureSpaces) {
    ElementMap map = reference_map();
    LocalBasis b;
    eval_basis(Family::stab_p1p0, map, Eigen::Vector3d(0.2, 0.3, 0.5), b);
    ASSERT_EQ(b.n_pressure, 1);
    EXPECT_EQ(b.pressure[0], 1.0);
    EXPECT_EQ(b.pressure_grad[0], Eigen::Vector2d::Zero());
    eval_basis(Family::taylor_hood, map, Eigen::Vector3d(0.2, 0.3, 0.5), b);
    ASSERT_EQ(b.n_pressure, 3);
    EXPECT_NEAR(b.pressure[2], 0.5, 1e-15);
}

TEST(Basis, PartitionOfUnity) {
    std::mt19937 rng(11);
    Mesh m = afem::test::single_triangle({0.1, 0.2}, {0.9, 0.35}, {0.3, 0.8});
    ElementMap map = element_map(m, 0);
    LocalBasis b;
    for (int k = 0; k < 100; ++k) {
        Eigen::Vector3d l = random_bary(rng);
        for (Family f : {Family::taylor_hood, Family::stab_p1p0}) {
            eval_basis(f, map, l, b);
            double s = 0;
            Eigen::Vector2d g = Eigen::Vector2d::Zero();
            for (int i = 0; i < b.n_velocity; ++i) s += b.velocity[i], g += b.velocity_grad[i];
            EXPECT_NEAR(s, 1.0, 1e-14);
            EXPECT_NEAR(g.norm(), 0.0, 1e-13);
        }
    }
}

TEST(Basis, GradientsMatchFiniteDifferences) {
    Mesh m = afem::test::single_triangle({0.1, 0.2}, {0.9, 0.35}, {0.3, 0.8});
    const double h = 1e-5;
    std::mt19937 rng(13);
    for (Family f : {Family::taylor_hood, Family::mini, Family::stab_p1p1}) {
        SchemeSpec scheme = f == Family::stab_p1p1 ? afem::test::stab_p1p1()
                            : f == Family::mini    ? SchemeSpec::mini()
                                                   : SchemeSpec::taylor_hood();
        for (int k = 0; k < 20; ++k) {
            Eigen::Vector3d l = random_bary(rng);
            Point x = element_map(m, 0).at(l);
            LocalBasis b = basis_eval(scheme, m, 0, x);
            for (int d = 0; d < 2; ++d) {
                Point e = Point::Zero();
                e[d] = h;
                LocalBasis bp = basis_eval(scheme, m, 0, x + e), bm = basis_eval(scheme, m, 0, x - e);
                for (int i = 0; i < b.n_velocity; ++i)
                    EXPECT_NEAR((bp.velocity[i] - bm.velocity[i]) / (2 * h), b.velocity_grad[i][d], 1e-6);
                for (int i = 0; i < b.n_pressure; ++i)
                    EXPECT_NEAR((bp.pressure[i] - bm.pressure[i]) / (2 * h), b.pressure_grad[i][d], 1e-6);
            }
            // Laplacian from second differences of the basis values.
            for (int i = 0; i < b.n_velocity; ++i) {
                const double hh = 1e-3;
                double lap = 0;
                for (int d = 0; d < 2; ++d) {
                    Point e = Point::Zero();
                    e[d] = hh;
                    lap += (basis_eval(scheme, m, 0, x + e).velocity[i] - 2 * b.velocity[i] +
                            basis_eval(scheme, m, 0, x - e).velocity[i]) /
                           (hh * hh);
                }
                EXPECT_NEAR(lap, b.velocity_laplacian[i], 1e-5 * std::max(1.0, std::abs(lap)));
            }
        }
    }
}

TEST(Basis, OutsideElementThrows) {
    Mesh m = unit_square(1);
    EXPECT_THROW(basis_eval(SchemeSpec::taylor_hood(), m, 0, Point(0.1, 0.9)), InputError);
}

TEST(DofMap, TwoTriangleCounts) {
    Mesh m = unit_square(1);
    DofMap th(SchemeSpec::taylor_hood(), m);
    EXPECT_EQ(th.velocity_dofs(), 18);
    EXPECT_EQ(th.free_velocity_dofs(), 2);
    EXPECT_EQ(th.pressure_dofs(), 4);
    DofMap p0(afem::test::stab_p1p0(), m);
    EXPECT_EQ(p0.velocity_dofs(), 8);
    EXPECT_EQ(p0.free_velocity_dofs(), 0);
    EXPECT_EQ(p0.pressure_dofs(), 2);
    DofMap mini(SchemeSpec::mini(), m);
    EXPECT_EQ(mini.velocity_dofs(), 12);
    EXPECT_EQ(mini.free_velocity_dofs(), 4);
    EXPECT_EQ(mini.pressure_dofs(), 4);
    DofMap p1(afem::test::stab_p1p1(), m);
    EXPECT_EQ(p1.velocity_dofs(), 8);
    EXPECT_EQ(p1.pressure_dofs(), 4);
}

TEST(DofMap, CountsOnGradedMesh) {
    Mesh m = afem::test::graded_mesh(7, Point(0.3, 0.4));
    const int V = m.num_vertices(), E = m.num_edges(), M = m.num_elements();
    EXPECT_EQ(DofMap(SchemeSpec::taylor_hood(), m).ndof(), 2 * (V + E) + V);
    EXPECT_EQ(DofMap(SchemeSpec::mini(), m).ndof(), 2 * (V + M) + V);
    EXPECT_EQ(DofMap(afem::test::stab_p1p0(), m).ndof(), 2 * V + M);
    EXPECT_EQ(DofMap(afem::test::stab_p1p1(), m).ndof(), 2 * V + V);
}

TEST(DofMap, BoundaryFlags) {
    Mesh m = unit_square(3);
    for (const SchemeSpec& s : afem::test::all_schemes()) {
        DofMap d(s, m);
        for (int k = 0; k < d.scalar_dofs(); ++k) {
            const Point& x = d.node(k);
            bool on = x.x() == 0 || x.x() == 1 || x.y() == 0 || x.y() == 1;
            EXPECT_EQ(d.boundary_scalar(k), on);
            if (d.node_kind(k) == DofMap::NodeKind::bubble) EXPECT_FALSE(d.boundary_scalar(k));
        }
        const auto& bd = d.boundary_velocity_dofs();
        EXPECT_TRUE(std::is_sorted(bd.begin(), bd.end()));
    }
}

TEST(DofMap, TracesAgreeAcrossSharedEdges) {
    Mesh m = afem::test::graded_mesh(5, Point(0.4, 0.4));
    for (const SchemeSpec& s : afem::test::all_schemes()) {
        DofMap d(s, m);
        for (int e = 0; e < m.num_edges(); ++e) {
            const auto& edge = m.edge(e);
            if (edge.on_boundary()) continue;
            Point a = m.vertex(edge.vertices[0]), b = m.vertex(edge.vertices[1]);
            for (double t : {0.1127, 0.5, 0.8873}) {
                Point x = (1 - t) * a + t * b;
                std::map<int, double> side[2];
                for (int k = 0; k < 2; ++k) {
                    int el = edge.elements[k];
                    LocalBasis lb = basis_eval(s, m, el, x);
                    auto loc = d.velocity_local(el);
                    for (int i = 0; i < lb.n_velocity; ++i) side[k][loc[i]] += lb.velocity[i];
                }
                for (int k = 0; k < 2; ++k)
                    for (auto [g, v] : side[k]) {
                        auto it = side[1 - k].find(g);
                        double other = it == side[1 - k].end() ? 0.0 : it->second;
                        EXPECT_NEAR(v, other, 1e-13);
                    }
            }
        }
    }
}

TEST(Interpolation, ReproducesSpaceMembers) {
    Mesh m = afem::test::graded_mesh(4, Point(0.6, 0.3));
    std::mt19937 rng(17);
    auto quad = [](const Point& x) { return Eigen::Vector2d(x.x() * x.y() + 1, x.y() * x.y() - 2 * x.x()); };
    auto lin = [](const Point& x) { return Eigen::Vector2d(2 * x.x() - x.y(), 3 + x.y()); };
    auto pfun = [](const Point& x) { return 1 + x.x() - 2 * x.y(); };
    for (const SchemeSpec& s : afem::test::all_schemes()) {
        DofMap d(s, m);
        const bool p2 = s.family == Family::taylor_hood;
        Eigen::VectorXd u = interpolate_velocity(d, p2 ? VectorField(quad) : VectorField(lin));
        Eigen::VectorXd p = interpolate_pressure(d, m, pfun);
        for (int t = 0; t < m.num_elements(); t += 3) {
            Point x = element_map(m, t).at(random_bary(rng));
            FieldValue fv = evaluate_field(d, basis_eval(s, m, t, x), t, u, p);
            Eigen::Vector2d expect = p2 ? quad(x) : lin(x);
            EXPECT_NEAR((fv.u - expect).norm(), 0.0, 1e-13);
            if (s.family != Family::stab_p1p0) {
                EXPECT_NEAR(fv.p, pfun(x), 1e-13);
            } else {
                auto c = m.corners(t);
                EXPECT_NEAR(fv.p, pfun((c[0] + c[1] + c[2]) / 3), 1e-13);
            }
        }
    }
}
