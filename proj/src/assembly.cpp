#include "afem/assembly.hpp"

#include <string>

#include "afem/errors.hpp"
#include "afem/quadrature.hpp"

namespace afem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_pressure_jumps(const Mesh& mesh, const DofMap& dofs, double tau_S, Triplets& m) {
    const LineRule& rule = gauss_legendre(3);
    const int np_local = pressure_local_size(dofs.family());
    LocalBasis basis;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& edge = mesh.edge(e);
        if (edge.on_boundary()) continue;
        const Point& a = mesh.vertex(edge.vertices[0]);
        const Point& b = mesh.vertex(edge.vertices[1]);
        const double len = (b - a).norm();
        const int tp = edge.elements[0], tm = edge.elements[1];
        const ElementMap map_p = element_map(mesh, tp), map_m = element_map(mesh, tm);

        // Local dofs of both sides: jump [q] = q|T+ - q|T-.
        std::vector<int> ids;
        for (int i : dofs.pressure_local(tp)) ids.push_back(i);
        for (int i : dofs.pressure_local(tm)) ids.push_back(i);
        Eigen::MatrixXd local = Eigen::MatrixXd::Zero(ids.size(), ids.size());
        Eigen::VectorXd jump(ids.size());
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            Point x = a + rule.points[q] * (b - a);
            eval_basis(dofs.family(), map_p, mesh.barycentric(tp, x), basis);
            for (int i = 0; i < np_local; ++i) jump[i] = basis.pressure[i];
            eval_basis(dofs.family(), map_m, mesh.barycentric(tm, x), basis);
            for (int i = 0; i < np_local; ++i) jump[np_local + i] = -basis.pressure[i];
            local.noalias() += rule.weights[q] * len * jump * jump.transpose();
        }
        const double scale = tau_S * len;  // h_S = |S|
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < ids.size(); ++j) m.emplace_back(ids[i], ids[j], scale * local(i, j));
    }
}

} // namespace

SaddleSystem assemble(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs) {
    scheme.validate();
    if (scheme.family != dofs.family()) throw InputError("dof map does not match the scheme");

    const QuadratureRule& rule = triangle_rule(assembly_quadrature_degree);
    const int nv = dofs.velocity_dofs();
    const int np = dofs.pressure_dofs();
    const double tau_div = scheme.stab ? scheme.stab->tau_div : 0.0;
    const double tau_T = scheme.stab ? scheme.stab->tau_T : 0.0;

    Triplets a, bt, m;
    LocalBasis basis;
    for (int t = 0; t < mesh.num_elements(); ++t) {
        const ElementMap map = element_map(mesh, t);
        const int nvl = velocity_local_size(scheme.family);
        const int npl = pressure_local_size(scheme.family);
        Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(nvl, nvl);
        Eigen::MatrixXd divdiv = Eigen::MatrixXd::Zero(2 * nvl, 2 * nvl);
        Eigen::MatrixXd bloc = Eigen::MatrixXd::Zero(npl, 2 * nvl);
        Eigen::MatrixXd grad_pen = Eigen::MatrixXd::Zero(npl, npl);

        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.points[q];
            eval_basis(scheme.family, map, Eigen::Vector3d(l[0], l[1], l[2]), basis);
            const double w = rule.weights[q] * map.area;
            for (int i = 0; i < nvl; ++i)
                for (int j = 0; j < nvl; ++j) stiff(i, j) += w * basis.velocity_grad[i].dot(basis.velocity_grad[j]);
            for (int i = 0; i < npl; ++i)
                for (int c = 0; c < 2; ++c)
                    for (int j = 0; j < nvl; ++j)
                        bloc(i, c * nvl + j) -= w * basis.pressure[i] * basis.velocity_grad[j][c];
            if (tau_div > 0) {
                for (int c = 0; c < 2; ++c)
                    for (int i = 0; i < nvl; ++i)
                        for (int d = 0; d < 2; ++d)
                            for (int j = 0; j < nvl; ++j)
                                divdiv(c * nvl + i, d * nvl + j) +=
                                    w * basis.velocity_grad[i][c] * basis.velocity_grad[j][d];
            }
            if (tau_T > 0) {
                for (int i = 0; i < npl; ++i)
                    for (int j = 0; j < npl; ++j)
                        grad_pen(i, j) += w * basis.pressure_grad[i].dot(basis.pressure_grad[j]);
            }
        }

        auto vel = dofs.velocity_local(t);
        auto pres = dofs.pressure_local(t);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < nvl; ++i)
                for (int j = 0; j < nvl; ++j)
                    a.emplace_back(dofs.velocity_index(c, vel[i]), dofs.velocity_index(c, vel[j]), stiff(i, j));
        if (tau_div > 0) {
            for (int c = 0; c < 2; ++c)
                for (int i = 0; i < nvl; ++i)
                    for (int d = 0; d < 2; ++d)
                        for (int j = 0; j < nvl; ++j)
                            a.emplace_back(dofs.velocity_index(c, vel[i]), dofs.velocity_index(d, vel[j]),
                                           tau_div * divdiv(c * nvl + i, d * nvl + j));
        }
        for (int i = 0; i < npl; ++i)
            for (int c = 0; c < 2; ++c)
                for (int j = 0; j < nvl; ++j)
                    bt.emplace_back(pres[i], dofs.velocity_index(c, vel[j]), bloc(i, c * nvl + j));
        if (tau_T > 0) {
            for (int i = 0; i < npl; ++i)
                for (int j = 0; j < npl; ++j) m.emplace_back(pres[i], pres[j], tau_T * grad_pen(i, j));
        }
    }
    if (scheme.is_stabilized()) add_pressure_jumps(mesh, dofs, scheme.stab->tau_S, m);

    SaddleSystem sys;
    sys.A.resize(nv, nv);
    sys.A.setFromTriplets(a.begin(), a.end());
    sys.B.resize(np, nv);
    sys.B.setFromTriplets(bt.begin(), bt.end());
    sys.M.resize(np, np);
    sys.M.setFromTriplets(m.begin(), m.end());
    sys.load = Eigen::VectorXd::Zero(nv);

    sys.mean = Eigen::VectorXd::Zero(np);
    for (int t = 0; t < mesh.num_elements(); ++t) {
        auto pres = dofs.pressure_local(t);
        // P1 basis functions integrate to |T|/3, the P0 one to |T|.
        double share = pres.size() == 1 ? mesh.area(t) : mesh.area(t) / 3.0;
        for (int i : pres) sys.mean[i] += share;
    }
    return sys;
}

Eigen::VectorXd delta_load(const Mesh& mesh, const SchemeSpec& scheme, const DofMap& dofs,
                           std::span<const PointSource> sources) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs.velocity_dofs());
    for (const auto& s : sources) {
        auto hits = mesh.elements_containing(s.z);
        if (hits.empty())
            throw InputError("point source (" + std::to_string(s.z.x()) + ", " + std::to_string(s.z.y()) +
                             ") lies outside the domain");
        const int t = hits.front();
        LocalBasis basis = basis_eval(scheme, mesh, t, s.z);
        auto vel = dofs.velocity_local(t);
        for (int i = 0; i < basis.n_velocity; ++i)
            for (int c = 0; c < 2; ++c) load[dofs.velocity_index(c, vel[i])] += s.F[c] * basis.velocity[i];
    }
    return load;
}

ConstrainedSystem apply_dirichlet(const SaddleSystem& system, const DofMap& dofs, const Eigen::VectorXd& g) {
    const auto& bdofs = dofs.boundary_velocity_dofs();
    if (g.size() != static_cast<Eigen::Index>(bdofs.size()))
        throw InputError("boundary data has " + std::to_string(g.size()) + " entries, expected " +
                         std::to_string(bdofs.size()));
    const int nv = dofs.velocity_dofs();
    const int np = dofs.pressure_dofs();

    ConstrainedSystem out;
    out.boundary_values = Eigen::VectorXd::Zero(nv);
    std::vector<int> free_index(nv, -1);
    {
        std::vector<bool> is_boundary(nv, false);
        for (std::size_t k = 0; k < bdofs.size(); ++k) {
            is_boundary[bdofs[k]] = true;
            out.boundary_values[bdofs[k]] = g[k];
        }
        for (int i = 0; i < nv; ++i) {
            if (is_boundary[i]) continue;
            free_index[i] = static_cast<int>(out.free_dofs.size());
            out.free_dofs.push_back(i);
        }
    }
    const int nf = static_cast<int>(out.free_dofs.size());

    // Lifted right-hand sides: f - A u_g and -B u_g.
    Eigen::VectorXd a_g = system.A * out.boundary_values;
    Eigen::VectorXd b_g = system.B * out.boundary_values;
    out.rhs_u.resize(nf);
    for (int k = 0; k < nf; ++k) out.rhs_u[k] = system.load[out.free_dofs[k]] - a_g[out.free_dofs[k]];
    out.rhs_p = -b_g;

    Triplets a, b;
    for (int col = 0; col < system.A.outerSize(); ++col) {
        if (free_index[col] < 0) continue;
        for (SparseMatrix::InnerIterator it(system.A, col); it; ++it)
            if (free_index[it.row()] >= 0) a.emplace_back(free_index[it.row()], free_index[col], it.value());
    }
    for (int col = 0; col < system.B.outerSize(); ++col) {
        if (free_index[col] < 0) continue;
        for (SparseMatrix::InnerIterator it(system.B, col); it; ++it)
            b.emplace_back(it.row(), free_index[col], it.value());
    }
    out.A.resize(nf, nf);
    out.A.setFromTriplets(a.begin(), a.end());
    out.B.resize(np, nf);
    out.B.setFromTriplets(b.begin(), b.end());
    out.M = system.M;
    out.mean = system.mean;
    return out;
}

Eigen::VectorXd boundary_data(const DofMap& dofs, const VectorField& u) {
    const auto& bdofs = dofs.boundary_velocity_dofs();
    Eigen::VectorXd g(bdofs.size());
    for (std::size_t k = 0; k < bdofs.size(); ++k) {
        const int comp = bdofs[k] / dofs.scalar_dofs();
        const int s = bdofs[k] % dofs.scalar_dofs();
        g[k] = u(dofs.node(s))[comp];
    }
    return g;
}

} // namespace afem
