#include "afem/elements.hpp"

#include <algorithm>

#include "afem/errors.hpp"

namespace afem {

std::string to_string(Family family) {
    switch (family) {
    case Family::taylor_hood: return "taylor-hood";
    case Family::mini: return "mini";
    case Family::stab_p1p0: return "stab-p1p0";
    case Family::stab_p1p1: return "stab-p1p1";
    }
    return "unknown";
}

Family parse_family(const std::string& name) {
    for (auto f : {Family::taylor_hood, Family::mini, Family::stab_p1p0, Family::stab_p1p1})
        if (to_string(f) == name) return f;
    throw InputError("unknown scheme '" + name + "'");
}

SchemeSpec SchemeSpec::stabilized(Family family, StabParams params) {
    params.ell = family == Family::stab_p1p1 ? 1 : 0;
    SchemeSpec s{family, params};
    s.validate();
    return s;
}

void SchemeSpec::validate() const {
    if (!is_stabilized()) {
        if (stab) throw InputError(to_string(family) + " takes no stabilization parameters");
        return;
    }
    if (!stab) throw InputError(to_string(family) + " requires stabilization parameters");
    const auto& s = *stab;
    if (s.tau_div < 0 || s.tau_T < 0) throw InputError("tau_div and tau_T must be non-negative");
    if (!(s.tau_S > 0)) throw InputError("tau_S must be positive");
    if (s.ell != (family == Family::stab_p1p1 ? 1 : 0)) throw InputError("ell does not match the scheme");
    // Continuous P1 pressure has no jumps, so only the gradient penalty can stabilize it.
    if (family == Family::stab_p1p1 && !(s.tau_T > 0)) throw InputError("stab-p1p1 requires tau_T > 0");
}

int velocity_local_size(Family family) {
    switch (family) {
    case Family::taylor_hood: return 6;
    case Family::mini: return 4;
    default: return 3;
    }
}

int pressure_local_size(Family family) { return family == Family::stab_p1p0 ? 1 : 3; }

ElementMap element_map(const Mesh& mesh, int t) {
    ElementMap m;
    m.corners = mesh.corners(t);
    const Point e1 = m.corners[1] - m.corners[0];
    const Point e2 = m.corners[2] - m.corners[0];
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    m.area = 0.5 * det;
    // grad(lambda_1) and grad(lambda_2) are the rows of the inverse Jacobian.
    m.grad_lambda.row(1) << e2.y() / det, -e2.x() / det;
    m.grad_lambda.row(2) << -e1.y() / det, e1.x() / det;
    m.grad_lambda.row(0) = -m.grad_lambda.row(1) - m.grad_lambda.row(2);
    return m;
}

void eval_basis(Family family, const ElementMap& map, const Eigen::Vector3d& l, LocalBasis& out) {
    const auto& G = map.grad_lambda;
    auto g = [&](int i) -> Eigen::Vector2d { return G.row(i).transpose(); };

    out.n_velocity = velocity_local_size(family);
    out.n_pressure = pressure_local_size(family);

    switch (family) {
    case Family::taylor_hood:
        for (int i = 0; i < 3; ++i) {
            out.velocity[i] = l[i] * (2 * l[i] - 1);
            out.velocity_grad[i] = (4 * l[i] - 1) * g(i);
            out.velocity_laplacian[i] = 4 * g(i).squaredNorm();
        }
        for (int j = 0; j < 3; ++j) {
            int a = (j + 1) % 3, b = (j + 2) % 3;
            out.velocity[3 + j] = 4 * l[a] * l[b];
            out.velocity_grad[3 + j] = 4 * (l[a] * g(b) + l[b] * g(a));
            out.velocity_laplacian[3 + j] = 8 * g(a).dot(g(b));
        }
        break;
    case Family::mini:
        for (int i = 0; i < 3; ++i) {
            out.velocity[i] = l[i];
            out.velocity_grad[i] = g(i);
            out.velocity_laplacian[i] = 0;
        }
        out.velocity[3] = 27 * l[0] * l[1] * l[2];
        out.velocity_grad[3] = 27 * (l[1] * l[2] * g(0) + l[0] * l[2] * g(1) + l[0] * l[1] * g(2));
        out.velocity_laplacian[3] =
            54 * (l[0] * g(1).dot(g(2)) + l[1] * g(0).dot(g(2)) + l[2] * g(0).dot(g(1)));
        break;
    case Family::stab_p1p0:
    case Family::stab_p1p1:
        for (int i = 0; i < 3; ++i) {
            out.velocity[i] = l[i];
            out.velocity_grad[i] = g(i);
            out.velocity_laplacian[i] = 0;
        }
        break;
    }

    if (family == Family::stab_p1p0) {
        out.pressure[0] = 1;
        out.pressure_grad[0].setZero();
    } else {
        for (int i = 0; i < 3; ++i) {
            out.pressure[i] = l[i];
            out.pressure_grad[i] = g(i);
        }
    }
}

LocalBasis basis_eval(const SchemeSpec& scheme, const Mesh& mesh, int t, const Point& x) {
    if (t < 0 || t >= mesh.num_elements()) throw InputError("unknown element id");
    Eigen::Vector3d bary = mesh.barycentric(t, x);
    if (bary.minCoeff() < -1e-12) throw InputError("point lies outside the element");
    LocalBasis out;
    eval_basis(scheme.family, element_map(mesh, t), bary, out);
    return out;
}

DofMap::DofMap(const SchemeSpec& scheme, const Mesh& mesh)
    : family_(scheme.family),
      n_vel_local_(velocity_local_size(scheme.family)),
      n_pres_local_(pressure_local_size(scheme.family)) {
    scheme.validate();
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();
    const int nt = mesh.num_elements();

    n_scalar_ = nv;
    if (family_ == Family::taylor_hood) n_scalar_ += ne;
    if (family_ == Family::mini) n_scalar_ += nt;
    n_pressure_ = family_ == Family::stab_p1p0 ? nt : nv;

    boundary_scalar_.assign(n_scalar_, false);
    node_kind_.assign(n_scalar_, NodeKind::vertex);
    node_.resize(n_scalar_);
    for (int v = 0; v < nv; ++v) {
        boundary_scalar_[v] = mesh.boundary_vertex(v);
        node_[v] = mesh.vertex(v);
    }
    if (family_ == Family::taylor_hood) {
        for (int e = 0; e < ne; ++e) {
            const auto& edge = mesh.edge(e);
            boundary_scalar_[nv + e] = edge.on_boundary();
            node_kind_[nv + e] = NodeKind::edge;
            node_[nv + e] = 0.5 * (mesh.vertex(edge.vertices[0]) + mesh.vertex(edge.vertices[1]));
        }
    }
    if (family_ == Family::mini) {
        for (int t = 0; t < nt; ++t) {
            auto c = mesh.corners(t);
            node_kind_[nv + t] = NodeKind::bubble;
            node_[nv + t] = (c[0] + c[1] + c[2]) / 3.0;
        }
    }

    velocity_table_.resize(static_cast<std::size_t>(nt) * n_vel_local_);
    pressure_table_.resize(static_cast<std::size_t>(nt) * n_pres_local_);
    for (int t = 0; t < nt; ++t) {
        int* vel = velocity_table_.data() + t * n_vel_local_;
        const auto& e = mesh.element(t);
        for (int i = 0; i < 3; ++i) vel[i] = e[i];
        if (family_ == Family::taylor_hood)
            for (int j = 0; j < 3; ++j) vel[3 + j] = nv + mesh.element_edges(t)[j];
        if (family_ == Family::mini) vel[3] = nv + t;

        int* pres = pressure_table_.data() + t * n_pres_local_;
        if (family_ == Family::stab_p1p0)
            pres[0] = t;
        else
            for (int i = 0; i < 3; ++i) pres[i] = e[i];
    }

    for (int c = 0; c < 2; ++c)
        for (int s = 0; s < n_scalar_; ++s)
            if (boundary_scalar_[s]) boundary_velocity_.push_back(velocity_index(c, s));
}

FieldValue evaluate_field(const DofMap& dofs, const LocalBasis& basis, int t,
                          const Eigen::VectorXd& velocity, const Eigen::VectorXd& pressure) {
    FieldValue f;
    auto vel = dofs.velocity_local(t);
    for (int i = 0; i < basis.n_velocity; ++i) {
        for (int c = 0; c < 2; ++c) {
            double coeff = velocity[dofs.velocity_index(c, vel[i])];
            f.u[c] += coeff * basis.velocity[i];
            f.grad_u.row(c) += coeff * basis.velocity_grad[i].transpose();
            f.laplacian_u[c] += coeff * basis.velocity_laplacian[i];
        }
    }
    auto pres = dofs.pressure_local(t);
    for (int i = 0; i < basis.n_pressure; ++i) {
        f.p += pressure[pres[i]] * basis.pressure[i];
        f.grad_p += pressure[pres[i]] * basis.pressure_grad[i];
    }
    return f;
}

Eigen::VectorXd interpolate_velocity(const DofMap& dofs, const VectorField& u) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.velocity_dofs());
    for (int s = 0; s < dofs.scalar_dofs(); ++s) {
        if (dofs.node_kind(s) == DofMap::NodeKind::bubble) continue;
        Eigen::Vector2d value = u(dofs.node(s));
        out[dofs.velocity_index(0, s)] = value.x();
        out[dofs.velocity_index(1, s)] = value.y();
    }
    return out;
}

Eigen::VectorXd interpolate_pressure(const DofMap& dofs, const Mesh& mesh,
                                     const std::function<double(const Point&)>& p) {
    Eigen::VectorXd out(dofs.pressure_dofs());
    if (dofs.family() == Family::stab_p1p0) {
        for (int t = 0; t < mesh.num_elements(); ++t) {
            auto c = mesh.corners(t);
            out[t] = p((c[0] + c[1] + c[2]) / 3.0);
        }
    } else {
        for (int v = 0; v < mesh.num_vertices(); ++v) out[v] = p(mesh.vertex(v));
    }
    return out;
}

} // namespace afem
