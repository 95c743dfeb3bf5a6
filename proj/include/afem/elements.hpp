#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "afem/mesh.hpp"

namespace afem {

enum class Family { taylor_hood, mini, stab_p1p0, stab_p1p1 };

std::string to_string(Family family);
/// Accepts "taylor-hood", "mini", "stab-p1p0", "stab-p1p1". Throws InputError.
Family parse_family(const std::string& name);

/// Parameters of the div-div and pressure-penalty forms.
struct StabParams {
    double tau_div = 0.0;
    double tau_T = 0.0;
    double tau_S = 1.0 / 12.0;
    int ell = 0;  ///< pressure degree, 0 or 1
};

struct SchemeSpec {
    Family family = Family::taylor_hood;
    std::optional<StabParams> stab;

    static SchemeSpec taylor_hood() { return {Family::taylor_hood, std::nullopt}; }
    static SchemeSpec mini() { return {Family::mini, std::nullopt}; }
    static SchemeSpec stabilized(Family family, StabParams params = {});

    bool is_stabilized() const { return family == Family::stab_p1p0 || family == Family::stab_p1p1; }
    /// Throws InputError if the parameters do not fit the family.
    void validate() const;
};

constexpr int max_velocity_local = 6;
constexpr int max_pressure_local = 3;

int velocity_local_size(Family family);
int pressure_local_size(Family family);

/// Affine element map data: corners, constant barycentric gradients, area.
struct ElementMap {
    std::array<Point, 3> corners;
    Eigen::Matrix<double, 3, 2> grad_lambda;  ///< row i is grad(lambda_i)
    double area = 0;

    Point at(const Eigen::Vector3d& bary) const {
        return bary[0] * corners[0] + bary[1] * corners[1] + bary[2] * corners[2];
    }
};

ElementMap element_map(const Mesh& mesh, int t);

/// Local shape functions of one element at one point. Velocity functions are
/// scalar (one copy per component); vertex functions first, then edge
/// functions (edge j opposite vertex j) or the bubble.
struct LocalBasis {
    int n_velocity = 0;
    int n_pressure = 0;
    std::array<double, max_velocity_local> velocity{};
    std::array<Eigen::Vector2d, max_velocity_local> velocity_grad{};
    std::array<double, max_velocity_local> velocity_laplacian{};
    std::array<double, max_pressure_local> pressure{};
    std::array<Eigen::Vector2d, max_pressure_local> pressure_grad{};
};

void eval_basis(Family family, const ElementMap& map, const Eigen::Vector3d& bary, LocalBasis& out);

/// Basis at a physical point; throws InputError if x is outside the closed element.
LocalBasis basis_eval(const SchemeSpec& scheme, const Mesh& mesh, int t, const Point& x);

/// Global numbering. Velocity dofs are [component 0 scalars | component 1 scalars];
/// scalars are vertices, then edges (Taylor-Hood) or element bubbles (mini).
class DofMap {
public:
    enum class NodeKind { vertex, edge, bubble };

    DofMap(const SchemeSpec& scheme, const Mesh& mesh);

    Family family() const { return family_; }
    int scalar_dofs() const { return n_scalar_; }
    int velocity_dofs() const { return 2 * n_scalar_; }
    int pressure_dofs() const { return n_pressure_; }
    int ndof() const { return velocity_dofs() + pressure_dofs(); }
    int velocity_index(int component, int scalar) const { return component * n_scalar_ + scalar; }

    std::span<const int> velocity_local(int t) const {
        return {velocity_table_.data() + t * n_vel_local_, static_cast<std::size_t>(n_vel_local_)};
    }
    std::span<const int> pressure_local(int t) const {
        return {pressure_table_.data() + t * n_pres_local_, static_cast<std::size_t>(n_pres_local_)};
    }

    bool boundary_scalar(int s) const { return boundary_scalar_[s]; }
    NodeKind node_kind(int s) const { return node_kind_[s]; }
    /// Interpolation node of a scalar dof (vertex, edge midpoint, or centroid).
    const Point& node(int s) const { return node_[s]; }

    /// Sorted global velocity dofs on the boundary.
    const std::vector<int>& boundary_velocity_dofs() const { return boundary_velocity_; }
    int free_velocity_dofs() const { return velocity_dofs() - static_cast<int>(boundary_velocity_.size()); }

private:
    Family family_;
    int n_scalar_ = 0;
    int n_pressure_ = 0;
    int n_vel_local_ = 0;
    int n_pres_local_ = 0;
    std::vector<int> velocity_table_;
    std::vector<int> pressure_table_;
    std::vector<bool> boundary_scalar_;
    std::vector<NodeKind> node_kind_;
    std::vector<Point> node_;
    std::vector<int> boundary_velocity_;
};

inline DofMap build_dof_map(const SchemeSpec& scheme, const Mesh& mesh) { return DofMap(scheme, mesh); }

/// Discrete velocity/pressure pair restricted to one point of one element.
struct FieldValue {
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();  ///< row i is grad(u_i)
    Eigen::Vector2d laplacian_u = Eigen::Vector2d::Zero();
    double p = 0;
    Eigen::Vector2d grad_p = Eigen::Vector2d::Zero();
};

FieldValue evaluate_field(const DofMap& dofs, const LocalBasis& basis, int t,
                          const Eigen::VectorXd& velocity, const Eigen::VectorXd& pressure);

using VectorField = std::function<Eigen::Vector2d(const Point&)>;

/// Nodal interpolant; bubble coefficients are zero.
Eigen::VectorXd interpolate_velocity(const DofMap& dofs, const VectorField& u);
/// Vertex values for P1 pressure, centroid values for P0.
Eigen::VectorXd interpolate_pressure(const DofMap& dofs, const Mesh& mesh,
                                     const std::function<double(const Point&)>& p);

} // namespace afem
