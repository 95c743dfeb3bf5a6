#include "afem/exact.hpp"

#include <cmath>
#include <numbers>

#include "afem/errors.hpp"

namespace afem {

StokesletValue stokeslet(const StokesletSpec& spec, const Point& x) {
    const Eigen::Vector2d r = x - spec.z;
    const double r2 = r.squaredNorm();
    if (r2 == 0) throw SingularityError("Stokeslet evaluated at its source point");
    const Eigen::Vector2d& F = spec.F;
    const double rf = r.dot(F);
    constexpr double inv4pi = 1.0 / (4.0 * std::numbers::pi);

    StokesletValue v;
    v.u = -inv4pi * (0.5 * std::log(r2) * F - r * (rf / r2));
    v.p = rf / (2.0 * std::numbers::pi * r2);
    // d_k u_i = -(1/4pi)(F_i r_k - delta_ik (r.F) - r_i F_k + 2 r_i r_k (r.F)/|r|^2) / |r|^2
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            v.grad_u(i, k) = -inv4pi * (F[i] * r[k] - (i == k ? rf : 0.0) - r[i] * F[k] + 2 * r[i] * r[k] * rf / r2) / r2;
    return v;
}

ExactSolution stokeslet_solution(const StokesletSpec& spec) {
    return {[spec](const Point& x) { return stokeslet(spec, x).u; },
            [spec](const Point& x) { return stokeslet(spec, x).grad_u; },
            [spec](const Point& x) { return stokeslet(spec, x).p; }};
}

ErrorNorms weighted_error(const Mesh& mesh, const DofMap& dofs, const Solution& solution,
                          const ExactSolution& exact, const WeightSpec& weight, double tol) {
    WeightedIntegralOptions opts;
    opts.tol = tol;
    opts.rule_degree = 8;

    ErrorNorms out;
    LocalBasis basis;
    double grad_sq = 0, mass = 0, mean_num = 0;
    const int nt = mesh.num_elements();
    std::vector<ElementMap> maps(nt);
    for (int t = 0; t < nt; ++t) maps[t] = element_map(mesh, t);

    auto discrete = [&](int t, const Point& x) {
        eval_basis(dofs.family(), maps[t], mesh.barycentric(t, x), basis);
        return evaluate_field(dofs, basis, t, solution.velocity, solution.pressure);
    };
    auto accumulate = [&](double& target, const IntegralResult& r) {
        target += r.value;
        out.converged = out.converged && r.converged;
    };

    for (int t = 0; t < nt; ++t) {
        const auto& tri = maps[t].corners;
        accumulate(grad_sq, weighted_integral(
                                tri, weight,
                                [&](const Point& x) { return (exact.gradient(x) - discrete(t, x).grad_u).squaredNorm(); },
                                opts));
        accumulate(mass, weighted_integral(tri, weight, [](const Point&) { return 1.0; }, opts));
        accumulate(mean_num, weighted_integral(
                                 tri, weight, [&](const Point& x) { return exact.pressure(x) - discrete(t, x).p; },
                                 opts));
    }
    const double shift = mean_num / mass;
    double p_sq = 0;
    for (int t = 0; t < nt; ++t) {
        accumulate(p_sq, weighted_integral(
                             maps[t].corners, weight,
                             [&](const Point& x) {
                                 double e = exact.pressure(x) - discrete(t, x).p - shift;
                                 return e * e;
                             },
                             opts));
    }
    out.err_u = std::sqrt(grad_sq);
    out.err_p = std::sqrt(p_sq);
    out.total = std::hypot(out.err_u, out.err_p);
    return out;
}

} // namespace afem
