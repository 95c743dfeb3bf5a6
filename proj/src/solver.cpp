#include "afem/solver.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/UmfPackSupport>

#include "afem/errors.hpp"

namespace afem {

namespace {

struct Augmented {
    const ConstrainedSystem& sys;
    int nf, np, n;

    // Residual rhs - K x evaluated on the original blocks.
    Eigen::VectorXd residual(const Eigen::VectorXd& rhs, const Eigen::VectorXd& x) const {
        Eigen::VectorXd r = rhs;
        auto u = x.head(nf);
        auto p = x.segment(nf, np);
        r.head(nf) -= sys.A * u;
        if (np > 0) {
            r.head(nf) -= sys.B.transpose() * p;
            r.segment(nf, np) -= sys.B * u - sys.M * p + sys.mean * x[n - 1];
            r[n - 1] -= sys.mean.dot(p);
        }
        return r;
    }

    SparseMatrix matrix() const {
        std::vector<Eigen::Triplet<double>> k;
        k.reserve(sys.A.nonZeros() + 2 * sys.B.nonZeros() + sys.M.nonZeros() + 2 * np);
        for (int col = 0; col < sys.A.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it) k.emplace_back(it.row(), col, it.value());
        for (int col = 0; col < sys.B.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(sys.B, col); it; ++it) {
                k.emplace_back(nf + it.row(), col, it.value());
                k.emplace_back(col, nf + it.row(), it.value());
            }
        for (int col = 0; col < sys.M.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(sys.M, col); it; ++it)
                k.emplace_back(nf + it.row(), nf + col, -it.value());
        if (np > 0)
            for (int i = 0; i < np; ++i) {
                k.emplace_back(nf + i, n - 1, sys.mean[i]);
                k.emplace_back(n - 1, nf + i, sys.mean[i]);
            }
        SparseMatrix K(n, n);
        K.setFromTriplets(k.begin(), k.end());
        return K;
    }
};

} // namespace

Solution solve_saddle(const ConstrainedSystem& system, const SolverOptions& opts) {
    const int nf = static_cast<int>(system.A.rows());
    const int np = static_cast<int>(system.M.rows());
    if (nf == 0) throw InputError("saddle-point system has no free velocity dofs");
    const int n = nf + np + (np > 0 ? 1 : 0);
    Augmented aug{system, nf, np, n};

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs.head(nf) = system.rhs_u;
    if (np > 0) rhs.segment(nf, np) = system.rhs_p;
    const double rhs_norm = rhs.norm();
    auto relative = [&](const Eigen::VectorXd& r) { return rhs_norm > 0 ? r.norm() / rhs_norm : r.norm(); };

    SparseMatrix K = aug.matrix();
    Eigen::VectorXd x;
    Eigen::VectorXd r;
    auto refine = [&](auto&& solve) {
        x = solve(rhs);
        r = aug.residual(rhs, x);
        for (int step = 0; step < opts.max_refinement_steps && relative(r) > 1e-14; ++step) {
            x += solve(r);
            r = aug.residual(rhs, x);
        }
    };

    if (n < opts.dense_threshold) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(K)};
        if (!(lu.rcond() > 1e-15))
            throw SolverError("dense LU is singular (rcond " + std::to_string(lu.rcond()) + ")");
        refine([&](const Eigen::VectorXd& b) -> Eigen::VectorXd { return lu.solve(b); });
    } else {
        // The dense border row/column of the multiplier ruins the UMFPACK
        // ordering. Factor the unbordered block with one pressure dof pinned
        // instead; its kernel is the constant pressure, so the bordered
        // solution follows from one back-substitution plus a constant shift.
        const int pin = np > 0 ? nf : -1;
        std::vector<Eigen::Triplet<double>> k;
        k.reserve(K.nonZeros());
        for (int col = 0; col < K.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
                if (np > 0 && (it.row() == n - 1 || col == n - 1)) continue;
                if (it.row() == pin || col == pin) continue;
                k.emplace_back(it.row(), col, it.value());
            }
        const int m = nf + np;
        if (pin >= 0) k.emplace_back(pin, pin, 1.0);
        SparseMatrix K1(m, m);
        K1.setFromTriplets(k.begin(), k.end());
        K1.makeCompressed();

        Eigen::UmfPackLU<SparseMatrix> lu;
        lu.compute(K1);
        if (lu.info() != Eigen::Success)
            throw SolverError("UMFPACK factorization failed (zero pivot or singular matrix)");
        const double measure = np > 0 ? system.mean.sum() : 0.0;
        if (np > 0 && !(std::abs(measure) > 0)) throw SolverError("pressure mean weights sum to zero");

        refine([&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
            Eigen::VectorXd y(n);
            if (np == 0) {
                y = lu.solve(b);
                if (lu.info() != Eigen::Success) throw SolverError("UMFPACK solve failed");
                return y;
            }
            // Compatibility with the constant kernel fixes the multiplier.
            const double lambda = b.segment(nf, np).sum() / measure;
            Eigen::VectorXd rhs1 = b.head(m);
            rhs1.segment(nf, np) -= lambda * system.mean;
            rhs1[pin] = 0;
            Eigen::VectorXd z = lu.solve(rhs1);
            if (lu.info() != Eigen::Success) throw SolverError("UMFPACK solve failed");
            const double shift = (b[n - 1] - system.mean.dot(z.segment(nf, np))) / measure;
            z.segment(nf, np).array() += shift;
            y.head(m) = z;
            y[n - 1] = lambda;
            return y;
        });
    }
    if (!x.allFinite()) throw SolverError("solution contains non-finite values");
    if (relative(r) > 1e-10)
        throw SolverError("relative residual " + std::to_string(relative(r)) + " exceeds 1e-10");

    Solution sol;
    sol.velocity = system.boundary_values;
    for (int k = 0; k < nf; ++k) sol.velocity[system.free_dofs[k]] = x[k];
    sol.pressure = x.segment(nf, np);
    sol.multiplier = np > 0 ? x[n - 1] : 0.0;
    sol.residual = relative(r);
    const double measure = system.mean.sum();
    sol.pressure_mean = measure > 0 ? system.mean.dot(sol.pressure) / measure : 0.0;
    return sol;
}

} // namespace afem
