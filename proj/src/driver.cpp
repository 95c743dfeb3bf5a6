#include "afem/driver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "afem/errors.hpp"
#include "afem/exact.hpp"
#include "afem/io.hpp"

namespace afem {

void RunConfig::validate() const {
    scheme.validate();
    if (domain.subdivisions < 1) throw InputError("subdivisions must be at least 1");
    if (!(alpha > 0 && alpha < 2)) throw InputError("alpha must lie in (0, 2)");
    if (!(theta > 0 && theta <= 1)) throw InputError("theta must lie in (0, 1]");
    if (sources.empty()) throw InputError("at least one source is required");
    if (max_iterations < 1) throw InputError("max-iters must be positive");
    if (ndof_cap < 1) throw InputError("ndof-cap must be positive");
    if (!(min_diameter >= 0)) throw InputError("min_diameter must be non-negative");
    if (exact && sources.size() != 1) throw InputError("exact mode needs exactly one source");
}

const char* to_string(StopReason reason) {
    switch (reason) {
    case StopReason::max_iterations: return "max-iters reached";
    case StopReason::ndof_cap: return "ndof cap reached";
    case StopReason::empty_marking: return "nothing marked";
    case StopReason::resolution: return "marked element below resolution";
    }
    return "unknown";
}

std::vector<int> mark(std::span<const double> eta, double theta) {
    std::vector<int> marked;
    if (eta.empty()) return marked;
    const double threshold = theta * *std::max_element(eta.begin(), eta.end());
    for (std::size_t t = 0; t < eta.size(); ++t)
        if (eta[t] > threshold) marked.push_back(static_cast<int>(t));
    return marked;
}

void compute_rates(ConvergenceTable& table) {
    auto rate = [](double q0, double q1, double n0, double n1) -> std::optional<double> {
        if (!(q0 > 0 && q1 > 0) || n0 == n1) return std::nullopt;
        return -std::log(q1 / q0) / std::log(n1 / n0);
    };
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        auto& row = table.rows[k];
        row.eoc_est.reset();
        row.eoc_err.reset();
        if (k == 0) continue;
        const auto& prev = table.rows[k - 1];
        row.eoc_est = rate(prev.estimator, row.estimator, prev.ndof, row.ndof);
        if (prev.err_total && row.err_total) row.eoc_err = rate(*prev.err_total, *row.err_total, prev.ndof, row.ndof);
    }
}

double mean_rate(const ConvergenceTable& table, std::optional<double> ConvergenceRow::*column, int count) {
    double sum = 0;
    int n = 0;
    for (auto it = table.rows.rbegin(); it != table.rows.rend() && n < count; ++it) {
        const auto& value = (*it).*column;
        if (!value) continue;
        sum += *value;
        ++n;
    }
    return n > 0 ? sum / n : std::nan("");
}

RunResult run_afem(const RunConfig& config, const IterationObserver& observer) {
    config.validate();

    Mesh mesh = build_initial_mesh(config.domain);
    std::vector<Point> points;
    for (const auto& s : config.sources) points.push_back(s.z);
    const WeightSpec weight = WeightSpec::for_sources(points, config.alpha, mesh);
    std::optional<ExactSolution> exact;
    if (config.exact) exact = stokeslet_solution({config.sources[0].z, config.sources[0].F});

    RunResult result{{}, StopReason::max_iterations, mesh, {}};
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        DofMap dofs(config.scheme, mesh);
        if (dofs.ndof() > config.ndof_cap) {
            result.stop = StopReason::ndof_cap;
            break;
        }

        SaddleSystem system = assemble(mesh, config.scheme, dofs);
        system.load = delta_load(mesh, config.scheme, dofs, config.sources);
        Eigen::VectorXd g = exact ? boundary_data(dofs, exact->velocity)
                                  : Eigen::VectorXd::Zero(dofs.boundary_velocity_dofs().size());
        ConstrainedSystem constrained = apply_dirichlet(system, dofs, g);

        Solution solution;
        try {
            solution = solve_saddle(constrained);
        } catch (const std::exception& e) {
            std::string path = config.dump_mesh.empty() ? "afem_failure.mesh" : config.dump_mesh;
            write_mesh(path, mesh);
            throw SolverError("solve failed at iteration " + std::to_string(iter) + ": " + e.what() +
                              " (mesh written to " + path + ")");
        }

        IndicatorField field = compute_indicators(mesh, config.scheme, dofs, solution, weight, config.sources);

        ConvergenceRow row;
        row.iteration = iter;
        row.ndof = dofs.ndof();
        row.elements = mesh.num_elements();
        row.estimator = field.global();
        if (exact) {
            ErrorNorms err = weighted_error(mesh, dofs, solution, *exact, weight);
            row.err_u = err.err_u;
            row.err_p = err.err_p;
            row.err_total = err.total;
            if (err.total > 0) row.effectivity = row.estimator / err.total;
        }
        result.table.rows.push_back(row);
        compute_rates(result.table);
        result.mesh = mesh;
        result.indicators = field.eta;
        if (observer) observer(result.table.rows.back());

        std::vector<int> marked = mark(field, config.theta);
        if (marked.empty()) {
            result.stop = StopReason::empty_marking;
            break;
        }
        if (iter + 1 == config.max_iterations) break;
        if (std::any_of(marked.begin(), marked.end(),
                        [&](int t) { return mesh.diameter(t) < config.min_diameter; })) {
            result.stop = StopReason::resolution;
            break;
        }
        mesh = mesh.bisect(marked);
    }
    return result;
}

} // namespace afem
