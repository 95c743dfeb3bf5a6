#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afem/assembly.hpp"
#include "afem/elements.hpp"
#include "afem/estimator.hpp"
#include "afem/mesh.hpp"
#include "afem/solver.hpp"

namespace afem {

struct RunConfig {
    DomainSpec domain;
    SchemeSpec scheme;
    double alpha = 1.5;
    std::vector<PointSource> sources;
    double theta = 0.5;
    int max_iterations = 25;
    int ndof_cap = 200000;
    bool exact = false;  ///< Stokeslet boundary data and error measurement (single source only)
    /// The loop stops once a marked element is smaller than this; further
    /// bisection would collapse vertices in double precision.
    double min_diameter = 1e-11;

    std::string out_csv;
    std::string dump_mesh;
    std::string dump_indicators;
    std::string plot;

    /// Throws InputError on an inconsistent configuration.
    void validate() const;
};

struct ConvergenceRow {
    int iteration = 0;
    int ndof = 0;
    int elements = 0;
    double estimator = 0;
    std::optional<double> err_u, err_p, err_total;
    std::optional<double> eoc_est, eoc_err;
    std::optional<double> effectivity;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Elements with eta_T > theta * max eta.
std::vector<int> mark(std::span<const double> eta, double theta);
inline std::vector<int> mark(const IndicatorField& field, double theta) { return mark(field.eta, theta); }

/// Fills eoc_est and eoc_err from consecutive rows: -log(q_k/q_{k-1}) / log(N_k/N_{k-1}).
void compute_rates(ConvergenceTable& table);

/// Mean of the last `count` available rates of the selected column.
double mean_rate(const ConvergenceTable& table, std::optional<double> ConvergenceRow::*column, int count);

enum class StopReason { max_iterations, ndof_cap, empty_marking, resolution };

const char* to_string(StopReason reason);

struct RunResult {
    ConvergenceTable table;
    StopReason stop = StopReason::max_iterations;
    Mesh mesh;  ///< last solved mesh
    std::vector<double> indicators;
};

/// Per-iteration hook, called after each row is recorded.
using IterationObserver = std::function<void(const ConvergenceRow&)>;

/// Solve, estimate, mark, refine until max_iterations, the Ndof cap, an
/// empty marking, or a marked element below min_diameter. Throws SolverError (with the iteration index) on a failed
/// solve after dumping the offending mesh.
RunResult run_afem(const RunConfig& config, const IterationObserver& observer = {});

} // namespace afem
