#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "afem/driver.hpp"
#include "afem/errors.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace afem;

namespace {

RunConfig example1(Family family) {
    RunConfig cfg;
    cfg.scheme = family == Family::taylor_hood ? SchemeSpec::taylor_hood() : afem::test::stab_p1p0();
    cfg.sources = {{Point(0.5, 0.5), Eigen::Vector2d(1, 1)}};
    return cfg;
}

} // namespace

TEST(Mark, MaximumStrategy) {
    EXPECT_EQ(afem::test::marking_count(), 2);
    EXPECT_EQ(mark(std::vector<double>{1.0, 0.6, 0.4}, 0.5), (std::vector<int>{0, 1}));
    EXPECT_TRUE(mark(std::vector<double>{0, 0, 0}, 0.5).empty());
    EXPECT_EQ(mark(std::vector<double>{2, 2, 2}, 0.5).size(), 3u);
    EXPECT_TRUE(mark(std::vector<double>{}, 0.5).empty());
    EXPECT_EQ(mark(std::vector<double>{1.0, 0.6, 0.4}, 1.0).size(), 0u);
}

TEST(Rates, Examples) {
    ConvergenceTable t;
    t.rows.resize(2);
    t.rows[0].ndof = 100, t.rows[0].estimator = 3.0 / 100;
    t.rows[1].ndof = 200, t.rows[1].estimator = 3.0 / 200;
    compute_rates(t);
    EXPECT_FALSE(t.rows[0].eoc_est);
    EXPECT_NEAR(*t.rows[1].eoc_est, 1.0, 1e-14);

    t.rows[0].ndof = 100, t.rows[0].estimator = 1.0 / 10;
    t.rows[1].ndof = 400, t.rows[1].estimator = 1.0 / 20;
    t.rows[0].err_total = 2.0, t.rows[1].err_total = 2.0;
    compute_rates(t);
    EXPECT_NEAR(*t.rows[1].eoc_est, 0.5, 1e-14);
    EXPECT_NEAR(*t.rows[1].eoc_err, 0.0, 1e-14);

    t.rows[1].estimator = 0;
    t.rows[1].err_total.reset();
    compute_rates(t);
    EXPECT_FALSE(t.rows[1].eoc_est);
    EXPECT_FALSE(t.rows[1].eoc_err);
}

TEST(Rates, MeanOfLastRows) {
    ConvergenceTable t;
    for (int k = 0; k < 6; ++k) {
        ConvergenceRow r;
        r.ndof = 100 << k;
        r.estimator = 1.0 / r.ndof;
        t.rows.push_back(r);
    }
    t.rows[5].estimator = t.rows[4].estimator;  // last rate 0
    compute_rates(t);
    EXPECT_NEAR(mean_rate(t, &ConvergenceRow::eoc_est, 5), 0.8, 1e-14);
    EXPECT_NEAR(mean_rate(t, &ConvergenceRow::eoc_est, 2), 0.5, 1e-14);
    EXPECT_TRUE(std::isnan(mean_rate(t, &ConvergenceRow::eoc_err, 5)));
}

TEST(RunConfig, Validation) {
    RunConfig cfg = example1(Family::taylor_hood);
    EXPECT_NO_THROW(cfg.validate());
    RunConfig bad = cfg;
    bad.alpha = 2.0;
    EXPECT_THROW(bad.validate(), InputError);
    bad = cfg, bad.alpha = 0.0;
    EXPECT_THROW(bad.validate(), InputError);
    bad = cfg, bad.theta = 0.0;
    EXPECT_THROW(bad.validate(), InputError);
    bad = cfg, bad.theta = 1.5;
    EXPECT_THROW(bad.validate(), InputError);
    bad = cfg, bad.sources.clear();
    EXPECT_THROW(bad.validate(), InputError);
    bad = cfg, bad.exact = true, bad.sources.push_back({Point(0.2, 0.2), Eigen::Vector2d(1, 0)});
    EXPECT_THROW(bad.validate(), InputError);
}

TEST(RunAfem, ZeroForceStopsAfterFirstIteration) {
    RunConfig cfg = example1(Family::taylor_hood);
    cfg.sources[0].F = Eigen::Vector2d::Zero();
    RunResult r = run_afem(cfg);
    ASSERT_EQ(r.table.rows.size(), 1u);
    EXPECT_EQ(r.table.rows[0].estimator, 0.0);
    EXPECT_EQ(r.stop, StopReason::empty_marking);
    for (double e : r.indicators) EXPECT_EQ(e, 0.0);
}

TEST(RunAfem, RowsAreConsistent) {
    RunConfig cfg = example1(Family::taylor_hood);
    cfg.max_iterations = 8;
    std::vector<int> seen;
    RunResult r = run_afem(cfg, [&](const ConvergenceRow& row) { seen.push_back(row.iteration); });
    ASSERT_EQ(r.table.rows.size(), 8u);
    EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
    EXPECT_EQ(r.stop, StopReason::max_iterations);
    for (std::size_t k = 1; k < r.table.rows.size(); ++k) EXPECT_GT(r.table.rows[k].ndof, r.table.rows[k - 1].ndof);
    for (const auto& row : r.table.rows) {
        EXPECT_GT(row.estimator, 0);
        EXPECT_FALSE(row.err_total);
        EXPECT_FALSE(row.effectivity);
    }
    EXPECT_EQ(static_cast<int>(r.indicators.size()), r.mesh.num_elements());
    EXPECT_EQ(r.table.rows.back().elements, r.mesh.num_elements());
}

TEST(RunAfem, NdofCapStopsBeforeSolving) {
    RunConfig cfg = example1(Family::taylor_hood);
    cfg.max_iterations = 50;
    cfg.ndof_cap = 2000;
    RunResult r = run_afem(cfg);
    EXPECT_EQ(r.stop, StopReason::ndof_cap);
    for (const auto& row : r.table.rows) EXPECT_LE(row.ndof, 2000);
}

TEST(RunAfem, Deterministic) {
    RunConfig cfg = example1(Family::stab_p1p0);
    cfg.max_iterations = 10;
    RunResult a = run_afem(cfg), b = run_afem(cfg);
    ASSERT_EQ(a.table.rows.size(), b.table.rows.size());
    for (std::size_t k = 0; k < a.table.rows.size(); ++k) {
        EXPECT_EQ(a.table.rows[k].ndof, b.table.rows[k].ndof);
        EXPECT_EQ(a.table.rows[k].estimator, b.table.rows[k].estimator);
    }
}

TEST(RunAfem, RefinementConcentratesAtSource) {
    RunConfig cfg = example1(Family::taylor_hood);
    cfg.max_iterations = 11;  // ten refinements
    RunResult r = run_afem(cfg);
    const Mesh initial = build_initial_mesh(cfg.domain);
    double h0 = 0;
    for (int t = 0; t < initial.num_elements(); ++t) h0 = std::max(h0, initial.diameter(t));
    double hz = 1e9;
    for (int t : r.mesh.elements_containing(Point(0.5, 0.5))) hz = std::min(hz, r.mesh.diameter(t));
    EXPECT_LE(hz, h0 / 32);
}

TEST(RunAfem, ExactModeFillsErrorColumns) {
    RunConfig cfg = example1(Family::taylor_hood);
    cfg.exact = true;
    cfg.max_iterations = 5;
    RunResult r = run_afem(cfg);
    for (const auto& row : r.table.rows) {
        ASSERT_TRUE(row.err_total && row.err_u && row.err_p && row.effectivity);
        EXPECT_NEAR(*row.err_total, std::hypot(*row.err_u, *row.err_p), 1e-14);
        EXPECT_NEAR(*row.effectivity, row.estimator / *row.err_total, 1e-14);
    }
}

TEST(RunAfem, EstimatorRatesOnShortRuns) {
    // Short runs of the square-domain source problem; the full-length runs
    // live in the acceptance suite.
    for (Family f : {Family::taylor_hood, Family::stab_p1p0}) {
        RunConfig cfg = example1(f);
        cfg.max_iterations = 200;
        cfg.ndof_cap = 20000;
        RunResult r = run_afem(cfg);
        const double target = f == Family::taylor_hood ? 1.0 : 0.5;
        EXPECT_NEAR(mean_rate(r.table, &ConvergenceRow::eoc_est, 5), target, 0.2) << to_string(f);
    }
}

TEST(RunAfem, ResolutionGuardStopsDegenerateRefinement) {
    RunConfig cfg = example1(Family::taylor_hood);
    cfg.max_iterations = 1000;
    cfg.min_diameter = 1e-3;
    RunResult r = run_afem(cfg);
    EXPECT_EQ(r.stop, StopReason::resolution);
    double hmin = 1;
    for (int t = 0; t < r.mesh.num_elements(); ++t) hmin = std::min(hmin, r.mesh.diameter(t));
    EXPECT_LT(hmin, 1e-3);
    EXPECT_GT(hmin, 1e-3 / 4);
}
