#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "afem/errors.hpp"
#include "afem/io.hpp"
#include "support.hpp"

using namespace afem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

} // namespace

TEST(Config, FullExample) {
    RunConfig cfg = parse(
        "# stabilized run\n"
        "domain = l-shape\n"
        "subdivisions = 3\n"
        "scheme = stab-p1p0\n"
        "alpha = 1.25   # weight exponent\n"
        "sources = 0.5 0.5 1 1\n"
        "theta = 0.4\n"
        "max-iters = 12\n"
        "ndof-cap = 5000\n"
        "tau-div = 0.1\n"
        "tau-s = 0.25\n"
        "out-csv = run.csv\n"
        "dump-mesh = run.mesh\n"
        "dump-indicators = run.eta\n");
    EXPECT_EQ(cfg.domain.kind, DomainKind::l_shape);
    EXPECT_EQ(cfg.domain.subdivisions, 3);
    EXPECT_EQ(cfg.scheme.family, Family::stab_p1p0);
    ASSERT_TRUE(cfg.scheme.stab);
    EXPECT_EQ(cfg.scheme.stab->tau_div, 0.1);
    EXPECT_EQ(cfg.scheme.stab->tau_T, 0.0);
    EXPECT_EQ(cfg.scheme.stab->tau_S, 0.25);
    EXPECT_EQ(cfg.scheme.stab->ell, 0);
    EXPECT_EQ(cfg.alpha, 1.25);
    ASSERT_EQ(cfg.sources.size(), 1u);
    EXPECT_EQ(cfg.sources[0].F, Eigen::Vector2d(1, 1));
    EXPECT_EQ(cfg.theta, 0.4);
    EXPECT_EQ(cfg.max_iterations, 12);
    EXPECT_EQ(cfg.ndof_cap, 5000);
    EXPECT_FALSE(cfg.exact);
    EXPECT_EQ(cfg.out_csv, "run.csv");
    EXPECT_EQ(cfg.dump_mesh, "run.mesh");
    EXPECT_EQ(cfg.dump_indicators, "run.eta");
}

TEST(Config, Defaults) {
    RunConfig cfg = parse("sources = 0.5 0.5 1 1\nscheme = stab-p1p0\n");
    EXPECT_EQ(cfg.domain.kind, DomainKind::unit_square);
    EXPECT_EQ(cfg.theta, 0.5);
    EXPECT_EQ(cfg.max_iterations, 25);
    EXPECT_EQ(cfg.ndof_cap, 200000);
    ASSERT_TRUE(cfg.scheme.stab);
    EXPECT_EQ(cfg.scheme.stab->tau_div, 0.0);
    EXPECT_EQ(cfg.scheme.stab->tau_T, 0.0);
    EXPECT_DOUBLE_EQ(cfg.scheme.stab->tau_S, 1.0 / 12);
}

TEST(Config, MultipleSources) {
    RunConfig cfg = parse(
        "sources = 0.25 0.25 1 1; 0.25 0.75 1 1\n"
        "sources = 0.75 0.25 1 1\n"
        "source = 0.75 0.75 1 1\n");
    EXPECT_EQ(cfg.sources.size(), 4u);
    EXPECT_EQ(cfg.sources[3].z, Point(0.75, 0.75));
}

TEST(Config, Errors) {
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\nfoo = 1\n"), InputError);
    EXPECT_THROW(parse("sources = 0.5 0.5 1\n"), InputError);
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1 2\n"), InputError);
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\nalpha = abc\n"), InputError);
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\ntau-s = 0.1\n"), InputError);  // Taylor-Hood takes none
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\nscheme = stab-p1p1\n"), InputError);  // needs tau-t
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\ndomain = disk\n"), InputError);
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\nexact = maybe\n"), InputError);
    EXPECT_THROW(parse("sources = 0.5 0.5 1 1\nmax-iters = 2.5\n"), InputError);
    EXPECT_THROW(parse("just a line\n"), InputError);
    EXPECT_THROW(parse("alpha = 1\n"), InputError);  // no source
    EXPECT_THROW(load_config("/nonexistent/afem.cfg"), InputError);
}

TEST(Config, StabP1P1) {
    RunConfig cfg = parse("sources = 0.5 0.5 1 1\nscheme = stab-p1p1\ntau-t = 0.05\n");
    EXPECT_EQ(cfg.scheme.stab->ell, 1);
    EXPECT_EQ(cfg.scheme.stab->tau_T, 0.05);
}

TEST(MeshDump, RoundTrip) {
    Mesh m = afem::test::graded_mesh(4, Point(0.3, 0.3));
    std::stringstream ss;
    write_mesh(ss, m);
    EXPECT_EQ(ss.str().rfind("mesh 2d\nvertices ", 0), 0u);
    Mesh r = read_mesh(ss);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_elements(), m.num_elements());
    for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(r.vertex(v), m.vertex(v));
    for (int t = 0; t < m.num_elements(); ++t) EXPECT_EQ(r.element(t), m.element(t));
}

TEST(MeshDump, RejectsGarbage) {
    std::istringstream a("mesh 3d\n");
    EXPECT_THROW(read_mesh(a), InputError);
    std::istringstream b("mesh 2d\nvertices 3\n0 0\n1 0\n");
    EXPECT_THROW(read_mesh(b), InputError);
}

TEST(Indicators, DumpFormat) {
    std::ostringstream os;
    write_indicators(os, std::vector<double>{0.5, 0.25});
    EXPECT_EQ(os.str(), "0 0.5\n1 0.25\n");
}

TEST(Csv, HeaderAndEmptyFields) {
    ConvergenceTable t;
    ConvergenceRow a;
    a.iteration = 0, a.ndof = 10, a.estimator = 0.5;
    ConvergenceRow b = a;
    b.iteration = 1, b.ndof = 20, b.estimator = 0.25;
    t.rows = {a, b};
    compute_rates(t);
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "iter,ndof,estimator,err_u,err_p,err_total,eoc_est,eoc_err,effectivity\n"
                        "0,10,0.5,,,,,,\n"
                        "1,20,0.25,,,,1,,\n");
}

TEST(Csv, ExactColumns) {
    ConvergenceTable t;
    ConvergenceRow a;
    a.iteration = 3, a.ndof = 7, a.estimator = 2;
    a.err_u = 0.3, a.err_p = 0.4, a.err_total = 0.5, a.effectivity = 4;
    t.rows = {a};
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_NE(os.str().find("\n3,7,2,0.3,0.4,0.5,,,4\n"), std::string::npos);
}

TEST(Plot, SvgHasBothSeriesAndGuides) {
    ConvergenceTable t;
    for (int k = 0; k < 4; ++k) {
        ConvergenceRow r;
        r.iteration = k, r.ndof = 100 << k, r.estimator = 1.0 / (k + 1), r.err_total = 0.1 / (k + 1);
        t.rows.push_back(r);
    }
    std::ostringstream os;
    write_svg_plot(os, t, "taylor-hood");
    const std::string svg = os.str();
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("Ndof^-1<"), std::string::npos);
    EXPECT_NE(svg.find("Ndof^-1/2"), std::string::npos);
    EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 5, true);
}
