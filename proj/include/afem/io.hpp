#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "afem/driver.hpp"
#include "afem/mesh.hpp"

namespace afem {

/// "mesh 2d", "vertices N" + N lines "x y", "elements M" + M lines "i j k".
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

/// One line "element_id eta" per element.
void write_indicators(std::ostream& os, std::span<const double> eta);
void write_indicators(const std::string& path, std::span<const double> eta);

inline constexpr const char* csv_header = "iter,ndof,estimator,err_u,err_p,err_total,eoc_est,eoc_err,effectivity";

/// Missing values are written as empty fields.
void write_csv(std::ostream& os, const ConvergenceTable& table);
void write_csv(const std::string& path, const ConvergenceTable& table);

/// Log-log plot of estimator and error against Ndof with slope -1 and -1/2 guides.
void write_svg_plot(std::ostream& os, const ConvergenceTable& table, const std::string& title);
void write_svg_plot(const std::string& path, const ConvergenceTable& table, const std::string& title);

/// Line-based "key = value" configuration; '#' starts a comment. Keys:
/// domain, subdivisions, scheme, alpha, sources, theta, max-iters, ndof-cap,
/// exact, tau-div, tau-t, tau-s, ell, out-csv, dump-mesh, dump-indicators, plot.
/// `sources` holds "x y Fx Fy" groups separated by ';' and may repeat.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

} // namespace afem
