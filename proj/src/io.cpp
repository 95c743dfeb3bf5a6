#include "afem/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "afem/errors.hpp"

namespace afem {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    return os;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double d = 0;
    try {
        d = std::stod(value, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || !trim(value.substr(pos)).empty())
        throw InputError("config key '" + key + "': '" + value + "' is not a number");
    return d;
}

int to_int(const std::string& key, const std::string& value) {
    double d = to_double(key, value);
    if (d != std::floor(d) || std::abs(d) > std::numeric_limits<int>::max())
        throw InputError("config key '" + key + "': '" + value + "' is not an integer");
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw InputError("config key '" + key + "': '" + value + "' is not a boolean");
}

void opt(std::ostream& os, const std::optional<double>& v) {
    if (v) os << *v;
}

} // namespace

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os << "mesh 2d\n";
    os << "vertices " << mesh.num_vertices() << '\n';
    os << std::setprecision(17);
    for (const auto& p : mesh.vertices()) os << p.x() << ' ' << p.y() << '\n';
    os << "elements " << mesh.num_elements() << '\n';
    for (const auto& e : mesh.elements()) os << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
}

void write_mesh(const std::string& path, const Mesh& mesh) {
    auto os = open_out(path);
    write_mesh(os, mesh);
}

Mesh read_mesh(std::istream& is) {
    std::string a, b;
    if (!(is >> a >> b) || a != "mesh" || b != "2d") throw InputError("mesh dump: missing 'mesh 2d' header");
    int n = 0;
    if (!(is >> a >> n) || a != "vertices" || n < 0) throw InputError("mesh dump: bad vertices line");
    std::vector<Point> pts(n);
    for (auto& p : pts)
        if (!(is >> p.x() >> p.y())) throw InputError("mesh dump: truncated vertex list");
    if (!(is >> a >> n) || a != "elements" || n < 0) throw InputError("mesh dump: bad elements line");
    std::vector<std::array<int, 3>> tris(n);
    for (auto& t : tris)
        if (!(is >> t[0] >> t[1] >> t[2])) throw InputError("mesh dump: truncated element list");
    return Mesh(std::move(pts), std::move(tris));
}

void write_indicators(std::ostream& os, std::span<const double> eta) {
    os << std::setprecision(17);
    for (std::size_t t = 0; t < eta.size(); ++t) os << t << ' ' << eta[t] << '\n';
}

void write_indicators(const std::string& path, std::span<const double> eta) {
    auto os = open_out(path);
    write_indicators(os, eta);
}

void write_csv(std::ostream& os, const ConvergenceTable& table) {
    os << csv_header << '\n' << std::setprecision(12);
    for (const auto& r : table.rows) {
        os << r.iteration << ',' << r.ndof << ',' << r.estimator << ',';
        opt(os, r.err_u);
        os << ',';
        opt(os, r.err_p);
        os << ',';
        opt(os, r.err_total);
        os << ',';
        opt(os, r.eoc_est);
        os << ',';
        opt(os, r.eoc_err);
        os << ',';
        opt(os, r.effectivity);
        os << '\n';
    }
}

void write_csv(const std::string& path, const ConvergenceTable& table) {
    auto os = open_out(path);
    write_csv(os, table);
}

void write_svg_plot(std::ostream& os, const ConvergenceTable& table, const std::string& title) {
    constexpr double width = 640, height = 480, margin = 60;
    double nmin = std::numeric_limits<double>::infinity(), nmax = 0;
    double qmin = std::numeric_limits<double>::infinity(), qmax = 0;
    for (const auto& r : table.rows) {
        nmin = std::min(nmin, double(r.ndof));
        nmax = std::max(nmax, double(r.ndof));
        for (auto q : {std::optional<double>(r.estimator), r.err_total}) {
            if (q && *q > 0) {
                qmin = std::min(qmin, *q);
                qmax = std::max(qmax, *q);
            }
        }
    }
    if (table.rows.empty() || !(qmax > 0)) {
        nmin = 1, nmax = 10, qmin = 0.1, qmax = 1;
    }
    const double lx0 = std::floor(std::log10(nmin)), lx1 = std::max(lx0 + 1, std::ceil(std::log10(nmax)));
    const double ly0 = std::floor(std::log10(qmin)), ly1 = std::max(ly0 + 1, std::ceil(std::log10(qmax)));
    auto px = [&](double n) { return margin + (std::log10(n) - lx0) / (lx1 - lx0) * (width - 2 * margin); };
    auto py = [&](double q) { return height - margin - (std::log10(q) - ly0) / (ly1 - ly0) * (height - 2 * margin); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
       << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double e = lx0; e <= lx1; ++e)
        os << "<text x=\"" << px(std::pow(10, e)) << "\" y=\"" << height - margin + 18
           << "\" text-anchor=\"middle\" font-size=\"12\">1e" << e << "</text>\n";
    for (double e = ly0; e <= ly1; ++e)
        os << "<text x=\"" << margin - 6 << "\" y=\"" << py(std::pow(10, e)) + 4
           << "\" text-anchor=\"end\" font-size=\"12\">1e" << e << "</text>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"13\">Ndof</text>\n";

    auto polyline = [&](auto&& value, const char* colour, const char* dash) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"" << dash << " points=\"";
        for (const auto& r : table.rows) {
            std::optional<double> q = value(r);
            if (q && *q > 0) os << px(r.ndof) << ',' << py(*q) << ' ';
        }
        os << "\"/>\n";
    };
    polyline([](const ConvergenceRow& r) { return std::optional<double>(r.estimator); }, "#1f77b4", "");
    polyline([](const ConvergenceRow& r) { return r.err_total; }, "#d62728", "");

    // Reference slopes anchored at the first estimator value.
    if (!table.rows.empty() && table.rows.front().estimator > 0) {
        const double n0 = table.rows.front().ndof, q0 = table.rows.front().estimator;
        for (auto [slope, label] : {std::pair{-1.0, "Ndof^-1"}, std::pair{-0.5, "Ndof^-1/2"}}) {
            double q1 = q0 * std::pow(nmax / n0, slope);
            os << "<line x1=\"" << px(n0) << "\" y1=\"" << py(q0) << "\" x2=\"" << px(nmax) << "\" y2=\"" << py(q1)
               << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
            os << "<text x=\"" << px(nmax) - 4 << "\" y=\"" << py(q1) - 6
               << "\" text-anchor=\"end\" font-size=\"12\" fill=\"gray\">" << label << "</text>\n";
        }
    }
    os << "<text x=\"" << margin + 10 << "\" y=\"" << margin + 18 << "\" font-size=\"12\" fill=\"#1f77b4\">estimator</text>\n";
    os << "<text x=\"" << margin + 10 << "\" y=\"" << margin + 34 << "\" font-size=\"12\" fill=\"#d62728\">error</text>\n";
    os << "</svg>\n";
}

void write_svg_plot(const std::string& path, const ConvergenceTable& table, const std::string& title) {
    auto os = open_out(path);
    write_svg_plot(os, table, title);
}

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    StabParams stab;
    bool stab_given = false;
    std::optional<int> ell;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "domain") {
            if (value == "unit-square") cfg.domain.kind = DomainKind::unit_square;
            else if (value == "l-shape") cfg.domain.kind = DomainKind::l_shape;
            else throw InputError("unknown domain '" + value + "'");
        } else if (key == "subdivisions") {
            cfg.domain.subdivisions = to_int(key, value);
        } else if (key == "scheme") {
            cfg.scheme.family = parse_family(value);
        } else if (key == "alpha") {
            cfg.alpha = to_double(key, value);
        } else if (key == "sources" || key == "source") {
            std::stringstream groups(value);
            std::string group;
            while (std::getline(groups, group, ';')) {
                if (trim(group).empty()) continue;
                std::stringstream ss(group);
                PointSource s;
                std::string extra;
                if (!(ss >> s.z.x() >> s.z.y() >> s.F.x() >> s.F.y()) || (ss >> extra))
                    throw InputError("source '" + trim(group) + "' must be 'x y Fx Fy'");
                cfg.sources.push_back(s);
            }
        } else if (key == "theta") {
            cfg.theta = to_double(key, value);
        } else if (key == "max-iters") {
            cfg.max_iterations = to_int(key, value);
        } else if (key == "ndof-cap") {
            cfg.ndof_cap = to_int(key, value);
        } else if (key == "exact") {
            cfg.exact = to_bool(key, value);
        } else if (key == "tau-div") {
            stab.tau_div = to_double(key, value), stab_given = true;
        } else if (key == "tau-t") {
            stab.tau_T = to_double(key, value), stab_given = true;
        } else if (key == "tau-s") {
            stab.tau_S = to_double(key, value), stab_given = true;
        } else if (key == "ell") {
            ell = to_int(key, value), stab_given = true;
        } else if (key == "out-csv") {
            cfg.out_csv = value;
        } else if (key == "dump-mesh") {
            cfg.dump_mesh = value;
        } else if (key == "dump-indicators") {
            cfg.dump_indicators = value;
        } else if (key == "plot") {
            cfg.plot = value;
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }

    if (cfg.scheme.is_stabilized()) {
        stab.ell = ell.value_or(cfg.scheme.family == Family::stab_p1p1 ? 1 : 0);
        cfg.scheme.stab = stab;
    } else if (stab_given) {
        throw InputError(to_string(cfg.scheme.family) + " takes no stabilization parameters");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open config '" + path + "'");
    return parse_config(is);
}

} // namespace afem
