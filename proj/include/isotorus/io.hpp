#pragma once

#include "equilibrium.hpp"
#include "harmonic.hpp"
#include "torus.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace isotorus {

// 17 significant digits: enough to round-trip any double, few enough to
// stay canonical, so identical runs produce byte-identical files.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

// { "maps": [{"delta": r, "gamma": r}, ...], "weights": [r, ...] }
// with weights optional (uniform when absent).
inline affine_ifs load_ifs_json(const std::string& path) {
    const auto j = load_json_file(path);
    if (!j.contains("maps") || !j["maps"].is_array())
        throw validation_error("'" + path + "': expected a \"maps\" array");
    std::vector<affine_map> maps;
    for (const auto& m : j["maps"]) {
        if (!m.contains("delta") || !m.contains("gamma"))
            throw validation_error("'" + path + "': each map needs \"delta\" and \"gamma\"");
        maps.push_back({m["delta"].get<double>(), m["gamma"].get<double>()});
    }
    std::vector<double> weights;
    if (j.contains("weights")) {
        if (!j["weights"].is_array())
            throw validation_error("'" + path + "': \"weights\" must be an array");
        weights = j["weights"].get<std::vector<double>>();
    }
    return affine_ifs(maps, weights);
}

// Either { "xi": [...], "sigma": [...] } or { "rule": "midpoint-plus" }.
inline torus_point load_torus_point_json(const std::string& path, const interval_union& bands) {
    const auto j = load_json_file(path);
    if (j.contains("rule")) {
        return make_torus_point(bands, point_rule_from_name(j["rule"].get<std::string>()));
    }
    if (!j.contains("xi") || !j.contains("sigma"))
        throw validation_error("'" + path + "': expected \"rule\" or \"xi\"+\"sigma\"");
    torus_point pt;
    pt.xi = j["xi"].get<std::vector<double>>();
    pt.sigma = j["sigma"].get<std::vector<int>>();
    validate_torus_point(bands, pt);
    return pt;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw validation_error("write failed for '" + path.string() + "'");
}

inline void write_bands_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<int, interval_union>>& levels) {
    std::string s = "level,index,alpha,beta\n";
    for (const auto& [level, u] : levels)
        for (std::size_t i = 0; i < u.size(); ++i)
            s += std::to_string(level) + "," + std::to_string(i + 1) + "," +
                 fmt17(u.bands[i].a) + "," + fmt17(u.bands[i].b) + "\n";
    write_text_file(path, s);
}

inline void write_zeta_csv(const std::filesystem::path& path, const equilibrium_solution& sol) {
    std::string s = "gap_index,zeta,omega\n";
    for (std::size_t i = 0; i < sol.zeta().size(); ++i)
        s += std::to_string(i + 1) + "," + fmt17(sol.zeta()[i]) + "," +
             fmt17(sol.frequencies[i]) + "\n";
    write_text_file(path, s);
}

inline void write_mass_csv(const std::filesystem::path& path, const equilibrium_solution& sol) {
    std::string s = "band_index,mass\n";
    for (std::size_t i = 0; i < sol.band_masses.size(); ++i)
        s += std::to_string(i + 1) + "," + fmt17(sol.band_masses[i]) + "\n";
    write_text_file(path, s);
}

// j,a_j,b_j with the b field empty on the j = 0 row (b starts at 1).
inline void write_jacobi_csv(const std::filesystem::path& path, const jacobi_matrix& J) {
    std::string s = "j,a_j,b_j\n";
    for (std::size_t j = 0; j < J.rows(); ++j) {
        s += std::to_string(j) + "," + fmt17(J.a[j]) + ",";
        if (j >= 1) s += fmt17(J.b[j - 1]);
        s += "\n";
    }
    write_text_file(path, s);
}

inline jacobi_matrix read_jacobi_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open '" + path + "'");
    jacobi_matrix J;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("j,", 0) == 0) continue;   // header
        }
        std::istringstream ss(line);
        std::string jf, af, bf;
        if (!std::getline(ss, jf, ',') || !std::getline(ss, af, ','))
            throw validation_error("'" + path + "': malformed row '" + line + "'");
        std::getline(ss, bf, ',');
        try {
            const std::size_t j = std::stoul(jf);
            if (j != J.a.size())
                throw validation_error("'" + path + "': rows must be consecutive from 0");
            J.a.push_back(std::stod(af));
            if (j >= 1) {
                if (bf.empty())
                    throw validation_error("'" + path + "': missing b at row " + jf);
                J.b.push_back(std::stod(bf));
            }
        } catch (const validation_error&) {
            throw;
        } catch (const std::exception&) {
            throw validation_error("'" + path + "': malformed row '" + line + "'");
        }
    }
    if (J.a.empty()) throw validation_error("'" + path + "': no rows");
    return J;
}

inline void write_profile_csv(const std::filesystem::path& path, const error_profile& p) {
    std::string s = "j,diff_b,running_max\n";
    for (std::size_t i = 0; i < p.diff.size(); ++i)
        s += std::to_string(i + 1) + "," + fmt17(p.diff[i]) + "," +
             fmt17(p.running_max[i]) + "\n";
    write_text_file(path, s);
}

inline void write_spectrum_csv(const std::filesystem::path& path, const harmonic_spectrum& sp) {
    const std::size_t d = sp.lattice.fundamental.size();
    std::string s;
    for (std::size_t i = 1; i <= d; ++i) s += "k_" + std::to_string(i) + ",";
    s += "omega_k,amplitude,phase\n";
    for (std::size_t e = 0; e < sp.size(); ++e) {
        for (int kv : sp.lattice.entries[e].k) s += std::to_string(kv) + ",";
        s += fmt17(sp.lattice.entries[e].omega) + "," + fmt17(sp.amplitude[e]) + "," +
             fmt17(sp.phase[e]) + "\n";
    }
    write_text_file(path, s);
}

// Convenience scatter/line plot; the CSV next to it is the contract.
inline void write_svg_polyline(const std::filesystem::path& path,
                               const std::vector<double>& x, const std::vector<double>& y,
                               const std::string& title = "") {
    if (x.size() != y.size() || x.empty())
        throw validation_error("svg: x and y must be non-empty and of equal size");
    const double W = 800.0, H = 600.0, m = 50.0;
    double x0 = x[0], x1 = x[0], y0 = y[0], y1 = y[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        x0 = std::min(x0, x[i]);
        x1 = std::max(x1, x[i]);
        y0 = std::min(y0, y[i]);
        y1 = std::max(y1, y[i]);
    }
    const double dx = x1 > x0 ? x1 - x0 : 1.0, dy = y1 > y0 ? y1 - y0 : 1.0;
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\">\n";
    if (!title.empty()) s += "<title>" + title + "</title>\n";
    s += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n<polyline fill=\"none\" "
         "stroke=\"black\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double px = m + (x[i] - x0) / dx * (W - 2 * m);
        const double py = H - m - (y[i] - y0) / dy * (H - 2 * m);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
        s += buf;
    }
    s += "\"/>\n</svg>\n";
    write_text_file(path, s);
}

} // namespace isotorus
