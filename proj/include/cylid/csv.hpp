#pragma once

// CSV formats. All numbers are written with 17 significant digits so that
// doubles survive a write/read round trip bit-exactly.
//
// Dataset:
//   # cylid dataset delta=<d> seed=<u> R=<r>
//   p,k0,theta,re_g,im_g
// Field trace:
//   # cylid trace R=<r> radii=<a;b;..> indices=<a;b;..>
//   p,k0,theta,re_u,im_u
// Profile sweep:
//   r,phi

#include <cstdio>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylid/objective.hpp"

namespace cylid {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string join17(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += fmt17(v[i]);
    }
    return s;
}

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("csv: malformed number '" + s + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "# cylid dataset delta=0 seed=1 R=1" -> {delta: "0", ...}
inline std::map<std::string, std::string> parse_meta(const std::string& line) {
    std::map<std::string, std::string> kv;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

}  // namespace detail

inline void write_dataset_csv(std::ostream& os, const ScatterDataset& ds) {
    os << "# cylid dataset delta=" << fmt17(ds.noise_level) << " seed=" << ds.seed
       << " R=" << fmt17(ds.R) << "\n";
    os << "p,k0,theta,re_g,im_g\n";
    for (std::size_t p = 0; p < ds.probe.count(); ++p)
        for (std::size_t j = 0; j < ds.probe.angles.size(); ++j)
            os << (p + 1) << ',' << fmt17(ds.probe.wavenumbers[p]) << ','
               << fmt17(ds.probe.angles[j]) << ',' << fmt17(ds.data[p][j].real()) << ','
               << fmt17(ds.data[p][j].imag()) << "\n";
}

inline ScatterDataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# cylid dataset", 0) != 0)
        throw std::runtime_error("dataset csv: missing metadata line");
    const auto meta = detail::parse_meta(line);
    ScatterDataset ds;
    if (auto it = meta.find("delta"); it != meta.end()) ds.noise_level = detail::parse_double(it->second);
    if (auto it = meta.find("seed"); it != meta.end()) ds.seed = std::stoull(it->second);
    if (auto it = meta.find("R"); it != meta.end()) ds.R = detail::parse_double(it->second);
    if (!std::getline(is, line) || line != "p,k0,theta,re_g,im_g")
        throw std::runtime_error("dataset csv: missing header line");
    std::size_t current = 0;
    std::vector<double> first_angles;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 5) throw std::runtime_error("dataset csv: expected 5 columns");
        const auto p = static_cast<std::size_t>(std::stoul(f[0]));
        if (p == current + 1) {
            ds.probe.wavenumbers.push_back(detail::parse_double(f[1]));
            ds.data.emplace_back();
            current = p;
        } else if (p != current) {
            throw std::runtime_error("dataset csv: wavenumber blocks out of order");
        }
        const double theta = detail::parse_double(f[2]);
        if (current == 1)
            first_angles.push_back(theta);
        else if (std::fabs(first_angles[ds.data.back().size()] - theta) > 1e-15)
            throw std::runtime_error("dataset csv: angle grids differ between wavenumbers");
        ds.data.back().emplace_back(detail::parse_double(f[3]), detail::parse_double(f[4]));
    }
    ds.probe.angles = std::move(first_angles);
    validate(ds.probe);
    for (const auto& trace : ds.data)
        if (trace.size() != ds.probe.angles.size())
            throw std::runtime_error("dataset csv: ragged traces");
    return ds;
}

inline void write_trace_csv(std::ostream& os, const LayerConfig& config,
                            const std::vector<BoundaryField>& fields) {
    os << "# cylid trace R=" << fmt17(config.R) << " radii=" << detail::join17(config.radii)
       << " indices=" << detail::join17(config.indices) << "\n";
    os << "p,k0,theta,re_u,im_u\n";
    for (std::size_t p = 0; p < fields.size(); ++p)
        for (std::size_t j = 0; j < fields[p].angles.size(); ++j)
            os << (p + 1) << ',' << fmt17(fields[p].k0) << ',' << fmt17(fields[p].angles[j]) << ','
               << fmt17(fields[p].values[j].real()) << ',' << fmt17(fields[p].values[j].imag())
               << "\n";
}

inline void write_profile_csv(std::ostream& os, const std::vector<double>& grid,
                              const std::vector<double>& phis) {
    os << "r,phi\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << fmt17(grid[i]) << ',' << fmt17(phis[i]) << "\n";
}

}  // namespace cylid
