#pragma once

#include "liq/errors.hpp"
#include "liq/profile.hpp"
#include "liq/simulate.hpp"
#include "liq/solution.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace liq {

inline constexpr const char* kToolName = "liq";
inline constexpr const char* kToolVersion = "0.1.0";

/// Malformed or inconsistent input file.
class FormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& what) {
    if (s.empty()) throw FormatError("empty value for " + what);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) throw FormatError("bad number '" + s + "' for " + what);
    return v;
}

/// Ordered key=value pairs written as '#' comment lines above a CSV body.
class Provenance {
public:
    Provenance& add(std::string key, std::string value) {
        entries_.emplace_back(std::move(key), std::move(value));
        return *this;
    }
    Provenance& add(std::string key, double value) { return add(std::move(key), format_double(value)); }
    Provenance& add(std::string key, std::uint64_t value) { return add(std::move(key), std::to_string(value)); }

    void write(std::ostream& os) const {
        os << "# " << kToolName << ' ' << kToolVersion << '\n';
        for (const auto& [k, v] : entries_) os << "# " << k << '=' << v << '\n';
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace detail {

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string profile_row(double x, double u, double du, double f) {
    return format_double(x) + ',' + format_double(u) + ',' + format_double(du) + ',' + format_double(f);
}

inline std::uint64_t profile_checksum(double a, double b, const std::vector<std::string>& rows) {
    std::uint64_t h = fnv1a("a=" + format_double(a) + ";b=" + format_double(b) + ";");
    for (const auto& r : rows) h = fnv1a(r + '\n', h);
    return h;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace detail

inline std::string metadata_path(const std::string& csv_path) { return csv_path + ".meta"; }

/// Writes `path` (CSV x,u,du,f at the grid nodes) and `path.meta`
/// (key=value metadata with a checksum over a, b and the rows).
inline void save_profile(const SolutionProfile& profile, const std::string& path, const Provenance& prov = {}) {
    const auto x = profile.nodes();
    const auto u = profile.values();
    std::vector<std::string> rows;
    rows.reserve(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        rows.push_back(detail::profile_row(x[j], u[j], profile.slope(x[j]), profile.shortfall(x[j])));

    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw ValidationError("cannot open " + path + " for writing");
    prov.write(csv);
    csv << "x,u,du,f\n";
    for (const auto& r : rows) csv << r << '\n';
    if (!csv) throw ValidationError("write failed: " + path);

    const auto& m = profile.metadata();
    std::ofstream meta(metadata_path(path), std::ios::binary);
    if (!meta) throw ValidationError("cannot open " + metadata_path(path) + " for writing");
    meta << "format=liq-profile-1\n"
         << "a=" << format_double(m.a) << '\n'
         << "b=" << format_double(m.b) << '\n'
         << "L=" << format_double(m.L) << '\n'
         << "N=" << m.N << '\n'
         << "T=" << format_double(m.T) << '\n'
         << "h=" << format_double(m.h) << '\n'
         << "gap=" << format_double(m.gap) << '\n'
         << "x_switch=" << format_double(profile.x_switch()) << '\n'
         << "series_order=" << profile.series().order() << '\n'
         << "nodes=" << x.size() << '\n'
         << "checksum=" << detail::hex64(detail::profile_checksum(m.a, m.b, rows)) << '\n';
    if (!meta) throw ValidationError("write failed: " + metadata_path(path));
}

inline std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError(path + ":" + std::to_string(no) + ": expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

/// Inverse of save_profile. Reproduces nodal values bit-exactly.
inline SolutionProfile load_profile(const std::string& path) {
    const auto kv = read_key_values(metadata_path(path));
    auto get = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) throw FormatError(metadata_path(path) + ": missing key '" + key + "'");
        return it->second;
    };
    if (get("format") != "liq-profile-1") throw FormatError("unsupported profile format '" + get("format") + "'");
    ProfileMetadata meta;
    meta.a = parse_double(get("a"), "a");
    meta.b = parse_double(get("b"), "b");
    meta.L = parse_double(get("L"), "L");
    meta.N = static_cast<std::size_t>(parse_double(get("N"), "N"));
    meta.T = parse_double(get("T"), "T");
    meta.h = parse_double(get("h"), "h");
    meta.gap = parse_double(get("gap"), "gap");
    const double x_switch = parse_double(get("x_switch"), "x_switch");
    const auto order = static_cast<std::size_t>(parse_double(get("series_order"), "series_order"));
    const auto nodes = static_cast<std::size_t>(parse_double(get("nodes"), "nodes"));

    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::string line;
    bool header = false;
    std::vector<std::string> rows;
    std::vector<double> x;
    std::vector<double> u;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        if (!header) {
            if (line != "x,u,du,f") throw FormatError(path + ": expected header 'x,u,du,f'");
            header = true;
            continue;
        }
        const auto cols = detail::split(line, ',');
        if (cols.size() != 4) throw FormatError(path + ": row " + std::to_string(rows.size() + 1) + " needs 4 columns");
        x.push_back(parse_double(cols[0], "x"));
        u.push_back(parse_double(cols[1], "u"));
        parse_double(cols[2], "du");
        parse_double(cols[3], "f");
        rows.push_back(line);
    }
    if (!header) throw FormatError(path + ": missing header");
    if (rows.size() != nodes)
        throw FormatError(path + ": expected " + std::to_string(nodes) + " rows, found " + std::to_string(rows.size()));
    for (std::size_t j = 1; j < x.size(); ++j)
        if (!(x[j] > x[j - 1])) throw FormatError(path + ": grid is not strictly increasing");
    if (detail::hex64(detail::profile_checksum(meta.a, meta.b, rows)) != get("checksum"))
        throw FormatError(path + ": checksum mismatch (a, b or nodal data altered)");
    return SolutionProfile(std::move(x), std::move(u), meta, x_switch, order);
}

inline void write_impact_csv(std::ostream& os, const std::vector<ImpactPoint>& points, const Provenance& prov = {}) {
    prov.write(os);
    os << "z,s,x,I,tau\n";
    for (const auto& p : points)
        os << format_double(p.z) << ',' << format_double(p.s) << ',' << format_double(p.x_display) << ','
           << format_double(p.I) << ',' << format_double(p.tau) << '\n';
}

/// One-row summary; times in trading days (250 per year).
inline void write_sim_summary(std::ostream& os, const SimStats& st, const Provenance& prov = {}) {
    prov.write(os);
    os << "paths,completed,capped,mean_T_days,std_T_days,se_T_days,q05_T_days,q25_T_days,q50_T_days,"
          "q75_T_days,q95_T_days,mean_revenue,std_revenue,se_revenue\n";
    os << st.paths << ',' << st.completed << ',' << st.capped << ',' << format_double(st.mean_T_days) << ','
       << format_double(st.std_T_days) << ',' << format_double(st.se_T_days) << ','
       << format_double(st.q05_T_days) << ',' << format_double(st.q25_T_days) << ','
       << format_double(st.q50_T_days) << ',' << format_double(st.q75_T_days) << ','
       << format_double(st.q95_T_days) << ',' << format_double(st.mean_revenue) << ','
       << format_double(st.std_revenue) << ',' << format_double(st.se_revenue) << '\n';
}

inline void write_paths_csv(std::ostream& os, const std::vector<PathResult>& paths, const Provenance& prov = {}) {
    prov.write(os);
    os << "path_id,T_days,revenue\n";
    for (const auto& p : paths)
        os << p.id << ',' << format_double(p.T * kTradingDaysPerYear) << ',' << format_double(p.revenue) << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& pts,
                                 const Provenance& prov = {}) {
    prov.write(os);
    os << "path_id,t,S,Z,v\n";
    for (const auto& p : pts)
        os << p.path_id << ',' << format_double(p.t) << ',' << format_double(p.S) << ',' << format_double(p.Z)
           << ',' << format_double(p.v) << '\n';
}

}  // namespace liq
