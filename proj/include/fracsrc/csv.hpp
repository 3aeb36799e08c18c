#pragma once

/**
 * @file csv.hpp
 * @brief Plain CSV persistence: comma separated, '.' decimal, 17 significant
 *        digits, one header row, metadata as leading "# key=value" lines.
 */

#include <fracsrc/errors.hpp>
#include <fracsrc/experiment.hpp>
#include <fracsrc/observation.hpp>
#include <fracsrc/spectral_basis.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fracsrc {

using CsvMeta = std::vector<std::pair<std::string, std::string>>;

/// Round-trip decimal form, locale independent.
inline std::string format_double(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf, static_cast<std::size_t>(len));
    for (char& c : s)
        if (c == ',') c = '.';
    return s;
}

namespace detail {

inline void write_meta(std::ostream& os, const CsvMeta& meta) {
    for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view s, std::size_t line_no) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("CSV line " + std::to_string(line_no) + ": cannot parse number '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

/// A parsed CSV table: metadata, column names, numeric rows.
struct CsvTable {
    CsvMeta meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    const std::string* find_meta(std::string_view key) const {
        for (const auto& [k, v] : meta)
            if (k == key) return &v;
        return nullptr;
    }
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            auto body = detail::trim(view.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos)
                t.meta.emplace_back(std::string(detail::trim(body.substr(0, eq))),
                                    std::string(detail::trim(body.substr(eq + 1))));
            continue;
        }
        const auto cells = detail::split_commas(view);
        if (t.columns.empty()) {
            for (auto c : cells) t.columns.emplace_back(detail::trim(c));
            continue;
        }
        if (cells.size() != t.columns.size())
            throw ConfigError("CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(t.columns.size()) + " fields, got " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) row.push_back(detail::parse_double(c, line_no));
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw ConfigError("CSV has no header row");
    return t;
}

inline void write_table(std::ostream& os, const CsvMeta& meta, std::span<const std::string> columns,
                        std::span<const std::vector<double>> rows) {
    detail::write_meta(os, meta);
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
}

/// Columns k, x_k, u_tilde, sigma; seed and stream go into the metadata.
inline void write_observations(std::ostream& os, const Observations& obs, CsvMeta meta = {}) {
    meta.insert(meta.begin(), {{"seed", std::to_string(obs.seed)}, {"stream", std::to_string(obs.stream)},
                               {"n", std::to_string(obs.size())}});
    detail::write_meta(os, meta);
    os << "k,x_k,u_tilde,sigma\n";
    for (std::size_t k = 1; k <= obs.size(); ++k)
        os << k << ',' << format_double(obs.grid.node(k)) << ',' << format_double(obs.values[k - 1]) << ','
           << format_double(obs.sigmas[k - 1]) << '\n';
}

/// Inverse of write_observations. The x_k column must match the midpoint grid.
inline Observations read_observations(std::istream& in) {
    const CsvTable t = read_csv(in);
    const std::vector<std::string> expected{"k", "x_k", "u_tilde", "sigma"};
    if (t.columns != expected) throw ConfigError("observations CSV needs columns k,x_k,u_tilde,sigma");
    const std::size_t n = t.rows.size();
    if (n < 2) throw ConfigError("observations CSV needs at least two rows");
    Observations obs;
    obs.grid = MidpointGrid(n);
    obs.values.resize(n);
    obs.sigmas.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = t.rows[i];
        if (r[0] != static_cast<double>(i + 1))
            throw ConfigError("observations CSV: k must run 1..n in order (row " + std::to_string(i + 1) + ")");
        if (std::abs(r[1] - obs.grid.node(i + 1)) > 1e-12)
            throw ConfigError("observations CSV: x_k at row " + std::to_string(i + 1) +
                              " is not the midpoint node for n=" + std::to_string(n));
        obs.values[i] = r[2];
        obs.sigmas[i] = r[3];
    }
    auto as_u64 = [&](const char* key) -> std::uint64_t {
        const std::string* v = t.find_meta(key);
        if (!v) return 0;
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || ptr != v->data() + v->size())
            throw ConfigError(std::string("observations CSV: bad '") + key + "' metadata");
        return out;
    };
    obs.seed = as_u64("seed");
    obs.stream = as_u64("stream");
    return obs;
}

/// Columns p, c_tilde.
inline void write_coefficients(std::ostream& os, const SpectralCoefficients& c, const CsvMeta& meta = {}) {
    detail::write_meta(os, meta);
    os << "p,c_tilde\n";
    for (std::size_t p = 0; p < c.size(); ++p) os << p << ',' << format_double(c[p]) << '\n';
}

/// Two numeric columns, e.g. (x, uT) or (x, f_tilde).
inline void write_samples(std::ostream& os, std::string_view xname, std::string_view yname, std::span<const double> x,
                          std::span<const double> y, const CsvMeta& meta = {}) {
    if (x.size() != y.size()) throw DomainError("write_samples: column lengths differ");
    detail::write_meta(os, meta);
    os << xname << ',' << yname << '\n';
    for (std::size_t i = 0; i < x.size(); ++i) os << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
}

/// Rows n, M, risk, stderr, I1, I2, I3, bound; slope (or slope=NA) in metadata.
inline void write_experiment(std::ostream& os, const ExperimentResult& r, CsvMeta meta = {}) {
    meta.emplace_back("E", format_double(r.E));
    if (r.slope)
        meta.emplace_back("slope", format_double(*r.slope));
    else
        meta.emplace_back("slope", "NA (" + r.slope_note + ")");
    detail::write_meta(os, meta);
    os << "n,M,risk,stderr,I1,I2,I3,bound\n";
    for (const auto& row : r.rows)
        os << row.n << ',' << row.M << ',' << format_double(row.risk) << ',' << format_double(row.std_error) << ','
           << format_double(row.I1) << ',' << format_double(row.I2) << ',' << format_double(row.I3) << ','
           << format_double(row.bound) << '\n';
}

}  // namespace fracsrc
