#pragma once
//
// Artifact output: CSV tables, field CSV input, minimal SVG plots and the run
// manifest. Every file is written to a temporary name and renamed into place.
//

#include <vwslab/mesh.hpp>
#include <vwslab/rearrange.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vwslab {

/// Malformed input file; `row()` is the 1-based line number, 0 for whole-file errors.
class CsvError : public std::runtime_error
{
public:
    CsvError(const std::string& what, std::size_t row)
        : std::runtime_error(row > 0 ? "line " + std::to_string(row) + ": " + what : what), row_(row)
    {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// 12 significant digits, shortest form.
[[nodiscard]] inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

[[nodiscard]] inline std::string csv_text(const std::vector<std::string>& columns,
                                          const std::vector<std::vector<double>>& rows)
{
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i)
        s += (i ? "," : "") + columns[i];
    s += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            s += (i ? "," : "") + format_number(row[i]);
        s += '\n';
    }
    return s;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows)
{
    write_atomic(path, csv_text(columns, rows));
}

/// x, y, value per cell, row-major.
inline void write_field_csv(const std::filesystem::path& path, const GridFunction& u)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) {
        const auto& p = u.mesh().center(c);
        rows.push_back({p.x, p.y, u[c]});
    }
    write_csv(path, {"x", "y", "value"}, rows);
}

/// cum_measure, value per step.
inline void write_profile_csv(const std::filesystem::path& path, const RearrangedProfile& p)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        rows.push_back({p.cum_measure()[i], p.values()[i]});
    write_csv(path, {"cum_measure", "value"}, rows);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ','))
        out.push_back(cur);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

inline bool parse_double(std::string s, double& v)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos)
        return false;
    s = s.substr(b, e - b + 1);
    try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        return used == s.size() && std::isfinite(v);
    }
    catch (const std::exception&) {
        return false;
    }
}

} // namespace detail

/// Reads (x, y, value) rows covering every cell of an n×n grid exactly once.
/// A first line that is not numeric is taken as a header.
[[nodiscard]] inline GridFunction read_field_csv(std::istream& in)
{
    struct Entry { double x, y, v; std::size_t line; };
    std::vector<Entry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto cells = detail::split_csv_line(line);
        double x = 0, y = 0, v = 0;
        const bool numeric = cells.size() == 3 && detail::parse_double(cells[0], x) &&
                             detail::parse_double(cells[1], y) && detail::parse_double(cells[2], v);
        if (!numeric) {
            if (entries.empty() && lineno == 1)
                continue;  // header
            throw CsvError("expected three numeric columns x,y,value", lineno);
        }
        entries.push_back({x, y, v, lineno});
    }
    if (entries.empty())
        throw CsvError("no data rows", 0);
    const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(entries.size()))));
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != entries.size())
        throw CsvError(std::to_string(entries.size()) + " rows do not form a square grid", 0);
    if (n < 4)
        throw CsvError("grid must be at least 4x4", 0);

    const auto mesh = build_mesh(n);
    GridFunction u(mesh);
    std::vector<bool> seen(mesh->size(), false);
    const double tol = 1e-6 / n;
    for (const auto& e : entries) {
        const int i = static_cast<int>(std::lround(e.x * n - 0.5));
        const int j = static_cast<int>(std::lround(e.y * n - 0.5));
        if (i < 0 || i >= n || j < 0 || j >= n || std::abs(e.x - (i + 0.5) / n) > tol ||
            std::abs(e.y - (j + 0.5) / n) > tol)
            throw CsvError("point is not a cell center of the " + std::to_string(n) + "x" + std::to_string(n) +
                               " grid",
                           e.line);
        const auto c = mesh->index(i, j);
        if (seen[c])
            throw CsvError("duplicate cell", e.line);
        seen[c] = true;
        u[c] = e.v;
    }
    return u;
}

[[nodiscard]] inline GridFunction read_field_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw CsvError("cannot open " + path.string(), 0);
    return read_field_csv(in);
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct PlotSeries
{
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec
{
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x = true;
    bool log_y = true;
};

namespace detail {

inline std::string svg_escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

} // namespace detail

/// Line plot with point markers; points that cannot be drawn on a log axis are skipped.
[[nodiscard]] inline std::string plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series)
{
    const double W = 640, H = 440, L = 80, R = 20, T = 40, B = 60;
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
    };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, tx(s.x[i])); x1 = std::max(x1, tx(s.x[i]));
                y0 = std::min(y0, ty(s.y[i])); y1 = std::max(y1, ty(s.y[i]));
            }
    if (x0 > x1) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
    if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) { y0 -= 0.5; y1 += 0.5; }
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::svg_escape(spec.title)
      << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = L + (W - L - R) * k / 4.0, sy = H - B - (H - T - B) * k / 4.0;
        const double lx = spec.log_x ? std::pow(10.0, fx) : fx, ly = spec.log_y ? std::pow(10.0, fy) : fy;
        o << "<text x=\"" << sx << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << detail::fmt("%.3g", lx)
          << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">" << detail::fmt("%.3g", ly)
          << "</text>\n";
    }
    o << "<text x=\"" << L + (W - L - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
      << detail::svg_escape(spec.xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << T + (H - T - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << T + (H - T - B) / 2 << ")\">" << detail::svg_escape(spec.ylabel) << "</text>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* col = colors[si % 6];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i]))
                pts += detail::fmt("%.2f", px(s.x[i])) + "," + detail::fmt("%.2f", py(s.y[i])) + " ";
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (usable(s.x[i], s.y[i]))
                o << "<circle cx=\"" << detail::fmt("%.2f", px(s.x[i])) << "\" cy=\"" << detail::fmt("%.2f", py(s.y[i]))
                  << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        o << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 16 * si << "\" text-anchor=\"end\" fill=\"" << col
          << "\">" << detail::svg_escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Heatmap of a field, block-averaged down to at most `max_side` pixels per side.
[[nodiscard]] inline std::string heatmap_svg(const GridFunction& u, const std::string& title, int max_side = 128)
{
    const int n = u.mesh().n();
    int f = 1;
    while (n / f > max_side || n % f != 0)
        ++f;
    const int m = n / f;
    std::vector<double> avg(static_cast<std::size_t>(m) * m, 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            avg[static_cast<std::size_t>((j / f) * m + i / f)] += u[u.mesh().index(i, j)] / (f * f);
    const auto [lo_it, hi_it] = std::minmax_element(avg.begin(), avg.end());
    const double lo = *lo_it, hi = *hi_it, span = hi > lo ? hi - lo : 1.0;
    const double px = 400.0 / m;

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"460\" font-family=\"sans-serif\" "
         "font-size=\"12\" shape-rendering=\"crispEdges\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"210\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::svg_escape(title)
      << "</text>\n";
    auto color = [](double t) {
        // blue → white → red
        const double r = t < 0.5 ? 2 * t : 1.0, b = t < 0.5 ? 1.0 : 2 * (1 - t), g = 1.0 - std::abs(2 * t - 1);
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", int(255 * r + 0.5), int(255 * g + 0.5), int(255 * b + 0.5));
        return std::string(buf);
    };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const double t = (avg[static_cast<std::size_t>(j * m + i)] - lo) / span;
            o << "<rect x=\"" << detail::fmt("%.3f", 10 + i * px) << "\" y=\"" << detail::fmt("%.3f", 40 + (m - 1 - j) * px)
              << "\" width=\"" << detail::fmt("%.3f", px) << "\" height=\"" << detail::fmt("%.3f", px) << "\" fill=\""
              << color(t) << "\"/>\n";
        }
    for (int k = 0; k <= 10; ++k) {
        const double t = k / 10.0;
        o << "<rect x=\"430\" y=\"" << detail::fmt("%.1f", 400 - 36 * k) << "\" width=\"20\" height=\"36\" fill=\""
          << color(t) << "\"/>\n";
    }
    o << "<text x=\"456\" y=\"440\">" << detail::fmt("%.4g", lo) << "</text>\n";
    o << "<text x=\"456\" y=\"44\">" << detail::fmt("%.4g", hi) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// manifest
// ---------------------------------------------------------------------------

/// 64-bit FNV-1a, hex.
[[nodiscard]] inline std::string fnv1a_hex(const std::string& data)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ManifestEntry
{
    std::string config_hash;
    std::string experiment;
    std::string verdict;
    double wall_seconds = 0.0;
    std::string artifact;
};

/// Appends one line per entry to `dir`/manifest.csv, creating it with a header.
inline void append_manifest(const std::filesystem::path& dir, const std::vector<ManifestEntry>& entries)
{
    std::filesystem::create_directories(dir);
    const auto path = dir / "manifest.csv";
    const bool fresh = !std::filesystem::exists(path);
    std::string text;
    if (fresh)
        text += "config_hash,experiment,verdict,wall_seconds,artifact\n";
    for (const auto& e : entries)
        text += e.config_hash + "," + e.experiment + "," + e.verdict + "," + detail::fmt("%.3f", e.wall_seconds) +
                "," + e.artifact + "\n";
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot append to " + path.string());
    out << text;
}

} // namespace vwslab
