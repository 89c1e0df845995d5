#include "statgeo/curves.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace statgeo {

SpatialPolyline::SpatialPolyline(Eigen::MatrixXd nodes) : nodes_(std::move(nodes)) {
    if (nodes_.cols() < 2) throw InvariantViolation("a polyline needs at least one segment");
    if (nodes_.rows() < 1) throw InvariantViolation("a polyline needs at least one coordinate");
}

SpatialPolyline SpatialPolyline::straight(const Vec& from, const Vec& to, int segments) {
    if (segments < 1) throw InvariantViolation("segment count must be >= 1");
    Eigen::MatrixXd nodes(from.size(), segments + 1);
    for (int i = 0; i <= segments; ++i) {
        const double s = static_cast<double>(i) / segments;
        nodes.col(i) = (1.0 - s) * from + s * to;
    }
    nodes.col(segments) = to;
    return SpatialPolyline(std::move(nodes));
}

Vec SpacetimePolyline::node(int i) const {
    const int d = space.dim();
    Vec z(d + 1);
    z.head(d) = space.node(i);
    z[d] = time[static_cast<std::size_t>(i)];
    return z;
}

Vec segment_velocity(const ChartManifold& chart, const SpatialPolyline& c, int i) {
    return static_cast<double>(c.segments()) * chart.displacement(c.node(i), c.node(i + 1));
}

Vec segment_midpoint(const ChartManifold& chart, const SpatialPolyline& c, int i) {
    const Vec a = c.node(i);
    return a + 0.5 * chart.displacement(a, c.node(i + 1));
}

Vec segment_tangent(const ChartManifold& chart, const SpacetimePolyline& z, int i) {
    const int d = z.space.dim();
    const double n = z.segments();
    Vec t(d + 1);
    t.head(d) = segment_velocity(chart, z.space, i);
    t[d] = n * (z.time[static_cast<std::size_t>(i) + 1] - z.time[static_cast<std::size_t>(i)]);
    return t;
}

double h1_energy(const StationarySpacetime& st, const SpatialPolyline& c) {
    const int n = c.segments();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec v = segment_velocity(st.base(), c, i);
        const FieldSample f = st.sample(segment_midpoint(st.base(), c, i));
        sum += v.dot(f.g * v);
    }
    return sum / n;
}

double integrate_along(const StationarySpacetime& st, const SpatialPolyline& c, Integrand kind) {
    const int n = c.segments();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec v = segment_velocity(st.base(), c, i);
        const FieldSample f = st.sample(segment_midpoint(st.base(), c, i));
        const double a = f.delta_flat.dot(v);
        switch (kind) {
            case Integrand::DeltaDotOverBeta: sum += a / f.beta; break;
            case Integrand::DeltaDotSqOverBeta: sum += a * a / f.beta; break;
            case Integrand::OneOverBeta: sum += 1.0 / f.beta; break;
            case Integrand::RiemannLength: sum += std::sqrt(v.dot(f.g * v)); break;
        }
    }
    return sum / n;
}

double curve_distance(const ChartManifold& chart, const SpatialPolyline& a, const SpatialPolyline& b) {
    if (a.segments() != b.segments() || a.dim() != b.dim()) {
        throw InvariantViolation("curve_distance needs matching discretisations");
    }
    double best = 0.0;
    for (int i = 0; i <= a.segments(); ++i) best = std::max(best, chart.chart_distance(a.node(i), b.node(i)));
    return best;
}

SpatialPolyline resample(const ChartManifold& chart, const SpatialPolyline& c, int m) {
    if (m < 1) throw InvariantViolation("segment count must be >= 1");
    const int n = c.segments();
    Eigen::MatrixXd nodes(c.dim(), m + 1);
    for (int j = 0; j <= m; ++j) {
        const double u = static_cast<double>(j) * n / m;
        int i = std::min(static_cast<int>(std::floor(u)), n - 1);
        const double frac = u - i;
        const Vec a = c.node(i);
        nodes.col(j) = a + frac * chart.displacement(a, c.node(i + 1));
    }
    // Exact endpoints; interior nodes whose parameter coincides with an old
    // node are copied so resample(c, n) reproduces c bit for bit.
    for (int j = 0; j <= m; ++j) {
        if ((static_cast<long long>(j) * n) % m == 0) {
            nodes.col(j) = c.nodes().col(static_cast<long long>(j) * n / m);
        }
    }
    return SpatialPolyline(std::move(nodes));
}

SpatialPolyline reversed(const SpatialPolyline& c) {
    return SpatialPolyline(c.nodes().rowwise().reverse());
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void write_row(std::ostream& out, double s, const Eigen::VectorXd& x, const double* t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", s);
    out << buf;
    for (int k = 0; k < x.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", x[k]);
        out << ',' << buf;
    }
    if (t) {
        std::snprintf(buf, sizeof buf, "%.17g", *t);
        out << ',' << buf;
    }
    out << '\n';
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

void write_curve_csv(std::ostream& out, const std::vector<std::string>& coords, const SpatialPolyline& c) {
    out << 's';
    for (const auto& name : coords) out << ',' << name;
    out << '\n';
    for (int i = 0; i <= c.segments(); ++i) write_row(out, c.parameter(i), c.nodes().col(i), nullptr);
}

void write_curve_csv(std::ostream& out, const std::vector<std::string>& coords, const SpacetimePolyline& z) {
    out << 's';
    for (const auto& name : coords) out << ',' << name;
    out << ",t\n";
    for (int i = 0; i <= z.segments(); ++i) {
        write_row(out, z.space.parameter(i), z.space.nodes().col(i), &z.time[static_cast<std::size_t>(i)]);
    }
}

CurveCsv read_curve_csv(std::istream& in, const std::vector<std::string>& coords) {
    std::string line;
    if (!std::getline(in, line) || split(line).empty()) throw ConfigError("curve", "empty curve file");
    const auto header = split(line);
    const std::size_t d = coords.size();
    const bool with_time = header.size() == d + 2 && header.back() == "t";
    if (header.size() != d + 1 + (with_time ? 1 : 0) || header[0] != "s") {
        throw ConfigError("curve:1", "expected header s," + [&] {
            std::string h;
            for (const auto& c : coords) h += c + ",";
            return h;
        }() + "[t]");
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (header[k + 1] != coords[k]) {
            throw ConfigError("curve:1", "column " + std::to_string(k + 2) + " should be '" + coords[k] + "'");
        }
    }
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ConfigError("curve:" + std::to_string(line_no), "expected " + std::to_string(header.size()) +
                                                                      " columns, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        for (const auto& cell : cells) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw ConfigError("curve:" + std::to_string(line_no), "malformed number '" + cell + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ConfigError("curve", "a curve needs at least two nodes");
    const int n = static_cast<int>(rows.size()) - 1;
    Eigen::MatrixXd nodes(static_cast<Eigen::Index>(d), n + 1);
    CurveCsv out;
    for (int i = 0; i <= n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (std::abs(r[0] - static_cast<double>(i) / n) > 1e-9) {
            throw ConfigError("curve:" + std::to_string(i + 2), "s column must be uniform i/n");
        }
        for (std::size_t k = 0; k < d; ++k) nodes(static_cast<Eigen::Index>(k), i) = r[k + 1];
        if (with_time) out.time.push_back(r[d + 1]);
    }
    out.space = SpatialPolyline(std::move(nodes));
    return out;
}

}  // namespace statgeo
