#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raster/accumulator.hpp"
#include "raster/agglomerate.hpp"
#include "raster/core.hpp"
#include "raster/errors.hpp"

namespace raster {

/// Forward-only stream of points. Implementations hand out each point exactly
/// once; rewinding is not part of the contract (single-pass algorithms only).
class PointSource {
public:
    virtual ~PointSource() = default;

    /// Fills out with up to out.size() points; returns how many were written.
    /// Zero means the source is exhausted.
    virtual std::size_t read(std::span<Point> out) = 0;

    /// Contiguous fast path: sources backed by memory may surrender their
    /// whole remaining content as one span. Returns nullopt if unsupported or
    /// already partially consumed. After a successful call the source is
    /// exhausted. The span counts as read once.
    virtual std::optional<std::span<const Point>> take_full_span() { return std::nullopt; }
};

/// Source over an in-memory point array.
class VectorSource : public PointSource {
public:
    explicit VectorSource(std::span<const Point> pts) : data_(pts) {}

    std::size_t read(std::span<Point> out) override {
        const std::size_t n = std::min(out.size(), data_.size() - pos_);
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), n, out.begin());
        pos_ += n;
        return n;
    }

    std::optional<std::span<const Point>> take_full_span() override {
        if (pos_ != 0) return std::nullopt;
        pos_ = data_.size();
        return data_;
    }

private:
    std::span<const Point> data_;
    std::size_t pos_ = 0;
};

/// Wrapper that counts how many points pass through, for verifying the
/// single-pass property of a pipeline.
class CountingSource : public PointSource {
public:
    explicit CountingSource(PointSource& inner) : inner_(inner) {}

    std::size_t read(std::span<Point> out) override {
        const std::size_t n = inner_.read(out);
        reads_ += n;
        return n;
    }

    std::optional<std::span<const Point>> take_full_span() override {
        auto span = inner_.take_full_span();
        if (span) reads_ += span->size();
        return span;
    }

    std::uint64_t points_read() const noexcept { return reads_; }

private:
    PointSource& inner_;
    std::uint64_t reads_ = 0;
};

namespace detail {

inline double parse_double(std::string_view text, std::size_t line, const char* what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
    return value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Parses one `x,y` record. Lines starting with '#' and blank lines yield
/// nullopt. Malformed records raise ParseError carrying the line number.
inline std::optional<Point> parse_point_line(std::string_view line, std::size_t line_no) {
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#') return std::nullopt;
    const std::size_t comma = s.find(',');
    if (comma == std::string_view::npos)
        throw ParseError("expected 'x,y', got '" + std::string(s) + "'", line_no);
    const double x = detail::parse_double(detail::trim(s.substr(0, comma)), line_no, "x coordinate");
    const double y = detail::parse_double(detail::trim(s.substr(comma + 1)), line_no, "y coordinate");
    return Point{x, y};
}

/// Streaming CSV point source: one `x,y` per line, '#' comments ignored.
class CsvPointSource : public PointSource {
public:
    explicit CsvPointSource(std::istream& in) : in_(in) {}

    std::size_t read(std::span<Point> out) override {
        std::size_t n = 0;
        std::string line;
        while (n < out.size() && std::getline(in_, line)) {
            ++line_no_;
            if (auto p = parse_point_line(line, line_no_)) out[n++] = *p;
        }
        return n;
    }

    std::size_t lines_read() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

/// Reads a whole point CSV into memory.
inline std::vector<Point> read_points_csv(std::istream& in) {
    std::vector<Point> pts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto p = parse_point_line(line, line_no)) pts.push_back(*p);
    }
    return pts;
}

inline std::vector<Point> read_points_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file '" + path + "'");
    return read_points_csv(in);
}

namespace detail {

// Shortest round-trip decimal representation, locale-independent.
inline void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

} // namespace detail

inline void write_points_csv(std::ostream& out, std::span<const Point> pts) {
    std::string buf;
    for (const Point& p : pts) {
        buf.clear();
        detail::append_double(buf, p.x);
        buf.push_back(',');
        detail::append_double(buf, p.y);
        buf.push_back('\n');
        out << buf;
    }
}

/// Ground-truth centers sidecar: same `x,y` record format as point files.
inline void write_centers_csv(std::ostream& out, std::span<const Point> centers) {
    out << "# center_x,center_y\n";
    write_points_csv(out, centers);
}

/// Cluster tile output: `cluster_id,tile_x,tile_y`, sorted by
/// (cluster_id, tile_x, tile_y). Clusters and tiles are already ordered.
inline void write_clusters_csv(std::ostream& out, const ClusterSet& cs) {
    std::string buf;
    for (const Cluster& c : cs.clusters) {
        for (const Tile& t : c.tiles) {
            buf.clear();
            buf += std::to_string(c.id);
            buf.push_back(',');
            buf += std::to_string(t.x);
            buf.push_back(',');
            buf += std::to_string(t.y);
            buf.push_back('\n');
            out << buf;
        }
    }
}

/// Retained-point output (prime mode): `cluster_id,x,y`, sorted by
/// (cluster_id, x, y).
inline void write_cluster_points_csv(std::ostream& out, const ClusterSet& cs) {
    std::string buf;
    for (const Cluster& c : cs.clusters) {
        for (const Point& p : c.points) {
            buf.clear();
            buf += std::to_string(c.id);
            buf.push_back(',');
            detail::append_double(buf, p.x);
            buf.push_back(',');
            detail::append_double(buf, p.y);
            buf.push_back('\n');
            out << buf;
        }
    }
}

/// Drains a source into the accumulator in fixed-size chunks. Returns the
/// number of points pulled from the source.
inline std::uint64_t ingest_all(TileAccumulator& acc, PointSource& src,
                                std::size_t chunk = 1 << 16) {
    if (auto span = src.take_full_span()) {
        acc.ingest(*span);
        return span->size();
    }
    std::vector<Point> buf(chunk);
    std::uint64_t total = 0;
    while (true) {
        const std::size_t n = src.read(buf);
        if (n == 0) break;
        acc.ingest(std::span<const Point>(buf.data(), n));
        total += n;
    }
    return total;
}

} // namespace raster
