#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kcoreset/error.hpp"
#include "kcoreset/metric.hpp"

namespace kcoreset {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline double parse_real(const std::string& field, std::size_t line_no) {
    const std::string text = trim(field);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw IoError("line " + std::to_string(line_no) + ": not a number: '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(value)) {
        throw IoError("line " + std::to_string(line_no) + ": not a finite number: '" + text + "'");
    }
    return value;
}

inline std::vector<double> parse_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        row.push_back(parse_real(field, line_no));
    }
    if (!line.empty() && line.back() == ',') {
        throw IoError("line " + std::to_string(line_no) + ": trailing comma");
    }
    return row;
}

}  // namespace detail

/// Reads one point per row. Blank lines and lines starting with '#' are
/// skipped. The dimension comes from the first row.
inline std::vector<Coords> read_points_csv(std::istream& in) {
    std::vector<Coords> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = detail::trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        auto row = detail::parse_csv_row(text, line_no);
        if (!points.empty() && row.size() != points.front().size()) {
            throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(points.front().size()) +
                          " columns, found " + std::to_string(row.size()));
        }
        points.push_back(std::move(row));
    }
    if (points.empty()) {
        throw IoError("no points in input");
    }
    return points;
}

/// Reads {"coords":[...]} objects, one per line.
inline std::vector<Coords> read_points_jsonl(std::istream& in) {
    std::vector<Coords> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        Coords row;
        try {
            const auto obj = nlohmann::json::parse(line);
            row = obj.at("coords").get<Coords>();
        } catch (const nlohmann::json::exception& e) {
            throw IoError("line " + std::to_string(line_no) + ": " + e.what());
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw IoError("line " + std::to_string(line_no) + ": non-finite coordinate");
            }
        }
        if (row.empty() || (!points.empty() && row.size() != points.front().size())) {
            throw IoError("line " + std::to_string(line_no) + ": inconsistent dimension");
        }
        points.push_back(std::move(row));
    }
    if (points.empty()) {
        throw IoError("no points in input");
    }
    return points;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

/// CSV unless the extension is .jsonl or .json.
inline std::vector<Coords> load_points(const std::filesystem::path& path) {
    auto in = open_input(path);
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json") {
        return read_points_jsonl(in);
    }
    return read_points_csv(in);
}

/// n x n distance table in CSV. The metric axioms are checked separately.
inline MatrixSpace read_matrix_csv(std::istream& in) {
    const auto rows = read_points_csv(in);
    const std::size_t n = rows.size();
    if (rows.front().size() != n) {
        throw IoError("metric matrix is " + std::to_string(n) + " x " + std::to_string(rows.front().size()));
    }
    std::vector<double> table;
    table.reserve(n * n);
    for (const auto& row : rows) {
        table.insert(table.end(), row.begin(), row.end());
    }
    return MatrixSpace(n, std::move(table));
}

inline MatrixSpace load_matrix(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_matrix_csv(in);
}

inline void write_points_csv(std::ostream& out, const std::vector<Coords>& points) {
    out << std::setprecision(17);
    for (const auto& p : points) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            out << (i ? "," : "") << p[i];
        }
        out << '\n';
    }
}

/// FNV-1a over the raw bytes of the input; ties a coreset file to its data.
class Fingerprint {
  public:
    void add(const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash_ ^= bytes[i];
            hash_ *= 0x100000001b3ULL;
        }
    }

    void add(double v) { add(&v, sizeof v); }
    void add(std::uint64_t v) { add(&v, sizeof v); }

    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
        return buf;
    }

  private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline std::string fingerprint(const std::vector<Coords>& points) {
    Fingerprint fp;
    fp.add(std::uint64_t{points.size()});
    for (const auto& p : points) {
        fp.add(std::uint64_t{p.size()});
        for (double v : p) {
            fp.add(v);
        }
    }
    return fp.hex();
}

inline std::string fingerprint(const MatrixSpace& space) {
    Fingerprint fp;
    fp.add(std::uint64_t{space.size()});
    for (double v : space.table()) {
        fp.add(v);
    }
    return fp.hex();
}

/// Writes through a sibling temp file and renames, so a failed run never
/// leaves a partial file behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace kcoreset
