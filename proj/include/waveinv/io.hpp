#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "waveinv/grid.hpp"
#include "waveinv/radon.hpp"

namespace waveinv {

// ---------------------------------------------------------------------------
// Binary array format
// ---------------------------------------------------------------------------
// 16-byte header: 12-byte magic "WAVEINVARRAY" + little-endian u32 version,
// then u32 axis count, then per axis a little-endian f64 extent and u64 size,
// then the payload as little-endian f64 in row-major order with the time
// axis outermost.

constexpr char kArrayMagic[12] = {'W', 'A', 'V', 'E', 'I', 'N', 'V', 'A', 'R', 'R', 'A', 'Y'};
constexpr std::uint32_t kArrayVersion = 1;

struct ArrayAxis {
    double extent = 0.0;
    std::uint64_t size = 0;
};

struct BinaryArray {
    std::vector<ArrayAxis> axes;
    std::vector<double> data;
};

namespace detail {

template <class T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("binary array: truncated file");
    return v;
}

}  // namespace detail

inline void write_array(const std::string& path, const BinaryArray& arr) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kArrayMagic, sizeof(kArrayMagic));
    detail::write_pod(os, kArrayVersion);
    detail::write_pod(os, static_cast<std::uint32_t>(arr.axes.size()));
    std::uint64_t total = 1;
    for (const auto& ax : arr.axes) {
        detail::write_pod(os, ax.extent);
        detail::write_pod(os, ax.size);
        total *= ax.size;
    }
    if (total != arr.data.size()) throw ShapeMismatch("write_array: payload size mismatch");
    os.write(reinterpret_cast<const char*>(arr.data.data()),
             static_cast<std::streamsize>(arr.data.size() * sizeof(double)));
    if (!os) throw IoError("short write: " + path);
}

inline BinaryArray read_array(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    char magic[12];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kArrayMagic, sizeof(magic)) != 0)
        throw IoError("binary array: bad magic in " + path);
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != kArrayVersion) throw IoError("binary array: unsupported version");
    const auto naxes = detail::read_pod<std::uint32_t>(is);
    BinaryArray arr;
    std::uint64_t total = 1;
    for (std::uint32_t a = 0; a < naxes; ++a) {
        ArrayAxis ax;
        ax.extent = detail::read_pod<double>(is);
        ax.size = detail::read_pod<std::uint64_t>(is);
        total *= ax.size;
        arr.axes.push_back(ax);
    }
    arr.data.resize(total);
    is.read(reinterpret_cast<char*>(arr.data.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!is) throw IoError("binary array: truncated payload in " + path);
    return arr;
}

inline BinaryArray to_array(const SpaceTimeField& u) {
    BinaryArray arr;
    arr.axes.push_back({u.grid.T, static_cast<std::uint64_t>(u.grid.nt)});
    if (u.grid.n == 2)
        arr.axes.push_back({u.grid.box[1], static_cast<std::uint64_t>(u.grid.nx)});
    arr.axes.push_back({u.grid.box[0], static_cast<std::uint64_t>(u.grid.nx)});
    arr.data = u.values;
    return arr;
}

inline BinaryArray to_array(const BoundarySignal& s) {
    BinaryArray arr;
    arr.axes.push_back({static_cast<double>(s.grid.boundary_count()),
                        static_cast<std::uint64_t>(s.grid.boundary_count())});
    arr.axes.push_back({s.grid.T, static_cast<std::uint64_t>(s.grid.nt)});
    arr.data = s.values;
    return arr;
}

inline BinaryArray to_array(const RadonData& rd) {
    BinaryArray arr;
    arr.axes.push_back({3.14159265358979323846, static_cast<std::uint64_t>(rd.thetas.size())});
    arr.axes.push_back({rd.etas.empty() ? 0.0 : rd.etas.back() - rd.etas.front(),
                        static_cast<std::uint64_t>(rd.etas.size())});
    arr.data = rd.values;
    return arr;
}

inline BinaryArray to_array(const SpatialField2D& f) {
    BinaryArray arr;
    arr.axes.push_back({f.dy * (f.ny - 1), static_cast<std::uint64_t>(f.ny)});
    arr.axes.push_back({f.dx * (f.nx - 1), static_cast<std::uint64_t>(f.nx)});
    arr.data = f.v;
    return arr;
}

// ---------------------------------------------------------------------------
// Locale-independent number formatting (byte-stable outputs)
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV writer
// ---------------------------------------------------------------------------

class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size()) throw ShapeMismatch("csv: column count mismatch");
        rows_.push_back(cells);
    }

    std::string serialize() const {
        std::ostringstream os;
        for (size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
        os << "\n";
        for (const auto& row : rows_) {
            for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
            os << "\n";
        }
        return os.str();
    }

   private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Nested key-value configuration
// ---------------------------------------------------------------------------
// Structured text: [section] headers, key = value lines, '#' comments.
// Unknown sections or keys are rejected against the schema with the full
// "section.key" path in the error.

using ConfigMap = std::map<std::string, std::string>;

inline std::string config_trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = config_trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = config_trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = config_trim(line.substr(0, eq));
        const std::string val = config_trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
        out[section + "." + key] = val;
    }
    return out;
}

inline ConfigMap load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

inline void apply_override(ConfigMap& cfg, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got: " + assignment);
    const std::string key = config_trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw ConfigError("--set key must be section.key, got: " + key);
    cfg[key] = config_trim(assignment.substr(eq + 1));
}

/// Stable under key reordering: hash of the sorted canonical key=value lines.
inline std::string config_hash(const ConfigMap& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : cfg) {  // std::map iterates in sorted key order
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// typed getters -------------------------------------------------------------

class ConfigView {
   public:
    explicit ConfigView(ConfigMap cfg) : cfg_(std::move(cfg)) {}

    const ConfigMap& raw() const { return cfg_; }

    bool has(const std::string& key) const { return cfg_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = cfg_.find(key);
        return it == cfg_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = cfg_.find(key);
        if (it == cfg_.end()) return fallback;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key + ": not a number: '" + it->second + "'");
        }
    }

    long get_int(const std::string& key, long fallback) const {
        auto it = cfg_.find(key);
        if (it == cfg_.end()) return fallback;
        try {
            size_t pos = 0;
            const long v = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key + ": not an integer: '" + it->second + "'");
        }
    }

    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
        auto it = cfg_.find(key);
        if (it == cfg_.end()) return fallback;
        std::vector<double> out;
        std::istringstream is(it->second);
        std::string cell;
        while (std::getline(is, cell, ',')) {
            cell = config_trim(cell);
            if (cell.empty()) continue;
            try {
                out.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError(key + ": not a number list: '" + it->second + "'");
            }
        }
        return out;
    }

    /// Rejects keys outside the schema; reports the offending path.
    void validate_keys(const std::map<std::string, std::set<std::string>>& schema) const {
        for (const auto& [path, value] : cfg_) {
            (void)value;
            const size_t dot = path.find('.');
            const std::string section = path.substr(0, dot);
            const std::string key = path.substr(dot + 1);
            auto sec = schema.find(section);
            if (sec == schema.end()) throw ConfigError("unknown config section: [" + section + "]");
            if (!sec->second.count(key)) throw ConfigError("unknown config key: " + path);
        }
    }

   private:
    ConfigMap cfg_;
};

}  // namespace waveinv
