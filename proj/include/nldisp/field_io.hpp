#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"

namespace nldisp {

inline constexpr char kFieldMagic[8] = {'N', 'L', 'F', 'L', 'D', 'v', '0', '1'};

/// A decoded field dump. rows * cols values, row-major; for N = 1 rows = 1.
struct FieldDump {
    std::uint32_t dim = 1;
    std::uint32_t n1 = 0;  // extent along x1
    std::uint32_t n2 = 1;  // inferred from the payload length
    double h = 0.0;
    double t = 0.0;
    std::vector<double> values;
};

/// 32-byte header: magic[8] | u32 N | u32 n1 | f64 h | f64 t, then n1 * n2
/// little-endian doubles. The header has room for a single extent, so n2 is
/// recovered from the payload size.
inline void write_field(std::ostream& os, std::uint32_t dim, std::uint32_t n1, double h, double t,
                        const std::vector<double>& values) {
    require(n1 > 0 && values.size() % n1 == 0, "field size is not a multiple of n1");
    os.write(kFieldMagic, 8);
    os.write(reinterpret_cast<const char*>(&dim), 4);
    os.write(reinterpret_cast<const char*>(&n1), 4);
    os.write(reinterpret_cast<const char*>(&h), 8);
    os.write(reinterpret_cast<const char*>(&t), 8);
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
}

inline void write_field_file(const std::string& path, std::uint32_t dim, std::uint32_t n1, double h,
                             double t, const std::vector<double>& values) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw NumericalError("cannot open " + path + " for writing");
    write_field(os, dim, n1, h, t, values);
}

inline FieldDump read_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw NumericalError("cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kFieldMagic, 8) != 0) throw NumericalError(path + ": bad field magic");
    FieldDump d;
    is.read(reinterpret_cast<char*>(&d.dim), 4);
    is.read(reinterpret_cast<char*>(&d.n1), 4);
    is.read(reinterpret_cast<char*>(&d.h), 8);
    is.read(reinterpret_cast<char*>(&d.t), 8);
    if (!is || d.n1 == 0) throw NumericalError(path + ": truncated header");
    std::vector<char> rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const std::size_t cnt = rest.size() / sizeof(double);
    if (rest.size() % sizeof(double) || cnt % d.n1) throw NumericalError(path + ": payload size mismatch");
    d.n2 = static_cast<std::uint32_t>(cnt / d.n1);
    d.values.resize(cnt);
    std::memcpy(d.values.data(), rest.data(), rest.size());
    return d;
}

/// Shortest round-trip decimal form.
inline std::string fmt_double(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace nldisp
