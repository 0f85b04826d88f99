#include "pulselab/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pulselab/error.hpp"

namespace pulselab {

namespace {
constexpr const char* kHeader = "grid_tag ";
}

std::string format_mask(const PhaseMask& mask) {
    std::string out = fmt::format("{}{}\n", kHeader, mask.grid_tag);
    for (double v : mask.phase) out += fmt::format("{:.17g}\n", v);
    return out;
}

PhaseMask parse_mask(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0)
        throw Error(Errc::io_error, "mask file lacks a grid_tag header");
    PhaseMask m;
    m.grid_tag = line.substr(std::string(kHeader).size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v = 0.0;
        const char* end = line.data() + line.size();
        auto [p, ec] = std::from_chars(line.data(), end, v);
        if (ec != std::errc() || p != end || !std::isfinite(v))
            throw Error(Errc::io_error, fmt::format("bad phase value on line {}", lineno));
        m.phase.push_back(v);
    }
    if (m.phase.empty()) throw Error(Errc::io_error, "mask file holds no values");
    return m;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::io_error, fmt::format("cannot write '{}'", path));
    f << content;
    if (!f) throw Error(Errc::io_error, fmt::format("write to '{}' failed", path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::io_error, fmt::format("cannot read '{}'", path));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_mask_file(const std::string& path, const PhaseMask& mask) {
    write_text_file(path, format_mask(mask));
}

PhaseMask read_mask_file(const std::string& path) { return parse_mask(read_text_file(path)); }

}  // namespace pulselab
