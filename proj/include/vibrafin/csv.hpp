#pragma once

// Locale-independent CSV output ('.' decimal separator, LF line endings)
// and the trajectory CSV round trip.

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vibrafin/errors.hpp"
#include "vibrafin/locomotion.hpp"

namespace vibrafin::csv {

inline constexpr int kDigits = 9;

/// Shortest-form general notation with `digits` significant digits.
inline std::string format(double v, int digits = kDigits) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, digits);
    return std::string(buf.data(), res.ptr);
}

inline double parse(std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError("csv", "cannot parse number '" + std::string(s) + "'");
    return v;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> cols{"t_s",   "x_m",    "y_m",   "theta_rad", "u_mps",
                                               "v_mps", "r_radps", "fin_l", "fin_r",     "fin_c"};
    return cols;
}

inline void write_trajectory(std::ostream& out, const std::vector<loco::TrajectorySample>& samples) {
    write_row(out, trajectory_columns());
    for (const auto& s : samples) {
        const auto& st = s.state;
        write_row(out, {format(st.t), format(st.x), format(st.y), format(st.theta), format(st.u), format(st.v),
                        format(st.r), s.fins[0] ? "1" : "0", s.fins[1] ? "1" : "0", s.fins[2] ? "1" : "0"});
    }
}

inline std::vector<loco::TrajectorySample> read_trajectory(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split(line) != trajectory_columns())
        throw ValidationError("csv", "trajectory header does not match the expected columns");
    std::vector<loco::TrajectorySample> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != trajectory_columns().size())
            throw ValidationError("csv", "trajectory row has " + std::to_string(cells.size()) + " cells");
        loco::TrajectorySample s;
        s.state.t = parse(cells[0]);
        s.state.x = parse(cells[1]);
        s.state.y = parse(cells[2]);
        s.state.theta = parse(cells[3]);
        s.state.u = parse(cells[4]);
        s.state.v = parse(cells[5]);
        s.state.r = parse(cells[6]);
        for (std::size_t i = 0; i < loco::kFinCount; ++i) s.fins[i] = parse(cells[7 + i]) != 0.0;
        out.push_back(s);
    }
    return out;
}

}  // namespace vibrafin::csv
