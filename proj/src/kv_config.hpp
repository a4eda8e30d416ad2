#pragma once

#include <cctype>
#include <istream>
#include <stdexcept>
#include <string>

#include "pointamp/error.hpp"

// Shared line scanner for the flat key=value config dialect used by
// templates.cfg and render configs.

namespace pointamp::detail {

struct ConfigLine {
    std::string key;
    std::string value;
    int line = 0;
    bool present = false;
};

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Pulls the next `key = value` pair; blank lines and '#' comments skipped.
inline ConfigLine next_pair(std::istream& in, int& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
        ConfigLine out;
        out.key = trim(text.substr(0, eq));
        out.value = trim(text.substr(eq + 1));
        out.line = line_no;
        out.present = true;
        if (out.key.empty()) throw ParseError(line_no, "empty key");
        return out;
    }
    return {};
}

inline double parse_real(const ConfigLine& kv) {
    try {
        std::size_t used = 0;
        const double v = std::stod(kv.value, &used);
        if (used != kv.value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ParseError(kv.line, "bad numeric value '" + kv.value + "'");
    }
}

}  // namespace pointamp::detail
