#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pointamp {

// Text-format errors carry the 1-based line number of the offending record.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class FormatErrorKind {
    BadMagic,
    BadVersion,
    Truncated,
    Corrupt,
};

class FormatError : public std::runtime_error {
public:
    FormatError(FormatErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    FormatErrorKind kind() const { return kind_; }

private:
    FormatErrorKind kind_;
};

}  // namespace pointamp
