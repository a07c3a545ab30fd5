#pragma once

#include <stdexcept>
#include <string>

namespace maxpot {

// Malformed or inconsistent user input (files, queries, options).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, int line, int column)
        : InputError(format(what, line, column)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& what, int line, int column) {
        return "line " + std::to_string(line) + ", column " + std::to_string(column) +
               ": " + what;
    }
    int line_;
    int column_;
};

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An enumeration or search would exceed a configured size limit.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace maxpot
