#pragma once

#include <stdexcept>
#include <string>

namespace bihaar {

// Invalid parameter values (negative intensity, alpha outside (0,1), ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Incompatible array shapes / lengths not divisible by 2^J.
class size_error : public std::invalid_argument {
public:
    explicit size_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed band layout inside a pyramid.
class structure_error : public std::invalid_argument {
public:
    explicit structure_error(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input files (bad magic, truncated payload, ...).
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bihaar
