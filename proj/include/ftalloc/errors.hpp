#pragma once

#include <stdexcept>
#include <string>

namespace ftalloc {

// Bad user input: malformed instance, parameter out of range, etc.
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A configured resource guard (state-space size, enumeration dimension,
// exact-evaluation size) would be exceeded.
class GuardTrip : public std::runtime_error {
public:
  explicit GuardTrip(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ftalloc
