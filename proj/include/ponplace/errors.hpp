#pragma once

#include <stdexcept>
#include <string>

namespace ponplace {

// Thrown when a power/placement contract is violated (e.g. load assigned to an
// inactive server). Constraint checking that treats violations as data lives in
// feasibility.hpp; this exception is for programming-contract breaches.
class infeasible_error : public std::runtime_error {
 public:
  explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a structured text file does not match its documented format.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, int line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit parse_error(const std::string& what) : std::runtime_error(what), line_(-1) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace ponplace
