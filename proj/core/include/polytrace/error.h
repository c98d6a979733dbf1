#pragma once

#include <stdexcept>
#include <string>

namespace polytrace {

// Every library failure surfaces as this exception; the message is the
// stable diagnostic (e.g. "no pair partition", "wick oracle limit").
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polytrace
