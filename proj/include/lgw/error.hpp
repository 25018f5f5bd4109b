#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace lgw {

/// Raised for every recoverable pipeline failure: malformed input files,
/// contract violations, stale artifacts. The CLI turns these into one-line
/// diagnostics and a nonzero exit status.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

template <class... Parts>
std::string cat(Parts&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

template <class... Parts>
[[noreturn]] void fail(Parts&&... parts) {
  throw Error(cat(std::forward<Parts>(parts)...));
}

}  // namespace lgw
