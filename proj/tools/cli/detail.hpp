#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace annulus::cli::detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "X,Y" or "X" -> X + iY.
std::complex<double> parse_complex(const std::string& s, const char* flag);

}  // namespace annulus::cli::detail
