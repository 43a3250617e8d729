#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nocr {

/// Exact integer type used for objective coefficients and objective values.
/// The priority weights double with every rank, so 64 bits are not enough
/// for large application sets.
using Wide = __int128;

std::string to_string(Wide v);

/// Checked arithmetic on Wide; throws OverflowError instead of wrapping.
Wide checked_add(Wide a, Wide b);
Wide checked_mul(Wide a, Wide b);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive routine is asked to handle too large an input.
class OversizeError : public Error {
 public:
  using Error::Error;
};

/// Dense row-major integer matrix. Used for incidence matrices and
/// allocation matrices, which are small.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols, int fill = 0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int& at(int r, int c) { return data_[index(r, c)]; }
  int at(int r, int c) const { return data_[index(r, c)]; }
  std::size_t nonzeros() const;

  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t index(int r, int c) const;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> data_;
};

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Log level is read from NOC_REALLOC_LOG on first use unless set explicitly.
LogLevel log_level();
void set_log_level(LogLevel level);
void log(LogLevel level, std::string_view message);

}  // namespace nocr
