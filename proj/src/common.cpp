#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace nocr {

std::string to_string(Wide v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Negating the minimum value would overflow; digits are taken one by one
  // from the signed value instead.
  std::string out;
  while (v != 0) {
    int digit = static_cast<int>(v % 10);
    out.push_back(static_cast<char>('0' + (digit < 0 ? -digit : digit)));
    v /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

Wide checked_add(Wide a, Wide b) {
  Wide r;
  if (__builtin_add_overflow(a, b, &r))
    throw OverflowError("integer overflow in coefficient arithmetic (add)");
  return r;
}

Wide checked_mul(Wide a, Wide b) {
  Wide r;
  if (__builtin_mul_overflow(a, b, &r))
    throw OverflowError("integer overflow in coefficient arithmetic (mul)");
  return r;
}

IntMatrix::IntMatrix(int rows, int cols, int fill) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative matrix dimension");
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

std::size_t IntMatrix::nonzeros() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](int v) { return v != 0; }));
}

std::size_t IntMatrix::index(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw InvalidArgument("matrix index out of range");
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
         static_cast<std::size_t>(c);
}

namespace {

std::atomic<int> g_level{-1};
std::mutex g_log_mutex;

LogLevel level_from_env() {
  const char* env = std::getenv("NOC_REALLOC_LOG");
  if (env == nullptr) return LogLevel::Quiet;
  std::string_view v(env);
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  return LogLevel::Quiet;
}

}  // namespace

LogLevel log_level() {
  int l = g_level.load();
  if (l < 0) {
    l = static_cast<int>(level_from_env());
    g_level.store(l);
  }
  return static_cast<LogLevel>(l);
}

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

void log(LogLevel level, std::string_view message) {
  if (level == LogLevel::Quiet || static_cast<int>(level) > static_cast<int>(log_level()))
    return;
  std::lock_guard lock(g_log_mutex);
  std::cerr << (level == LogLevel::Debug ? "[debug] " : "[info] ") << message << '\n';
}

}  // namespace nocr
