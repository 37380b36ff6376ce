#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace dupliq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (bad argument, malformed row,
/// unknown name). Maps to CLI exit code 1.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed. Maps to CLI exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Worker count used by parallel loops. Starts from DUPLIQ_THREADS (or the
/// hardware concurrency) and can be overridden with set_thread_count.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are
/// disjoint, so writes indexed by position are deterministic regardless of
/// the number of workers.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse; throws ContractError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

}  // namespace dupliq
