#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nelp {

/// Malformed input, tagged with the source name and 1-based line number.
class InputError : public std::runtime_error {
 public:
  InputError(std::string source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), source_(std::move(source)), line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Calls `record(line_number, fields)` for every tab-separated line that is
/// neither blank nor a `#` comment. A trailing '\r' is stripped.
void for_each_record(std::string_view text, const std::string& source,
                     const std::function<void(std::size_t, std::span<const std::string_view>)>& record);

std::int64_t parse_int(std::string_view s, const std::string& source, std::size_t line);
double parse_double(std::string_view s, const std::string& source, std::size_t line);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace nelp
