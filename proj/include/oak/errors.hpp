#ifndef OAK_ERRORS_HPP
#define OAK_ERRORS_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace oak {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : std::runtime_error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  /// 1-based line number, 0 when the error concerns the file as a whole.
  std::size_t line() const { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

class InvalidKernelMatrix : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class InvalidMatrix : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class InvalidParameter : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class UnknownObject : public std::out_of_range {
  using std::out_of_range::out_of_range;
};

class UnknownNode : public std::out_of_range {
  using std::out_of_range::out_of_range;
};

class UnknownGraph : public std::out_of_range {
  using std::out_of_range::out_of_range;
};

class UnknownKernel : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class InstanceError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class HierarchyMismatch : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class TooLarge : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Triple (x, y, z) with k(x,y) < min{k(x,z), k(z,y)}.
using Witness = std::array<std::size_t, 3>;

class NotStrongError : public std::invalid_argument {
public:
  explicit NotStrongError(const Witness& witness)
      : std::invalid_argument("kernel is not strong: k(" + std::to_string(witness[0]) + "," +
                              std::to_string(witness[1]) + ") < min{k(x,z), k(z,y)} for z=" +
                              std::to_string(witness[2])),
        witness_(witness) {}

  const Witness& witness() const { return witness_; }

private:
  Witness witness_;
};

} // namespace oak

#endif // OAK_ERRORS_HPP
