#include "oasis/errors.hpp"

#include <utility>

namespace oasis {

ParseError::ParseError(std::string const& what, std::size_t line)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_{line} {}

IoError::IoError(std::string const& what, std::string path)
    : Error(what + ": " + path), path_{std::move(path)} {}

}  // namespace oasis
