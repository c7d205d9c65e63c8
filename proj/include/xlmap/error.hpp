#ifndef XLMAP_ERROR_HPP
#define XLMAP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xlmap {

// Base class for everything the library throws on bad data.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Malformed input file or stream. line() is 1-based, 0 when unknown.
class FormatError : public Error {
   public:
    FormatError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

   private:
    std::size_t line_;
};

class DimensionError : public Error {
   public:
    using Error::Error;
};

// Input is well formed but cannot support the requested computation
// (zero vectors, too few items, no usable pairs, ...).
class DataError : public Error {
   public:
    using Error::Error;
};

class IoError : public Error {
   public:
    using Error::Error;
};

}  // namespace xlmap

#endif  // XLMAP_ERROR_HPP
