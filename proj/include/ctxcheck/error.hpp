#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctxcheck {

// Base for every error the toolkit reports as an operational failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A registered annotation token never showed up in the analyzed document.
class MissingToken : public Error {
 public:
  explicit MissingToken(std::string token)
      : Error("registered annotation token not found in document: " + token),
        token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// A sanitizer chain refers to an id the context map does not know.
class UnknownSanitizer : public Error {
 public:
  explicit UnknownSanitizer(std::string id)
      : Error("sanitizer id has no context map entry: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Registered tokens are still present after annotation stripping.
class UnknownResidue : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Malformed bundle, environment or context map contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxcheck
