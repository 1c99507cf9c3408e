#ifndef PRINTSIG_ERROR_HPP
#define PRINTSIG_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace printsig {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line_no, const std::string &what)
      : Error("line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class KinematicsError : public Error {
 public:
  using Error::Error;
};

class TamperError : public Error {
 public:
  using Error::Error;
};

class AudioError : public Error {
 public:
  using Error::Error;
};

class DspError : public Error {
 public:
  using Error::Error;
};

class FingerprintError : public Error {
 public:
  using Error::Error;
};

class VerifyError : public Error {
 public:
  using Error::Error;
};

class SessionError : public Error {
 public:
  using Error::Error;
};

class SignatureError : public Error {
 public:
  using Error::Error;
};

}  // namespace printsig

#endif  // PRINTSIG_ERROR_HPP
