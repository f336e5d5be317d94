#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace erdos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  EmptyCorpusError() : Error("corpus is empty") {}
};

class WindowError : public Error {
 public:
  using Error::Error;
};

class DegenerateNetworkError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

/// Records skipped during parsing/normalization. Every skipped record bumps
/// `dropped` and leaves a note.
struct Diagnostics {
  std::size_t dropped = 0;
  std::vector<std::string> notes;

  void drop(std::string why) {
    ++dropped;
    notes.push_back(std::move(why));
  }
};

}  // namespace erdos
