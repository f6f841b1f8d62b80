#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace navprompt {

/// Base type for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- instruction validation ---

class SpanOutOfRange : public Error {
 public:
  using Error::Error;
};

class OverlappingSpans : public Error {
 public:
  using Error::Error;
};

class UnsortedSpans : public Error {
 public:
  using Error::Error;
};

class EmptyPath : public Error {
 public:
  using Error::Error;
};

class RepeatedPathNode : public Error {
 public:
  using Error::Error;
};

class DuplicatePhraseIndex : public Error {
 public:
  using Error::Error;
};

class InvalidPhraseIndex : public Error {
 public:
  using Error::Error;
};

class InvalidPrompt : public Error {
 public:
  using Error::Error;
};

// --- alignment ---

class EmptyCandidateSet : public Error {
 public:
  explicit EmptyCandidateSet(int phrase_index)
      : Error("empty candidate set for phrase " + std::to_string(phrase_index)),
        phrase_index_(phrase_index) {}
  int phrase_index() const { return phrase_index_; }

 private:
  int phrase_index_;
};

class SearchSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

class EmptySelection : public Error {
 public:
  using Error::Error;
};

// --- navigation graph and metrics ---

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& node_id)
      : Error("unknown node: " + node_id), node_id_(node_id) {}
  const std::string& node_id() const { return node_id_; }

 private:
  std::string node_id_;
};

class InvalidTrajectory : public Error {
 public:
  using Error::Error;
};

class TrajectoryStartMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyResultSet : public Error {
 public:
  using Error::Error;
};

// --- file I/O ---

/// Malformed content in a line-delimited dataset file. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// --- external clients ---

class ClientUnavailable : public Error {
 public:
  using Error::Error;
};

class InvalidSpanFromClient : public Error {
 public:
  using Error::Error;
};

class InvalidCandidateFromClient : public Error {
 public:
  using Error::Error;
};

}  // namespace navprompt
