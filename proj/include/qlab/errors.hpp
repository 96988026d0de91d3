#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qlab {

/// Base of every error raised by the library. `kind()` is the stable name
/// used in diagnostics and in the Python bindings.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define QLAB_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  };

// lang
QLAB_DEFINE_ERROR(UnknownSymbol)
QLAB_DEFINE_ERROR(InvalidVocabulary)
QLAB_DEFINE_ERROR(InvalidPermutation)
QLAB_DEFINE_ERROR(SizeLimitExceeded)

// semantics
QLAB_DEFINE_ERROR(UnderdeterminedObject)
QLAB_DEFINE_ERROR(InconsistentDiagram)

// borel
QLAB_DEFINE_ERROR(MonotonicityViolation)
QLAB_DEFINE_ERROR(UnsupportedConcept)

// prob
QLAB_DEFINE_ERROR(InvalidProbability)
QLAB_DEFINE_ERROR(MissingConditional)
QLAB_DEFINE_ERROR(EmptyFamily)
QLAB_DEFINE_ERROR(ZeroMassHypothesis)
QLAB_DEFINE_ERROR(InconsistentEvidence)

// learnlab
QLAB_DEFINE_ERROR(CapExceeded)
QLAB_DEFINE_ERROR(NoSeparatingPair)

// probe
QLAB_DEFINE_ERROR(MissingResponse)
QLAB_DEFINE_ERROR(DuplicateResponse)
QLAB_DEFINE_ERROR(AdapterUnreachable)
QLAB_DEFINE_ERROR(ProtocolViolation)

// cli
QLAB_DEFINE_ERROR(ConfigError)
QLAB_DEFINE_ERROR(MalformedReport)

#undef QLAB_DEFINE_ERROR

/// Parse failure; carries the 1-based literal index and byte offset.
class MalformedLiteral : public Error {
 public:
  MalformedLiteral(const std::string& what, std::size_t literal_index = 0,
                   std::size_t offset = 0)
      : Error("MalformedLiteral", what + " (literal " +
                                      std::to_string(literal_index) +
                                      ", offset " + std::to_string(offset) +
                                      ")"),
        literal_index_(literal_index),
        offset_(offset) {}
  std::size_t literal_index() const noexcept { return literal_index_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t literal_index_;
  std::size_t offset_;
};

/// Caps on exhaustive enumeration. Every enumerating operation takes one.
struct Limits {
  std::uint64_t max_strings = std::uint64_t{1} << 22;
};

}  // namespace qlab
