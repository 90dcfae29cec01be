#ifndef SYNTAGRAPH_ERRORS_HPP
#define SYNTAGRAPH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace syntagraph {

// Malformed input bytes: bad JSON, bad CoNLL-U lines, unknown document kinds.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain invariant (dangling foreign key,
// non-tree parse, shape mismatch, ...). Messages name the offending entity.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values surfaced by numeric code; signals an upstream bug.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace syntagraph

#endif
