#pragma once

#include <stdexcept>
#include <string>

namespace repgame {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files or ill-formed JSON.
struct ParseError : Error {
  using Error::Error;
};

// Structural problems in a scenario or profile (dimension mismatches,
// weights that do not normalize, references to unknown labels).
struct ValidationError : Error {
  using Error::Error;
};

// An operation required a unique best reply and found a tie.
struct AssumptionError : Error {
  using Error::Error;
};

// An observation had zero probability under every type in the model.
struct OffPathError : Error {
  using Error::Error;
};

// A computation would exceed its enumeration budget.
struct BudgetError : Error {
  using Error::Error;
};

}  // namespace repgame
