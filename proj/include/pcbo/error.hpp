#ifndef PCBO_ERROR_HPP
#define PCBO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pcbo {

/// Bad arguments: malformed graphs, out-of-range hyperparameters, bad configs.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A correlation submatrix that cannot be inverted.
class IllConditioned : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A test's degrees-of-freedom requirement fails for the given N and |C|.
class InsufficientSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Factorization failure after the full jitter ladder, or other numeric breakdown.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated internal invariant (e.g. a missing separation set).
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pcbo

#endif  // PCBO_ERROR_HPP
