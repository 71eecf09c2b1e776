#ifndef LEVYLMM_ERRORS_HPP
#define LEVYLMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace levylmm {

/// Argument outside the domain where a cumulant or density is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid model, market or simulation configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// LIBOR state that violates 1 + delta*L > 0.
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A path batch lacks the dates or horizons a product needs.
class DataError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace levylmm

#endif // LEVYLMM_ERRORS_HPP
