#ifndef WEAKINFO_ERRORS_HPP
#define WEAKINFO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace weakinfo {

/**
 * Error taxonomy.
 *
 * ValidationError and its children signal bad inputs (malformed configs,
 * inconsistent measures, markets outside the supported shape); the CLI maps
 * them to exit code 1. NumericalError and its children signal that a
 * numerically sound input defeated a solver; the CLI maps them to exit
 * code 2.
 */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Factor range does not bracket the gross risk-free return: no-arbitrage fails.
class ArbitrageError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A supplied probability vector violates positivity, normalization, or the
/// one-step martingale constraint.
class InvalidMeasure : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// k > 2 move factors with no risk-neutral vector supplied: the one-asset
/// market is incomplete and the measure must be chosen by the caller.
class Underdetermined : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Exhaustive path enumeration would exceed the configured budget.
class CapExceeded : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A terminal law's support does not match the lattice's terminal class set.
class ClassMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Transition query at a state with zero marginal probability.
class UnreachableState : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// An operation requiring an equivalent terminal law (all classes charged)
/// received one with a zero mass.
class NotEquivalent : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Unique replication requested on a lattice with more than two moves.
class IncompleteMarket : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Malformed configuration file or flag set; the message names the field.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A walk whose step distribution is degenerate where a positive variance is
/// required for scaling.
class DegenerateVariance : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Monotone bracket expansion exhausted [1e-300, 1e300] without sign change;
/// typically a utility violating the Inada conditions numerically.
class BracketFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Node-doubling quadrature refinement failed to stabilize the integral.
class QuadratureDivergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace weakinfo

#endif
