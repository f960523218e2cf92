#pragma once

#include <stdexcept>
#include <string>

namespace isopar {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Index, order or dimension outside the accepted range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A computation produced an infinite or NaN value.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Iterative eigensolver exhausted its sweep budget.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double off_diagonal_norm)
        : Error(what), off_diagonal_norm_(off_diagonal_norm) {}
    double off_diagonal_norm() const noexcept { return off_diagonal_norm_; }

private:
    double off_diagonal_norm_;
};

/// Power sums that no real spectrum can produce.
class IllPosedMomentsError : public Error {
public:
    IllPosedMomentsError(const std::string& what, double imaginary_part)
        : Error(what), imaginary_part_(imaginary_part) {}
    double imaginary_part() const noexcept { return imaginary_part_; }

private:
    double imaginary_part_;
};

/// Vandermonde nodes too close together.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double gap) : Error(what), gap_(gap) {}
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

/// A requested algebraic object cannot be built with the given parameters.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// The point is too close to a focal variety for the level geometry to be regular.
class FocalPointError : public Error {
public:
    FocalPointError(const std::string& what, double level) : Error(what), level_(level) {}
    double level() const noexcept { return level_; }

private:
    double level_;
};

/// Root of F along the normal great circle could not be bracketed.
class ProjectionError : public Error {
public:
    using Error::Error;
};

/// Principal curvature spectrum does not split into the expected clusters.
class SpectralGapError : public Error {
public:
    using Error::Error;
};

/// No closed form for Omega_F is known for this (Clifford system, complex structure) pair.
class UnsupportedPairError : public Error {
public:
    using Error::Error;
};

/// The polynomial is not invariant under the circle action of the complex structure.
class InvarianceError : public Error {
public:
    InvarianceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Requested time lies inside the exclusion band of a principal curvature pole.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double blow_up_time)
        : Error(what), blow_up_time_(blow_up_time) {}
    double blow_up_time() const noexcept { return blow_up_time_; }

private:
    double blow_up_time_;
};

/// Numerical integration left the finite range.
class IntegrationError : public Error {
public:
    using Error::Error;
};

}  // namespace isopar
