#pragma once

#include <stdexcept>
#include <string>

namespace kmono {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries the remainder left when the leading term stopped dividing.
struct NotDivisible : Error {
  std::string remainder;
  NotDivisible(const std::string& what, std::string rem)
      : Error(what), remainder(std::move(rem)) {}
};

struct ZeroImage : Error { using Error::Error; };
struct TooManyVariables : Error { using Error::Error; };
struct NotPolynomial : Error { using Error::Error; };
struct SymmetrizationNotPolynomial : NotPolynomial { using NotPolynomial::NotPolynomial; };
struct DomainError : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };
struct NotInP : Error { using Error::Error; };
struct IntegralityViolation : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct SingularBasis : Error { using Error::Error; };
struct ZeroValue : Error { using Error::Error; };
struct SizeLimit : Error { using Error::Error; };

}  // namespace kmono
