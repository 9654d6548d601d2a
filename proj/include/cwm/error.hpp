#pragma once

#include <stdexcept>
#include <string>

namespace cwm {

// Every failure raised by the library derives from Error. The category
// decides the CLI exit code (3 for data problems, 4 for numerics).
class Error : public std::runtime_error {
public:
    enum class Category { Data, Numerical };

    Error(Category category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(Category::Numerical, what) {}
};

/// Problem size exceeds what the exact (big-integer / enumeration) routines accept.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error(Category::Numerical, what) {}
};

/// Division by a vanishing quantity (conditioning Hamiltonian, asymptotic denominator).
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& what) : Error(Category::Numerical, what) {}
};

/// Gaussian saddle-point approximation used outside its region of validity.
class SaddlePointInvalid : public Error {
public:
    explicit SaddlePointInvalid(const std::string& what) : Error(Category::Numerical, what) {}
};

/// A chi-square class with zero probability under the null law.
class DegenerateClassError : public Error {
public:
    explicit DegenerateClassError(const std::string& what) : Error(Category::Numerical, what) {}
};

/// Malformed input file or table.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(Category::Data, what) {}
};

}  // namespace cwm
