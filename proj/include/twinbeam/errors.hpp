#ifndef TWINBEAM_ERRORS_HPP_
#define TWINBEAM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace twinbeam {

/// Raised when a nonclassicality parameter is evaluated at a point where it
/// is 0/0 (vacuum in, vacuum out).
class UndefinedPointError : public std::domain_error {
public:
    explicit UndefinedPointError(const std::string& what) : std::domain_error(what) {}
};

/// The Fock-space truncation cannot reach the requested accuracy.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double defect)
        : std::runtime_error(what), defect_(defect) {}

    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientData : public std::runtime_error {
public:
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

/// The requested quantity has no meaning for this configuration
/// (e.g. the negativity parameter for more than one mode pair).
class NotApplicable : public std::logic_error {
public:
    explicit NotApplicable(const std::string& what) : std::logic_error(what) {}
};

} // namespace twinbeam

#endif // TWINBEAM_ERRORS_HPP_
