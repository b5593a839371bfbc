#ifndef QSR_ERROR_HPP
#define QSR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qsr {

/// Input or configuration failed validation. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative fit did not converge. The CLI maps this to exit code 2.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::string last_iterate)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}

    const std::string& last_iterate() const noexcept { return last_iterate_; }

private:
    std::string last_iterate_;
};

}  // namespace qsr

#endif  // QSR_ERROR_HPP
