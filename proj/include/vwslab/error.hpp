#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vwslab {

/// Invalid input to a constructor or operation (bad parameter, mesh mismatch).
class InvalidArgument : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative solve stopped at the iteration cap or broke down.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history))
    {}

    /// Relative residual after each iteration.
    [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// The requested experiment cannot be resolved on the given mesh.
class UnderResolved : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace vwslab
