#include "epdd/errors.hpp"

#include <sstream>

namespace epdd {

namespace {

std::string join_violations(const std::vector<Violation>& violations)
{
    std::ostringstream os;
    os << "invalid configuration";
    for (const auto& v : violations)
        os << "\n  " << v.field << ": " << v.reason;
    return os.str();
}

std::string g(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorKind::Validation, join_violations(violations)), violations_(std::move(violations))
{
}

ValidationError::ValidationError(std::string field, std::string reason)
    : ValidationError(std::vector<Violation>{{std::move(field), std::move(reason)}})
{
}

NonConvergence::NonConvergence(int iterations_, double residual_)
    : Error(ErrorKind::NonConvergence,
            "field solve did not converge after " + std::to_string(iterations_) +
                " Picard iterations (residual " + g(residual_) + ")"),
      iterations(iterations_), residual(residual_)
{
}

StabilityViolation::StabilityViolation(double time_, double value_, std::size_t node_)
    : Error(ErrorKind::StabilityViolation,
            "stability violation at t=" + g(time_) + " s: node " + std::to_string(node_) +
                " went negative (" + g(value_) + ")"),
      time(time_), value(value_), node(node_)
{
}

}  // namespace epdd
