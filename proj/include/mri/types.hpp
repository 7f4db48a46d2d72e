#ifndef MRI_TYPES_HPP
#define MRI_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mri
{

using Real    = double;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

enum class ErrorKind
{
    DimensionMismatch,
    InvalidArgument,
    ZeroSnapshot,
    AllZero,
    EmptyApprox,
    AtPole,
    NodePoint,
    SingularSystem,
    RankDeficient,
    BudgetExhausted,
    NotPositiveDefinite,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::DimensionMismatch:
        return "DimensionMismatch";
    case ErrorKind::InvalidArgument:
        return "InvalidArgument";
    case ErrorKind::ZeroSnapshot:
        return "ZeroSnapshot";
    case ErrorKind::AllZero:
        return "AllZero";
    case ErrorKind::EmptyApprox:
        return "EmptyApprox";
    case ErrorKind::AtPole:
        return "AtPole";
    case ErrorKind::NodePoint:
        return "NodePoint";
    case ErrorKind::SingularSystem:
        return "SingularSystem";
    case ErrorKind::RankDeficient:
        return "RankDeficient";
    case ErrorKind::BudgetExhausted:
        return "BudgetExhausted";
    case ErrorKind::NotPositiveDefinite:
        return "NotPositiveDefinite";
    }
    return "Unknown";
}

///
/// Exception thrown by every fallible operation in the library. The kind
/// tag lets callers (and the CLI exit-code mapping) branch without parsing
/// messages.
///
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          m_kind(kind)
    {
    }

    ErrorKind kind() const noexcept
    {
        return m_kind;
    }

private:
    ErrorKind m_kind;
};

} // namespace mri

#endif /* MRI_TYPES_HPP */
