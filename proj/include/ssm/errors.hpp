#pragma once
#include <stdexcept>
#include <string>

namespace ssm {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

#define SSM_DEFINE_ERROR(name)                          \
    class name : public Error                           \
    {                                                   \
    public:                                             \
        explicit name(const std::string& what)          \
            : Error(#name ": " + what) {}               \
    };

SSM_DEFINE_ERROR(InvalidArgumentError)
SSM_DEFINE_ERROR(DegenerateRankError)
SSM_DEFINE_ERROR(NotPositiveDefiniteError)
SSM_DEFINE_ERROR(NullSpaceEmptyError)
SSM_DEFINE_ERROR(ZeroColumnError)
SSM_DEFINE_ERROR(BudgetError)
SSM_DEFINE_ERROR(DimensionMismatchError)
SSM_DEFINE_ERROR(EmptyDatasetError)
SSM_DEFINE_ERROR(FormatError)

#undef SSM_DEFINE_ERROR

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidArgumentError(what);
}

} // namespace ssm
