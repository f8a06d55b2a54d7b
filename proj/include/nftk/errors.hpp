#pragma once

#include <stdexcept>
#include <string>

namespace nftk {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed containers, out-of-contract arguments.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The inputs were acceptable but the computation could not deliver.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define NFTK_DECLARE_ERROR(Name, Base) \
    class Name : public Base {         \
    public:                            \
        using Base::Base;              \
    }

NFTK_DECLARE_ERROR(DegenerateSpectrumError, ValidationError);
NFTK_DECLARE_ERROR(DegenerateSigmaError, ValidationError);
NFTK_DECLARE_ERROR(GridMismatchError, ValidationError);
NFTK_DECLARE_ERROR(HalfPlaneError, ValidationError);
NFTK_DECLARE_ERROR(StripError, ValidationError);
NFTK_DECLARE_ERROR(IllPosedError, ValidationError);
NFTK_DECLARE_ERROR(PoleError, NumericalError);
NFTK_DECLARE_ERROR(OverflowError, NumericalError);
NFTK_DECLARE_ERROR(NoConvergenceError, NumericalError);
NFTK_DECLARE_ERROR(DivisionError, NumericalError);
NFTK_DECLARE_ERROR(GridTooNarrowError, NumericalError);
NFTK_DECLARE_ERROR(EdgeDecayError, NumericalError);
NFTK_DECLARE_ERROR(SupercriticalError, NumericalError);
NFTK_DECLARE_ERROR(PhaseJumpError, NumericalError);
NFTK_DECLARE_ERROR(BranchAmbiguityError, NumericalError);

#undef NFTK_DECLARE_ERROR

}  // namespace nftk
