#pragma once

#include <stdexcept>
#include <string>

namespace pfchan {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PFCHAN_DEFINE_ERROR(Name)                                             \
    class Name : public Error {                                               \
    public:                                                                    \
        using Error::Error;                                                    \
    }

PFCHAN_DEFINE_ERROR(NotHermitian);
PFCHAN_DEFINE_ERROR(NotPSD);
PFCHAN_DEFINE_ERROR(NotTracePreserving);
PFCHAN_DEFINE_ERROR(NotCorrelation);
PFCHAN_DEFINE_ERROR(ChoiNotReal);
PFCHAN_DEFINE_ERROR(DimensionMismatch);
PFCHAN_DEFINE_ERROR(DimensionTooLarge);
PFCHAN_DEFINE_ERROR(WrongRank);
PFCHAN_DEFINE_ERROR(WrongSize);
PFCHAN_DEFINE_ERROR(LambdaOutOfRange);
PFCHAN_DEFINE_ERROR(InvalidWitness);
PFCHAN_DEFINE_ERROR(FrameNotResolution);
PFCHAN_DEFINE_ERROR(FrameNotInCone);
PFCHAN_DEFINE_ERROR(NotUnitVector);
PFCHAN_DEFINE_ERROR(ZeroVector);
PFCHAN_DEFINE_ERROR(TooManyVectors);
PFCHAN_DEFINE_ERROR(ParseError);

/// A condition that the theory guarantees cannot occur; indicates a bug.
PFCHAN_DEFINE_ERROR(InvariantViolation);

#undef PFCHAN_DEFINE_ERROR

} // namespace pfchan
