#pragma once

#include <stdexcept>
#include <string>

namespace arstat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ARSTAT_DEFINE_ERROR(Name)            \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

ARSTAT_DEFINE_ERROR(InvalidSpec);
ARSTAT_DEFINE_ERROR(ModeOutOfRange);
ARSTAT_DEFINE_ERROR(DomainError);
ARSTAT_DEFINE_ERROR(TruncationError);
ARSTAT_DEFINE_ERROR(TailError);
ARSTAT_DEFINE_ERROR(CapError);
ARSTAT_DEFINE_ERROR(StepError);
ARSTAT_DEFINE_ERROR(FitError);
ARSTAT_DEFINE_ERROR(GridError);
ARSTAT_DEFINE_ERROR(SizeError);
ARSTAT_DEFINE_ERROR(ConfigError);

#undef ARSTAT_DEFINE_ERROR

}  // namespace arstat
