#pragma once

#include <stdexcept>
#include <string>

namespace exodyn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define EXODYN_DEFINE_ERROR(NAME)                                            \
    struct NAME : Error {                                                    \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {}   \
    }

EXODYN_DEFINE_ERROR(DimensionMismatch);
EXODYN_DEFINE_ERROR(NonFiniteValue);
EXODYN_DEFINE_ERROR(EmptyInput);
EXODYN_DEFINE_ERROR(TooFewSamples);
EXODYN_DEFINE_ERROR(TooFewRows);
EXODYN_DEFINE_ERROR(TooShort);
EXODYN_DEFINE_ERROR(MixedTasks);
EXODYN_DEFINE_ERROR(KTooLarge);
EXODYN_DEFINE_ERROR(NonConvergence);
EXODYN_DEFINE_ERROR(NotPositiveDefinite);
EXODYN_DEFINE_ERROR(DegenerateData);
EXODYN_DEFINE_ERROR(DegenerateTarget);
EXODYN_DEFINE_ERROR(MissingTask);
EXODYN_DEFINE_ERROR(MissingEntries);
EXODYN_DEFINE_ERROR(SchemaError);
EXODYN_DEFINE_ERROR(InvalidArchetype);
EXODYN_DEFINE_ERROR(IoFailure);
EXODYN_DEFINE_ERROR(UnsupportedOperation);
EXODYN_DEFINE_ERROR(CapExceeded);

#undef EXODYN_DEFINE_ERROR

}  // namespace exodyn
