#pragma once

#include <stdexcept>
#include <string>

namespace hecke {

// Validation failures map to CLI exit code 2, numeric failures to 3.
struct HeckeError : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual bool numeric() const { return false; }
};

struct NumericError : HeckeError {
    using HeckeError::HeckeError;
    bool numeric() const override { return true; }
};

#define HECKE_ERROR(Name, Base)                                   \
    struct Name : Base {                                          \
        explicit Name(const std::string& m) : Base(#Name ": " + m) {} \
    };

HECKE_ERROR(DegenerateMatrix, HeckeError)
HECKE_ERROR(NotHyperbolic, HeckeError)
HECKE_ERROR(NotFuchsian, HeckeError)
HECKE_ERROR(NotUnitary, HeckeError)
HECKE_ERROR(RelationViolated, HeckeError)
HECKE_ERROR(GroupMismatch, HeckeError)
HECKE_ERROR(NotAPole, HeckeError)
HECKE_ERROR(QNotDefined, HeckeError)
HECKE_ERROR(QEvenUnsupported, HeckeError)
HECKE_ERROR(OutOfRegion, HeckeError)
HECKE_ERROR(DomainError, HeckeError)

HECKE_ERROR(BranchViolation, NumericError)
HECKE_ERROR(BudgetExceeded, NumericError)
HECKE_ERROR(PoleAt1, NumericError)
HECKE_ERROR(PoleHit, NumericError)
HECKE_ERROR(ContractionViolated, NumericError)
HECKE_ERROR(SpectralRadiusExceeded, NumericError)
HECKE_ERROR(DiscSearchFailed, NumericError)
HECKE_ERROR(UnresolvedBox, NumericError)

#undef HECKE_ERROR

}  // namespace hecke
