#pragma once

#include <stdexcept>
#include <string>

namespace gapspec {

// Base of every library failure. name() is the stable identifier used by the
// CLI when it reports a numerical error.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define GAPSPEC_ERROR(Type)                                                   \
    class Type : public Error {                                               \
    public:                                                                   \
        explicit Type(const std::string& what) : Error(#Type, what) {}        \
    }

GAPSPEC_ERROR(DomainError);
GAPSPEC_ERROR(QuadratureNotConverged);
GAPSPEC_ERROR(BoundOutOfRange);
GAPSPEC_ERROR(SeriesRadiusExceeded);
GAPSPEC_ERROR(StepSizeUnderflow);
GAPSPEC_ERROR(TailNotAsymptotic);
GAPSPEC_ERROR(FitUnreliable);
GAPSPEC_ERROR(VolterraDiverged);
GAPSPEC_ERROR(InconsistentCertificate);
GAPSPEC_ERROR(EigenvalueMissing);
GAPSPEC_ERROR(NoEigenmode);
GAPSPEC_ERROR(CFLViolation);
GAPSPEC_ERROR(TooFewSamples);

#undef GAPSPEC_ERROR

}  // namespace gapspec
