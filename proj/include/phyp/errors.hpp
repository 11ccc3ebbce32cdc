#pragma once

#include <stdexcept>
#include <string>

namespace phyp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

#define PHYP_DEFINE_ERROR(Name)            \
    class Name : public Error              \
    {                                      \
    public:                                \
        using Error::Error;                \
    };

// Structural hypotheses on A(u) and F(u).
PHYP_DEFINE_ERROR(HyperbolicityError)
PHYP_DEFINE_ERROR(SignatureError)
PHYP_DEFINE_ERROR(SourceOriginError)
PHYP_DEFINE_ERROR(DegenerateEigenbasisError)
PHYP_DEFINE_ERROR(DominanceError)
PHYP_DEFINE_ERROR(DomainError)

// Boundary maps and forcing.
PHYP_DEFINE_ERROR(BoundaryMapError)
PHYP_DEFINE_ERROR(PeriodicityError)
PHYP_DEFINE_ERROR(DissipativityError)

// Solvers.
PHYP_DEFINE_ERROR(ConvergenceError)
PHYP_DEFINE_ERROR(NonContractionError)
PHYP_DEFINE_ERROR(StepSizeError)

// Front end.
PHYP_DEFINE_ERROR(ConfigError)

#undef PHYP_DEFINE_ERROR

class IoError : public Error
{
public:
    IoError(const std::string& path, const std::string& what)
        : Error("I/O error on '" + path + "': " + what), path_(path)
    {
    }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace phyp
