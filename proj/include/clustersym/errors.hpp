#pragma once

#include <stdexcept>
#include <string>

namespace clustersym {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CLUSTERSYM_DEFINE_ERROR(Name)          \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

// relations
CLUSTERSYM_DEFINE_ERROR(NonMonotoneInput);
CLUSTERSYM_DEFINE_ERROR(InvalidRelation);
CLUSTERSYM_DEFINE_ERROR(InvalidFunction);
CLUSTERSYM_DEFINE_ERROR(NoSolution);

// network / symmetry
CLUSTERSYM_DEFINE_ERROR(InvalidNetwork);
CLUSTERSYM_DEFINE_ERROR(NotAnAutomorphism);
CLUSTERSYM_DEFINE_ERROR(DimensionMismatch);
CLUSTERSYM_DEFINE_ERROR(TooLarge);
CLUSTERSYM_DEFINE_ERROR(ParseError);
CLUSTERSYM_DEFINE_ERROR(InvalidOptions);

// steady state
CLUSTERSYM_DEFINE_ERROR(Infeasible);
CLUSTERSYM_DEFINE_ERROR(DualityGap);

// simulator
CLUSTERSYM_DEFINE_ERROR(MissingModel);
CLUSTERSYM_DEFINE_ERROR(AlgebraicLoopDiverged);
CLUSTERSYM_DEFINE_ERROR(NonFiniteState);
CLUSTERSYM_DEFINE_ERROR(NotStationary);

// synthesis
CLUSTERSYM_DEFINE_ERROR(DegenerateTargets);
CLUSTERSYM_DEFINE_ERROR(RelationNotInvertible);

#undef CLUSTERSYM_DEFINE_ERROR

}  // namespace clustersym
