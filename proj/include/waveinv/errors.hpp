#pragma once

#include <stdexcept>
#include <string>

namespace waveinv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define WAVEINV_ERROR_TYPE(Name)                  \
    struct Name : Error {                         \
        using Error::Error;                       \
    }

// wave_core
WAVEINV_ERROR_TYPE(CflViolation);
WAVEINV_ERROR_TYPE(ShapeMismatch);
WAVEINV_ERROR_TYPE(NonFiniteValue);
WAVEINV_ERROR_TYPE(OrderTooHigh);
WAVEINV_ERROR_TYPE(CompatibilityViolation);

// semilinear_forward
WAVEINV_ERROR_TYPE(NonContraction);

// probes
WAVEINV_ERROR_TYPE(InvalidWidth);
WAVEINV_ERROR_TYPE(UnderResolved);
WAVEINV_ERROR_TYPE(GeometryViolation);

// findiff
WAVEINV_ERROR_TYPE(EvaluatorFailure);
WAVEINV_ERROR_TYPE(SizeMismatch);

// radon
WAVEINV_ERROR_TYPE(DimensionUnsupported);
WAVEINV_ERROR_TYPE(BetaTooSmall);
WAVEINV_ERROR_TYPE(InsufficientAngles);

// inversion
WAVEINV_ERROR_TYPE(TauBelowOne);
WAVEINV_ERROR_TYPE(DeltaOutOfRange);
WAVEINV_ERROR_TYPE(OutOfPlateau);
WAVEINV_ERROR_TYPE(InvalidSweep);

// cli_harness
WAVEINV_ERROR_TYPE(EmptySeries);
WAVEINV_ERROR_TYPE(ConfigError);
WAVEINV_ERROR_TYPE(IoError);

#undef WAVEINV_ERROR_TYPE

}  // namespace waveinv
