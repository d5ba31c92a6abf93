#pragma once

#include <stdexcept>
#include <string>

namespace lf {

enum class Errc {
    ZeroDenominator,
    PoleAtSubstitution,
    UnknownGenerator,
    GradingViolation,
    InhomogeneousInput,
    NotFreelyGenerated,
    NotSemisimpleAmbiguity,
    NotGood,
    NotAdapted,
    DegenerateForm,
    DegeneratePairing,
    CriticalLevel,
    BadPolarization,
    NoSolution,
    InsufficientGenerators,
    NotDivisibleByEpsilon,
    UnsupportedBound,
    ParseError,
    ValidationError,
    BadArgument,
};

const char* errc_name(Errc c);

struct Error : std::runtime_error {
    Errc code;
    Error(Errc c, const std::string& msg)
        : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code(c) {}
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

} // namespace lf
