#ifndef WAVEMAP_ERROR_HPP
#define WAVEMAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace wavemap {

// Numeric values are shared with the C API (wavemap.h) and the CLI exit codes.
enum class Status : int {
    Ok = 0,
    Internal = 1,
    ConfigError = 2,
    CompatibilityError = 3,
    DistanceExceeded = 4,
    CausalityViolated = 5,
    OutsideDomain = 6,
    DeltaTooLarge = 7,
    RegionMismatch = 8,
    DataCoverage = 9,
    OffLattice = 10,
    TestFunctionSupport = 11,
    LatticeMismatch = 12,
    MissingProvenance = 13,
    BudgetInfeasible = 14,
    SmallnessViolated = 15,
    NoConvergence = 16,
    DegenerateHeight = 17,
    OverlapMismatch = 18,
    StallDetected = 19,
    TailNotSmall = 20,
    TailMass = 21,
    IoError = 22,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
public:
    Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
    Status status() const { return status_; }

private:
    Status status_;
};

[[noreturn]] void fail(Status s, const std::string& msg);

} // namespace wavemap

#endif
