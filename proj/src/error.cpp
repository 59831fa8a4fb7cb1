#include "wavemap/error.hpp"

namespace wavemap {

const char* status_name(Status s) {
    switch (s) {
    case Status::Ok: return "Ok";
    case Status::Internal: return "Internal";
    case Status::ConfigError: return "ConfigError";
    case Status::CompatibilityError: return "CompatibilityError";
    case Status::DistanceExceeded: return "DistanceExceeded";
    case Status::CausalityViolated: return "CausalityViolated";
    case Status::OutsideDomain: return "OutsideDomain";
    case Status::DeltaTooLarge: return "DeltaTooLarge";
    case Status::RegionMismatch: return "RegionMismatch";
    case Status::DataCoverage: return "DataCoverage";
    case Status::OffLattice: return "OffLattice";
    case Status::TestFunctionSupport: return "TestFunctionSupport";
    case Status::LatticeMismatch: return "LatticeMismatch";
    case Status::MissingProvenance: return "MissingProvenance";
    case Status::BudgetInfeasible: return "BudgetInfeasible";
    case Status::SmallnessViolated: return "SmallnessViolated";
    case Status::NoConvergence: return "NoConvergence";
    case Status::DegenerateHeight: return "DegenerateHeight";
    case Status::OverlapMismatch: return "OverlapMismatch";
    case Status::StallDetected: return "StallDetected";
    case Status::TailNotSmall: return "TailNotSmall";
    case Status::TailMass: return "TailMass";
    case Status::IoError: return "IoError";
    }
    return "Unknown";
}

void fail(Status s, const std::string& msg) { throw Error(s, msg); }

} // namespace wavemap
