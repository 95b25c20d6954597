#pragma once

#include <cassert>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace clm {

enum class FaultKind {
    loop_defect,
    degenerate_dyad,
    branch_discontinuity,
    no_valid_pair,
    zero_stance_length,
    length_mismatch,
    insufficient_clearance,
    out_of_range,
    coupling_no_root,
    imaginary_branch,
    infeasible_incumbent,
    no_feasible_individual,
    empty_archive,
    degenerate_front,
    target_unreached,
};

/// A recoverable kinematic/numeric failure. `angle` carries the offending
/// crank angle when one exists.
struct Fault {
    FaultKind kind = FaultKind::loop_defect;
    double angle = std::nan("");

    const char* name() const {
        switch (kind) {
            case FaultKind::loop_defect: return "LoopDefect";
            case FaultKind::degenerate_dyad: return "DegenerateDyad";
            case FaultKind::branch_discontinuity: return "BranchDiscontinuity";
            case FaultKind::no_valid_pair: return "NoValidPair";
            case FaultKind::zero_stance_length: return "ZeroStanceLength";
            case FaultKind::length_mismatch: return "LengthMismatch";
            case FaultKind::insufficient_clearance: return "InsufficientClearance";
            case FaultKind::out_of_range: return "OutOfRange";
            case FaultKind::coupling_no_root: return "NoRoot";
            case FaultKind::imaginary_branch: return "ImaginaryBranch";
            case FaultKind::infeasible_incumbent: return "InfeasibleIncumbent";
            case FaultKind::no_feasible_individual: return "NoFeasibleIndividual";
            case FaultKind::empty_archive: return "EmptyArchive";
            case FaultKind::degenerate_front: return "DegenerateFront";
            case FaultKind::target_unreached: return "TargetUnreached";
        }
        return "Fault";
    }

    std::string describe() const {
        std::string s = name();
        if (!std::isnan(angle)) s += " at crank angle " + std::to_string(angle);
        return s;
    }
};

/// Value-or-fault result. Kinematic failures are expected outcomes during
/// optimization, so they travel as values, not exceptions.
template <typename T>
class Fallible {
public:
    Fallible(T v) : value_(std::move(v)) {}
    Fallible(Fault f) : fault_(f) {}
    Fallible(FaultKind k) : fault_(Fault{k}) {}

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }

    const T& value() const { assert(ok()); return *value_; }
    T& value() { assert(ok()); return *value_; }
    const T& operator*() const { return value(); }
    T& operator*() { return value(); }
    const T* operator->() const { return &value(); }
    T* operator->() { return &value(); }

    const Fault& fault() const { assert(!ok()); return fault_; }

private:
    std::optional<T> value_;
    Fault fault_{};
};

}  // namespace clm
