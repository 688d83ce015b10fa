#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fk/model.hpp"
#include "fk/rational.hpp"

namespace fk {

struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientSpan : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorSettings {
    double dt_max = 0.05;
    double error_tol = 1e-8;
    double t_burn = 200.0;
    double t_measure = 2000.0;
    double strobe_period = 1.0;
};

// Settings with the strobe pinned to the forcing period in the AC case.
IntegratorSettings settings_for(const ModelSpec& spec);

// Advances `base` in place from t0 to t1 with an embedded Dormand-Prince
// 5(4) pair; local error per step kept below error_tol. Throws
// StepSizeUnderflow if adaptive control drives dt below 1e-12.
void flow(std::vector<double>& base, std::int64_t winding, double t0, double t1,
          const ModelSpec& spec, const IntegratorSettings& s);

// Stroboscopic samples at multiples of the strobe over [0, t_span],
// including t = 0. The flow preserves the periodicity class (p,q) exactly.
TrajectorySample integrate(const PeriodicConfiguration& c0, const ModelSpec& spec,
                           const IntegratorSettings& s, double t_span);

struct VelocityEstimate {
    double v = 0.0;
    double confidence_halfwidth = 0.0;
    bool converged = false;
};

// v = (u_0(t_burn + t_measure) - u_0(t_burn)) / t_measure on the continuous
// lift. The halfwidth is the disagreement of the two half-window averages
// plus an integration-error floor; converged means the halfwidth is small.
VelocityEstimate average_velocity(const PeriodicConfiguration& c0, const ModelSpec& spec,
                                  const IntegratorSettings& s);

// Mobility decision for one force level, with adaptive extension of the
// measuring window near the threshold. Used by the depinning bisection.
struct MobilityDecision {
    VelocityEstimate estimate;
    bool sliding = false;
};
MobilityDecision classify_mobility(const PeriodicConfiguration& c0, const ModelSpec& spec,
                                   IntegratorSettings s, double v_threshold);

// Bisection on F_DC for the force where the measured velocity crosses
// v_threshold. Initial condition at each level is the uniform configuration;
// subsequent levels warm-start from the previous final state.
double depinning_force_dynamic(const ModelSpec& spec_template, Rational rho, double f_lo,
                               double f_hi, double v_threshold, double tol,
                               const IntegratorSettings& s, std::int64_t q_hint = 0);

struct SyncShift {
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::int64_t s = 0;  // offset in strobe samples
};

struct SyncViolation {
    SyncShift shift;
    std::int64_t site = 0;
    double time = 0.0;
};

struct SyncResult {
    bool synchronized = true;
    std::vector<SyncViolation> witnesses;
};

// Counts intersections between u(t) and S_{m,n} u(t+s) at every sampled t
// for each shift; synchronized iff every count is zero. Throws
// InsufficientSpan when s exceeds the trajectory coverage.
SyncResult synchronization_check(const TrajectorySample& traj, const std::vector<SyncShift>& shifts,
                                 double tol = 1e-9);

}  // namespace fk
