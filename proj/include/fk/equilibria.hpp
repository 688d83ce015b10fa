#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fk/model.hpp"
#include "fk/rational.hpp"
#include "fk/rng.hpp"

namespace fk {

struct NewtonDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Newton iteration on the q-dimensional stationarity residual
// G_j(u) = rhs_force(u, j) (the tilted-energy gradient, DC only).
// Converges to max|G| <= 1e-12 or returns nullopt after 50 iterations.
std::optional<PeriodicConfiguration> find_stationary_opt(const ModelSpec& spec,
                                                         const PeriodicConfiguration& seed,
                                                         int max_iter = 50, double tol = 1e-12);

// Throwing variant; the seed fixes the (p,q) type.
PeriodicConfiguration find_stationary(const ModelSpec& spec, const PeriodicConfiguration& seed);

// Multistart search over every type (p,q) with 1 <= q <= q_max and
// 0 <= p <= q, including non-reduced types: librational states around an
// elliptic (p0,q0) cycle have type (m p0, m q0) and carry the nondegenerate
// bands. Seeds: the uniform state, structured wave seeds, plus
// seeds_per_type random bounded-width seeds; results are deduplicated
// modulo S_{m,n} translates (positional tolerance 1e-8). Disordered and
// unstable solutions are deliberately retained.
std::vector<PeriodicConfiguration> enumerate_stationary(const ModelSpec& spec, std::int64_t q_max,
                                                        int seeds_per_type, CounterRng rng);

// Rotation band of a stationary periodic configuration, from the strict
// conventions: ceil*(x) is the smallest integer larger than x and
// floor*(x) the largest integer smaller than x (so ceil*(2) = 3).
//   r- = min_{j,k} ceil*(u_{j+k} - u_j) / k,  r+ = max_{j,k} floor*(...) / k.
// Returns nullopt when r- > r+. boundary_flagged marks position differences
// within 1e-9 of an integer (strict convention applied, not rounded away).
struct RotationBand {
    Rational lo;
    Rational hi;
    bool boundary_flagged = false;
};
std::optional<RotationBand> rotation_band(const PeriodicConfiguration& u);

// Union of the nonempty rotation bands over all discovered stationary
// configurations, merged as closed intervals. Membership is exact.
struct PinnedSet {
    std::vector<std::pair<Rational, Rational>> intervals;
    std::int64_t q_max = 0;
    double f_dc = 0.0;

    bool contains(Rational rho) const;
};

PinnedSet pinned_set(const ModelSpec& spec, std::int64_t q_max, int seeds_per_type = 8,
                     CounterRng rng = CounterRng(1));

// Bisection over F_DC of the predicate rho in pinned_set(F_DC, q_max).
double depinning_force_bands(const ModelSpec& spec_template, Rational rho, std::int64_t q_max,
                             double tol, int seeds_per_type = 8, CounterRng rng = CounterRng(1));

enum class StabilityTag { stable, unstable, fold };

// Sign of the leading Jacobian eigenvalue of the gradient flow at c.
StabilityTag classify_stability(const PeriodicConfiguration& c, const ModelSpec& spec);

// A stationary family continued over F_DC values (warm-started Newton);
// stops where Newton first fails (fold / loss of existence).
struct StationaryBranch {
    std::int64_t p = 0;
    std::int64_t q = 1;
    std::vector<double> f_values;
    std::vector<PeriodicConfiguration> configurations;
    std::vector<StabilityTag> stability;
};

StationaryBranch trace_branch(const ModelSpec& spec_template, const PeriodicConfiguration& seed,
                              const std::vector<double>& f_values);

}  // namespace fk
