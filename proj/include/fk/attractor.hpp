#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fk/dynamics.hpp"
#include "fk/model.hpp"
#include "fk/rng.hpp"

namespace fk {

struct TooFewPoints : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One projected sample on the cylinder S^1 x R: x = u_j mod 1,
// pspace = u_{j+1} - u_j. Points sharing (orbit_id, time_index) at
// consecutive sites are successors under the projected shift map.
struct PortraitPoint {
    double x = 0.0;
    double pspace = 0.0;
    std::int64_t orbit_id = 0;
    std::int64_t time_index = 0;
};

struct RetainedConfig {
    std::int64_t orbit_id = 0;
    std::int64_t time_index = 0;
    PeriodicConfiguration config;
};

// Post-burn-in stroboscopic space-time samples of a set of trajectories:
// a finite approximation of the weak omega-limit set. A subsample of full
// configurations is retained so injectivity and crossing checks do not need
// re-simulation.
struct Portrait {
    std::vector<PortraitPoint> points;
    std::vector<RetainedConfig> retained;
    ModelSpec model;
    double burn_in = 0.0;
    std::int64_t samples = 0;
};

// (u_j mod 1, u_{j+1} - u_j).
std::pair<double, double> project(const PeriodicConfiguration& c, std::int64_t j);

Portrait build_portrait(const std::vector<PeriodicConfiguration>& inits, const ModelSpec& spec,
                        const IntegratorSettings& s, double burn_in, std::int64_t samples,
                        std::int64_t retain_every = 10);

// Mean of the lifted first-coordinate increments along one h-orbit segment
// in site order; equals p/q exactly for a full period of a (p,q) state.
double rotation_number(std::span<const PortraitPoint> orbit_segment);

struct CircleVerdict {
    bool is_circle = false;
    double max_gap = 1.0;     // largest circular gap in x
    double max_spread = 0.0;  // largest pspace spread within an x-bin
    std::string reason;
};

// Homotopically non-trivial invariant circle test: coverage (no circular
// gap in x above gap_tol) plus the graph property (single-valued pspace
// over each x-bin within graph_tol). Needs >= 100 points.
CircleVerdict kam_circle_detect(std::span<const PortraitPoint> pts, double gap_tol = 0.02,
                                double graph_tol = 0.01);

enum class Phase { pinned, depinned };

// Histogram of x over `bins` bins across all points; depinned iff every bin
// is nonempty (the circle projection of the sampled set is onto).
Phase depinned_classify(const Portrait& portrait, Rational rho, std::int64_t bins = 100);

struct InjectivityWitness {
    RetainedConfig a;
    RetainedConfig b;
    double pi_distance = 0.0;
    double config_distance = 0.0;
};

// Any two retained configurations closer than pi_tol in both projected
// coordinates must be closer than config_tol in sup norm modulo integer
// shifts; returns the first violating pair.
std::optional<InjectivityWitness> injectivity_check(const Portrait& portrait, double pi_tol = 1e-6,
                                                    double config_tol = 1e-3);

struct CrossingWitness {
    RetainedConfig a;
    RetainedConfig b;
    std::int64_t crossings = 0;
};

// Depinned attractor samples may cross each other at most once; checks
// sampled pairs (plus small random translates of the second member).
std::optional<CrossingWitness> at_most_one_crossing_check(const Portrait& portrait,
                                                          std::int64_t max_pairs = 1000,
                                                          CounterRng rng = CounterRng(7));

}  // namespace fk
