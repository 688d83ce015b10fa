#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fk/dynamics.hpp"
#include "fk/model.hpp"
#include "fk/rational.hpp"

namespace fk {

struct InsertionsTooDense : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// extra = +1 squeezes an extra particle in after `site`; -1 removes `site`.
struct Insertion {
    std::int64_t site = 0;
    int extra = +1;
};

struct DefectedInitializer {
    Rational background_rho{0, 1};
    std::vector<Insertion> insertions;
    PeriodicConfiguration configuration;
    std::int64_t defect_count_brute = 0;  // independently brute-forced
    std::int64_t n_window = 0;            // translate window used by the count
};

// Builds a uniform rho background over q_total sites, applies the
// insertions (separated by >= 2 sites), and relaxes briefly under the
// undriven gradient flow so the defects are smooth but not annihilated.
DefectedInitializer make_defected(Rational rho, const std::vector<Insertion>& insertions,
                                  std::int64_t q_total, const ModelSpec& spec);

enum class RelaxOutcome { synchronized, unresolved };

struct RelaxReport {
    RelaxOutcome outcome = RelaxOutcome::unresolved;
    std::vector<SyncViolation> witnesses;
    // Max crossing count against a panel of own translates at each sampled
    // time along the relaxation.
    std::vector<double> trend_times;
    std::vector<std::int64_t> crossing_trend;
    bool trend_nonincreasing = true;
};

// Integrates past burn-in (DC only), tracking the translate-crossing trend,
// then runs the synchronization check on the sampled tail. "Unresolved" is
// a first-class outcome: the pinned-phase approach can be slower than any
// fixed budget.
RelaxReport defect_relaxation_test(const PeriodicConfiguration& c0, const ModelSpec& spec,
                                   const IntegratorSettings& s);

}  // namespace fk
