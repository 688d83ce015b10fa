#include "fk/attractor.hpp"

#include <algorithm>
#include <cmath>

#include "fk/intersect.hpp"

namespace fk {

namespace {

double wrap_unit(double x) {
    const double f = x - std::floor(x);
    return f < 1.0 ? f : 0.0;
}

double circle_distance(double a, double b) {
    const double d = std::abs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

}  // namespace

std::pair<double, double> project(const PeriodicConfiguration& c, std::int64_t j) {
    return {wrap_unit(c.u(j)), c.u(j + 1) - c.u(j)};
}

Portrait build_portrait(const std::vector<PeriodicConfiguration>& inits, const ModelSpec& spec,
                        const IntegratorSettings& s, double burn_in, std::int64_t samples,
                        std::int64_t retain_every) {
    Portrait out;
    out.model = spec;
    out.burn_in = burn_in;
    out.samples = samples;
    for (std::size_t i = 0; i < inits.size(); ++i) {
        PeriodicConfiguration state = inits[i];
        flow(state.base, state.winding, 0.0, burn_in, spec, s);
        double t = burn_in;
        for (std::int64_t sample = 0; sample < samples; ++sample) {
            if (sample > 0) {
                flow(state.base, state.winding, t, t + s.strobe_period, spec, s);
                t += s.strobe_period;
            }
            for (std::int64_t j = 0; j < state.q(); ++j) {
                const auto [x, p] = project(state, j);
                out.points.push_back({x, p, static_cast<std::int64_t>(i), sample});
            }
            if (retain_every > 0 && sample % retain_every == 0) {
                out.retained.push_back({static_cast<std::int64_t>(i), sample, state});
            }
        }
    }
    return out;
}

double rotation_number(std::span<const PortraitPoint> orbit_segment) {
    if (orbit_segment.size() < 2) {
        throw TooFewPoints("rotation number needs at least two orbit points");
    }
    double acc = 0.0;
    for (const PortraitPoint& pt : orbit_segment) acc += pt.pspace;
    return acc / static_cast<double>(orbit_segment.size());
}

CircleVerdict kam_circle_detect(std::span<const PortraitPoint> pts, double gap_tol,
                                double graph_tol) {
    if (pts.size() < 100) throw TooFewPoints("circle detection needs at least 100 points");
    CircleVerdict verdict;

    std::vector<std::pair<double, double>> xp;
    xp.reserve(pts.size());
    for (const PortraitPoint& pt : pts) xp.emplace_back(wrap_unit(pt.x), pt.pspace);
    std::sort(xp.begin(), xp.end());

    verdict.max_gap = 0.0;
    for (std::size_t i = 1; i < xp.size(); ++i) {
        verdict.max_gap = std::max(verdict.max_gap, xp[i].first - xp[i - 1].first);
    }
    verdict.max_gap = std::max(verdict.max_gap, 1.0 - xp.back().first + xp.front().first);

    const auto bins = static_cast<std::size_t>(std::ceil(1.0 / gap_tol));
    std::vector<double> lo(bins, 0.0), hi(bins, 0.0);
    std::vector<bool> seen(bins, false);
    for (const auto& [x, p] : xp) {
        auto b = static_cast<std::size_t>(x * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        if (!seen[b]) {
            lo[b] = hi[b] = p;
            seen[b] = true;
        } else {
            lo[b] = std::min(lo[b], p);
            hi[b] = std::max(hi[b], p);
        }
    }
    verdict.max_spread = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (seen[b]) verdict.max_spread = std::max(verdict.max_spread, hi[b] - lo[b]);
    }

    if (verdict.max_gap >= gap_tol) {
        verdict.reason = "coverage gap " + std::to_string(verdict.max_gap);
    } else if (verdict.max_spread >= graph_tol) {
        verdict.reason = "multivalued over an x-bin, spread " + std::to_string(verdict.max_spread);
    } else {
        verdict.is_circle = true;
    }
    return verdict;
}

Phase depinned_classify(const Portrait& portrait, Rational rho, std::int64_t bins) {
    (void)rho;  // the caller guarantees the sampling mean spacing
    std::vector<bool> hit(static_cast<std::size_t>(bins), false);
    for (const PortraitPoint& pt : portrait.points) {
        auto b = static_cast<std::int64_t>(wrap_unit(pt.x) * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        hit[static_cast<std::size_t>(b)] = true;
    }
    for (const bool h : hit) {
        if (!h) return Phase::pinned;
    }
    return Phase::depinned;
}

namespace {

// Sup distance over one common period, modulo the integer shift matched at
// site 0.
double config_distance_mod1(const PeriodicConfiguration& a, const PeriodicConfiguration& b) {
    const std::int64_t L = std::lcm(a.q(), b.q());
    const double off = std::round(b.u(0) - a.u(0));
    double worst = 0.0;
    for (std::int64_t j = 0; j < L; ++j) {
        worst = std::max(worst, std::abs(a.u(j) + off - b.u(j)));
    }
    return worst;
}

}  // namespace

std::optional<InjectivityWitness> injectivity_check(const Portrait& portrait, double pi_tol,
                                                    double config_tol) {
    const auto& rc = portrait.retained;
    for (std::size_t i = 0; i < rc.size(); ++i) {
        for (std::size_t k = i + 1; k < rc.size(); ++k) {
            const auto [xa, pa] = project(rc[i].config, 0);
            const auto [xb, pb] = project(rc[k].config, 0);
            const double dx = circle_distance(xa, xb);
            const double dp = std::abs(pa - pb);
            if (dx < pi_tol && dp < pi_tol) {
                const double dist = config_distance_mod1(rc[i].config, rc[k].config);
                if (dist >= config_tol) {
                    return InjectivityWitness{rc[i], rc[k], std::max(dx, dp), dist};
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<CrossingWitness> at_most_one_crossing_check(const Portrait& portrait,
                                                          std::int64_t max_pairs, CounterRng rng) {
    const auto& rc = portrait.retained;
    if (rc.size() < 2) return std::nullopt;
    for (std::int64_t it = 0; it < max_pairs; ++it) {
        const auto i = static_cast<std::size_t>(rng.next_below(rc.size()));
        auto k = static_cast<std::size_t>(rng.next_below(rc.size()));
        if (i == k) k = (k + 1) % rc.size();
        const PeriodicConfiguration& u = rc[i].config;
        if (mean_spacing(u) != mean_spacing(rc[k].config)) continue;
        const auto m = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(rc[k].config.q())));
        // Offsets near round(m rho) are the only ones close enough to cross.
        const auto center = static_cast<std::int64_t>(
            std::llround(static_cast<double>(m) * mean_spacing(u).value()));
        const std::int64_t n = center + static_cast<std::int64_t>(rng.next_below(5)) - 2;
        const PeriodicConfiguration v = translate(rc[k].config, m, n);
        const IntersectionReport rep = count_intersections(u, v);
        if (rep.identical) continue;
        if (rep.count > 1) return CrossingWitness{rc[i], rc[k], rep.count};
    }
    return std::nullopt;
}

}  // namespace fk
