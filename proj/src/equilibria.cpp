#include "fk/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fk/dynamics.hpp"

namespace fk {

namespace {

// Dense LU solve with partial pivoting; the Jacobian is q x q with q small
// (q_max defaults to 34) and indefinite at saddles, so pivoting matters more
// than band structure.
bool lu_solve(std::vector<double>& a, std::vector<double>& b, std::int64_t n) {
    for (std::int64_t col = 0; col < n; ++col) {
        std::int64_t piv = col;
        double best = std::abs(a[static_cast<std::size_t>(col * n + col)]);
        for (std::int64_t r = col + 1; r < n; ++r) {
            const double cand = std::abs(a[static_cast<std::size_t>(r * n + col)]);
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best < 1e-14) return false;
        if (piv != col) {
            for (std::int64_t c = 0; c < n; ++c) {
                std::swap(a[static_cast<std::size_t>(col * n + c)],
                          a[static_cast<std::size_t>(piv * n + c)]);
            }
            std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        }
        const double inv = 1.0 / a[static_cast<std::size_t>(col * n + col)];
        for (std::int64_t r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r * n + col)] * inv;
            if (f == 0.0) continue;
            a[static_cast<std::size_t>(r * n + col)] = 0.0;
            for (std::int64_t c = col + 1; c < n; ++c) {
                a[static_cast<std::size_t>(r * n + c)] -= f * a[static_cast<std::size_t>(col * n + c)];
            }
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (std::int64_t r = n; r-- > 0;) {
        double acc = b[static_cast<std::size_t>(r)];
        for (std::int64_t c = r + 1; c < n; ++c) {
            acc -= a[static_cast<std::size_t>(r * n + c)] * b[static_cast<std::size_t>(c)];
        }
        b[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r * n + r)];
    }
    return true;
}

void jacobian(const PeriodicConfiguration& c, const ModelSpec& spec, std::vector<double>& jac) {
    const std::int64_t q = c.q();
    jac.assign(static_cast<std::size_t>(q * q), 0.0);
    for (std::int64_t j = 0; j < q; ++j) {
        const double w_right = spec.Wpp(c.u(j + 1) - c.u(j));
        const double w_left = spec.Wpp(c.u(j) - c.u(j - 1));
        const auto row = static_cast<std::size_t>(j * q);
        jac[row + static_cast<std::size_t>(j)] += -w_right - w_left + spec.Vpp(c.u(j));
        jac[row + static_cast<std::size_t>((j + 1) % q)] += w_right;
        jac[row + static_cast<std::size_t>(((j - 1) % q + q) % q)] += w_left;
    }
}

double residual_norm(const PeriodicConfiguration& c, const ModelSpec& spec,
                     std::vector<double>& g) {
    g.resize(c.base.size());
    rhs_all(c.base, c.winding, 0.0, spec, g);
    double worst = 0.0;
    for (const double v : g) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace

std::optional<PeriodicConfiguration> find_stationary_opt(const ModelSpec& spec,
                                                         const PeriodicConfiguration& seed,
                                                         int max_iter, double tol) {
    if (!spec.forcing.is_dc()) throw ModelError("stationary search requires DC forcing");
    PeriodicConfiguration c = seed;
    const std::int64_t q = c.q();
    std::vector<double> g, jac, step;
    double gnorm = residual_norm(c, spec, g);
    for (int it = 0; it < max_iter; ++it) {
        if (gnorm <= tol) return c;
        jacobian(c, spec, jac);
        step = g;
        if (!lu_solve(jac, step, q)) return std::nullopt;  // singular: fold or bad seed
        // Damped update: halve until the residual improves.
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 8; ++half) {
            PeriodicConfiguration trial = c;
            for (std::int64_t j = 0; j < q; ++j) {
                trial.base[static_cast<std::size_t>(j)] -=
                    lambda * step[static_cast<std::size_t>(j)];
            }
            std::vector<double> gt;
            const double gn = residual_norm(trial, spec, gt);
            if (gn < gnorm || gn <= tol) {
                c = std::move(trial);
                g = std::move(gt);
                gnorm = gn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    return gnorm <= tol ? std::optional<PeriodicConfiguration>(c) : std::nullopt;
}

PeriodicConfiguration find_stationary(const ModelSpec& spec, const PeriodicConfiguration& seed) {
    auto res = find_stationary_opt(spec, seed);
    if (!res) {
        throw NewtonDiverged("Newton did not converge from the given seed (type " +
                             mean_spacing(seed).str() + ")");
    }
    return *res;
}

namespace {

// Translate-invariant distance: min over spatial rotations m and the
// integer offset matching site 0.
double translate_distance(const PeriodicConfiguration& a, const PeriodicConfiguration& b) {
    if (a.q() != b.q() || a.winding != b.winding) return 1e300;
    double best = 1e300;
    for (std::int64_t m = 0; m < a.q(); ++m) {
        const double off = std::round(b.u(0) - a.u(-m));
        double worst = 0.0;
        for (std::int64_t j = 0; j < a.q(); ++j) {
            worst = std::max(worst, std::abs(a.u(j - m) + off - b.u(j)));
        }
        best = std::min(best, worst);
    }
    return best;
}

std::vector<PeriodicConfiguration> seeds_for_type(Rational rho, std::int64_t q,
                                                  int random_seeds, CounterRng& rng) {
    std::vector<PeriodicConfiguration> seeds;
    const double r = rho.value();
    const auto uniform_with = [&](double phase) {
        PeriodicConfiguration c;
        c.winding = rho.num * (q / rho.den);
        c.base.resize(static_cast<std::size_t>(q));
        for (std::int64_t j = 0; j < q; ++j) {
            c.base[static_cast<std::size_t>(j)] = static_cast<double>(j) * r + phase;
        }
        return c;
    };
    seeds.push_back(uniform_with(0.0));
    seeds.push_back(uniform_with(0.5));
    // Wave seeds: slow modulations land in the basins of librational states.
    for (const std::int64_t waves : {std::int64_t{1}, std::int64_t{2}}) {
        if (waves >= q) continue;
        for (const double amp : {0.2, 0.45}) {
            for (const double phase : {0.0, 0.5}) {
                PeriodicConfiguration c = uniform_with(phase);
                for (std::int64_t j = 0; j < q; ++j) {
                    c.base[static_cast<std::size_t>(j)] +=
                        amp * std::sin(2.0 * std::numbers::pi *
                                       (static_cast<double>(waves * j) / static_cast<double>(q)));
                }
                seeds.push_back(std::move(c));
            }
        }
    }
    for (int i = 0; i < random_seeds; ++i) {
        PeriodicConfiguration c = uniform_with(rng.next_double());
        const double amp = rng.uniform(0.05, 0.6);
        for (std::int64_t j = 0; j < q; ++j) {
            c.base[static_cast<std::size_t>(j)] += rng.uniform(-amp, amp);
        }
        seeds.push_back(std::move(c));
    }
    return seeds;
}

}  // namespace

std::vector<PeriodicConfiguration> enumerate_stationary(const ModelSpec& spec, std::int64_t q_max,
                                                        int seeds_per_type, CounterRng rng) {
    if (q_max < 1) throw ModelError("q_max must be >= 1");
    if (!spec.forcing.is_dc()) throw ModelError("stationary enumeration requires DC forcing");
    std::vector<PeriodicConfiguration> found;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        for (std::int64_t p = 0; p <= q; ++p) {
            CounterRng type_rng = rng.derive(static_cast<std::uint64_t>(q * 1000 + p));
            std::vector<PeriodicConfiguration> of_type;
            const auto seeds = seeds_for_type(Rational{p, q}, q, seeds_per_type, type_rng);
            for (const PeriodicConfiguration& seed : seeds) {
                auto res = find_stationary_opt(spec, seed);
                if (!res) continue;
                if (width_deviation(*res) > static_cast<double>(q) + 2.0) continue;  // runaway
                bool fresh = true;
                for (const PeriodicConfiguration& prev : of_type) {
                    if (translate_distance(prev, *res) < 1e-8) {
                        fresh = false;
                        break;
                    }
                }
                if (fresh) of_type.push_back(std::move(*res));
            }
            for (PeriodicConfiguration& c : of_type) found.push_back(std::move(c));
        }
    }
    return found;
}

namespace {

// Strict integer bounds: smallest integer larger than x / largest smaller.
std::int64_t strict_ceil(double x, bool& boundary) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9) {
        boundary = true;
        return static_cast<std::int64_t>(r) + 1;
    }
    return static_cast<std::int64_t>(std::ceil(x));
}

std::int64_t strict_floor(double x, bool& boundary) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9) {
        boundary = true;
        return static_cast<std::int64_t>(r) - 1;
    }
    return static_cast<std::int64_t>(std::floor(x));
}

}  // namespace

std::optional<RotationBand> rotation_band(const PeriodicConfiguration& u) {
    const std::int64_t q = u.q();
    bool boundary = false;
    Rational lo{0, 1}, hi{0, 1};
    bool first = true;
    for (std::int64_t j = 0; j < q; ++j) {
        for (std::int64_t k = 1; k <= q; ++k) {
            const double diff = u.u(j + k) - u.u(j);
            const Rational cand_lo{strict_ceil(diff, boundary), k};
            const Rational cand_hi{strict_floor(diff, boundary), k};
            if (first) {
                lo = cand_lo;
                hi = cand_hi;
                first = false;
            } else {
                if (cand_lo < lo) lo = cand_lo;
                if (cand_hi > hi) hi = cand_hi;
            }
        }
    }
    if (lo > hi) return std::nullopt;
    return RotationBand{lo, hi, boundary};
}

bool PinnedSet::contains(Rational rho) const {
    for (const auto& [lo, hi] : intervals) {
        if (lo <= rho && rho <= hi) return true;
    }
    return false;
}

PinnedSet pinned_set(const ModelSpec& spec, std::int64_t q_max, int seeds_per_type,
                     CounterRng rng) {
    PinnedSet out;
    out.q_max = q_max;
    out.f_dc = spec.forcing.f_dc;
    std::vector<std::pair<Rational, Rational>> bands;
    for (const PeriodicConfiguration& c : enumerate_stationary(spec, q_max, seeds_per_type, rng)) {
        const auto band = rotation_band(c);
        if (band) bands.emplace_back(band->lo, band->hi);
    }
    std::sort(bands.begin(), bands.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    for (const auto& band : bands) {
        if (!out.intervals.empty() && band.first <= out.intervals.back().second) {
            if (out.intervals.back().second < band.second) {
                out.intervals.back().second = band.second;
            }
        } else {
            out.intervals.push_back(band);
        }
    }
    return out;
}

double depinning_force_bands(const ModelSpec& spec_template, Rational rho, std::int64_t q_max,
                             double tol, int seeds_per_type, CounterRng rng) {
    if (!spec_template.forcing.is_dc()) throw ModelError("band method requires DC forcing");
    if (!(tol > 0.0)) throw BracketInvalid("band bisection requires tol > 0");
    ModelSpec spec = spec_template;
    const auto pinned_at = [&](double f) {
        spec.forcing.f_dc = f;
        return pinned_set(spec, q_max, seeds_per_type, rng).contains(rho);
    };
    // Stationary states need |F| <= max|V'|, so the pinned set is empty a
    // little above that; bracket accordingly.
    double v_max = 0.0;
    for (int i = 0; i <= 200; ++i) {
        v_max = std::max(v_max, std::abs(spec.Vp(static_cast<double>(i) / 200.0)));
    }
    double lo = 0.0;
    double hi = v_max * 1.02 + 1e-6;
    if (!pinned_at(lo)) {
        throw BracketInvalid("rho " + rho.str() + " is not pinned at F_DC = 0 with q_max " +
                             std::to_string(q_max));
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (pinned_at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StabilityTag classify_stability(const PeriodicConfiguration& c, const ModelSpec& spec) {
    const std::int64_t q = c.q();
    std::vector<double> jac;
    jacobian(c, spec, jac);
    // Leading eigenvalue by shifted power iteration; J is symmetric.
    double shift = 0.0;
    for (std::int64_t r = 0; r < q; ++r) {
        double row = 0.0;
        for (std::int64_t col = 0; col < q; ++col) {
            row += std::abs(jac[static_cast<std::size_t>(r * q + col)]);
        }
        shift = std::max(shift, row);
    }
    std::vector<double> x(static_cast<std::size_t>(q), 1.0), y(static_cast<std::size_t>(q));
    x[0] = 1.5;  // break symmetry
    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
        double norm = 0.0;
        for (std::int64_t r = 0; r < q; ++r) {
            double acc = shift * x[static_cast<std::size_t>(r)];
            for (std::int64_t col = 0; col < q; ++col) {
                acc += jac[static_cast<std::size_t>(r * q + col)] * x[static_cast<std::size_t>(col)];
            }
            y[static_cast<std::size_t>(r)] = acc;
            norm += acc * acc;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return StabilityTag::fold;
        for (double& v : y) v /= norm;
        lambda = norm - shift;
        x.swap(y);
    }
    if (lambda < -1e-8) return StabilityTag::stable;
    if (lambda > 1e-8) return StabilityTag::unstable;
    return StabilityTag::fold;
}

StationaryBranch trace_branch(const ModelSpec& spec_template, const PeriodicConfiguration& seed,
                              const std::vector<double>& f_values) {
    StationaryBranch branch;
    branch.p = seed.winding;
    branch.q = seed.q();
    ModelSpec spec = spec_template;
    PeriodicConfiguration warm = seed;
    for (const double f : f_values) {
        spec.forcing.f_dc = f;
        auto res = find_stationary_opt(spec, warm);
        if (!res) break;
        warm = *res;
        branch.f_values.push_back(f);
        branch.configurations.push_back(*res);
        branch.stability.push_back(classify_stability(*res, spec));
    }
    return branch;
}

}  // namespace fk
