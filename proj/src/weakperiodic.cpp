#include "hctree/weakperiodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hctree/solvers.hpp"

namespace hctree::weak {

namespace {

constexpr int kStartsPerAxis = 32;
constexpr int kScanPerAxis = 128;
constexpr double kStartLo = 1e-4;
constexpr double kStartHi = 10.0;
constexpr int kMaxNewtonIterations = 100;
constexpr int kMaxHalvings = 40;
constexpr double kFloor = 1e-30;
constexpr double kCeiling = 1e30;
constexpr double kDedupDistance = 1e-8;
constexpr double kJacobianStep = 1e-6;

double log_add(double a, double b) {
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log of (1+λa)^k / ((1+λa)^{k/i} + λ b^{1-1/i})^i / (1+λc)^{k-i}
double log_component(double k, double i, double lambda, double a, double b, double c) {
    const double la = std::log1p(lambda * a);
    const double lc = std::log1p(lambda * c);
    const double denom = log_add(k / i * la, std::log(lambda) + (1.0 - 1.0 / i) * std::log(b));
    return k * la - i * denom - (k - i) * lc;
}

Field4 log_weak_map(const WeakPeriodicParams& p, const Field4& z) {
    const double k = p.k;
    const double i = p.i;
    const double l = p.lambda;
    return {log_component(k, i, l, z[2], z[3], z[1]), log_component(k, i, l, z[3], z[2], z[0]),
            log_component(k, i, l, z[0], z[1], z[3]), log_component(k, i, l, z[1], z[0], z[2])};
}

// Indices of W that carry the two free coordinates of each slice.
std::pair<int, int> free_components(InvariantSet set) {
    switch (set) {
        case InvariantSet::I3: return {0, 2};
        case InvariantSet::I1:
        case InvariantSet::I2:
        case InvariantSet::I4: break;
    }
    return {0, 1};
}

struct Reduced {
    const WeakPeriodicParams& p;
    std::pair<int, int> comp;

    // Residual in log coordinates: log W(e^x, e^y) - (x, y) on the slice.
    std::array<double, 2> operator()(double x, double y) const {
        const Field4 lw = log_weak_map(p, embed(p.set, std::exp(x), std::exp(y)));
        return {lw[static_cast<std::size_t>(comp.first)] - x, lw[static_cast<std::size_t>(comp.second)] - y};
    }
};

double norm_inf(const std::array<double, 2>& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

double clamp_log(double x) {
    static const double lo = std::log(kFloor);
    static const double hi = std::log(kCeiling);
    return std::clamp(x, lo, hi);
}

struct NewtonResult {
    bool converged = false;
    double x = 0.0;
    double y = 0.0;
};

NewtonResult damped_newton(const Reduced& g, double x, double y) {
    auto r = g(x, y);
    double norm = norm_inf(r);
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
        if (!std::isfinite(norm)) {
            return {};
        }
        if (norm < 1e-15) {
            return {true, x, y};
        }
        const auto rx_p = g(x + kJacobianStep, y);
        const auto rx_m = g(x - kJacobianStep, y);
        const auto ry_p = g(x, y + kJacobianStep);
        const auto ry_m = g(x, y - kJacobianStep);
        const double j00 = (rx_p[0] - rx_m[0]) / (2 * kJacobianStep);
        const double j10 = (rx_p[1] - rx_m[1]) / (2 * kJacobianStep);
        const double j01 = (ry_p[0] - ry_m[0]) / (2 * kJacobianStep);
        const double j11 = (ry_p[1] - ry_m[1]) / (2 * kJacobianStep);
        const double det = j00 * j11 - j01 * j10;
        if (!std::isfinite(det) || det == 0.0) {
            return {};
        }
        const double dx = (-r[0] * j11 + r[1] * j01) / det;
        const double dy = (-r[1] * j00 + r[0] * j10) / det;

        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
            const double nx = clamp_log(x + t * dx);
            const double ny = clamp_log(y + t * dy);
            const auto nr = g(nx, ny);
            const double nn = norm_inf(nr);
            if (std::isfinite(nn) && nn < norm) {
                x = nx;
                y = ny;
                r = nr;
                norm = nn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Stalled at a point Newton can no longer improve; accept it only if it is a root.
            return {norm < 1e-13, x, y};
        }
    }
    return {norm < 1e-13, x, y};
}

std::vector<double> log_grid(int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log(kStartLo);
    const double b = std::log(kStartHi);
    for (int j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(j)] = a + (b - a) * j / (n - 1);
    }
    return out;
}

// Cells of a fine grid whose corners see both signs in each residual component.
std::vector<std::pair<double, double>> sign_change_cells(const Reduced& g) {
    const auto grid = log_grid(kScanPerAxis);
    const std::size_t n = grid.size();
    std::vector<std::array<double, 2>> values(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            values[a * n + b] = g(grid[a], grid[b]);
        }
    }
    std::vector<std::pair<double, double>> cells;
    for (std::size_t a = 0; a + 1 < n; ++a) {
        for (std::size_t b = 0; b + 1 < n; ++b) {
            bool ok = true;
            for (int c = 0; c < 2 && ok; ++c) {
                bool pos = false;
                bool neg = false;
                for (std::size_t da : {0u, 1u}) {
                    for (std::size_t db : {0u, 1u}) {
                        const double v = values[(a + da) * n + (b + db)][static_cast<std::size_t>(c)];
                        pos = pos || v > 0.0;
                        neg = neg || v < 0.0;
                    }
                }
                ok = pos && neg;
            }
            if (ok) {
                cells.emplace_back(0.5 * (grid[a] + grid[a + 1]), 0.5 * (grid[b] + grid[b + 1]));
            }
        }
    }
    return cells;
}

double max_residual(const WeakPeriodicParams& p, const Field4& z) {
    const Field4 w = weak_system_map(p, z);
    double worst = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        worst = std::max(worst, std::abs(z[j] - w[j]));
    }
    return worst;
}

}  // namespace

void WeakPeriodicParams::validate() const {
    if (k < 1) {
        throw DomainError("k must be >= 1");
    }
    if (i < 1 || i > k + 1) {
        throw DomainError("i = |A| must satisfy 1 <= i <= k + 1");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be positive and finite");
    }
}

Field4 weak_system_map(const WeakPeriodicParams& p, const Field4& z) {
    p.validate();
    for (double v : z) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("weak-periodic field values must be positive and finite");
        }
    }
    const Field4 lw = log_weak_map(p, z);
    return {std::exp(lw[0]), std::exp(lw[1]), std::exp(lw[2]), std::exp(lw[3])};
}

bool in_invariant_set(InvariantSet set, const Field4& z, double tol) noexcept {
    auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    switch (set) {
        case InvariantSet::I1: return near(z[0], z[1]) && near(z[1], z[2]) && near(z[2], z[3]);
        case InvariantSet::I2: return near(z[0], z[2]) && near(z[1], z[3]);
        case InvariantSet::I3: return near(z[0], z[1]) && near(z[2], z[3]);
        case InvariantSet::I4: return near(z[0], z[3]) && near(z[1], z[2]);
    }
    return false;
}

bool invariant_set_check(InvariantSet set, const Field4& z, double tol, const WeakPeriodicParams& p) {
    return in_invariant_set(set, z, tol) && in_invariant_set(set, weak_system_map(p, z), tol);
}

Field4 embed(InvariantSet set, double u, double v) noexcept {
    switch (set) {
        case InvariantSet::I1: return {u, u, u, u};
        case InvariantSet::I2: return {u, v, u, v};
        case InvariantSet::I3: return {u, u, v, v};
        case InvariantSet::I4: return {u, v, v, u};
    }
    return {u, v, u, v};
}

SolveReport solve_weak_periodic(const WeakPeriodicParams& p, double tol) {
    p.validate();
    if (p.set == InvariantSet::I1) {
        throw DomainError("the diagonal I1 reduces to the scalar recursion; use solve_translation_invariant");
    }
    if (!(tol > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
    const Reduced g{p, free_components(p.set)};

    std::vector<std::pair<double, double>> starts;
    const auto grid = log_grid(kStartsPerAxis);
    for (double x : grid) {
        for (double y : grid) {
            starts.emplace_back(x, y);
        }
    }
    const auto cells = sign_change_cells(g);
    starts.insert(starts.end(), cells.begin(), cells.end());

    std::vector<std::pair<double, double>> roots;
    int rejected = 0;
    for (const auto& [x0, y0] : starts) {
        const NewtonResult nr = damped_newton(g, x0, y0);
        if (!nr.converged) {
            continue;
        }
        const double u = std::exp(nr.x);
        const double v = std::exp(nr.y);
        if (max_residual(p, embed(p.set, u, v)) > tol) {
            ++rejected;
            continue;
        }
        roots.emplace_back(u, v);
    }

    std::sort(roots.begin(), roots.end());
    std::vector<std::pair<double, double>> unique;
    for (const auto& r : roots) {
        const bool dup = std::any_of(unique.begin(), unique.end(), [&](const auto& q) {
            return std::abs(q.first - r.first) <= kDedupDistance && std::abs(q.second - r.second) <= kDedupDistance;
        });
        if (!dup) {
            unique.push_back(r);
        }
    }

    SolveReport report;
    report.method = "multi-start damped Newton on " + std::string(to_string(p.set));
    report.lambda_critical = p.k >= 2 ? critical_lambda(p.k) : std::numeric_limits<double>::infinity();
    for (const auto& [u, v] : unique) {
        const Field4 z = embed(p.set, u, v);
        report.residuals.push_back(max_residual(p, z));
        if (std::abs(u - v) <= kDedupDistance) {
            report.solutions.push_back(BoundaryLaw::translation_invariant(0.5 * (u + v)));
        } else {
            report.solutions.push_back(BoundaryLaw::weak_periodic(z, p.set));
        }
    }
    if (report.solutions.empty()) {
        report.diagnostics.push_back("Newton did not converge from any of " + std::to_string(starts.size()) +
                                     " starts");
    }
    if (rejected > 0) {
        report.diagnostics.push_back(std::to_string(rejected) + " converged starts rejected by the residual check");
    }
    return report;
}

std::pair<double, double> s_pm(int k) {
    if (k < 6) {
        throw DomainError("s± requires k >= 6");
    }
    const double kd = k;
    const double root = std::sqrt(kd * kd - 6.0 * kd + 1.0);
    return {(kd - 3.0 - root) / 4.0, (kd - 3.0 + root) / 4.0};
}

std::pair<double, double> lambda_pm(int k) {
    const auto [s_minus, s_plus] = s_pm(k);
    return {std::pow(s_minus + 1.0, k) * s_minus, std::pow(s_plus + 1.0, k) * s_plus};
}

}  // namespace hctree::weak
