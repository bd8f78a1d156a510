#include "gmq/bounds.hpp"

#include <cmath>
#include <complex>

#include "gmq/errors.hpp"

namespace gmq {
namespace {

double square(double x) { return x * x; }

void check_depth(int p) {
    if (p < 0) throw ValidationError("bounds: depth must be nonnegative");
}

// H_1..H_k by the recurrence, written into out (1-based: out[k] = H_k).
void h_poly_sequence(int k_max, double r, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
    if (k_max >= 1) out[1] = -2.0 * r;
    if (k_max >= 2) out[2] = 4.0 * r * r - 2.0;
    for (int k = 2; k < k_max; ++k) {
        out[static_cast<std::size_t>(k) + 1] = -2.0 * r * out[static_cast<std::size_t>(k)] -
                                               out[static_cast<std::size_t>(k) - 1];
    }
}

// cos(m * pi * z) for z = 0 (even parity) or z = 1 (odd parity), exact.
double cos_pi_sign(int m, ZParity parity) {
    if (parity == ZParity::Even) return 1.0;
    return (m % 2 == 0) ? 1.0 : -1.0;
}

} // namespace

double basis_prob_ub(int p, std::uint64_t total) {
    check_depth(p);
    if (total == 0) throw ValidationError("bounds: total must be positive");
    return square(2.0 * p + 1.0) / static_cast<double>(total);
}

double lambda_ub(int p, double rho) {
    check_depth(p);
    if (!(rho > 0.0) || rho > 1.0) throw ValidationError("bounds: rho must be in (0, 1]");
    return square(2.0 * p + 1.0) * rho;
}

double alpha_ub(int p, const ObjectiveDistribution& dist) {
    check_depth(p);
    return mu_r(dist, 1.0 / square(2.0 * p + 1.0));
}

double tsp_rho(int n) {
    if (n < 3) throw ValidationError("bounds: tsp needs n >= 3");
    double fact = 1.0;
    for (int i = 2; i <= n - 1; ++i) fact *= static_cast<double>(i);
    return 2.0 / fact;
}

double tsp_lambda_ub(int n, int p) {
    return lambda_ub(p, tsp_rho(n)); // identical rounding path by construction
}

double h_poly(int k, double r) {
    if (k < 1) throw ValidationError("bounds: h_poly needs k >= 1");
    std::vector<double> h;
    h_poly_sequence(k, r, h);
    return h[static_cast<std::size_t>(k)];
}

double script_g(int p, ZParity parity, double r, std::uint64_t total) {
    if (p < 1) throw ValidationError("bounds: script_g needs p >= 1");
    if (total == 0) throw ValidationError("bounds: total must be positive");
    if (std::abs(r) > 1.0) throw ValidationError("bounds: script_g needs r in [-1, 1]");
    std::vector<double> h;
    h_poly_sequence(p, r, h);
    double sum = cos_pi_sign(p, parity); // cos(p*pi*z)
    for (int k = 1; k <= p; ++k) {
        sum += cos_pi_sign(p - k, parity) * h[static_cast<std::size_t>(k)];
    }
    return square(sum) / static_cast<double>(total);
}

double relax_g(std::span<const double> gammas, std::span<const double> betas,
               std::span<const double> v, double z, std::uint64_t total) {
    const int p = static_cast<int>(gammas.size());
    if (betas.size() != gammas.size()) throw ValidationError("relax_g: gamma/beta length mismatch");
    if (p < 1 || p > 9) throw CapacityError("relax_g: depth must be in [1, 9]", p);
    if (v.size() != total) throw ValidationError("relax_g: v must have length total");
    if (total == 0 || total > 1000) {
        throw CapacityError("relax_g: total must be in [1, 1000]", static_cast<double>(total));
    }

    // Mean of e^{-i g v_m} over the v vector, for a gamma-sum g.
    auto phase_mean = [&](double g) {
        std::complex<double> acc(0.0, 0.0);
        for (double vm : v) acc += std::polar(1.0, -g * vm);
        return acc / static_cast<double>(total);
    };
    // Suffix gamma sums: suffix[j] = gamma_{j+1} + ... + gamma_p (1-based j).
    std::vector<double> suffix(static_cast<std::size_t>(p) + 2, 0.0);
    for (int j = p; j >= 1; --j) {
        suffix[static_cast<std::size_t>(j)] =
            suffix[static_cast<std::size_t>(j) + 1] + gammas[static_cast<std::size_t>(j - 1)];
    }
    // Prefix gamma sums for segment sums gamma_{a..b} = prefix[b] - prefix[a-1].
    std::vector<double> prefix(static_cast<std::size_t>(p) + 1, 0.0);
    for (int j = 1; j <= p; ++j) {
        prefix[static_cast<std::size_t>(j)] =
            prefix[static_cast<std::size_t>(j) - 1] + gammas[static_cast<std::size_t>(j - 1)];
    }

    // Sum over subsets s = {s_1 < ... < s_k} of [p], prepended with s_0 = 0:
    //   e^{-i (gamma_{s_k+1..p}) z} * prod_j (e^{-i beta_{s_j}} - 1)
    //                              * prod_j mean_m e^{-i (gamma_{s_{j-1}+1..s_j}) v_m}
    std::complex<double> g_total(0.0, 0.0);
    const std::uint32_t subsets = 1u << p;
    std::vector<int> members;
    members.reserve(static_cast<std::size_t>(p));
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        members.clear();
        for (int i = 1; i <= p; ++i) {
            if (mask & (1u << (i - 1))) members.push_back(i);
        }
        const int last = members.empty() ? 0 : members.back();
        std::complex<double> term = std::polar(1.0, -suffix[static_cast<std::size_t>(last + 1)] * z);
        int prev = 0;
        for (int s : members) {
            term *= std::polar(1.0, -betas[static_cast<std::size_t>(s - 1)]) - 1.0;
            const double seg =
                prefix[static_cast<std::size_t>(s)] - prefix[static_cast<std::size_t>(prev)];
            term *= phase_mean(seg);
            prev = s;
        }
        g_total += term;
    }
    return std::norm(g_total) / static_cast<double>(total);
}

WitnessReport verify_theorem1_witness(int p_max, std::uint64_t total, double grid_step) {
    if (p_max < 1 || p_max > 9) throw ValidationError("witness: p_max must be in [1, 9]");
    if (total == 0) throw ValidationError("witness: total must be positive");
    if (!(grid_step > 0.0) || grid_step > 1.0) throw ValidationError("witness: bad grid step");

    WitnessReport report;
    report.p_max = p_max;
    report.total = total;
    report.grid_step = grid_step;

    const auto steps = static_cast<long long>(std::ceil(2.0 / grid_step));
    for (int p = 1; p <= p_max; ++p) {
        for (ZParity parity : {ZParity::Even, ZParity::Odd}) {
            const double expected = basis_prob_ub(p, total);
            double max_value = -1.0;
            double argmax_r = 0.0;
            for (long long i = 0; i <= steps; ++i) {
                const double r = std::min(-1.0 + grid_step * static_cast<double>(i), 1.0);
                const double g = script_g(p, parity, r, total);
                if (g > max_value) { // strict: ties keep the smaller r
                    max_value = g;
                    argmax_r = r;
                }
                if (g > expected + 1e-9) {
                    throw WitnessError("witness violation: grid point exceeds (2p+1)^2/|F|", p,
                                       parity == ZParity::Odd, r);
                }
            }
            const double endpoint_r = parity == ZParity::Even ? -1.0 : 1.0;
            const double endpoint = script_g(p, parity, endpoint_r, total);
            if (std::abs(endpoint - expected) > 1e-9) {
                throw WitnessError("witness violation: endpoint does not attain (2p+1)^2/|F|", p,
                                   parity == ZParity::Odd, endpoint_r);
            }
            // Even parity: the max must sit at the left endpoint r = -1
            // (the grid's first point, so ties cannot displace it). Odd
            // parity mirrors to r = +1; the scan reaches it last, so the
            // maximum is checked against the endpoint value instead.
            if (parity == ZParity::Even && argmax_r != -1.0) {
                throw WitnessError("witness violation: even-parity maximum not at r = -1", p, false,
                                   argmax_r);
            }
            if (parity == ZParity::Odd && std::abs(max_value - endpoint) > 1e-9) {
                throw WitnessError("witness violation: odd-parity maximum not at r = +1", p, true,
                                   argmax_r);
            }
            report.rows.push_back({p, parity, endpoint, max_value, argmax_r});
        }
    }
    return report;
}

BoundReport bound_report(int p, const ObjectiveDistribution& dist) {
    dist.validate();
    BoundReport report;
    report.p = p;
    report.basis_ub = basis_prob_ub(p, dist.total);
    report.lambda_ub = lambda_ub(p, rho(dist));
    if (dist.orientation == Orientation::Maximize && dist.values.front() > 0.0) {
        report.alpha_ub = alpha_ub(p, dist);
    }
    report.context = dist.provenance;
    return report;
}

} // namespace gmq
