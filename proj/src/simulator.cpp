#include "gmq/simulator.hpp"

#include <cmath>
#include <numbers>

#include "gmq/errors.hpp"

namespace gmq {
namespace {

bool is_multiple_of_two_pi(double x) {
    // |sin(x/2)| vanishes exactly at multiples of 2*pi.
    return std::abs(std::sin(x / 2.0)) < 1e-12;
}

StateMetrics metrics_from(const ObjectiveDistribution& dist,
                          const std::vector<std::complex<double>>& amps) {
    StateMetrics m;
    double expectation = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        expectation += static_cast<double>(dist.counts[j]) * std::norm(amps[j]) * dist.values[j];
    }
    const std::size_t opt = dist.optimal_index();
    m.lambda = static_cast<double>(dist.counts[opt]) * std::norm(amps[opt]);
    m.expectation = expectation;
    m.tts = 1.0 / m.lambda;
    if (dist.orientation == Orientation::Maximize && dist.values.front() > 0.0) {
        m.alpha = expectation / dist.values.front();
    }
    return m;
}

} // namespace

void CircuitParams::validate() const {
    if (gammas.size() != betas.size()) {
        throw ValidationError("circuit: gammas and betas must have equal length");
    }
}

double CompressedState::norm() const {
    double s = 0.0;
    for (std::size_t j = 0; j < amps.size(); ++j) {
        s += static_cast<double>(dist->counts[j]) * std::norm(amps[j]);
    }
    return s;
}

CompressedState init_state(std::shared_ptr<const ObjectiveDistribution> dist) {
    dist->validate();
    CompressedState state;
    state.dist = std::move(dist);
    state.amps.assign(state.dist->size(),
                      std::complex<double>(1.0 / std::sqrt(static_cast<double>(state.dist->total)), 0.0));
    return state;
}

CompressedState init_state(const ObjectiveDistribution& dist) {
    return init_state(std::make_shared<const ObjectiveDistribution>(dist));
}

CompressedState apply_phase(const CompressedState& state, double gamma, const PhaseFunction& fn) {
    CompressedState out = state;
    for (std::size_t j = 0; j < out.amps.size(); ++j) {
        out.amps[j] *= std::polar(1.0, -gamma * fn(state.dist->values[j]));
    }
    return out;
}

CompressedState apply_mixer(const CompressedState& state, double beta) {
    CompressedState out = state;
    const double inv_sqrt_total = 1.0 / std::sqrt(static_cast<double>(state.dist->total));
    std::complex<double> s(0.0, 0.0); // <F|psi>
    for (std::size_t j = 0; j < state.amps.size(); ++j) {
        s += static_cast<double>(state.dist->counts[j]) * state.amps[j];
    }
    s *= inv_sqrt_total;
    const std::complex<double> shift = (1.0 - std::polar(1.0, -beta)) * s * inv_sqrt_total;
    for (auto& a : out.amps) a -= shift;
    return out;
}

StateMetrics metrics_of(const CompressedState& state) {
    return metrics_from(*state.dist, state.amps);
}

std::pair<CompressedState, StateMetrics> run_circuit(const ObjectiveDistribution& dist,
                                                     const CircuitParams& params) {
    params.validate();
    CompressedState state = init_state(dist);
    for (int layer = 0; layer < params.depth(); ++layer) {
        state = apply_phase(state, params.gammas[static_cast<std::size_t>(layer)], params.phase_fn);
        state = apply_mixer(state, params.betas[static_cast<std::size_t>(layer)]);
    }
    return {state, metrics_of(state)};
}

CompressedEvolver::CompressedEvolver(const ObjectiveDistribution& dist, PhaseFunction phase_fn)
    : dist_(dist) {
    dist.validate();
    phase_values_.reserve(dist.size());
    counts_.reserve(dist.size());
    for (std::size_t j = 0; j < dist.size(); ++j) {
        phase_values_.push_back(phase_fn(dist.values[j]));
        counts_.push_back(static_cast<double>(dist.counts[j]));
    }
    amps_.resize(dist.size());
    inv_sqrt_total_ = 1.0 / std::sqrt(static_cast<double>(dist.total));
}

StateMetrics CompressedEvolver::run(std::span<const double> gammas, std::span<const double> betas) {
    if (gammas.size() != betas.size()) {
        throw ValidationError("evolver: gammas and betas must have equal length");
    }
    const std::size_t m = amps_.size();
    for (auto& a : amps_) a = std::complex<double>(inv_sqrt_total_, 0.0);
    for (std::size_t layer = 0; layer < gammas.size(); ++layer) {
        const double gamma = gammas[layer];
        for (std::size_t j = 0; j < m; ++j) {
            const double angle = -gamma * phase_values_[j];
            amps_[j] *= std::complex<double>(std::cos(angle), std::sin(angle));
        }
        std::complex<double> s(0.0, 0.0);
        for (std::size_t j = 0; j < m; ++j) s += counts_[j] * amps_[j];
        s *= inv_sqrt_total_;
        const std::complex<double> shift = (1.0 - std::polar(1.0, -betas[layer])) * s * inv_sqrt_total_;
        for (std::size_t j = 0; j < m; ++j) amps_[j] -= shift;
    }
    return metrics_from(dist_, amps_);
}

std::vector<double> run_reference(const ProblemInstance& instance, const CircuitParams& params,
                                  std::uint64_t cap) {
    params.validate();
    const std::uint64_t count = feasible_count(instance);
    if (count > cap) {
        throw CapacityError("reference simulation cap exceeded: |F| = " + std::to_string(count),
                            static_cast<double>(count));
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for_each_feasible(instance, [&](const Solution&, double value) { values.push_back(value); }, cap);

    const double inv_sqrt_total = 1.0 / std::sqrt(static_cast<double>(count));
    std::vector<std::complex<double>> amps(values.size(),
                                           std::complex<double>(inv_sqrt_total, 0.0));
    for (int layer = 0; layer < params.depth(); ++layer) {
        const double gamma = params.gammas[static_cast<std::size_t>(layer)];
        for (std::size_t f = 0; f < amps.size(); ++f) {
            amps[f] *= std::polar(1.0, -gamma * params.phase_fn(values[f]));
        }
        std::complex<double> s(0.0, 0.0);
        for (const auto& a : amps) s += a;
        s *= inv_sqrt_total;
        const std::complex<double> shift =
            (1.0 - std::polar(1.0, -params.betas[static_cast<std::size_t>(layer)])) * s * inv_sqrt_total;
        for (auto& a : amps) a -= shift;
    }
    std::vector<double> probs(amps.size());
    for (std::size_t f = 0; f < amps.size(); ++f) probs[f] = std::norm(amps[f]);
    return probs;
}

CircuitParams reduced_equivalent(const CircuitParams& params, int layer_index, ReductionMode mode,
                                 const std::vector<double>* phase_values) {
    params.validate();
    const int p = params.depth();
    if (layer_index < 0 || layer_index >= p) {
        throw ValidationError("reduced_equivalent: layer index out of range");
    }
    const std::size_t li = static_cast<std::size_t>(layer_index);

    if (mode == ReductionMode::MixerTrivial) {
        if (!is_multiple_of_two_pi(params.betas[li])) {
            throw ValidationError("reduced_equivalent: not reducible, beta is not a multiple of 2*pi");
        }
    } else {
        const double gamma = params.gammas[li];
        if (phase_values) {
            for (double v : *phase_values) {
                if (!is_multiple_of_two_pi(gamma * v)) {
                    throw ValidationError(
                        "reduced_equivalent: not reducible, gamma*C(f) is not a multiple of 2*pi");
                }
            }
        } else if (std::abs(gamma) > 1e-12) {
            throw ValidationError(
                "reduced_equivalent: not reducible, need gamma = 0 when phase values are unknown");
        }
    }

    CircuitParams out;
    out.phase_fn = params.phase_fn;
    out.gammas.reserve(static_cast<std::size_t>(p - 1));
    out.betas.reserve(static_cast<std::size_t>(p - 1));
    for (std::size_t i = 0; i < static_cast<std::size_t>(p); ++i) {
        if (i == li) continue;
        out.gammas.push_back(params.gammas[i]);
        out.betas.push_back(params.betas[i]);
    }
    if (mode == ReductionMode::MixerTrivial) {
        // U_M drops; the layer's gamma merges into the following phase
        // separator. At the last layer the leftover phase is unobservable.
        if (layer_index < p - 1) {
            out.gammas[li] += params.gammas[li];
        }
    } else {
        // U_P is identity; the layer's beta merges into the preceding mixer.
        // At the first layer the mixer acts on |F> as a global phase.
        if (layer_index > 0) {
            out.betas[li - 1] += params.betas[li];
        }
    }
    return out;
}

} // namespace gmq
