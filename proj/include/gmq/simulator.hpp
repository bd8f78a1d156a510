#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gmq/distribution.hpp"
#include "gmq/problems.hpp"

namespace gmq {

// Phase function C: either the objective itself or a threshold indicator
// mapping c -> 1 if c <= th else 0 (orientation-agnostic, exactly as written).
struct PhaseFunction {
    enum class Variant { Objective, Threshold };
    Variant variant = Variant::Objective;
    double th = 0.0;

    double operator()(double c) const {
        return variant == Variant::Objective ? c : (c <= th ? 1.0 : 0.0);
    }

    static PhaseFunction objective() { return {}; }
    static PhaseFunction threshold(double th) { return {Variant::Threshold, th}; }
};

struct CircuitParams {
    std::vector<double> gammas;
    std::vector<double> betas;
    PhaseFunction phase_fn;

    int depth() const { return static_cast<int>(gammas.size()); }
    void validate() const; // gammas and betas must have equal length
};

// One complex amplitude per objective-value class; amps[j] is the amplitude
// of each individual solution in class j, so the class carries probability
// counts[j] * |amps[j]|^2.
struct CompressedState {
    std::vector<std::complex<double>> amps;
    std::shared_ptr<const ObjectiveDistribution> dist;

    double norm() const; // sum_j counts_j |a_j|^2, 1 within 1e-12
};

struct StateMetrics {
    double lambda = 0.0;        // probability mass on the optimal class
    double expectation = 0.0;   // sum_j counts_j |a_j|^2 c_j
    double tts = 0.0;           // 1 / lambda
    std::optional<double> alpha; // expectation / max value; Maximize only
};

CompressedState init_state(std::shared_ptr<const ObjectiveDistribution> dist);
CompressedState init_state(const ObjectiveDistribution& dist);

CompressedState apply_phase(const CompressedState& state, double gamma, const PhaseFunction& fn);
CompressedState apply_mixer(const CompressedState& state, double beta);

StateMetrics metrics_of(const CompressedState& state);

// Alternates phase separator and Grover mixer for rounds 1..p from the
// uniform state, then reports metrics on the final state.
std::pair<CompressedState, StateMetrics> run_circuit(const ObjectiveDistribution& dist,
                                                     const CircuitParams& params);

// Reusable in-place evolver for hot loops (parameter optimization). Equivalent
// to run_circuit on every call; owns its scratch buffers.
class CompressedEvolver {
public:
    CompressedEvolver(const ObjectiveDistribution& dist, PhaseFunction phase_fn);

    StateMetrics run(std::span<const double> gammas, std::span<const double> betas);

    const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
    const std::vector<double>& phase_values() const { return phase_values_; }

private:
    const ObjectiveDistribution& dist_;
    std::vector<double> phase_values_; // C(c_j) per class
    std::vector<double> counts_;
    std::vector<std::complex<double>> amps_;
    double inv_sqrt_total_;
};

inline constexpr std::uint64_t kReferenceCap = 100'000ull;

// Uncompressed oracle: one amplitude per feasible solution, Eqs. for the
// phase separator and mixer applied literally. Returns measurement
// probabilities in enumeration order.
std::vector<double> run_reference(const ProblemInstance& instance, const CircuitParams& params,
                                  std::uint64_t cap = kReferenceCap);

enum class ReductionMode { MixerTrivial, PhaseTrivial };

// Depth-(p-1) circuit equivalent to `params` when layer `layer_index`
// (0-based) is trivial: MixerTrivial requires beta = 2k*pi at the layer and
// merges gamma into the following layer; PhaseTrivial requires gamma*C(f)
// to be a multiple of 2*pi for every value (checked against `phase_values`
// when provided, otherwise only gamma = 0 qualifies) and merges beta into
// the preceding layer. Throws ValidationError when not reducible.
CircuitParams reduced_equivalent(const CircuitParams& params, int layer_index, ReductionMode mode,
                                 const std::vector<double>* phase_values = nullptr);

} // namespace gmq
