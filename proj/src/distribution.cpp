#include "gmq/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "gmq/errors.hpp"

namespace gmq {

std::size_t ObjectiveDistribution::optimal_index() const {
    if (values.empty()) throw ValidationError("distribution: empty");
    return orientation == Orientation::Maximize ? 0 : values.size() - 1;
}

void ObjectiveDistribution::validate() const {
    if (values.empty()) throw ValidationError("distribution: empty");
    if (values.size() != counts.size()) throw ValidationError("distribution: values/counts size mismatch");
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (counts[i] == 0) throw ValidationError("distribution: zero multiplicity");
        if (i > 0 && !(values[i - 1] > values[i])) {
            throw ValidationError("distribution: values not strictly descending");
        }
        sum += counts[i];
    }
    if (sum != total) throw ValidationError("distribution: total does not match counts");
}

double tsp_value_key(double v) {
    return std::round(v * 1e12) / 1e12;
}

std::ptrdiff_t class_index_of(const ObjectiveDistribution& dist, double value, bool bucketed) {
    const double key = bucketed ? tsp_value_key(value) : value;
    // values descending
    auto it = std::lower_bound(dist.values.begin(), dist.values.end(), key, std::greater<double>{});
    if (it == dist.values.end() || *it != key) return -1;
    return it - dist.values.begin();
}

ObjectiveDistribution distribution_of(const ProblemInstance& instance, int workers,
                                      std::uint64_t cap) {
    validate(instance);
    const std::uint64_t count = feasible_count(instance);
    if (count > cap) {
        throw CapacityError("enumeration cap exceeded: |F| = " + std::to_string(count),
                            static_cast<double>(count));
    }
    const bool bucketed = instance.kind == ProblemKind::Tsp;

    using Histogram = std::map<double, std::uint64_t>;
    auto accumulate_range = [&](std::uint64_t begin, std::uint64_t end, Histogram& hist) {
        for_each_feasible_in(instance, begin, end, [&](const Solution&, double value) {
            hist[bucketed ? tsp_value_key(value) : value] += 1;
        });
    };

    Histogram merged;
    if (workers <= 1 || count < 1024) {
        accumulate_range(0, count, merged);
    } else {
        const int w = std::min<int>(workers, 64);
        std::vector<Histogram> parts(static_cast<std::size_t>(w));
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(w));
        for (int t = 0; t < w; ++t) {
            const std::uint64_t begin = count * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(w);
            const std::uint64_t end = count * (static_cast<std::uint64_t>(t) + 1) / static_cast<std::uint64_t>(w);
            threads.emplace_back([&, t, begin, end] { accumulate_range(begin, end, parts[static_cast<std::size_t>(t)]); });
        }
        for (auto& th : threads) th.join();
        for (const auto& part : parts) {
            for (const auto& [value, c] : part) merged[value] += c;
        }
    }

    ObjectiveDistribution dist;
    dist.orientation = instance.orientation;
    dist.provenance = instance.id();
    dist.total = count;
    dist.values.reserve(merged.size());
    dist.counts.reserve(merged.size());
    for (auto it = merged.rbegin(); it != merged.rend(); ++it) { // descending
        dist.values.push_back(it->first);
        dist.counts.push_back(it->second);
    }
    dist.validate();
    return dist;
}

double rho(const ObjectiveDistribution& dist) {
    dist.validate();
    return static_cast<double>(dist.counts[dist.optimal_index()]) / static_cast<double>(dist.total);
}

double mu_r(const ObjectiveDistribution& dist, double r) {
    dist.validate();
    if (dist.orientation != Orientation::Maximize) {
        throw ValidationError("mu_r: defined for Maximize distributions only");
    }
    if (!(r > 0.0) || r > 1.0) throw ValidationError("mu_r: need 0 < r <= 1");
    const double c_max = dist.values.front();
    if (!(c_max > 0.0)) throw ValidationError("mu_r: undefined ratio, maximum value is not positive");

    const double x = r * static_cast<double>(dist.total);
    // ceil with a 1-ulp-scale nudge so mathematically integral r|F| (e.g.
    // r = 1/9, |F| = 252) does not round up to the next class.
    std::uint64_t m = static_cast<std::uint64_t>(std::ceil(x - x * 1e-12));
    m = std::max<std::uint64_t>(1, std::min<std::uint64_t>(m, dist.total));

    double top_sum = 0.0;
    std::uint64_t remaining = m;
    for (std::size_t j = 0; j < dist.size() && remaining > 0; ++j) {
        const std::uint64_t take = std::min(remaining, dist.counts[j]);
        top_sum += static_cast<double>(take) * dist.values[j];
        remaining -= take;
    }
    return top_sum / (x * c_max);
}

} // namespace gmq
