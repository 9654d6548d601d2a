#include "cwm/simulate.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "cwm/error.hpp"

namespace cwm {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("Rng::below needs a positive bound");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
}

void SamplerSpec::validate() const {
    (void)ModelParams{params.n_traders, params.beta};
    if (steps < 1) throw DomainError("steps must be at least 1");
    if (initial.size() != params.n_traders)
        throw DomainError("initial configuration has " + std::to_string(initial.size()) + " spins, expected " +
                          std::to_string(params.n_traders));
}

Sampler::Sampler(ModelParams params) : params_(params), shells_(enumerate_shells(params.n_traders)) {
    (void)ModelParams{params.n_traders, params.beta};
    for (const auto& shell : shells_) {
        const auto row = hamiltonian_kernel(params_.n_traders, params_.beta, shell).row.probs;
        std::vector<double> cdf(row.size());
        std::partial_sum(row.begin(), row.end(), cdf.begin());
        cdf_.push_back(std::move(cdf));
    }
}

int Sampler::next_shell_index(int prev_shell_index, Rng& rng) const {
    const auto& cdf = cdf_.at(static_cast<std::size_t>(prev_shell_index));
    const double u = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

SpinConfiguration Sampler::uniform_in_shell(int abs_spin_sum, Rng& rng) const {
    const int n = params_.n_traders;
    int signed_sum = abs_spin_sum;
    if (abs_spin_sum > 0 && rng.below(2) == 1) signed_sum = -abs_spin_sum;
    const int plus = (n + signed_sum) / 2;
    // Partial Fisher-Yates: the first `plus` entries of a random permutation buy.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> spins(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < plus; ++i) {
        const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        spins[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    }
    return SpinConfiguration(std::move(spins));
}

SpinConfiguration Sampler::next(const SpinConfiguration& prev, Rng& rng) const {
    if (prev.size() != params_.n_traders)
        throw DomainError("configuration has " + std::to_string(prev.size()) + " spins, expected " +
                          std::to_string(params_.n_traders));
    const int prev_index = std::abs(spin_sum(prev)) / 2;
    const int next_index = next_shell_index(prev_index, rng);
    return uniform_in_shell(shells_[static_cast<std::size_t>(next_index)].abs_spin_sum, rng);
}

SpinConfiguration sample_next(const SpinConfiguration& prev, const ModelParams& params, Rng& rng) {
    return Sampler(params).next(prev, rng);
}

Trajectory simulate_trajectory(const SamplerSpec& spec) {
    spec.validate();
    const Sampler sampler(spec.params);
    const auto shells = enumerate_shells(spec.params.n_traders);
    Rng rng(spec.seed);
    Trajectory traj;
    traj.seed = spec.seed;
    const auto total = static_cast<std::size_t>(spec.steps) + 1;
    traj.configs.reserve(total);
    traj.shells.reserve(total);
    traj.magnetizations.reserve(total);
    SpinConfiguration current = spec.initial;
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) current = sampler.next(current, rng);
        const int s = spin_sum(current);
        traj.shells.push_back(shells[static_cast<std::size_t>(std::abs(s) / 2)]);
        traj.magnetizations.emplace_back(spec.params.n_traders, s);
        traj.configs.push_back(current);
    }
    return traj;
}

DistributionTable empirical_distribution(const Trajectory& traj, std::size_t burn_in) {
    if (burn_in >= traj.size()) throw DomainError("burn-in leaves an empty window");
    const int n = traj.configs.front().size();
    auto shells = enumerate_shells(n);
    std::vector<std::size_t> hits(shells.size(), 0);
    for (std::size_t t = burn_in; t < traj.size(); ++t) ++hits[static_cast<std::size_t>(traj.shells[t].abs_spin_sum / 2)];
    const auto window = static_cast<double>(traj.size() - burn_in);
    DistributionTable table;
    for (std::size_t k = 0; k < shells.size(); ++k) {
        table.counts.push_back(shells[k].multiplicity);
        table.probs.push_back(static_cast<double>(hits[k]) / window);
    }
    table.labels = std::move(shells);
    return table;
}

}  // namespace cwm
