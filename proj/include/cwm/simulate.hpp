#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cwm/exact_dist.hpp"
#include "cwm/spin_core.hpp"

namespace cwm {

/// Seeded generator. The engine (std::mt19937_64) is fully specified by the
/// standard, and the derived draws below avoid the implementation-defined
/// std:: distributions, so a seed gives identical streams on every platform.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on {0, ..., bound - 1}.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

struct SamplerSpec {
    ModelParams params;
    int steps = 1;
    std::uint64_t seed = 0;
    SpinConfiguration initial;

    void validate() const;
};

struct Trajectory {
    std::vector<SpinConfiguration> configs;
    std::vector<ShellValue> shells;
    std::vector<Magnetization> magnetizations;
    std::string generator = Rng::kAlgorithm;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return configs.size(); }
};

/// Exact two-stage sampler for X_t | X_{t-1}: draw the next shell from the
/// Hamiltonian kernel, then a configuration uniformly within that shell.
/// Kernel rows are computed once per (N, beta).
class Sampler {
public:
    explicit Sampler(ModelParams params);

    const ModelParams& params() const noexcept { return params_; }
    SpinConfiguration next(const SpinConfiguration& prev, Rng& rng) const;
    /// Stage one only: index into enumerate_shells(N) of the next shell.
    int next_shell_index(int prev_shell_index, Rng& rng) const;
    /// Stage two only: uniform configuration with the given |spin sum|.
    SpinConfiguration uniform_in_shell(int abs_spin_sum, Rng& rng) const;

private:
    ModelParams params_;
    std::vector<ShellValue> shells_;
    std::vector<std::vector<double>> cdf_;  // cumulative kernel rows
};

SpinConfiguration sample_next(const SpinConfiguration& prev, const ModelParams& params, Rng& rng);

Trajectory simulate_trajectory(const SamplerSpec& spec);

/// Shell occupancy frequencies of configs[burn_in..], over all shells of N.
DistributionTable empirical_distribution(const Trajectory& traj, std::size_t burn_in);

}  // namespace cwm
