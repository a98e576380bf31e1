#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dgrecon {

/// Nodes 0 = t_0 < t_1 < ... < t_N = T of a partition of (0, T).
///
/// Intervals are indexed from 0: interval n is (t_n, t_{n+1}) with step
/// step(n) = t_{n+1} - t_n. Immutable after construction.
class TimePartition {
public:
    /// Validates strict monotonicity and t_0 == 0. Throws std::invalid_argument.
    explicit TimePartition(std::vector<double> nodes);

    int size() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
    double final_time() const noexcept { return nodes_.back(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double node(int n) const { return nodes_.at(static_cast<std::size_t>(n)); }
    double step(int n) const { return node(n + 1) - node(n); }
    std::vector<double> steps() const;
    double tau_max() const noexcept { return tau_max_; }
    double tau_min() const noexcept { return tau_min_; }

    /// Index of the interval whose closure contains t. At an interior node the
    /// left interval is returned when prefer_left, the right one otherwise.
    int locate(double t, bool prefer_left = false) const;

    bool operator==(const TimePartition& other) const = default;

private:
    std::vector<double> nodes_;
    double tau_max_ = 0.0;
    double tau_min_ = 0.0;
};

enum class Grading { toward_start, toward_end };

TimePartition build_uniform(double final_time, int intervals);

/// Geometric grading with t_n = T sigma^(N-n) for n >= 1 (toward_start), or its
/// mirror image about T/2 (toward_end).
TimePartition build_geometric(double final_time, int intervals, double sigma,
                              Grading grading = Grading::toward_start);

/// Random steps with tau_n / tau_{n-1} drawn log-uniformly from
/// [1/ratio_cap, ratio_cap], rescaled to total length T. Deterministic in seed.
TimePartition build_random(double final_time, int intervals, std::uint64_t seed,
                           double ratio_cap);

/// max_n tau_n / tau_{n-1}; 1 for a single interval.
double step_ratio_constant(const TimePartition& partition);

/// tau_max / tau_min, the global quasi-uniformity ratio.
double quasi_uniformity_ratio(const TimePartition& partition);

/// Union of node sets; nodes closer than 1e-14 T are collapsed.
TimePartition merge(const TimePartition& a, const TimePartition& b);

/// Splits every interval into `pieces` equal subintervals.
TimePartition subdivide(const TimePartition& partition, int pieces);

enum class FamilyKind { uniform, geometric, random };

/// Parsed form of strings like "geometric:T=1,N=16,sigma=0.5".
struct FamilySpec {
    FamilyKind kind = FamilyKind::uniform;
    double final_time = 1.0;
    std::optional<int> intervals;
    double sigma = 0.5;
    Grading grading = Grading::toward_start;
    std::uint64_t seed = 0;
    double ratio_cap = 2.0;

    /// Bound on step_ratio_constant promised by this kind.
    double declared_step_ratio() const;
    std::string to_string() const;
};

FamilySpec parse_family_spec(const std::string& text);

/// Single partition described by a spec; requires `intervals`.
TimePartition build_partition(const FamilySpec& spec);

/// A refinement family. `levels` are interval counts for uniform/random and
/// geometric layer counts for geometric: geometric level k is
/// build_geometric(T, levels[k], sigma) with every interval cut into 2^k
/// pieces, so tau_max halves per level while the step ratio stays bounded.
/// Random level k uses seed + k, reseeded deterministically (up to 64 times)
/// if its tau_max does not drop below the previous level's.
struct PartitionFamily {
    FamilySpec spec;
    std::vector<int> levels;

    /// Builds all levels and checks the family invariants (step ratio within
    /// the declared constant, tau_max strictly decreasing). Throws
    /// std::invalid_argument on violation.
    std::vector<TimePartition> generate() const;
};

} // namespace dgrecon
