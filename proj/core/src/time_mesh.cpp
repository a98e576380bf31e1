#include "dgrecon/time_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace dgrecon {

namespace {

constexpr double kNodeTolerance = 1e-14;

void require(bool condition, const std::string& message)
{
    if (!condition)
        throw std::invalid_argument(message);
}

double parse_number(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == value.size() && !value.empty(), "bad value for '" + key + "': " + value);
    return out;
}

long long parse_integer(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == value.size() && !value.empty(), "bad value for '" + key + "': " + value);
    return out;
}

} // namespace

TimePartition::TimePartition(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    require(nodes_.size() >= 2, "time partition needs at least two nodes");
    require(nodes_.front() == 0.0, "time partition must start at t_0 = 0");
    tau_max_ = 0.0;
    tau_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < nodes_.size(); ++n) {
        const double tau = nodes_[n] - nodes_[n - 1];
        require(std::isfinite(nodes_[n]) && tau > 0.0,
                fmt::format("time partition nodes must be strictly increasing (node {})", n));
        tau_max_ = std::max(tau_max_, tau);
        tau_min_ = std::min(tau_min_, tau);
    }
}

std::vector<double> TimePartition::steps() const
{
    std::vector<double> out(static_cast<std::size_t>(size()));
    for (int n = 0; n < size(); ++n)
        out[static_cast<std::size_t>(n)] = step(n);
    return out;
}

int TimePartition::locate(double t, bool prefer_left) const
{
    const double slack = kNodeTolerance * final_time();
    if (t < -slack || t > final_time() + slack)
        throw std::invalid_argument(fmt::format("time {} outside [0, {}]", t, final_time()));
    // First node strictly greater than t.
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    int n = static_cast<int>(it - nodes_.begin()) - 1;
    n = std::clamp(n, 0, size() - 1);
    if (prefer_left && n > 0 && t == nodes_[static_cast<std::size_t>(n)])
        --n;
    return n;
}

TimePartition build_uniform(double final_time, int intervals)
{
    require(final_time > 0.0, "final time must be positive");
    require(intervals >= 1, "interval count must be positive");
    std::vector<double> nodes(static_cast<std::size_t>(intervals) + 1);
    for (int n = 0; n <= intervals; ++n)
        nodes[static_cast<std::size_t>(n)] = final_time * n / intervals;
    nodes.back() = final_time;
    return TimePartition(std::move(nodes));
}

TimePartition build_geometric(double final_time, int intervals, double sigma, Grading grading)
{
    require(final_time > 0.0, "final time must be positive");
    require(intervals >= 1, "interval count must be positive");
    require(sigma > 0.0 && sigma < 1.0, "geometric grading factor must lie in (0, 1)");
    std::vector<double> nodes(static_cast<std::size_t>(intervals) + 1, 0.0);
    for (int n = 1; n <= intervals; ++n)
        nodes[static_cast<std::size_t>(n)] = final_time * std::pow(sigma, intervals - n);
    nodes.back() = final_time;
    if (grading == Grading::toward_end) {
        std::vector<double> mirrored(nodes.size());
        for (std::size_t n = 0; n < nodes.size(); ++n)
            mirrored[n] = final_time - nodes[nodes.size() - 1 - n];
        mirrored.front() = 0.0;
        mirrored.back() = final_time;
        nodes = std::move(mirrored);
    }
    return TimePartition(std::move(nodes));
}

TimePartition build_random(double final_time, int intervals, std::uint64_t seed, double ratio_cap)
{
    require(final_time > 0.0, "final time must be positive");
    require(intervals >= 1, "interval count must be positive");
    require(ratio_cap >= 1.0, "ratio cap must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> exponent(-1.0, 1.0);
    std::vector<double> steps(static_cast<std::size_t>(intervals), 1.0);
    for (std::size_t n = 1; n < steps.size(); ++n)
        steps[n] = steps[n - 1] * std::pow(ratio_cap, exponent(rng));

    double total = 0.0;
    for (double s : steps)
        total += s;
    std::vector<double> nodes(steps.size() + 1, 0.0);
    double running = 0.0;
    for (std::size_t n = 0; n < steps.size(); ++n) {
        running += steps[n];
        nodes[n + 1] = final_time * (running / total);
    }
    nodes.back() = final_time;
    return TimePartition(std::move(nodes));
}

double step_ratio_constant(const TimePartition& partition)
{
    double ratio = 1.0;
    for (int n = 1; n < partition.size(); ++n)
        ratio = std::max(ratio, partition.step(n) / partition.step(n - 1));
    return ratio;
}

double quasi_uniformity_ratio(const TimePartition& partition)
{
    return partition.tau_max() / partition.tau_min();
}

TimePartition merge(const TimePartition& a, const TimePartition& b)
{
    const double T = a.final_time();
    require(std::abs(T - b.final_time()) <= kNodeTolerance * T,
            "cannot merge partitions with different final times");
    std::vector<double> all;
    all.reserve(a.nodes().size() + b.nodes().size());
    all.insert(all.end(), a.nodes().begin(), a.nodes().end());
    all.insert(all.end(), b.nodes().begin(), b.nodes().end());
    std::sort(all.begin(), all.end());

    const double tol = kNodeTolerance * T;
    std::vector<double> nodes{0.0};
    for (double t : all) {
        if (t - nodes.back() > tol)
            nodes.push_back(t);
    }
    // The final node is T exactly, even if a slightly smaller copy came first.
    if (T - nodes.back() <= tol)
        nodes.back() = T;
    else
        nodes.push_back(T);
    return TimePartition(std::move(nodes));
}

TimePartition subdivide(const TimePartition& partition, int pieces)
{
    require(pieces >= 1, "subdivision count must be positive");
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(partition.size() * pieces) + 1);
    nodes.push_back(0.0);
    for (int n = 0; n < partition.size(); ++n) {
        const double a = partition.node(n);
        const double tau = partition.step(n);
        for (int j = 1; j < pieces; ++j)
            nodes.push_back(a + tau * j / pieces);
        nodes.push_back(partition.node(n + 1));
    }
    return TimePartition(std::move(nodes));
}

double FamilySpec::declared_step_ratio() const
{
    switch (kind) {
    case FamilyKind::uniform:
        return 1.0;
    case FamilyKind::geometric:
        if (grading == Grading::toward_start)
            return std::max(1.0 / sigma, (1.0 - sigma) / sigma);
        return std::max({1.0, sigma, sigma / (1.0 - sigma)});
    case FamilyKind::random:
        return ratio_cap;
    }
    return 1.0;
}

std::string FamilySpec::to_string() const
{
    std::string out;
    switch (kind) {
    case FamilyKind::uniform:
        out = fmt::format("uniform:T={}", final_time);
        break;
    case FamilyKind::geometric:
        out = fmt::format("geometric:T={},sigma={}", final_time, sigma);
        if (grading == Grading::toward_end)
            out += ",dir=end";
        break;
    case FamilyKind::random:
        out = fmt::format("random:T={},seed={},cap={}", final_time, seed, ratio_cap);
        break;
    }
    if (intervals)
        out += fmt::format(",N={}", *intervals);
    return out;
}

FamilySpec parse_family_spec(const std::string& text)
{
    FamilySpec spec;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "uniform")
        spec.kind = FamilyKind::uniform;
    else if (kind == "geometric")
        spec.kind = FamilyKind::geometric;
    else if (kind == "random")
        spec.kind = FamilyKind::random;
    else
        throw std::invalid_argument("unknown partition family '" + kind + "'");

    if (colon != std::string::npos) {
        std::istringstream fields(text.substr(colon + 1));
        std::string field;
        while (std::getline(fields, field, ',')) {
            if (field.empty())
                continue;
            const auto eq = field.find('=');
            require(eq != std::string::npos, "expected key=value in family spec, got '" + field + "'");
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "T")
                spec.final_time = parse_number(key, value);
            else if (key == "N")
                spec.intervals = static_cast<int>(parse_integer(key, value));
            else if (key == "sigma")
                spec.sigma = parse_number(key, value);
            else if (key == "seed")
                spec.seed = static_cast<std::uint64_t>(parse_integer(key, value));
            else if (key == "cap" || key == "ratio_cap")
                spec.ratio_cap = parse_number(key, value);
            else if (key == "dir")
                spec.grading = value == "end" ? Grading::toward_end : Grading::toward_start;
            else
                throw std::invalid_argument("unknown family spec key '" + key + "'");
        }
    }
    require(spec.final_time > 0.0, "family spec: T must be positive");
    if (spec.kind == FamilyKind::geometric)
        require(spec.sigma > 0.0 && spec.sigma < 1.0, "family spec: sigma must lie in (0, 1)");
    if (spec.kind == FamilyKind::random)
        require(spec.ratio_cap >= 1.0, "family spec: cap must be >= 1");
    return spec;
}

TimePartition build_partition(const FamilySpec& spec)
{
    require(spec.intervals.has_value(), "family spec has no interval count N");
    switch (spec.kind) {
    case FamilyKind::uniform:
        return build_uniform(spec.final_time, *spec.intervals);
    case FamilyKind::geometric:
        return build_geometric(spec.final_time, *spec.intervals, spec.sigma, spec.grading);
    case FamilyKind::random:
        return build_random(spec.final_time, *spec.intervals, spec.seed, spec.ratio_cap);
    }
    throw std::invalid_argument("unknown family kind");
}

namespace {

constexpr int kRandomAttempts = 64;
constexpr std::uint64_t kReseedStride = 1000003;

} // namespace

std::vector<TimePartition> PartitionFamily::generate() const
{
    require(!levels.empty(), "partition family has no levels");
    std::vector<TimePartition> out;
    out.reserve(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const int count = levels[k];
        switch (spec.kind) {
        case FamilyKind::uniform:
            out.push_back(build_uniform(spec.final_time, count));
            break;
        case FamilyKind::geometric:
            out.push_back(subdivide(build_geometric(spec.final_time, count, spec.sigma, spec.grading),
                                    1 << k));
            break;
        case FamilyKind::random: {
            // Reseed deterministically until the level refines the previous one.
            std::uint64_t seed = spec.seed + k;
            TimePartition candidate = build_random(spec.final_time, count, seed, spec.ratio_cap);
            for (int attempt = 1; k > 0 && attempt < kRandomAttempts &&
                                  !(candidate.tau_max() < out[k - 1].tau_max());
                 ++attempt) {
                seed = spec.seed + k + kReseedStride * static_cast<std::uint64_t>(attempt);
                candidate = build_random(spec.final_time, count, seed, spec.ratio_cap);
            }
            out.push_back(std::move(candidate));
            break;
        }
        }
        const double bound = spec.declared_step_ratio();
        if (step_ratio_constant(out.back()) > bound * (1.0 + 1e-12))
            throw std::invalid_argument(fmt::format(
                "family level {} violates the declared step ratio {}", k, bound));
        if (k > 0 && !(out[k].tau_max() < out[k - 1].tau_max()))
            throw std::invalid_argument(
                fmt::format("family level {} does not decrease tau_max", k));
    }
    return out;
}

} // namespace dgrecon
