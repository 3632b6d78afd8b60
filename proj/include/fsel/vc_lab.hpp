#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace fsel {

/// Finite point set on an integer grid. Strict linear separability is
/// invariant under positive scaling, so integer coordinates represent any
/// rational configuration exactly.
struct PointSet {
    std::size_t dim = 0;
    std::vector<std::vector<std::int64_t>> points;

    std::size_t size() const noexcept { return points.size(); }
    /// Exhaustive-search cap on the number of points: 2 (dim + 2).
    std::size_t cap() const noexcept { return 2 * (dim + 2); }
    void validate() const;
};

/// Coordinates (0-based) that a classifier of the blind class must ignore.
using BlindSet = std::set<std::size_t>;

/// Exact decision: is there (w, b) with w_j = 0 for j in `blind` and
/// y_i (w . x_i + b) >= 1 for every i? Solved as a phase-1 linear program
/// over rationals.
bool is_separable(const PointSet& ps, std::span<const int> labels, const BlindSet& blind = {});

/// True when every one of the 2^s labelings is separable.
bool shatters(const PointSet& ps, const BlindSet& blind = {});

/// Replaces coordinate k of every point by `alpha`.
PointSet blind_project(const PointSet& ps, std::size_t k, std::int64_t alpha);

/// Removes coordinate k, producing a (dim - 1)-dimensional set.
PointSet drop_coordinate(const PointSet& ps, std::size_t k);

/// Seeded set of `count` distinct points with coordinates in [0, range).
PointSet random_point_set(std::size_t dim, std::size_t count, std::uint64_t seed,
                          std::int64_t range = 1000);

/// Points on the moment curve t -> (t, t^2, ...) over the non-blind
/// coordinates, which are in general position.
PointSet general_position_fixture(std::size_t dim, std::size_t count, const BlindSet& blind = {});

struct VcEstimate {
    /// Largest size shown to be shattered (a lower bound on the VC dimension).
    std::size_t vc = 0;
    PointSet witness;
    /// Size of the first set size for which no shattered set was found,
    /// or 0 if the search reached s_max.
    std::size_t first_failed_size = 0;
};

/// Budgeted search: for s = 1, 2, ... up to s_max, tries the general-position
/// fixture and `trials` random sets until one is shattered. Stops at the
/// first size where none is.
VcEstimate empirical_vc(std::size_t dim, const BlindSet& blind, std::size_t trials,
                        std::size_t s_max, std::uint64_t seed);

}  // namespace fsel
