#include "doctest.h"
#include "fsel/error.hpp"
#include "fsel/vc_lab.hpp"

using namespace fsel;

namespace {

PointSet pts(std::size_t dim, std::vector<std::vector<std::int64_t>> p) {
    return PointSet{dim, std::move(p)};
}

// Brute-force 1-D threshold oracle: labels realizable by sign(w x + b).
bool separable_1d(const std::vector<std::int64_t>& x, const std::vector<int>& y) {
    for (int dir : {1, -1}) {
        std::int64_t max_neg = INT64_MIN;
        std::int64_t min_pos = INT64_MAX;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::int64_t v = dir * x[i];
            if (y[i] > 0) {
                min_pos = std::min(min_pos, v);
            } else {
                max_neg = std::max(max_neg, v);
            }
        }
        if (max_neg < min_pos) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("separability examples") {
    const int lab2[] = {-1, 1};
    CHECK(is_separable(pts(1, {{0}, {1}}), lab2));
    const PointSet xor_pts = pts(2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}});
    const int xor_lab[] = {1, 1, -1, -1};
    CHECK_FALSE(is_separable(xor_pts, xor_lab));
    // Separable through the second coordinate only.
    const PointSet second = pts(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const int by_second[] = {-1, 1, -1, 1};
    CHECK(is_separable(second, by_second));
    CHECK_FALSE(is_separable(second, by_second, BlindSet{1}));
    CHECK(is_separable(second, std::vector<int>{-1, -1, 1, 1}, BlindSet{1}));
}

TEST_CASE("separability matches a 1-D oracle and the relabeling symmetry") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const PointSet ps = random_point_set(1, 5, seed, 20);
        std::vector<std::int64_t> x;
        for (const auto& p : ps.points) {
            x.push_back(p[0]);
        }
        for (unsigned mask = 0; mask < 32; ++mask) {
            std::vector<int> y, ny;
            for (unsigned i = 0; i < 5; ++i) {
                y.push_back(mask >> i & 1 ? 1 : -1);
                ny.push_back(-y.back());
            }
            const bool s = is_separable(ps, y);
            CHECK(s == separable_1d(x, y));
            CHECK(s == is_separable(ps, ny));
        }
    }
}

TEST_CASE("shattering examples") {
    CHECK(shatters(pts(2, {{0, 0}, {1, 0}, {0, 1}})));
    CHECK_FALSE(shatters(pts(2, {{0, 0}, {2, 0}, {2, 2}, {0, 2}})));
    CHECK(shatters(pts(1, {{-3}, {5}})));
    CHECK_FALSE(shatters(pts(1, {{0}, {1}, {2}})));
    CHECK_THROWS_AS(shatters(random_point_set(1, 7, 1)), Error);
}

TEST_CASE("blind projection") {
    const PointSet ps = pts(2, {{1, 2}, {3, 4}});
    const PointSet pr = blind_project(ps, 1, 0);
    CHECK(pr.points == std::vector<std::vector<std::int64_t>>{{1, 0}, {3, 0}});
    CHECK(blind_project(pr, 1, 0).points == pr.points);
    const PointSet same = pts(2, {{1, 5}, {3, 5}});
    CHECK(blind_project(same, 1, 5).points == same.points);
    CHECK_THROWS_AS(blind_project(ps, 2, 0), Error);
    CHECK(drop_coordinate(ps, 0).points == std::vector<std::vector<std::int64_t>>{{2}, {4}});
}

TEST_CASE("empirical vc dimension") {
    CHECK(empirical_vc(1, {}, 20, 0, 1).vc == 2);
    CHECK(empirical_vc(2, {}, 20, 0, 1).vc == 3);
    CHECK(empirical_vc(2, {0}, 20, 0, 1).vc == 2);
    CHECK(empirical_vc(2, {1}, 20, 0, 1).vc == 2);
    CHECK(empirical_vc(3, {}, 20, 6, 1).vc == 4);
    const VcEstimate e = empirical_vc(2, {}, 10, 0, 3);
    CHECK(e.witness.size() == 3);
    CHECK(shatters(e.witness));
    CHECK(e.first_failed_size == 4);
}

TEST_CASE("blind shattering survives projection and coordinate drop") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t dim = 2 + seed % 2;
        const std::size_t size = 2 + seed % 3;
        const PointSet ps = random_point_set(dim, size, seed, 8);
        const std::size_t k = seed % dim;
        const bool base = shatters(ps, {k});
        for (std::int64_t a : {-3, 0, 7}) {
            const PointSet proj = blind_project(ps, k, a);
            CHECK(base == shatters(proj, {k}));
            CHECK(shatters(proj, {k}) == shatters(drop_coordinate(proj, k)));
        }
    }
}
