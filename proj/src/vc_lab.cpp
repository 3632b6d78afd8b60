#include "fsel/vc_lab.hpp"

#include <gmpxx.h>

#include <set>

#include "fsel/error.hpp"
#include "fsel/rng.hpp"

namespace fsel {

void PointSet::validate() const {
    for (const auto& p : points) {
        if (p.size() != dim) {
            throw data_error("point set: every point needs " + std::to_string(dim) + " coordinates");
        }
    }
}

namespace {

// Dense tableau for  min sum(a)  s.t.  A v - s + a = 1,  v, s, a >= 0,
// with Bland's rule, so it terminates without cycling.
class PhaseOne {
public:
    PhaseOne(std::vector<std::vector<mpq_class>> a_rows)
        : m_(a_rows.size()), nv_(a_rows.empty() ? 0 : a_rows.front().size()) {
        cols_ = nv_ + 2 * m_;
        tab_.assign(m_, std::vector<mpq_class>(cols_ + 1));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < nv_; ++j) {
                tab_[i][j] = a_rows[i][j];
            }
            tab_[i][nv_ + i] = -1;       // surplus
            tab_[i][nv_ + m_ + i] = 1;   // artificial
            tab_[i][cols_] = 1;          // rhs
            basis_[i] = nv_ + m_ + i;
        }
    }

    bool feasible() {
        // Reduced costs of the phase-1 objective: c_j - sum of row j entries.
        std::vector<mpq_class> cost(cols_ + 1);
        for (std::size_t j = 0; j <= cols_; ++j) {
            const bool artificial = j >= nv_ + m_ && j < cols_;
            cost[j] = artificial ? 1 : 0;
            for (std::size_t i = 0; i < m_; ++i) {
                cost[j] -= tab_[i][j];
            }
        }
        while (true) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (sgn(cost[j]) < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_) {
                // cost[cols_] holds minus the objective value.
                return sgn(cost[cols_]) == 0;
            }
            std::size_t leave = m_;
            mpq_class best_ratio;
            for (std::size_t i = 0; i < m_; ++i) {
                if (sgn(tab_[i][enter]) > 0) {
                    mpq_class r = tab_[i][cols_] / tab_[i][enter];
                    if (leave == m_ || r < best_ratio ||
                        (r == best_ratio && basis_[i] < basis_[leave])) {
                        leave = i;
                        best_ratio = r;
                    }
                }
            }
            if (leave == m_) {
                // Cannot happen for a phase-1 objective bounded below by 0.
                throw numerical_error("phase-1 simplex reported an unbounded direction");
            }
            pivot(leave, enter, cost);
        }
    }

private:
    void pivot(std::size_t r, std::size_t c, std::vector<mpq_class>& cost) {
        const mpq_class p = tab_[r][c];
        for (auto& v : tab_[r]) {
            v /= p;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (i != r && sgn(tab_[i][c]) != 0) {
                const mpq_class f = tab_[i][c];
                for (std::size_t j = 0; j <= cols_; ++j) {
                    tab_[i][j] -= f * tab_[r][j];
                }
            }
        }
        if (sgn(cost[c]) != 0) {
            const mpq_class f = cost[c];
            for (std::size_t j = 0; j <= cols_; ++j) {
                cost[j] -= f * tab_[r][j];
            }
        }
        basis_[r] = c;
    }

    std::size_t m_;
    std::size_t nv_;
    std::size_t cols_ = 0;
    std::vector<std::vector<mpq_class>> tab_;
    std::vector<std::size_t> basis_;
};

void check_size(const PointSet& ps) {
    ps.validate();
    if (ps.size() > ps.cap()) {
        throw config_error("point set of size " + std::to_string(ps.size()) +
                           " exceeds the exhaustive-search cap " + std::to_string(ps.cap()) +
                           " for dimension " + std::to_string(ps.dim));
    }
}

}  // namespace

bool is_separable(const PointSet& ps, std::span<const int> labels, const BlindSet& blind) {
    check_size(ps);
    if (labels.size() != ps.size()) {
        throw data_error("is_separable: label count does not match the point count");
    }
    for (std::size_t b : blind) {
        if (b >= ps.dim) {
            throw config_error("blind coordinate " + std::to_string(b) + " out of range");
        }
    }
    if (ps.size() == 0) {
        return true;
    }
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < ps.dim; ++j) {
        if (!blind.contains(j)) {
            active.push_back(j);
        }
    }
    // Free variables (w_j, b) are split into positive and negative parts.
    std::vector<std::vector<mpq_class>> rows;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const int y = labels[i];
        if (y != 1 && y != -1) {
            throw data_error("is_separable: labels must be -1 or +1");
        }
        std::vector<mpq_class> row;
        for (std::size_t j : active) {
            const mpq_class v(static_cast<long>(y * ps.points[i][j]));
            row.push_back(v);
            row.push_back(-v);
        }
        row.emplace_back(y);
        row.emplace_back(-y);
        rows.push_back(std::move(row));
    }
    return PhaseOne(std::move(rows)).feasible();
}

bool shatters(const PointSet& ps, const BlindSet& blind) {
    check_size(ps);
    const std::size_t s = ps.size();
    std::vector<int> labels(s);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
        for (std::size_t i = 0; i < s; ++i) {
            labels[i] = (mask >> i) & 1 ? 1 : -1;
        }
        if (!is_separable(ps, labels, blind)) {
            return false;
        }
    }
    return true;
}

PointSet blind_project(const PointSet& ps, std::size_t k, std::int64_t alpha) {
    if (k >= ps.dim) {
        throw config_error("blind_project: coordinate " + std::to_string(k) + " out of range");
    }
    PointSet out = ps;
    for (auto& p : out.points) {
        p[k] = alpha;
    }
    return out;
}

PointSet drop_coordinate(const PointSet& ps, std::size_t k) {
    if (k >= ps.dim) {
        throw config_error("drop_coordinate: coordinate " + std::to_string(k) + " out of range");
    }
    PointSet out;
    out.dim = ps.dim - 1;
    for (const auto& p : ps.points) {
        auto q = p;
        q.erase(q.begin() + static_cast<std::ptrdiff_t>(k));
        out.points.push_back(std::move(q));
    }
    return out;
}

PointSet random_point_set(std::size_t dim, std::size_t count, std::uint64_t seed,
                          std::int64_t range) {
    PointSet ps;
    ps.dim = dim;
    CounterRng rng(seed);
    std::set<std::vector<std::int64_t>> seen;
    while (ps.points.size() < count) {
        std::vector<std::int64_t> p(dim);
        for (auto& c : p) {
            c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(range)));
        }
        if (seen.insert(p).second) {
            ps.points.push_back(std::move(p));
        }
    }
    return ps;
}

PointSet general_position_fixture(std::size_t dim, std::size_t count, const BlindSet& blind) {
    PointSet ps;
    ps.dim = dim;
    for (std::size_t t = 1; t <= count; ++t) {
        std::vector<std::int64_t> p(dim);
        std::int64_t power = 1;
        for (std::size_t j = 0; j < dim; ++j) {
            if (blind.contains(j)) {
                p[j] = static_cast<std::int64_t>(t);
            } else {
                power *= static_cast<std::int64_t>(t);
                p[j] = power;
            }
        }
        ps.points.push_back(std::move(p));
    }
    return ps;
}

VcEstimate empirical_vc(std::size_t dim, const BlindSet& blind, std::size_t trials,
                        std::size_t s_max, std::uint64_t seed) {
    if (dim == 0) {
        throw config_error("empirical_vc: dimension must be >= 1");
    }
    const std::size_t cap = 2 * (dim + 2);
    if (s_max == 0 || s_max > cap) {
        s_max = cap;
    }
    VcEstimate est;
    for (std::size_t s = 1; s <= s_max; ++s) {
        bool found = false;
        PointSet candidate = general_position_fixture(dim, s, blind);
        if (shatters(candidate, blind)) {
            found = true;
        }
        for (std::size_t t = 0; !found && t < trials; ++t) {
            candidate = random_point_set(dim, s, substream(substream(seed, s), t));
            found = shatters(candidate, blind);
        }
        if (!found) {
            est.first_failed_size = s;
            break;
        }
        est.vc = s;
        est.witness = std::move(candidate);
    }
    return est;
}

}  // namespace fsel
