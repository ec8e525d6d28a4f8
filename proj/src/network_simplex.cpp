#include "vlab/network_simplex.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "vlab/error.hpp"

namespace vlab {

namespace {

class Simplex {
public:
    Simplex(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& cost)
        : n1_(a.size()), n2_(b.size()), cost_(cost) {
        nodes_ = n1_ + n2_ + 1;
        root_ = n1_ + n2_;
        real_arcs_ = n1_ * n2_;
        double cmax = 0.0;
        for (double c : cost_) cmax = std::max(cmax, std::abs(c));
        art_ = (static_cast<double>(nodes_) + 1.0) * std::max(cmax, 1.0) + 1.0;
        tol_ = 64.0 * DBL_EPSILON * art_;

        flow_.assign(real_arcs_ + nodes_ - 1, 0.0);
        parent_.assign(nodes_, -1);
        pred_.assign(nodes_, 0);
        up_.assign(nodes_, 0);
        depth_.assign(nodes_, 0);
        pi_.assign(nodes_, 0.0);
        children_.assign(nodes_, {});

        double sa = 0.0, sb = 0.0;
        for (double x : a) sa += x;
        for (double x : b) sb += x;
        const double scale = sa / sb;
        for (std::size_t i = 0; i < n1_; ++i) {
            attach_artificial(i, a[i], true);
        }
        for (std::size_t j = 0; j < n2_; ++j) {
            attach_artificial(n1_ + j, b[j] * scale, false);
        }
    }

    TransportSolution run() {
        TransportSolution sol;
        const std::size_t block = std::max<std::size_t>(
            16, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
        std::size_t next = 0;
        while (true) {
            // block pricing: scan up to `block` arcs at a time, take the most negative
            std::size_t best = real_arcs_;
            double best_rc = -tol_;
            std::size_t scanned = 0;
            std::size_t in_block = 0;
            while (scanned < real_arcs_) {
                const std::size_t e = next;
                next = next + 1 == real_arcs_ ? 0 : next + 1;
                ++scanned;
                ++in_block;
                const double rc = reduced_cost(e);
                if (rc < best_rc) {
                    best_rc = rc;
                    best = e;
                }
                if (in_block == block) {
                    if (best != real_arcs_) break;
                    in_block = 0;
                }
            }
            if (best == real_arcs_) break;
            pivot(best);
            ++sol.pivots;
        }
        for (std::size_t e = real_arcs_; e < flow_.size(); ++e) {
            if (flow_[e] > 1e-9) throw Error("transport problem infeasible (artificial flow remains)");
        }
        for (std::size_t e = 0; e < real_arcs_; ++e) {
            if (flow_[e] > 0.0) {
                sol.flows.push_back({e / n2_, e % n2_, flow_[e]});
                sol.cost += flow_[e] * cost_[e];
            }
        }
        sol.u.resize(n1_);
        sol.w.resize(n2_);
        // c_ij + pi_i - pi_j >= 0  <=>  c_ij - (-pi_i) - (pi_j) >= 0
        for (std::size_t i = 0; i < n1_; ++i) sol.u[i] = -pi_[i];
        for (std::size_t j = 0; j < n2_; ++j) sol.w[j] = pi_[n1_ + j];
        return sol;
    }

private:
    std::size_t n1_, n2_, nodes_, root_, real_arcs_;
    const std::vector<double>& cost_;
    double art_ = 0.0;
    double tol_ = 0.0;
    std::vector<double> flow_;
    std::vector<long> parent_;
    std::vector<std::size_t> pred_;
    std::vector<char> up_;  // pred arc points from the node to its parent
    std::vector<std::size_t> depth_;
    std::vector<double> pi_;
    std::vector<std::vector<std::size_t>> children_;

    std::size_t source(std::size_t e) const {
        if (e < real_arcs_) return e / n2_;
        const std::size_t v = e - real_arcs_;
        return v < n1_ ? v : root_;
    }
    std::size_t target(std::size_t e) const {
        if (e < real_arcs_) return n1_ + e % n2_;
        const std::size_t v = e - real_arcs_;
        return v < n1_ ? root_ : v;
    }
    double arc_cost(std::size_t e) const { return e < real_arcs_ ? cost_[e] : art_; }
    double reduced_cost(std::size_t e) const { return arc_cost(e) + pi_[source(e)] - pi_[target(e)]; }

    void attach_artificial(std::size_t v, double supply, bool is_source) {
        const std::size_t e = real_arcs_ + v;
        flow_[e] = supply;
        parent_[v] = static_cast<long>(root_);
        pred_[v] = e;
        up_[v] = is_source ? 1 : 0;
        depth_[v] = 1;
        pi_[v] = is_source ? -art_ : art_;
        children_[root_].push_back(v);
    }

    void detach(std::size_t child, std::size_t par) {
        auto& c = children_[par];
        auto it = std::find(c.begin(), c.end(), child);
        *it = c.back();
        c.pop_back();
    }

    void pivot(std::size_t in) {
        const std::size_t first = source(in);
        const std::size_t second = target(in);
        std::size_t u = first, v = second;
        while (u != v) {
            if (depth_[u] >= depth_[v])
                u = static_cast<std::size_t>(parent_[u]);
            else
                v = static_cast<std::size_t>(parent_[v]);
        }
        const std::size_t join = u;

        constexpr double inf = std::numeric_limits<double>::infinity();
        double delta = inf;
        std::size_t u_out = 0;
        int side = 0;
        for (std::size_t x = first; x != join; x = static_cast<std::size_t>(parent_[x])) {
            const double d = up_[x] ? flow_[pred_[x]] : inf;
            if (d < delta) {
                delta = d;
                u_out = x;
                side = 1;
            }
        }
        for (std::size_t x = second; x != join; x = static_cast<std::size_t>(parent_[x])) {
            const double d = up_[x] ? inf : flow_[pred_[x]];
            if (d <= delta) {
                delta = d;
                u_out = x;
                side = 2;
            }
        }
        if (side == 0) throw Error("transport problem unbounded");

        if (delta > 0.0) {
            flow_[in] += delta;
            for (std::size_t x = first; x != join; x = static_cast<std::size_t>(parent_[x]))
                flow_[pred_[x]] += up_[x] ? -delta : delta;
            for (std::size_t x = second; x != join; x = static_cast<std::size_t>(parent_[x]))
                flow_[pred_[x]] += up_[x] ? delta : -delta;
        }

        // re-hang the path from the entering endpoint up to u_out
        std::size_t cur = side == 1 ? first : second;
        std::size_t new_parent = side == 1 ? second : first;
        std::size_t new_pred = in;
        char new_up = side == 1 ? 1 : 0;
        const std::size_t top = cur;
        while (true) {
            const std::size_t old_parent = static_cast<std::size_t>(parent_[cur]);
            const std::size_t old_pred = pred_[cur];
            const char old_up = up_[cur];
            detach(cur, old_parent);
            parent_[cur] = static_cast<long>(new_parent);
            pred_[cur] = new_pred;
            up_[cur] = new_up;
            children_[new_parent].push_back(cur);
            if (cur == u_out) break;
            new_parent = cur;
            new_pred = old_pred;
            new_up = old_up ? 0 : 1;
            cur = old_parent;
        }

        // refresh potentials and depths of the moved subtree
        const std::size_t p = static_cast<std::size_t>(parent_[top]);
        const double c = arc_cost(in);
        const double new_pi = up_[top] ? pi_[p] - c : pi_[p] + c;
        const double sigma = new_pi - pi_[top];
        stack_.clear();
        stack_.push_back(top);
        while (!stack_.empty()) {
            const std::size_t x = stack_.back();
            stack_.pop_back();
            pi_[x] += sigma;
            depth_[x] = depth_[static_cast<std::size_t>(parent_[x])] + 1;
            for (std::size_t ch : children_[x]) stack_.push_back(ch);
        }
    }

    std::vector<std::size_t> stack_;
};

}  // namespace

TransportSolution solve_transport(const std::vector<double>& a, const std::vector<double>& b,
                                  const std::vector<double>& cost) {
    if (a.empty() || b.empty()) throw DomainError("transport problem with an empty marginal");
    if (cost.size() != a.size() * b.size()) throw MismatchError("cost matrix size does not match the marginals");
    for (double x : a)
        if (!(x > 0.0)) throw DomainError("source weights must be positive");
    for (double x : b)
        if (!(x > 0.0)) throw DomainError("target weights must be positive");
    Simplex s(a, b, cost);
    return s.run();
}

}  // namespace vlab
