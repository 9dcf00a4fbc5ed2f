#ifndef SCENREP_NETWORK_SIMPLEX_HPP
#define SCENREP_NETWORK_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "scenrep/error.hpp"

namespace scenrep::detail {

// Primal network simplex specialized to the dense transportation problem:
// m sources with integer supplies, n sinks with integer demands, an arc for
// every (source, sink) pair. Supplies and demands must balance. Flows stay
// integral throughout, so the optimum is exact up to cost arithmetic.
//
// Degeneracy: uniform empirical masses carry huge tie structure and stall
// the simplex in zero-length pivots. The solver therefore runs on Charnes-
// perturbed masses (scale by K > m, +1 per supply, +m on the last demand),
// which keeps bases non-degenerate, and re-solves the final tree's flows
// with the original masses. K > m makes that substitution feasible, and
// optimality only depends on the duals, so the result is exact for the
// original problem.
//
// Entering arc: Dantzig rule (most negative reduced cost). Problems small
// enough to scan cheaply use the full rule; larger ones apply it per row
// block with a persistent cursor, which prices identically at optimality
// and keeps pivots affordable at ~10^7 arcs. A run of degenerate pivots
// longer than 2(m+n) switches to Bland's rule until flow moves again.
// Leaving arc: minimum ratio, ties broken by lowest arc index.
//
// The Cost provider supplies single entries via operator()(i, j) and
// contiguous row blocks via rows(i0, i1, scratch).
template <class Cost>
class TransportSimplex {
 public:
  struct Result {
    double objective = 0.0;  // sum of cost * flow in raw mass units
    std::vector<std::tuple<int, int, std::int64_t>> flows;
    std::vector<double> dual_source;
    std::vector<double> dual_sink;
    std::int64_t pivots = 0;
  };

  TransportSimplex(std::vector<std::int64_t> supply, std::vector<std::int64_t> demand,
                   const Cost& cost)
      : a_(std::move(supply)), b_(std::move(demand)), cost_(cost) {
    m_ = static_cast<int>(a_.size());
    n_ = static_cast<int>(b_.size());
    if (m_ == 0 || n_ == 0)
      throw Error(ErrorCode::InvalidArgument, "transportation problem needs both sides");
    std::int64_t total_a = 0, total_b = 0;
    for (auto v : a_) total_a += v;
    for (auto v : b_) total_b += v;
    if (total_a != total_b)
      throw Error(ErrorCode::InvalidArgument, "unbalanced transportation problem");
    eps_ = 1e-11 * std::max(1.0, cost_.scale());
  }

  Result run() {
    // Charnes perturbation; see the class comment.
    const std::int64_t k = m_ + 1;
    pa_.resize(a_.size());
    pb_.resize(b_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) pa_[i] = k * a_[i] + 1;
    for (std::size_t j = 0; j < b_.size(); ++j) pb_[j] = k * b_[j];
    pb_.back() += m_;

    init_northwest_tree();
    init_potentials();

    const bool full_dantzig = static_cast<std::int64_t>(m_) * n_ <= 65536;
    const std::int64_t max_pivots =
        4'000'000 + 256LL * (m_ + n_);
    std::int64_t pivots = 0;
    std::int64_t degenerate_run = 0;
    bool bland = false;
    int refresh_countdown = kRefreshInterval;

    while (true) {
      int ei = -1, ej = -1;
      bool found = bland ? price_bland(ei, ej)
                         : (full_dantzig ? price_full(ei, ej) : price_blocks(ei, ej));
      if (!found) {
        // Confirm with fresh potentials before declaring optimality; long
        // pivot chains accumulate drift in pi.
        refresh_potentials();
        if (!price_full(ei, ej)) break;
      }

      const std::int64_t moved = pivot(ei, m_ + ej);
      ++pivots;
      if (moved == 0) {
        if (++degenerate_run > 2LL * (m_ + n_)) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (--refresh_countdown == 0) {
        refresh_potentials();
        refresh_countdown = kRefreshInterval;
      }
      if (pivots > max_pivots)
        throw Error(ErrorCode::SolverNonConvergence,
                    "pivot limit reached at " + std::to_string(pivots));
    }

    restore_original_flows();

    Result result;
    result.pivots = pivots;
    result.dual_source.assign(pi_.begin(), pi_.begin() + m_);
    result.dual_sink.assign(pi_.begin() + m_, pi_.end());
    for (int v = 0; v < m_ + n_; ++v) {
      if (v == root_ || flow_up_[v] <= 0) continue;
      const auto [i, j] = arc_of(v);
      result.flows.emplace_back(i, j, flow_up_[v]);
      result.objective += cost_(i, j) * static_cast<double>(flow_up_[v]);
    }
    std::sort(result.flows.begin(), result.flows.end());
    return result;
  }

 private:
  static constexpr int kRefreshInterval = 8192;

  std::vector<std::int64_t> a_, b_;    // original masses
  std::vector<std::int64_t> pa_, pb_;  // perturbed masses the pivots run on
  const Cost& cost_;
  int m_ = 0, n_ = 0;
  int root_ = 0;
  double eps_ = 0.0;

  std::vector<int> parent_, depth_, first_child_, next_sib_, prev_sib_;
  std::vector<std::int64_t> flow_up_;
  std::vector<double> pi_;
  std::vector<double> scratch_;
  std::vector<int> path_s_, path_t_, chain_;
  int cursor_ = 0;

  // (source index, sink index) of the arc between v and its parent.
  std::pair<int, int> arc_of(int v) const {
    const int p = parent_[v];
    return v < m_ ? std::pair<int, int>{v, p - m_} : std::pair<int, int>{p, v - m_};
  }

  std::int64_t arc_index(int v) const {
    const auto [i, j] = arc_of(v);
    return static_cast<std::int64_t>(i) * n_ + j;
  }

  void attach_child(int v, int p) {
    prev_sib_[v] = -1;
    next_sib_[v] = first_child_[p];
    if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = v;
    first_child_[p] = v;
  }

  void detach_child(int v, int p) {
    if (prev_sib_[v] >= 0)
      next_sib_[prev_sib_[v]] = next_sib_[v];
    else
      first_child_[p] = next_sib_[v];
    if (next_sib_[v] >= 0) prev_sib_[next_sib_[v]] = prev_sib_[v];
  }

  // Northwest-corner starting basis: a staircase of m+n-1 cells in which
  // every step attaches one new node to the tree.
  void init_northwest_tree() {
    const int v_count = m_ + n_;
    parent_.assign(v_count, -1);
    depth_.assign(v_count, 0);
    first_child_.assign(v_count, -1);
    next_sib_.assign(v_count, -1);
    prev_sib_.assign(v_count, -1);
    flow_up_.assign(v_count, 0);
    pi_.assign(v_count, 0.0);
    root_ = 0;

    int i = 0, j = 0;
    std::int64_t ra = pa_[0], rb = pb_[0];
    bool first = true;
    while (true) {
      const std::int64_t f = std::min(ra, rb);
      if (first) {
        parent_[m_] = 0;
        flow_up_[m_] = f;
        first = false;
      } else {
        // Exactly one index advanced, so one endpoint is new to the tree.
        const bool source_is_new = parent_[i] < 0 && i != root_;
        const int fresh = source_is_new ? i : m_ + j;
        const int old = source_is_new ? m_ + j : i;
        parent_[fresh] = old;
        flow_up_[fresh] = f;
      }
      ra -= f;
      rb -= f;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (ra == 0 && i < m_ - 1) {
        ++i;
        ra = pa_[i];
      } else {
        ++j;
        rb = pb_[j];
      }
    }

    for (int v = 0; v < v_count; ++v)
      if (v != root_) attach_child(v, parent_[v]);
    refresh_depths_from(root_, 0);
  }

  void refresh_depths_from(int start, int base_depth) {
    depth_[start] = base_depth;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int c = first_child_[v]; c >= 0; c = next_sib_[c]) {
        depth_[c] = depth_[v] + 1;
        stack.push_back(c);
      }
    }
  }

  void init_potentials() { refresh_potentials(); }

  // The final tree determines the flows uniquely; re-solve them against the
  // unperturbed masses (children push their imbalance toward the root).
  void restore_original_flows() {
    const int v_count = m_ + n_;
    std::vector<int> preorder;
    preorder.reserve(static_cast<std::size_t>(v_count));
    std::vector<int> stack{root_};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      preorder.push_back(v);
      for (int c = first_child_[v]; c >= 0; c = next_sib_[c]) stack.push_back(c);
    }

    std::vector<std::int64_t> toward_parent(static_cast<std::size_t>(v_count));
    for (int v = 0; v < v_count; ++v)
      toward_parent[static_cast<std::size_t>(v)] =
          v < m_ ? a_[static_cast<std::size_t>(v)] : -b_[static_cast<std::size_t>(v - m_)];

    for (auto it = preorder.rbegin(); it != preorder.rend(); ++it) {
      const int v = *it;
      if (v == root_) continue;
      const std::int64_t s = toward_parent[static_cast<std::size_t>(v)];
      const std::int64_t flow = v < m_ ? s : -s;
      if (flow < 0)
        throw Error(ErrorCode::SolverNonConvergence,
                    "perturbed basis infeasible for original masses");
      flow_up_[v] = flow;
      toward_parent[static_cast<std::size_t>(parent_[v])] += s;
    }
  }

  void refresh_potentials() {
    pi_[root_] = 0.0;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int c = first_child_[v]; c >= 0; c = next_sib_[c]) {
        const auto [i, j] = arc_of(c);
        pi_[c] = cost_(i, j) - pi_[v];
        stack.push_back(c);
      }
    }
  }

  // Most negative reduced cost over every arc; lowest index wins ties.
  bool price_full(int& ei, int& ej) {
    double best = -eps_;
    ei = -1;
    for (int i = 0; i < m_; ++i) {
      const double* row = cost_.rows(i, i + 1, scratch_);
      const double ui = pi_[i];
      for (int j = 0; j < n_; ++j) {
        const double r = row[j] - ui - pi_[m_ + j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
        }
      }
    }
    return ei >= 0;
  }

  // Dantzig rule per row block, resuming at the row that produced the last
  // entering arc.
  bool price_blocks(int& ei, int& ej) {
    for (int step = 0; step < m_; ++step) {
      const int i = (cursor_ + step) % m_;
      const double* row = cost_.rows(i, i + 1, scratch_);
      const double ui = pi_[i];
      double best = -eps_;
      int best_j = -1;
      for (int j = 0; j < n_; ++j) {
        const double r = row[j] - ui - pi_[m_ + j];
        if (r < best) {
          best = r;
          best_j = j;
        }
      }
      if (best_j >= 0) {
        cursor_ = i;
        ei = i;
        ej = best_j;
        return true;
      }
    }
    return false;
  }

  // First negative arc in index order.
  bool price_bland(int& ei, int& ej) {
    for (int i = 0; i < m_; ++i) {
      const double* row = cost_.rows(i, i + 1, scratch_);
      const double ui = pi_[i];
      for (int j = 0; j < n_; ++j) {
        if (row[j] - ui - pi_[m_ + j] < -eps_) {
          ei = i;
          ej = j;
          return true;
        }
      }
    }
    return false;
  }

  // One basis exchange for entering arc (si, tj); returns the moved flow.
  std::int64_t pivot(int si, int tj) {
    path_s_.clear();
    path_t_.clear();
    int u = si, v = tj;
    while (depth_[u] > depth_[v]) {
      path_s_.push_back(u);
      u = parent_[u];
    }
    while (depth_[v] > depth_[u]) {
      path_t_.push_back(v);
      v = parent_[v];
    }
    while (u != v) {
      path_s_.push_back(u);
      u = parent_[u];
      path_t_.push_back(v);
      v = parent_[v];
    }

    // The cycle runs si -> tj on the entering arc, then tj up to the common
    // ancestor and back down to si. Sources walking up the s side and sinks
    // walking up the t side carry flow against the cycle direction.
    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    int leave = -1;
    std::int64_t leave_arc = -1;
    bool leave_on_s = false;
    auto consider = [&](int x, bool on_s) {
      const bool backward = on_s ? (x < m_) : (x >= m_);
      if (!backward) return;
      const std::int64_t f = flow_up_[x];
      const std::int64_t idx = arc_index(x);
      if (f < theta || (f == theta && idx < leave_arc)) {
        theta = f;
        leave = x;
        leave_arc = idx;
        leave_on_s = on_s;
      }
    };
    for (int x : path_s_) consider(x, true);
    for (int x : path_t_) consider(x, false);
    if (leave < 0)
      throw Error(ErrorCode::SolverNonConvergence, "pivot cycle has no leaving arc");

    for (int x : path_s_) flow_up_[x] += (x < m_) ? -theta : theta;
    for (int x : path_t_) flow_up_[x] += (x >= m_) ? -theta : theta;

    // Reduced cost of the entering arc fixes the potential shift of the
    // subtree that gets re-hung.
    const double r = cost_(si, tj - m_) - pi_[si] - pi_[tj];

    const int e = leave_on_s ? si : tj;
    const int o = leave_on_s ? tj : si;

    chain_.clear();
    for (int x = e;; x = parent_[x]) {
      chain_.push_back(x);
      if (x == leave) break;
    }

    std::vector<std::int64_t> old_flow(chain_.size());
    for (std::size_t k = 0; k < chain_.size(); ++k) old_flow[k] = flow_up_[chain_[k]];

    detach_child(leave, parent_[leave]);
    for (std::size_t k = 0; k + 1 < chain_.size(); ++k)
      detach_child(chain_[k], chain_[k + 1]);

    parent_[e] = o;
    flow_up_[e] = theta;
    attach_child(e, o);
    for (std::size_t k = 1; k < chain_.size(); ++k) {
      parent_[chain_[k]] = chain_[k - 1];
      flow_up_[chain_[k]] = old_flow[k - 1];
      attach_child(chain_[k], chain_[k - 1]);
    }

    // Re-hung subtree: depths follow the new attachment point, potentials
    // shift by +-r depending on which side of the bipartition a node is on.
    const double d_source = leave_on_s ? r : -r;
    const double d_sink = -d_source;
    depth_[e] = depth_[o] + 1;
    pi_[e] += (e < m_) ? d_source : d_sink;
    std::vector<int> stack{e};
    while (!stack.empty()) {
      const int w = stack.back();
      stack.pop_back();
      for (int c = first_child_[w]; c >= 0; c = next_sib_[c]) {
        depth_[c] = depth_[w] + 1;
        pi_[c] += (c < m_) ? d_source : d_sink;
        stack.push_back(c);
      }
    }
    return theta;
  }
};

}  // namespace scenrep::detail

#endif  // SCENREP_NETWORK_SIMPLEX_HPP
