/* Copyright 2026 The HCP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hcp/timeline.h"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

namespace hcp {

int DagScheduler::AddResource(std::string name) {
  resource_names_.push_back(std::move(name));
  return num_resources() - 1;
}

int DagScheduler::AddTask(std::vector<int> resources, double duration,
                          std::vector<int> deps, Key key) {
  if (duration < 0) throw std::invalid_argument("negative task duration");
  for (int r : resources) {
    if (r < 0 || r >= num_resources()) throw std::out_of_range("bad resource id");
  }
  for (int d : deps) {
    if (d < 0 || d >= num_tasks()) throw std::out_of_range("bad dependency id");
  }
  tasks_.push_back({std::move(resources), duration, std::move(deps), key, 0.0});
  return num_tasks() - 1;
}

void DagScheduler::Run() {
  const int n = num_tasks();
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> dependents(n);
  std::vector<double> deps_done(n, 0.0);
  std::vector<double> free_at(num_resources(), 0.0);
  for (int t = 0; t < n; ++t) {
    pending[t] = static_cast<int>(tasks_[t].deps.size());
    for (int d : tasks_[t].deps) dependents[d].push_back(t);
  }

  auto earliest = [&](int t) {
    double s = deps_done[t];
    for (int r : tasks_[t].resources) s = std::max(s, free_at[r]);
    return s;
  };
  using Entry = std::tuple<double, Key, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (int t = 0; t < n; ++t) {
    if (pending[t] == 0) ready.emplace(earliest(t), tasks_[t].key, t);
  }

  int done = 0;
  while (!ready.empty()) {
    auto [est, key, t] = ready.top();
    ready.pop();
    const double now = earliest(t);
    if (now > est) {  // a resource got taken meanwhile
      ready.emplace(now, key, t);
      continue;
    }
    Task& task = tasks_[t];
    task.start = now;
    const double fin = now + task.duration;
    for (int r : task.resources) free_at[r] = fin;
    ++done;
    for (int c : dependents[t]) {
      deps_done[c] = std::max(deps_done[c], fin);
      if (--pending[c] == 0) ready.emplace(earliest(c), tasks_[c].key, c);
    }
  }
  if (done != n) throw std::logic_error("task graph has a cycle");
}

namespace {

const char* PhaseTag(Phase p) { return p == Phase::kForward ? "fwd" : "bwd"; }

const char* LinkKey(LinkClass l) {
  return l == LinkClass::kIntraNvlink ? "intra_nvlink" : "inter_nic";
}

struct PerRank {
  int compute = 0;
  int port[2] = {0, 0};  // indexed by LinkClass
  int a2a = 0;
};

class Builder {
 public:
  Builder(const ModelConfig& model, const ParallelConfig& par,
          const ClusterConfig& cluster, const RankGrid& grid)
      : model_(model), par_(par), cluster_(cluster), grid_(grid) {
    ranks_.resize(grid.size());
    for (int64_t x = 0; x < grid.size(); ++x) {
      const std::string r = "rank" + std::to_string(x);
      ranks_[x].compute = sched_.AddResource(r + "/compute");
      ranks_[x].port[0] = sched_.AddResource(r + "/intra_nvlink");
      ranks_[x].port[1] = sched_.AddResource(r + "/inter_nic");
      ranks_[x].a2a = sched_.AddResource(r + "/alltoall");
    }
    inner_ = IndexBySrc(InnerRingHops(grid, cluster));
    outer_ = IndexBySrc(OuterRingHops(grid, cluster));
  }

  SimResult Build() {
    SimResult res;
    res.outer_starts_fwd.assign(grid_.size(), {});
    res.outer_starts_bwd.assign(grid_.size(), {});
    std::vector<std::vector<int>> exits(grid_.size());
    for (Phase p : {Phase::kForward, Phase::kBackward}) {
      exits = AddPhase(p, exits);
    }
    sched_.Run();

    std::vector<double> compute_busy(grid_.size(), 0.0);
    res.per_link_busy = {{"intra_nvlink", 0.0}, {"inter_nic", 0.0}, {"alltoall", 0.0}};
    for (int t = 0; t < sched_.num_tasks(); ++t) {
      SimTask st = meta_[t];
      st.start = sched_.start(t);
      st.end = sched_.end(t);
      const double dur = st.end - st.start;
      res.makespan = std::max(res.makespan, st.end);
      switch (st.kind) {
        case TaskKind::kCompute:
          compute_busy[st.ranks.front()] += dur;
          if (st.inner == 0) {
            auto& starts = st.phase == Phase::kForward ? res.outer_starts_fwd
                                                       : res.outer_starts_bwd;
            auto& row = starts[st.ranks.front()];
            if (row.size() <= static_cast<size_t>(st.outer)) row.resize(st.outer + 1);
            row[st.outer] = st.start;
          }
          break;
        case TaskKind::kSendInner:
        case TaskKind::kSendOuter:
          res.per_link_busy[LinkKey(st.link)] += dur;
          break;
        case TaskKind::kAlltoall:
          res.per_link_busy["alltoall"] += dur * static_cast<double>(st.ranks.size());
          break;
      }
      res.tasks.push_back(std::move(st));
    }
    for (double busy : compute_busy) {
      res.exposed_comm = std::max(res.exposed_comm, res.makespan - busy);
    }
    return res;
  }

 private:
  std::vector<Hop> IndexBySrc(const std::vector<Hop>& hops) {
    std::vector<Hop> by_src(grid_.size());
    for (const Hop& h : hops) by_src[h.src] = h;
    return by_src;
  }

  int Add(std::vector<int> res, double dur, std::vector<int> deps,
          int64_t rank, SimTask meta) {
    const int id = sched_.AddTask(std::move(res), dur, std::move(deps),
                                  {rank, static_cast<int64_t>(meta_.size())});
    meta_.push_back(std::move(meta));
    return id;
  }

  // Returns one barrier task per HP group, or nothing when d_hp == 1.
  std::vector<std::vector<int>> AddAlltoall(
      Phase phase, double volume, const char* what,
      const std::vector<std::vector<int>>& before) {
    if (grid_.hp() == 1) return before;
    std::vector<std::vector<int>> after(grid_.size());
    const double dur = AlltoallTime(volume, grid_, cluster_);
    for (int64_t j = 0; j < grid_.cp(); ++j) {
      const auto group = grid_.hp_group(j);
      std::vector<int> res, deps;
      for (int64_t x : group) {
        res.push_back(ranks_[x].a2a);
        deps.insert(deps.end(), before[x].begin(), before[x].end());
      }
      SimTask meta;
      meta.kind = TaskKind::kAlltoall;
      meta.phase = phase;
      meta.ranks = group;
      meta.link = AlltoallLinkClass(grid_);
      meta.name = std::string(PhaseTag(phase)) + " alltoall " + what;
      const int id = Add(res, dur, deps, group.front(), meta);
      for (int64_t x : group) after[x] = {id};
    }
    return after;
  }

  std::vector<std::vector<int>> AddPhase(Phase phase,
                                         const std::vector<std::vector<int>>& entry) {
    const AlltoallSplit vol = AlltoallPhaseVolumes(model_, par_, phase);
    const auto start = AddAlltoall(phase, vol.in, "in", entry);

    const double comp = CompTime(model_, par_, cluster_, phase);
    const double bytes =
        SizeKv(model_, par_) * (phase == Phase::kBackward ? kBackwardP2pFactor : 1.0);
    const int64_t w = grid_.inner_ring();
    const int64_t rings = grid_.outer_ring();
    const int64_t cp = grid_.cp();
    const char* tag = PhaseTag(phase);

    std::vector<std::vector<int>> ring_tasks(grid_.size());
    for (int64_t i = 0; i < grid_.hp(); ++i) {
      // Per cp index: last compute, inner sends of the current outer step
      // and outer sends of every step.
      std::vector<int> last_compute(cp, -1);
      std::vector<std::vector<int>> sin(cp, std::vector<int>(w, -1));
      std::vector<std::vector<int>> sout(cp, std::vector<int>(rings, -1));
      for (int64_t o = 0; o < rings; ++o) {
        for (int64_t t = 0; t < w; ++t) {
          std::vector<std::vector<int>> new_sin = sin;
          for (int64_t j = 0; j < cp; ++j) {
            const int64_t x = grid_.rank(i, j);
            const int64_t ring = grid_.ring_of(j);
            const int64_t slot = grid_.slot_of(j);
            // Tasks that deliver the chunk consumed at (o, t).
            std::vector<int> arrival;
            if (t > 0) {
              const int64_t pred = grid_.cp_index_of(ring, (slot - 1 + w) % w);
              arrival = {sin[pred][t - 1]};
            } else if (o > 0) {
              const int64_t pred = grid_.cp_index_of((ring - 1 + rings) % rings, slot);
              arrival = {sout[pred][o - 1]};
            } else {
              arrival = start[x];
            }

            std::vector<int> cdeps = arrival;
            if (last_compute[j] >= 0) cdeps.push_back(last_compute[j]);
            SimTask cm;
            cm.kind = TaskKind::kCompute;
            cm.phase = phase;
            cm.ranks = {x};
            cm.outer = o;
            cm.inner = t;
            cm.name = std::string(tag) + " attn o=" + std::to_string(o) +
                      " t=" + std::to_string(t);
            last_compute[j] = Add({ranks_[x].compute}, comp, cdeps, x, cm);
            ring_tasks[x].push_back(last_compute[j]);

            if (t < w - 1) {
              const Hop& h = inner_[x];
              std::vector<int> sdeps = arrival;
              if (t > 0) sdeps.push_back(sin[j][t - 1]);
              SimTask sm;
              sm.kind = TaskKind::kSendInner;
              sm.phase = phase;
              sm.ranks = {x};
              sm.outer = o;
              sm.inner = t;
              sm.link = h.link;
              sm.name = std::string(tag) + " send inner o=" + std::to_string(o) +
                        " t=" + std::to_string(t) + " ->" + std::to_string(h.dst);
              new_sin[j][t] =
                  Add({ranks_[x].port[static_cast<int>(h.link)]},
                      P2pTime(bytes, h.link, h.contention, cluster_), sdeps, x, sm);
              ring_tasks[x].push_back(new_sin[j][t]);
            }
            if (t == 0 && o + 1 < rings) {
              const Hop& h = outer_[x];
              std::vector<int> sdeps = arrival;
              // Shares the port with the inner sends: queue behind them.
              if (w > 1 && inner_[x].link == h.link) {
                sdeps.push_back(-1);  // patched once the last inner send exists
              }
              SimTask sm;
              sm.kind = TaskKind::kSendOuter;
              sm.phase = phase;
              sm.ranks = {x};
              sm.outer = o;
              sm.link = h.link;
              sm.name = std::string(tag) + " send outer o=" + std::to_string(o) +
                        " ->" + std::to_string(h.dst);
              pending_outer_.push_back({j, o, sdeps, x, sm,
                                        P2pTime(bytes, h.link, h.contention, cluster_)});
            }
          }
          sin = std::move(new_sin);
          // Outer sends wait for the last inner send of their step; with a
          // single-slot ring they are created right away.
          if (t == std::max<int64_t>(w - 2, 0)) {
            for (auto& po : pending_outer_) {
              for (int& d : po.deps) {
                if (d == -1) d = sin[po.cp_index][w - 2];
              }
              sout[po.cp_index][po.outer] =
                  Add({ranks_[po.rank].port[static_cast<int>(po.meta.link)]},
                      po.duration, po.deps, po.rank, po.meta);
              ring_tasks[po.rank].push_back(sout[po.cp_index][po.outer]);
            }
            pending_outer_.clear();
          }
        }
      }
    }
    return AddAlltoall(phase, vol.out, "out", ring_tasks);
  }

  struct PendingOuter {
    int64_t cp_index;
    int64_t outer;
    std::vector<int> deps;
    int64_t rank;
    SimTask meta;
    double duration;
  };

  const ModelConfig& model_;
  const ParallelConfig& par_;
  const ClusterConfig& cluster_;
  const RankGrid& grid_;
  DagScheduler sched_;
  std::vector<PerRank> ranks_;
  std::vector<Hop> inner_;
  std::vector<Hop> outer_;
  std::vector<SimTask> meta_;
  std::vector<PendingOuter> pending_outer_;
};

}  // namespace

SimResult Simulate(const ModelConfig& model, const ParallelConfig& par,
                   const ClusterConfig& cluster, const RankGrid& grid) {
  ValidateOrThrow(model, par, cluster);
  return Builder(model, par, cluster, grid).Build();
}

nlohmann::json SummaryJson(const SimResult& r) {
  return {{"makespan", r.makespan},
          {"exposed_comm", r.exposed_comm},
          {"per_link_busy", r.per_link_busy}};
}

}  // namespace hcp
