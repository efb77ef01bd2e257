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

#ifndef HCP_TIMELINE_H_
#define HCP_TIMELINE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hcp/config.h"
#include "hcp/cost_model.h"
#include "hcp/rank_grid.h"

namespace hcp {

// Non-preemptive list scheduler over a task DAG. A task starts once all its
// dependencies have finished and all its resources are idle; among tasks
// that could start, the earliest start wins and ties go to the smaller key.
class DagScheduler {
 public:
  struct Key {
    int64_t rank = 0;
    int64_t tag = 0;
    auto operator<=>(const Key&) const = default;
  };

  int AddResource(std::string name);
  int AddTask(std::vector<int> resources, double duration,
              std::vector<int> deps, Key key);

  // Schedules every task. Throws std::logic_error on a dependency cycle.
  void Run();

  int num_tasks() const { return static_cast<int>(tasks_.size()); }
  int num_resources() const { return static_cast<int>(resource_names_.size()); }
  double start(int task) const { return tasks_.at(task).start; }
  double end(int task) const { return tasks_.at(task).start + tasks_.at(task).duration; }
  const std::vector<int>& resources(int task) const { return tasks_.at(task).resources; }
  const std::vector<int>& deps(int task) const { return tasks_.at(task).deps; }
  const std::string& resource_name(int r) const { return resource_names_.at(r); }

 private:
  struct Task {
    std::vector<int> resources;
    double duration = 0;
    std::vector<int> deps;
    Key key;
    double start = 0;
  };
  std::vector<Task> tasks_;
  std::vector<std::string> resource_names_;
};

enum class TaskKind { kCompute, kSendInner, kSendOuter, kAlltoall };

struct SimTask {
  TaskKind kind = TaskKind::kCompute;
  Phase phase = Phase::kForward;
  std::vector<int64_t> ranks;  // one rank, or the whole HP group for AlltoAll
  int64_t outer = 0;
  int64_t inner = 0;
  LinkClass link = LinkClass::kIntraNvlink;
  std::string name;
  double start = 0;
  double end = 0;
};

struct SimResult {
  double makespan = 0;
  // Max over ranks of (makespan - busy compute time).
  double exposed_comm = 0;
  // Summed busy seconds over every port of a class: "intra_nvlink",
  // "inter_nic" and "alltoall".
  std::map<std::string, double> per_link_busy;
  std::vector<SimTask> tasks;
  // Start of micro-step (o, 0), indexed [rank][o], per phase.
  std::vector<std::vector<double>> outer_starts_fwd;
  std::vector<std::vector<double>> outer_starts_bwd;
};

// Simulates one layer of 2D attention: AlltoAll in, double ring, AlltoAll
// out, for forward then backward. Every rank owns a compute stream, one
// send port per link class and an AlltoAll port. Transfer durations come
// from the same per-hop model as the cost model.
SimResult Simulate(const ModelConfig& model, const ParallelConfig& par,
                   const ClusterConfig& cluster, const RankGrid& grid);

nlohmann::json SummaryJson(const SimResult& result);

}  // namespace hcp

#endif  // HCP_TIMELINE_H_
