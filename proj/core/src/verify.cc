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

#include "hcp/verify.h"

#include <sstream>

#include "hcp/attention.h"
#include "hcp/rank_grid.h"
#include "hcp/ring.h"
#include "hcp/rng.h"

namespace hcp {

double Tolerance(Precision p) { return p == Precision::kF64 ? 1e-10 : 1e-5; }

std::string VerifyCase::Label() const {
  std::ostringstream os;
  os << "H=" << model.heads << " H_kv=" << model.kv_heads << " S=" << model.seq_len
     << " d_hp=" << par.hp << " d_cp=" << par.cp << " w=" << par.inner_ring << ' '
     << PlacementName(par.placement) << (causal ? " causal" : " full");
  return os.str();
}

std::vector<VerifyCase> LatticeForModel(const ModelConfig& model,
                                        const ClusterConfig& cluster) {
  std::vector<VerifyCase> out;
  for (int64_t sp : {1, 2, 4, 8, 16}) {
    for (int64_t hp = 1; hp <= sp; ++hp) {
      if (sp % hp) continue;
      const int64_t cp = sp / hp;
      for (int64_t w = 1; w <= cp; ++w) {
        if (cp % w) continue;
        for (Placement pl : {Placement::kHeadFirst, Placement::kContextFirst}) {
          ParallelConfig par{1, hp, cp, w, pl};
          if (!Validate(model, par, cluster).ok()) continue;
          for (bool causal : {true, false}) out.push_back({model, par, causal});
        }
      }
    }
  }
  return out;
}

std::vector<VerifyCase> DefaultLattice(const ClusterConfig& cluster) {
  std::vector<VerifyCase> out;
  for (int64_t h : {4, 8}) {
    for (int64_t kv : {2, 4, 8}) {
      if (kv > h) continue;
      for (int64_t s : {16, 32, 64}) {
        ModelConfig m;
        m.seq_len = s;
        m.heads = h;
        m.kv_heads = kv;
        m.hidden = 4 * h;
        m.global_batch = s;
        auto cases = LatticeForModel(m, cluster);
        out.insert(out.end(), cases.begin(), cases.end());
      }
    }
  }
  return out;
}

namespace {

template <typename T>
Tensor<T> Run(const Tensor<double>& q, const Tensor<double>& k,
              const Tensor<double>& v, const VerifyCase& c, const RankGrid& grid,
              std::optional<int64_t> flip) {
  TwoDOptions opt;
  opt.causal = c.causal;
  opt.flip_sign_rank = flip;
  return Run2DAttention(CastTensor<T>(q), CastTensor<T>(k), CastTensor<T>(v),
                        c.par, grid, opt);
}

}  // namespace

VerifyResult RunVerifyCase(const VerifyCase& c, const ClusterConfig& cluster,
                           uint64_t seed, Precision precision,
                           std::optional<int64_t> flip_sign_rank) {
  if (c.model.seq_len > kMaxVerifySeqLen) {
    throw ConfigError("verify needs S <= " + std::to_string(kMaxVerifySeqLen) +
                      " (got S=" + std::to_string(c.model.seq_len) + ")");
  }
  ValidateOrThrow(c.model, c.par, cluster);
  const RankGrid grid = BuildRankGrid(c.par, cluster);
  const int64_t s = c.model.seq_len;
  const int64_t d = c.model.head_dim();
  // Inputs are rounded through float so both precisions see the same data.
  auto q = CastTensor<double>(RandomTensor<float>(c.model.heads, s, d, seed, 0));
  auto k = CastTensor<double>(RandomTensor<float>(c.model.kv_heads, s, d, seed, 1));
  auto v = CastTensor<double>(RandomTensor<float>(c.model.kv_heads, s, d, seed, 2));
  const auto ref = FullAttention(q, k, v, c.causal).out;

  VerifyResult r;
  r.c = c;
  r.max_abs_diff = precision == Precision::kF64
                       ? MaxAbsDiff(Run<double>(q, k, v, c, grid, flip_sign_rank), ref)
                       : MaxAbsDiff(Run<float>(q, k, v, c, grid, flip_sign_rank), ref);
  r.pass = r.max_abs_diff <= Tolerance(precision);
  return r;
}

}  // namespace hcp
