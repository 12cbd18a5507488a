#include "poolsim/pooling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "poolsim/error.hpp"

namespace poolsim {

namespace {

void check_bounds(std::size_t d_min, std::size_t d_max) {
  if (d_min < 1) throw PreconditionError("d_min must be at least 1");
  if (d_min > d_max) throw PreconditionError("d_min must not exceed d_max");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t depth_linear(double phi_norm, std::size_t d_min, std::size_t d_max) {
  check_bounds(d_min, d_max);
  if (!(phi_norm >= 0.0 && phi_norm <= 1.0)) {
    throw PreconditionError(fmt::format("normalized QPP value {} outside [0, 1]", phi_norm));
  }
  const double span = static_cast<double>(d_max - d_min);
  auto extra = static_cast<std::size_t>(std::floor(phi_norm * span));
  return d_min + std::min(extra, d_max - d_min);
}

std::size_t depth_inverse_linear(double phi_norm, std::size_t d_min, std::size_t d_max) {
  if (!(phi_norm >= 0.0 && phi_norm <= 1.0)) {
    throw PreconditionError(fmt::format("normalized QPP value {} outside [0, 1]", phi_norm));
  }
  return depth_linear(1.0 - phi_norm, d_min, d_max);
}

std::size_t midpoint_depth(std::size_t d_min, std::size_t d_max) {
  check_bounds(d_min, d_max);
  return (d_min + d_max + 1) / 2;
}

DepthPolicy::DepthPolicy(std::string label, Kind kind)
    : label_(std::move(label)), kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const CdpFixed& c) {
                   if (c.depth < 1) throw PreconditionError("constant depth must be at least 1");
                 },
                 [](const auto& v) { check_bounds(v.d_min, v.d_max); },
             },
             kind_);
}

DepthPolicy DepthPolicy::cdp_min(std::size_t d_min, std::size_t d_max) {
  check_bounds(d_min, d_max);
  return {"CDP-Min", CdpFixed{d_min}};
}

DepthPolicy DepthPolicy::cdp_avg(std::size_t d_min, std::size_t d_max) {
  return {"CDP-Avg", CdpFixed{midpoint_depth(d_min, d_max)}};
}

DepthPolicy DepthPolicy::cdp_max(std::size_t d_min, std::size_t d_max) {
  check_bounds(d_min, d_max);
  return {"CDP-Max", CdpFixed{d_max}};
}

DepthPolicy DepthPolicy::vdp_linear(std::size_t d_min, std::size_t d_max) {
  return {"VDP-L", VdpLinear{d_min, d_max}};
}

DepthPolicy DepthPolicy::vdp_inverse_linear(std::size_t d_min, std::size_t d_max) {
  return {"VDP-IL", VdpInverseLinear{d_min, d_max}};
}

std::size_t DepthPolicy::depth(double phi_norm) const {
  return std::visit(
      Overloaded{
          [](const CdpFixed& c) { return c.depth; },
          [&](const VdpLinear& v) { return depth_linear(phi_norm, v.d_min, v.d_max); },
          [&](const VdpInverseLinear& v) {
            return depth_inverse_linear(phi_norm, v.d_min, v.d_max);
          },
      },
      kind_);
}

std::string DepthPolicy::describe() const {
  return std::visit(Overloaded{
                        [](const CdpFixed& c) { return fmt::format("constant({})", c.depth); },
                        [](const VdpLinear& v) {
                          return fmt::format("linear({},{})", v.d_min, v.d_max);
                        },
                        [](const VdpInverseLinear& v) {
                          return fmt::format("inverse-linear({},{})", v.d_min, v.d_max);
                        },
                    },
                    kind_);
}

bool Pool::contains(const std::string& query_id, const std::string& doc_id) const {
  auto it = docs.find(query_id);
  return it != docs.end() && it->second.count(doc_id) > 0;
}

Pool build_pool(std::span<const SystemRun> runs, const DepthPolicy& policy,
                std::span<const QppEstimate> estimates, const std::set<std::string>& query_ids) {
  std::map<std::string, const SystemRun*> by_tag;
  for (const auto& run : runs) {
    if (!by_tag.emplace(run.system_tag, &run).second) {
      throw ValidationError(fmt::format("duplicate system tag {}", run.system_tag));
    }
  }

  std::map<std::pair<std::string, std::string>, double> phi;
  if (policy.needs_estimates()) {
    for (const auto& e : estimates) {
      if (e.normalized) phi[{e.query_id, e.system_tag}] = *e.normalized;
    }
    std::vector<std::string> missing;
    for (const auto& qid : query_ids) {
      for (const auto& [tag, run] : by_tag) {
        if (run->find(qid) && !phi.count({qid, tag})) missing.push_back(fmt::format("({}, {})", qid, tag));
      }
    }
    if (!missing.empty()) {
      throw ValidationError(fmt::format("{}: no normalized QPP estimate for {} pair(s): {}",
                                        policy.label(), missing.size(),
                                        fmt::join(missing, ", ")));
    }
  }

  Pool pool{policy, {}, {}, 0};
  for (const auto& qid : query_ids) {
    auto& pooled = pool.docs[qid];
    for (const auto& [tag, run] : by_tag) {
      const auto* ranking = run->find(qid);
      if (!ranking) continue;
      const double phi_norm = policy.needs_estimates() ? phi.at({qid, tag}) : 0.0;
      const std::size_t depth = policy.depth(phi_norm);
      pool.depths[{qid, tag}] = depth;
      if (ranking->size() < depth) ++pool.short_runs;
      const std::size_t n = std::min(depth, ranking->size());
      for (std::size_t i = 0; i < n; ++i) pooled.insert((*ranking)[i].doc_id);
    }
  }
  return pool;
}

std::string write_pool(const Pool& pool) {
  std::string out;
  for (const auto& [qid, docs] : pool.docs) {
    for (const auto& d : docs) out += fmt::format("{} {}\n", qid, d);
  }
  return out;
}

std::string write_depths_csv(const Pool& pool) {
  std::string out = "query_id,system_tag,depth\n";
  for (const auto& [key, depth] : pool.depths) {
    out += fmt::format("{},{},{}\n", key.first, key.second, depth);
  }
  return out;
}

}  // namespace poolsim
