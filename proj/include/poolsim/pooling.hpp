#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "poolsim/diagnostics.hpp"
#include "poolsim/qpp.hpp"
#include "poolsim/trec_io.hpp"

namespace poolsim {

/// d_min + floor(phi * (d_max - d_min)).
std::size_t depth_linear(double phi_norm, std::size_t d_min, std::size_t d_max);
/// depth_linear evaluated at 1 - phi: low predicted quality gets the deeper cut.
std::size_t depth_inverse_linear(double phi_norm, std::size_t d_min, std::size_t d_max);

struct CdpFixed {
  std::size_t depth;
  friend bool operator==(const CdpFixed&, const CdpFixed&) = default;
};
struct VdpLinear {
  std::size_t d_min, d_max;
  friend bool operator==(const VdpLinear&, const VdpLinear&) = default;
};
struct VdpInverseLinear {
  std::size_t d_min, d_max;
  friend bool operator==(const VdpInverseLinear&, const VdpInverseLinear&) = default;
};

/// How deep to read each (query, run) list. The label is what reports print.
class DepthPolicy {
 public:
  using Kind = std::variant<CdpFixed, VdpLinear, VdpInverseLinear>;

  DepthPolicy(std::string label, Kind kind);

  static DepthPolicy cdp_min(std::size_t d_min, std::size_t d_max);
  static DepthPolicy cdp_avg(std::size_t d_min, std::size_t d_max);
  static DepthPolicy cdp_max(std::size_t d_min, std::size_t d_max);
  static DepthPolicy vdp_linear(std::size_t d_min, std::size_t d_max);
  static DepthPolicy vdp_inverse_linear(std::size_t d_min, std::size_t d_max);

  const std::string& label() const noexcept { return label_; }
  const Kind& kind() const noexcept { return kind_; }
  bool needs_estimates() const noexcept { return !std::holds_alternative<CdpFixed>(kind_); }

  /// Depth for one (query, run) pair. `phi_norm` is ignored for CdpFixed.
  std::size_t depth(double phi_norm) const;

  std::string describe() const;

  friend bool operator==(const DepthPolicy&, const DepthPolicy&) = default;

 private:
  std::string label_;
  Kind kind_;
};

/// round((d_min + d_max) / 2) with halves rounded up.
std::size_t midpoint_depth(std::size_t d_min, std::size_t d_max);

struct Pool {
  DepthPolicy policy;
  /// One entry per pooled query, possibly empty.
  std::map<std::string, std::set<std::string>> docs;
  /// Depth used for each (query id, system tag) pair where the run retrieved the query.
  std::map<std::pair<std::string, std::string>, std::size_t> depths;
  /// Pairs whose run held fewer documents than the assigned depth.
  std::size_t short_runs = 0;

  bool contains(const std::string& query_id, const std::string& doc_id) const;
};

/// Union over runs of each run's top-depth prefix, per query in `query_ids`.
/// For variable-depth policies every (query, run) pair with retrieved
/// documents needs a normalized estimate; missing ones raise ValidationError
/// naming the pairs.
Pool build_pool(std::span<const SystemRun> runs, const DepthPolicy& policy,
                std::span<const QppEstimate> estimates, const std::set<std::string>& query_ids);

/// `query_id doc_id` lines sorted by query then doc.
std::string write_pool(const Pool& pool);
/// `query_id,system_tag,depth` with a header line.
std::string write_depths_csv(const Pool& pool);

}  // namespace poolsim
