#pragma once

// Brute-force checks of the dilation identities behind the quantum limit:
// loss-term independence of the environment phase, vanishing cross term,
// optimal environment phase, and the purification inequality.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phaseloss/fock.hpp"

namespace phaseloss {

struct Assertion {
  std::string case_id;
  std::string assertion;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VarsigmaGrid {
  double lo = -3.0;
  double hi = 3.0;
  double step = 1e-3;
  int refine = 100;  ///< the second pass uses step / refine around the coarse minimum
};

struct IdentityReport {
  std::string case_id;
  int dim = 0;
  double n_mean = 0.0;
  double var_n = 0.0;
  double varsigma_predicted = 0.0;
  double varsigma_grid_min = 0.0;
  double dilated_qfi = 0.0;  ///< full dilated QFI at the grid minimum
  double mixed_qfi = 0.0;
  std::vector<Assertion> assertions;

  bool all_pass() const;
};

void to_json(nlohmann::json& j, const Assertion& a);
void to_json(nlohmann::json& j, const IdentityReport& r);

/// Dilation objects keyed by truncation, shared across verification cases.
class DilationCache {
 public:
  const Dilation& get(int dim);

 private:
  std::map<int, std::unique_ptr<Dilation>> cache_;
};

/// Runs every check for a single-mode probe. When `gaussian` is given the
/// probe is that Gaussian state and the channel moments and the Gaussian QFI
/// are checked as well. The channel enters as eta(chi) = eta + eta' chi,
/// theta(chi) = theta + theta' chi around chi = 0.
IdentityReport verify_identities(const FockVector& probe, const ChannelPoint& ch,
                                      const VarsigmaGrid& grid, const std::string& case_id,
                                      const std::optional<ProbeSpec>& gaussian = std::nullopt,
                                      DilationCache* cache = nullptr);

IdentityReport verify_identities(const ProbeSpec& spec, const ChannelPoint& ch,
                                      const VarsigmaGrid& grid, const std::string& case_id,
                                      DilationCache* cache = nullptr);

struct VerifyCase {
  std::string id;
  ProbeSpec spec;
  ChannelPoint ch;
};

/// Six Gaussian probes with n_mean <= 4 crossed with four channels.
std::vector<VerifyCase> default_verify_suite();

}  // namespace phaseloss
