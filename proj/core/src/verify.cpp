#include "phaseloss/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"

namespace phaseloss {
namespace {

using cd = std::complex<double>;

// chi -> U2(theta(chi), varsigma) U1(eta(chi)) |psi, 0>, with the loss stage
// memoised on eta so that sweeping varsigma only re-applies phases.
class DilatedFamily {
 public:
  DilatedFamily(const Dilation& dilation, const CVector& psi, const ChannelPoint& ch)
      : dilation_(dilation), embedded_(dilation.embed(psi)), ch_(ch) {}

  const BlockState& lossy(double chi) {
    const double eta = ch_.eta + ch_.deta_dchi * chi;
    auto it = cache_.find(eta);
    if (it == cache_.end()) it = cache_.emplace(eta, dilation_.apply_loss(embedded_, eta)).first;
    return it->second;
  }

  BlockState state(double chi, double varsigma) {
    BlockState out = lossy(chi);
    dilation_.apply_phase(out, ch_.theta + ch_.dtheta_dchi * chi, varsigma);
    return out;
  }

  PureFamily pure(double varsigma) {
    return [this, varsigma](double chi) { return state(chi, varsigma).amplitudes; };
  }

  DensityFamily reduced() {
    return [this](double chi) { return state(chi, 0.0).reduced_system(); };
  }

  const BlockState& embedded() const { return embedded_; }

 private:
  const Dilation& dilation_;
  BlockState embedded_;
  ChannelPoint ch_;
  std::map<double, BlockState> cache_;
};

ChannelPoint with_derivatives(ChannelPoint ch, double deta, double dtheta) {
  ch.deta_dchi = deta;
  ch.dtheta_dchi = dtheta;
  return ch;
}

// Largest step that keeps eta(chi) inside (0, 1) over the Richardson stencil.
double safe_step(const ChannelPoint& ch, double preferred) {
  if (ch.deta_dchi == 0.0) return preferred;
  const double room = std::min(ch.eta, 1.0 - ch.eta) / std::abs(ch.deta_dchi);
  return std::min(preferred, 0.25 * room);
}

// Single Richardson estimate, used for the dense varsigma sweep.
double quick_qfi(DilatedFamily& family, double varsigma, double h) {
  const PureFamily f = family.pure(varsigma);
  const CVector psi = f(0.0);
  return pure_qfi_from_derivative(psi, richardson_derivative(f, 0.0, h));
}

struct GridMinimum {
  double varsigma;
  double value;
};

GridMinimum scan(DilatedFamily& family, double lo, double step, long points, double h) {
  GridMinimum best{lo, std::numeric_limits<double>::infinity()};
  for (long i = 0; i < points; ++i) {
    const double s = lo + step * static_cast<double>(i);
    const double f = quick_qfi(family, s, h);
    if (f < best.value) best = {s, f};
  }
  return best;
}

// 2 Re <H1 psi0 | U1^dag H2 U1 psi0> with H1 the beam-splitter generator and
// H2 = n_s + varsigma n_e.
double cross_term(const Dilation& dilation, const BlockState& embedded, double eta, double varsigma) {
  const int dim = dilation.dim();
  BlockState h1 = embedded;
  h1.amplitudes.setZero();
  for (int total = 1; total < dim; ++total) {
    const cd amp = embedded.amplitudes(static_cast<Eigen::Index>(BlockState::offset(total)));
    // (i/2)(a_s^dag a_e - a_e^dag a_s)|n, 0> = -(i/2) sqrt(n) |n - 1, 1>
    h1.amplitudes(static_cast<Eigen::Index>(BlockState::offset(total)) + 1) =
        cd(0.0, -0.5 * std::sqrt(static_cast<double>(total))) * amp;
  }
  const BlockState u_h1 = dilation.apply_loss(h1, eta);
  BlockState u_psi = dilation.apply_loss(embedded, eta);
  for (int total = 0; total < dim; ++total) {
    const auto off = static_cast<Eigen::Index>(BlockState::offset(total));
    for (int n_e = 0; n_e <= total; ++n_e) u_psi.amplitudes(off + n_e) *= (total - n_e) + varsigma * n_e;
  }
  return 2.0 * u_h1.amplitudes.dot(u_psi.amplitudes).real();
}

void add(IdentityReport& r, const std::string& name, double measured, double tolerance, bool pass) {
  r.assertions.push_back({r.case_id, name, measured, tolerance, pass});
}

}  // namespace

bool IdentityReport::all_pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

void to_json(nlohmann::json& j, const Assertion& a) {
  j = nlohmann::json{{"case_id", a.case_id},
                     {"assertion", a.assertion},
                     {"measured", a.measured},
                     {"tolerance", a.tolerance},
                     {"pass", a.pass}};
}

void to_json(nlohmann::json& j, const IdentityReport& r) {
  j = nlohmann::json{{"case_id", r.case_id},
                     {"dim", r.dim},
                     {"n_mean", r.n_mean},
                     {"var_n", r.var_n},
                     {"varsigma_predicted", r.varsigma_predicted},
                     {"varsigma_grid_min", r.varsigma_grid_min},
                     {"dilated_qfi", r.dilated_qfi},
                     {"mixed_qfi", r.mixed_qfi},
                     {"assertions", r.assertions},
                     {"pass", r.all_pass()}};
}

const Dilation& DilationCache::get(int dim) {
  auto it = cache_.find(dim);
  if (it == cache_.end()) it = cache_.emplace(dim, std::make_unique<Dilation>(dim)).first;
  return *it->second;
}

IdentityReport verify_identities(const FockVector& probe, const ChannelPoint& ch,
                                      const VarsigmaGrid& grid, const std::string& case_id,
                                      const std::optional<ProbeSpec>& gaussian, DilationCache* cache) {
  if (probe.modes != 1) throw DomainError("verify_identities expects a single-mode probe");
  if (!(ch.eta > 0.0 && ch.eta < 1.0)) {
    throw SingularChannel("verify_identities: eta must lie strictly inside (0, 1)");
  }
  if (ch.deta_dchi == 0.0 && ch.dtheta_dchi == 0.0) {
    throw DomainError("verify_identities: channel does not depend on chi");
  }
  if (!(grid.step > 0.0) || !(grid.hi > grid.lo) || grid.refine < 1) {
    throw ConfigError("invalid varsigma grid");
  }

  DilationCache local;
  const Dilation& dilation = (cache ? *cache : local).get(probe.dim);

  IdentityReport r;
  r.case_id = case_id;
  r.dim = probe.dim;
  const PhotonMoments moments = number_moments(probe.amplitudes);
  r.n_mean = moments.mean;
  r.var_n = moments.variance;
  r.varsigma_predicted = varsigma_opt(ch.eta, r.n_mean, r.var_n);

  const double h = safe_step(ch, 1e-5);
  const bool has_phase = ch.dtheta_dchi != 0.0;
  const bool has_loss = ch.deta_dchi != 0.0;

  DilatedFamily full(dilation, probe.amplitudes, ch);
  DilatedFamily phase_only(dilation, probe.amplitudes, with_derivatives(ch, 0.0, ch.dtheta_dchi));
  DilatedFamily loss_only(dilation, probe.amplitudes, with_derivatives(ch, ch.deta_dchi, 0.0));

  // environment phase minimising the phase term
  double s_min = r.varsigma_predicted;
  if (has_phase) {
    const long points = std::lround((grid.hi - grid.lo) / grid.step) + 1;
    const GridMinimum coarse = scan(phase_only, grid.lo, grid.step, points, h);
    const double fine_step = grid.step / grid.refine;
    const GridMinimum fine = scan(phase_only, coarse.varsigma - grid.step, fine_step,
                                  2L * grid.refine + 1, h);
    s_min = fine.varsigma;
    r.varsigma_grid_min = s_min;
    const double miss = std::abs(s_min - r.varsigma_predicted);
    add(r, "phase-term minimiser matches optimal varsigma", miss, grid.step, miss <= grid.step);

    const double above = quick_qfi(phase_only, r.varsigma_predicted + 0.5, h);
    add(r, "phase term larger away from optimal varsigma", above - fine.value, 0.0,
        above > fine.value);
  } else {
    r.varsigma_grid_min = s_min;
  }

  if (has_loss) {
    double lowest = std::numeric_limits<double>::infinity();
    double highest = -lowest;
    double at_lo = 0.0;
    for (int i = 0;; ++i) {
      const double s = grid.lo + 0.5 * i;
      if (s > grid.hi + 1e-12) break;
      const double f = pure_qfi(loss_only.pure(s), 0.0, h);
      if (i == 0) at_lo = f;
      lowest = std::min(lowest, f);
      highest = std::max(highest, f);
    }
    add(r, "loss term independent of varsigma", highest - lowest, 1e-6, highest - lowest < 1e-6);
    const double expected =
        r.n_mean * ch.deta_dchi * ch.deta_dchi / (ch.eta * (1.0 - ch.eta));
    const double miss = std::abs(at_lo - expected);
    add(r, "loss term equals n eta'^2 / (eta (1 - eta))", miss, 1e-6, miss < 1e-6);
  }

  double cross = 0.0;
  for (const double s : {s_min, 0.0, 1.0}) {
    cross = std::max(cross, std::abs(cross_term(dilation, full.embedded(), ch.eta, s)));
  }
  add(r, "cross term vanishes", cross, 1e-8, cross < 1e-8);

  r.dilated_qfi = pure_qfi(full.pure(s_min), 0.0, h);
  r.mixed_qfi = mixed_qfi(full.reduced(), 0.0, safe_step(ch, 1e-3));
  add(r, "dilated QFI at optimal varsigma bounds the mixed QFI", r.dilated_qfi - r.mixed_qfi, -1e-6,
      r.dilated_qfi >= r.mixed_qfi - 1e-6);

  if (has_phase && has_loss) {
    const double f_phase = pure_qfi(phase_only.pure(s_min), 0.0, h);
    const double f_loss = pure_qfi(loss_only.pure(s_min), 0.0, h);
    const double miss = std::abs(r.dilated_qfi - f_phase - f_loss);
    add(r, "phase and loss terms add", miss, 1e-6, miss < 1e-6);
  }

  if (gaussian) {
    const GaussianState expected = apply_channel(make_probe(*gaussian), ch.eta, ch.theta);
    const GaussianState measured = quadrature_moments(full.state(0.0, 0.0).reduced_system());
    const double miss = std::max((expected.d - measured.d).cwiseAbs().maxCoeff(),
                                 (expected.gamma - measured.gamma).cwiseAbs().maxCoeff());
    add(r, "traced dilation reproduces the Gaussian channel", miss, 1e-6, miss < 1e-6);

    const double g = gaussian_qfi(ch, *gaussian);
    const double rel = std::abs(g - r.mixed_qfi) / std::max(r.mixed_qfi, 1e-300);
    add(r, "Gaussian QFI matches the mixed-state QFI", rel, 1e-5, rel < 1e-5);
  }

  return r;
}

IdentityReport verify_identities(const ProbeSpec& spec, const ChannelPoint& ch,
                                      const VarsigmaGrid& grid, const std::string& case_id,
                                      DilationCache* cache) {
  return verify_identities(fock_probe_auto(spec), ch, grid, case_id, spec, cache);
}

std::vector<VerifyCase> default_verify_suite() {
  const std::vector<std::pair<std::string, ProbeSpec>> probes = {
      {"coherent-1", {1.0, 0.0, 0.0, 0.0}},
      {"coherent-4-rotated", {4.0, 0.0, 0.0, 0.7}},
      {"squeezed-vacuum", {0.5, 0.5, 0.3, 0.0}},
      {"displaced-squeezed", {2.0, 0.5, 0.0, 0.0}},
      {"displaced-squeezed-tilted", {3.0, 0.8, 1.1, 0.4}},
      {"displaced-squeezed-4", {4.0, 1.0, -0.6, 0.0}},
  };
  const std::vector<std::pair<std::string, ChannelPoint>> channels = {
      {"phase", {0.7, 0.3, 0.0, 1.0}},
      {"loss", {0.4, 0.0, 1.0, 0.0}},
      {"mixed", {0.7, 0.2, 0.5, 1.0}},
      {"mixed-high-eta", {0.9, -0.4, -1.0, 0.3}},
  };
  std::vector<VerifyCase> out;
  for (const auto& [pid, spec] : probes) {
    for (const auto& [cid, ch] : channels) out.push_back({pid + "/" + cid, spec, ch});
  }
  return out;
}

}  // namespace phaseloss
