#include "mfg/core/params.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace mfg {
namespace {

using json = nlohmann::json;

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

EngineParams merge_params_json_text(const std::string& text, EngineParams base) {
  const json j = json::parse(text);
  static const std::set<std::string> known = {
      "grid_K", "grid_J", "sigma_s0", "sigma_d0", "noise", "interaction", "safety",
      "eval", "candidates", "n_paths", "n_ua", "n_ud", "v_bins", "tau_lat",
      "collision_dist", "lc_ref_t1", "lc_ref_t2", "gamma_relax", "eps_conv",
      "eps_nash", "max_iters", "seed", "value_entry_budget"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown parameter key: " + key);

  take(j, "grid_K", base.grid_K);
  take(j, "grid_J", base.grid_J);
  take(j, "sigma_s0", base.sigma_s0);
  take(j, "sigma_d0", base.sigma_d0);
  take(j, "n_paths", base.n_paths);
  take(j, "n_ua", base.n_ua);
  take(j, "n_ud", base.n_ud);
  take(j, "v_bins", base.v_bins);
  take(j, "tau_lat", base.tau_lat);
  take(j, "collision_dist", base.collision_dist);
  take(j, "lc_ref_t1", base.lc_ref_t1);
  take(j, "lc_ref_t2", base.lc_ref_t2);
  take(j, "gamma_relax", base.gamma_relax);
  take(j, "eps_conv", base.eps_conv);
  take(j, "eps_nash", base.eps_nash);
  take(j, "max_iters", base.max_iters);
  take(j, "seed", base.seed);
  take(j, "value_entry_budget", base.value_entry_budget);

  if (j.contains("noise")) {
    const auto& n = j["noise"];
    take(n, "sigma_pos_base", base.noise.sigma_pos_base);
    take(n, "sigma_vel_base", base.noise.sigma_vel_base);
  }
  if (j.contains("interaction")) {
    const auto& n = j["interaction"];
    take(n, "sigma_s_base_sq", base.interaction.sigma_s_base_sq);
    take(n, "sigma_d_base_sq", base.interaction.sigma_d_base_sq);
    take(n, "sigma_theta", base.interaction.sigma_theta);
    take(n, "style_weight", base.interaction.style_weight);
    take(n, "lambda", base.interaction.lambda);
    take(n, "coupling_gain", base.interaction.coupling_gain);
  }
  if (j.contains("safety")) {
    const auto& n = j["safety"];
    take(n, "d_base", base.safety.d_base);
    take(n, "d_min", base.safety.d_min);
    take(n, "d_danger", base.safety.d_danger);
    take(n, "d_safe_threshold", base.safety.d_safe_threshold);
    take(n, "eps_coll", base.safety.eps_coll);
    take(n, "T_pred", base.safety.T_pred);
    take(n, "T_critical", base.safety.T_critical);
    take(n, "gamma_pred", base.safety.gamma_pred);
    take(n, "delta_pred", base.safety.delta_pred);
    take(n, "sigma_pred", base.safety.sigma_pred);
    take(n, "zeta_density", base.safety.zeta_density);
    take(n, "zeta_aggr", base.safety.zeta_aggr);
    take(n, "eta", base.safety.eta);
    take(n, "nu", base.safety.nu);
    take(n, "lambda_v", base.safety.lambda_v);
    take(n, "lambda_phi", base.safety.lambda_phi);
    take(n, "eps_v", base.safety.eps_v);
    take(n, "xi", base.safety.xi);
    take(n, "beta_boundary", base.safety.beta_boundary);
    take(n, "sigma_discrete", base.safety.sigma_discrete);
    take(n, "zeta_ttc", base.safety.zeta_ttc);
    take(n, "kappa_hetero", base.safety.kappa_hetero);
    take(n, "sigma_base_unc", base.safety.sigma_base_unc);
    take(n, "v_ref", base.safety.v_ref);
  }
  if (j.contains("eval")) {
    const auto& n = j["eval"];
    take(n, "w1", base.eval.w1);
    take(n, "w2", base.eval.w2);
    take(n, "w3", base.eval.w3);
    take(n, "w4", base.eval.w4);
    take(n, "w5", base.eval.w5);
    take(n, "rho_v", base.eval.rho_v);
    take(n, "rho_a", base.eval.rho_a);
    take(n, "rho_j", base.eval.rho_j);
    take(n, "rho_kappa", base.eval.rho_kappa);
    take(n, "j_max", base.eval.j_max);
    take(n, "kappa_max", base.eval.kappa_max);
    take(n, "zeta_ttc", base.eval.zeta_ttc);
    take(n, "T_critical", base.eval.T_critical);
    take(n, "w_mandatory", base.eval.w_mandatory);
    take(n, "w_transition", base.eval.w_transition);
    take(n, "w_smoothness", base.eval.w_smoothness);
  }
  if (j.contains("candidates")) {
    const auto& n = j["candidates"];
    take(n, "lc_start_min", base.candidates.lc_start_min);
    take(n, "lc_start_max", base.candidates.lc_start_max);
    take(n, "lc_len_min", base.candidates.lc_len_min);
    take(n, "lc_len_max", base.candidates.lc_len_max);
    take(n, "beta_rel_min", base.candidates.beta_rel_min);
    take(n, "beta_rel_max", base.candidates.beta_rel_max);
    take(n, "eps_slowdown_min", base.candidates.eps_slowdown_min);
    take(n, "eps_slowdown_max", base.candidates.eps_slowdown_max);
    take(n, "sigma_slowdown", base.candidates.sigma_slowdown);
    take(n, "tail", base.candidates.tail);
    take(n, "eps_target", base.candidates.eps_target);
    take(n, "retry_cap", base.candidates.retry_cap);
  }
  return base;
}

EngineParams load_params_json(const std::string& path, EngineParams base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return merge_params_json_text(text, std::move(base));
}

}  // namespace mfg
