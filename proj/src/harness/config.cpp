#include "fulab/harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fulab/core/layout.hpp"
#include "fulab/harness/datasets.hpp"

namespace fulab::harness {

void ExperimentConfig::validate() const {
  dataset_shape(dataset);  // throws on unknown ids
  if (arch != "convnet" && arch != "resnet-small" && arch != "mlp")
    throw std::invalid_argument("config: unknown arch " + arch);
  if (train_size < federation.clients)
    throw std::invalid_argument("config: train size below client count");
  federation.validate();
  if (scenario_kind != "sample" && scenario_kind != "class" && scenario_kind != "client")
    throw std::invalid_argument("config: unknown scenario kind " + scenario_kind);
  if (unlearned_clients.empty())
    throw std::invalid_argument("config: unlearned client set is empty");
  if (unlearn_method != "afu" && unlearn_method != "efu")
    throw std::invalid_argument("config: unknown unlearn method " + unlearn_method);
  afu.validate();
  defense.validate();
  if (!(nu > 0.0 && nu <= 1.0))
    throw std::invalid_argument("config: nu must be in (0,1]");
  if (beta < 0.0) throw std::invalid_argument("config: beta must be >= 0");
  if (aux_source != "in-distribution" && aux_source != "out-of-distribution")
    throw std::invalid_argument("config: unknown aux source " + aux_source);
  if (aux_size < 2) throw std::invalid_argument("config: aux size must be >= 2");
  if (reduction != "svd" && reduction != "hash")
    throw std::invalid_argument("config: unknown reduction " + reduction);
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["model"] = {{"arch", arch},
                {"mlp_hidden", model_options.mlp_hidden},
                {"conv_c1", model_options.conv_c1},
                {"conv_c2", model_options.conv_c2},
                {"res_c1", model_options.res_c1},
                {"res_c2", model_options.res_c2}};
  j["train_size"] = train_size;
  j["holdout_size"] = holdout_size;
  j["federation"] = {{"clients", federation.clients},
                     {"selection_fraction", federation.selection_fraction},
                     {"rounds", federation.rounds},
                     {"local_epochs", federation.local_epochs},
                     {"local_lr", federation.local_lr},
                     {"batch", federation.batch},
                     {"aggregator", federation.aggregator},
                     {"fedprox_mu", federation.fedprox_mu},
                     {"server_lr", federation.server_lr},
                     {"seed", federation.seed}};
  j["scenario"] = {{"kind", scenario_kind},
                   {"unlearned_clients", unlearned_clients},
                   {"forgotten_count", forgotten_count},
                   {"target_class", target_class}};
  j["unlearn"] = {{"method", unlearn_method},
                  {"eta_u", afu.eta_u},
                  {"zeta", afu.zeta},
                  {"finetune_epochs", afu.finetune_epochs},
                  {"finetune_lr", afu.finetune_lr},
                  {"finetune_batch", afu.finetune_batch},
                  {"finetune_seed", afu.finetune_seed},
                  {"efu_seed", efu_seed}};
  j["defense"] = defense.to_json();
  j["attack"] = {{"nu", nu},
                 {"beta", beta},
                 {"aux_source", aux_source},
                 {"aux_size", aux_size},
                 {"reduction", reduction},
                 {"hash_dim", hash_dim},
                 {"center", center},
                 {"lr", attack_train.lr},
                 {"batch", attack_train.batch},
                 {"epochs", attack_train.epochs},
                 {"train_seed", attack_train.seed},
                 {"seed_channels", seed_channels},
                 {"seed_hw", seed_hw},
                 {"stage_widths", stage_widths}};
  j["metrics"] = {{"phi_kind", phi.kind},
                  {"phi_weights", phi.weights_path},
                  {"phi_seed", phi.seed},
                  {"phi_c1", phi.c1},
                  {"phi_c2", phi.c2},
                  {"phi_layers", phi.layers},
                  {"psnr_r", psnr_r},
                  {"tau", tau}};
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.dataset = j.value("dataset", c.dataset);
  if (j.contains("model")) {
    const auto& m = j.at("model");
    c.arch = m.value("arch", c.arch);
    c.model_options.mlp_hidden = m.value("mlp_hidden", c.model_options.mlp_hidden);
    c.model_options.conv_c1 = m.value("conv_c1", c.model_options.conv_c1);
    c.model_options.conv_c2 = m.value("conv_c2", c.model_options.conv_c2);
    c.model_options.res_c1 = m.value("res_c1", c.model_options.res_c1);
    c.model_options.res_c2 = m.value("res_c2", c.model_options.res_c2);
  }
  c.train_size = j.value("train_size", c.train_size);
  c.holdout_size = j.value("holdout_size", c.holdout_size);
  if (j.contains("federation")) {
    const auto& f = j.at("federation");
    c.federation.clients = f.value("clients", c.federation.clients);
    c.federation.selection_fraction =
        f.value("selection_fraction", c.federation.selection_fraction);
    c.federation.rounds = f.value("rounds", c.federation.rounds);
    c.federation.local_epochs = f.value("local_epochs", c.federation.local_epochs);
    c.federation.local_lr = f.value("local_lr", c.federation.local_lr);
    c.federation.batch = f.value("batch", c.federation.batch);
    c.federation.aggregator = f.value("aggregator", c.federation.aggregator);
    c.federation.fedprox_mu = f.value("fedprox_mu", c.federation.fedprox_mu);
    c.federation.server_lr = f.value("server_lr", c.federation.server_lr);
    c.federation.seed = f.value("seed", c.federation.seed);
  }
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    c.scenario_kind = s.value("kind", c.scenario_kind);
    c.unlearned_clients =
        s.value("unlearned_clients", c.unlearned_clients);
    c.forgotten_count = s.value("forgotten_count", c.forgotten_count);
    c.target_class = s.value("target_class", c.target_class);
  }
  if (j.contains("unlearn")) {
    const auto& u = j.at("unlearn");
    c.unlearn_method = u.value("method", c.unlearn_method);
    c.afu.eta_u = u.value("eta_u", c.afu.eta_u);
    c.afu.zeta = u.value("zeta", c.afu.zeta);
    c.afu.finetune_epochs = u.value("finetune_epochs", c.afu.finetune_epochs);
    c.afu.finetune_lr = u.value("finetune_lr", c.afu.finetune_lr);
    c.afu.finetune_batch = u.value("finetune_batch", c.afu.finetune_batch);
    c.afu.finetune_seed = u.value("finetune_seed", c.afu.finetune_seed);
    c.efu_seed = u.value("efu_seed", c.efu_seed);
  }
  if (j.contains("defense"))
    c.defense = defenses::DefenseConfig::from_json(j.at("defense"));
  if (j.contains("attack")) {
    const auto& a = j.at("attack");
    c.nu = a.value("nu", c.nu);
    c.beta = a.value("beta", c.beta);
    c.aux_source = a.value("aux_source", c.aux_source);
    c.aux_size = a.value("aux_size", c.aux_size);
    c.reduction = a.value("reduction", c.reduction);
    c.hash_dim = a.value("hash_dim", c.hash_dim);
    c.center = a.value("center", c.center);
    c.attack_train.lr = a.value("lr", c.attack_train.lr);
    c.attack_train.batch = a.value("batch", c.attack_train.batch);
    c.attack_train.epochs = a.value("epochs", c.attack_train.epochs);
    c.attack_train.seed = a.value("train_seed", c.attack_train.seed);
    c.seed_channels = a.value("seed_channels", c.seed_channels);
    c.seed_hw = a.value("seed_hw", c.seed_hw);
    c.stage_widths = a.value("stage_widths", c.stage_widths);
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    c.phi.kind = m.value("phi_kind", c.phi.kind);
    c.phi.weights_path = m.value("phi_weights", c.phi.weights_path);
    c.phi.seed = m.value("phi_seed", c.phi.seed);
    c.phi.c1 = m.value("phi_c1", c.phi.c1);
    c.phi.c2 = m.value("phi_c2", c.phi.c2);
    c.phi.layers = m.value("phi_layers", c.phi.layers);
    c.psnr_r = m.value("psnr_r", c.psnr_r);
    c.tau = m.value("tau", c.tau);
  }
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

std::string ExperimentConfig::fingerprint() const {
  const std::string dump = to_json().dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump)));
  return buf;
}

}  // namespace fulab::harness
