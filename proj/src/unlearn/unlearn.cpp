#include "fulab/unlearn/unlearn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fulab/kern/kernels.hpp"

namespace fulab::unlearn {

namespace k = fulab::kern;

void AFUConfig::validate() const {
  if (!(zeta > 0.0)) throw std::invalid_argument("afu: zeta must be > 0");
  if (eta_u < 0.0) throw std::invalid_argument("afu: eta_u must be >= 0");
  if (finetune_epochs < 0) throw std::invalid_argument("afu: negative fine-tune epochs");
}

ScenarioSplit make_scenario(const std::string& kind,
                            const std::vector<int>& unlearned_clients, int count,
                            int target_class,
                            const std::vector<fedsim::ClientDataset>& clients,
                            std::uint64_t seed) {
  if (unlearned_clients.empty())
    throw std::invalid_argument("scenario: unlearned client set is empty");
  if (kind != "sample" && kind != "class" && kind != "client")
    throw std::invalid_argument("scenario: unknown kind " + kind);
  std::vector<int> cu = unlearned_clients;
  std::sort(cu.begin(), cu.end());
  cu.erase(std::unique(cu.begin(), cu.end()), cu.end());
  for (int id : cu)
    if (id < 0 || static_cast<std::size_t>(id) >= clients.size())
      throw std::invalid_argument("scenario: unlearned client id out of range");

  ScenarioSplit out;
  out.scenario.kind = kind;
  out.scenario.unlearned_clients = cu;
  out.scenario.target_class = kind == "class" ? target_class : -1;

  const int classes = clients.empty() ? 0 : clients.front().data.classes;
  out.forgotten.classes = classes;

  // forgotten index sets per unlearned client
  std::vector<std::vector<std::size_t>> fsets(cu.size());
  if (kind == "client") {
    for (std::size_t u = 0; u < cu.size(); ++u) {
      const auto& cd = clients[cu[u]].data;
      fsets[u].resize(cd.size());
      for (std::size_t i = 0; i < cd.size(); ++i) fsets[u][i] = i;
    }
  } else if (kind == "class") {
    if (target_class < 0 || target_class >= classes)
      throw std::invalid_argument("scenario: target class out of range");
    for (std::size_t u = 0; u < cu.size(); ++u) {
      const auto& cd = clients[cu[u]].data;
      for (std::size_t i = 0; i < cd.size(); ++i)
        if (cd.labels[i] == target_class) fsets[u].push_back(i);
    }
  } else {
    std::size_t pool = 0;
    for (int id : cu) pool += clients[id].data.size();
    if (count < 1 || static_cast<std::size_t>(count) > pool)
      throw std::invalid_argument("scenario: forgotten count exceeds unlearned data");
    Rng rng(seed);
    auto picks = rng.sample_without_replacement(pool, static_cast<std::size_t>(count));
    std::sort(picks.begin(), picks.end());
    // map flat indices back to (client, local index)
    std::size_t base = 0, which = 0;
    for (std::size_t u = 0; u < cu.size(); ++u) {
      const std::size_t sz = clients[cu[u]].data.size();
      while (which < picks.size() && picks[which] < base + sz) {
        fsets[u].push_back(picks[which] - base);
        ++which;
      }
      base += sz;
    }
  }

  out.scenario.forgotten_indices = fsets;

  // build retained clients (all clients) and the forgotten union
  out.retained_clients.reserve(clients.size());
  for (const auto& cl : clients) {
    auto it = std::find(cu.begin(), cu.end(), cl.id);
    if (it == cu.end()) {
      out.retained_clients.push_back(cl);
      continue;
    }
    const std::size_t u = static_cast<std::size_t>(it - cu.begin());
    std::vector<char> is_forgotten(cl.data.size(), 0);
    for (std::size_t i : fsets[u]) is_forgotten[i] = 1;
    fedsim::ClientDataset kept;
    kept.id = cl.id;
    kept.data.classes = cl.data.classes;
    LabeledDataset fset;
    fset.classes = cl.data.classes;
    for (std::size_t i = 0; i < cl.data.size(); ++i) {
      if (is_forgotten[i])
        fset.push(cl.data.images[i], cl.data.labels[i]);
      else
        kept.data.push(cl.data.images[i], cl.data.labels[i]);
    }
    for (std::size_t i = 0; i < fset.size(); ++i)
      out.forgotten.push(fset.images[i], fset.labels[i]);
    out.forgotten_per_client.push_back(std::move(fset));
    out.retained_clients.push_back(std::move(kept));
  }
  return out;
}

fedsim::TrainResult run_efu(const fedsim::Model& m, fedsim::FederationConfig cfg,
                            const std::vector<fedsim::ClientDataset>& retained_clients,
                            std::uint64_t fresh_init_seed,
                            const LabeledDataset* holdout) {
  std::size_t total = 0;
  for (const auto& cl : retained_clients) total += cl.data.size();
  if (total == 0) throw std::invalid_argument("efu: retained dataset is empty");
  cfg.seed = fresh_init_seed;
  return fedsim::train_federated(m, cfg, retained_clients, holdout);
}

AFUResult run_afu(const fedsim::Model& m, const ParamVector& theta_T,
                  const ScenarioSplit& split, const AFUConfig& cfg) {
  cfg.validate();
  theta_T.check_layout(m.layout().id());
  if (split.forgotten_per_client.empty())
    throw std::invalid_argument("afu: no unlearned clients");
  for (const auto& f : split.forgotten_per_client)
    if (f.size() == 0)
      throw std::invalid_argument("afu: an unlearned client has no forgotten samples");

  AFUResult res;
  std::vector<std::pair<ParamVector, double>> locals;
  std::size_t total_forgotten = 0;
  for (const auto& f : split.forgotten_per_client) total_forgotten += f.size();

  for (const auto& fset : split.forgotten_per_client) {
    // single full-batch ascent step on the forgotten subset
    std::vector<float> grad(theta_T.size(), 0.0f);
    fedsim::batch_gradient(m, theta_T, fset, grad.data());
    ParamVector local = theta_T;
    k::axpy(static_cast<float>(cfg.eta_u), grad.data(), local.data(), local.size());
    // radial projection onto the zeta-ball around theta_T
    std::vector<float> delta(local.size());
    k::vsub(local.data(), theta_T.data(), delta.data(), delta.size());
    double dist = std::sqrt(k::sumsq_acc64(delta.data(), delta.size()));
    if (dist > cfg.zeta) {
      const float shrink = static_cast<float>(cfg.zeta / dist);
      k::scale(shrink, delta.data(), delta.size());
      k::vadd(theta_T.data(), delta.data(), local.data(), local.size());
      dist = std::sqrt(k::sumsq_acc64(delta.data(), delta.size()));
    }
    res.client_deviation.push_back(dist);
    locals.emplace_back(std::move(local), static_cast<double>(fset.size()) /
                                              static_cast<double>(total_forgotten));
  }
  res.pre_finetune = fedsim::aggregate(locals, "fedavg", nullptr);

  // centralized fine-tuning on the retained data
  LabeledDataset retained;
  retained.classes = m.spec().classes;
  for (const auto& cl : split.retained_clients)
    for (std::size_t i = 0; i < cl.data.size(); ++i)
      retained.push(cl.data.images[i], cl.data.labels[i]);

  res.params = res.pre_finetune;
  if (cfg.finetune_epochs > 0 && retained.size() > 0) {
    fedsim::ClientDataset all;
    all.id = 0;
    all.data = std::move(retained);
    res.params = fedsim::local_update(m, res.pre_finetune, all, cfg.finetune_lr,
                                      cfg.finetune_epochs, cfg.finetune_batch,
                                      cfg.finetune_seed, "fedavg", 0.0);
  }
  return res;
}

}  // namespace fulab::unlearn
