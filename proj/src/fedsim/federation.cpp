#include "fulab/fedsim/federation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fulab/kern/kernels.hpp"

namespace fulab::fedsim {

namespace k = fulab::kern;

namespace {
constexpr std::uint64_t kStreamInit = 0x11;
constexpr std::uint64_t kStreamSelect = 0x22;
constexpr std::uint64_t kStreamClient = 0x33;
}  // namespace

void FederationConfig::validate() const {
  if (clients < 1) throw std::invalid_argument("federation: need at least one client");
  if (!(selection_fraction > 0.0 && selection_fraction <= 1.0))
    throw std::invalid_argument("federation: selection fraction must be in (0,1]");
  if (rounds < 1) throw std::invalid_argument("federation: rounds must be >= 1");
  if (!(local_lr > 0.0)) throw std::invalid_argument("federation: learning rate must be > 0");
  if (batch < 1) throw std::invalid_argument("federation: batch must be >= 1");
  if (aggregator != "fedavg" && aggregator != "fedprox" && aggregator != "fedopt")
    throw std::invalid_argument("federation: unknown aggregator " + aggregator);
}

std::vector<ClientDataset> partition_dataset(const LabeledDataset& ds, int clients,
                                             const std::string& scheme,
                                             std::uint64_t seed) {
  if (scheme != "iid") throw std::invalid_argument("unknown partition scheme: " + scheme);
  if (clients < 1 || ds.size() < static_cast<std::size_t>(clients))
    throw std::invalid_argument("partition: more clients than samples");
  Rng rng(seed);
  std::vector<std::size_t> idx(ds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  std::vector<ClientDataset> out(clients);
  for (int c = 0; c < clients; ++c) {
    out[c].id = c;
    out[c].data.classes = ds.classes;
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto& cl = out[i % clients];
    cl.data.push(ds.images[idx[i]], ds.labels[idx[i]]);
  }
  return out;
}

ParamVector per_sample_gradient(const Model& m, const ParamVector& p,
                                const Image& x, int y) {
  ParamVector g = m.zeros();
  const double loss = m.loss_grad(p, x, y, g.data());
  if (!std::isfinite(loss))
    throw std::runtime_error("per-sample gradient: non-finite loss (" +
                             std::to_string(loss) + ") for label " + std::to_string(y));
  return g;
}

double batch_gradient(const Model& m, const ParamVector& p,
                      const LabeledDataset& ds, float* grad) {
  if (ds.size() == 0) throw std::invalid_argument("batch gradient over empty set");
  std::vector<float> acc(p.size(), 0.0f);
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    loss += m.loss_grad(p, ds.images[i], ds.labels[i], acc.data());
  const float inv = 1.0f / static_cast<float>(ds.size());
  k::scale(inv, acc.data(), acc.size());
  if (grad) k::vadd(grad, acc.data(), grad, acc.size());
  return loss / static_cast<double>(ds.size());
}

ParamVector local_update(const Model& m, const ParamVector& broadcast,
                         const ClientDataset& client, double lr, int epochs,
                         int batch, std::uint64_t seed,
                         const std::string& aggregator, double fedprox_mu) {
  if (client.data.size() == 0)
    throw std::invalid_argument("local update on empty client dataset");
  if (batch < 1) throw std::invalid_argument("local update: batch must be >= 1");
  broadcast.check_layout(m.layout().id());

  ParamVector theta = broadcast;
  Rng rng(seed);
  const std::size_t n = client.data.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<float> grad(theta.size());

  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0f);
      for (std::size_t i = start; i < stop; ++i)
        m.loss_grad(theta, client.data.images[order[i]],
                    client.data.labels[order[i]], grad.data());
      const float inv = 1.0f / static_cast<float>(stop - start);
      k::scale(inv, grad.data(), grad.size());
      if (aggregator == "fedprox" && fedprox_mu != 0.0) {
        // proximal pull toward the broadcast parameters
        for (std::size_t j = 0; j < grad.size(); ++j)
          grad[j] += static_cast<float>(fedprox_mu) *
                     (theta.values[j] - broadcast.values[j]);
      }
      k::axpy(static_cast<float>(-lr), grad.data(), theta.data(), theta.size());
    }
  }
  return theta;
}

ParamVector aggregate(const std::vector<std::pair<ParamVector, double>>& updates,
                      const std::string& aggregator, const ServerState* server) {
  if (updates.empty()) throw std::invalid_argument("aggregate: no updates");
  const std::size_t d = updates.front().first.size();
  const std::uint64_t lid = updates.front().first.layout_id;
  double wsum = 0.0;
  for (const auto& [p, w] : updates) {
    if (p.size() != d || p.layout_id != lid)
      throw std::invalid_argument("aggregate: mismatched parameter vectors");
    if (!(w > 0.0)) throw std::invalid_argument("aggregate: weights must be positive");
    wsum += w;
  }
  std::vector<double> acc(d, 0.0);
  for (const auto& [p, w] : updates) {
    const double wn = w / wsum;
    for (std::size_t j = 0; j < d; ++j)
      acc[j] += wn * static_cast<double>(p.values[j]);
  }
  ParamVector out(d, lid);
  if (aggregator == "fedopt") {
    if (!server) throw std::invalid_argument("fedopt aggregation needs server state");
    server->global.check_layout(lid);
    // mean update minus current global is the pseudo-gradient
    for (std::size_t j = 0; j < d; ++j) {
      const double g = acc[j] - static_cast<double>(server->global.values[j]);
      out.values[j] = static_cast<float>(
          static_cast<double>(server->global.values[j]) + server->server_lr * g);
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) out.values[j] = static_cast<float>(acc[j]);
  }
  return out;
}

TrainResult train_federated(const Model& m, const FederationConfig& cfg,
                            const std::vector<ClientDataset>& clients,
                            const LabeledDataset* holdout, const ParamVector* init) {
  cfg.validate();
  if (clients.empty()) throw std::invalid_argument("train_federated: no clients");

  Rng root(cfg.seed);
  TrainResult res;
  res.final_params = init ? *init : m.init_params(root.fork(kStreamInit).seed());
  res.final_params.check_layout(m.layout().id());

  std::vector<int> eligible;
  for (std::size_t i = 0; i < clients.size(); ++i)
    if (clients[i].data.size() > 0) eligible.push_back(static_cast<int>(i));
  if (eligible.empty()) throw std::invalid_argument("train_federated: all clients empty");

  const std::size_t want = static_cast<std::size_t>(
      std::ceil(cfg.selection_fraction * static_cast<double>(clients.size())));
  const std::size_t per_round = std::max<std::size_t>(1, std::min(want, eligible.size()));

  for (int t = 0; t < cfg.rounds; ++t) {
    Rng sel = root.fork(kStreamSelect + 1000ull * static_cast<std::uint64_t>(t));
    auto picks = sel.sample_without_replacement(eligible.size(), per_round);
    std::vector<int> ids;
    ids.reserve(picks.size());
    for (auto pi : picks) ids.push_back(eligible[pi]);
    std::sort(ids.begin(), ids.end());

    std::vector<std::pair<ParamVector, double>> updates;
    updates.reserve(ids.size());
    for (int id : ids) {
      const auto& cl = clients[id];
      const std::uint64_t cseed =
          root.fork(kStreamClient + 1000ull * static_cast<std::uint64_t>(t) +
                    static_cast<std::uint64_t>(id))
              .seed();
      updates.emplace_back(
          local_update(m, res.final_params, cl, cfg.local_lr, cfg.local_epochs,
                       cfg.batch, cseed, cfg.aggregator, cfg.fedprox_mu),
          static_cast<double>(cl.data.size()));
    }
    ServerState state{res.final_params, cfg.server_lr};
    res.final_params = aggregate(updates, cfg.aggregator,
                                 cfg.aggregator == "fedopt" ? &state : nullptr);
    res.round_checkpoints.push_back(res.final_params);
    res.selected_per_round.push_back(std::move(ids));
  }
  if (holdout && holdout->size() > 0)
    res.holdout_accuracy = m.accuracy(res.final_params, *holdout);
  return res;
}

}  // namespace fulab::fedsim
