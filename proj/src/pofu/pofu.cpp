#include "fulab/pofu/pofu.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fulab/core/binio.hpp"
#include "fulab/kern/kernels.hpp"

namespace fulab::pofu {

namespace k = fulab::kern;

namespace {
constexpr char kMagic[12] = "FULABPOFU";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

PoFURecord compute_pofu(const fedsim::Model& m, const ParamVector& theta_T,
                        const ParamVector& theta_prime,
                        const LabeledDataset& forgotten, int client_id,
                        const std::string& scenario) {
  theta_T.check_same(theta_prime);
  theta_T.check_layout(m.layout().id());
  if (forgotten.size() == 0)
    throw std::invalid_argument("pofu: forgotten set is empty");

  PoFURecord rec;
  rec.client_id = client_id;
  rec.n = forgotten.size();
  rec.d = theta_T.size();
  rec.scenario = scenario;
  rec.defense = nlohmann::ordered_json{{"id", "none"}};
  rec.layout_id = theta_T.layout_id;
  rec.rows.resize(rec.n * rec.d);

  for (std::size_t j = 0; j < rec.n; ++j) {
    const auto g_orig = fedsim::per_sample_gradient(m, theta_T, forgotten.images[j],
                                                    forgotten.labels[j]);
    const auto g_unl = fedsim::per_sample_gradient(m, theta_prime, forgotten.images[j],
                                                   forgotten.labels[j]);
    k::vsub(g_orig.data(), g_unl.data(), rec.row(j), rec.d);
  }
  return rec;
}

VerificationVerdict verify_pofu(const PoFURecord& rec, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("verify: tau must be > 0");
  VerificationVerdict v;
  v.tau = tau;
  v.row_norms.reserve(rec.n);
  v.row_pass.reserve(rec.n);
  bool all = true;
  for (std::size_t j = 0; j < rec.n; ++j) {
    const double norm = std::sqrt(k::sumsq_acc64(rec.row(j), rec.d));
    const bool pass = norm <= tau;
    v.row_norms.push_back(norm);
    v.row_pass.push_back(pass);
    all = all && pass;
  }
  v.overall = all;
  return v;
}

void save_pofu(const std::string& path, const PoFURecord& rec,
               const std::string& fingerprint) {
  auto os = binio::open_out(path);
  binio::write_magic(os, kMagic);
  nlohmann::ordered_json h;
  h["client_id"] = rec.client_id;
  h["n"] = rec.n;
  h["d"] = rec.d;
  h["scenario"] = rec.scenario;
  h["defense"] = rec.defense;
  h["layout_id"] = hex64(rec.layout_id);
  if (!fingerprint.empty()) h["fingerprint"] = fingerprint;
  binio::write_header(os, h);
  binio::write_f32(os, rec.rows.data(), rec.rows.size());
  if (!os) throw std::runtime_error("pofu write failed: " + path);
}

PoFURecord load_pofu(const std::string& path) {
  auto is = binio::open_in(path);
  binio::read_magic(is, kMagic, "pofu " + path);
  const auto h = binio::read_header(is, "pofu " + path);
  PoFURecord rec;
  rec.client_id = h.at("client_id").get<int>();
  rec.n = h.at("n").get<std::size_t>();
  rec.d = h.at("d").get<std::size_t>();
  rec.scenario = h.at("scenario").get<std::string>();
  rec.defense = h.at("defense");
  rec.layout_id = std::stoull(h.at("layout_id").get<std::string>(), nullptr, 16);
  rec.rows.resize(rec.n * rec.d);
  binio::read_f32(is, rec.rows.data(), rec.rows.size(), "pofu " + path);
  return rec;
}

}  // namespace fulab::pofu
