#include "fulab/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fulab/kern/kernels.hpp"

namespace fulab::metrics {

namespace k = fulab::kern;

double mse(const Image& x, const Image& xhat) {
  if (!x.same_shape(xhat)) throw std::invalid_argument("mse: shape mismatch");
  std::vector<float> diff(x.size());
  k::vsub(x.data.data(), xhat.data.data(), diff.data(), diff.size());
  return k::sumsq_acc64(diff.data(), diff.size()) / static_cast<double>(x.size());
}

PsnrValue psnr(const Image& x, const Image& xhat, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("psnr: R must be > 0");
  const double e = mse(x, xhat);
  if (e == 0.0) return {kPsnrCap, true};
  return {10.0 * std::log10(r * r / e), false};
}

double lpips(const Image& x, const Image& xhat, const igf::PerceptualExtractor& phi) {
  return phi.lpips(x, xhat);
}

namespace {
void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size()));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
}  // namespace

ReconReport score_batch(const std::vector<Image>& originals,
                        const std::vector<Image>& reconstructions,
                        const igf::PerceptualExtractor& phi, double r) {
  if (originals.size() != reconstructions.size())
    throw std::invalid_argument("score: count mismatch");
  ReconReport rep;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    rep.mse_values.push_back(mse(originals[i], reconstructions[i]));
    const auto p = psnr(originals[i], reconstructions[i], r);
    rep.psnr_values.push_back(p.db);
    rep.psnr_capped.push_back(p.capped);
    rep.lpips_values.push_back(lpips(originals[i], reconstructions[i], phi));
  }
  mean_std(rep.mse_values, rep.mse_mean, rep.mse_std);
  mean_std(rep.psnr_values, rep.psnr_mean, rep.psnr_std);
  mean_std(rep.lpips_values, rep.lpips_mean, rep.lpips_std);
  return rep;
}

std::string report_csv(const ReconReport& rep) {
  std::string out = "index,mse,psnr_db,psnr_capped,lpips\n";
  for (std::size_t i = 0; i < rep.mse_values.size(); ++i) {
    out += std::to_string(i) + "," + fmt(rep.mse_values[i]) + "," +
           fmt(rep.psnr_values[i]) + "," + (rep.psnr_capped[i] ? "1" : "0") +
           "," + fmt(rep.lpips_values[i]) + "\n";
  }
  return out;
}

nlohmann::ordered_json report_summary(const ReconReport& rep) {
  nlohmann::ordered_json j;
  j["count"] = rep.mse_values.size();
  j["mse"] = {{"mean", rep.mse_mean}, {"std", rep.mse_std}};
  j["psnr_db"] = {{"mean", rep.psnr_mean}, {"std", rep.psnr_std}};
  j["lpips"] = {{"mean", rep.lpips_mean}, {"std", rep.lpips_std}};
  if (!rep.fingerprint.is_null()) j["config"] = rep.fingerprint;
  return j;
}

void write_report(const ReconReport& rep, const std::string& csv_path,
                  const std::string& json_path) {
  {
    std::ofstream os(csv_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + csv_path);
    os << report_csv(rep);
  }
  {
    std::ofstream os(json_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + json_path);
    os << report_summary(rep).dump(2) << "\n";
  }
}

}  // namespace fulab::metrics
