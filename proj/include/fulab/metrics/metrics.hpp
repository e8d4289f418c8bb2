#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fulab/core/image.hpp"
#include "fulab/igf/perceptual.hpp"

namespace fulab::metrics {

double mse(const Image& x, const Image& xhat);

inline constexpr double kPsnrCap = 100.0;

struct PsnrValue {
  double db = 0.0;
  bool capped = false;  // true when MSE was zero and the cap applies
};

PsnrValue psnr(const Image& x, const Image& xhat, double r = 1.0);

double lpips(const Image& x, const Image& xhat, const igf::PerceptualExtractor& phi);

struct ReconReport {
  std::vector<double> mse_values;
  std::vector<double> psnr_values;
  std::vector<bool> psnr_capped;
  std::vector<double> lpips_values;
  double mse_mean = 0.0, mse_std = 0.0;
  double psnr_mean = 0.0, psnr_std = 0.0;
  double lpips_mean = 0.0, lpips_std = 0.0;
  nlohmann::ordered_json fingerprint;  // defense, scenario, beta, nu, extractor
};

ReconReport score_batch(const std::vector<Image>& originals,
                        const std::vector<Image>& reconstructions,
                        const igf::PerceptualExtractor& phi, double r = 1.0);

std::string report_csv(const ReconReport& rep);
nlohmann::ordered_json report_summary(const ReconReport& rep);
void write_report(const ReconReport& rep, const std::string& csv_path,
                  const std::string& json_path);

}  // namespace fulab::metrics
