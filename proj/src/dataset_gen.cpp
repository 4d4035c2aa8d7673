#include "ssemc/dataset_gen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssemc {

namespace {

struct ClassProfile {
  const char* label;
  double prior;
  std::vector<double> buying;       // vhigh, high, med, low
  std::vector<double> maintenance;  // vhigh, high, med, low
  std::vector<double> safety;       // low, med, high
  double price_mean, price_std;
  double mileage_mean, mileage_std;
};

const std::vector<ClassProfile>& profiles() {
  static const std::vector<ClassProfile> p = {
      {"unacceptable", 0.45,
       {0.55, 0.28, 0.12, 0.05},
       {0.50, 0.30, 0.14, 0.06},
       {0.72, 0.23, 0.05},
       9200.0, 1400.0, 154000.0, 26000.0},
      {"good", 0.35,
       {0.08, 0.22, 0.45, 0.25},
       {0.10, 0.25, 0.45, 0.20},
       {0.12, 0.58, 0.30},
       6400.0, 1100.0, 92000.0, 18000.0},
      {"very good", 0.20,
       {0.02, 0.08, 0.25, 0.65},
       {0.03, 0.09, 0.28, 0.60},
       {0.02, 0.15, 0.83},
       4300.0, 900.0, 38000.0, 12000.0},
  };
  return p;
}

const std::vector<std::string>& buying_levels() {
  static const std::vector<std::string> v = {"vhigh", "high", "med", "low"};
  return v;
}

const std::vector<std::string>& safety_levels() {
  static const std::vector<std::string> v = {"low", "med", "high"};
  return v;
}

double positive_normal(Rng& rng, double mean, double stddev) {
  return std::max(0.0, std::round(rng.normal(mean, stddev)));
}

}  // namespace

std::vector<CarRecord> generate_car_records(std::uint64_t seed, int rows) {
  if (rows < 1) {
    throw std::invalid_argument("generate_car_records: rows must be >= 1");
  }
  Rng rng(seed);
  std::vector<double> priors;
  for (const ClassProfile& p : profiles()) priors.push_back(p.prior);

  std::vector<CarRecord> records;
  records.reserve(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) {
    const ClassProfile& profile = profiles()[rng.pick(priors)];
    CarRecord rec;
    rec.buying = buying_levels()[rng.pick(profile.buying)];
    rec.maintenance = buying_levels()[rng.pick(profile.maintenance)];
    rec.price = positive_normal(rng, profile.price_mean, profile.price_std);
    rec.mileage = positive_normal(rng, profile.mileage_mean, profile.mileage_std);
    rec.safety = safety_levels()[rng.pick(profile.safety)];
    rec.label = profile.label;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace ssemc
