#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sbdf/grid.hpp"
#include "sbdf/models.hpp"

namespace sbdf::harness {

/// Flat `section.key = value` store. Lines starting with '#' and blank lines
/// are ignored. Keys are checked against the schema when resolved.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValues load(const std::filesystem::path& path);

  /// Applies a `section.key=value` override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class ModelId { AllenCahn, Prostate };
enum class InitialKind { Example, Zero, Constant };

struct ProstateConfig {
  ProstateParams params;
  ProstateInitialConstants initial;
  std::vector<double> snapshot_times;
  bool diffusion_only = false;
};

struct RunConfig {
  ModelId model = ModelId::AllenCahn;
  double epsilon = 0.01;
  double B = 2.0;
  InitialKind initial = InitialKind::Example;
  double initial_value = 0.0;

  GridSpec grid{};
  double length = 1.0;

  int k = 2;
  double dt = 0.1;
  double T = 1.0;
  double tol_const = 1.0;
  int max_iters = 500;
  bool cutoff = true;

  std::filesystem::path out_dir = "out";
  bool timing = true;
  bool snapshot_csv = false;
  bool trace_energy = false;
  bool trace_mbp = true;
  bool trace_iterates = false;
  unsigned long long seed = 0;
  int threads = 1;

  std::vector<double> converge_dts{0.1, 0.05, 0.025, 0.0125, 0.00625};
  double reference_dt = 0.0;  // 0: smallest dt / 16
  std::vector<int> converge_orders;  // empty: {k}

  std::vector<double> compare_dts{0.1, 0.05, 0.025, 0.0125, 0.00625};

  std::vector<double> mbp_dts{0.1, 0.5, 1.0};
  std::vector<int> mbp_orders{1, 2, 3, 4};
  double mbp_T = 60.0;
  bool mbp_cutoff_k1 = false;

  ProstateConfig prostate;

  /// Every resolved key with its value, in key order (for the manifest).
  std::vector<std::pair<std::string, std::string>> echo;

  NonlinearModel allen_cahn_model() const;
  Field initial_field() const;
  int steps() const;
};

/// Validates keys and values; throws ConfigError naming `section.key`.
RunConfig resolve(const KeyValues& kv);

/// Keys accepted by resolve(), with their defaults as text.
const std::map<std::string, std::string>& schema();

}  // namespace sbdf::harness
