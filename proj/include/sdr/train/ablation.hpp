#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdr/train/trainer.hpp"

namespace sdr {

struct AblationCell {
  std::string id;
  FeatureSet feature_set = FeatureSet::face_only;
  TrainConfig train;
};

// The 2 x 4 grid: {face_only, pca_fused} x {ce, ce_ls, spce, mse}. The mse
// cells use the regression framing; spce cells train 150 epochs, the rest
// 100.
std::vector<AblationCell> paper8_grid();

struct CellResult {
  AblationCell cell;
  std::vector<std::uint64_t> run_seeds;
  std::vector<TrainRun> runs;
  std::vector<double> run_f1;  // test macro F1 per completed run
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;  // population standard deviation over runs
  double mean_mae = 0.0;
  bool any_aborted = false;
};

struct AblationOptions {
  double split_ratio = 0.8;
  bool participant_split = false;
  int runs = 5;
  int jobs = 1;
  double pca_target_variance = 0.99;
  DatasetOptions data;  // feature_set and pca are overridden per cell
  // when set, each run's checkpoint lands at checkpoints/<cell>/run<k>.sdfm
  std::optional<std::filesystem::path> checkpoint_dir;
};

struct AblationReport {
  std::vector<CellResult> cells;
  std::uint64_t seed = 0;
  int train_size = 0;
  int test_size = 0;
  int pca_output_dim = 0;  // 0 when no cell used pca_fused
};

// Trains every cell `runs` times. Run seeds are seed + run index; the split
// seed is just `seed`, so all runs share one split. Cells and runs may train
// concurrently under options.jobs; results are deterministic regardless of
// job count. An aborted run is recorded and does not stop other work.
AblationReport run_ablation(const std::vector<AblationCell>& grid,
                            const std::vector<SegmentRecord>& records,
                            const AblationOptions& options, std::uint64_t seed);

// Writes report.csv, report.json, and f1_bars.png into out_dir. Output is
// byte-identical for equal reports (no timestamps or machine details).
void write_ablation_outputs(const AblationReport& report, const std::filesystem::path& out_dir);

}  // namespace sdr
