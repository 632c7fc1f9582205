#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <vector>

#include <json.hpp>

#include "sdr/sdfm.hpp"
#include "sdr/synthetic.hpp"
#include "sdr/train/ablation.hpp"

using namespace sdr;
namespace fs = std::filesystem;

namespace {

const std::vector<SegmentRecord>& smoke_records() {
  static std::vector<SegmentRecord> records = [] {
    SyntheticSpec spec;
    spec.per_class.fill(3);  // 21 segments
    const auto dir = fs::temp_directory_path() / "sdr_ablation_fixture";
    fs::remove_all(dir);
    return generate_synthetic_corpus(spec, 99, dir);
  }();
  return records;
}

// two-cell grid that finishes in seconds
std::vector<AblationCell> smoke_grid() {
  std::vector<AblationCell> grid(2);
  grid[0].id = "face_only_ce";
  grid[0].feature_set = FeatureSet::face_only;
  grid[0].train.loss.kind = LossKind::ce;
  grid[0].train.epochs = 3;
  grid[1].id = "pca_fused_ce";
  grid[1].feature_set = FeatureSet::pca_fused;
  grid[1].train.loss.kind = LossKind::ce;
  grid[1].train.epochs = 3;
  return grid;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("ablation") {

TEST_CASE("paper8 grid enumerates both feature sets over all four losses") {
  const auto grid = paper8_grid();
  REQUIRE(grid.size() == 8);
  int spce_cells = 0, mse_cells = 0, face = 0;
  for (const auto& cell : grid) {
    CHECK(cell.id == std::string(feature_set_name(cell.feature_set)) + "_" +
                         loss_name(cell.train.loss.kind));
    if (cell.train.loss.kind == LossKind::spce) {
      CHECK(cell.train.epochs == 150);
      ++spce_cells;
    } else {
      CHECK(cell.train.epochs == 100);
    }
    if (cell.train.loss.kind == LossKind::mse) {
      CHECK(cell.train.framing == Framing::regression);
      ++mse_cells;
    } else {
      CHECK(cell.train.framing == Framing::classification);
    }
    if (cell.feature_set == FeatureSet::face_only) ++face;
    cell.train.validate();  // every cell must be self-consistent
  }
  CHECK(spce_cells == 2);
  CHECK(mse_cells == 2);
  CHECK(face == 4);
}

TEST_CASE("ablation smoke run: seeds, stats, and checkpoints") {
  const auto& records = smoke_records();
  const auto out_dir = fs::temp_directory_path() / "sdr_ablation_smoke";
  fs::remove_all(out_dir);

  AblationOptions options;
  options.runs = 2;
  options.checkpoint_dir = out_dir;
  const std::uint64_t seed = 31;
  const AblationReport report = run_ablation(smoke_grid(), records, options, seed);

  CHECK(report.seed == seed);
  CHECK(report.train_size + report.test_size == static_cast<int>(records.size()));
  CHECK(report.train_size > report.test_size);
  CHECK(report.pca_output_dim > 0);
  CHECK(report.pca_output_dim <= 34);
  REQUIRE(report.cells.size() == 2);

  for (const auto& cell : report.cells) {
    REQUIRE(cell.runs.size() == 2);
    REQUIRE(cell.run_seeds.size() == 2);
    CHECK(cell.run_seeds[0] == seed);
    CHECK(cell.run_seeds[1] == seed + 1);
    CHECK(!cell.any_aborted);
    REQUIRE(cell.run_f1.size() == 2);

    // summary stats must be the plain mean and population sd of the runs
    const double mean = (cell.run_f1[0] + cell.run_f1[1]) / 2.0;
    const double sd = std::sqrt(((cell.run_f1[0] - mean) * (cell.run_f1[0] - mean) +
                                 (cell.run_f1[1] - mean) * (cell.run_f1[1] - mean)) /
                                2.0);
    CHECK(std::abs(cell.mean_f1 - mean) < 1e-12);
    CHECK(std::abs(cell.sd_f1 - sd) < 1e-12);
    const double mae_mean = (cell.runs[0].test_metrics.mean_absolute_error +
                             cell.runs[1].test_metrics.mean_absolute_error) /
                            2.0;
    CHECK(std::abs(cell.mean_mae - mae_mean) < 1e-12);

    for (int r = 0; r < 2; ++r) {
      const auto ckpt = out_dir / "checkpoints" / cell.cell.id / ("run" + std::to_string(r) + ".sdfm");
      REQUIRE(fs::exists(ckpt));
      std::map<std::string, std::string> extra;
      load_checkpoint(ckpt, &extra);
      REQUIRE(extra.count("ablation") == 1);
      const auto meta = nlohmann::json::parse(extra.at("ablation"));
      CHECK(meta.at("cell").get<std::string>() == cell.cell.id);
      CHECK(meta.at("seed").get<std::uint64_t>() == seed + static_cast<std::uint64_t>(r));
    }
  }
}

TEST_CASE("results do not depend on the job count") {
  const auto& records = smoke_records();
  AblationOptions serial;
  serial.runs = 2;
  AblationOptions parallel = serial;
  parallel.jobs = 4;

  const auto a = run_ablation(smoke_grid(), records, serial, 77);
  const auto b = run_ablation(smoke_grid(), records, parallel, 77);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    REQUIRE(a.cells[c].run_f1.size() == b.cells[c].run_f1.size());
    for (std::size_t r = 0; r < a.cells[c].run_f1.size(); ++r) {
      CHECK(a.cells[c].run_f1[r] == b.cells[c].run_f1[r]);  // bitwise
    }
    for (std::size_t r = 0; r < a.cells[c].runs.size(); ++r) {
      REQUIRE(a.cells[c].runs[r].epoch_losses == b.cells[c].runs[r].epoch_losses);
    }
  }
}

TEST_CASE("report files are complete and byte-stable") {
  const auto& records = smoke_records();
  AblationOptions options;
  options.runs = 2;
  const auto report = run_ablation(smoke_grid(), records, options, 5);

  const auto dir_a = fs::temp_directory_path() / "sdr_ablation_out_a";
  const auto dir_b = fs::temp_directory_path() / "sdr_ablation_out_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  write_ablation_outputs(report, dir_a);
  write_ablation_outputs(report, dir_b);

  for (const char* name : {"report.csv", "report.json", "f1_bars.png"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir_a / name));
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }

  // csv: header plus one row per cell
  std::ifstream csv(dir_a / "report.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "cell_id,feature_set,framing,loss,epochs,runs,mean_f1,sd_f1,mean_mae,per_run_f1");
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2);

  const auto j = nlohmann::json::parse(std::ifstream(dir_a / "report.json"));
  CHECK(j.at("seed").get<int>() == 5);
  REQUIRE(j.at("cells").size() == 2);
  CHECK(j.at("cells")[0].at("runs").size() == 2);
  CHECK(j.at("cells")[0].at("runs")[0].contains("test_macro_f1"));

  const auto png = slurp(dir_a / "f1_bars.png");
  REQUIRE(png.size() > 8);
  const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  for (int i = 0; i < 8; ++i) CHECK(static_cast<unsigned char>(png[i]) == sig[i]);
}

TEST_CASE("diverging runs are recorded as aborted and the harness completes") {
  SyntheticSpec spec;
  spec.per_class.fill(2);  // 14 segments
  const auto dir = fs::temp_directory_path() / "sdr_ablation_poison";
  fs::remove_all(dir);
  auto records = generate_synthetic_corpus(spec, 12, dir);

  // a runaway step size overflows the activations within a few epochs
  std::vector<AblationCell> grid(1);
  grid[0].id = "face_only_ce";
  grid[0].feature_set = FeatureSet::face_only;
  grid[0].train.epochs = 4;
  grid[0].train.learning_rate = 1e200;

  AblationOptions options;
  options.runs = 2;
  options.split_ratio = 0.5;
  const auto report = run_ablation(grid, records, options, 3);

  REQUIRE(report.cells.size() == 1);
  // Divergence must surface as recorded aborts, never as a thrown exception.
  CHECK(report.cells[0].any_aborted);
  bool any_reason = false;
  for (const auto& run : report.cells[0].runs) {
    any_reason = any_reason || !run.abort_reason.empty();
  }
  CHECK(any_reason);

  const auto out = fs::temp_directory_path() / "sdr_ablation_poison_out";
  fs::remove_all(out);
  write_ablation_outputs(report, out);  // aborted cells still render
  CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("degenerate options are rejected") {
  const auto& records = smoke_records();
  AblationOptions options;
  CHECK_THROWS_AS(run_ablation({}, records, options, 1), std::invalid_argument);
  options.runs = 0;
  CHECK_THROWS_AS(run_ablation(smoke_grid(), records, options, 1), std::invalid_argument);
  options.runs = 1;
  options.jobs = 0;
  CHECK_THROWS_AS(run_ablation(smoke_grid(), records, options, 1), std::invalid_argument);
}

}  // TEST_SUITE
