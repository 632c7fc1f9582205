#include "sdr/train/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sdr/report/plot.hpp"

namespace sdr {

namespace {

AblationCell make_cell(FeatureSet fs, LossKind kind) {
  AblationCell cell;
  cell.feature_set = fs;
  cell.train.loss.kind = kind;
  cell.train.framing = kind == LossKind::mse ? Framing::regression : Framing::classification;
  cell.train.epochs = kind == LossKind::spce ? 150 : 100;
  cell.id = std::string(feature_set_name(fs)) + "_" + loss_name(kind);
  return cell;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<AblationCell> paper8_grid() {
  std::vector<AblationCell> grid;
  for (FeatureSet fs : {FeatureSet::face_only, FeatureSet::pca_fused}) {
    for (LossKind kind : {LossKind::ce, LossKind::ce_ls, LossKind::spce, LossKind::mse}) {
      grid.push_back(make_cell(fs, kind));
    }
  }
  return grid;
}

AblationReport run_ablation(const std::vector<AblationCell>& grid,
                            const std::vector<SegmentRecord>& records,
                            const AblationOptions& options, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("ablation: empty grid");
  if (options.runs < 1) throw std::invalid_argument("ablation: runs must be positive");
  if (options.jobs < 1) throw std::invalid_argument("ablation: jobs must be positive");
  for (const auto& cell : grid) cell.train.validate();

  const CorpusSplit split = options.participant_split
                                ? split_corpus_by_participant(records, options.split_ratio, seed)
                                : split_corpus(records, options.split_ratio, seed);

  AblationReport report;
  report.seed = seed;
  report.train_size = static_cast<int>(split.train.size());
  report.test_size = static_cast<int>(split.test.size());

  // one prepared dataset per feature set in use; PCA fitted on train only
  const bool wants_face = std::any_of(grid.begin(), grid.end(), [](const AblationCell& c) {
    return c.feature_set == FeatureSet::face_only;
  });
  const bool wants_pca = std::any_of(grid.begin(), grid.end(), [](const AblationCell& c) {
    return c.feature_set == FeatureSet::pca_fused;
  });

  DatasetOptions face_options = options.data;
  face_options.feature_set = FeatureSet::face_only;
  face_options.pca.reset();
  DatasetOptions pca_options = options.data;
  pca_options.feature_set = FeatureSet::pca_fused;

  std::vector<PreparedExample> face_train, face_test, pca_train, pca_test;
  if (wants_face) {
    face_train = prepare_examples(split.train, face_options);
    face_test = prepare_examples(split.test, face_options);
  }
  if (wants_pca) {
    pca_options.pca = fit_pca(gather_fusion_frames(split.train), options.pca_target_variance);
    report.pca_output_dim = static_cast<int>(pca_options.pca->output_dim());
    pca_train = prepare_examples(split.train, pca_options);
    pca_test = prepare_examples(split.test, pca_options);
  }

  report.cells.resize(grid.size());
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    report.cells[ci].cell = grid[ci];
    report.cells[ci].runs.resize(static_cast<std::size_t>(options.runs));
    report.cells[ci].run_seeds.resize(static_cast<std::size_t>(options.runs));
    if (options.checkpoint_dir) {
      std::filesystem::create_directories(*options.checkpoint_dir / "checkpoints" / grid[ci].id);
    }
  }

  struct Task {
    std::size_t cell;
    int run;
  };
  std::vector<Task> tasks;
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    for (int r = 0; r < options.runs; ++r) tasks.push_back({ci, r});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto [ci, r] = tasks[t];
      const AblationCell& cell = grid[ci];
      const DatasetOptions& data =
          cell.feature_set == FeatureSet::face_only ? face_options : pca_options;
      const auto& train = cell.feature_set == FeatureSet::face_only ? face_train : pca_train;
      const auto& test = cell.feature_set == FeatureSet::face_only ? face_test : pca_test;
      const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);

      TrainOutcome outcome = train_one(cell.train, data, train, test, run_seed);
      report.cells[ci].run_seeds[static_cast<std::size_t>(r)] = run_seed;
      report.cells[ci].runs[static_cast<std::size_t>(r)] = outcome.run;
      if (options.checkpoint_dir && !outcome.run.aborted) {
        nlohmann::json cfg;
        cfg["cell"] = cell.id;
        cfg["feature_set"] = feature_set_name(cell.feature_set);
        cfg["loss"] = loss_name(cell.train.loss.kind);
        cfg["epochs"] = cell.train.epochs;
        cfg["run"] = r;
        cfg["seed"] = run_seed;
        save_checkpoint(*options.checkpoint_dir / "checkpoints" / cell.id /
                            ("run" + std::to_string(r) + ".sdfm"),
                        outcome.model, {{"ablation", cfg.dump()}});
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(options.jobs, static_cast<int>(tasks.size()));
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (auto& cell : report.cells) {
    double sum = 0.0, mae = 0.0;
    int completed = 0;
    for (const auto& run : cell.runs) {
      if (run.aborted) {
        cell.any_aborted = true;
        continue;
      }
      cell.run_f1.push_back(run.test_metrics.macro_f1);
      sum += run.test_metrics.macro_f1;
      mae += run.test_metrics.mean_absolute_error;
      ++completed;
    }
    if (completed > 0) {
      cell.mean_f1 = sum / completed;
      cell.mean_mae = mae / completed;
      double var = 0.0;
      for (double f : cell.run_f1) var += (f - cell.mean_f1) * (f - cell.mean_f1);
      cell.sd_f1 = std::sqrt(var / completed);
    }
  }
  return report;
}

void write_ablation_outputs(const AblationReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {  // comma-separated table, one row per cell
    std::ofstream csv(out_dir / "report.csv", std::ios::binary);
    csv << "cell_id,feature_set,framing,loss,epochs,runs,mean_f1,sd_f1,mean_mae,per_run_f1\n";
    for (const auto& cell : report.cells) {
      csv << cell.cell.id << ',' << feature_set_name(cell.cell.feature_set) << ','
          << framing_name(cell.cell.train.framing) << ',' << loss_name(cell.cell.train.loss.kind)
          << ',' << cell.cell.train.epochs << ',' << cell.runs.size() << ',' << fmt(cell.mean_f1)
          << ',' << fmt(cell.sd_f1) << ',' << fmt(cell.mean_mae) << ',';
      for (std::size_t i = 0; i < cell.run_f1.size(); ++i) {
        csv << (i ? ";" : "") << fmt(cell.run_f1[i]);
      }
      csv << '\n';
    }
  }

  {  // structured summary
    nlohmann::json j;
    j["seed"] = report.seed;
    j["train_size"] = report.train_size;
    j["test_size"] = report.test_size;
    if (report.pca_output_dim > 0) j["pca_output_dim"] = report.pca_output_dim;
    j["cells"] = nlohmann::json::array();
    for (const auto& cell : report.cells) {
      nlohmann::json cj;
      cj["id"] = cell.cell.id;
      cj["feature_set"] = feature_set_name(cell.cell.feature_set);
      cj["framing"] = framing_name(cell.cell.train.framing);
      cj["loss"] = loss_name(cell.cell.train.loss.kind);
      cj["epochs"] = cell.cell.train.epochs;
      cj["learning_rate"] = cell.cell.train.learning_rate;
      cj["batch_size"] = cell.cell.train.batch_size;
      cj["mean_f1"] = cell.mean_f1;
      cj["sd_f1"] = cell.sd_f1;
      cj["mean_mae"] = cell.mean_mae;
      cj["any_aborted"] = cell.any_aborted;
      cj["runs"] = nlohmann::json::array();
      for (std::size_t r = 0; r < cell.runs.size(); ++r) {
        const TrainRun& run = cell.runs[r];
        nlohmann::json rj;
        rj["seed"] = cell.run_seeds[r];
        rj["aborted"] = run.aborted;
        if (run.aborted) {
          rj["abort_reason"] = run.abort_reason;
        } else {
          rj["test_macro_f1"] = run.test_metrics.macro_f1;
          rj["test_weighted_f1"] = run.test_metrics.weighted_f1;
          rj["test_mae"] = run.test_metrics.mean_absolute_error;
          rj["train_macro_f1"] = run.train_metrics.macro_f1;
          rj["epochs_recorded"] = run.epoch_losses.size();
          rj["final_loss"] = run.epoch_losses.empty() ? 0.0 : run.epoch_losses.back();
        }
        cj["runs"].push_back(rj);
      }
      j["cells"].push_back(cj);
    }
    std::ofstream js(out_dir / "report.json", std::ios::binary);
    js << j.dump(2) << '\n';
  }

  {  // grouped bars: one group per loss kind, one series per feature set
    BarChart chart;
    chart.title = "TEST MACRO F1 BY LOSS AND FEATURE SET";
    chart.y_label = "F1";
    std::vector<std::string> losses;
    std::vector<std::string> feature_sets;
    for (const auto& cell : report.cells) {
      const std::string loss = loss_name(cell.cell.train.loss.kind);
      const std::string fs = feature_set_name(cell.cell.feature_set);
      if (std::find(losses.begin(), losses.end(), loss) == losses.end()) losses.push_back(loss);
      if (std::find(feature_sets.begin(), feature_sets.end(), fs) == feature_sets.end()) {
        feature_sets.push_back(fs);
      }
    }
    chart.group_labels = losses;
    for (const auto& fs : feature_sets) {
      BarSeries series;
      series.name = fs;
      series.values.assign(losses.size(), 0.0);
      series.errors.assign(losses.size(), 0.0);
      for (const auto& cell : report.cells) {
        if (feature_set_name(cell.cell.feature_set) != fs) continue;
        const auto it = std::find(losses.begin(), losses.end(), loss_name(cell.cell.train.loss.kind));
        const auto gi = static_cast<std::size_t>(it - losses.begin());
        series.values[gi] = cell.mean_f1;
        series.errors[gi] = cell.sd_f1;
      }
      chart.series.push_back(std::move(series));
    }
    save_bar_chart(out_dir / "f1_bars.png", chart);
  }
}

}  // namespace sdr
