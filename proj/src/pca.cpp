#include "sdr/pca.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "sdr/sdfm.hpp"

namespace sdr {

PcaModel fit_pca(const Mat& rows, double target_variance) {
  if (rows.rows() < 2) throw std::invalid_argument("fit_pca: need at least 2 rows");
  if (!(target_variance > 0.0 && target_variance <= 1.0)) {
    throw std::invalid_argument("fit_pca: target_variance must lie in (0,1]");
  }
  PcaModel model;
  model.target_variance = target_variance;
  model.mean = rows.colwise().mean();
  Mat centered = rows.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Mat> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double total = sv.array().square().sum();
  if (total <= 0.0) throw std::invalid_argument("fit_pca: rank-0 input (all rows identical)");

  Vec ratios = sv.array().square() / total;
  Eigen::Index k = 0;
  double cum = 0.0;
  while (k < ratios.size()) {
    cum += ratios(k);
    ++k;
    if (cum >= target_variance - 1e-12) break;
  }
  model.components = svd.matrixV().leftCols(k).transpose();
  model.explained_variance_ratio = ratios.head(k);
  return model;
}

FeatureMatrix apply_pca(const PcaModel& model, const FeatureMatrix& m) {
  if (m.data.cols() != model.input_dim()) {
    throw std::invalid_argument("apply_pca: input has " + std::to_string(m.data.cols()) +
                                " dims, model expects " + std::to_string(model.input_dim()));
  }
  FeatureMatrix out;
  out.modality = Modality::visual_pca;
  out.frame_rate = m.frame_rate;
  out.mask = m.mask;
  out.data = (m.data.rowwise() - model.mean.transpose()) * model.components.transpose();
  return out;
}

Mat reconstruct_pca(const PcaModel& model, const Mat& projected) {
  return (projected * model.components).rowwise() + model.mean.transpose();
}

void PcaModel::save(const std::filesystem::path& path) const {
  sdfm::SectionMap sections;
  sections["mean"].matrix = mean.transpose();
  sections["components"].matrix = components;
  sections["explained_variance_ratio"].matrix = explained_variance_ratio.transpose();
  sections["target_variance"].matrix = Mat::Constant(1, 1, target_variance);
  sdfm::write_sections(path, sections);
}

PcaModel PcaModel::load(const std::filesystem::path& path) {
  auto sections = sdfm::read_sections(path);
  for (const char* name : {"mean", "components", "explained_variance_ratio", "target_variance"}) {
    if (!sections.count(name)) {
      throw std::runtime_error(path.string() + ": PCA model missing section '" + name + "'");
    }
  }
  PcaModel model;
  model.mean = sections["mean"].matrix.row(0).transpose();
  model.components = sections["components"].matrix;
  model.explained_variance_ratio = sections["explained_variance_ratio"].matrix.row(0).transpose();
  model.target_variance = sections["target_variance"].matrix(0, 0);
  if (model.components.cols() != model.mean.size()) {
    throw std::runtime_error(path.string() + ": inconsistent PCA model shapes");
  }
  return model;
}

}  // namespace sdr
