#include "pnal/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace pnal {

Confusion::Confusion(int num_classes) {
  if (num_classes < 1) throw Error("num_classes must be positive");
  counts_.setZero(num_classes, num_classes);
}

void Confusion::add(std::span<const ClassId> pred, std::span<const ClassId> gt) {
  if (pred.size() != gt.size()) throw Error("prediction and ground truth lengths differ");
  const auto m = counts_.rows();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || pred[i] >= m || gt[i] < 0 || gt[i] >= m) throw Error("label out of range");
    counts_(gt[i], pred[i]) += 1;
  }
}

Confusion& Confusion::operator+=(const Confusion& other) {
  if (other.counts_.rows() != counts_.rows()) throw Error("confusion sizes differ");
  counts_ += other.counts_;
  return *this;
}

double Confusion::overall_accuracy() const {
  const auto n = total();
  if (n == 0) throw Error("accuracy of an empty prediction set");
  return static_cast<double>(counts_.diagonal().sum()) / static_cast<double>(n);
}

std::vector<double> Confusion::per_class_iou() const {
  const auto m = counts_.rows();
  std::vector<double> iou(static_cast<std::size_t>(m), std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index c = 0; c < m; ++c) {
    const std::int64_t tp = counts_(c, c);
    const std::int64_t fn = counts_.row(c).sum() - tp;
    const std::int64_t fp = counts_.col(c).sum() - tp;
    const std::int64_t denom = tp + fp + fn;
    if (denom > 0) iou[static_cast<std::size_t>(c)] = static_cast<double>(tp) / static_cast<double>(denom);
  }
  return iou;
}

double Confusion::mean_iou() const {
  if (total() == 0) throw Error("mIoU of an empty prediction set");
  double sum = 0.0;
  int present = 0;
  for (double v : per_class_iou()) {
    if (std::isnan(v)) continue;
    sum += v;
    ++present;
  }
  return sum / present;
}

double overall_accuracy(std::span<const ClassId> pred, std::span<const ClassId> gt) {
  if (pred.size() != gt.size()) throw Error("prediction and ground truth lengths differ");
  if (pred.empty()) throw Error("accuracy of an empty prediction set");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == gt[i];
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double mean_iou(std::span<const ClassId> pred, std::span<const ClassId> gt, int num_classes) {
  Confusion c(num_classes);
  c.add(pred, gt);
  return c.mean_iou();
}

CorrectionStats correction_stats(const LabelStore& labels, const Scene& scene) {
  return correction_stats(std::span<const LabelStore>(&labels, 1), std::span<const Scene>(&scene, 1));
}

CorrectionStats correction_stats(std::span<const LabelStore> labels, std::span<const Scene> scenes) {
  if (labels.size() != scenes.size()) throw Error("one label store per scene required");
  CorrectionStats s;
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    const Scene& scene = scenes[k];
    const LabelStore& store = labels[k];
    if (store.size() != scene.size()) throw Error("label store does not match scene");
    s.points += scene.size();
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const auto id = static_cast<PointIndex>(i);
      if (!store.ever_replaced(id)) continue;
      ++s.replaced;
      if (store.label(id) == scene.gt_label(id)) ++s.replaced_correct;
    }
  }
  if (s.points > 0) s.correction_frac = static_cast<double>(s.replaced) / static_cast<double>(s.points);
  if (s.replaced > 0) {
    s.true_correction_frac = static_cast<double>(s.replaced_correct) / static_cast<double>(s.replaced);
  }
  return s;
}

void write_metrics_csv(std::ostream& out, const std::vector<EpochReport>& rows) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.split << ',' << r.oa << ',' << r.miou << ',' << r.correction_frac << ','
        << r.true_correction_frac << ',' << r.wall_time_s << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochReport>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_metrics_csv(out, rows);
}

std::vector<EpochReport> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw Error("not a metrics CSV (bad header)");
  std::vector<EpochReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw Error("malformed metrics row: " + line);
    EpochReport r;
    try {
      r.epoch = std::stoi(cells[0]);
      r.split = cells[1];
      r.oa = std::stod(cells[2]);
      r.miou = std::stod(cells[3]);
      r.correction_frac = std::stod(cells[4]);
      r.true_correction_frac = std::stod(cells[5]);
      r.wall_time_s = std::stod(cells[6]);
    } catch (const std::exception&) {
      throw Error("malformed metrics row: " + line);
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<EpochReport> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open " + path.string());
  return read_metrics_csv(in);
}

}  // namespace pnal
