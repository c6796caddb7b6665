#include "pnal/scene_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace pnal {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

Scene read_scene(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw Error("malformed header: empty input");
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  long long count = -1;
  int num_classes = 0;
  if (!(header >> magic >> version >> count >> num_classes) || magic != "PNTS" || version != 1 ||
      count < 0 || num_classes <= 0) {
    throw Error("malformed header: " + line);
  }
  if (count == 0) throw Error("empty scene");

  std::vector<std::string> names(static_cast<std::size_t>(num_classes));
  std::vector<PointRecord> records;
  records.reserve(static_cast<std::size_t>(count));
  while (next_content_line(in, line)) {
    std::istringstream row(line);
    if (line.rfind("CLASS", 0) == 0) {
      std::string tag, name;
      int id = -1;
      row >> tag >> id >> name;
      if (id < 0 || id >= num_classes || name.empty()) throw Error("malformed CLASS line: " + line);
      names[static_cast<std::size_t>(id)] = name;
      continue;
    }
    PointRecord p;
    if (!(row >> p.global_id >> p.position.x() >> p.position.y() >> p.position.z() >>
          p.color.x() >> p.color.y() >> p.color.z() >> p.gt_label >> p.instance_id)) {
      throw Error("malformed point line: " + line);
    }
    if (p.gt_label < 0 || p.gt_label >= num_classes) throw Error("label out of range");
    records.push_back(p);
  }
  if (static_cast<long long>(records.size()) != count) {
    throw Error("header declares " + std::to_string(count) + " points, found " +
                std::to_string(records.size()));
  }
  Scene scene(num_classes, std::move(names));
  scene.reserve(records.size());
  for (const auto& p : records) scene.add_point(p);
  scene.finalize();
  return scene;
}

Scene read_scene(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_scene(in);
}

void write_scene(const Scene& scene, std::ostream& out) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "PNTS 1 " << scene.size() << ' ' << scene.num_classes() << '\n';
  for (int m = 0; m < scene.num_classes(); ++m) {
    out << "CLASS " << m << ' ' << scene.class_names()[static_cast<std::size_t>(m)] << '\n';
  }
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const auto p = scene.point(static_cast<PointIndex>(i));
    out << p.global_id << ' ' << p.position.x() << ' ' << p.position.y() << ' ' << p.position.z()
        << ' ' << p.color.x() << ' ' << p.color.y() << ' ' << p.color.z() << ' ' << p.gt_label
        << ' ' << p.instance_id << '\n';
  }
}

void write_scene(const Scene& scene, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_scene(scene, out);
}

LabelStore read_labels(const Scene& scene, std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw Error("malformed header: empty input");
  std::istringstream header(line);
  std::string magic;
  int version = 0;
  long long count = -1;
  if (!(header >> magic >> version >> count) || magic != "LBLS" || version != 1 || count < 0) {
    throw Error("malformed header: " + line);
  }
  if (static_cast<std::size_t>(count) != scene.size()) throw Error("label count does not match scene");

  std::vector<ClassId> labels(scene.size(), -1);
  long long seen = 0;
  while (next_content_line(in, line)) {
    std::istringstream row(line);
    std::int64_t gid = 0;
    ClassId y = -1;
    if (!(row >> gid >> y)) throw Error("malformed label line: " + line);
    if (y < 0 || y >= scene.num_classes()) throw Error("label out of range");
    const PointIndex i = scene.index_of(gid);
    if (labels[static_cast<std::size_t>(i)] != -1) throw Error("duplicate global_id " + std::to_string(gid));
    labels[static_cast<std::size_t>(i)] = y;
    ++seen;
  }
  if (seen != count) throw Error("label file is missing points");
  return LabelStore(std::move(labels), scene.num_classes());
}

LabelStore read_labels(const Scene& scene, const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(scene, in);
}

void write_labels(const Scene& scene, const LabelStore& labels, std::ostream& out) {
  out << "LBLS 1 " << scene.size() << '\n';
  for (std::size_t i = 0; i < scene.size(); ++i) {
    out << scene.global_id(static_cast<PointIndex>(i)) << ' ' << labels.label(static_cast<PointIndex>(i))
        << '\n';
  }
}

void write_labels(const Scene& scene, const LabelStore& labels, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_labels(scene, labels, out);
}

}  // namespace pnal
