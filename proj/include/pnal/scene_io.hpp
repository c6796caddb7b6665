#pragma once

#include <filesystem>
#include <iosfwd>

#include "pnal/label_store.hpp"
#include "pnal/scene.hpp"

namespace pnal {

// PNTS v1:
//   PNTS 1 <num_points> <num_classes>
//   CLASS <id> <name>                  (optional, any number)
//   <global_id> <x> <y> <z> <r> <g> <b> <gt_label> <instance_id>
//
// LBLS v1:
//   LBLS 1 <num_points>
//   <global_id> <label>
//
// Reals are written with max_digits10 so a write/read cycle is exact.

Scene read_scene(std::istream& in);
Scene read_scene(const std::filesystem::path& path);
void write_scene(const Scene& scene, std::ostream& out);
void write_scene(const Scene& scene, const std::filesystem::path& path);

/// Reads a label sidecar for `scene`; every scene point must be listed once.
LabelStore read_labels(const Scene& scene, std::istream& in);
LabelStore read_labels(const Scene& scene, const std::filesystem::path& path);
void write_labels(const Scene& scene, const LabelStore& labels, std::ostream& out);
void write_labels(const Scene& scene, const LabelStore& labels, const std::filesystem::path& path);

}  // namespace pnal
