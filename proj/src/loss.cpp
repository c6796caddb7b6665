#include "pnal/loss.hpp"

#include "pnal/types.hpp"

namespace pnal {

void LossKind::validate() const {
  switch (type) {
    case Type::CE:
      return;
    case Type::GCE:
      if (!(q_gce > 0.0 && q_gce <= 1.0)) throw Error("GCE q must lie in (0,1]");
      return;
    case Type::SCE:
      if (!(alpha > 0.0 && beta > 0.0)) throw Error("SCE alpha and beta must be positive");
      if (!(log_zero_floor < 0.0)) throw Error("SCE log_zero_floor must be negative");
      return;
  }
}

std::string LossKind::name() const {
  switch (type) {
    case Type::CE: return "ce";
    case Type::GCE: return "gce";
    case Type::SCE: return "sce";
  }
  return "?";
}

}  // namespace pnal
