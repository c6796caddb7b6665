#pragma once

#include <string>

namespace pnal {

/// Per-point training loss on softmax outputs p and a hard label y.
///   CE:  -log p_y
///   GCE: (1 - p_y^q) / q
///   SCE: alpha * CE + beta * RCE, RCE = -sum_m p_m log onehot_m with
///        log 0 replaced by log_zero_floor, i.e. -log_zero_floor * (1 - p_y)
struct LossKind {
  enum class Type { CE, GCE, SCE };

  Type type = Type::CE;
  double q_gce = 0.7;
  double alpha = 0.1;
  double beta = 1.0;
  double log_zero_floor = -4.0;

  static LossKind ce() { return {}; }
  static LossKind gce(double q = 0.7) {
    LossKind k;
    k.type = Type::GCE;
    k.q_gce = q;
    return k;
  }
  static LossKind sce(double alpha = 0.1, double beta = 1.0, double log_zero_floor = -4.0) {
    LossKind k;
    k.type = Type::SCE;
    k.alpha = alpha;
    k.beta = beta;
    k.log_zero_floor = log_zero_floor;
    return k;
  }

  /// Throws Error when q_gce is outside (0,1] or alpha/beta are not positive.
  void validate() const;
  std::string name() const;
};

}  // namespace pnal
