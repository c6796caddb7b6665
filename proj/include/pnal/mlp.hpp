#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pnal/loss.hpp"
#include "pnal/types.hpp"

namespace pnal {

/// Weights of the per-point classifier in -> hidden -> hidden -> classes,
/// tanh hidden units and a softmax head. Weight matrices are stored
/// (fan_out x fan_in) and applied to row-major batches as X * W^T.
template <typename Scalar>
struct MlpParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix w1, w2, w3;
  Vector b1, b2, b3;

  static MlpParams zeros(int input_dim, int hidden, int classes) {
    MlpParams p;
    p.w1 = Matrix::Zero(hidden, input_dim);
    p.w2 = Matrix::Zero(hidden, hidden);
    p.w3 = Matrix::Zero(classes, hidden);
    p.b1 = Vector::Zero(hidden);
    p.b2 = Vector::Zero(hidden);
    p.b3 = Vector::Zero(classes);
    return p;
  }

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  template <typename Gen>
  static MlpParams glorot(int input_dim, int hidden, int classes, Gen& rng) {
    MlpParams p = zeros(input_dim, hidden, classes);
    auto fill = [&rng](Matrix& w) {
      const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = static_cast<Scalar>(u(rng));
      }
    };
    fill(p.w1);
    fill(p.w2);
    fill(p.w3);
    return p;
  }

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  int num_classes() const { return static_cast<int>(w3.rows()); }

  template <typename F>
  void for_each(F&& f) {
    f(w1); f(b1); f(w2); f(b2); f(w3); f(b3);
  }
  template <typename F>
  void for_each(F&& f) const {
    f(w1); f(b1); f(w2); f(b2); f(w3); f(b3);
  }

  Eigen::Index size() const {
    Eigen::Index n = 0;
    for_each([&n](const auto& t) { n += t.size(); });
    return n;
  }

  bool all_finite() const {
    bool ok = true;
    for_each([&ok](const auto& t) { ok = ok && t.allFinite(); });
    return ok;
  }

  Vector flatten() const {
    Vector out(size());
    Eigen::Index at = 0;
    for_each([&](const auto& t) {
      out.segment(at, t.size()) = t.reshaped();
      at += t.size();
    });
    return out;
  }

  void unflatten(const Vector& flat) {
    if (flat.size() != size()) throw Error("parameter vector has the wrong length");
    Eigen::Index at = 0;
    for_each([&](auto& t) {
      t.reshaped() = flat.segment(at, t.size());
      at += t.size();
    });
  }

  MlpParams zeros_like() const { return zeros(input_dim(), hidden(), num_classes()); }

  friend bool operator==(const MlpParams& a, const MlpParams& b) {
    return a.w1 == b.w1 && a.w2 == b.w2 && a.w3 == b.w3 && a.b1 == b.b1 && a.b2 == b.b2 && a.b3 == b.b3;
  }
};

/// Activations kept for the backward pass.
template <typename Scalar>
struct ForwardPass {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  Matrix input;
  Matrix h1, h2;
  Matrix logits;
  Matrix probs;
};

template <typename Scalar>
typename MlpParams<Scalar>::Matrix softmax_rows(const typename MlpParams<Scalar>::Matrix& logits) {
  typename MlpParams<Scalar>::Matrix p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

template <typename Scalar, typename Derived>
ForwardPass<Scalar> forward_pass(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& features) {
  if (features.cols() != params.input_dim()) throw Error("feature width does not match the model");
  if (!features.allFinite()) throw Error("non-finite input features");
  ForwardPass<Scalar> f;
  f.input = features.template cast<Scalar>();
  f.h1.noalias() = f.input * params.w1.transpose();
  f.h1.rowwise() += params.b1.transpose();
  f.h1 = f.h1.array().tanh().matrix();
  f.h2.noalias() = f.h1 * params.w2.transpose();
  f.h2.rowwise() += params.b2.transpose();
  f.h2 = f.h2.array().tanh().matrix();
  f.logits.noalias() = f.h2 * params.w3.transpose();
  f.logits.rowwise() += params.b3.transpose();
  f.probs = softmax_rows<Scalar>(f.logits);
  return f;
}

/// n x M class probabilities; each row sums to 1.
template <typename Scalar, typename Derived>
typename MlpParams<Scalar>::Matrix forward(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& features) {
  return forward_pass(params, features).probs;
}

/// Row-wise argmax; ties go to the lowest class id.
template <typename Derived>
std::vector<ClassId> argmax_rows(const Eigen::MatrixBase<Derived>& scores) {
  std::vector<ClassId> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index m = 1; m < scores.cols(); ++m) {
      if (scores(i, m) > scores(i, best)) best = m;
    }
    out[static_cast<std::size_t>(i)] = static_cast<ClassId>(best);
  }
  return out;
}

template <typename Scalar, typename Derived>
std::vector<ClassId> predict(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& features) {
  return argmax_rows(forward(params, features));
}

template <typename Scalar>
struct LossResult {
  Scalar loss = 0;
  MlpParams<Scalar> grad;
  /// True when the mask selected no point; loss and gradient are then zero.
  bool empty_mask = false;
};

/// Masked mean loss and its exact gradient for a finished forward pass.
/// mask entries are 0 or 1; an empty mask returns zeros and sets empty_mask.
template <typename Scalar>
LossResult<Scalar> backward(const MlpParams<Scalar>& params, const ForwardPass<Scalar>& f,
                            std::span<const ClassId> labels, std::span<const unsigned char> mask,
                            const LossKind& kind) {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  const Eigen::Index n = f.probs.rows();
  const Eigen::Index classes = f.probs.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error("one label per point required");
  if (static_cast<Eigen::Index>(mask.size()) != n) throw Error("one mask entry per point required");

  LossResult<Scalar> out;
  out.grad = params.zeros_like();
  Eigen::Index active = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const ClassId y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= classes) throw Error("label out of range");
    if (mask[static_cast<std::size_t>(i)]) ++active;
  }
  if (active == 0) {
    out.empty_mask = true;
    return out;
  }
  const Scalar weight = Scalar(1) / static_cast<Scalar>(active);

  Matrix dz = Matrix::Zero(n, classes);
  Scalar total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) continue;
    const Eigen::Index y = labels[static_cast<std::size_t>(i)];
    const auto z = f.logits.row(i);
    const Scalar zmax = z.maxCoeff();
    const Scalar log_py = z(y) - zmax - std::log((z.array() - zmax).exp().sum());
    const Scalar py = f.probs(i, y);
    // dL/dz = c * (p - e_y) for all three losses; only c and L differ.
    Scalar coeff = 1;
    switch (kind.type) {
      case LossKind::Type::CE:
        total += -log_py;
        break;
      case LossKind::Type::GCE: {
        const Scalar q = static_cast<Scalar>(kind.q_gce);
        const Scalar pq = std::exp(q * log_py);
        total += (Scalar(1) - pq) / q;
        coeff = pq;
        break;
      }
      case LossKind::Type::SCE: {
        const Scalar a = static_cast<Scalar>(kind.alpha), b = static_cast<Scalar>(kind.beta);
        const Scalar floor = static_cast<Scalar>(kind.log_zero_floor);
        total += a * -log_py + b * -floor * (Scalar(1) - py);
        coeff = a - b * floor * py;
        break;
      }
    }
    dz.row(i) = coeff * weight * f.probs.row(i);
    dz(i, y) -= coeff * weight;
  }
  out.loss = total * weight;

  LossResult<Scalar>& r = out;
  r.grad.w3.noalias() = dz.transpose() * f.h2;
  r.grad.b3 = dz.colwise().sum().transpose();
  Matrix da2 = (dz * params.w3).array() * (Scalar(1) - f.h2.array().square());
  r.grad.w2.noalias() = da2.transpose() * f.h1;
  r.grad.b2 = da2.colwise().sum().transpose();
  Matrix da1 = (da2 * params.w2).array() * (Scalar(1) - f.h1.array().square());
  r.grad.w1.noalias() = da1.transpose() * f.input;
  r.grad.b1 = da1.colwise().sum().transpose();
  return out;
}

template <typename Scalar, typename Derived>
LossResult<Scalar> loss_and_grad(const MlpParams<Scalar>& params, const Eigen::MatrixBase<Derived>& features,
                                 std::span<const ClassId> labels, std::span<const unsigned char> mask,
                                 const LossKind& kind) {
  return backward(params, forward_pass(params, features), labels, mask, kind);
}

/// Heavy-ball state, one velocity tensor per parameter tensor.
template <typename Scalar>
struct MomentumState {
  MlpParams<Scalar> velocity;
  bool initialized = false;
};

/// v <- momentum * v + grad; params <- params - lr * v.
template <typename Scalar>
void sgd_step(MlpParams<Scalar>& params, const MlpParams<Scalar>& grad, Scalar lr, Scalar momentum,
              MomentumState<Scalar>& state) {
  if (!state.initialized) {
    state.velocity = params.zeros_like();
    state.initialized = true;
  }
  auto& v = state.velocity;
  auto step = [&](auto& p, auto& vel, const auto& g) {
    vel = momentum * vel + g;
    p -= lr * vel;
  };
  step(params.w1, v.w1, grad.w1);
  step(params.b1, v.b1, grad.b1);
  step(params.w2, v.w2, grad.w2);
  step(params.b2, v.b2, grad.b2);
  step(params.w3, v.w3, grad.w3);
  step(params.b3, v.b3, grad.b3);
}

// Checkpoint text format:
//   PNALMLP 1 <input_dim> <hidden> <classes>
//   then w1, b1, w2, b2, w3, b3, each flattened column-major, one value per
//   line, written with max_digits10 so reload is exact.
template <typename Scalar>
void save_checkpoint(const MlpParams<Scalar>& params, std::ostream& out) {
  out << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
  out << "PNALMLP 1 " << params.input_dim() << ' ' << params.hidden() << ' ' << params.num_classes() << '\n';
  const auto flat = params.flatten();
  for (Eigen::Index i = 0; i < flat.size(); ++i) out << flat(i) << '\n';
}

template <typename Scalar>
MlpParams<Scalar> load_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0, input_dim = 0, hidden = 0, classes = 0;
  if (!(in >> magic >> version >> input_dim >> hidden >> classes) || magic != "PNALMLP" || version != 1 ||
      input_dim <= 0 || hidden <= 0 || classes <= 1) {
    throw Error("malformed checkpoint header");
  }
  auto params = MlpParams<Scalar>::zeros(input_dim, hidden, classes);
  typename MlpParams<Scalar>::Vector flat(params.size());
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    if (!(in >> flat(i))) throw Error("truncated checkpoint");
  }
  params.unflatten(flat);
  if (!params.all_finite()) throw Error("checkpoint holds non-finite values");
  return params;
}

template <typename Scalar>
void save_checkpoint(const MlpParams<Scalar>& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save_checkpoint(params, out);
}

template <typename Scalar>
MlpParams<Scalar> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInput("cannot open checkpoint " + path);
  return load_checkpoint<Scalar>(in);
}

using Model = MlpParams<double>;

}  // namespace pnal
