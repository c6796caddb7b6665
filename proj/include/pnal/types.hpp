#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pnal {

/// Position of a point inside its Scene (0..N-1). Global ids are kept on the
/// Scene for I/O; everything in-process is keyed by index.
using PointIndex = std::int32_t;
using ClassId = std::int32_t;

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Matrix3Xr = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Invalid input or violated invariant. The CLI maps this to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A referenced file or directory does not exist. The CLI maps this to exit code 2.
class MissingInput : public Error {
 public:
  using Error::Error;
};

}  // namespace pnal
