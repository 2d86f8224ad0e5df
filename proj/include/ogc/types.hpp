#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ogc {

/// Largest chart dimension supported. Points and small matrices live on the stack.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

enum class ErrorCode {
  InvalidArgument,
  Precondition,
  Degenerate,
  Evaluation,
  Projection,
  Unsupported,
  Config,
  Convergence,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Evaluation: return "evaluation";
    case ErrorCode::Projection: return "projection";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Config: return "config-error";
    case ErrorCode::Convergence: return "convergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw Error(code, msg);
}

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace ogc
