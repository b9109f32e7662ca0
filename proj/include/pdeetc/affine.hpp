#pragma once

#include "pdeetc/quadrature.hpp"

#include <map>
#include <string>
#include <vector>

namespace pdeetc {

/// Matrix-valued affine function of the decision vector x:
///   F(x) = c0 + sum_i x_i * coef[i].
/// Products are allowed only when at least one factor is constant, so
/// bilinear terms cannot be formed by accident.
class AffineMat {
 public:
  AffineMat() = default;
  AffineMat(Eigen::Index rows, Eigen::Index cols) : c0_(Mat::Zero(rows, cols)) {}
  explicit AffineMat(const Mat& constant) : c0_(constant) {}

  static AffineMat zero(Eigen::Index rows, Eigen::Index cols) { return AffineMat(rows, cols); }
  static AffineMat identity(Eigen::Index n) { return AffineMat(Mat::Identity(n, n)); }

  Eigen::Index rows() const { return c0_.rows(); }
  Eigen::Index cols() const { return c0_.cols(); }
  bool is_constant() const { return coef_.empty(); }
  const Mat& constant() const { return c0_; }
  const std::map<int, Mat>& terms() const { return coef_; }

  /// Adds x_index * m.
  void add_term(int index, const Mat& m);
  Mat evaluate(const Vec& x) const;

  AffineMat transpose() const;
  AffineMat block(Eigen::Index r, Eigen::Index c, Eigen::Index nr, Eigen::Index nc) const;

  AffineMat& operator+=(const AffineMat& o);
  AffineMat& operator-=(const AffineMat& o);
  AffineMat& operator*=(double s);

  friend AffineMat operator+(AffineMat a, const AffineMat& b) { return a += b; }
  friend AffineMat operator-(AffineMat a, const AffineMat& b) { return a -= b; }
  friend AffineMat operator-(AffineMat a) { return a *= -1.0; }
  friend AffineMat operator*(double s, AffineMat a) { return a *= s; }
  friend AffineMat operator*(AffineMat a, double s) { return a *= s; }
  friend AffineMat operator*(const Mat& m, const AffineMat& a);
  friend AffineMat operator*(const AffineMat& a, const Mat& m);
  /// Requires one factor to be constant.
  friend AffineMat operator*(const AffineMat& a, const AffineMat& b);

 private:
  Mat c0_;
  std::map<int, Mat> coef_;
};

/// X + X^T
AffineMat sym(const AffineMat& x);

/// Dense block matrix of AffineMat blocks; missing blocks are zero. Only the
/// upper triangle needs to be set when `symmetric_fill` is used.
class BlockBuilder {
 public:
  explicit BlockBuilder(std::vector<Eigen::Index> sizes);
  void set(int i, int j, const AffineMat& b);
  AffineMat build(bool symmetric_fill) const;
  const std::vector<Eigen::Index>& sizes() const { return sizes_; }
  Eigen::Index offset(int i) const { return offsets_[i]; }

 private:
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::Index> offsets_;
  std::map<std::pair<int, int>, AffineMat> blocks_;
};

enum class VarShape { Symmetric, Full, Diagonal, Scalar };

struct VarInfo {
  std::string name;
  VarShape shape;
  Eigen::Index rows;
  Eigen::Index cols;
  int offset;  // first decision index
  int count;   // number of decision scalars
};

/// Registry mapping named matrix variables onto slices of the decision vector.
class VariableSet {
 public:
  AffineMat symmetric(const std::string& name, Eigen::Index n);
  AffineMat full(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  AffineMat diagonal(const std::string& name, Eigen::Index n);
  AffineMat scalar(const std::string& name);

  int size() const { return size_; }
  const std::vector<VarInfo>& variables() const { return vars_; }
  const VarInfo& info(const std::string& name) const;
  bool has(const std::string& name) const;
  /// Value of a registered variable at x.
  Mat value(const std::string& name, const Vec& x) const;
  /// Writes a matrix value into x (symmetric parts are averaged).
  void assign(const std::string& name, const Mat& value, Vec& x) const;

 private:
  VarInfo& add(const std::string& name, VarShape shape, Eigen::Index rows, Eigen::Index cols, int count);
  std::vector<VarInfo> vars_;
  int size_ = 0;
};

}  // namespace pdeetc
