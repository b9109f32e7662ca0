#include "pdeetc/affine.hpp"

#include "pdeetc/error.hpp"

namespace pdeetc {

namespace {

void check_same_shape(const AffineMat& a, const AffineMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::InvalidArgument, "affine dimension mismatch (" + std::to_string(a.rows()) + "x" +
                                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                                "x" + std::to_string(b.cols()) + ")");
}

}  // namespace

void AffineMat::add_term(int index, const Mat& m) {
  if (m.rows() != rows() || m.cols() != cols()) throw Error(ErrorKind::InvalidArgument, "term dimension mismatch");
  auto it = coef_.find(index);
  if (it == coef_.end()) coef_.emplace(index, m);
  else it->second += m;
}

Mat AffineMat::evaluate(const Vec& x) const {
  Mat out = c0_;
  for (const auto& [i, m] : coef_) out += x[i] * m;
  return out;
}

AffineMat AffineMat::transpose() const {
  AffineMat t(Mat(c0_.transpose()));
  for (const auto& [i, m] : coef_) t.coef_.emplace(i, m.transpose());
  return t;
}

AffineMat AffineMat::block(Eigen::Index r, Eigen::Index c, Eigen::Index nr, Eigen::Index nc) const {
  AffineMat b(Mat(c0_.block(r, c, nr, nc)));
  for (const auto& [i, m] : coef_) b.coef_.emplace(i, m.block(r, c, nr, nc));
  return b;
}

AffineMat& AffineMat::operator+=(const AffineMat& o) {
  check_same_shape(*this, o);
  c0_ += o.c0_;
  for (const auto& [i, m] : o.coef_) add_term(i, m);
  return *this;
}

AffineMat& AffineMat::operator-=(const AffineMat& o) {
  check_same_shape(*this, o);
  c0_ -= o.c0_;
  for (const auto& [i, m] : o.coef_) add_term(i, -m);
  return *this;
}

AffineMat& AffineMat::operator*=(double s) {
  c0_ *= s;
  for (auto& [i, m] : coef_) m *= s;
  return *this;
}

AffineMat operator*(const Mat& m, const AffineMat& a) {
  if (m.cols() != a.rows()) throw Error(ErrorKind::InvalidArgument, "product dimension mismatch");
  AffineMat out(Mat(m * a.c0_));
  for (const auto& [i, c] : a.coef_) out.coef_.emplace(i, m * c);
  return out;
}

AffineMat operator*(const AffineMat& a, const Mat& m) {
  if (a.cols() != m.rows()) throw Error(ErrorKind::InvalidArgument, "product dimension mismatch");
  AffineMat out(Mat(a.c0_ * m));
  for (const auto& [i, c] : a.coef_) out.coef_.emplace(i, c * m);
  return out;
}

AffineMat operator*(const AffineMat& a, const AffineMat& b) {
  if (a.is_constant()) return a.constant() * b;
  if (b.is_constant()) return a * b.constant();
  throw Error(ErrorKind::InvalidArgument, "product of two non-constant affine matrices is bilinear");
}

AffineMat sym(const AffineMat& x) { return x + x.transpose(); }

BlockBuilder::BlockBuilder(std::vector<Eigen::Index> sizes) : sizes_(std::move(sizes)) {
  Eigen::Index acc = 0;
  for (Eigen::Index s : sizes_) {
    offsets_.push_back(acc);
    acc += s;
  }
  offsets_.push_back(acc);
}

void BlockBuilder::set(int i, int j, const AffineMat& b) {
  if (b.rows() != sizes_[i] || b.cols() != sizes_[j])
    throw Error(ErrorKind::InvalidArgument, "block (" + std::to_string(i) + "," + std::to_string(j) +
                                                ") has shape " + std::to_string(b.rows()) + "x" +
                                                std::to_string(b.cols()) + ", expected " +
                                                std::to_string(sizes_[i]) + "x" + std::to_string(sizes_[j]));
  blocks_[{i, j}] = b;
}

AffineMat BlockBuilder::build(bool symmetric_fill) const {
  const Eigen::Index n = offsets_.back();
  AffineMat out(n, n);
  Mat c0 = Mat::Zero(n, n);
  std::map<int, Mat> terms;
  auto place = [&](Eigen::Index r, Eigen::Index c, const AffineMat& b) {
    c0.block(r, c, b.rows(), b.cols()) += b.constant();
    for (const auto& [idx, m] : b.terms()) {
      auto it = terms.find(idx);
      if (it == terms.end()) it = terms.emplace(idx, Mat::Zero(n, n)).first;
      it->second.block(r, c, m.rows(), m.cols()) += m;
    }
  };
  for (const auto& [key, b] : blocks_) {
    const auto [i, j] = key;
    place(offsets_[i], offsets_[j], b);
    if (symmetric_fill && i != j) place(offsets_[j], offsets_[i], b.transpose());
  }
  AffineMat result(c0);
  for (auto& [idx, m] : terms) result.add_term(idx, m);
  return result;
}

VarInfo& VariableSet::add(const std::string& name, VarShape shape, Eigen::Index rows, Eigen::Index cols, int count) {
  if (has(name)) throw Error(ErrorKind::InvalidArgument, "variable '" + name + "' already registered");
  vars_.push_back({name, shape, rows, cols, size_, count});
  size_ += count;
  return vars_.back();
}

AffineMat VariableSet::symmetric(const std::string& name, Eigen::Index n) {
  const VarInfo& v = add(name, VarShape::Symmetric, n, n, static_cast<int>(n * (n + 1) / 2));
  AffineMat a(n, n);
  int k = v.offset;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      a.add_term(k++, e);
    }
  return a;
}

AffineMat VariableSet::full(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  const VarInfo& v = add(name, VarShape::Full, rows, cols, static_cast<int>(rows * cols));
  AffineMat a(rows, cols);
  int k = v.offset;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      Mat e = Mat::Zero(rows, cols);
      e(i, j) = 1.0;
      a.add_term(k++, e);
    }
  return a;
}

AffineMat VariableSet::diagonal(const std::string& name, Eigen::Index n) {
  const VarInfo& v = add(name, VarShape::Diagonal, n, n, static_cast<int>(n));
  AffineMat a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n, n);
    e(i, i) = 1.0;
    a.add_term(v.offset + static_cast<int>(i), e);
  }
  return a;
}

AffineMat VariableSet::scalar(const std::string& name) {
  const VarInfo& v = add(name, VarShape::Scalar, 1, 1, 1);
  AffineMat a(1, 1);
  a.add_term(v.offset, Mat::Ones(1, 1));
  return a;
}

const VarInfo& VariableSet::info(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return v;
  throw Error(ErrorKind::InvalidArgument, "unknown variable '" + name + "'");
}

bool VariableSet::has(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return true;
  return false;
}

Mat VariableSet::value(const std::string& name, const Vec& x) const {
  const VarInfo& v = info(name);
  Mat out = Mat::Zero(v.rows, v.cols);
  int k = v.offset;
  switch (v.shape) {
    case VarShape::Symmetric:
      for (Eigen::Index i = 0; i < v.rows; ++i)
        for (Eigen::Index j = i; j < v.rows; ++j) out(i, j) = out(j, i) = x[k++];
      break;
    case VarShape::Full:
      for (Eigen::Index i = 0; i < v.rows; ++i)
        for (Eigen::Index j = 0; j < v.cols; ++j) out(i, j) = x[k++];
      break;
    case VarShape::Diagonal:
      for (Eigen::Index i = 0; i < v.rows; ++i) out(i, i) = x[k++];
      break;
    case VarShape::Scalar: out(0, 0) = x[k]; break;
  }
  return out;
}

void VariableSet::assign(const std::string& name, const Mat& value, Vec& x) const {
  const VarInfo& v = info(name);
  if (value.rows() != v.rows || value.cols() != v.cols)
    throw Error(ErrorKind::InvalidArgument, "value shape mismatch for '" + name + "'");
  int k = v.offset;
  switch (v.shape) {
    case VarShape::Symmetric:
      for (Eigen::Index i = 0; i < v.rows; ++i)
        for (Eigen::Index j = i; j < v.rows; ++j) x[k++] = 0.5 * (value(i, j) + value(j, i));
      break;
    case VarShape::Full:
      for (Eigen::Index i = 0; i < v.rows; ++i)
        for (Eigen::Index j = 0; j < v.cols; ++j) x[k++] = value(i, j);
      break;
    case VarShape::Diagonal:
      for (Eigen::Index i = 0; i < v.rows; ++i) x[k++] = value(i, i);
      break;
    case VarShape::Scalar: x[k] = value(0, 0); break;
  }
}

}  // namespace pdeetc
