#include "pcopt/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pcopt {

namespace {

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("Point: non-finite coordinate");
  }
}

}  // namespace

Point::Point(std::size_t dim, double fill) : coords_(dim, fill) {
  require_finite(coords_);
}

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  require_finite(coords_);
}

Point::Point(std::initializer_list<double> coords) : coords_(coords) {
  require_finite(coords_);
}

Point Point::unit(std::size_t dim, std::size_t axis) {
  if (axis >= dim) throw std::invalid_argument("Point::unit: axis out of range");
  Point e(dim);
  e.coords_[axis] = 1.0;
  return e;
}

double Point::squared_norm() const {
  double s = 0.0;
  for (double x : coords_) s += x * x;
  return s;
}

double Point::norm() const { return std::sqrt(squared_norm()); }

Point& Point::axpy(double scale, const Point& other) {
  if (other.size() != size()) throw std::invalid_argument("Point::axpy: dimension mismatch");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += scale * other.coords_[i];
  return *this;
}

Point operator+(const Point& a, const Point& b) {
  Point r = a;
  return r.axpy(1.0, b);
}

Point operator-(const Point& a, const Point& b) {
  Point r = a;
  return r.axpy(-1.0, b);
}

Point operator*(double s, const Point& a) {
  Point r = a;
  for (auto& x : r.coords_) x *= s;
  return r;
}

double dot(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void FunctionClassParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("FunctionClassParams: tau must be positive");
  }
  if (!(lip >= tau) || !std::isfinite(lip)) {
    throw std::invalid_argument("FunctionClassParams: lip must be >= tau");
  }
  if (dim < 1) throw std::invalid_argument("FunctionClassParams: dim must be >= 1");
}

QuadraticFunction::QuadraticFunction(FunctionClassParams params, Point center,
                                     std::vector<double> curvature, double offset)
    : params_(params), center_(std::move(center)), curvature_(std::move(curvature)),
      offset_(offset) {
  params_.validate();
  if (center_.size() != params_.dim || curvature_.size() != params_.dim) {
    throw std::invalid_argument("QuadraticFunction: dimension mismatch");
  }
  for (double c : curvature_) {
    if (!(c >= params_.tau && c <= params_.lip)) {
      throw std::invalid_argument("QuadraticFunction: curvature outside [tau, lip]");
    }
  }
  if (!std::isfinite(offset_)) throw std::invalid_argument("QuadraticFunction: non-finite offset");
}

QuadraticFunction QuadraticFunction::isotropic(FunctionClassParams params, Point center,
                                               double offset) {
  std::vector<double> curvature(params.dim, params.tau);
  return QuadraticFunction(params, std::move(center), std::move(curvature), offset);
}

void QuadraticFunction::check_dim(const Point& x) const {
  if (x.size() != params_.dim) {
    throw std::invalid_argument("QuadraticFunction: expected dimension " +
                                std::to_string(params_.dim) + ", got " +
                                std::to_string(x.size()));
  }
}

double QuadraticFunction::gap(const Point& x) const {
  check_dim(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = x[i] - center_[i];
    s += curvature_[i] * r * r;
  }
  return 0.5 * s;
}

double QuadraticFunction::evaluate(const Point& x) const { return offset_ + gap(x); }

Point QuadraticFunction::gradient(const Point& x) const {
  check_dim(x);
  Point g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = curvature_[i] * (x[i] - center_[i]);
  return g;
}

double QuadraticFunction::gap_along(const Point& x, const Point& d, double alpha) const {
  check_dim(x);
  check_dim(d);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (d[i] == 0.0) {
      double r = x[i] - center_[i];
      s += curvature_[i] * r * r;
    } else {
      double r = x[i] + alpha * d[i] - center_[i];
      s += curvature_[i] * r * r;
    }
  }
  return 0.5 * s;
}

double QuadraticFunction::evaluate_along(const Point& x, const Point& d, double alpha) const {
  return offset_ + gap_along(x, d, alpha);
}

double QuadraticFunction::line_minimizer(const Point& x, const Point& d) const {
  check_dim(x);
  check_dim(d);
  // d/dalpha: sum c_i d_i (x_i + alpha d_i - center_i) = 0
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += curvature_[i] * d[i] * (center_[i] - x[i]);
    den += curvature_[i] * d[i] * d[i];
  }
  if (den <= 0.0) throw std::invalid_argument("line_minimizer: zero direction");
  return num / den;
}

}  // namespace pcopt
