#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pcopt {

// Dense point in R^n. Entries are required to be finite.
class Point {
 public:
  Point() = default;
  explicit Point(std::size_t dim, double fill = 0.0);
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  static Point unit(std::size_t dim, std::size_t axis);

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const { return coords_; }

  double norm() const;
  double squared_norm() const;

  // this += scale * other
  Point& axpy(double scale, const Point& other);

  friend Point operator+(const Point& a, const Point& b);
  friend Point operator-(const Point& a, const Point& b);
  friend Point operator*(double s, const Point& a);
  friend bool operator==(const Point& a, const Point& b) = default;

 private:
  std::vector<double> coords_;
};

double dot(const Point& a, const Point& b);

// Parameters of the class of tau-strongly convex functions with
// lip-Lipschitz gradients on R^dim.
struct FunctionClassParams {
  double tau = 1.0;
  double lip = 1.0;
  std::size_t dim = 1;

  // Throws std::invalid_argument unless 0 < tau <= lip and dim >= 1.
  void validate() const;
};

// f(x) = offset + 1/2 sum_i curvature_i (x_i - center_i)^2 with every
// curvature_i in [tau, lip]. The minimizer is exactly `center`.
class QuadraticFunction {
 public:
  QuadraticFunction(FunctionClassParams params, Point center,
                    std::vector<double> curvature, double offset = 0.0);

  // curvature_i = params.tau for every i.
  static QuadraticFunction isotropic(FunctionClassParams params, Point center,
                                     double offset = 0.0);

  const FunctionClassParams& params() const { return params_; }
  const Point& center() const { return center_; }
  const std::vector<double>& curvature() const { return curvature_; }
  double offset() const { return offset_; }
  std::size_t dim() const { return params_.dim; }

  double evaluate(const Point& x) const;
  Point gradient(const Point& x) const;
  // evaluate(x) - evaluate(center); never negative.
  double gap(const Point& x) const;

  // Value at x + alpha * d without materializing the point.
  double evaluate_along(const Point& x, const Point& d, double alpha) const;
  double gap_along(const Point& x, const Point& d, double alpha) const;

  // Exact minimizer of alpha -> f(x + alpha d). Requires d != 0.
  double line_minimizer(const Point& x, const Point& d) const;

 private:
  void check_dim(const Point& x) const;

  FunctionClassParams params_;
  Point center_;
  std::vector<double> curvature_;
  double offset_;
};

}  // namespace pcopt
