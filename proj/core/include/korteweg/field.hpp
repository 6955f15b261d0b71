#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace korteweg {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

// Uniform periodic grid on [0, length); nodes x_j = j length / n.
// n must be even and >= 8 so the spectral operators have a Nyquist mode.
GridPtr make_grid(int n, double length);

class Grid {
 public:
  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return dx_; }
  double node(int j) const { return dx_ * j; }
  // Wavenumber of complex half-spectrum mode j in [0, n/2].
  double wavenumber(int j) const { return 2.0 * pi() * j / length_; }
  static double pi() { return 3.14159265358979323846; }

 private:
  friend GridPtr make_grid(int, double);
  Grid(int n, double length) : n_(n), length_(length), dx_(length / n) {}
  int n_;
  double length_;
  double dx_;
};

// Same layout check used by every binary field operation.
bool compatible(const Grid& a, const Grid& b);

struct Field {
  GridPtr grid;
  std::vector<double> v;

  Field() = default;
  Field(GridPtr g, std::vector<double> values) : grid(std::move(g)), v(std::move(values)) {}

  static Field zeros(const GridPtr& g) { return Field(g, std::vector<double>(g->n(), 0.0)); }
  static Field constant(const GridPtr& g, double c) {
    return Field(g, std::vector<double>(g->n(), c));
  }
  template <class F>
  static Field sample(const GridPtr& g, F&& fn) {
    Field out = zeros(g);
    for (int j = 0; j < g->n(); ++j) out.v[j] = fn(g->node(j));
    return out;
  }

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int j) { return v[j]; }
  double operator[](int j) const { return v[j]; }
};

void require_same_grid(const Field& a, const Field& b, const char* who);

template <class F>
Field map(const Field& a, F&& fn) {
  Field out = a;
  for (double& x : out.v) x = fn(x);
  return out;
}

template <class F>
Field zip(const Field& a, const Field& b, F&& fn) {
  require_same_grid(a, b, "zip");
  Field out = a;
  for (int j = 0; j < out.size(); ++j) out.v[j] = fn(a.v[j], b.v[j]);
  return out;
}

inline Field operator+(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}
inline Field operator-(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}
inline Field operator*(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x * y; });
}
inline Field operator/(const Field& a, const Field& b) {
  return zip(a, b, [](double x, double y) { return x / y; });
}
inline Field operator*(double c, const Field& a) {
  Field out = a;
  for (double& x : out.v) x *= c;
  return out;
}
inline Field operator*(const Field& a, double c) { return c * a; }
inline Field operator-(const Field& a) { return -1.0 * a; }

inline Field& operator+=(Field& a, const Field& b) {
  require_same_grid(a, b, "operator+=");
  for (int j = 0; j < a.size(); ++j) a.v[j] += b.v[j];
  return a;
}
inline Field& operator-=(Field& a, const Field& b) {
  require_same_grid(a, b, "operator-=");
  for (int j = 0; j < a.size(); ++j) a.v[j] -= b.v[j];
  return a;
}

bool all_finite(const Field& f);

// Spectral derivative of order 1 or 2.  Odd orders zero the Nyquist mode so
// the result of an odd derivative of a real field stays real and the discrete
// integration-by-parts identity quad(f g') = -quad(f' g) is exact.
Field deriv(const Field& f, int order);

// Trapezoid quadrature over the torus; on a periodic grid this is dx * sum.
double quad(const Field& f);

double norm_l2(const Field& f);
double norm_linf(const Field& f);

// Zero every mode with index above n/3 (the 2/3 rule).
Field dealias(const Field& f);

// Spectral restriction onto a coarser grid with the same length.
// Exact on trig polynomials the coarse grid can represent.
Field restrict_to(const Field& f, const GridPtr& coarse);

// Half-spectrum amplitudes |c_j|/n, j = 0..n/2; used by decay diagnostics.
std::vector<double> spectrum(const Field& f);

// Shortest round-trippable decimal formatting for run artifacts.
inline std::string fmt_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace korteweg
