#include "korteweg/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace korteweg {

namespace {

// FFTW planning is not thread safe; executing distinct plans is.  Each thread
// keeps its own plans and buffers per transform size, so concurrent
// simulations never share scratch state.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Workspace {
  int n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Workspace(int size) : n(size) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    // FFTW_ESTIMATE keeps plan selection deterministic run to run.
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~Workspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

Workspace& workspace_for(int n) {
  thread_local std::unordered_map<int, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Workspace>(n);
  return *slot;
}

void check_field(const Field& f, const char* who) {
  if (!f.grid) throw std::invalid_argument(std::string(who) + ": field has no grid");
  if (f.size() != f.grid->n()) {
    throw std::invalid_argument(std::string(who) + ": field length does not match its grid");
  }
}

}  // namespace

GridPtr make_grid(int n, double length) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("make_grid: n must be even and >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("make_grid: length must be positive and finite");
  }
  return GridPtr(new Grid(n, length));
}

bool compatible(const Grid& a, const Grid& b) {
  return a.n() == b.n() && a.length() == b.length();
}

void require_same_grid(const Field& a, const Field& b, const char* who) {
  check_field(a, who);
  check_field(b, who);
  if (!compatible(*a.grid, *b.grid)) {
    throw std::invalid_argument(std::string(who) + ": fields live on different grids");
  }
}

bool all_finite(const Field& f) {
  for (double x : f.v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Field deriv(const Field& f, int order) {
  check_field(f, "deriv");
  if (order != 1 && order != 2) {
    throw std::invalid_argument("deriv: order must be 1 or 2, got " + std::to_string(order));
  }
  const int n = f.grid->n();
  Workspace& ws = workspace_for(n);
  std::copy(f.v.begin(), f.v.end(), ws.real);
  fftw_execute(ws.fwd);

  const int half = n / 2;
  for (int j = 0; j <= half; ++j) {
    const double k = f.grid->wavenumber(j);
    double re = ws.cplx[j][0];
    double im = ws.cplx[j][1];
    if (order == 1) {
      // multiply by ik; the Nyquist mode has no sign-definite direction.
      if (j == half) {
        re = 0.0;
        im = 0.0;
      } else {
        const double t = re;
        re = -k * im;
        im = k * t;
      }
    } else {
      re *= -k * k;
      im *= -k * k;
    }
    ws.cplx[j][0] = re;
    ws.cplx[j][1] = im;
  }

  fftw_execute(ws.bwd);
  Field out = Field::zeros(f.grid);
  const double inv = 1.0 / n;
  for (int j = 0; j < n; ++j) out.v[j] = ws.real[j] * inv;
  return out;
}

double quad(const Field& f) {
  check_field(f, "quad");
  double acc = 0.0;
  for (double x : f.v) acc += x;
  return acc * f.grid->dx();
}

double norm_l2(const Field& f) {
  check_field(f, "norm_l2");
  double acc = 0.0;
  for (double x : f.v) acc += x * x;
  return std::sqrt(acc * f.grid->dx());
}

double norm_linf(const Field& f) {
  check_field(f, "norm_linf");
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

Field dealias(const Field& f) {
  check_field(f, "dealias");
  const int n = f.grid->n();
  Workspace& ws = workspace_for(n);
  std::copy(f.v.begin(), f.v.end(), ws.real);
  fftw_execute(ws.fwd);
  const int keep = n / 3;
  for (int j = keep + 1; j <= n / 2; ++j) {
    ws.cplx[j][0] = 0.0;
    ws.cplx[j][1] = 0.0;
  }
  fftw_execute(ws.bwd);
  Field out = Field::zeros(f.grid);
  const double inv = 1.0 / n;
  for (int j = 0; j < n; ++j) out.v[j] = ws.real[j] * inv;
  return out;
}

Field restrict_to(const Field& f, const GridPtr& coarse) {
  check_field(f, "restrict_to");
  const int nf = f.grid->n();
  const int nc = coarse->n();
  if (coarse->length() != f.grid->length()) {
    throw std::invalid_argument("restrict_to: grids must share the domain length");
  }
  if (nc > nf) throw std::invalid_argument("restrict_to: target grid must be coarser");
  if (nc == nf) return f;

  Workspace& fine = workspace_for(nf);
  std::copy(f.v.begin(), f.v.end(), fine.real);
  fftw_execute(fine.fwd);

  Workspace& crs = workspace_for(nc);
  const double scale = static_cast<double>(nc) / nf;
  for (int j = 0; j < nc / 2; ++j) {
    crs.cplx[j][0] = fine.cplx[j][0] * scale;
    crs.cplx[j][1] = fine.cplx[j][1] * scale;
  }
  // The fine grid resolves mode nc/2 as an interior mode; the coarse grid
  // folds its conjugate pair into one real Nyquist coefficient.
  crs.cplx[nc / 2][0] = 2.0 * fine.cplx[nc / 2][0] * scale;
  crs.cplx[nc / 2][1] = 0.0;

  fftw_execute(crs.bwd);
  Field out = Field::zeros(coarse);
  const double inv = 1.0 / nc;
  for (int j = 0; j < nc; ++j) out.v[j] = crs.real[j] * inv;
  return out;
}

std::vector<double> spectrum(const Field& f) {
  check_field(f, "spectrum");
  const int n = f.grid->n();
  Workspace& ws = workspace_for(n);
  std::copy(f.v.begin(), f.v.end(), ws.real);
  fftw_execute(ws.fwd);
  std::vector<double> amps(n / 2 + 1);
  for (int j = 0; j <= n / 2; ++j) {
    amps[j] = std::hypot(ws.cplx[j][0], ws.cplx[j][1]) / n;
  }
  return amps;
}

}  // namespace korteweg
