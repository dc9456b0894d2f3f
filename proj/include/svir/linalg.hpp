// Fixed-size dense matrix helpers: LU solves, characteristic polynomial via
// Faddeev-LeVerrier, and a Hessenberg + shifted-QR eigensolver for the small
// nonsymmetric matrices this library works with.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace svir {

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

using Matrix5 = Matrix<5>;
using Matrix2 = Matrix<2>;
using Complex = std::complex<double>;

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <std::size_t N>
Matrix<N> identity() {
  Matrix<N> m{};
  for (std::size_t i = 0; i < N; ++i) m[i][i] = 1.0;
  return m;
}

template <std::size_t N>
Matrix<N> transpose(const Matrix<N>& a) {
  Matrix<N> t{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) t[j][i] = a[i][j];
  return t;
}

template <std::size_t N>
Matrix<N> multiply(const Matrix<N>& a, const Matrix<N>& b) {
  Matrix<N> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t j = 0; j < N; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

template <std::size_t N>
std::array<double, N> multiply(const Matrix<N>& a, const std::array<double, N>& x) {
  std::array<double, N> y{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) y[i] += a[i][j] * x[j];
  return y;
}

template <std::size_t N>
double frobenius_norm(const Matrix<N>& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

template <std::size_t N>
double trace(const Matrix<N>& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < N; ++i) t += a[i][i];
  return t;
}

template <std::size_t N>
std::string format_matrix(const Matrix<N>& a) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < N; ++i) {
    os << "[";
    for (std::size_t j = 0; j < N; ++j) os << a[i][j] << (j + 1 < N ? ", " : "");
    os << "]\n";
  }
  return os.str();
}

/// Solves a x = b by LU with partial pivoting. Throws NumericError on a
/// (numerically) singular pivot.
template <std::size_t N>
std::array<double, N> solve(Matrix<N> a, std::array<double, N> b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw NumericError("singular matrix in solve()");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      a[r][col] = 0.0;
      for (std::size_t c = col + 1; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < N; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Complex variant used by inverse iteration.
template <std::size_t N>
std::array<Complex, N> solve(std::array<std::array<Complex, N>, N> a,
                             std::array<Complex, N> b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) == 0.0)
      throw NumericError("singular matrix in complex solve()");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const Complex f = a[r][col] / a[col][col];
      a[r][col] = Complex(0.0);
      for (std::size_t c = col + 1; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<Complex, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t j = i + 1; j < N; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Coefficients (k1..kN) of det(tau I - M) = tau^N + k1 tau^(N-1) + ... + kN,
/// by the Faddeev-LeVerrier recursion.
template <std::size_t N>
std::array<double, N> char_poly(const Matrix<N>& m) {
  std::array<double, N> k{};
  Matrix<N> mk = m;
  for (std::size_t step = 0; step < N; ++step) {
    k[step] = -trace(mk) / static_cast<double>(step + 1);
    if (step + 1 == N) break;
    Matrix<N> shifted = mk;
    for (std::size_t i = 0; i < N; ++i) shifted[i][i] += k[step];
    mk = multiply(m, shifted);
  }
  return k;
}

namespace detail {

/// Householder reduction to upper Hessenberg form (in place, real).
template <std::size_t N>
void hessenberg(Matrix<N>& a) {
  for (std::size_t col = 0; col + 2 < N; ++col) {
    double scale = 0.0;
    for (std::size_t i = col + 1; i < N; ++i) scale += std::abs(a[i][col]);
    if (scale == 0.0) continue;
    std::array<double, N> u{};
    double sig = 0.0;
    for (std::size_t i = col + 1; i < N; ++i) {
      u[i] = a[i][col] / scale;
      sig += u[i] * u[i];
    }
    double alpha = std::sqrt(sig);
    if (u[col + 1] > 0.0) alpha = -alpha;
    sig -= u[col + 1] * alpha;
    u[col + 1] -= alpha;
    if (sig == 0.0) continue;
    // A <- P A P with P = I - u u^T / sig
    for (std::size_t j = 0; j < N; ++j) {
      double s = 0.0;
      for (std::size_t i = col + 1; i < N; ++i) s += u[i] * a[i][j];
      s /= sig;
      for (std::size_t i = col + 1; i < N; ++i) a[i][j] -= s * u[i];
    }
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = col + 1; j < N; ++j) s += a[i][j] * u[j];
      s /= sig;
      for (std::size_t j = col + 1; j < N; ++j) a[i][j] -= s * u[j];
    }
    a[col + 1][col] = alpha * scale;
    for (std::size_t i = col + 2; i < N; ++i) a[i][col] = 0.0;
  }
}

struct Givens {
  double c;
  Complex s;
};

}  // namespace detail

/// Eigenvalues of a real N x N matrix: Householder reduction to Hessenberg
/// form followed by complex single-shift (Wilkinson) QR iteration. Each
/// returned eigenvalue is certified by inverse iteration: the residual
/// ||M v - tau v|| must not exceed `residual_tol` times the Frobenius norm.
/// Results are sorted by real part descending, then imaginary part.
template <std::size_t N>
std::array<Complex, N> eigenvalues(const Matrix<N>& m,
                                   double residual_tol = 1e-9) {
  for (const auto& row : m)
    for (double v : row)
      if (!std::isfinite(v))
        throw std::domain_error("eigenvalues(): non-finite matrix entry");

  const double norm = frobenius_norm(m);
  std::array<Complex, N> eig{};
  if (norm == 0.0) {
    return eig;  // zero matrix
  }

  Matrix<N> hr = m;
  detail::hessenberg(hr);
  std::array<std::array<Complex, N>, N> h{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) h[i][j] = hr[i][j];

  const double eps = std::numeric_limits<double>::epsilon();
  int n = static_cast<int>(N) - 1;
  int iter_total = 0;
  int iter_since_deflation = 0;
  while (n >= 0) {
    // deflate negligible subdiagonals
    for (int i = 1; i <= n; ++i) {
      double small = eps * (std::abs(h[i - 1][i - 1]) + std::abs(h[i][i]));
      if (small == 0.0) small = eps * norm;
      if (std::abs(h[i][i - 1]) <= small) h[i][i - 1] = Complex(0.0);
    }
    if (n == 0 || std::abs(h[n][n - 1]) == 0.0) {
      eig[n] = h[n][n];
      --n;
      iter_since_deflation = 0;
      continue;
    }
    if (++iter_total > 60 * static_cast<int>(N)) {
      throw NumericError("eigenvalues(): QR iteration failed to converge on\n" +
                         format_matrix(m));
    }
    int l = n;
    while (l > 0 && std::abs(h[l][l - 1]) != 0.0) --l;

    // Wilkinson shift from the trailing 2x2 block
    const Complex ta = h[n - 1][n - 1], tb = h[n - 1][n];
    const Complex tc = h[n][n - 1], td = h[n][n];
    const Complex tr2 = 0.5 * (ta + td);
    const Complex disc = std::sqrt(tr2 * tr2 - (ta * td - tb * tc));
    Complex mu = (std::abs(tr2 + disc - td) < std::abs(tr2 - disc - td))
                     ? tr2 + disc
                     : tr2 - disc;
    if (++iter_since_deflation % 16 == 0) {
      mu += std::abs(h[n][n - 1]);  // exceptional shift to break cycles
    }

    for (int i = l; i <= n; ++i) h[i][i] -= mu;
    std::vector<detail::Givens> rot(static_cast<std::size_t>(n - l));
    for (int i = l; i < n; ++i) {
      const Complex f = h[i][i], g = h[i + 1][i];
      const double t = std::hypot(std::abs(f), std::abs(g));
      detail::Givens gv{1.0, Complex(0.0)};
      if (t > 0.0 && std::abs(g) > 0.0) {
        if (std::abs(f) == 0.0) {
          gv.c = 0.0;
          gv.s = std::conj(g) / std::abs(g);
        } else {
          gv.c = std::abs(f) / t;
          gv.s = (f / std::abs(f)) * std::conj(g) / t;
        }
      }
      rot[static_cast<std::size_t>(i - l)] = gv;
      for (std::size_t j = 0; j < N; ++j) {
        const Complex x = h[i][j], y = h[i + 1][j];
        h[i][j] = gv.c * x + gv.s * y;
        h[i + 1][j] = -std::conj(gv.s) * x + gv.c * y;
      }
    }
    for (int i = l; i < n; ++i) {
      const detail::Givens gv = rot[static_cast<std::size_t>(i - l)];
      for (std::size_t r = 0; r < N; ++r) {
        const Complex x = h[r][i], y = h[r][i + 1];
        h[r][i] = gv.c * x + std::conj(gv.s) * y;
        h[r][i + 1] = -gv.s * x + gv.c * y;
      }
    }
    for (int i = l; i <= n; ++i) h[i][i] += mu;
  }

  // certify each eigenvalue by one pass of inverse iteration
  for (std::size_t e = 0; e < N; ++e) {
    const Complex tau = eig[e];
    std::array<std::array<Complex, N>, N> shifted{};
    const Complex nudge = Complex(1.0, 1.0) * (1e-13 * norm);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) shifted[i][j] = m[i][j];
      shifted[i][i] -= tau + nudge;
    }
    std::array<Complex, N> v{};
    for (auto& c : v) c = Complex(1.0, 0.0);
    for (int pass = 0; pass < 3; ++pass) {
      try {
        v = solve<N>(shifted, v);
      } catch (const NumericError&) {
        for (std::size_t i = 0; i < N; ++i) shifted[i][i] -= nudge;
        v = solve<N>(shifted, v);
      }
      double len = 0.0;
      for (const auto& c : v) len += std::norm(c);
      len = std::sqrt(len);
      for (auto& c : v) c /= len;
    }
    double res = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      Complex acc = -tau * v[i];
      for (std::size_t j = 0; j < N; ++j) acc += m[i][j] * v[j];
      res += std::norm(acc);
    }
    if (std::sqrt(res) > residual_tol * norm) {
      throw NumericError("eigenvalues(): residual check failed on\n" +
                         format_matrix(m));
    }
  }

  std::sort(eig.begin(), eig.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return eig;
}

/// Unit-norm null vector of a (numerically rank N-1) matrix, by inverse
/// iteration with a tiny diagonal shift. The caller is responsible for
/// checking that the null space is one-dimensional.
template <std::size_t N>
std::array<double, N> null_vector(const Matrix<N>& m) {
  const double norm = frobenius_norm(m);
  const double shift = (norm > 0.0 ? norm : 1.0) * 1e-11;
  Matrix<N> shifted = m;
  for (std::size_t i = 0; i < N; ++i) shifted[i][i] -= shift;
  std::array<double, N> v{};
  for (auto& c : v) c = 1.0;
  for (int pass = 0; pass < 4; ++pass) {
    v = solve<N>(shifted, v);
    double len = 0.0;
    for (double c : v) len += c * c;
    len = std::sqrt(len);
    for (auto& c : v) c /= len;
  }
  return v;
}

}  // namespace svir
