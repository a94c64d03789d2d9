#include "hh/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hh::linalg {

Vector lu_solve(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols()) throw std::invalid_argument("lu_solve: matrix must be square");
  if (A.rows() != b.size()) throw std::invalid_argument("lu_solve: size mismatch");
  const Eigen::Index n = A.rows();
  Matrix lu = A;
  Vector x = b;
  std::vector<Eigen::Index> piv(n);

  const double pivot_floor = 1e-14 * lu.cwiseAbs().maxCoeff();

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    double best = std::fabs(lu(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double v = std::fabs(lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best <= pivot_floor) throw SingularMatrix("lu_solve: pivot below threshold");
    piv[k] = p;
    if (p != k) {
      lu.row(p).swap(lu.row(k));
      std::swap(x(p), x(k));
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (Eigen::Index j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      x(i) -= f * x(k);
    }
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = x(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= lu(i, j) * x(j);
    x(i) = s / lu(i, i);
  }
  return x;
}

namespace {

// Parlett-Reinsch scaling balance (radix-2, no permutation phase).
void balance(Matrix& A) {
  const Eigen::Index n = A.rows();
  const double radix = 2.0, sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(A(j, i));
        r += std::fabs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0, s = c + r;
      while (c < g) {
        f *= radix;
        c *= sq;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= sq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        double inv = 1.0 / f;
        A.row(i) *= inv;
        A.col(i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form.
void hessenberg(Matrix& H) {
  const Eigen::Index n = H.rows();
  std::vector<double> ort(n, 0.0);
  for (Eigen::Index m = 1; m + 1 < n; ++m) {
    double scale = 0.0;
    for (Eigen::Index i = m; i < n; ++i) scale += std::fabs(H(i, m - 1));
    if (scale == 0.0) continue;

    double h = 0.0;
    for (Eigen::Index i = n - 1; i >= m; --i) {
      ort[i] = H(i, m - 1) / scale;
      h += ort[i] * ort[i];
    }
    double g = std::sqrt(h);
    if (ort[m] > 0.0) g = -g;
    h -= ort[m] * g;
    ort[m] -= g;

    for (Eigen::Index j = m; j < n; ++j) {
      double f = 0.0;
      for (Eigen::Index i = n - 1; i >= m; --i) f += ort[i] * H(i, j);
      f /= h;
      for (Eigen::Index i = m; i < n; ++i) H(i, j) -= f * ort[i];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      double f = 0.0;
      for (Eigen::Index j = n - 1; j >= m; --j) f += ort[j] * H(i, j);
      f /= h;
      for (Eigen::Index j = m; j < n; ++j) H(i, j) -= f * ort[j];
    }
    H(m, m - 1) = scale * g;
    for (Eigen::Index i = m + 1; i < n; ++i) H(i, m - 1) = 0.0;
  }
}

inline double sign_of(double magnitude, double carrier) {
  return carrier >= 0.0 ? std::fabs(magnitude) : -std::fabs(magnitude);
}

}  // namespace

EigenResult eigenvalues(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  const int n = static_cast<int>(A.rows());
  if (n > 2000) throw std::invalid_argument("eigenvalues: dimension above 2000 not supported");

  EigenResult result;
  result.eigenvalues.resize(n);
  if (n == 0) return result;

  Matrix H = A;
  balance(H);
  hessenberg(H);

  auto& w = result.eigenvalues;
  double norm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - 1); j < n; ++j) norm += std::fabs(H(i, j));

  int en = n - 1;
  double t = 0.0;
  int itn = 30 * n;

  while (en >= 0) {
    int its = 0;
    int na = en - 1;
    int enm2 = na - 1;
    bool deflated = false;

    while (!deflated) {
      // single small subdiagonal element
      int l;
      for (l = en; l > 0; --l) {
        double s = std::fabs(H(l - 1, l - 1)) + std::fabs(H(l, l));
        if (s == 0.0) s = norm;
        double tst1 = s;
        double tst2 = tst1 + std::fabs(H(l, l - 1));
        if (tst2 == tst1) break;
      }

      double x = H(en, en);
      if (l == en) {  // one root
        w[en] = {x + t, 0.0};
        en = na;
        deflated = true;
        break;
      }
      double y = H(na, na);
      double ww = H(en, na) * H(na, en);
      if (l == na) {  // two roots
        double p = (y - x) / 2.0;
        double q = p * p + ww;
        double zz = std::sqrt(std::fabs(q));
        x += t;
        if (q >= 0.0) {
          zz = p + sign_of(zz, p);
          double r1 = x + zz;
          double r2 = (zz != 0.0) ? x - ww / zz : r1;
          w[na] = {r1, 0.0};
          w[en] = {r2, 0.0};
        } else {
          w[na] = {x + p, zz};
          w[en] = {x + p, -zz};
        }
        en = enm2;
        deflated = true;
        break;
      }

      if (itn == 0) {
        // iteration budget exhausted: keep what deflated so far and return
        // the active block's diagonal as rough values
        result.converged = false;
        for (int i = 0; i <= en; ++i) w[i] = {H(i, i) + t, 0.0};
        en = -1;
        deflated = true;
        break;
      }

      if (its == 10 || its == 20) {  // exceptional shift
        t += x;
        for (int i = 0; i <= en; ++i) H(i, i) -= x;
        double s = std::fabs(H(en, na)) + std::fabs(H(na, enm2));
        x = 0.75 * s;
        y = x;
        ww = -0.4375 * s * s;
      }
      ++its;
      --itn;
      ++result.iterations;

      // two consecutive small subdiagonal elements
      int m;
      double p = 0.0, q = 0.0, r = 0.0, zz = 0.0;
      for (m = enm2; m >= l; --m) {
        zz = H(m, m);
        double rr = x - zz;
        double ss = y - zz;
        p = (rr * ss - ww) / H(m + 1, m) + H(m, m + 1);
        q = H(m + 1, m + 1) - zz - rr - ss;
        r = H(m + 2, m + 1);
        double sc = std::fabs(p) + std::fabs(q) + std::fabs(r);
        p /= sc;
        q /= sc;
        r /= sc;
        if (m == l) break;
        double tst1 =
            std::fabs(p) * (std::fabs(H(m - 1, m - 1)) + std::fabs(zz) + std::fabs(H(m + 1, m + 1)));
        double tst2 = tst1 + std::fabs(H(m, m - 1)) * (std::fabs(q) + std::fabs(r));
        if (tst2 == tst1) break;
      }
      for (int i = m + 2; i <= en; ++i) {
        H(i, i - 2) = 0.0;
        if (i != m + 2) H(i, i - 3) = 0.0;
      }

      // double QR step on rows l..en, columns m..en
      for (int k = m; k <= na; ++k) {
        bool notlast = (k != na);
        double xk;
        if (k != m) {
          p = H(k, k - 1);
          q = H(k + 1, k - 1);
          r = notlast ? H(k + 2, k - 1) : 0.0;
          xk = std::fabs(p) + std::fabs(q) + std::fabs(r);
          if (xk == 0.0) continue;
          p /= xk;
          q /= xk;
          r /= xk;
        } else {
          xk = 0.0;
        }
        double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
        if (k != m)
          H(k, k - 1) = -s * xk;
        else if (l != m)
          H(k, k - 1) = -H(k, k - 1);
        p += s;
        double cx = p / s;
        double cy = q / s;
        double cz = r / s;
        q /= p;
        r /= p;
        if (!notlast) {
          for (int j = k; j < n; ++j) {
            double f = H(k, j) + q * H(k + 1, j);
            H(k, j) -= f * cx;
            H(k + 1, j) -= f * cy;
          }
          int imax = std::min(en, k + 3);
          for (int i = 0; i <= imax; ++i) {
            double f = cx * H(i, k) + cy * H(i, k + 1);
            H(i, k) -= f;
            H(i, k + 1) -= f * q;
          }
        } else {
          for (int j = k; j < n; ++j) {
            double f = H(k, j) + q * H(k + 1, j) + r * H(k + 2, j);
            H(k, j) -= f * cx;
            H(k + 1, j) -= f * cy;
            H(k + 2, j) -= f * cz;
          }
          int imax = std::min(en, k + 3);
          for (int i = 0; i <= imax; ++i) {
            double f = cx * H(i, k) + cy * H(i, k + 1) + cz * H(i, k + 2);
            H(i, k) -= f;
            H(i, k + 1) -= f * q;
            H(i, k + 2) -= f * r;
          }
        }
      }
    }
  }

  std::sort(w.begin(), w.end(), [](const std::complex<double>& a, const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return result;
}

}  // namespace hh::linalg
