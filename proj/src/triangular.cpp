#include "ras/triangular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ras/errors.hpp"

namespace ras {

void UpperTriangular::set(int i, int j, double v) {
    if (j < i) throw std::invalid_argument("UpperTriangular: write below the diagonal");
    a_[static_cast<std::size_t>(i) * dim_ + j] = v;
}

UpperTriangular UpperTriangular::identity(int dim) {
    UpperTriangular m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

UpperTriangular UpperTriangular::leading_block(int k) const {
    UpperTriangular m(k);
    for (int i = 0; i < k; ++i) {
        const double* src = row(i);
        std::copy(src + i, src + k, m.row(i) + i);
    }
    return m;
}

double UpperTriangular::inf_norm() const {
    double best = 0.0;
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        const double* r = row(i);
        for (int j = i; j < dim_; ++j) s += std::abs(r[j]);
        best = std::max(best, s);
    }
    return best;
}

bool UpperTriangular::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

void tri_multiply(const UpperTriangular& a, const UpperTriangular& b, UpperTriangular& c) {
    const int n = a.dim();
    c = UpperTriangular(n);
    for (int i = 0; i < n; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (int k = i; k < n; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (int j = k; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

std::vector<double> tri_solve(const UpperTriangular& m, std::span<const double> b) {
    const int n = m.dim();
    std::vector<double> y(b.begin(), b.end());
    for (int i = n - 1; i >= 0; --i) {
        const double* mi = m.row(i);
        double s = y[i];
        for (int j = i + 1; j < n; ++j) s -= mi[j] * y[j];
        if (mi[i] == 0.0) throw EvalError("tri_solve: singular triangular matrix (zero diagonal)");
        y[i] = s / mi[i];
    }
    return y;
}

std::vector<double> row_times(std::span<const double> v, const UpperTriangular& m) {
    const int n = m.dim();
    std::vector<double> r(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* mi = m.row(i);
        for (int j = i; j < n; ++j) r[j] += vi * mi[j];
    }
    return r;
}

namespace {

// Solves (V - U) X = (V + U) where V - U is upper triangular; X is the Pade
// approximant of e^A and is itself upper triangular.
UpperTriangular pade_solve(const UpperTriangular& u, const UpperTriangular& v) {
    const int n = u.dim();
    UpperTriangular lhs(n), x(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) lhs.set(i, j, v(i, j) - u(i, j));
    // Column-wise back-substitution; column j has nonzeros in rows 0..j.
    for (int j = 0; j < n; ++j) {
        for (int i = j; i >= 0; --i) {
            double s = v(i, j) + u(i, j);
            for (int k = i + 1; k <= j; ++k) s -= lhs(i, k) * x(k, j);
            if (lhs(i, i) == 0.0) throw EvalError("matrix_exponential: singular Pade denominator");
            x.set(i, j, s / lhs(i, i));
        }
    }
    return x;
}

void add_scaled_identity(UpperTriangular& m, double c) {
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, m(i, i) + c);
}

UpperTriangular scaled(const UpperTriangular& m, double c) {
    const int n = m.dim();
    UpperTriangular r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r.set(i, j, c * m(i, j));
    return r;
}

UpperTriangular lin_comb(double ca, const UpperTriangular& a, double cb, const UpperTriangular& b) {
    const int n = a.dim();
    UpperTriangular r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r.set(i, j, ca * a(i, j) + cb * b(i, j));
    return r;
}

}  // namespace

UpperTriangular matrix_exponential(const UpperTriangular& m) {
    if (!m.all_finite()) throw std::invalid_argument("matrix_exponential: non-finite entries");
    const int n = m.dim();
    if (n == 0) return UpperTriangular(0);

    // Order thresholds from Higham's scaling-and-squaring analysis.
    constexpr double theta3 = 1.495585217958292e-2;
    constexpr double theta5 = 2.539398330063230e-1;
    constexpr double theta7 = 9.504178996162932e-1;
    constexpr double theta9 = 2.097847961257068e0;
    constexpr double theta13 = 5.371920351148152e0;

    const double norm = m.inf_norm();
    int s = 0;
    if (norm > theta13) {
        s = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    }
    const UpperTriangular a = s > 0 ? scaled(m, std::ldexp(1.0, -s)) : m;

    UpperTriangular a2(n);
    tri_multiply(a, a, a2);

    UpperTriangular u(n), v(n);
    if (norm <= theta3 && s == 0) {
        static const double b[] = {120, 60, 12, 1};
        UpperTriangular p = scaled(a2, b[3]);
        add_scaled_identity(p, b[1]);
        tri_multiply(a, p, u);
        v = scaled(a2, b[2]);
        add_scaled_identity(v, b[0]);
    } else if (norm <= theta5 && s == 0) {
        static const double b[] = {30240, 15120, 3360, 420, 30, 1};
        UpperTriangular a4(n);
        tri_multiply(a2, a2, a4);
        UpperTriangular p = lin_comb(b[5], a4, b[3], a2);
        add_scaled_identity(p, b[1]);
        tri_multiply(a, p, u);
        v = lin_comb(b[4], a4, b[2], a2);
        add_scaled_identity(v, b[0]);
    } else if (norm <= theta7 && s == 0) {
        static const double b[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
        UpperTriangular a4(n), a6(n);
        tri_multiply(a2, a2, a4);
        tri_multiply(a4, a2, a6);
        UpperTriangular p = lin_comb(b[7], a6, b[5], a4);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) p.set(i, j, p(i, j) + b[3] * a2(i, j));
        add_scaled_identity(p, b[1]);
        tri_multiply(a, p, u);
        v = lin_comb(b[6], a6, b[4], a4);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) v.set(i, j, v(i, j) + b[2] * a2(i, j));
        add_scaled_identity(v, b[0]);
    } else if (norm <= theta9 && s == 0) {
        static const double b[] = {17643225600., 8821612800., 2075673600., 302702400.,
                                   30270240.,    2162160.,    110880.,     3960.,
                                   90.,          1.};
        UpperTriangular a4(n), a6(n), a8(n);
        tri_multiply(a2, a2, a4);
        tri_multiply(a4, a2, a6);
        tri_multiply(a6, a2, a8);
        UpperTriangular p = lin_comb(b[9], a8, b[7], a6);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                p.set(i, j, p(i, j) + b[5] * a4(i, j) + b[3] * a2(i, j));
        add_scaled_identity(p, b[1]);
        tri_multiply(a, p, u);
        v = lin_comb(b[8], a8, b[6], a6);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                v.set(i, j, v(i, j) + b[4] * a4(i, j) + b[2] * a2(i, j));
        add_scaled_identity(v, b[0]);
    } else {
        static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                                   1187353796428800.,  129060195264000.,   10559470521600.,
                                   670442572800.,      33522128640.,       1323241920.,
                                   40840800.,          960960.,            16380.,
                                   182.,               1.};
        UpperTriangular a4(n), a6(n);
        tri_multiply(a2, a2, a4);
        tri_multiply(a4, a2, a6);
        UpperTriangular w1 = lin_comb(b[13], a6, b[11], a4);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) w1.set(i, j, w1(i, j) + b[9] * a2(i, j));
        UpperTriangular w(n);
        tri_multiply(a6, w1, w);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                w.set(i, j, w(i, j) + b[7] * a6(i, j) + b[5] * a4(i, j) + b[3] * a2(i, j));
        add_scaled_identity(w, b[1]);
        tri_multiply(a, w, u);
        UpperTriangular z1 = lin_comb(b[12], a6, b[10], a4);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) z1.set(i, j, z1(i, j) + b[8] * a2(i, j));
        tri_multiply(a6, z1, v);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                v.set(i, j, v(i, j) + b[6] * a6(i, j) + b[4] * a4(i, j) + b[2] * a2(i, j));
        add_scaled_identity(v, b[0]);
    }

    UpperTriangular x = pade_solve(u, v);
    for (int k = 0; k < s; ++k) {
        UpperTriangular sq(n);
        tri_multiply(x, x, sq);
        x = std::move(sq);
    }
    return x;
}

}  // namespace ras
