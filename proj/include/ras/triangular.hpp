#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ras {

// Dense row-major square matrix constrained to be upper triangular. All
// transition-rate matrices produced by the fitting step are upper
// triangular, and products, inverses and exponentials of upper-triangular
// matrices stay upper triangular, so every kernel below exploits that
// structure (solves by back-substitution, multiplies over the upper wedge).
class UpperTriangular {
  public:
    UpperTriangular() = default;
    explicit UpperTriangular(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {}

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    void set(int i, int j, double v);

    const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * dim_; }
    double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * dim_; }

    static UpperTriangular identity(int dim);

    // Leading principal block of size k.
    UpperTriangular leading_block(int k) const;

    double inf_norm() const;
    bool all_finite() const;

  private:
    int dim_ = 0;
    std::vector<double> a_;
};

// C = A * B, all upper triangular and of equal dimension.
void tri_multiply(const UpperTriangular& a, const UpperTriangular& b, UpperTriangular& c);

// Solves M y = b by back-substitution. Throws EvalError on a zero diagonal.
std::vector<double> tri_solve(const UpperTriangular& m, std::span<const double> b);

// r = v * M (row vector times matrix).
std::vector<double> row_times(std::span<const double> v, const UpperTriangular& m);

// e^M by scaling and squaring with diagonal Pade approximants (orders
// 3/5/7/9/13 chosen from the inf-norm). Throws std::invalid_argument when M
// has non-finite entries.
UpperTriangular matrix_exponential(const UpperTriangular& m);

}  // namespace ras
