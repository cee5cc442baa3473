#pragma once

#include "fpsi/fem.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fpsi {

struct FieldRange {
    std::string name;
    int offset = 0;
    int size = 0;
};

class DofLayout {
public:
    DofLayout& add(std::string name, int size);
    const FieldRange& operator[](std::string_view name) const;
    int dimension() const { return dimension_; }
    const std::vector<FieldRange>& fields() const { return fields_; }

    std::span<const double> view(std::span<const double> x, std::string_view name) const;
    std::span<double> view(std::span<double> x, std::string_view name) const;

private:
    std::vector<FieldRange> fields_;
    int dimension_ = 0;
};

struct LinearSystem {
    CsrMatrix matrix;
    std::vector<double> rhs;
    DofLayout layout;
};

constexpr double kDefaultSolveTol = 1e-10;
constexpr int kDenseLimit = 2000;

// Relative residual ||b - A x|| / ||b|| (absolute when b = 0).
double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b);

// Sparse direct LU that owns its factorization; factor once, solve many right-hand sides.
class SparseLu {
public:
    explicit SparseLu(const CsrMatrix& a, double tol = kDefaultSolveTol);
    ~SparseLu();
    SparseLu(SparseLu&&) noexcept;
    SparseLu& operator=(SparseLu&&) noexcept;

    // Throws SolverError when the residual stays above tol after refinement.
    std::vector<double> solve(std::span<const double> b) const;
    int dimension() const;
    static std::string backend();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<double> solve(const LinearSystem& system, double tol = kDefaultSolveTol);

// Dense partial-pivot LU; reference path for dimension <= kDenseLimit.
std::vector<double> dense_solve(const LinearSystem& system, double tol = kDefaultSolveTol);

}  // namespace fpsi
