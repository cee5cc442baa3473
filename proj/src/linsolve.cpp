#include "fpsi/linsolve.hpp"

#include "fpsi/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#ifdef FPSI_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>

namespace fpsi {

DofLayout& DofLayout::add(std::string name, int size) {
    fields_.push_back({std::move(name), dimension_, size});
    dimension_ += size;
    return *this;
}

const FieldRange& DofLayout::operator[](std::string_view name) const {
    for (const auto& f : fields_)
        if (f.name == name) return f;
    throw ValidationError("no field '" + std::string(name) + "' in layout");
}

std::span<const double> DofLayout::view(std::span<const double> x, std::string_view name) const {
    const auto& f = (*this)[name];
    return x.subspan(f.offset, f.size);
}

std::span<double> DofLayout::view(std::span<double> x, std::string_view name) const {
    const auto& f = (*this)[name];
    return x.subspan(f.offset, f.size);
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

SpMat to_eigen(const CsrMatrix& a) {
    Eigen::Map<const RowMat> view(a.rows(), a.cols(), static_cast<int>(a.nnz()), a.row_offsets().data(),
                                  a.col_indices().data(), a.values().data());
    SpMat m(view);
    m.makeCompressed();
    return m;
}

}  // namespace

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
    auto r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double nb = norm2(b);
    return nb > 0 ? norm2(r) / nb : norm2(r);
}

struct SparseLu::Impl {
    CsrMatrix a;
    double tol;
    SpMat m;  // UMFPACK solves read the factored matrix, so it lives as long as the factors
#ifdef FPSI_HAVE_UMFPACK
    Eigen::UmfPackLU<SpMat> lu;
#else
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
#endif
};

SparseLu::SparseLu(const CsrMatrix& a, double tol) : impl_(std::make_unique<Impl>()) {
    if (a.rows() != a.cols()) throw ValidationError("matrix must be square");
    impl_->a = a;
    impl_->tol = tol;
    impl_->m = to_eigen(a);
    impl_->lu.compute(impl_->m);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed (singular or breakdown)", INFINITY);
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

int SparseLu::dimension() const { return impl_->a.rows(); }

std::string SparseLu::backend() {
#ifdef FPSI_HAVE_UMFPACK
    return "umfpack";
#else
    return "eigen-sparselu";
#endif
}

std::vector<double> SparseLu::solve(std::span<const double> b) const {
    const int n = dimension();
    if (static_cast<int>(b.size()) != n) throw ValidationError("rhs length does not match matrix dimension");
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
    Eigen::VectorXd x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed", INFINITY);
    std::vector<double> out(x.data(), x.data() + n);
    double res = relative_residual(impl_->a, out, b);
    // a couple of refinement sweeps absorb the scale spread between fluid and structure rows
    for (int sweep = 0; sweep < 3 && res > impl_->tol; ++sweep) {
        auto r = impl_->a.multiply(out);
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
        const Eigen::VectorXd dx = impl_->lu.solve(rv);
        for (int i = 0; i < n; ++i) out[i] += dx[i];
        res = relative_residual(impl_->a, out, b);
    }
    if (!(res <= impl_->tol)) throw SolverError("linear solve did not reach tolerance", res);
    return out;
}

std::vector<double> solve(const LinearSystem& system, double tol) {
    if (static_cast<int>(system.rhs.size()) != system.matrix.rows()) throw ValidationError("rhs length does not match matrix dimension");
    return SparseLu(system.matrix, tol).solve(system.rhs);
}

std::vector<double> dense_solve(const LinearSystem& system, double tol) {
    const int n = system.matrix.rows();
    if (n > kDenseLimit) throw ValidationError("dense fallback limited to dimension " + std::to_string(kDenseLimit));
    if (static_cast<int>(system.rhs.size()) != n) throw ValidationError("rhs length does not match matrix dimension");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const auto& off = system.matrix.row_offsets();
    for (int r = 0; r < n; ++r)
        for (int k = off[r]; k < off[r + 1]; ++k) a(r, system.matrix.col_indices()[k]) = system.matrix.values()[k];
    Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd x = lu.solve(b);
    std::vector<double> out(x.data(), x.data() + n);
    const double res = relative_residual(system.matrix, out, system.rhs);
    if (!(res <= tol)) throw SolverError("dense solve did not reach tolerance", res);
    return out;
}

}  // namespace fpsi
