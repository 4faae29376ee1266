#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aima {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

using MatF = Mat<float>;
using MatD = Mat<double>;

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

/// Runs fn(i) for i in [0, n). Static partition, so results that write to
/// disjoint slots per index are bit-deterministic for a fixed thread count.
template <class Fn>
inline void parallel_for(std::int64_t n, Fn&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
#else
    for (std::int64_t i = 0; i < n; ++i) fn(i);
#endif
}

namespace detail {
constexpr double kGemmParallelFlops = 1.5e5;

template <class S>
inline void add_or_assign(Eigen::Ref<Mat<S>> c, const Mat<S>& part, bool accumulate) {
    if (accumulate)
        c.noalias() += part;
    else
        c.noalias() = part;
}
}  // namespace detail

/// C = A * B (+C when accumulate). Row-partitioned across threads; each
/// output row is produced by exactly one thread, so the result does not
/// depend on the schedule.
template <class S>
inline void matmul(const Eigen::Ref<const Mat<S>>& a, const Eigen::Ref<const Mat<S>>& b,
                   Mat<S>& c, bool accumulate = false) {
    const Eigen::Index m = a.rows(), k = a.cols(), n = b.cols();
    if (!accumulate) c.resize(m, n);
    const double flops = 2.0 * double(m) * double(k) * double(n);
    const int nt = max_threads();
    if (nt <= 1 || flops < detail::kGemmParallelFlops || m < nt) {
        if (accumulate)
            c.noalias() += a * b;
        else
            c.noalias() = a * b;
        return;
    }
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
        const int t = omp_get_thread_num(), tn = omp_get_num_threads();
        const Eigen::Index chunk = (m + tn - 1) / tn;
        const Eigen::Index r0 = std::min<Eigen::Index>(m, Eigen::Index(t) * chunk);
        const Eigen::Index r1 = std::min<Eigen::Index>(m, r0 + chunk);
        if (r1 > r0) {
            if (accumulate)
                c.middleRows(r0, r1 - r0).noalias() += a.middleRows(r0, r1 - r0) * b;
            else
                c.middleRows(r0, r1 - r0).noalias() = a.middleRows(r0, r1 - r0) * b;
        }
    }
#endif
}

/// C = A^T * B (+C when accumulate); partitions over C's rows (= A's columns).
template <class S>
inline void matmul_tn(const Eigen::Ref<const Mat<S>>& a, const Eigen::Ref<const Mat<S>>& b,
                      Mat<S>& c, bool accumulate = false) {
    const Eigen::Index m = a.cols(), k = a.rows(), n = b.cols();
    if (!accumulate) c.resize(m, n);
    const double flops = 2.0 * double(m) * double(k) * double(n);
    const int nt = max_threads();
    if (nt <= 1 || flops < detail::kGemmParallelFlops || m < nt) {
        if (accumulate)
            c.noalias() += a.transpose() * b;
        else
            c.noalias() = a.transpose() * b;
        return;
    }
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
        const int t = omp_get_thread_num(), tn = omp_get_num_threads();
        const Eigen::Index chunk = (m + tn - 1) / tn;
        const Eigen::Index r0 = std::min<Eigen::Index>(m, Eigen::Index(t) * chunk);
        const Eigen::Index r1 = std::min<Eigen::Index>(m, r0 + chunk);
        if (r1 > r0) {
            if (accumulate)
                c.middleRows(r0, r1 - r0).noalias() += a.middleCols(r0, r1 - r0).transpose() * b;
            else
                c.middleRows(r0, r1 - r0).noalias() = a.middleCols(r0, r1 - r0).transpose() * b;
        }
    }
#endif
}

/// C = A * B^T (+C when accumulate); partitions over C's rows.
template <class S>
inline void matmul_nt(const Eigen::Ref<const Mat<S>>& a, const Eigen::Ref<const Mat<S>>& b,
                      Mat<S>& c, bool accumulate = false) {
    const Eigen::Index m = a.rows(), k = a.cols(), n = b.rows();
    if (!accumulate) c.resize(m, n);
    const double flops = 2.0 * double(m) * double(k) * double(n);
    const int nt = max_threads();
    if (nt <= 1 || flops < detail::kGemmParallelFlops || m < nt) {
        if (accumulate)
            c.noalias() += a * b.transpose();
        else
            c.noalias() = a * b.transpose();
        return;
    }
#ifdef _OPENMP
#pragma omp parallel num_threads(nt)
    {
        const int t = omp_get_thread_num(), tn = omp_get_num_threads();
        const Eigen::Index chunk = (m + tn - 1) / tn;
        const Eigen::Index r0 = std::min<Eigen::Index>(m, Eigen::Index(t) * chunk);
        const Eigen::Index r1 = std::min<Eigen::Index>(m, r0 + chunk);
        if (r1 > r0) {
            if (accumulate)
                c.middleRows(r0, r1 - r0).noalias() += a.middleRows(r0, r1 - r0) * b.transpose();
            else
                c.middleRows(r0, r1 - r0).noalias() = a.middleRows(r0, r1 - r0) * b.transpose();
        }
    }
#endif
}

}  // namespace aima
