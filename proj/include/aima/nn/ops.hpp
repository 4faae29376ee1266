#pragma once

// Building-block layers with explicit forward caches and hand-written
// backward passes. Row convention: activations are (rows = flattened
// batch*sequence, cols = features), row-major.

#include <cmath>
#include <cstdint>
#include <vector>

#include "aima/core/parallel.hpp"
#include "aima/core/rng.hpp"
#include "aima/nn/param.hpp"

namespace aima {

template <class S>
struct Linear {
    Mat<S> w, b;    // w: (din, dout); b: (1, dout)
    Mat<S> gw, gb;
    bool has_bias = true;

    void init(int din, int dout, Rng& rng, bool bias = true, double stddev = 0.02) {
        has_bias = bias;
        w.resize(din, dout);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = S(rng.trunc_normal(stddev));
        gw.setZero(din, dout);
        if (has_bias) {
            b.setZero(1, dout);
            gb.setZero(1, dout);
        }
    }

    void reg(ParamRegistry<S>& r, const std::string& prefix) {
        r.add(prefix + ".w", w, gw);
        if (has_bias) r.add(prefix + ".b", b, gb);
    }

    void forward(const Mat<S>& x, Mat<S>& y) const {
        matmul<S>(x, w, y);
        if (has_bias) y.rowwise() += b.row(0);
    }

    /// Accumulates weight grads; writes (or accumulates into) dx.
    void backward(const Mat<S>& x, const Mat<S>& dy, Mat<S>& dx, bool accumulate_dx = false) {
        matmul_tn<S>(x, dy, gw, /*accumulate=*/true);
        if (has_bias) gb.row(0) += dy.colwise().sum();
        matmul_nt<S>(dy, w, dx, accumulate_dx);
    }

    /// Weight-grad-only variant for inputs that need no gradient.
    void backward_params_only(const Mat<S>& x, const Mat<S>& dy) {
        matmul_tn<S>(x, dy, gw, /*accumulate=*/true);
        if (has_bias) gb.row(0) += dy.colwise().sum();
    }
};

template <class S>
struct LayerNorm {
    Mat<S> gamma, beta, ggamma, gbeta;  // (1, d)
    S eps = S(1e-5);

    struct Cache {
        Mat<S> xhat;  // (n, d)
        Mat<S> rstd;  // (n, 1)
    };

    void init(int d) {
        gamma.setOnes(1, d);
        beta.setZero(1, d);
        ggamma.setZero(1, d);
        gbeta.setZero(1, d);
    }

    void reg(ParamRegistry<S>& r, const std::string& prefix) {
        r.add(prefix + ".g", gamma, ggamma);
        r.add(prefix + ".b", beta, gbeta);
    }

    void forward(const Mat<S>& x, Mat<S>& y, Cache& c) const {
        const Eigen::Index n = x.rows(), d = x.cols();
        c.xhat.resize(n, d);
        c.rstd.resize(n, 1);
        y.resize(n, d);
        parallel_for(n, [&](std::int64_t i) {
            S mu = x.row(i).mean();
            S var = (x.row(i).array() - mu).square().mean();
            S rstd = S(1) / std::sqrt(var + eps);
            c.rstd(i, 0) = rstd;
            c.xhat.row(i) = (x.row(i).array() - mu) * rstd;
            y.row(i) = c.xhat.row(i).cwiseProduct(gamma.row(0)) + beta.row(0);
        });
    }

    /// Recomputes the forward output from the cache (saves storing it).
    void output_from_cache(const Cache& c, Mat<S>& y) const {
        y.resize(c.xhat.rows(), c.xhat.cols());
        parallel_for(c.xhat.rows(), [&](std::int64_t i) {
            y.row(i) = c.xhat.row(i).cwiseProduct(gamma.row(0)) + beta.row(0);
        });
    }

    void backward(const Cache& c, const Mat<S>& dy, Mat<S>& dx, bool accumulate_dx = false) {
        const Eigen::Index n = dy.rows(), d = dy.cols();
        if (!accumulate_dx) dx.setZero(n, d);
        // Parameter grads: column reductions, computed serially per column
        // block for determinism.
        ggamma.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
        gbeta.row(0) += dy.colwise().sum();
        parallel_for(n, [&](std::int64_t i) {
            RowVec<S> dyg = dy.row(i).cwiseProduct(gamma.row(0));
            S m1 = dyg.mean();
            S m2 = dyg.cwiseProduct(c.xhat.row(i)).mean();
            dx.row(i) += ((dyg.array() - m1 - c.xhat.row(i).array() * m2) * c.rstd(i, 0)).matrix();
        });
        (void)d;
    }
};

/// x * sigmoid(1.702 x): the CLIP-style quick GELU.
template <class S>
struct QuickGelu {
    struct Cache {
        Mat<S> x;
    };

    static void forward(const Mat<S>& x, Mat<S>& y, Cache& c) {
        c.x = x;
        y.resize(x.rows(), x.cols());
        parallel_for(x.rows(), [&](std::int64_t i) {
            y.row(i) = x.row(i).array() * (S(1) / (S(1) + (-S(1.702) * x.row(i).array()).exp()));
        });
    }

    static void output_from_cache(const Cache& c, Mat<S>& y) {
        Cache tmp;
        forward(c.x, y, tmp);
    }

    static void backward(const Cache& c, const Mat<S>& dy, Mat<S>& dx) {
        dx.resize(dy.rows(), dy.cols());
        parallel_for(dy.rows(), [&](std::int64_t i) {
            auto x = c.x.row(i).array();
            auto s = S(1) / (S(1) + (-S(1.702) * x).exp());
            dx.row(i) = (dy.row(i).array() * (s + S(1.702) * x * s * (S(1) - s))).matrix();
        });
    }
};

template <class S>
struct Embedding {
    Mat<S> table, gtable;  // (V, d)

    void init(int vocab, int d, Rng& rng, double stddev = 0.02) {
        table.resize(vocab, d);
        for (Eigen::Index i = 0; i < table.size(); ++i) table.data()[i] = S(rng.trunc_normal(stddev));
        gtable.setZero(vocab, d);
    }

    void reg(ParamRegistry<S>& r, const std::string& prefix) { r.add(prefix, table, gtable); }

    void forward(const std::vector<std::int32_t>& ids, Mat<S>& y) const {
        for (auto id : ids)
            if (id < 0 || id >= table.rows())
                throw ValidationError("embedding id out of range: " + std::to_string(id));
        y.resize(Eigen::Index(ids.size()), table.cols());
        parallel_for(Eigen::Index(ids.size()), [&](std::int64_t i) { y.row(i) = table.row(ids[std::size_t(i)]); });
    }

    void backward(const std::vector<std::int32_t>& ids, const Mat<S>& dy) {
        // Serial scatter-add: vocabulary rows may repeat across positions.
        for (Eigen::Index i = 0; i < Eigen::Index(ids.size()); ++i) gtable.row(ids[std::size_t(i)]) += dy.row(i);
    }
};

/// Numerically stable row softmax in place; rows with `valid < cols` treat
/// the tail as masked (probability zero).
template <class S>
inline void softmax_row_inplace(Eigen::Ref<RowVec<S>> row, Eigen::Index valid) {
    S m = row.head(valid).maxCoeff();
    row.head(valid) = (row.head(valid).array() - m).exp();
    S z = row.head(valid).sum();
    row.head(valid) /= z;
    if (valid < row.cols()) row.tail(row.cols() - valid).setZero();
}

}  // namespace aima
