#pragma once

// Multi-head attention, both self (one stream, optional causal/padding
// masks) and cross (text queries over image keys/values). Scaling uses the
// per-head dimension. Batch samples are processed in parallel; every
// output slot is written by exactly one thread.

#include <cmath>
#include <vector>

#include "aima/nn/ops.hpp"

namespace aima {

template <class S>
struct AttentionCache {
    Mat<S> q, k, v;    // projected, (B*Lq, d) / (B*Lk, d)
    Mat<S> probs;      // (B*heads*Lq, Lk) post-softmax
    Mat<S> ctx;        // (B*Lq, d) pre-output-projection
    int B = 0, Lq = 0, Lk = 0;
    std::vector<int> k_lens;  // empty = all key positions valid
    bool causal = false;
};

template <class S>
struct MultiheadAttention {
    int dim = 0, heads = 0;
    Linear<S> wq, wk, wv, wo;

    void init(int d, int h, Rng& rng) {
        if (d % h != 0) throw ConfigError("attention: heads must divide dim");
        dim = d;
        heads = h;
        wq.init(d, d, rng);
        wk.init(d, d, rng);
        wv.init(d, d, rng);
        wo.init(d, d, rng);
    }

    void reg(ParamRegistry<S>& r, const std::string& prefix) {
        wq.reg(r, prefix + ".q");
        wk.reg(r, prefix + ".k");
        wv.reg(r, prefix + ".v");
        wo.reg(r, prefix + ".o");
    }

    /// xq: (B*Lq, d) query stream; xkv: (B*Lk, d) key/value stream (same
    /// matrix for self-attention). k_lens masks padded keys; causal
    /// additionally hides future keys (self-attention only).
    void forward(const Mat<S>& xq, const Mat<S>& xkv, int B, int Lq, int Lk,
                 const std::vector<int>& k_lens, bool causal, Mat<S>& y, AttentionCache<S>& c) const {
        const int dh = dim / heads;
        const S scale = S(1) / std::sqrt(S(dh));
        c.B = B;
        c.Lq = Lq;
        c.Lk = Lk;
        c.k_lens = k_lens;
        c.causal = causal;
        wq.forward(xq, c.q);
        wk.forward(xkv, c.k);
        wv.forward(xkv, c.v);
        c.probs.resize(Eigen::Index(B) * heads * Lq, Lk);
        c.ctx.resize(Eigen::Index(B) * Lq, dim);
        parallel_for(B, [&](std::int64_t b) {
            const int valid_k = k_lens.empty() ? Lk : k_lens[std::size_t(b)];
            Mat<S> scores(Lq, Lk);
            for (int h = 0; h < heads; ++h) {
                auto qb = c.q.block(b * Lq, h * dh, Lq, dh);
                auto kb = c.k.block(b * Lk, h * dh, Lk, dh);
                auto vb = c.v.block(b * Lk, h * dh, Lk, dh);
                scores.noalias() = qb * kb.transpose();
                scores *= scale;
                auto pb = c.probs.block((b * heads + h) * Lq, 0, Lq, Lk);
                for (int i = 0; i < Lq; ++i) {
                    int valid = causal ? std::min(valid_k, i + 1) : valid_k;
                    auto row = scores.row(i).head(valid);
                    S m = row.maxCoeff();
                    row = (row.array() - m).exp();
                    row /= row.sum();
                    pb.row(i).head(valid) = row;
                    if (valid < Lk) pb.row(i).tail(Lk - valid).setZero();
                }
                c.ctx.block(b * Lq, h * dh, Lq, dh).noalias() = pb * vb;
            }
        });
        wo.forward(c.ctx, y);
    }

    /// Inputs are passed back in (callers recompute them from upstream
    /// caches). dxq / dxkv accumulate; pass the same matrix twice for
    /// self-attention.
    void backward(AttentionCache<S>& c, const Mat<S>& xq, const Mat<S>& xkv, const Mat<S>& dy,
                  Mat<S>& dxq, Mat<S>& dxkv) {
        const int dh = dim / heads;
        const S scale = S(1) / std::sqrt(S(dh));
        Mat<S> dctx;
        wo.backward(c.ctx, dy, dctx);
        Mat<S> dq = Mat<S>::Zero(c.q.rows(), c.q.cols());
        Mat<S> dk = Mat<S>::Zero(c.k.rows(), c.k.cols());
        Mat<S> dv = Mat<S>::Zero(c.v.rows(), c.v.cols());
        parallel_for(c.B, [&](std::int64_t b) {
            Mat<S> dprob(c.Lq, c.Lk), dscore(c.Lq, c.Lk);
            for (int h = 0; h < heads; ++h) {
                auto qb = c.q.block(b * c.Lq, h * dh, c.Lq, dh);
                auto kb = c.k.block(b * c.Lk, h * dh, c.Lk, dh);
                auto vb = c.v.block(b * c.Lk, h * dh, c.Lk, dh);
                auto pb = c.probs.block((b * heads + h) * c.Lq, 0, c.Lq, c.Lk);
                auto dctxb = dctx.block(b * c.Lq, h * dh, c.Lq, dh);
                dprob.noalias() = dctxb * vb.transpose();
                dv.block(b * c.Lk, h * dh, c.Lk, dh).noalias() += pb.transpose() * dctxb;
                // Softmax backward; masked entries have p == 0 so they
                // contribute nothing.
                for (int i = 0; i < c.Lq; ++i) {
                    S dot = pb.row(i).cwiseProduct(dprob.row(i)).sum();
                    dscore.row(i) = (pb.row(i).array() * (dprob.row(i).array() - dot)).matrix();
                }
                dscore *= scale;
                dq.block(b * c.Lq, h * dh, c.Lq, dh).noalias() += dscore * kb;
                dk.block(b * c.Lk, h * dh, c.Lk, dh).noalias() += dscore.transpose() * qb;
            }
        });
        wq.backward(xq, dq, dxq, /*accumulate_dx=*/true);
        wk.backward(xkv, dk, dxkv, /*accumulate_dx=*/true);
        wv.backward(xkv, dv, dxkv, /*accumulate_dx=*/true);
    }
};

/// Bare scaled-dot-product cross attention over already-projected inputs.
/// Reference surface for oracle tests; the module above fuses this with
/// the QKV/output projections.
template <class S>
inline Mat<S> scaled_dot_attention(const Mat<S>& q, const Mat<S>& k, const Mat<S>& v, int heads) {
    const int d = int(q.cols());
    if (d % heads != 0) throw ConfigError("scaled_dot_attention: heads must divide dim");
    if (k.rows() != v.rows() || k.cols() != d || v.cols() != d)
        throw ConfigError("scaled_dot_attention: shape mismatch");
    const int dh = d / heads;
    const S scale = S(1) / std::sqrt(S(dh));
    Mat<S> out(q.rows(), d);
    for (int h = 0; h < heads; ++h) {
        Mat<S> scores = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() * scale;
        for (Eigen::Index i = 0; i < scores.rows(); ++i)
            softmax_row_inplace<S>(scores.row(i), scores.cols());
        out.middleCols(h * dh, dh).noalias() = scores * v.middleCols(h * dh, dh);
    }
    return out;
}

}  // namespace aima
