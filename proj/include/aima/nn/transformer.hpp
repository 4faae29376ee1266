#pragma once

// Pre-norm transformer block: x += attn(ln1(x)); x += mlp(ln2(x)).
// Caches hold only what backward cannot cheaply recompute.

#include <vector>

#include "aima/nn/attention.hpp"
#include "aima/nn/ops.hpp"

namespace aima {

template <class S>
struct BlockCache {
    typename LayerNorm<S>::Cache ln1, ln2;
    AttentionCache<S> attn;
    Mat<S> x_mid;  // after the attention residual
    typename QuickGelu<S>::Cache gelu;  // holds the fc1 pre-activation
};

template <class S>
struct TransformerBlock {
    int dim = 0, heads = 0, mlp_hidden = 0;
    bool causal = false;
    LayerNorm<S> ln1, ln2;
    MultiheadAttention<S> attn;
    Linear<S> fc1, fc2;

    void init(int d, int h, int mlp_ratio, Rng& rng, bool causal_mask = false) {
        dim = d;
        heads = h;
        mlp_hidden = d * mlp_ratio;
        causal = causal_mask;
        ln1.init(d);
        attn.init(d, h, rng);
        ln2.init(d);
        fc1.init(d, mlp_hidden, rng);
        fc2.init(mlp_hidden, d, rng);
    }

    void reg(ParamRegistry<S>& r, const std::string& prefix) {
        ln1.reg(r, prefix + ".ln1");
        attn.reg(r, prefix + ".attn");
        ln2.reg(r, prefix + ".ln2");
        fc1.reg(r, prefix + ".mlp.fc1");
        fc2.reg(r, prefix + ".mlp.fc2");
    }

    void forward(const Mat<S>& x, int B, int L, const std::vector<int>& lens, Mat<S>& y, BlockCache<S>& c) const {
        Mat<S> ln1_out, attn_out;
        ln1.forward(x, ln1_out, c.ln1);
        attn.forward(ln1_out, ln1_out, B, L, L, lens, causal, attn_out, c.attn);
        c.x_mid = x + attn_out;
        Mat<S> ln2_out, h1, gelu_out, mlp_out;
        ln2.forward(c.x_mid, ln2_out, c.ln2);
        fc1.forward(ln2_out, h1);
        QuickGelu<S>::forward(h1, gelu_out, c.gelu);
        fc2.forward(gelu_out, mlp_out);
        y = c.x_mid + mlp_out;
    }

    void backward(BlockCache<S>& c, const Mat<S>& dy, Mat<S>& dx) {
        // MLP path.
        Mat<S> gelu_out, ln2_out;
        QuickGelu<S>::output_from_cache(c.gelu, gelu_out);
        ln2.output_from_cache(c.ln2, ln2_out);
        Mat<S> dgelu_out, dh1, dln2_out;
        fc2.backward(gelu_out, dy, dgelu_out);
        QuickGelu<S>::backward(c.gelu, dgelu_out, dh1);
        fc1.backward(ln2_out, dh1, dln2_out);
        Mat<S> dx_mid = dy;  // residual
        ln2.backward(c.ln2, dln2_out, dx_mid, /*accumulate_dx=*/true);
        // Attention path.
        Mat<S> ln1_out;
        ln1.output_from_cache(c.ln1, ln1_out);
        Mat<S> dln1_out = Mat<S>::Zero(dx_mid.rows(), dx_mid.cols());
        attn.backward(c.attn, ln1_out, ln1_out, dx_mid, dln1_out, dln1_out);
        dx = dx_mid;  // residual
        ln1.backward(c.ln1, dln1_out, dx, /*accumulate_dx=*/true);
    }
};

}  // namespace aima
