#pragma once

// The two unimodal encoders. Both project every position into the joint
// space with the tower's projection; global features are single rows of
// that projected sequence ([CLS] for images, [EOS] for text).

#include <vector>

#include "aima/data/tokenizer.hpp"
#include "aima/model/config.hpp"
#include "aima/nn/transformer.hpp"

namespace aima {

template <class S>
struct VisionCache {
    Mat<S> patches;  // (B*N, P*P*3)
    std::vector<BlockCache<S>> blocks;
    typename LayerNorm<S>::Cache ln_post;
    int B = 0;
};

template <class S>
struct VisionTower {
    int dim = 0, n_patches = 0, seq = 0;
    Linear<S> patch_embed;
    Mat<S> cls, gcls;  // (1, dim)
    Mat<S> pos, gpos;  // (N+1, dim)
    std::vector<TransformerBlock<S>> blocks;
    LayerNorm<S> ln_post;
    Linear<S> proj;  // dim -> joint, no bias

    void init(const ModelConfig& cfg, Rng& rng) {
        dim = cfg.img_dim;
        n_patches = cfg.num_patches();
        seq = n_patches + 1;
        patch_embed.init(cfg.patch_features(), dim, rng);
        cls.resize(1, dim);
        for (Eigen::Index i = 0; i < cls.size(); ++i) cls.data()[i] = S(rng.trunc_normal(0.02));
        gcls.setZero(1, dim);
        pos.resize(seq, dim);
        for (Eigen::Index i = 0; i < pos.size(); ++i) pos.data()[i] = S(rng.trunc_normal(0.02));
        gpos.setZero(seq, dim);
        blocks.resize(std::size_t(cfg.img_layers));
        for (auto& b : blocks) b.init(dim, cfg.img_heads, cfg.mlp_ratio, rng);
        ln_post.init(dim);
        proj.init(dim, cfg.joint_dim, rng, /*bias=*/false);
    }

    void reg(ParamRegistry<S>& r, const std::string& p) {
        patch_embed.reg(r, p + ".patch_embed");
        r.add(p + ".cls", cls, gcls);
        r.add(p + ".pos", pos, gpos);
        for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].reg(r, p + ".block" + std::to_string(i));
        ln_post.reg(r, p + ".ln_post");
        proj.reg(r, p + ".proj");
    }

    /// patches: (B*N, P*P*3) -> H: (B*(N+1), joint). Row b*(N+1) is [CLS].
    void forward(const Mat<S>& patches, int B, Mat<S>& H, VisionCache<S>& c) const {
        if (patches.rows() != Eigen::Index(B) * n_patches || patches.cols() != patch_embed.w.rows())
            throw ValidationError("vision tower: patch tensor shape mismatch");
        c.patches = patches;
        c.B = B;
        Mat<S> emb;
        patch_embed.forward(patches, emb);
        Mat<S> x(Eigen::Index(B) * seq, dim);
        parallel_for(B, [&](std::int64_t b) {
            x.row(b * seq) = cls.row(0) + pos.row(0);
            x.block(b * seq + 1, 0, n_patches, dim) = emb.block(b * n_patches, 0, n_patches, dim) + pos.middleRows(1, n_patches);
        });
        c.blocks.resize(blocks.size());
        static const std::vector<int> no_mask;
        for (std::size_t l = 0; l < blocks.size(); ++l) {
            Mat<S> y;
            blocks[l].forward(x, B, seq, no_mask, y, c.blocks[l]);
            x = std::move(y);
        }
        Mat<S> ln_out;
        ln_post.forward(x, ln_out, c.ln_post);
        proj.forward(ln_out, H);
    }

    void backward(VisionCache<S>& c, const Mat<S>& dH) {
        Mat<S> ln_out;
        ln_post.output_from_cache(c.ln_post, ln_out);
        Mat<S> dln_out;
        proj.backward(ln_out, dH, dln_out);
        Mat<S> dx;
        dx.setZero(dln_out.rows(), dln_out.cols());
        ln_post.backward(c.ln_post, dln_out, dx, /*accumulate_dx=*/true);
        for (std::size_t l = blocks.size(); l-- > 0;) {
            Mat<S> dx_prev;
            blocks[l].backward(c.blocks[l], dx, dx_prev);
            dx = std::move(dx_prev);
        }
        // Distribute dx0 into cls / pos / patch embedding.
        const int B = c.B;
        Mat<S> demb(Eigen::Index(B) * n_patches, dim);
        for (int b = 0; b < B; ++b) {
            gcls.row(0) += dx.row(Eigen::Index(b) * seq);
            demb.block(Eigen::Index(b) * n_patches, 0, n_patches, dim) = dx.block(Eigen::Index(b) * seq + 1, 0, n_patches, dim);
        }
        parallel_for(seq, [&](std::int64_t p) {
            for (int b = 0; b < B; ++b) gpos.row(p) += dx.row(Eigen::Index(b) * seq + p);
        });
        patch_embed.backward_params_only(c.patches, demb);
    }
};

template <class S>
struct TextCache {
    std::vector<std::int32_t> ids;
    std::vector<int> lens;
    std::vector<BlockCache<S>> blocks;
    std::vector<Mat<S>> xs;
    typename LayerNorm<S>::Cache ln_final;
    int B = 0, L = 0;
};

template <class S>
struct TextTower {
    int dim = 0;
    bool causal = false;
    Embedding<S> tok;
    Mat<S> pos, gpos;  // (max_len, dim)
    std::vector<TransformerBlock<S>> blocks;
    LayerNorm<S> ln_final;
    Linear<S> proj;  // dim -> joint, no bias

    void init(const ModelConfig& cfg, Rng& rng) {
        dim = cfg.txt_dim;
        causal = cfg.causal_text;
        tok.init(cfg.vocab_size, dim, rng);
        pos.resize(cfg.max_len, dim);
        for (Eigen::Index i = 0; i < pos.size(); ++i) pos.data()[i] = S(rng.trunc_normal(0.02));
        gpos.setZero(cfg.max_len, dim);
        blocks.resize(std::size_t(cfg.txt_layers));
        for (auto& b : blocks) b.init(dim, cfg.txt_heads, cfg.mlp_ratio, rng, causal);
        ln_final.init(dim);
        proj.init(dim, cfg.joint_dim, rng, /*bias=*/false);
    }

    void reg(ParamRegistry<S>& r, const std::string& p) {
        tok.reg(r, p + ".tok");
        r.add(p + ".pos", pos, gpos);
        for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].reg(r, p + ".block" + std::to_string(i));
        ln_final.reg(r, p + ".ln_final");
        proj.reg(r, p + ".proj");
    }

    /// ids: B*L flattened; lens: true length per sample (>= 2). Padding
    /// keys are masked out of attention, so any ids sitting in the padded
    /// region cannot influence valid positions.
    void forward(const std::vector<std::int32_t>& ids, int B, int L, const std::vector<int>& lens,
                 Mat<S>& H, TextCache<S>& c) const {
        if (Eigen::Index(ids.size()) != Eigen::Index(B) * L) throw ValidationError("text tower: ids size mismatch");
        if (L > pos.rows()) throw ValidationError("text tower: sequence longer than positional table");
        c.ids = ids;
        c.lens = lens;
        c.B = B;
        c.L = L;
        Mat<S> x;
        tok.forward(ids, x);
        parallel_for(B, [&](std::int64_t b) {
            x.block(b * L, 0, L, dim) += pos.topRows(L);
        });
        c.blocks.resize(blocks.size());
        c.xs.clear();
        for (std::size_t l = 0; l < blocks.size(); ++l) {
            Mat<S> y;
            c.xs.push_back(std::move(x));
            blocks[l].forward(c.xs.back(), B, L, lens, y, c.blocks[l]);
            x = std::move(y);
        }
        Mat<S> ln_out;
        ln_final.forward(x, ln_out, c.ln_final);
        proj.forward(ln_out, H);
    }

    void backward(TextCache<S>& c, const Mat<S>& dH) {
        Mat<S> ln_out;
        ln_final.output_from_cache(c.ln_final, ln_out);
        Mat<S> dln_out;
        proj.backward(ln_out, dH, dln_out);
        Mat<S> dx;
        dx.setZero(dln_out.rows(), dln_out.cols());
        ln_final.backward(c.ln_final, dln_out, dx, /*accumulate_dx=*/true);
        for (std::size_t l = blocks.size(); l-- > 0;) {
            Mat<S> dx_prev;
            blocks[l].backward(c.blocks[l], dx, dx_prev);
            dx = std::move(dx_prev);
        }
        parallel_for(c.L, [&](std::int64_t p) {
            for (int b = 0; b < c.B; ++b) gpos.row(p) += dx.row(Eigen::Index(b) * c.L + p);
        });
        tok.backward(c.ids, dx);
    }
};

}  // namespace aima
