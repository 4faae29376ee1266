#pragma once

#include <string>

#include "aima/core/error.hpp"
#include "aima/core/jsonio.hpp"

namespace aima {

/// Model shape. The "tiny" defaults train on a CPU in minutes; the fusion
/// stack stays at 512 wide, 8 heads, 1 cross-attention + 4 transformer
/// layers regardless of tower size.
struct ModelConfig {
    int image_h = 256, image_w = 128, patch = 16;
    int img_dim = 192, img_layers = 4, img_heads = 4;
    int txt_dim = 192, txt_layers = 4, txt_heads = 4;
    int joint_dim = 512;  // joint embedding size; the fusion encoder width
    int fusion_heads = 8, fusion_layers = 4;
    int mlp_ratio = 4;
    int max_len = 77;
    int vocab_size = 0;
    int num_identities = 0;
    bool causal_text = false;

    int patch_rows() const { return image_h / patch; }
    int patch_cols() const { return image_w / patch; }
    int num_patches() const { return patch_rows() * patch_cols(); }
    int patch_features() const { return patch * patch * 3; }

    void validate() const {
        if (image_h <= 0 || image_w <= 0 || patch <= 0) throw ConfigError("model: image/patch sizes must be positive");
        if (image_h % patch != 0 || image_w % patch != 0)
            throw ConfigError("model: image size must be divisible by patch size");
        if (img_dim <= 0 || txt_dim <= 0 || joint_dim <= 0) throw ConfigError("model: dims must be positive");
        if (img_dim % img_heads != 0 || txt_dim % txt_heads != 0 || joint_dim % fusion_heads != 0)
            throw ConfigError("model: heads must divide dims");
        if (max_len < 3) throw ConfigError("model: max_len too small");
        if (vocab_size < 6) throw ConfigError("model: vocab_size must cover reserved tokens");
        if (num_identities <= 0) throw ConfigError("model: num_identities must be positive");
    }

    Json to_json() const {
        return Json{{"image_h", image_h},       {"image_w", image_w},
                    {"patch", patch},           {"img_dim", img_dim},
                    {"img_layers", img_layers}, {"img_heads", img_heads},
                    {"txt_dim", txt_dim},       {"txt_layers", txt_layers},
                    {"txt_heads", txt_heads},   {"joint_dim", joint_dim},
                    {"fusion_heads", fusion_heads}, {"fusion_layers", fusion_layers},
                    {"mlp_ratio", mlp_ratio},   {"max_len", max_len},
                    {"vocab_size", vocab_size}, {"num_identities", num_identities},
                    {"causal_text", causal_text}};
    }

    static ModelConfig from_json(const Json& j) {
        ModelConfig c;
        c.image_h = j.value("image_h", c.image_h);
        c.image_w = j.value("image_w", c.image_w);
        c.patch = j.value("patch", c.patch);
        c.img_dim = j.value("img_dim", c.img_dim);
        c.img_layers = j.value("img_layers", c.img_layers);
        c.img_heads = j.value("img_heads", c.img_heads);
        c.txt_dim = j.value("txt_dim", c.txt_dim);
        c.txt_layers = j.value("txt_layers", c.txt_layers);
        c.txt_heads = j.value("txt_heads", c.txt_heads);
        c.joint_dim = j.value("joint_dim", c.joint_dim);
        c.fusion_heads = j.value("fusion_heads", c.fusion_heads);
        c.fusion_layers = j.value("fusion_layers", c.fusion_layers);
        c.mlp_ratio = j.value("mlp_ratio", c.mlp_ratio);
        c.max_len = j.value("max_len", c.max_len);
        c.vocab_size = j.value("vocab_size", c.vocab_size);
        c.num_identities = j.value("num_identities", c.num_identities);
        c.causal_text = j.value("causal_text", c.causal_text);
        return c;
    }

    /// Miniature shape for finite-difference probes.
    static ModelConfig probe() {
        ModelConfig c;
        c.image_h = 8;
        c.image_w = 8;
        c.patch = 4;
        c.img_dim = 8;
        c.img_layers = 1;
        c.img_heads = 2;
        c.txt_dim = 8;
        c.txt_layers = 1;
        c.txt_heads = 2;
        c.joint_dim = 16;
        c.fusion_heads = 2;
        c.fusion_layers = 2;
        c.mlp_ratio = 2;
        c.max_len = 8;
        c.vocab_size = 16;
        c.num_identities = 4;
        return c;
    }
};

}  // namespace aima
