#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aima/core/error.hpp"
#include "aima/core/parallel.hpp"

namespace aima {

/// Flat view over every trainable tensor in a model. Entries are appended
/// in construction order, which also fixes the initialization and
/// checkpoint ordering.
template <class S>
struct ParamRegistry {
    struct Entry {
        std::string name;
        Mat<S>* value;
        Mat<S>* grad;
    };
    std::vector<Entry> entries;

    void add(const std::string& name, Mat<S>& value, Mat<S>& grad) {
        grad.setZero(value.rows(), value.cols());
        entries.push_back({name, &value, &grad});
    }

    void zero_grads() {
        for (auto& e : entries) e.grad->setZero();
    }

    std::int64_t scalar_count() const {
        std::int64_t n = 0;
        for (const auto& e : entries) n += e.value->size();
        return n;
    }

    const Entry& find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return e;
        throw Error("parameter not found: " + name);
    }
};

}  // namespace aima
