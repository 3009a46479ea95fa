// Named trainable tensors with gradient accumulators, in registration order.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "spanproto/error.hpp"
#include "spanproto/mat.hpp"

namespace spanproto {

struct Param {
  std::string name;
  Mat value;
  Mat grad;
};

class ParameterRegistry {
 public:
  int add(const std::string& name, int rows, int cols) {
    if (index_.count(name) != 0) throw ConfigError("duplicate parameter name: " + name);
    index_[name] = static_cast<int>(params_.size());
    params_.push_back({name, Mat(rows, cols), Mat(rows, cols)});
    return static_cast<int>(params_.size()) - 1;
  }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  Param& at(int i) { return params_[static_cast<size_t>(i)]; }
  const Param& at(int i) const { return params_[static_cast<size_t>(i)]; }

  Param& at(const std::string& name) {
    const int i = index_of(name);
    if (i < 0) throw ConfigError("unknown parameter: " + name);
    return at(i);
  }
  const Param& at(const std::string& name) const {
    const int i = index_of(name);
    if (i < 0) throw ConfigError("unknown parameter: " + name);
    return at(i);
  }

  int size() const { return static_cast<int>(params_.size()); }

  void zero_grads() {
    for (Param& p : params_) p.grad.fill(0.0);
  }

  size_t scalar_count() const {
    size_t n = 0;
    for (const Param& p : params_) n += p.value.size();
    return n;
  }

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace spanproto
