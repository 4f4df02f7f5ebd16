#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rsir/backbone.hpp"
#include "rsir/retrieval.hpp"

namespace stub {

/// Model whose scores come from a caller-supplied function of the context.
class FnModel final : public rsir::Model {
 public:
  using Fn = std::function<void(std::span<const rsir::ItemIndex>, std::span<double>)>;
  FnModel(std::size_t n, Fn fn) : n_(n), fn_(std::move(fn)) {}
  rsir::BackboneKind kind() const override { return rsir::BackboneKind::Markov; }
  std::size_t num_items() const override { return n_; }
  using Model::score_context;
  void score_context(std::span<const rsir::ItemIndex> ctx, std::span<double> out) const override { fn_(ctx, out); }
  std::unique_ptr<rsir::Model> clone() const override { return std::make_unique<FnModel>(*this); }

 private:
  std::size_t n_;
  Fn fn_;
};

/// Scores item (last + 1) mod n highest, the rest by descending index.
inline FnModel next_item_model(std::size_t n) {
  return FnModel(n, [n](std::span<const rsir::ItemIndex> ctx, std::span<double> out) {
    for (std::size_t v = 0; v < n; ++v) out[v] = -double(v);
    if (!ctx.empty()) out[(ctx.back() + 1) % n] = 1.0;
  });
}

/// Fixed decision regardless of the state.
class ConstChecker final : public rsir::FidelityChecker {
 public:
  explicit ConstChecker(bool verdict) : verdict_(verdict) {}
  bool accept(const rsir::Model&, std::span<const rsir::ItemIndex>, std::span<const rsir::ItemIndex>,
              std::size_t) const override {
    return verdict_;
  }
  std::string name() const override { return verdict_ ? "accept" : "reject"; }

 private:
  bool verdict_;
};

/// Accepts with probability 1/2 per step: the decision is one bit of a hash
/// of the full context, so every new step is a fresh coin.
class CoinChecker final : public rsir::FidelityChecker {
 public:
  explicit CoinChecker(std::uint64_t salt) : salt_(salt) {}
  bool accept(const rsir::Model&, std::span<const rsir::ItemIndex> ctx, std::span<const rsir::ItemIndex>,
              std::size_t) const override {
    std::uint64_t h = salt_ ^ 0x9E3779B97F4A7C15ULL;
    for (auto v : ctx) {
      h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      h *= 0xBF58476D1CE4E5B9ULL;
      h ^= h >> 31;
    }
    h ^= ctx.size() * 0x94D049BB133111EBULL;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 29;
    return (h >> 40) & 1;
  }
  std::string name() const override { return "coin"; }

 private:
  std::uint64_t salt_;
};

}  // namespace stub
