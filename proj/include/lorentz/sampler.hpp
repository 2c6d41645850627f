#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lorentz/extended_real.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/norms.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/volume.hpp"

namespace lorentz {

enum class Generator { Exact, Rejection, WeylChamber };

inline std::string_view to_string(Generator g) {
  switch (g) {
    case Generator::Exact: return "exact";
    case Generator::Rejection: return "rejection";
    case Generator::WeylChamber: return "weyl";
  }
  return "exact";
}

inline Generator parse_generator(std::string_view s) {
  if (s == "exact") return Generator::Exact;
  if (s == "rejection") return Generator::Rejection;
  if (s == "weyl") return Generator::WeylChamber;
  throw std::invalid_argument("unknown generator '" + std::string(s) + "'");
}

/// count x n matrix of draws, row-major.
struct SampleBatch {
  BallParams params;
  std::size_t count = 0;
  std::vector<double> data;
  RngStreamSpec rng;
  Generator generator = Generator::Exact;
  double scale = 1.0;
  // Fraction of accepted box proposals (rejection oracle only).
  std::optional<double> acceptance_rate;

  std::size_t dim() const noexcept { return params.n; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * params.n, params.n}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * params.n, params.n}; }
};

/// Largest dimension the rejection oracle accepts; the acceptance rate
/// prod_j kappa_q(j)^{-1} decays super-exponentially in n.
inline constexpr std::size_t kRejectionMaxDim = 12;

// Raw ingredients of one ordered (Weyl chamber) draw.
struct WeylDraw {
  std::vector<double> exponentials;  // E_1..E_{n+1}
  std::vector<double> suffix;        // S_k = sum_{j>=k} E_j / kappa_q(j), k = 1..n
  double total = 0.0;                // T = sum_{j<=n+1} E_j
};

/// Per-row generator for the exponential-spacings representation.
///
/// Variates are consumed in a fixed order per row; a row is a pure
/// function of (seed, stream, row index):
///   exact rows: ceil(n/64) words of sign bits (bit i%64 of word i/64 set means
///               negative), then n-1 Fisher-Yates draws (i = n-1 .. 1, index
///               below(i+1)), then E_1..E_{n+1};
///   ordered rows: E_1..E_{n+1} only.
class RowSampler {
 public:
  RowSampler(const BallParams& params, const KappaTable& table)
      : n_(params.n), inv_kappa_(params.n) {
    params.validate();
    if (params.p != 1.0) throw std::domain_error("exact sampling is only available for p = 1");
    if (table.size() < n_ || !(table.q() == params.q))
      throw std::invalid_argument("kappa table does not match the ball parameters");
    for (std::size_t j = 0; j < n_; ++j) inv_kappa_[j] = 1.0 / table.values()[j];
    scale_ = normalization_scale(params, &table);
  }

  std::size_t dim() const noexcept { return n_; }
  double scale() const noexcept { return scale_; }

  // Suffix sums and T for one row; `suffix` must have length n.
  double draw_suffix(StreamRng& rng, std::span<double> suffix) const {
    double e_sum = 0.0;
    // E_j is stored in suffix[j-1] first, then overwritten by the backward pass.
    for (std::size_t j = 0; j < n_; ++j) {
      suffix[j] = rng.exponential();
      e_sum += suffix[j];
    }
    const double e_last = rng.exponential();
    double acc = 0.0;
    for (std::size_t k = n_; k-- > 0;) {
      acc += suffix[k] * inv_kappa_[k];
      suffix[k] = acc;
    }
    return e_sum + e_last;
  }

  // Ordered nonnegative representative x_1 >= ... >= x_n >= 0, scaled.
  void ordered_row(StreamRng& rng, std::span<double> out) const {
    const double total = draw_suffix(rng, out);
    const double f = scale_ / total;
    for (double& v : out) v *= f;
  }

  // Uniform draw on the (scaled) ball.
  void exact_row(StreamRng& rng, std::span<double> out, std::vector<double>& suffix,
                 std::vector<std::uint32_t>& perm) const {
    const std::size_t words = (n_ + 63) / 64;
    std::uint64_t sign_words_small[4];
    std::vector<std::uint64_t> sign_words_big;
    std::uint64_t* signs = sign_words_small;
    if (words > 4) {
      sign_words_big.resize(words);
      signs = sign_words_big.data();
    }
    for (std::size_t w = 0; w < words; ++w) signs[w] = rng();

    perm.resize(n_);
    std::iota(perm.begin(), perm.end(), std::uint32_t{0});
    for (std::size_t i = n_; i-- > 1;) {
      const auto j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(perm[i], perm[j]);
    }

    suffix.resize(n_);
    const double total = draw_suffix(rng, suffix);
    const double f = scale_ / total;
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = suffix[perm[i]] * f;
      out[i] = ((signs[i / 64] >> (i % 64)) & 1u) ? -v : v;
    }
  }

  // Same stream consumption as ordered_row, but keeps every intermediate.
  WeylDraw ordered_draw_detail(StreamRng& rng) const {
    WeylDraw d;
    d.exponentials.resize(n_ + 1);
    for (auto& e : d.exponentials) e = rng.exponential();
    d.suffix.resize(n_);
    double acc = 0.0;
    for (std::size_t k = n_; k-- > 0;) {
      acc += d.exponentials[k] * inv_kappa_[k];
      d.suffix[k] = acc;
    }
    for (double e : d.exponentials) d.total += e;
    return d;
  }

 private:
  std::size_t n_;
  std::vector<double> inv_kappa_;
  double scale_ = 1.0;
};

namespace detail {

inline void check_sampler_params(const BallParams& params, std::size_t count) {
  params.validate();
  if (count == 0) throw std::domain_error("count must be >= 1");
  if (params.p != 1.0) throw std::domain_error("exact sampling is only available for p = 1");
}

}  // namespace detail

/// count i.i.d. uniform draws from the normalized ball via the exponential
/// spacings representation. O(n) per row.
inline SampleBatch sample_exact(const BallParams& params, std::size_t count, const RngStreamSpec& rng,
                                unsigned workers = default_workers()) {
  detail::check_sampler_params(params, count);
  const KappaTable table(params.q, params.n);
  const RowSampler sampler(params, table);
  SampleBatch batch{params, count, std::vector<double>(count * params.n), rng, Generator::Exact,
                    sampler.scale(), std::nullopt};
  parallel_for(count, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> suffix;
    std::vector<std::uint32_t> perm;
    for (std::size_t i = begin; i < end; ++i) {
      StreamRng gen(rng, i);
      sampler.exact_row(gen, batch.row(i), suffix, perm);
    }
  });
  return batch;
}

/// Ordered representatives: rows are non-increasing and nonnegative.
inline SampleBatch sample_weyl_chamber(const BallParams& params, std::size_t count,
                                       const RngStreamSpec& rng, unsigned workers = default_workers()) {
  detail::check_sampler_params(params, count);
  const KappaTable table(params.q, params.n);
  const RowSampler sampler(params, table);
  SampleBatch batch{params, count, std::vector<double>(count * params.n), rng, Generator::WeylChamber,
                    sampler.scale(), std::nullopt};
  parallel_for(count, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      StreamRng gen(rng, i);
      sampler.ordered_row(gen, batch.row(i));
    }
  });
  return batch;
}

/// Independent oracle: uniform proposals in [-1,1]^n accepted iff the Lorentz
/// norm is at most 1 (the ball sits inside the cube since kappa_q(1) = 1).
inline SampleBatch sample_rejection_oracle(const BallParams& params, std::size_t count,
                                           const RngStreamSpec& rng,
                                           unsigned workers = default_workers()) {
  detail::check_sampler_params(params, count);
  if (params.n > kRejectionMaxDim)
    throw std::domain_error("rejection oracle supports n <= " + std::to_string(kRejectionMaxDim) +
                            ", got n = " + std::to_string(params.n));
  const std::vector<double> weights = lorentz_weights(params.q, params.n);
  const double scale = normalization_scale(params);
  SampleBatch batch{params, count, std::vector<double>(count * params.n), rng, Generator::Rejection,
                    scale, std::nullopt};
  std::vector<std::uint64_t> trials(count, 0);
  parallel_for(count, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(params.n);
    for (std::size_t i = begin; i < end; ++i) {
      StreamRng gen(rng, i);
      std::uint64_t t = 0;
      do {
        ++t;
        for (auto& v : x) v = gen.uniform_signed();
      } while (lorentz_norm(x, weights) > 1.0);
      auto out = batch.row(i);
      for (std::size_t k = 0; k < params.n; ++k) out[k] = scale * x[k];
      trials[i] = t;
    }
  });
  const double total = static_cast<double>(std::accumulate(trials.begin(), trials.end(), std::uint64_t{0}));
  batch.acceptance_rate = static_cast<double>(count) / total;
  return batch;
}

/// Fraction of `trials` uniform cube proposals that land in B_{q,1}^n. The
/// expected value is vol / 2^n = prod_j kappa_q(j)^{-1}.
inline double rejection_acceptance_rate(QIndex q, std::size_t n, std::uint64_t trials,
                                        const RngStreamSpec& rng, unsigned workers = default_workers()) {
  if (n == 0 || n > kRejectionMaxDim) throw std::domain_error("rejection oracle supports 1 <= n <= 12");
  if (trials == 0) throw std::domain_error("trials must be >= 1");
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  const std::vector<double> weights = lorentz_weights(q, n);
  std::vector<std::uint64_t> accepted(blocks, 0);
  parallel_for(blocks, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(n);
    for (std::size_t b = begin; b < end; ++b) {
      StreamRng gen(rng, b);
      const std::uint64_t m = std::min<std::uint64_t>(kBlock, trials - b * kBlock);
      std::uint64_t acc = 0;
      for (std::uint64_t t = 0; t < m; ++t) {
        for (auto& v : x) v = gen.uniform_signed();
        if (lorentz_norm(x, weights) <= 1.0) ++acc;
      }
      accepted[b] = acc;
    }
  });
  const auto hits = std::accumulate(accepted.begin(), accepted.end(), std::uint64_t{0});
  return static_cast<double>(hits) / static_cast<double>(trials);
}

/// Upper-triangular matrix whose columns, applied to 0 and e_1..e_n, give the
/// vertices of B_{q,1}^n intersected with the Weyl chamber.
struct VertexMatrix {
  std::size_t n = 0;
  std::vector<double> entries;  // row-major n x n

  double operator()(std::size_t row, std::size_t col) const { return entries[row * n + col]; }

  // log det = -sum_j log kappa_q(j)
  double log_determinant() const {
    CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j) s += std::log((*this)(j, j));
    return s.value();
  }
};

inline VertexMatrix vertex_matrix(QIndex q, std::size_t n) {
  const KappaTable table(q, n);
  VertexMatrix m{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t col = 0; col < n; ++col) {
    const double v = 1.0 / table.values()[col];
    for (std::size_t row = 0; row <= col; ++row) m.entries[row * n + col] = v;
  }
  return m;
}

}  // namespace lorentz
