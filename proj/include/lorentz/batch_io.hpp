#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lorentz/extended_real.hpp"
#include "lorentz/sampler.hpp"

namespace lorentz {

// CSV: two '#' comment lines describing the batch, a column header
// x1,...,xn, then one sample per line.
inline void write_batch_csv(std::ostream& out, const SampleBatch& batch) {
  out << "# q=" << batch.params.q.to_string() << " p=" << detail::format_double(batch.params.p)
      << " n=" << batch.params.n << " normalization=" << to_string(batch.params.normalization)
      << " generator=" << to_string(batch.generator) << " count=" << batch.count << '\n';
  out << "# seed=" << batch.rng.master_seed << " stream=" << batch.rng.stream_id
      << " scale=" << detail::format_double(batch.scale);
  if (batch.acceptance_rate) out << " acceptance_rate=" << detail::format_double(*batch.acceptance_rate);
  out << '\n';
  for (std::size_t k = 0; k < batch.params.n; ++k) out << (k ? "," : "") << 'x' << (k + 1);
  out << '\n';
  for (std::size_t i = 0; i < batch.count; ++i) {
    const auto row = batch.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << detail::format_double(row[k]);
    out << '\n';
  }
}

/*
 * Binary layout (all integers and doubles little-endian):
 *
 *   offset  size  field
 *   0       5     magic "LORB1"
 *   5       1     q_is_infinite (0/1)
 *   6       1     normalization (0 unit, 1 tilde, 2 vol)
 *   7       1     generator (0 exact, 1 rejection, 2 weyl)
 *   8       8     u64 n
 *   16      8     u64 count
 *   24      8     u64 master_seed
 *   32      8     u64 stream_id
 *   40      8     f64 q (0 when infinite)
 *   48      8     f64 p
 *   56      8     f64 scale
 *   64      8*count*n  f64 samples, row-major
 */
inline constexpr std::array<char, 5> kBatchMagic{'L', 'O', 'R', 'B', '1'};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated LORB1 stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace detail

inline void write_batch_binary(std::ostream& out, const SampleBatch& batch) {
  out.write(kBatchMagic.data(), kBatchMagic.size());
  const char flags[3] = {static_cast<char>(batch.params.q.is_infinite() ? 1 : 0),
                         static_cast<char>(batch.params.normalization),
                         static_cast<char>(batch.generator)};
  out.write(flags, 3);
  detail::put_u64(out, batch.params.n);
  detail::put_u64(out, batch.count);
  detail::put_u64(out, batch.rng.master_seed);
  detail::put_u64(out, batch.rng.stream_id);
  detail::put_f64(out, batch.params.q.is_infinite() ? 0.0 : batch.params.q.value());
  detail::put_f64(out, batch.params.p);
  detail::put_f64(out, batch.scale);
  for (double v : batch.data) detail::put_f64(out, v);
}

inline SampleBatch read_batch_binary(std::istream& in) {
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kBatchMagic)
    throw std::runtime_error("not a LORB1 stream");
  char flags[3];
  if (!in.read(flags, 3)) throw std::runtime_error("truncated LORB1 stream");
  if (flags[1] < 0 || flags[1] > 2 || flags[2] < 0 || flags[2] > 2)
    throw std::runtime_error("corrupt LORB1 header");
  SampleBatch b;
  b.params.normalization = static_cast<Normalization>(flags[1]);
  b.generator = static_cast<Generator>(flags[2]);
  b.params.n = detail::get_u64(in);
  b.count = detail::get_u64(in);
  b.rng.master_seed = detail::get_u64(in);
  b.rng.stream_id = detail::get_u64(in);
  const double q = detail::get_f64(in);
  b.params.q = flags[0] ? QIndex::infinity() : QIndex::finite(q);
  b.params.p = detail::get_f64(in);
  b.scale = detail::get_f64(in);
  b.params.validate();
  b.data.resize(b.count * b.params.n);
  for (auto& v : b.data) v = detail::get_f64(in);
  return b;
}

}  // namespace lorentz
