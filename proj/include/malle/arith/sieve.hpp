#pragma once

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "../error.hpp"

namespace malle::arith {

/// Mobius, number of distinct prime factors and least prime factor for n <= N.
struct SieveTables {
  std::uint64_t N = 0;
  std::vector<std::int8_t> mu;
  std::vector<std::uint8_t> omega;
  std::vector<std::uint32_t> lpf;  // lpf[0] = lpf[1] = 0

  bool squarefree(std::uint64_t n) const { return mu[n] != 0; }

  /// Distinct primes of n (n <= N), ascending.
  template <class Out>
  void primes_of(std::uint64_t n, Out& out) const {
    while (n > 1) {
      std::uint32_t p = lpf[n];
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
};

/// Upper bound on N accepted by sieve(); ~6 bytes per entry.
inline constexpr std::uint64_t kSieveCap = 400'000'000ULL;

namespace detail {

inline constexpr std::uint32_t kCacheMagic = 0x4D414C53;  // "MALS"
inline constexpr std::uint32_t kCacheVersion = 1;

inline SieveTables compute_sieve(std::uint64_t N) {
  SieveTables t;
  t.N = N;
  t.mu.assign(N + 1, 0);
  t.omega.assign(N + 1, 0);
  t.lpf.assign(N + 1, 0);
  std::vector<std::uint32_t> primes;
  if (N >= 1) t.mu[1] = 1;
  for (std::uint64_t i = 2; i <= N; ++i) {
    if (t.lpf[i] == 0) {
      t.lpf[i] = static_cast<std::uint32_t>(i);
      t.mu[i] = -1;
      t.omega[i] = 1;
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      std::uint64_t ip = i * p;
      if (p > t.lpf[i] || ip > N) break;
      t.lpf[ip] = p;
      if (p == t.lpf[i]) {
        t.mu[ip] = 0;
        t.omega[ip] = t.omega[i];
      } else {
        t.mu[ip] = static_cast<std::int8_t>(-t.mu[i]);
        t.omega[ip] = static_cast<std::uint8_t>(t.omega[i] + 1);
      }
    }
  }
  return t;
}

inline std::filesystem::path cache_path(std::uint64_t N) {
  const char* dir = std::getenv("MALLE_CACHE_DIR");
  if (!dir || !*dir) return {};
  return std::filesystem::path(dir) / ("sieve_" + std::to_string(N) + ".bin");
}

inline bool read_cache(const std::filesystem::path& p, std::uint64_t N, SieveTables& t) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::uint32_t magic = 0, version = 0;
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || magic != kCacheMagic || version != kCacheVersion || n != N) return false;
  t.N = N;
  t.mu.resize(N + 1);
  t.omega.resize(N + 1);
  t.lpf.resize(N + 1);
  in.read(reinterpret_cast<char*>(t.mu.data()), static_cast<std::streamsize>(N + 1));
  in.read(reinterpret_cast<char*>(t.omega.data()), static_cast<std::streamsize>(N + 1));
  in.read(reinterpret_cast<char*>(t.lpf.data()), static_cast<std::streamsize>((N + 1) * 4));
  if (!in) return false;
  // cheap corruption check
  if (N >= 12 && (t.mu[1] != 1 || t.mu[12] != 0 || t.omega[12] != 2 || t.lpf[12] != 2)) return false;
  return in.peek() == std::char_traits<char>::eof();
}

inline void write_cache(const std::filesystem::path& p, const SieveTables& t) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;
    out.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof kCacheMagic);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
    out.write(reinterpret_cast<const char*>(&t.N), sizeof t.N);
    out.write(reinterpret_cast<const char*>(t.mu.data()), static_cast<std::streamsize>(t.N + 1));
    out.write(reinterpret_cast<const char*>(t.omega.data()), static_cast<std::streamsize>(t.N + 1));
    out.write(reinterpret_cast<const char*>(t.lpf.data()), static_cast<std::streamsize>((t.N + 1) * 4));
    if (!out) return;
  }
  std::filesystem::rename(tmp, p, ec);
}

}  // namespace detail

/// Exact sieve tables up to N. Uses the MALLE_CACHE_DIR cache when set; a missing or
/// corrupt cache file is rebuilt.
inline SieveTables sieve(std::uint64_t N) {
  if (N > kSieveCap) throw Error("CapExceeded", "sieve bound " + std::to_string(N));
  SieveTables t;
  auto path = detail::cache_path(N);
  if (!path.empty() && detail::read_cache(path, N, t)) return t;
  t = detail::compute_sieve(N);
  if (!path.empty()) detail::write_cache(path, t);
  return t;
}

/// Process-wide shared sieve covering at least N (grown on demand).
inline std::shared_ptr<const SieveTables> shared_sieve(std::uint64_t N) {
  static std::mutex m;
  static std::shared_ptr<const SieveTables> cur;
  std::lock_guard<std::mutex> lock(m);
  if (!cur || cur->N < N) {
    std::uint64_t n = std::max<std::uint64_t>(N, 1 << 16);
    cur = std::make_shared<const SieveTables>(sieve(n));
  }
  return cur;
}

}  // namespace malle::arith
