#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace commutekit {

// Raised for bad run configuration; the CLI maps it to exit code 1.
// Everything else thrown during a stage maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based RNG: the draw sequence is a pure function of (seed, stream),
// so per-item streams are independent of thread scheduling and of how many
// draws other streams made.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream ^ 0x5bf0363546b9fdabULL))) {}

  std::uint64_t next() { return mix64(key_ + 0x632be59bd9b4e019ULL * ++ctr_); }

  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // modulo bias is < 2^-53 for the n used here; acceptable for synthesis/tests
    return next() % n;
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    // Box-Muller, one value per call pair kept internally for determinism
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Shortest round-trip decimal representation ("inf"/"-inf"/"nan" for specials).
std::string fmt_double(double v);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);

std::vector<std::string> split(std::string_view line, char sep);
std::string trim(std::string_view s);
std::string to_lower(std::string s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace commutekit
