#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace flowctl {

// Trades and materials share one index: rebar, formwork, concrete.
inline constexpr std::size_t kRebar = 0;
inline constexpr std::size_t kFormwork = 1;
inline constexpr std::size_t kConcrete = 2;
inline constexpr std::size_t kTrades = 3;

using Triple = std::array<double, 3>;
using Rng = std::mt19937_64;

inline constexpr std::array<const char*, 3> kTradeNames = {"rebar", "formwork", "concrete"};

// Milestone payment applied for on `applied_day`, credited on `landing_day`.
struct PendingPayment {
  int applied_day = 0;
  int landing_day = 0;
  double amount = 0.0;

  bool operator==(const PendingPayment&) const = default;
};

// Error carrying a short machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

}  // namespace flowctl
