#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gabm {

// Currency as integer cents. Avoids drift when tips are summed or
// differenced thousands of times across a run.
class Money {
 public:
  Money() = default;
  static Money from_cents(int64_t cents) { return Money(cents); }
  static Money from_dollars(double dollars);

  // Accepts "4", "4.5", "4.50", "$4.50", with surrounding whitespace.
  // Rejects negatives, more than two decimals, and anything non-numeric.
  static Money parse(std::string_view text);

  int64_t cents() const { return cents_; }
  double dollars() const { return static_cast<double>(cents_) / 100.0; }

  // "4.50" (for CSV cells) or "$4.50" (for prompt text).
  std::string str() const;
  std::string str_with_symbol() const;

  friend bool operator==(Money a, Money b) { return a.cents_ == b.cents_; }
  friend bool operator!=(Money a, Money b) { return a.cents_ != b.cents_; }
  friend bool operator<(Money a, Money b) { return a.cents_ < b.cents_; }
  friend bool operator<=(Money a, Money b) { return a.cents_ <= b.cents_; }
  friend bool operator>(Money a, Money b) { return a.cents_ > b.cents_; }
  friend bool operator>=(Money a, Money b) { return a.cents_ >= b.cents_; }

 private:
  explicit Money(int64_t cents) : cents_(cents) {}
  int64_t cents_ = 0;
};

}  // namespace gabm
