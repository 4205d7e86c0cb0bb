// Copyright 2026 The alpha-auction Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "alpha_auction/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "alpha_auction/errors.hpp"

namespace alpha_auction {
namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw DomainError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_rational(const Rational& r) {
  std::int64_t num = r.numerator();
  std::int64_t den = r.denominator();
  std::int64_t d = den;
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  if (d != 1) return std::to_string(num) + "/" + std::to_string(den);

  std::string out;
  if (num < 0) {
    out.push_back('-');
    num = -num;
  }
  out += std::to_string(num / den);
  std::int64_t rem = num % den;
  if (rem == 0) return out;
  out.push_back('.');
  while (rem != 0) {
    rem *= 10;
    out.push_back(static_cast<char>('0' + rem / den));
    rem %= den;
  }
  return out;
}

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw DomainError("empty number");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text));

  bool negative = !text.empty() && text.front() == '-';
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  if (frac.size() > 15) throw DomainError("too many decimals: " + std::string(text));
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
  std::int64_t f = frac.empty() ? 0 : parse_int(frac);
  if (w < 0) w = -w;
  Rational value(w * scale + f, scale);
  return negative ? -value : value;
}

Rational rationalize(double x, std::int64_t max_denominator) {
  if (!std::isfinite(x)) throw DomainError("cannot rationalize a non-finite value");
  const bool negative = x < 0;
  double y = std::fabs(x);
  // Convergents h/k of the continued fraction of y.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = y;
  for (int i = 0; i < 64; ++i) {
    double a_floor = std::floor(rest);
    if (a_floor > 9.0e15) break;
    auto a = static_cast<std::int64_t>(a_floor);
    std::int64_t h2 = a * h1 + h0;
    std::int64_t k2 = a * k1 + k0;
    if (k2 > max_denominator) {
      // Best semiconvergent that still fits.
      std::int64_t t = (max_denominator - k0) / k1;
      std::int64_t hs = t * h1 + h0, ks = t * k1 + k0;
      if (ks > 0 && std::fabs(static_cast<double>(hs) / ks - y) <
                        std::fabs(static_cast<double>(h1) / k1 - y)) {
        h1 = hs;
        k1 = ks;
      }
      break;
    }
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = rest - a_floor;
    if (frac < 1e-15) break;
    rest = 1.0 / frac;
  }
  Rational r(h1, k1);
  return negative ? -r : r;
}

}  // namespace alpha_auction
