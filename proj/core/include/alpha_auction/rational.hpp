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

#ifndef ALPHA_AUCTION_RATIONAL_HPP_
#define ALPHA_AUCTION_RATIONAL_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace alpha_auction {

// Exact arithmetic for bids, transfers and payoffs. Bids are integers and
// alpha is a small rational, so 64-bit numerators never come close to
// overflowing on auction-sized domains.
using Rational = boost::rational<std::int64_t>;

}  // namespace alpha_auction

// Boost 1.74 spells mixed integer/rational equality as templates that call
// each other; C++20 reversed-operator lookup turns them into unbounded
// recursion. These exact-match overloads take precedence.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(std::int64_t b, const rational<std::int64_t>& a) { return a == b; }
inline bool operator!=(const rational<std::int64_t>& a, std::int64_t b) { return !(a == b); }
inline bool operator!=(std::int64_t b, const rational<std::int64_t>& a) { return !(a == b); }
inline bool operator==(const rational<std::int64_t>& a, int b) {
  return a == static_cast<std::int64_t>(b);
}
inline bool operator==(int b, const rational<std::int64_t>& a) { return a == static_cast<std::int64_t>(b); }
inline bool operator!=(const rational<std::int64_t>& a, int b) { return !(a == b); }
inline bool operator!=(int b, const rational<std::int64_t>& a) { return !(a == b); }
}  // namespace boost

namespace alpha_auction {

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

// Decimal text when the expansion terminates ("17.5", "-0.25", "3"),
// otherwise "p/q".
std::string format_rational(const Rational& r);

// Accepts "3", "-2", "0.5", "1/2". Throws DomainError on malformed input.
Rational parse_rational(std::string_view text);

// Closest fraction with denominator <= max_denominator (continued fractions).
Rational rationalize(double x, std::int64_t max_denominator);

}  // namespace alpha_auction

#endif  // ALPHA_AUCTION_RATIONAL_HPP_
