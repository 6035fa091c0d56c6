#pragma once

// k-subsets of {1..n}, their minimal permutations, lengths and complements.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace kmono {

class FixedPointIndex {
 public:
  FixedPointIndex(int k, int n, std::vector<int> elems) : k_(k), n_(n), el_(std::move(elems)) {
    if (k < 0 || k > n) throw DomainError("subset size out of range");
    if (static_cast<int>(el_.size()) != k) throw DomainError("wrong number of elements");
    for (int i = 0; i < k; ++i) {
      if (el_[i] < 1 || el_[i] > n) throw DomainError("element out of range");
      if (i && el_[i] <= el_[i - 1]) throw DomainError("elements not strictly increasing");
    }
  }

  int k() const { return k_; }
  int n() const { return n_; }
  const std::vector<int>& elements() const { return el_; }
  int operator[](int a) const { return el_[a]; }  // 0-based position
  bool contains(int i) const { return std::binary_search(el_.begin(), el_.end(), i); }

  FixedPointIndex complement() const {
    std::vector<int> c;
    for (int i = 1; i <= n_; ++i)
      if (!contains(i)) c.push_back(i);
    return FixedPointIndex(n_ - k_, n_, std::move(c));
  }

  // sigma_I: I in increasing order, then the complement in increasing order
  std::vector<int> sigma() const {
    std::vector<int> s = el_;
    for (int i = 1; i <= n_; ++i)
      if (!contains(i)) s.push_back(i);
    return s;
  }

  int ell() const {
    int s = 0;
    for (int a = 0; a < k_; ++a) s += el_[a] - (a + 1);
    return s;
  }

  // image under the permutation a -> n+1-a
  FixedPointIndex reversed() const {
    std::vector<int> r;
    for (int x : el_) r.push_back(n_ + 1 - x);
    std::sort(r.begin(), r.end());
    return FixedPointIndex(k_, n_, std::move(r));
  }

  std::string to_json() const {
    std::string s = "[";
    for (int i = 0; i < k_; ++i) s += (i ? "," : "") + std::to_string(el_[i]);
    return s + "]";
  }

  friend bool operator==(const FixedPointIndex& a, const FixedPointIndex& b) {
    return a.n_ == b.n_ && a.el_ == b.el_;
  }
  friend bool operator<(const FixedPointIndex& a, const FixedPointIndex& b) { return a.el_ < b.el_; }

 private:
  int k_, n_;
  std::vector<int> el_;
};

inline std::vector<FixedPointIndex> subsets(int k, int n) {
  if (k < 0 || n < 0 || k > n) throw DomainError("need 0 <= k <= n");
  if (n > 12) throw DomainError("n > 12");
  std::vector<FixedPointIndex> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i + 1;
  while (true) {
    out.emplace_back(k, n, cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

// position of I in subsets(k, n)
inline std::size_t subset_rank(const FixedPointIndex& I) {
  auto all = subsets(I.k(), I.n());
  return static_cast<std::size_t>(std::find(all.begin(), all.end(), I) - all.begin());
}

inline long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// parse "1,3" or "[1,3]"
inline FixedPointIndex parse_subset(const std::string& s, int k, int n) {
  std::vector<int> v;
  std::string cur;
  for (char c : s + ",") {
    if (c >= '0' && c <= '9') cur += c;
    else if (c == ',' || c == ']' || c == ' ') {
      if (!cur.empty()) v.push_back(std::stoi(cur));
      cur.clear();
    } else if (c != '[') throw DomainError("bad subset: " + s);
  }
  std::sort(v.begin(), v.end());
  return FixedPointIndex(k, n, v);
}

}  // namespace kmono
