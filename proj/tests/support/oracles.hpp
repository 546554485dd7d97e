// Reference implementations used to cross-check the library. They are written
// for obviousness rather than speed and share no code with src/.
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace oracle {

// Valid UTF-8 only.
inline std::u32string decode(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    int extra = b < 0x80 ? 0 : b < 0xE0 ? 1 : b < 0xF0 ? 2 : 3;
    char32_t cp = extra == 0 ? b : extra == 1 ? (b & 0x1F) : extra == 2 ? (b & 0x0F) : (b & 0x07);
    for (int k = 1; k <= extra; ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

inline std::string fold(std::string_view s) {
  std::string words, cur;
  std::vector<std::string> parts;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) words += ' ';
    words += parts[i];
  }
  return words;
}

// Full-matrix Wagner-Fischer.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

inline double similarity(std::string_view a, std::string_view b, bool normalize = true) {
  auto ua = decode(normalize ? fold(a) : std::string(a));
  auto ub = decode(normalize ? fold(b) : std::string(b));
  std::size_t m = std::max(ua.size(), ub.size());
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(m);
}

struct Triple {
  std::string s, r, o;
  bool operator==(const Triple&) const = default;
};

// Maximum bipartite matching between predicted and gold triples where an edge
// means exact equality (Kuhn's augmenting paths). Gold is deduplicated first.
struct PRF {
  std::size_t correct = 0, predicted = 0, gold = 0;
};

inline PRF match(const std::vector<Triple>& pred, std::vector<Triple> gold) {
  std::vector<Triple> g;
  for (auto& t : gold)
    if (std::find(g.begin(), g.end(), t) == g.end()) g.push_back(t);
  std::vector<int> owner(g.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment =
      [&](std::size_t p, std::vector<bool>& seen) {
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (!(pred[p] == g[j]) || seen[j]) continue;
          seen[j] = true;
          if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]), seen)) {
            owner[j] = static_cast<int>(p);
            return true;
          }
        }
        return false;
      };
  PRF r;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    std::vector<bool> seen(g.size(), false);
    if (augment(p, seen)) ++r.correct;
  }
  r.predicted = pred.size();
  r.gold = g.size();
  return r;
}

}  // namespace oracle
