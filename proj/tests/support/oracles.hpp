// SPDX-License-Identifier: Apache-2.0
//
// Independent test oracles. These deliberately re-derive expected values via
// different implementation routes than the library; they must never call the
// code paths they check.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace oracles {

// --- reference lossy UTF-8 decoder (table-driven DFA) -----------------------
// Policy: one U+FFFD per byte that cannot begin or continue a valid scalar
// sequence; after an error the decoder resynchronizes at the byte following
// the sequence start.

namespace utf8 {

// character class per lead byte
inline int byte_class(unsigned char b) {
  if (b < 0x80) return 0;                  // ASCII
  if (b < 0xC2) return 1;                  // continuation or invalid lead
  if (b < 0xE0) return 2;                  // 2-byte lead
  if (b == 0xE0) return 3;                 // 3-byte lead, restricted low
  if (b < 0xED) return 4;                  // 3-byte lead
  if (b == 0xED) return 5;                 // 3-byte lead, surrogate guard
  if (b < 0xF0) return 4;
  if (b == 0xF0) return 6;                 // 4-byte lead, restricted low
  if (b < 0xF4) return 7;                  // 4-byte lead
  if (b == 0xF4) return 8;                 // 4-byte lead, high guard
  return 1;
}

inline bool cont_in(unsigned char b, unsigned char lo, unsigned char hi) {
  return b >= lo && b <= hi;
}

inline std::string lossy(std::string_view bytes) {
  std::string out;
  size_t i = 0;
  const std::string rep = "\xEF\xBF\xBD";
  while (i < bytes.size()) {
    auto b = static_cast<unsigned char>(bytes[i]);
    int cls = byte_class(b);
    auto take = [&](size_t count, unsigned char lo1, unsigned char hi1) -> bool {
      // first continuation constrained, remaining are 80..BF
      if (i + count >= bytes.size() + 1 && i + count > bytes.size()) return false;
      if (i + 1 >= bytes.size() ||
          !cont_in(static_cast<unsigned char>(bytes[i + 1]), lo1, hi1))
        return false;
      for (size_t k = 2; k <= count; ++k) {
        if (i + k >= bytes.size() ||
            !cont_in(static_cast<unsigned char>(bytes[i + k]), 0x80, 0xBF))
          return false;
      }
      return true;
    };
    switch (cls) {
      case 0:
        out.push_back(static_cast<char>(b));
        i += 1;
        continue;
      case 2:
        if (take(1, 0x80, 0xBF)) {
          out.append(bytes.substr(i, 2));
          i += 2;
          continue;
        }
        break;
      case 3:
        if (take(2, 0xA0, 0xBF)) {
          out.append(bytes.substr(i, 3));
          i += 3;
          continue;
        }
        break;
      case 4:
        if (take(2, 0x80, 0xBF)) {
          out.append(bytes.substr(i, 3));
          i += 3;
          continue;
        }
        break;
      case 5:
        if (take(2, 0x80, 0x9F)) {
          out.append(bytes.substr(i, 3));
          i += 3;
          continue;
        }
        break;
      case 6:
        if (take(3, 0x90, 0xBF)) {
          out.append(bytes.substr(i, 4));
          i += 4;
          continue;
        }
        break;
      case 7:
        if (take(3, 0x80, 0xBF)) {
          out.append(bytes.substr(i, 4));
          i += 4;
          continue;
        }
        break;
      case 8:
        if (take(3, 0x80, 0x8F)) {
          out.append(bytes.substr(i, 4));
          i += 4;
          continue;
        }
        break;
      default:
        break;
    }
    out += rep;
    i += 1;
  }
  return out;
}

}  // namespace utf8

// --- exhaustive min-total-cost assignment (for example pairing) -------------
// Tries every injective request->response assignment (responses may be left
// unused) and returns the one minimizing total distance; ties broken by
// preferring assignments that, scanning requests in order, pair with
// after-the-request then lower-id responses.

struct Assignment {
  std::vector<int> response_for_request;  // index into responses, -1 = none
};

template <typename DistFn, typename AfterFn>
inline Assignment exhaustive_pairing(size_t n_requests, size_t n_responses,
                                     const DistFn& dist, const AfterFn& after) {
  Assignment best;
  long best_cost = -1;
  std::vector<long> best_key;

  std::vector<int> cur(n_requests, -1);
  std::vector<bool> used(n_responses, false);

  auto key_for = [&](const std::vector<int>& a) {
    // lexicographic tie-break key over requests in order
    std::vector<long> key;
    for (size_t r = 0; r < n_requests; ++r) {
      if (a[r] < 0) {
        key.push_back(1 << 20);
        key.push_back(1 << 20);
        key.push_back(1 << 20);
      } else {
        key.push_back(dist(r, static_cast<size_t>(a[r])));
        key.push_back(after(r, static_cast<size_t>(a[r])) ? 0 : 1);
        key.push_back(a[r]);
      }
    }
    return key;
  };

  std::function<void(size_t)> rec = [&](size_t r) {
    if (r == n_requests) {
      long cost = 0;
      size_t paired = 0;
      for (size_t q = 0; q < n_requests; ++q)
        if (cur[q] >= 0) {
          cost += dist(q, static_cast<size_t>(cur[q]));
          ++paired;
        }
      // maximum cardinality first, then min cost, then tie-break key
      long unpaired_penalty = static_cast<long>(n_requests - paired) * 1000000;
      cost += unpaired_penalty;
      auto key = key_for(cur);
      if (best_cost < 0 || cost < best_cost || (cost == best_cost && key < best_key)) {
        best_cost = cost;
        best_key = key;
        best.response_for_request = cur;
      }
      return;
    }
    rec(r + 1);  // leave unpaired
    for (size_t s = 0; s < n_responses; ++s) {
      if (used[s]) continue;
      used[s] = true;
      cur[r] = static_cast<int>(s);
      rec(r + 1);
      cur[r] = -1;
      used[s] = false;
    }
  };
  rec(0);
  return best;
}

// --- greedy document-order assignment ---------------------------------------
// Mirrors the documented pairing rule via a plain matrix scan: requests in
// order, each taking the nearest unused response, ties broken by
// after-the-request then smaller response id.

template <typename DistFn, typename AfterFn, typename IdFn>
inline Assignment greedy_pairing(size_t n_requests, size_t n_responses,
                                 const DistFn& dist, const AfterFn& after,
                                 const IdFn& resp_id) {
  Assignment a;
  a.response_for_request.assign(n_requests, -1);
  std::vector<bool> used(n_responses, false);
  for (size_t r = 0; r < n_requests; ++r) {
    int best = -1;
    for (size_t s = 0; s < n_responses; ++s) {
      if (used[s]) continue;
      if (best < 0) {
        best = static_cast<int>(s);
        continue;
      }
      long db = dist(r, static_cast<size_t>(best));
      long ds = dist(r, s);
      if (ds != db) {
        if (ds < db) best = static_cast<int>(s);
        continue;
      }
      bool ab = after(r, static_cast<size_t>(best));
      bool as = after(r, s);
      if (as != ab) {
        if (as) best = static_cast<int>(s);
        continue;
      }
      if (resp_id(s) < resp_id(static_cast<size_t>(best))) best = static_cast<int>(s);
    }
    if (best >= 0) {
      used[static_cast<size_t>(best)] = true;
      a.response_for_request[r] = best;
    }
  }
  return a;
}

// --- breadth-first tree distance ---------------------------------------------
// Independent of any depth/interval bookkeeping: adjacency rebuilt from
// parent pointers, then a plain BFS.

template <typename Tree>
inline int bfs_distance(const Tree& t, int a, int b) {
  int n = t.size();
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!t.node(i).parent_id) continue;
    int p = *t.node(i).parent_id;
    adj[static_cast<size_t>(p)].push_back(i);
    adj[static_cast<size_t>(i)].push_back(p);
  }
  std::vector<int> d(static_cast<size_t>(n), -1);
  std::vector<int> queue{a};
  d[static_cast<size_t>(a)] = 0;
  for (size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    if (u == b) return d[static_cast<size_t>(u)];
    for (int v : adj[static_cast<size_t>(u)]) {
      if (d[static_cast<size_t>(v)] < 0) {
        d[static_cast<size_t>(v)] = d[static_cast<size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  return d[static_cast<size_t>(b)];
}

}  // namespace oracles
