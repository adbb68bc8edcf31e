#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

namespace pceks {

// Hash mixing for the machine state types. Every state type exposes a
// `friend std::size_t hash_value(const T&)`; the overloads below lift that
// through the standard containers used inside states.

inline void hash_mix(std::size_t& seed, std::size_t h) {
  seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

template <class T>
  requires std::is_arithmetic_v<T> || std::is_enum_v<T>
std::size_t hash_value(const T& v) {
  return std::hash<T>{}(v);
}

template <class T>
std::size_t hash_value(const std::vector<T>& v);
template <class A, class B>
std::size_t hash_value(const std::pair<A, B>& p);
template <class K, class V>
std::size_t hash_value(const std::map<K, V>& m);
template <class T>
std::size_t hash_value(const std::set<T>& s);
template <class... Ts>
std::size_t hash_value(const std::variant<Ts...>& v);

template <class T>
void hash_combine(std::size_t& seed, const T& v) {
  hash_mix(seed, hash_value(v));
}

template <class It>
std::size_t hash_range(It first, It last) {
  std::size_t seed = 0;
  for (; first != last; ++first) hash_combine(seed, *first);
  return seed;
}

template <class T>
std::size_t hash_value(const std::vector<T>& v) {
  return hash_range(v.begin(), v.end());
}

template <class A, class B>
std::size_t hash_value(const std::pair<A, B>& p) {
  std::size_t seed = 0;
  hash_combine(seed, p.first);
  hash_combine(seed, p.second);
  return seed;
}

template <class K, class V>
std::size_t hash_value(const std::map<K, V>& m) {
  return hash_range(m.begin(), m.end());
}

template <class T>
std::size_t hash_value(const std::set<T>& s) {
  return hash_range(s.begin(), s.end());
}

template <class... Ts>
std::size_t hash_value(const std::variant<Ts...>& v) {
  std::size_t seed = v.index();
  std::visit([&](const auto& alt) { hash_combine(seed, alt); }, v);
  return seed;
}

/// Adapter so state types can key unordered containers.
struct Hasher {
  template <class T>
  std::size_t operator()(const T& v) const {
    return hash_value(v);
  }
};

}  // namespace pceks
