#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtnf {

/// Dense table over the rectangle [0, m_max] x [n_min, n_max].
template <class T>
class Lattice {
 public:
  Lattice() = default;
  Lattice(int m_max, int n_min, int n_max, T init = T{})
      : m_max_(m_max), n_min_(n_min), n_max_(n_max),
        cells_(static_cast<std::size_t>(m_max + 1) * static_cast<std::size_t>(n_max - n_min + 1), init) {
    if (m_max < 0 || n_max < n_min) throw std::invalid_argument("Lattice: empty index range");
  }

  int m_max() const { return m_max_; }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }

  bool contains(int m, int n) const { return m >= 0 && m <= m_max_ && n >= n_min_ && n <= n_max_; }

  T& operator()(int m, int n) { return cells_[index(m, n)]; }
  const T& operator()(int m, int n) const { return cells_[index(m, n)]; }

  T& at(int m, int n) {
    check(m, n);
    return cells_[index(m, n)];
  }
  const T& at(int m, int n) const {
    check(m, n);
    return cells_[index(m, n)];
  }

 private:
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(n_max_ - n_min_ + 1) +
           static_cast<std::size_t>(n - n_min_);
  }
  void check(int m, int n) const {
    if (!contains(m, n))
      throw std::out_of_range("Lattice: (" + std::to_string(m) + "," + std::to_string(n) + ") out of range");
  }

  int m_max_ = 0;
  int n_min_ = 0;
  int n_max_ = 0;
  std::vector<T> cells_;
};

}  // namespace dtnf
