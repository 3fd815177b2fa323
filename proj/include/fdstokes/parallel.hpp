#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

namespace fdstokes {

/// Serial is the reference path kept for testing; OpenMP runs element
/// kernels concurrently. Both produce bit-identical results because element
/// outputs are merged in ascending element order.
enum class ExecPolicy { Serial, OpenMP };

using Triplet = Eigen::Triplet<double>;

/// Element-local output: matrix triplets and vector (index, value) pairs.
struct LocalContribution {
  std::vector<Triplet> matrix;
  std::vector<std::pair<int, double>> vector;

  void add(int row, int col, double value) { matrix.emplace_back(row, col, value); }
  void add(int row, double value) { vector.emplace_back(row, value); }
};

/// Merged element contributions in element order.
struct GatheredContribution {
  std::vector<Triplet> matrix;
  std::vector<std::pair<int, double>> vector;
};

/// Runs kernel(element, LocalContribution&) over every element.
template <class Kernel>
GatheredContribution gather_elements(std::span<const int> elements, ExecPolicy policy,
                                     Kernel&& kernel) {
  GatheredContribution out;
  if (policy == ExecPolicy::Serial) {
    LocalContribution local;
    for (int t : elements) {
      local.matrix.clear();
      local.vector.clear();
      kernel(t, local);
      out.matrix.insert(out.matrix.end(), local.matrix.begin(), local.matrix.end());
      out.vector.insert(out.vector.end(), local.vector.begin(), local.vector.end());
    }
    return out;
  }

  const auto count = static_cast<std::ptrdiff_t>(elements.size());
  std::vector<LocalContribution> per_element(elements.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    kernel(elements[i], per_element[i]);
  }
  std::size_t nm = 0;
  std::size_t nv = 0;
  for (const auto& c : per_element) {
    nm += c.matrix.size();
    nv += c.vector.size();
  }
  out.matrix.reserve(nm);
  out.vector.reserve(nv);
  for (const auto& c : per_element) {
    out.matrix.insert(out.matrix.end(), c.matrix.begin(), c.matrix.end());
    out.vector.insert(out.vector.end(), c.vector.begin(), c.vector.end());
  }
  return out;
}

/// Sum of f(element) with per-element partials reduced in element order.
template <class F>
double reduce_elements(std::span<const int> elements, ExecPolicy policy, F&& f) {
  const auto count = static_cast<std::ptrdiff_t>(elements.size());
  std::vector<double> partial(elements.size(), 0.0);
  if (policy == ExecPolicy::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) partial[i] = f(elements[i]);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) partial[i] = f(elements[i]);
  }
  double sum = 0.0;
  for (double v : partial) sum += v;
  return sum;
}

/// Sets the OpenMP thread count; values < 1 leave the runtime default.
void set_thread_count(int threads);
int max_thread_count();

}  // namespace fdstokes
