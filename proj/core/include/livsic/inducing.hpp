#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "livsic/interval.hpp"
#include "livsic/interval_maps.hpp"
#include "livsic/observable.hpp"

namespace livsic {

/// min{n >= 1 : T^n x in Y}. Throws DomainError if x is not in Y and
/// ReturnNotResolvedError (carrying the partial orbit) past `cap` steps.
std::size_t return_time(const PiecewiseMap& map, const Interval& y_set, double x, std::size_t cap);

/// First-return system (Y, T_Y, phi) of a two-branch full map on Y, the
/// domain of its right branch. The left ("excursion") branch must fix 0.
///
/// The return partition comes from the boundary sequence x_0 = 1,
/// x_1 = inf Y, x_{k+1} = (left branch)^{-1}(x_k):
///   B_n = (right branch)^{-1}((x_n, x_{n-1}]).
/// Cells are resolved up to n_max or until they stop being representable in
/// double precision; the rest of Y is the unresolved tail.
class InducedSystem {
 public:
  const PiecewiseMap& base_map() const noexcept { return map_; }
  const Interval& base() const noexcept { return y_; }
  std::size_t return_time_cap() const noexcept { return n_max_; }
  std::size_t resolved() const noexcept { return cell_lower_.size() - 1; }
  Symbol return_branch() const noexcept { return ret_; }
  Symbol excursion_branch() const noexcept { return exc_; }

  /// x_0 = 1, x_1, ..., x_resolved.
  std::span<const double> boundary_points() const noexcept { return boundary_; }

  /// B_n for 1 <= n <= resolved().
  Interval cell(std::size_t n) const;
  Interval unresolved_tail() const;
  double tail_length() const { return unresolved_tail().length(); }

  /// Index n of the cell containing y; nullopt for points of the tail.
  std::optional<std::size_t> cell_of(double y) const;

  /// T^n restricted to B_n, its derivative, and its inverse v_n : Y -> B_n.
  double apply(std::size_t n, double y) const;
  double derivative(std::size_t n, double y) const;
  double inverse(std::size_t n, double z) const;

  /// phi(y), using the cells when resolved and iteration otherwise.
  std::size_t return_time_of(double y) const;
  /// T_Y(y).
  double induced(double y) const;

  /// B_1..B_{min(n_cells, resolved)} as branches with image Y and labels "B<n>".
  std::vector<Branch> cells(std::size_t n_cells) const;

  /// lambda in the induced-metric convention: inf of T_Y' over Y.
  double expansion() const noexcept { return lambda_; }
  double diameter() const noexcept { return 1.0; }

 private:
  friend InducedSystem induce(const PiecewiseMap&, const Interval&, std::size_t);
  InducedSystem(PiecewiseMap map, Interval y) : map_(std::move(map)), y_(y) {}

  PiecewiseMap map_;
  Interval y_;
  std::size_t n_max_ = 0;
  Symbol ret_ = 1;
  Symbol exc_ = 0;
  std::vector<double> boundary_;     // x_0..x_N
  std::vector<double> cell_lower_;   // c_n = v_R(x_n), c_0 = sup Y
  double lambda_ = 1.0;
};

/// Throws StructuralError when the return map on Y is not covered by the
/// supported construction.
InducedSystem induce(const PiecewiseMap& map, const Interval& y_set, std::size_t n_max = 10000);

/// d'(x,y) = |T_Y x - T_Y y| inside one cell, lambda * diam across cells.
double induced_metric(const InducedSystem& system, double x, double y);

struct InducedSeminorm {
  std::size_t n = 0;
  double chain_bound = 0.0;  ///< C * sum_k Df(level k), from the branch seminorms
  double sampled = 0.0;      ///< max |f_Y(x)-f_Y(y)| / d'(x,y)^gamma over sampled pairs in B_n
};

/// f_Y(y) = sum_{k < phi(y)} f(T^k y).
class InducedObservable {
 public:
  InducedObservable(const InducedSystem& system, Observable f) : system_(&system), f_(std::move(f)) {}
  double operator()(double y) const;
  double on_cell(std::size_t n, double y) const;
  const Observable& base_observable() const noexcept { return f_; }
  const std::vector<InducedSeminorm>& seminorms() const noexcept { return seminorms_; }

 private:
  friend InducedObservable induced_observable(const InducedSystem&, const Observable&, std::size_t,
                                              std::size_t, std::uint64_t);
  const InducedSystem* system_;
  Observable f_;
  std::vector<InducedSeminorm> seminorms_;
};

/// The system must outlive the returned observable.
InducedObservable induced_observable(const InducedSystem& system, const Observable& f,
                                     std::size_t n_cells = 40, std::size_t samples = 200,
                                     std::uint64_t seed = 1);

/// Young tower built over the return partition: column n has base B_n,
/// height n and levels T^k(B_n) = (x_{n-k+1}, x_{n-k}] for k >= 1.
class YoungTower {
 public:
  using Measure = std::function<double(const Interval&)>;

  std::size_t columns() const noexcept { return base_measure_.size(); }
  std::size_t height(std::size_t n) const noexcept { return n; }
  /// Delta_0 = Y.
  Interval base() const { return Interval::left_open(boundary_[1], boundary_[0]); }
  Interval level(std::size_t n, std::size_t k) const;
  double base_measure(std::size_t n) const { return base_measure_.at(n - 1); }
  double level_length(std::size_t n, std::size_t k) const { return level(n, k).length(); }
  double tail_measure() const noexcept { return tail_measure_; }
  std::size_t level_count() const noexcept;
  /// sum_n n * m(base of column n)
  double kac_sum() const noexcept;

  /// Applies `steps` iterations of T to a point of level k of column n,
  /// following the column itinerary (right branch on the base, left above).
  double advance(std::size_t n, std::size_t k, double x, std::size_t steps) const;
  double step_derivative(std::size_t n, std::size_t k, double x) const;

  const PiecewiseMap& base_map() const noexcept { return map_; }

 private:
  friend YoungTower tower_of(const InducedSystem&, const Measure&);
  explicit YoungTower(PiecewiseMap map) : map_(std::move(map)) {}
  PiecewiseMap map_;
  Symbol ret_ = 1;
  Symbol exc_ = 0;
  std::vector<double> boundary_;
  std::vector<double> cell_lower_;
  std::vector<double> base_measure_;
  double tail_measure_ = 0.0;
};

inline double lebesgue(const Interval& i) { return i.length(); }

/// Column measures use `measure` (Lebesgue by default; pass the invariant
/// measure for the Kac identity on non Lebesgue-preserving maps).
YoungTower tower_of(const InducedSystem& system, const YoungTower::Measure& measure = lebesgue);

}  // namespace livsic
