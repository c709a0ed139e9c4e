#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "livsic/interval.hpp"
#include "livsic/interval_maps.hpp"

namespace livsic {

/// The branch partition of a map viewed as a Markov partition.
/// adjacency[a][b] holds when the domain of b is contained (up to measure
/// zero) in the image of a; tau is the base of the symbolic metric.
struct MarkovPartition {
  PiecewiseMap map;
  std::vector<std::vector<bool>> adjacency;
  double tau = 0.5;

  std::size_t size() const noexcept { return adjacency.size(); }
  bool admissible(const Word& word, bool cyclic = false) const;
};

/// Throws ParameterError unless 0 < tau < 1, StructuralError on a dead state.
MarkovPartition markov_partition(const PiecewiseMap& map, double tau = 0.5);

/// min{n >= 0 : T^n x and T^n y have different owning branches}, or nullopt
/// when the points are not separated within `cap` iterations.
std::optional<std::size_t> separation_time(const PiecewiseMap& map, double x, double y,
                                           std::size_t cap);

/// tau^s(x,y); zero when the points do not separate within `cap` iterations.
double symbolic_metric(const MarkovPartition& partition, double x, double y, std::size_t cap);

/// Points whose first |word| itinerary symbols equal `word`.
/// Throws CombinatorialError for an empty or inadmissible word.
Interval cylinder(const PiecewiseMap& map, const Word& word);

struct PeriodicOrbit {
  Word word;                        ///< Lyndon representative of the cycle
  std::vector<double> points;       ///< points[k] lies in branch word[k]
  double residual = 0.0;            ///< max_k |T(points[k]) - points[k+1 mod n]|
  std::vector<std::string> flags;   ///< "neutral", "neutral-degenerate"

  std::size_t period() const noexcept { return word.size(); }
  bool has_flag(const std::string& f) const;
};

struct PeriodicSearch {
  std::vector<PeriodicOrbit> orbits;  ///< lexicographic by word
  std::vector<std::string> rejected;  ///< diagnostics for orbits failing the residual check
};

/// One orbit per primitive cyclically admissible word of length <= max_period
/// (max_period <= 20), located by iterating the composed inverse branches to
/// their fixed point and polishing with Newton on T^n(x) - x.
PeriodicSearch periodic_points(const PiecewiseMap& map, std::size_t max_period);

/// Lyndon words of length <= max_len over {0..alphabet-1}, in lexicographic order.
std::vector<Word> lyndon_words(std::size_t alphabet, std::size_t max_len);

std::string word_string(const PiecewiseMap& map, const Word& word);

}  // namespace livsic
