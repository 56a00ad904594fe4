#pragma once

#include <vector>

#include "ultragen/atomic_measure.hpp"

namespace ultragen {

struct ProhorovResult {
  double value = 0.0;       // feasible endpoint of the final bisection bracket
  double lower = 0.0;       // largest epsilon known infeasible
  int iterations = 0;
};

// Prohorov distance between finite atomic measures on an explicit finite
// metric space. Feasibility of a radius eps is decided by Strassen-type
// transport: a maximum flow on the bipartite atom graph with edges where
// dist < eps must leave deficiency at most eps.
ProhorovResult prohorov_distance_metric(const std::vector<double>& mass_a,
                                        const std::vector<double>& mass_b,
                                        const std::vector<std::vector<double>>& dist,
                                        double tol);

// Specialization to measures on the line.
ProhorovResult prohorov_distance(const AtomicMeasure1D& a, const AtomicMeasure1D& b,
                                 double tol);

// Maximum mass shippable between the two measures along pairs closer than
// eps (strict inequality, matching the open enlargement).
double transport_capacity(const std::vector<double>& mass_a, const std::vector<double>& mass_b,
                          const std::vector<std::vector<double>>& dist, double eps);

}  // namespace ultragen
