#pragma once

#include "degensink/sinkhorn.hpp"
#include "scaling_engine.hpp"

#include <functional>

namespace degensink::detail {

// Gap values at the coupling P = a b R with log potentials la, lb.
double gap_balanced_at(const Coupling& P, const Vec& la, const Vec& lb, const Measure& mu,
                       const Measure& nu);
double gap_unbalanced_at(const Coupling& P, const Vec& la, const Vec& lb, const Measure& mu,
                         const Measure& nu, double lambda);

// Called after each a-update with the fresh P^n; may remove entries.
using AfterRowUpdate = std::function<void(ScalingEngine&, const Coupling& P)>;

// The Sinkhorn loop behind run_sinkhorn, with an optional hook.
SolveReport run_scaling(const Coupling& R, const Measure& mu, const Measure& nu,
                        const StopConfig& cfg, const AfterRowUpdate& hook = {});

}  // namespace degensink::detail
