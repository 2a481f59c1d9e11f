#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fklab/model.hpp"

namespace fklab {
namespace corpus {

/// Two-state chain with unit potentials: a plain Markov chain, mass ratio
/// exactly one, every first-order constant collapses to zero.
FkModel unit_potential_2state(int horizon);

/// Two-state mixing chain with a mild potential tilt; the workhorse model
/// with mass ratio > 1 but small enough that the bias-sandwich thresholds
/// are reachable at desk-scale particle counts.
FkModel mixing_2state(int horizon);

/// Three-state slowly mixing chain: larger total-variation contraction
/// profile.
FkModel weak_mixing_3state(int horizon);

/// Four-state random-walk chain with exp(-V dt) potentials, a discrete
/// stand-in for diffusion Monte Carlo style weighting.
FkModel qmc_4state(int horizon);

/// Same model with potentials rescaled so eta_k(G_k) = 1 at every level.
FkModel normalized(const FkModel& model);

std::vector<std::pair<std::string, FkModel>> all(int horizon);

}  // namespace corpus
}  // namespace fklab
