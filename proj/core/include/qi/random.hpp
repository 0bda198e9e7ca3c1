#pragma once

#include <cstdint>
#include <random>

#include "qi/assemblage.hpp"

namespace qi {

using Rng = std::mt19937_64;

/// Haar-distributed unitary via QR of a Ginibre matrix with the phase fix
/// R_ii > 0.
CMat random_unitary(int d, Rng& rng);

CMat random_density_matrix(int d, Rng& rng);

/// Random rank-one projective measurement.
Povm random_projective_povm(int d, Rng& rng);

WeightedAssemblage random_projective_assemblage(int d, int settings, Rng& rng);

/// Random simulation map from m_in settings (outcome counts o_in) onto m_out
/// settings with o_out outcomes each. The mixing p(x|y) and relabelings
/// q(b|y,x,a) are sampled from Dirichlet(1); q(y) is solved to match p(x)
/// when possible, else resampled.
SimulationMap random_simulation_map(const WeightedAssemblage& a, int m_out,
                                    int o_out, Rng& rng);

}  // namespace qi
