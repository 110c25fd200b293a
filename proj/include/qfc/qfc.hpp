#pragma once

#include "qfc/types.hpp"
#include "qfc/linalg.hpp"
#include "qfc/lattice.hpp"
#include "qfc/evolution.hpp"
#include "qfc/complex_structure.hpp"
#include "qfc/observables.hpp"
#include "qfc/boundary.hpp"
#include "qfc/oracle.hpp"
#include "qfc/transforms.hpp"
#include "qfc/models/ising.hpp"
#include "qfc/models/four_state.hpp"
#include "qfc/models/unique_jump.hpp"
#include "qfc/models/three_spin.hpp"
#include "qfc/models/fermion.hpp"
