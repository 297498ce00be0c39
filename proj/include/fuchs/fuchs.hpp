#pragma once

// Numerical monodromy of Fuchsian systems: analytic continuation of the
// fundamental matrix, monodromy group analysis, polynomial invariants of
// matrix groups, and the closed-form mass-parameter layer for the planar
// three-body normal variational equation.

#include "fuchs/errors.hpp"
#include "fuchs/group.hpp"
#include "fuchs/invariants.hpp"
#include "fuchs/io.hpp"
#include "fuchs/linalg.hpp"
#include "fuchs/path.hpp"
#include "fuchs/spectral.hpp"
#include "fuchs/system.hpp"
#include "fuchs/threebody.hpp"
#include "fuchs/transport.hpp"
