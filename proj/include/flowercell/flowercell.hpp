#pragma once

#include "flowercell/body.hpp"
#include "flowercell/cell.hpp"
#include "flowercell/domain.hpp"
#include "flowercell/errors.hpp"
#include "flowercell/geometry.hpp"
#include "flowercell/harness.hpp"
#include "flowercell/increment.hpp"
#include "flowercell/io.hpp"
#include "flowercell/limit_laws.hpp"
#include "flowercell/quadrature.hpp"
#include "flowercell/rng.hpp"
#include "flowercell/sampler.hpp"
#include "flowercell/shape.hpp"
#include "flowercell/stats.hpp"
#include "flowercell/vec.hpp"
