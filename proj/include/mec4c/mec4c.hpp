#ifndef MEC4C_MEC4C_HPP_
#define MEC4C_MEC4C_HPP_

#include "mec4c/errors.hpp"
#include "mec4c/units.hpp"
#include "mec4c/random.hpp"
#include "mec4c/topology.hpp"
#include "mec4c/scenario.hpp"
#include "mec4c/decision.hpp"
#include "mec4c/costmodel.hpp"
#include "mec4c/solver.hpp"
#include "mec4c/rounding.hpp"
#include "mec4c/oracle.hpp"
#include "mec4c/cachesim.hpp"
#include "mec4c/metrics.hpp"
#include "mec4c/config.hpp"
#include "mec4c/pipeline.hpp"

#endif  // MEC4C_MEC4C_HPP_
