#ifndef RADSCAT_RADSCAT_HPP
#define RADSCAT_RADSCAT_HPP

#include "radscat/specfun.hpp"
#include "radscat/chebyshev.hpp"
#include "radscat/potentials.hpp"
#include "radscat/modesolver.hpp"
#include "radscat/incident.hpp"
#include "radscat/assembly.hpp"
#include "radscat/timedomain.hpp"
#include "radscat/config.hpp"
#include "radscat/gridio.hpp"
#include "radscat/driver.hpp"

#endif  // RADSCAT_RADSCAT_HPP
