#ifndef DYNADMM_DYNADMM_HPP_
#define DYNADMM_DYNADMM_HPP_

#include "dynadmm/config.hpp"
#include "dynadmm/error.hpp"
#include "dynadmm/experiment.hpp"
#include "dynadmm/lasso.hpp"
#include "dynadmm/metrics.hpp"
#include "dynadmm/numerics.hpp"
#include "dynadmm/oracle.hpp"
#include "dynadmm/problem.hpp"
#include "dynadmm/rng.hpp"
#include "dynadmm/sharing.hpp"
#include "dynadmm/solver.hpp"
#include "dynadmm/synth.hpp"
#include "dynadmm/table.hpp"

#endif  // DYNADMM_DYNADMM_HPP_
