#ifndef WEAKINFO_WEAKINFO_HPP
#define WEAKINFO_WEAKINFO_HPP

#include "weakinfo/config.hpp"
#include "weakinfo/convergence.hpp"
#include "weakinfo/errors.hpp"
#include "weakinfo/lattice.hpp"
#include "weakinfo/parallel.hpp"
#include "weakinfo/quadrature.hpp"
#include "weakinfo/rational.hpp"
#include "weakinfo/report.hpp"
#include "weakinfo/rng.hpp"
#include "weakinfo/utility.hpp"
#include "weakinfo/valuation.hpp"
#include "weakinfo/version.hpp"
#include "weakinfo/walks.hpp"
#include "weakinfo/weak_measure.hpp"

#endif
