#ifndef INFPROJ_INFPROJ_HPP
#define INFPROJ_INFPROJ_HPP

#include "baselines.hpp"
#include "core.hpp"
#include "dataset.hpp"
#include "diagnostics.hpp"
#include "mspg.hpp"
#include "observer.hpp"
#include "parallel.hpp"
#include "problem.hpp"
#include "rng.hpp"
#include "spg.hpp"
#include "stspg.hpp"
#include "synthetic.hpp"
#include "trace.hpp"

#endif
