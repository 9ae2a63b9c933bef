#pragma once

#include "bfgp/core.hpp"
#include "bfgp/domains.hpp"
#include "bfgp/encoding.hpp"
#include "bfgp/error.hpp"
#include "bfgp/evaluation.hpp"
#include "bfgp/instance_io.hpp"
#include "bfgp/parallel.hpp"
#include "bfgp/program.hpp"
#include "bfgp/rng.hpp"
#include "bfgp/search.hpp"
#include "bfgp/validator.hpp"
#include "bfgp/vm.hpp"
