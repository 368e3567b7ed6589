#pragma once

#include "lbdiv/error.hpp"
#include "lbdiv/permutation.hpp"
#include "lbdiv/submodular.hpp"
#include "lbdiv/lovasz.hpp"
#include "lbdiv/divergence.hpp"
#include "lbdiv/aggregate.hpp"
#include "lbdiv/mallows.hpp"
