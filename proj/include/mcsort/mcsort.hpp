#pragma once

#include "mcsort/algorithms.hpp"
#include "mcsort/bench.hpp"
#include "mcsort/bsp.hpp"
#include "mcsort/distribution.hpp"
#include "mcsort/mbsp.hpp"
#include "mcsort/network.hpp"
#include "mcsort/radix.hpp"
#include "mcsort/sample_sort.hpp"
#include "mcsort/sampling.hpp"
#include "mcsort/serial.hpp"
#include "mcsort/splitmix.hpp"
#include "mcsort/types.hpp"
