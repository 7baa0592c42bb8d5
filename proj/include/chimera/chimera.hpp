#pragma once

#include "chimera/bench.hpp"
#include "chimera/cli.hpp"
#include "chimera/communities.hpp"
#include "chimera/factorization.hpp"
#include "chimera/io.hpp"
#include "chimera/metrics.hpp"
#include "chimera/network.hpp"
#include "chimera/prediction.hpp"
#include "chimera/synthetic.hpp"
#include "chimera/tuner.hpp"
