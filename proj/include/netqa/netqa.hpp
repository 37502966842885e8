#pragma once

#include "netqa/completeness.hpp"
#include "netqa/config.hpp"
#include "netqa/edge.hpp"
#include "netqa/error.hpp"
#include "netqa/geometry.hpp"
#include "netqa/hex_grid.hpp"
#include "netqa/ingest.hpp"
#include "netqa/length_policy.hpp"
#include "netqa/matching.hpp"
#include "netqa/network.hpp"
#include "netqa/parallel.hpp"
#include "netqa/pipeline.hpp"
#include "netqa/report.hpp"
#include "netqa/spatial_index.hpp"
#include "netqa/spatial_stats.hpp"
#include "netqa/tags.hpp"
