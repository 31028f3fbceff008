#pragma once

// Iterative spanning forests for connected superpixel and supervoxel
// segmentation: seed sampling, path-cost rules, the ordered-propagation
// engine, quality metrics, and file formats.

#include "isf/connectivity.hpp"
#include "isf/forest.hpp"
#include "isf/gradient.hpp"
#include "isf/io.hpp"
#include "isf/lattice.hpp"
#include "isf/metrics.hpp"
#include "isf/queue.hpp"
#include "isf/seeding.hpp"
#include "isf/sky.hpp"
