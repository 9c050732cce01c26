#pragma once

#include "point.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "hull.hpp"
#include "kdtree.hpp"
#include "sample.hpp"
#include "core_geometry.hpp"
#include "multiscale.hpp"
#include "corona.hpp"
#include "dimension.hpp"
#include "generators.hpp"
#include "dataset.hpp"
#include "report.hpp"
#include "svg.hpp"
