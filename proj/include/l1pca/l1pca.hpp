#pragma once

#include "l1pca/baselines.hpp"
#include "l1pca/errors.hpp"
#include "l1pca/experiments.hpp"
#include "l1pca/l1_multi.hpp"
#include "l1pca/l1_single.hpp"
#include "l1pca/numlin.hpp"
#include "l1pca/signs.hpp"
#include "l1pca/subspace.hpp"
