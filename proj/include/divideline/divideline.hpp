#pragma once

#include "divideline/error.hpp"
#include "divideline/evaluate.hpp"
#include "divideline/field_contour.hpp"
#include "divideline/geodata.hpp"
#include "divideline/hyperplane.hpp"
#include "divideline/io.hpp"
#include "divideline/linear_svm.hpp"
#include "divideline/mlp_regressor.hpp"
#include "divideline/parallel.hpp"
#include "divideline/random.hpp"
#include "divideline/render.hpp"
#include "divideline/resample.hpp"
