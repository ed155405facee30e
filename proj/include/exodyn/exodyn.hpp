#pragma once

#include "exodyn/errors.hpp"
#include "exodyn/evaluation.hpp"
#include "exodyn/exports.hpp"
#include "exodyn/harness.hpp"
#include "exodyn/io.hpp"
#include "exodyn/kernels.hpp"
#include "exodyn/metrics.hpp"
#include "exodyn/model.hpp"
#include "exodyn/preprocess.hpp"
#include "exodyn/regressors/gpr.hpp"
#include "exodyn/regressors/knn.hpp"
#include "exodyn/regressors/lwpr.hpp"
#include "exodyn/regressors/mlp.hpp"
#include "exodyn/regressors/svr.hpp"
#include "exodyn/regressors/xgboost.hpp"
#include "exodyn/rng.hpp"
#include "exodyn/serialize.hpp"
#include "exodyn/synth.hpp"
#include "exodyn/train.hpp"
#include "exodyn/types.hpp"
