#pragma once

// Umbrella header for the elmkit library.

#include "elmkit/activation.hpp"
#include "elmkit/cli.hpp"
#include "elmkit/dataset.hpp"
#include "elmkit/elm.hpp"
#include "elmkit/elm_ae.hpp"
#include "elmkit/embedding.hpp"
#include "elmkit/encode.hpp"
#include "elmkit/errors.hpp"
#include "elmkit/hash.hpp"
#include "elmkit/metrics.hpp"
#include "elmkit/ml_elm.hpp"
#include "elmkit/model_io.hpp"
#include "elmkit/normal_eq.hpp"
#include "elmkit/random_layer.hpp"
#include "elmkit/schema.hpp"
#include "elmkit/split.hpp"
#include "elmkit/timing.hpp"
