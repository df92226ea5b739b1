#pragma once

#include "ggs/attack.hpp"
#include "ggs/config.hpp"
#include "ggs/core.hpp"
#include "ggs/csv.hpp"
#include "ggs/dataset.hpp"
#include "ggs/diagnostics.hpp"
#include "ggs/harness.hpp"
#include "ggs/landscape.hpp"
#include "ggs/mlp.hpp"
#include "ggs/oracle.hpp"
#include "ggs/parallel.hpp"
#include "ggs/probe.hpp"
#include "ggs/rng.hpp"
#include "ggs/softmax.hpp"
#include "ggs/train.hpp"
#include "ggs/transform.hpp"
