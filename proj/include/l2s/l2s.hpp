#pragma once

#include "l2s/conll.hpp"
#include "l2s/counters.hpp"
#include "l2s/cs_learner.hpp"
#include "l2s/driver.hpp"
#include "l2s/error.hpp"
#include "l2s/explicit_space.hpp"
#include "l2s/feature_vector.hpp"
#include "l2s/hashing.hpp"
#include "l2s/metrics.hpp"
#include "l2s/model_io.hpp"
#include "l2s/session.hpp"
#include "l2s/synth.hpp"
#include "l2s/tasks/dep_parser.hpp"
#include "l2s/tasks/detection.hpp"
#include "l2s/tasks/entity_relation.hpp"
#include "l2s/tasks/sequence.hpp"
#include "l2s/templates.hpp"
#include "l2s/trainer.hpp"
