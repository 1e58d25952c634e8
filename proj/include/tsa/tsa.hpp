#pragma once

// Umbrella header pulling in the whole library.

#include "tsa/benchmark.hpp"
#include "tsa/checkpoint.hpp"
#include "tsa/config_file.hpp"
#include "tsa/dataset.hpp"
#include "tsa/encode.hpp"
#include "tsa/encoder.hpp"
#include "tsa/errors.hpp"
#include "tsa/heads.hpp"
#include "tsa/labels.hpp"
#include "tsa/metrics.hpp"
#include "tsa/model.hpp"
#include "tsa/preprocess.hpp"
#include "tsa/rng.hpp"
#include "tsa/split.hpp"
#include "tsa/synthetic.hpp"
#include "tsa/tensor.hpp"
#include "tsa/train.hpp"
#include "tsa/utf8.hpp"
#include "tsa/vocab.hpp"
#include "tsa/wordpiece.hpp"
