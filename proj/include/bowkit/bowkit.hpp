#pragma once

// Umbrella header for the whole library: corpus and run-file IO, the text
// pipeline, index construction and persistence, retrieval models, query
// variant expansion, and evaluation metrics.

#include "bowkit/corpus.hpp"
#include "bowkit/error.hpp"
#include "bowkit/eval.hpp"
#include "bowkit/fcg.hpp"
#include "bowkit/hash.hpp"
#include "bowkit/index.hpp"
#include "bowkit/ranking.hpp"
#include "bowkit/textpipe.hpp"
#include "bowkit/unicode.hpp"
