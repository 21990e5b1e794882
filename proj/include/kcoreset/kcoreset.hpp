#pragma once

#include "kcoreset/b_coreset.hpp"
#include "kcoreset/bicriteria.hpp"
#include "kcoreset/coreset.hpp"
#include "kcoreset/coreset_json.hpp"
#include "kcoreset/error.hpp"
#include "kcoreset/io.hpp"
#include "kcoreset/metric.hpp"
#include "kcoreset/pipeline.hpp"
#include "kcoreset/random.hpp"
#include "kcoreset/report.hpp"
#include "kcoreset/robust_median.hpp"
#include "kcoreset/sampling.hpp"
#include "kcoreset/solvers.hpp"
#include "kcoreset/streaming.hpp"
#include "kcoreset/synthetic.hpp"
