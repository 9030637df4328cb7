#pragma once

#include "chillerbow/bow.hpp"
#include "chillerbow/dtw.hpp"
#include "chillerbow/efficiency.hpp"
#include "chillerbow/error.hpp"
#include "chillerbow/hcluster.hpp"
#include "chillerbow/kmeans.hpp"
#include "chillerbow/pipeline.hpp"
#include "chillerbow/report_io.hpp"
#include "chillerbow/sax.hpp"
#include "chillerbow/segmentation.hpp"
#include "chillerbow/syngen.hpp"
#include "chillerbow/timeseries.hpp"
#include "chillerbow/timeseries_io.hpp"
