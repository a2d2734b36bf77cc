#pragma once

#include "wsro/bellman_ford.hpp"
#include "wsro/clustering.hpp"
#include "wsro/csv.hpp"
#include "wsro/error.hpp"
#include "wsro/experiment.hpp"
#include "wsro/graph.hpp"
#include "wsro/grid.hpp"
#include "wsro/kmeans.hpp"
#include "wsro/orders.hpp"
#include "wsro/permutations.hpp"
#include "wsro/rng.hpp"
#include "wsro/routing.hpp"
#include "wsro/silhouette.hpp"
#include "wsro/snapshot.hpp"
#include "wsro/stats.hpp"
#include "wsro/trajectory.hpp"
#include "wsro/validation.hpp"
#include "wsro/warehouse_state.hpp"
#include "wsro/wms.hpp"
